"""CSV and JSON serialization of run results."""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
import scipy

from config import VERSION, build_id
from metrics import ComparisonReport, RunSummary, manuscript_frame
from population import PARAM_NAMES, AgentKind
from utils import PANELS, months_to_publication_panel

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"

AUTHOR_COLUMNS = ["setting", "id", "archetype", "publications", "total_impact", "mean_impact"]
JOURNAL_COLUMNS = ["setting", "id", "archetype", "impact", "impact_quartile", "publications"]
POPULATION_COLUMNS = ["id", "kind", "archetype", *PARAM_NAMES, "impact"]

SEED_SCHEME = {
    "replicate_stream": "SeedSequence(master_seed, spawn_key=(replicate, purpose))",
    "purposes": {"authors": 0, "journals": 1, "cs": 2, "as": 3},
}


@dataclass
class OutputBundle:
    """Everything one experiment wrote, plus the manifest that reproduces it."""

    root: Path
    manifest: dict
    paths: list = field(default_factory=list)

    def add(self, path) -> Path:
        self.paths.append(Path(path))
        return Path(path)


def write_csv(frame: pd.DataFrame, path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n", encoding="utf-8")
    except OSError as e:
        raise OSError(e.errno, f"Cannot write {path}: {e.strerror}", str(path)) from e
    logger.debug(f"Wrote {len(frame)} rows to {path}")
    return path


def write_json(document, path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(document, indent=2, allow_nan=False) + "\n", encoding="utf-8")
    except OSError as e:
        raise OSError(e.errno, f"Cannot write {path}: {e.strerror}", str(path)) from e
    return path


def read_summary(path) -> tuple:
    """Load a replicate's summary.json back into RunSummary and ComparisonReport objects."""
    document = json.loads(Path(path).read_text(encoding="utf-8"))
    summaries = {s: RunSummary.from_dict(d) for s, d in document["summaries"].items()}
    comparison = document.get("comparison")
    return summaries, ComparisonReport.from_dict(comparison) if comparison else None


def build_manifest(cfg) -> dict:
    return {
        "version": VERSION,
        "build": build_id(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
        "master_seed": cfg.master_seed,
        "seed_scheme": SEED_SCHEME,
        "config": cfg.to_dict(),
    }


def population_frame(population) -> pd.DataFrame:
    impacts = dict(zip((j.id for j in population.journals), population.journal_impacts))
    rows = []
    for profile in population.authors + population.journals:
        row = {"id": profile.id, "kind": profile.kind.value, "archetype": profile.archetype.value}
        row.update(zip(PARAM_NAMES, profile.parameters()))
        row["impact"] = float(impacts[profile.id]) if profile.kind is AgentKind.JOURNAL else np.nan
        rows.append(row)
    return pd.DataFrame(rows, columns=POPULATION_COLUMNS)


def author_frame(summaries: dict) -> pd.DataFrame:
    rows = [{"setting": setting, **vars(a)} for setting, s in summaries.items() for a in s.per_author]
    return pd.DataFrame(rows, columns=AUTHOR_COLUMNS)


def journal_frame(summaries: dict) -> pd.DataFrame:
    rows = [{"setting": setting, **vars(j)} for setting, s in summaries.items() for j in s.per_journal]
    return pd.DataFrame(rows, columns=JOURNAL_COLUMNS)


def write_outputs(directory, population, states: dict, summaries: dict, comparison, manifest) -> list:
    """
    Write one replicate's files.

    Args:
        directory: replicate_NNN directory (created if missing)
        population: Shared Population of the replicate
        states: setting value -> final run state
        summaries: setting value -> RunSummary
        comparison: ComparisonReport, or None when only one setting ran
        manifest: Manifest echoed into summary.json

    Returns:
        Paths written, in a fixed order
    """
    directory = Path(directory)
    frames = {s: manuscript_frame(states[s]) for s in states}
    manuscripts = pd.concat(list(frames.values()), ignore_index=True)
    paths = [
        write_csv(manuscripts, directory / "manuscripts.csv"),
        write_csv(author_frame(summaries), directory / "authors.csv"),
        write_csv(journal_frame(summaries), directory / "journals.csv"),
        write_csv(population_frame(population), directory / "population.csv"),
        write_json({
            "manifest": manifest,
            "summaries": {s: summaries[s].to_dict() for s in summaries},
            "comparison": comparison.to_dict() if comparison is not None else None,
        }, directory / "summary.json"),
    ]
    plots = directory / "plotdata"
    for name, build in PANELS.items():
        paths.append(write_csv(build(summaries), plots / f"{name}.csv"))
    paths.append(write_csv(months_to_publication_panel(frames), plots / "months_to_publication.csv"))
    logger.info(f"📁 Wrote {len(paths)} files to {directory}")
    return paths
