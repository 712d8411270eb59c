"""Replicate orchestration: one shared population per replicate, both systems run over it."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from tqdm import tqdm

from as_engine import run_as
from cs_engine import run_cs
from metrics import ComparisonReport, aggregate_summaries, compare_runs, summarize_run
from population import Population, Setting, build_population
from result_writer import OutputBundle, build_manifest, write_json, write_outputs
from stochastics import RngStream

logger = logging.getLogger(__name__)

AUTHOR_STREAM = 0
JOURNAL_STREAM = 1
RUN_STREAMS = {Setting.CS: 2, Setting.AS: 3}
RUNNERS = {Setting.CS: run_cs, Setting.AS: run_as}


@dataclass
class ReplicateResult:
    replicate: int
    population: Population
    states: dict = field(default_factory=dict)
    summaries: dict = field(default_factory=dict)
    comparison: ComparisonReport = None
    paths: list = field(default_factory=list)


def replicate_streams(master_seed: int, replicate: int) -> dict:
    """Independent streams of one replicate, keyed by purpose."""
    root = RngStream(master_seed).derive(replicate)
    return {
        "authors": root.derive(AUTHOR_STREAM),
        "journals": root.derive(JOURNAL_STREAM),
        **{setting: root.derive(k) for setting, k in RUN_STREAMS.items()},
    }


def replicate_population(cfg, replicate: int) -> Population:
    streams = replicate_streams(cfg.master_seed, replicate)
    return build_population(cfg.author_specs, cfg.journal_specs, streams["authors"], streams["journals"],
                            halfwidth=cfg.window_halfwidth)


def run_replicate(cfg, replicate: int, out_dir=None, manifest=None, progress: bool = False) -> ReplicateResult:
    """
    Run every selected setting of one replicate over a single shared population.

    Args:
        cfg: Validated SimConfig
        replicate: Replicate index (selects the random streams)
        out_dir: Experiment root; files go to ``out_dir/replicate_NNN``. None writes nothing.
        manifest: Manifest to echo into summary.json
        progress: Show month progress bars

    Returns:
        ReplicateResult
    """
    streams = replicate_streams(cfg.master_seed, replicate)
    population = replicate_population(cfg, replicate)
    result = ReplicateResult(replicate=replicate, population=population)
    logger.info(f"🧪 Replicate {replicate}: {len(population.authors)} authors, "
                f"{len(population.journals)} journals")

    for setting in cfg.selected_settings():
        state = RUNNERS[setting](population, cfg, streams[setting], progress=progress)
        result.states[setting.value] = state
        result.summaries[setting.value] = summarize_run(state, setting)

    if len(result.summaries) == 2:
        result.comparison = compare_runs(result.summaries["cs"], result.summaries["as"])

    if out_dir is not None:
        directory = Path(out_dir) / f"replicate_{replicate:03d}"
        result.paths = write_outputs(directory, population, result.states, result.summaries,
                                     result.comparison, manifest if manifest is not None else build_manifest(cfg))
    return result


def run_experiment(cfg, out_dir, progress: bool = False) -> OutputBundle:
    """
    Run all replicates and write the output bundle.

    Replicates run on a thread pool of ``cfg.workers`` threads, each writing
    only to its own directory; the manifest and the cross-replicate
    aggregate are written afterwards in replicate order.

    Returns:
        OutputBundle listing every file written
    """
    cfg.validate()
    out_dir = Path(out_dir)
    manifest = build_manifest(cfg)
    bundle = OutputBundle(root=out_dir, manifest=manifest)

    replicates = range(cfg.replicates)
    month_bars = progress and cfg.workers == 1
    with ThreadPoolExecutor(max_workers=cfg.workers) as executor:
        futures = [executor.submit(run_replicate, cfg, r, out_dir, manifest, month_bars) for r in replicates]
        results = [f.result() for f in tqdm(futures, desc="🔁 Replicates", disable=not progress)]

    for result in results:
        for path in result.paths:
            bundle.add(path)

    bundle.add(write_json(manifest, out_dir / "manifest.json"))
    summaries = [s for result in results for s in result.summaries.values()]
    bundle.add(write_json(aggregate_summaries(summaries), out_dir / "aggregate.json"))
    logger.info(f"✅ {cfg.replicates} replicate(s) written to {out_dir}")
    return bundle
