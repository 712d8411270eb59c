import json
import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np
import scipy

from population import ArchetypeSpec, Setting, default_author_specs, default_journal_specs

logger = logging.getLogger(__name__)

VERSION = "1.0.0"
DEFAULT_CONFIG_PATH = Path(__file__).parent / "config.json"

SETTING_CHOICES = ("cs", "as", "both")
DUTY_STRATEGIES = ("expertise", "random")
RANKINGS = ("inverse_density", "density")


class ConfigError(ValueError):
    """Invalid configuration. ``problems`` lists every violation found."""

    def __init__(self, problems, source=None):
        self.problems = list(problems) if isinstance(problems, (list, tuple)) else [str(problems)]
        self.source = source
        prefix = f"{source}: " if source else ""
        super().__init__(prefix + "; ".join(self.problems))


@dataclass
class SimConfig:
    """Every knob of a simulation experiment, with its default value."""

    master_seed: Optional[int] = None
    months: int = 120
    author_specs: list = field(default_factory=default_author_specs)
    journal_specs: list = field(default_factory=default_journal_specs)
    productivity: float = 0.25
    completion_prob: float = 0.5
    max_rejections: int = 5
    reviewers_per_ms: int = 3
    top_pool: int = 20
    window_halfwidth: float = 0.1
    improvement_cap: float = 0.1
    as_bid_rounds: int = 1
    as_duty_strategy: str = "expertise"
    replicates: int = 1
    settings: str = "both"
    review_start_lag: int = 1
    reviewer_ranking: str = "density"
    workers: int = 1

    def to_dict(self) -> dict:
        data = asdict(self)
        data["author_specs"] = [s.to_dict() for s in self.author_specs]
        data["journal_specs"] = [s.to_dict() for s in self.journal_specs]
        return data

    def get(self, key, default=None):
        """Get a configuration value using dot notation (e.g., 'author_specs.0.count')."""
        value = self.to_dict()
        for k in key.split('.'):
            if isinstance(value, dict) and k in value:
                value = value[k]
            elif isinstance(value, list) and k.isdigit() and int(k) < len(value):
                value = value[int(k)]
            else:
                return default
        return value

    def selected_settings(self) -> list:
        if self.settings == "both":
            return [Setting.CS, Setting.AS]
        return [Setting(self.settings)]

    def problems(self) -> list:
        """Every violated invariant, in field order."""
        problems = []

        def integer(name, minimum, maximum=None):
            value = getattr(self, name)
            if not _is_int(value):
                problems.append(f"{name} must be an integer, got {value!r}")
            elif value < minimum or (maximum is not None and value >= maximum):
                bound = f"[{minimum}, {maximum})" if maximum is not None else f">= {minimum}"
                problems.append(f"{name} must be {bound}, got {value}")

        def probability(name):
            value = getattr(self, name)
            if not _is_real(value) or not 0.0 <= value <= 1.0:
                problems.append(f"{name} must be a probability in [0, 1], got {value!r}")

        def choice(name, options):
            value = getattr(self, name)
            if value not in options:
                problems.append(f"{name} must be one of {', '.join(options)}, got {value!r}")

        if self.master_seed is None:
            problems.append("master_seed is required")
        else:
            integer("master_seed", 0, 2 ** 64)
        integer("months", 1)
        probability("productivity")
        probability("completion_prob")
        integer("max_rejections", 1)
        integer("reviewers_per_ms", 1)
        integer("top_pool", 1)
        if _is_int(self.reviewers_per_ms) and _is_int(self.top_pool) and self.reviewers_per_ms > self.top_pool:
            problems.append(f"reviewers_per_ms ({self.reviewers_per_ms}) must not exceed top_pool ({self.top_pool})")
        if not _is_real(self.window_halfwidth) or not 0.0 < self.window_halfwidth < 0.5:
            problems.append(f"window_halfwidth must lie in (0, 0.5), got {self.window_halfwidth!r}")
        probability("improvement_cap")
        integer("as_bid_rounds", 1)
        choice("as_duty_strategy", DUTY_STRATEGIES)
        integer("replicates", 1)
        choice("settings", SETTING_CHOICES)
        integer("review_start_lag", 0)
        choice("reviewer_ranking", RANKINGS)
        integer("workers", 1)
        typed = True
        for name in ("author_specs", "journal_specs"):
            if not all(isinstance(s, ArchetypeSpec) for s in getattr(self, name)):
                problems.append(f"{name} must be a list of archetype specifications")
                typed = False
        if typed and _is_int(self.reviewers_per_ms) and sum(s.count for s in self.author_specs) <= self.reviewers_per_ms:
            problems.append("author population is too small to staff a referee panel")
        return problems

    def validate(self) -> "SimConfig":
        problems = self.problems()
        if problems:
            raise ConfigError(problems)
        return self


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_real(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _load_document(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise OSError(e.errno, f"Cannot read config file: {e.strerror}", str(path)) from e
    if not text.strip():
        return {}
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError([f"line {e.lineno}, column {e.colno}: {e.msg}"], source=str(path)) from e
    if not isinstance(document, dict):
        raise ConfigError(["top level must be a JSON object"], source=str(path))
    return document


def _specs(raw, name, problems) -> list:
    if not isinstance(raw, list):
        problems.append(f"{name} must be a list, got {type(raw).__name__}")
        return []
    specs = []
    for i, entry in enumerate(raw):
        if isinstance(entry, ArchetypeSpec):
            specs.append(entry)
            continue
        try:
            specs.append(ArchetypeSpec.from_dict(entry))
        except (ValueError, TypeError, AttributeError) as e:
            problems.append(f"{name}[{i}]: {e}")
    return specs


def parse_config(path=None, overrides=None) -> SimConfig:
    """
    Build a validated SimConfig.

    Built-in defaults are overlaid by the JSON document at ``path`` (if any),
    then by ``overrides`` (CLI flags; ``None`` values are ignored).

    Args:
        path: JSON config file, or None for defaults only
        overrides: Mapping of field name to value

    Returns:
        SimConfig with every field filled and checked

    Raises:
        ConfigError: Parse failure (with line/column) or unknown keys or
            violated invariants, all listed together
        OSError: The file cannot be read
    """
    document = _load_document(path) if path is not None else {}
    source = str(path) if path is not None else "flags"
    known = {f.name for f in fields(SimConfig)}
    problems = [f"unknown key '{key}'" for key in sorted(set(document) - known)]

    values = {key: value for key, value in document.items() if key in known}
    for key, value in (overrides or {}).items():
        if key not in known:
            problems.append(f"unknown flag '{key}'")
        elif value is not None:
            values[key] = value

    for name in ("author_specs", "journal_specs"):
        if name in values:
            values[name] = _specs(values[name], name, problems)

    cfg = SimConfig(**values)
    problems.extend(cfg.problems())
    if problems:
        raise ConfigError(problems, source=source)
    logger.debug(f"Loaded configuration from: {source}")
    return cfg


def build_id() -> str:
    return f"{VERSION}+numpy-{np.__version__}+scipy-{scipy.__version__}"
