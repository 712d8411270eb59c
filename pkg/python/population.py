"""Author and journal populations, journal impact, and manuscripts."""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Optional

import numpy as np

from stochastics import DEFAULT_HALFWIDTH, BetaParams, RngStream, beta_sample, window_density, window_mass

logger = logging.getLogger(__name__)

PARAM_NAMES = ("alpha_t", "beta_t", "alpha_q", "beta_q", "alpha_n", "beta_n")


class SpecError(ValueError):
    """Raised for a malformed archetype specification."""


class IllegalTransitionError(RuntimeError):
    """Raised when a manuscript is moved along an edge its lifecycle does not have."""


class AgentKind(str, Enum):
    AUTHOR = "author"
    JOURNAL = "journal"


class Archetype(str, Enum):
    BROAD = "broad"
    SPECIALIST = "specialist"
    NORMAL = "normal"


class Setting(str, Enum):
    CS = "cs"
    AS = "as"


class ManuscriptState(str, Enum):
    DRAFT = "draft"
    UNDER_REVIEW = "under_review"
    REJECTED = "rejected"  # CS only: waiting for the next submission
    IN_FIRST_POOL = "in_first_pool"
    IN_SECOND_POOL = "in_second_pool"
    PUBLISHED = "published"
    ABANDONED = "abandoned"


TRANSITIONS = {
    Setting.CS: {
        ManuscriptState.DRAFT: {ManuscriptState.UNDER_REVIEW, ManuscriptState.ABANDONED},
        ManuscriptState.UNDER_REVIEW: {ManuscriptState.PUBLISHED, ManuscriptState.REJECTED},
        ManuscriptState.REJECTED: {ManuscriptState.UNDER_REVIEW, ManuscriptState.ABANDONED},
        ManuscriptState.PUBLISHED: set(),
        ManuscriptState.ABANDONED: set(),
    },
    Setting.AS: {
        ManuscriptState.DRAFT: {ManuscriptState.IN_FIRST_POOL},
        ManuscriptState.IN_FIRST_POOL: {ManuscriptState.IN_SECOND_POOL},
        ManuscriptState.IN_SECOND_POOL: {ManuscriptState.PUBLISHED, ManuscriptState.ABANDONED},
        ManuscriptState.PUBLISHED: set(),
        ManuscriptState.ABANDONED: set(),
    },
}


@dataclass(frozen=True)
class ArchetypeSpec:
    """How many agents of one archetype to draw, and the interval for each shape parameter."""

    archetype: Archetype
    count: int
    ranges: dict

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise SpecError("; ".join(problems))

    def problems(self) -> list:
        problems = []
        if not isinstance(self.count, int) or self.count < 0:
            problems.append(f"{self.archetype.value}: count must be a nonnegative integer, got {self.count}")
        missing = [name for name in PARAM_NAMES if name not in self.ranges]
        if missing:
            problems.append(f"{self.archetype.value}: missing ranges for {', '.join(missing)}")
        unknown = sorted(set(self.ranges) - set(PARAM_NAMES))
        if unknown:
            problems.append(f"{self.archetype.value}: unknown parameters {', '.join(unknown)}")
        for name in PARAM_NAMES:
            if name not in self.ranges:
                continue
            lo, hi = self.ranges[name]
            if not lo > 0:
                problems.append(f"{self.archetype.value}.{name}: lower bound must be > 0, got {lo}")
            if lo > hi:
                problems.append(f"{self.archetype.value}.{name}: interval [{lo}, {hi}] is empty")
        return problems

    def to_dict(self) -> dict:
        return {
            "archetype": self.archetype.value,
            "count": self.count,
            "ranges": {name: list(self.ranges[name]) for name in PARAM_NAMES},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ArchetypeSpec":
        try:
            archetype = Archetype(data["archetype"])
        except (KeyError, ValueError) as e:
            raise SpecError(f"Invalid archetype entry {data!r}: {e}")
        ranges = {}
        for name, bounds in data.get("ranges", {}).items():
            if not isinstance(bounds, (list, tuple)) or len(bounds) != 2:
                raise SpecError(f"{archetype.value}.{name}: expected [lo, hi], got {bounds!r}")
            ranges[name] = (float(bounds[0]), float(bounds[1]))
        return cls(archetype=archetype, count=data.get("count", 0), ranges=ranges)


def _ranges(t, qn_alpha, qn_beta):
    # quality and novelty share their intervals in every default archetype
    return {
        "alpha_t": t, "beta_t": t,
        "alpha_q": qn_alpha, "beta_q": qn_beta,
        "alpha_n": qn_alpha, "beta_n": qn_beta,
    }


def default_author_specs() -> list:
    return [
        ArchetypeSpec(Archetype.BROAD, 50, _ranges((1.0, 5.0), (50.0, 100.0), (5.0, 10.0))),
        ArchetypeSpec(Archetype.SPECIALIST, 150, _ranges((10.0, 100.0), (5.0, 10.0), (1.0, 5.0))),
        ArchetypeSpec(Archetype.NORMAL, 300, _ranges((1.0, 10.0), (1.0, 10.0), (5.0, 10.0))),
    ]


def default_journal_specs() -> list:
    return [
        ArchetypeSpec(Archetype.BROAD, 5, _ranges((1.0, 5.0), (50.0, 100.0), (5.0, 10.0))),
        ArchetypeSpec(Archetype.SPECIALIST, 15, _ranges((10.0, 100.0), (5.0, 10.0), (1.0, 5.0))),
        ArchetypeSpec(Archetype.NORMAL, 30, _ranges((1.0, 10.0), (1.0, 10.0), (5.0, 10.0))),
    ]


@dataclass(frozen=True)
class AgentProfile:
    """An author or a journal: three beta distributions over topic, quality and novelty."""

    id: int
    kind: AgentKind
    archetype: Archetype
    topic: BetaParams
    quality: BetaParams
    novelty: BetaParams

    def parameters(self) -> tuple:
        return (self.topic.alpha, self.topic.beta, self.quality.alpha,
                self.quality.beta, self.novelty.alpha, self.novelty.beta)


def _generate(kind: AgentKind, specs: list, rng: RngStream) -> list:
    profiles = []
    for spec in specs:
        for _ in range(spec.count):
            values = [rng.uniform(*spec.ranges[name]) for name in PARAM_NAMES]
            profiles.append(AgentProfile(
                id=len(profiles),
                kind=kind,
                archetype=spec.archetype,
                topic=BetaParams(values[0], values[1]),
                quality=BetaParams(values[2], values[3]),
                novelty=BetaParams(values[4], values[5]),
            ))
    logger.debug(f"Generated {len(profiles)} {kind.value}s")
    return profiles


def generate_authors(specs: list, rng: RngStream) -> list:
    """
    Draw author profiles archetype by archetype.

    Args:
        specs: ArchetypeSpec list, processed in order
        rng: Stream dedicated to author generation

    Returns:
        List of AgentProfile with dense ids from 0
    """
    return _generate(AgentKind.AUTHOR, specs, rng)


def generate_journals(specs: list, rng: RngStream) -> list:
    return _generate(AgentKind.JOURNAL, specs, rng)


def journal_impact(j: AgentProfile, halfwidth: float = DEFAULT_HALFWIDTH) -> float:
    """Mean quality times mean novelty, divided by topical concentration around the mean topic."""
    if j.kind is not AgentKind.JOURNAL:
        raise ValueError(f"Impact is defined for journals only, got {j.kind.value} {j.id}")
    return j.quality.mean() * j.novelty.mean() / window_density(j.topic, j.topic.mean(), halfwidth)


class ParamArrays(NamedTuple):
    alpha_t: np.ndarray
    beta_t: np.ndarray
    alpha_q: np.ndarray
    beta_q: np.ndarray
    alpha_n: np.ndarray
    beta_n: np.ndarray

    @classmethod
    def of(cls, profiles) -> "ParamArrays":
        table = np.array([p.parameters() for p in profiles], dtype=float).reshape(-1, 6)
        return cls(*(table[:, i].copy() for i in range(6)))


class Population:
    """The shared authors and journals of one replicate, with vectorized views."""

    def __init__(self, authors, journals, halfwidth=DEFAULT_HALFWIDTH):
        self.authors = tuple(authors)
        self.journals = tuple(journals)
        self.halfwidth = halfwidth
        self.author_params = ParamArrays.of(self.authors)
        self.journal_params = ParamArrays.of(self.journals)
        self.author_ids = np.arange(len(self.authors))
        self.journal_ids = np.arange(len(self.journals))
        if self.journals:
            means = self.journal_params.alpha_t / (self.journal_params.alpha_t + self.journal_params.beta_t)
            z = window_mass(self.journal_params.alpha_t, self.journal_params.beta_t, means, halfwidth)
            q_mean = self.journal_params.alpha_q / (self.journal_params.alpha_q + self.journal_params.beta_q)
            n_mean = self.journal_params.alpha_n / (self.journal_params.alpha_n + self.journal_params.beta_n)
            self.journal_impacts = q_mean * n_mean / z
        else:
            self.journal_impacts = np.zeros(0)

    def fingerprint(self) -> str:
        """Stable digest of every agent's parameters (used to pair CS and AS runs)."""
        digest = hashlib.sha256()
        for profile in self.authors + self.journals:
            digest.update(f"{profile.kind.value}:{profile.id}:{profile.archetype.value}:".encode("utf-8"))
            digest.update(np.array(profile.parameters(), dtype="<f8").tobytes())
        return digest.hexdigest()


def build_population(author_specs, journal_specs, author_rng, journal_rng,
                     halfwidth=DEFAULT_HALFWIDTH) -> Population:
    return Population(
        generate_authors(author_specs, author_rng),
        generate_journals(journal_specs, journal_rng),
        halfwidth=halfwidth,
    )


@dataclass
class Manuscript:
    """One single-authored manuscript and its history."""

    id: int
    author_id: int
    setting: Setting
    t: float
    q: float
    n: float
    created_month: int
    q0: float = field(init=False)
    n0: float = field(init=False)
    revision_count: int = 0
    state: ManuscriptState = ManuscriptState.DRAFT
    rejection_count: int = 0
    review_log: list = field(default_factory=list)
    revisions: list = field(default_factory=list)
    journal_id: Optional[int] = None
    outcome_month: Optional[int] = None
    # CS ladder
    submissions: list = field(default_factory=list)
    rejected_by: set = field(default_factory=set)
    next_submission_month: Optional[int] = None
    # AS pools
    pool_entry_month: Optional[int] = None
    ripe_month: Optional[int] = None
    bid_rounds: int = 0

    def __post_init__(self):
        self.q0 = self.q
        self.n0 = self.n

    @property
    def is_resolved(self) -> bool:
        return self.state in (ManuscriptState.PUBLISHED, ManuscriptState.ABANDONED)

    def move_to(self, state: ManuscriptState) -> None:
        allowed = TRANSITIONS[self.setting][self.state]
        if state not in allowed:
            raise IllegalTransitionError(
                f"Manuscript {self.id} ({self.setting.value}) cannot go from "
                f"{self.state.value} to {state.value}"
            )
        self.state = state

    def publish(self, journal_id: int, month: int) -> None:
        self.move_to(ManuscriptState.PUBLISHED)
        self.journal_id = journal_id
        self.outcome_month = month

    def abandon(self, month: int) -> None:
        self.move_to(ManuscriptState.ABANDONED)
        self.outcome_month = month


def draw_manuscript(a: AgentProfile, month: int, rng: RngStream,
                    manuscript_id: int = 0, setting: Setting = Setting.CS) -> Manuscript:
    """Sample (t, q, n) from the author's three distributions."""
    if a.kind is not AgentKind.AUTHOR:
        raise ValueError(f"Only authors write manuscripts, got {a.kind.value} {a.id}")
    t = beta_sample(a.topic, rng)
    q = beta_sample(a.quality, rng)
    n = beta_sample(a.novelty, rng)
    return Manuscript(id=manuscript_id, author_id=a.id, setting=setting,
                      t=t, q=q, n=n, created_month=month)


class EventKind(str, Enum):
    CREATED = "created"
    SUBMITTED = "submitted"
    POOLED = "pooled"
    REVIEW_ASSIGNED = "review_assigned"
    REVIEW_COMPLETED = "review_completed"
    REVISED = "revised"
    ACCEPTED = "accepted"
    REJECTED = "rejected"
    RIPENED = "ripened"
    BID = "bid"
    PUBLISHED = "published"
    ABANDONED = "abandoned"


@dataclass(frozen=True)
class LifecycleEvent:
    month: int
    manuscript_id: int
    kind: EventKind
    journal_id: Optional[int] = None
    agent_id: Optional[int] = None


def produce_manuscripts(population: Population, month: int, rng: RngStream, productivity: float,
                        first_id: int, setting: Setting) -> list:
    """Each author independently writes a manuscript with probability ``productivity``."""
    draws = rng.uniforms(len(population.authors))
    manuscripts = []
    for author, u in zip(population.authors, draws):
        if u < productivity:
            manuscripts.append(draw_manuscript(author, month, rng, first_id + len(manuscripts), setting))
    return manuscripts
