"""Run summaries, CS-versus-AS comparisons and cross-replicate aggregates."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
import pandas as pd

from as_engine import AsState, first_pool_ages
from population import EventKind, Manuscript, ManuscriptState, Setting

logger = logging.getLogger(__name__)

MANUSCRIPT_COLUMNS = [
    "id", "author_id", "setting", "t", "q0", "n0", "q_final", "n_final", "k",
    "created_month", "outcome", "outcome_month", "journal_id", "n_reviews", "n_rejections",
]

HEADLINE_METRICS = (
    ("manuscripts", ("totals", "manuscripts")),
    ("published", ("totals", "published")),
    ("abandoned", ("totals", "abandoned")),
    ("in_flight", ("totals", "in_flight")),
    ("publication_fraction", ("publication_fraction",)),
    ("publication_fraction_all", ("publication_fraction_all",)),
    ("reviews_total", ("reviews", "total")),
    ("reviews_per_manuscript", ("reviews", "mean_per_manuscript")),
    ("reviews_per_published", ("reviews", "mean_per_published")),
    ("months_to_publication", ("months_to_publication", "mean")),
    ("merit_published", ("merit", "mean_published")),
    ("merit_abandoned", ("merit", "mean_abandoned")),
)


class PopulationMismatchError(ValueError):
    """Raised when two runs being compared did not share a population."""


def manuscript_merit(ms: Manuscript) -> float:
    """Current quality times current novelty."""
    return ms.q * ms.n


def nearest_rank(values, percent: float) -> Optional[float]:
    """Nearest-rank percentile: the smallest value with at least ``percent`` % of the data at or below it."""
    ordered = sorted(values)
    if not ordered:
        return None
    rank = max(1, math.ceil(percent / 100.0 * len(ordered)))
    return ordered[rank - 1]


def impact_quartiles(impacts) -> list:
    """Label each impact 'top' (>= P75), 'bottom' (<= P25) or 'middle'."""
    impacts = list(impacts)
    p25 = nearest_rank(impacts, 25)
    p75 = nearest_rank(impacts, 75)
    labels = []
    for value in impacts:
        if value >= p75:
            labels.append("top")
        elif value <= p25:
            labels.append("bottom")
        else:
            labels.append("middle")
    return labels


def _mean(values) -> Optional[float]:
    values = list(values)
    return float(np.mean(values)) if values else None


@dataclass
class Totals:
    manuscripts: int
    published: int
    abandoned: int
    in_flight: int


@dataclass
class ReviewStats:
    total: int
    mean_per_manuscript: Optional[float]
    mean_per_published: Optional[float]
    mean_per_reviewed: Optional[float]
    submissions_total: int
    mean_submissions_per_manuscript: Optional[float]
    mean_submissions_per_published: Optional[float]


@dataclass
class TimeStats:
    mean: Optional[float]
    q1: Optional[float]
    median: Optional[float]
    q3: Optional[float]


@dataclass
class AuthorStats:
    id: int
    archetype: str
    publications: int
    total_impact: float
    mean_impact: float


@dataclass
class JournalStats:
    id: int
    archetype: str
    impact: float
    impact_quartile: str
    publications: int


@dataclass
class MeritStats:
    mean_published: Optional[float]
    mean_abandoned: Optional[float]


@dataclass
class PoolStats:
    """AS only: what is left in the pools and the debt ledger at the horizon."""

    first_pool_size: int
    first_pool_mean_age: Optional[float]
    first_pool_max_age: Optional[int]
    second_pool_size: int
    debt_incurred: int
    duties_assigned: int
    outstanding_debt: int


@dataclass
class RunSummary:
    setting: str
    population_fingerprint: str
    months: int
    totals: Totals
    publication_fraction: float
    publication_fraction_all: float
    reviews: ReviewStats
    months_to_publication: TimeStats
    merit: MeritStats
    mean_revisions_published: Optional[float]
    per_author: list = field(default_factory=list)
    per_journal: list = field(default_factory=list)
    pools: Optional[PoolStats] = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunSummary":
        return cls(
            setting=data["setting"],
            population_fingerprint=data["population_fingerprint"],
            months=data["months"],
            totals=Totals(**data["totals"]),
            publication_fraction=data["publication_fraction"],
            publication_fraction_all=data["publication_fraction_all"],
            reviews=ReviewStats(**data["reviews"]),
            months_to_publication=TimeStats(**data["months_to_publication"]),
            merit=MeritStats(**data["merit"]),
            mean_revisions_published=data["mean_revisions_published"],
            per_author=[AuthorStats(**a) for a in data["per_author"]],
            per_journal=[JournalStats(**j) for j in data["per_journal"]],
            pools=PoolStats(**data["pools"]) if data.get("pools") is not None else None,
        )

    def headline(self) -> dict:
        """Flat scalar view used for cross-replicate aggregation."""
        data = self.to_dict()
        flat = {}
        for name, path in HEADLINE_METRICS:
            value = data
            for key in path:
                value = value[key]
            flat[name] = value
        return flat


def _outcome(ms: Manuscript) -> str:
    if ms.state is ManuscriptState.PUBLISHED:
        return "published"
    if ms.state is ManuscriptState.ABANDONED:
        return "abandoned"
    return "in_flight"


def manuscript_frame(state) -> pd.DataFrame:
    """One row per manuscript in id order, columns as in manuscripts.csv."""
    rows = [{
        "id": ms.id,
        "author_id": ms.author_id,
        "setting": ms.setting.value,
        "t": ms.t,
        "q0": ms.q0,
        "n0": ms.n0,
        "q_final": ms.q,
        "n_final": ms.n,
        "k": ms.revision_count,
        "created_month": ms.created_month,
        "outcome": _outcome(ms),
        "outcome_month": ms.outcome_month,
        "journal_id": ms.journal_id,
        "n_reviews": len(ms.review_log),
        "n_rejections": ms.rejection_count,
    } for ms in sorted(state.manuscripts.values(), key=lambda m: m.id)]
    frame = pd.DataFrame(rows, columns=MANUSCRIPT_COLUMNS)
    for column in ("outcome_month", "journal_id"):
        frame[column] = frame[column].astype("Int64")
    return frame


def _submissions(ms: Manuscript) -> int:
    if ms.setting is Setting.CS:
        return len(ms.submissions)
    return 0 if ms.pool_entry_month is None else 1


def _author_stats(state, published: list) -> list:
    impacts = state.population.journal_impacts
    counts = {}
    totals = {}
    for ms in published:
        counts[ms.author_id] = counts.get(ms.author_id, 0) + 1
        totals[ms.author_id] = totals.get(ms.author_id, 0.0) + float(impacts[ms.journal_id])
    stats = []
    for author in state.population.authors:
        n = counts.get(author.id, 0)
        total = totals.get(author.id, 0.0)
        stats.append(AuthorStats(
            id=author.id,
            archetype=author.archetype.value,
            publications=n,
            total_impact=total,
            mean_impact=total / n if n else 0.0,
        ))
    return stats


def _journal_stats(state, published: list) -> list:
    impacts = [float(i) for i in state.population.journal_impacts]
    quartiles = impact_quartiles(impacts)
    counts = {}
    for ms in published:
        counts[ms.journal_id] = counts.get(ms.journal_id, 0) + 1
    return [
        JournalStats(id=j.id, archetype=j.archetype.value, impact=impacts[j.id],
                     impact_quartile=quartiles[j.id], publications=counts.get(j.id, 0))
        for j in state.population.journals
    ]


def _pool_stats(state: AsState) -> PoolStats:
    ages = first_pool_ages(state)
    return PoolStats(
        first_pool_size=len(state.first_pool),
        first_pool_mean_age=_mean(ages),
        first_pool_max_age=max(ages) if ages else None,
        second_pool_size=len(state.second_pool),
        debt_incurred=state.debt_incurred,
        duties_assigned=state.duties_assigned,
        outstanding_debt=state.outstanding_debt(),
    )


def summarize_run(state, setting: Setting) -> RunSummary:
    """
    Compute every reported aggregate of a finished run.

    Per-manuscript review and submission means are taken over resolved
    manuscripts (published or abandoned). Publication fractions are given
    over resolved manuscripts and over all manuscripts.

    Args:
        state: Final CsState or AsState
        setting: Which system produced ``state``

    Returns:
        RunSummary
    """
    setting = Setting(setting)
    manuscripts = sorted(state.manuscripts.values(), key=lambda m: m.id)
    published = [ms for ms in manuscripts if ms.state is ManuscriptState.PUBLISHED]
    abandoned = [ms for ms in manuscripts if ms.state is ManuscriptState.ABANDONED]
    resolved = [ms for ms in manuscripts if ms.is_resolved]
    reviewed = [ms for ms in resolved if ms.review_log]

    months = [ms.outcome_month - ms.created_month for ms in published]
    submissions_total = sum(_submissions(ms) for ms in manuscripts)

    summary = RunSummary(
        setting=setting.value,
        population_fingerprint=state.population.fingerprint(),
        months=state.month,
        totals=Totals(
            manuscripts=len(manuscripts),
            published=len(published),
            abandoned=len(abandoned),
            in_flight=len(manuscripts) - len(resolved),
        ),
        publication_fraction=len(published) / len(resolved) if resolved else 0.0,
        publication_fraction_all=len(published) / len(manuscripts) if manuscripts else 0.0,
        reviews=ReviewStats(
            total=sum(len(ms.review_log) for ms in manuscripts),
            mean_per_manuscript=_mean(len(ms.review_log) for ms in resolved),
            mean_per_published=_mean(len(ms.review_log) for ms in published),
            mean_per_reviewed=_mean(len(ms.review_log) for ms in reviewed),
            submissions_total=submissions_total,
            mean_submissions_per_manuscript=_mean(_submissions(ms) for ms in resolved),
            mean_submissions_per_published=_mean(_submissions(ms) for ms in published),
        ),
        months_to_publication=TimeStats(
            mean=_mean(months),
            q1=nearest_rank(months, 25),
            median=nearest_rank(months, 50),
            q3=nearest_rank(months, 75),
        ),
        merit=MeritStats(
            mean_published=_mean(manuscript_merit(ms) for ms in published),
            mean_abandoned=_mean(manuscript_merit(ms) for ms in abandoned),
        ),
        mean_revisions_published=_mean(ms.revision_count for ms in published),
        per_author=_author_stats(state, published),
        per_journal=_journal_stats(state, published),
        pools=_pool_stats(state) if isinstance(state, AsState) else None,
    )
    logger.info(f"{setting.value.upper()} summary: {summary.totals.published}/{summary.totals.manuscripts} "
                f"published, {summary.totals.abandoned} abandoned, {summary.totals.in_flight} in flight")
    return summary


def impact_from_events(events, journal_impacts) -> dict:
    """Author total impact recomputed from PUBLISHED events alone."""
    totals = {}
    for event in events:
        if event.kind is EventKind.PUBLISHED:
            totals[event.agent_id] = totals.get(event.agent_id, 0.0) + float(journal_impacts[event.journal_id])
    return totals


@dataclass
class QuartileDelta:
    journals: int
    mean_publications_cs: float
    mean_publications_as: float
    fraction_more_in_as: float


@dataclass
class ComparisonReport:
    population_fingerprint: str
    authors_more_publications_as: float
    authors_higher_total_impact_as: float
    authors_higher_mean_impact_as: float
    journals_more_publications_as: float
    quartile_deltas: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ComparisonReport":
        deltas = {k: QuartileDelta(**v) for k, v in data["quartile_deltas"].items()}
        return cls(**{**data, "quartile_deltas": deltas})


def _fraction(flags) -> float:
    flags = list(flags)
    return sum(flags) / len(flags) if flags else 0.0


def compare_runs(cs: RunSummary, as_: RunSummary) -> ComparisonReport:
    """Pair every author and journal across the two systems."""
    if cs.population_fingerprint != as_.population_fingerprint:
        raise PopulationMismatchError(
            f"Runs used different populations ({cs.population_fingerprint[:12]} vs "
            f"{as_.population_fingerprint[:12]})"
        )
    if [a.id for a in cs.per_author] != [a.id for a in as_.per_author] or \
            [j.id for j in cs.per_journal] != [j.id for j in as_.per_journal]:
        raise PopulationMismatchError("Runs list different authors or journals")

    pairs = list(zip(cs.per_author, as_.per_author))
    journal_pairs = list(zip(cs.per_journal, as_.per_journal))
    deltas = {}
    for label in ("top", "middle", "bottom"):
        group = [(c, a) for c, a in journal_pairs if c.impact_quartile == label]
        if not group:
            continue
        deltas[label] = QuartileDelta(
            journals=len(group),
            mean_publications_cs=float(np.mean([c.publications for c, _ in group])),
            mean_publications_as=float(np.mean([a.publications for _, a in group])),
            fraction_more_in_as=_fraction(a.publications > c.publications for c, a in group),
        )
    return ComparisonReport(
        population_fingerprint=cs.population_fingerprint,
        authors_more_publications_as=_fraction(a.publications > c.publications for c, a in pairs),
        authors_higher_total_impact_as=_fraction(a.total_impact > c.total_impact for c, a in pairs),
        authors_higher_mean_impact_as=_fraction(a.mean_impact > c.mean_impact for c, a in pairs),
        journals_more_publications_as=_fraction(a.publications > c.publications for c, a in journal_pairs),
        quartile_deltas=deltas,
    )


def aggregate_summaries(summaries) -> dict:
    """
    Mean and sample standard deviation of the headline scalars per setting.

    Args:
        summaries: Iterable of RunSummary, any mix of settings and replicates

    Returns:
        {setting: {"replicates": n, metric: {"mean": m, "std": s}}}
    """
    by_setting = {}
    for summary in summaries:
        by_setting.setdefault(summary.setting, []).append(summary.headline())
    result = {}
    for setting in sorted(by_setting):
        rows = by_setting[setting]
        entry = {"replicates": len(rows)}
        for name, _ in HEADLINE_METRICS:
            values = [row[name] for row in rows if row[name] is not None]
            if not values:
                entry[name] = {"mean": None, "std": None}
                continue
            std = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
            entry[name] = {"mean": float(np.mean(values)), "std": std}
        result[setting] = entry
    return result
