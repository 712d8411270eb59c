"""Referee estimates, editor aggregation, revision and acceptance shared by both settings."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from scipy import special

from population import (AgentKind, AgentProfile, EventKind, LifecycleEvent, Manuscript, ParamArrays,
                        Setting, produce_manuscripts)
from stochastics import DEFAULT_HALFWIDTH, RngStream, beta_cdf, window_density, window_mass

logger = logging.getLogger(__name__)

DEFAULT_IMPROVEMENT_CAP = 0.1


class ReviewRound(str, Enum):
    FIRST = "first"
    POST_REVISION = "post_revision"


class ReviewerRanking(str, Enum):
    INVERSE_DENSITY = "inverse_density"  # score 1/z: broad referees first
    DENSITY = "density"  # score z: familiar referees first


@dataclass(frozen=True)
class ReviewEstimate:
    reviewer_id: int
    t_hat: float
    q_hat: float
    n_hat: float
    round: ReviewRound


@dataclass(frozen=True)
class EditorEstimate:
    t_e: float
    q_e: float
    n_e: float

    @classmethod
    def exact(cls, ms: Manuscript) -> "EditorEstimate":
        """The true values, as an author sees their own manuscript."""
        return cls(ms.t, ms.q, ms.n)


@dataclass
class ReviewTask:
    """One referee assignment. Completion records the first-round estimate."""

    id: int
    manuscript_id: int
    reviewer_id: int
    assigned_month: int
    journal_id: Optional[int] = None
    first: Optional[ReviewEstimate] = None
    second: Optional[ReviewEstimate] = None
    completed_month: Optional[int] = None
    delta: Optional[float] = None  # referee noise, fixed by the true topic at first completion

    @property
    def is_complete(self) -> bool:
        return self.first is not None


def reviewer_error_delta(reviewer: AgentProfile, t: float,
                         halfwidth: float = DEFAULT_HALFWIDTH) -> float:
    """Half-width of the referee's noise: (1 - z) / 2 around the true topic."""
    if reviewer.kind is not AgentKind.AUTHOR:
        raise ValueError(f"Referees are authors, got {reviewer.kind.value} {reviewer.id}")
    return (1.0 - window_density(reviewer.topic, t, halfwidth)) / 2.0


def reviewer_deltas(params: ParamArrays, topics, halfwidth: float = DEFAULT_HALFWIDTH) -> np.ndarray:
    """reviewer_error_delta for many (referee, topic) pairs; ``params`` rows pair with ``topics``."""
    return (1.0 - window_mass(params.alpha_t, params.beta_t, topics, halfwidth)) / 2.0


def _noisy(value: float, delta: float, rng: RngStream) -> float:
    return rng.uniform(max(value - delta, 0.0), min(value + delta, 1.0))


def review_estimate(reviewer: AgentProfile, ms: Manuscript, rng: RngStream,
                    round: ReviewRound = ReviewRound.FIRST,
                    halfwidth: float = DEFAULT_HALFWIDTH, delta: Optional[float] = None) -> ReviewEstimate:
    """
    Draw a referee's estimate of the manuscript's current (t, q, n).

    One delta, computed from the true topic, is applied to all three
    components; each component is uniform on the clipped delta-interval.
    A precomputed ``delta`` skips the window integral.
    """
    if reviewer.id == ms.author_id:
        raise ValueError(f"Author {reviewer.id} cannot review their own manuscript {ms.id}")
    if delta is None:
        delta = reviewer_error_delta(reviewer, ms.t, halfwidth)
    return ReviewEstimate(
        reviewer_id=reviewer.id,
        t_hat=_noisy(ms.t, delta, rng),
        q_hat=_noisy(ms.q, delta, rng),
        n_hat=_noisy(ms.n, delta, rng),
        round=round,
    )


def aggregate_estimates(reviews, expected: int = 3) -> EditorEstimate:
    """Component-wise mean of one round of referee estimates."""
    reviews = list(reviews)
    if len(reviews) != expected:
        raise ValueError(f"Editor needs exactly {expected} estimates, got {len(reviews)}")
    rounds = {r.round for r in reviews}
    if len(rounds) > 1:
        raise ValueError(f"Estimates mix review rounds: {sorted(r.value for r in rounds)}")
    count = float(len(reviews))
    return EditorEstimate(
        t_e=sum(r.t_hat for r in reviews) / count,
        q_e=sum(r.q_hat for r in reviews) / count,
        n_e=sum(r.n_hat for r in reviews) / count,
    )


def improve(a: float, cap: float, k: int, u: float) -> float:
    """h(a, cap, k) = a + (cap / k)(1 - a) u."""
    return a + (cap / k) * (1.0 - a) * u


def revise(ms: Manuscript, rng: RngStream,
           improvement_cap: float = DEFAULT_IMPROVEMENT_CAP) -> Manuscript:
    """
    Apply one revision to the manuscript in place.

    Args:
        ms: Manuscript still in play (not published or abandoned)
        rng: Stream supplying the two improvement draws (quality first)
        improvement_cap: Maximum relative gain of the first revision

    Returns:
        The same manuscript, with k incremented and q, n improved
    """
    if ms.is_resolved:
        raise ValueError(f"Manuscript {ms.id} is {ms.state.value} and cannot be revised")
    ms.revision_count += 1
    k = ms.revision_count
    u_q = rng.uniform()
    u_n = rng.uniform()
    ms.q = min(1.0, improve(ms.q, improvement_cap, k, u_q))
    ms.n = min(1.0, improve(ms.n, improvement_cap, k, u_n))
    ms.revisions.append((k, ms.q, ms.n))
    return ms


def acceptance_probability(j: AgentProfile, e: EditorEstimate,
                           halfwidth: float = DEFAULT_HALFWIDTH) -> float:
    """Topic fit times the quality and novelty CDFs of the journal."""
    if j.kind is not AgentKind.JOURNAL:
        raise ValueError(f"Acceptance is decided by journals, got {j.kind.value} {j.id}")
    return (window_density(j.topic, e.t_e, halfwidth)
            * beta_cdf(j.quality, e.q_e)
            * beta_cdf(j.novelty, e.n_e))


def acceptance_probabilities(params: ParamArrays, e: EditorEstimate,
                             halfwidth: float = DEFAULT_HALFWIDTH) -> np.ndarray:
    """acceptance_probability for every journal in ``params`` at once."""
    return (window_mass(params.alpha_t, params.beta_t, e.t_e, halfwidth)
            * special.betainc(params.alpha_q, params.beta_q, e.q_e)
            * special.betainc(params.alpha_n, params.beta_n, e.n_e))


def expertise_scores(params: ParamArrays, t, halfwidth: float = DEFAULT_HALFWIDTH,
                     ranking: ReviewerRanking = ReviewerRanking.DENSITY) -> np.ndarray:
    """
    Referee suitability, higher is preferred.

    ``params`` may describe many referees for one topic, or one referee
    (length-1 arrays) for many topics.
    """
    z = window_mass(params.alpha_t, params.beta_t, t, halfwidth)
    if ReviewerRanking(ranking) is ReviewerRanking.DENSITY:
        return np.asarray(z, dtype=float)
    return 1.0 / z


@dataclass
class RunState:
    """State common to both settings: clock, manuscripts, referee tasks and the event log."""

    population: object
    config: object
    month: int = 0
    manuscripts: dict = field(default_factory=dict)
    tasks: dict = field(default_factory=dict)
    pending_tasks: list = field(default_factory=list)
    events: list = field(default_factory=list)
    scheduled: dict = field(default_factory=dict)

    def emit(self, kind: EventKind, manuscript_id: int, journal_id=None, agent_id=None) -> None:
        self.events.append(LifecycleEvent(self.month, manuscript_id, kind, journal_id, agent_id))

    def schedule(self, month: int, manuscript_id: int) -> None:
        self.scheduled.setdefault(month, []).append(manuscript_id)

    def due(self) -> list:
        return sorted(self.scheduled.pop(self.month, []))

    def produce(self, rng: RngStream, setting: Setting) -> list:
        """Phase 1 of every tick: new drafts, due for submission next month."""
        drafts = produce_manuscripts(self.population, self.month, rng, self.config.productivity,
                                     len(self.manuscripts), setting)
        for ms in drafts:
            self.manuscripts[ms.id] = ms
            self.schedule(self.month + 1, ms.id)
            self.emit(EventKind.CREATED, ms.id, agent_id=ms.author_id)
        return drafts

    def assign_task(self, ms: Manuscript, reviewer_id: int, journal_id=None) -> ReviewTask:
        task = ReviewTask(id=len(self.tasks), manuscript_id=ms.id, reviewer_id=reviewer_id,
                          assigned_month=self.month, journal_id=journal_id)
        self.tasks[task.id] = task
        self.pending_tasks.append(task.id)
        self.emit(EventKind.REVIEW_ASSIGNED, ms.id, journal_id, reviewer_id)
        return task

    def complete_reviews(self, rng: RngStream) -> list:
        """
        Each pending task old enough to be worked on completes with
        probability ``completion_prob``, recording a first-round estimate.

        Returns:
            Completed tasks in ascending id order
        """
        lag = self.config.review_start_lag
        workable = [tid for tid in self.pending_tasks if self.tasks[tid].assigned_month + lag <= self.month]
        if not workable:
            return []
        draws = rng.uniforms(len(workable))
        done = [tid for tid, u in zip(workable, draws) if u < self.config.completion_prob]
        tasks = [self.tasks[tid] for tid in done]
        deltas = self._deltas(tasks)
        completed = []
        for task, delta in zip(tasks, deltas):
            tid = task.id
            ms = self.manuscripts[task.manuscript_id]
            reviewer = self.population.authors[task.reviewer_id]
            task.delta = float(delta)
            task.first = review_estimate(reviewer, ms, rng, ReviewRound.FIRST, self.config.window_halfwidth,
                                         task.delta)
            task.completed_month = self.month
            ms.review_log.append(tid)
            self.emit(EventKind.REVIEW_COMPLETED, ms.id, task.journal_id, task.reviewer_id)
            completed.append(task)
        finished = set(done)
        self.pending_tasks = [tid for tid in self.pending_tasks if tid not in finished]
        return completed

    def _deltas(self, tasks) -> np.ndarray:
        if not tasks:
            return np.empty(0)
        rows = np.array([task.reviewer_id for task in tasks])
        params = ParamArrays(*(column[rows] for column in self.population.author_params))
        topics = np.array([self.manuscripts[task.manuscript_id].t for task in tasks])
        return reviewer_deltas(params, topics, self.config.window_halfwidth)

    def revise_and_reestimate(self, ms: Manuscript, task_ids, rng: RngStream) -> list:
        """Instant revision followed by the same referees' post-revision estimates."""
        revise(ms, rng, self.config.improvement_cap)
        self.emit(EventKind.REVISED, ms.id)
        second = []
        for tid in task_ids:
            task = self.tasks[tid]
            reviewer = self.population.authors[task.reviewer_id]
            task.second = review_estimate(reviewer, ms, rng, ReviewRound.POST_REVISION,
                                          self.config.window_halfwidth, task.delta)
            second.append(task.second)
        return second
