"""Current System: authors pick journals, editors pick referees and decide, rejections climb down a ladder."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from tqdm import tqdm

from population import AgentProfile, EventKind, Manuscript, ManuscriptState, Population, Setting, journal_impact
from review_core import (EditorEstimate, ReviewerRanking, RunState, acceptance_probabilities,
                         acceptance_probability, aggregate_estimates, expertise_scores)
from stochastics import DEFAULT_HALFWIDTH, RngStream

logger = logging.getLogger(__name__)


class ReviewerPoolError(ValueError):
    """Raised when fewer referees are eligible than a manuscript needs."""


class Decision(str, Enum):
    ACCEPT = "accept"
    REJECT = "reject"


@dataclass
class SubmissionRecord:
    """One submission of a manuscript to one journal."""

    journal_id: int
    submitted_month: int
    reviewer_ids: tuple
    task_ids: tuple
    pending: set = field(default_factory=set)
    first_round: list = field(default_factory=list)
    second_round: list = field(default_factory=list)
    reviews_completed_month: Optional[int] = None
    decision: Optional[Decision] = None
    decision_month: Optional[int] = None


@dataclass
class CsState(RunState):
    open_records: dict = field(default_factory=dict)
    submissions_total: int = 0


def journal_score(ms: Manuscript, j: AgentProfile, halfwidth: float = DEFAULT_HALFWIDTH) -> float:
    """Expected impact of submitting ``ms`` to ``j``: p(accept | true values) times impact."""
    return acceptance_probability(j, EditorEstimate.exact(ms), halfwidth) * journal_impact(j, halfwidth)


def journal_scores(ms: Manuscript, population: Population) -> np.ndarray:
    p = acceptance_probabilities(population.journal_params, EditorEstimate.exact(ms), population.halfwidth)
    return p * population.journal_impacts


def choose_target(ms: Manuscript, population: Population, already_rejected=(),
                  max_rejections: int = 5) -> Optional[int]:
    """
    Best-scoring journal the manuscript has not been rejected by.

    Returns:
        Journal id, or None when the author abandons the manuscript
    """
    if ms.rejection_count >= max_rejections:
        return None
    scores = journal_scores(ms, population)
    excluded = sorted(already_rejected)
    if excluded:
        scores[excluded] = -np.inf
    if scores.size == 0 or np.all(np.isneginf(scores)):
        return None
    # argmax keeps the first maximum, so ties go to the lowest journal id
    return int(np.argmax(scores))


def select_reviewers(ms: Manuscript, population: Population, rng: RngStream, count: int = 3,
                     top_pool: int = 20,
                     ranking: ReviewerRanking = ReviewerRanking.DENSITY) -> tuple:
    """
    Rank every author except the manuscript's own by expertise score and
    draw ``count`` referees uniformly from the best ``top_pool``.
    """
    scores = expertise_scores(population.author_params, ms.t, population.halfwidth, ranking)
    eligible = population.author_ids != ms.author_id
    ids = population.author_ids[eligible]
    scores = scores[eligible]
    if ids.size < count:
        raise ReviewerPoolError(
            f"Manuscript {ms.id} needs {count} referees but only {ids.size} authors are eligible"
        )
    order = np.lexsort((ids, -scores))
    shortlist = ids[order][:max(top_pool, count)]
    return tuple(int(i) for i in rng.sample_without_replacement(shortlist.tolist(), count))


def editor_decision(j: AgentProfile, e: EditorEstimate, rng: RngStream,
                    halfwidth: float = DEFAULT_HALFWIDTH) -> Decision:
    p = acceptance_probability(j, e, halfwidth)
    return Decision.ACCEPT if rng.uniform() <= p else Decision.REJECT


def _submit(state: CsState, ms: Manuscript, rng: RngStream) -> None:
    cfg = state.config
    target = choose_target(ms, state.population, ms.rejected_by, cfg.max_rejections)
    if target is None:
        ms.abandon(state.month)
        state.emit(EventKind.ABANDONED, ms.id)
        return
    reviewers = select_reviewers(ms, state.population, rng, cfg.reviewers_per_ms, cfg.top_pool,
                                 cfg.reviewer_ranking)
    tasks = [state.assign_task(ms, rid, target) for rid in reviewers]
    record = SubmissionRecord(
        journal_id=target,
        submitted_month=state.month,
        reviewer_ids=reviewers,
        task_ids=tuple(t.id for t in tasks),
        pending=set(reviewers),
    )
    ms.submissions.append(record)
    ms.move_to(ManuscriptState.UNDER_REVIEW)
    state.open_records[ms.id] = record
    state.submissions_total += 1
    state.emit(EventKind.SUBMITTED, ms.id, target)


def tick_cs(state: CsState, rng: RngStream) -> CsState:
    """
    Advance the Current System by one month.

    Phases run in a fixed order, entities in ascending id order:
    production, submission, review completion, revision, decision,
    resubmission or abandonment.
    """
    cfg = state.config

    # 1. production
    state.produce(rng, Setting.CS)

    # 2. drafts from last month and manuscripts rejected last month go out
    for ms_id in state.due():
        _submit(state, state.manuscripts[ms_id], rng)

    # 3. referees work
    for task in state.complete_reviews(rng):
        record = state.open_records[task.manuscript_id]
        record.pending.discard(task.reviewer_id)
        record.first_round.append(task.first)

    # 4. complete rounds: instant revision and second estimates
    for ms_id in sorted(state.open_records):
        record = state.open_records[ms_id]
        if record.pending or record.reviews_completed_month is not None:
            continue
        record.second_round = state.revise_and_reestimate(state.manuscripts[ms_id], record.task_ids, rng)
        record.reviews_completed_month = state.month

    # 5. decisions for rounds completed in an earlier month
    rejected = []
    for ms_id in sorted(state.open_records):
        record = state.open_records[ms_id]
        if record.reviews_completed_month is None or record.reviews_completed_month >= state.month:
            continue
        ms = state.manuscripts[ms_id]
        journal = state.population.journals[record.journal_id]
        estimate = aggregate_estimates(record.second_round, cfg.reviewers_per_ms)
        record.decision = editor_decision(journal, estimate, rng, cfg.window_halfwidth)
        record.decision_month = state.month
        del state.open_records[ms_id]
        if record.decision is Decision.ACCEPT:
            state.emit(EventKind.ACCEPTED, ms_id, record.journal_id)
            ms.publish(record.journal_id, state.month)
            state.emit(EventKind.PUBLISHED, ms_id, record.journal_id, ms.author_id)
        else:
            state.emit(EventKind.REJECTED, ms_id, record.journal_id)
            ms.rejection_count += 1
            ms.rejected_by.add(record.journal_id)
            ms.move_to(ManuscriptState.REJECTED)
            rejected.append(ms)

    # 6. next rung of the ladder, or give up
    for ms in rejected:
        if choose_target(ms, state.population, ms.rejected_by, cfg.max_rejections) is None:
            ms.abandon(state.month)
            state.emit(EventKind.ABANDONED, ms.id)
        else:
            ms.next_submission_month = state.month + 1
            state.schedule(ms.next_submission_month, ms.id)

    state.month += 1
    return state


def run_cs(population: Population, config, rng: RngStream, months: Optional[int] = None,
           progress: bool = False) -> CsState:
    """Run the Current System from an empty state for ``months`` ticks."""
    months = config.months if months is None else months
    state = CsState(population=population, config=config)
    for _ in tqdm(range(months), desc="🗓️ CS months", disable=not progress, leave=False):
        tick_cs(state, rng)
        logger.debug(f"CS month {state.month - 1}: {len(state.manuscripts)} manuscripts, "
                     f"{len(state.open_records)} under review")
    logger.info(f"CS finished {months} months: {len(state.manuscripts)} manuscripts, "
                f"{state.submissions_total} submissions")
    return state
