"""
Alternative System: a shared manuscript pool paid for in review debt,
and journals bidding on ripe manuscripts.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from tqdm import tqdm

from population import AgentProfile, EventKind, Manuscript, ManuscriptState, ParamArrays, Population, Setting
from review_core import RunState, acceptance_probabilities, aggregate_estimates, expertise_scores
from stochastics import RngStream

logger = logging.getLogger(__name__)


class DutyStrategy(str, Enum):
    EXPERTISE = "expertise"
    RANDOM = "random"


@dataclass
class ReviewDebt:
    """Reviews an author still has to pick from the first pool."""

    author_id: int
    owed: int = 0
    deferred: int = 0  # incurred this month, assignable from next month
    incurred_month: Optional[int] = None

    @property
    def outstanding(self) -> int:
        return self.owed + self.deferred

    def mature(self, month: int) -> None:
        if self.deferred and self.incurred_month is not None and self.incurred_month < month:
            self.owed += self.deferred
            self.deferred = 0


@dataclass(frozen=True)
class Bid:
    journal_id: int
    manuscript_id: int
    month: int


@dataclass
class AsState(RunState):
    first_pool: set = field(default_factory=set)
    second_pool: set = field(default_factory=set)
    debts: dict = field(default_factory=dict)
    reviewers_of: dict = field(default_factory=dict)  # manuscript id -> task ids
    open_slots: set = field(default_factory=set)  # first-pool manuscripts still short of referees
    slot_reviewers: dict = field(default_factory=dict)  # open manuscript id -> referee ids so far
    pool_submissions: int = 0
    debt_incurred: int = 0
    duties_assigned: int = 0
    bids: list = field(default_factory=list)
    _slot_view: Optional[tuple] = field(default=None, repr=False, compare=False)

    def outstanding_debt(self) -> int:
        return sum(d.outstanding for d in self.debts.values())

    def open_slot(self, ms: Manuscript) -> None:
        self.open_slots.add(ms.id)
        self.slot_reviewers[ms.id] = set()
        self._slot_view = None

    def fill_slot(self, ms_id: int, reviewer_id: int) -> None:
        self.slot_reviewers[ms_id].add(reviewer_id)
        if len(self.slot_reviewers[ms_id]) >= self.config.reviewers_per_ms:
            self.open_slots.discard(ms_id)
            del self.slot_reviewers[ms_id]
            self._slot_view = None

    def slot_view(self) -> tuple:
        """Open manuscript ids in ascending order with their authors and pool entry months."""
        if self._slot_view is None:
            ids = np.array(sorted(self.open_slots), dtype=int)
            authors = np.array([self.manuscripts[i].author_id for i in ids], dtype=int)
            entry = np.array([self.manuscripts[i].pool_entry_month for i in ids], dtype=int)
            self._slot_view = (ids, authors, entry)
        return self._slot_view


def submit_to_pool(author: AgentProfile, ms: Manuscript, state: AsState) -> AsState:
    """Send a month-old draft to the first pool; the author owes one review per referee slot."""
    if ms.author_id != author.id:
        raise ValueError(f"Manuscript {ms.id} belongs to author {ms.author_id}, not {author.id}")
    slots = state.config.reviewers_per_ms
    ms.move_to(ManuscriptState.IN_FIRST_POOL)
    ms.pool_entry_month = state.month
    state.first_pool.add(ms.id)
    state.reviewers_of[ms.id] = []
    state.open_slot(ms)
    debt = state.debts.setdefault(author.id, ReviewDebt(author.id))
    debt.mature(state.month)
    debt.deferred += slots
    debt.incurred_month = state.month
    state.debt_incurred += slots
    state.pool_submissions += 1
    state.emit(EventKind.POOLED, ms.id, agent_id=author.id)
    return state


def _eligible(author: AgentProfile, state: AsState) -> list:
    ids, authors, entry = state.slot_view()
    mask = (authors != author.id) & (entry < state.month)
    return [state.manuscripts[ms_id] for ms_id in ids[mask].tolist()
            if author.id not in state.slot_reviewers[ms_id]]


def assign_review_duties(author: AgentProfile, state: AsState, rng: RngStream) -> AsState:
    """
    Let ``author`` pay off as much matured debt as the first pool allows.

    Manuscripts are eligible when they are not the author's own, entered the
    pool before this month, still lack referees, and are not already assigned
    to this author. The expertise strategy takes the best-scoring ones (ties
    by oldest pool entry, then lowest id); the random strategy samples
    uniformly.
    """
    debt = state.debts.get(author.id)
    if debt is None or debt.owed <= 0:
        return state
    candidates = _eligible(author, state)
    if not candidates:
        return state
    take = min(debt.owed, len(candidates))
    strategy = DutyStrategy(state.config.as_duty_strategy)
    if strategy is DutyStrategy.RANDOM:
        chosen = rng.sample_without_replacement(candidates, take)
    else:
        params = ParamArrays.of([author])
        topics = np.array([ms.t for ms in candidates])
        scores = expertise_scores(params, topics, state.population.halfwidth, state.config.reviewer_ranking)
        entry = np.array([ms.pool_entry_month for ms in candidates])
        ids = np.array([ms.id for ms in candidates])
        order = np.lexsort((ids, entry, -scores))
        chosen = [candidates[i] for i in order[:take]]
    for ms in chosen:
        task = state.assign_task(ms, author.id)
        state.reviewers_of[ms.id].append(task.id)
        state.fill_slot(ms.id, author.id)
    debt.owed -= take
    state.duties_assigned += take
    return state


def process_pool_reviews(state: AsState, rng: RngStream) -> AsState:
    """Complete referee tasks; fully reviewed manuscripts are revised and ripen into the second pool."""
    slots = state.config.reviewers_per_ms
    touched = sorted({task.manuscript_id for task in state.complete_reviews(rng)})
    for ms_id in touched:
        task_ids = state.reviewers_of[ms_id]
        if len(task_ids) < slots or not all(state.tasks[tid].is_complete for tid in task_ids):
            continue
        ms = state.manuscripts[ms_id]
        state.revise_and_reestimate(ms, task_ids, rng)
        ms.move_to(ManuscriptState.IN_SECOND_POOL)
        ms.ripe_month = state.month
        state.first_pool.discard(ms_id)
        state.second_pool.add(ms_id)
        state.emit(EventKind.RIPENED, ms_id)
    return state


def run_bidding_round(state: AsState, rng: RngStream) -> dict:
    """
    Every journal evaluates every manuscript that ripened before this month
    and bids when its uniform draw is at most the acceptance probability.

    Returns:
        Mapping of manuscript id to the list of bids it received
    """
    population = state.population
    slots = state.config.reviewers_per_ms
    bids = {}
    for ms_id in sorted(state.second_pool):
        ms = state.manuscripts[ms_id]
        if ms.ripe_month >= state.month:
            continue
        second = [state.tasks[tid].second for tid in state.reviewers_of[ms_id]]
        estimate = aggregate_estimates(second, slots)
        p = acceptance_probabilities(population.journal_params, estimate, population.halfwidth)
        u = rng.uniforms(len(population.journals))
        ms.bid_rounds += 1
        bids[ms_id] = [Bid(int(j), ms_id, state.month) for j in np.flatnonzero(u <= p)]
        for bid in bids[ms_id]:
            state.emit(EventKind.BID, ms_id, bid.journal_id)
    state.bids = [bid for ms_bids in bids.values() for bid in ms_bids]
    return bids


def resolve_bids(state: AsState, bids: dict) -> AsState:
    """Publish each bid-upon manuscript in its highest-impact bidder; abandon the rest once out of rounds."""
    impacts = state.population.journal_impacts
    for ms_id in sorted(bids):
        ms = state.manuscripts[ms_id]
        offers = bids[ms_id]
        if offers:
            # ties go to the lowest journal id
            winner = max(offers, key=lambda b: (impacts[b.journal_id], -b.journal_id)).journal_id
            ms.publish(winner, state.month)
            state.emit(EventKind.PUBLISHED, ms_id, winner, ms.author_id)
        elif ms.bid_rounds >= state.config.as_bid_rounds:
            ms.abandon(state.month)
            state.emit(EventKind.ABANDONED, ms_id)
        else:
            continue
        state.second_pool.discard(ms_id)
    return state


def tick_as(state: AsState, rng: RngStream) -> AsState:
    """Advance the Alternative System by one month."""
    population = state.population

    state.produce(rng, Setting.AS)

    for ms_id in state.due():
        ms = state.manuscripts[ms_id]
        submit_to_pool(population.authors[ms.author_id], ms, state)

    for author_id in sorted(state.debts):
        state.debts[author_id].mature(state.month)
        assign_review_duties(population.authors[author_id], state, rng)

    process_pool_reviews(state, rng)

    bids = run_bidding_round(state, rng)
    resolve_bids(state, bids)

    state.month += 1
    return state


def first_pool_ages(state: AsState) -> list:
    """Months each manuscript still in the first pool has been waiting."""
    return [state.month - state.manuscripts[ms_id].pool_entry_month for ms_id in sorted(state.first_pool)]


def run_as(population: Population, config, rng: RngStream, months: Optional[int] = None,
           progress: bool = False) -> AsState:
    months = config.months if months is None else months
    state = AsState(population=population, config=config)
    for _ in tqdm(range(months), desc="🏊 AS months", disable=not progress, leave=False):
        tick_as(state, rng)
        logger.debug(f"AS month {state.month - 1}: first pool {len(state.first_pool)}, "
                     f"second pool {len(state.second_pool)}, debt {state.outstanding_debt()}")
    logger.info(f"AS finished {months} months: {len(state.manuscripts)} manuscripts, "
                f"{state.duties_assigned} duties assigned, {state.outstanding_debt()} reviews still owed")
    return state
