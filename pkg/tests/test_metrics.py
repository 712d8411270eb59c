"""
Tests for run summaries, comparisons and aggregates.
"""

import dataclasses
import json

import pytest

from as_engine import run_as
from cs_engine import run_cs
from metrics import (ComparisonReport, PopulationMismatchError, RunSummary, aggregate_summaries, compare_runs,
                     impact_quartiles, impact_from_events, manuscript_frame, manuscript_merit, nearest_rank,
                     summarize_run)
from population import Manuscript, ManuscriptState, Setting
from stochastics import RngStream


@pytest.fixture
def runs(small_population, small_config):
    cfg = dataclasses.replace(small_config, months=36)
    cs = run_cs(small_population, cfg, RngStream(21))
    as_ = run_as(small_population, cfg, RngStream(22))
    return cs, as_


@pytest.fixture
def summaries(runs):
    cs, as_ = runs
    return summarize_run(cs, Setting.CS), summarize_run(as_, Setting.AS)


@pytest.mark.unit
class TestMerit:
    """Test manuscript merit."""

    def test_product(self):
        ms = Manuscript(0, 0, Setting.CS, 0.5, 0.5, 0.5, 0)
        assert manuscript_merit(ms) == 0.25

    def test_identity_factor(self):
        ms = Manuscript(0, 0, Setting.CS, 0.5, 1.0, 0.3, 0)
        assert manuscript_merit(ms) == pytest.approx(0.3)


@pytest.mark.unit
class TestQuartiles:
    """Test nearest-rank percentiles and impact labels."""

    def test_nearest_rank(self):
        values = [15, 20, 35, 40, 50]
        assert nearest_rank(values, 25) == 20
        assert nearest_rank(values, 50) == 35
        assert nearest_rank(values, 75) == 40
        assert nearest_rank(values, 100) == 50

    def test_empty(self):
        assert nearest_rank([], 50) is None

    def test_fifty_journals(self):
        labels = impact_quartiles([float(i) for i in range(50)])
        assert labels.count("top") in (12, 13)
        assert labels.count("bottom") in (12, 13)
        assert labels[49] == "top" and labels[0] == "bottom"


@pytest.mark.integration
class TestSummaries:
    """Test RunSummary contents on small runs."""

    def test_ledger_closure(self, summaries):
        for s in summaries:
            t = s.totals
            assert t.published + t.abandoned + t.in_flight == t.manuscripts
            assert 0.0 <= s.publication_fraction <= 1.0
            assert 0.0 <= s.publication_fraction_all <= s.publication_fraction

    def test_cs_review_identity(self, summaries):
        cs, _ = summaries
        assert cs.reviews.mean_per_manuscript == pytest.approx(3 * cs.reviews.mean_submissions_per_manuscript)
        assert cs.reviews.mean_per_published == pytest.approx(3 * cs.reviews.mean_submissions_per_published)

    def test_as_exactly_three_reviews(self, summaries):
        _, as_ = summaries
        assert as_.reviews.mean_per_reviewed == 3.0
        assert as_.mean_revisions_published == 1.0
        assert as_.pools is not None
        assert as_.pools.debt_incurred - as_.pools.duties_assigned == as_.pools.outstanding_debt

    def test_months_quartiles_ordered(self, summaries):
        for s in summaries:
            m = s.months_to_publication
            assert m.q1 <= m.median <= m.q3
            assert m.q1 >= 3

    def test_author_impact_double_entry(self, runs, summaries, small_population):
        for state, summary in zip(runs, summaries):
            recomputed = impact_from_events(state.events, small_population.journal_impacts)
            for a in summary.per_author:
                assert a.total_impact == pytest.approx(recomputed.get(a.id, 0.0))
            assert sum(a.publications for a in summary.per_author) == summary.totals.published
            assert sum(j.publications for j in summary.per_journal) == summary.totals.published

    def test_merit_published_above_abandoned(self, summaries):
        for s in summaries:
            if s.merit.mean_abandoned is not None:
                assert s.merit.mean_published > s.merit.mean_abandoned

    def test_json_round_trip(self, summaries):
        for s in summaries:
            restored = RunSummary.from_dict(json.loads(json.dumps(s.to_dict())))
            assert restored == s

    def test_no_publications(self, uniform_population, small_config):
        cfg = dataclasses.replace(small_config, months=2)
        state = run_cs(uniform_population(authors=6, journals=2), cfg, RngStream(1))
        summary = summarize_run(state, Setting.CS)
        assert summary.totals.published == 0
        assert summary.publication_fraction == 0.0
        assert summary.months_to_publication.mean is None
        assert summary.months_to_publication.median is None


@pytest.mark.unit
def test_months_to_publication_single(uniform_population, small_config):
    from cs_engine import CsState

    state = CsState(population=uniform_population(), config=small_config)
    ms = Manuscript(0, 0, Setting.CS, 0.5, 0.5, 0.5, created_month=2)
    ms.move_to(ManuscriptState.UNDER_REVIEW)
    ms.publish(1, 10)
    state.manuscripts[0] = ms
    summary = summarize_run(state, Setting.CS)
    assert summary.months_to_publication.mean == 8.0
    assert summary.per_author[0].publications == 1
    assert summary.per_author[0].total_impact == pytest.approx(1.25)
    assert summary.per_author[0].mean_impact == pytest.approx(1.25)


@pytest.mark.integration
class TestComparison:
    """Test paired CS and AS comparisons."""

    def test_fractions_in_unit_interval(self, summaries):
        report = compare_runs(*summaries)
        for value in (report.authors_more_publications_as, report.authors_higher_total_impact_as,
                      report.authors_higher_mean_impact_as, report.journals_more_publications_as):
            assert 0.0 <= value <= 1.0
        assert sum(d.journals for d in report.quartile_deltas.values()) == 5

    def test_identical_summaries(self, summaries):
        cs, _ = summaries
        report = compare_runs(cs, cs)
        assert report.authors_more_publications_as == 0.0
        assert report.journals_more_publications_as == 0.0

    def test_one_author_publishes_more(self, summaries):
        cs, _ = summaries
        more = dataclasses.replace(cs, per_author=[dataclasses.replace(a) for a in cs.per_author])
        more.per_author[0].publications += 2
        report = compare_runs(cs, more)
        assert report.authors_more_publications_as == pytest.approx(1 / len(cs.per_author))

    def test_different_populations(self, summaries):
        cs, as_ = summaries
        with pytest.raises(PopulationMismatchError):
            compare_runs(cs, dataclasses.replace(as_, population_fingerprint="0" * 64))

    def test_round_trip(self, summaries):
        report = compare_runs(*summaries)
        assert ComparisonReport.from_dict(json.loads(json.dumps(report.to_dict()))) == report


@pytest.mark.integration
def test_aggregate_mean_and_std(summaries):
    cs, as_ = summaries
    result = aggregate_summaries([cs, cs, as_])
    assert result["cs"]["replicates"] == 2
    assert result["cs"]["published"] == {"mean": float(cs.totals.published), "std": 0.0}
    assert result["as"]["replicates"] == 1
    assert result["as"]["manuscripts"]["std"] == 0.0


@pytest.mark.integration
def test_manuscript_frame_columns(runs):
    cs, _ = runs
    frame = manuscript_frame(cs)
    assert list(frame.columns) == ["id", "author_id", "setting", "t", "q0", "n0", "q_final", "n_final", "k",
                                   "created_month", "outcome", "outcome_month", "journal_id", "n_reviews",
                                   "n_rejections"]
    published = frame[frame["outcome"] == "published"]
    assert published["journal_id"].notna().all()
    assert published["outcome_month"].notna().all()
    abandoned = frame[frame["outcome"] == "abandoned"]
    assert (abandoned["n_rejections"] == 5).all()
