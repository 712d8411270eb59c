"""
Tests for archetype specs, population generation, journal impact and the manuscript lifecycle.
"""

import numpy as np
import pytest

from population import (PARAM_NAMES, TRANSITIONS, AgentKind, Archetype, ArchetypeSpec, IllegalTransitionError,
                        Manuscript, ManuscriptState, Population, Setting, SpecError, build_population,
                        default_author_specs, default_journal_specs, draw_manuscript, generate_authors,
                        generate_journals, journal_impact, produce_manuscripts)
from stochastics import RngStream, beta_sample


def uniform_ranges(lo=1.0, hi=1.0):
    return {name: (lo, hi) for name in PARAM_NAMES}


def assert_inside(specs, profiles):
    offset = 0
    for spec in specs:
        for profile in profiles[offset:offset + spec.count]:
            assert profile.archetype is spec.archetype
            for name, value in zip(PARAM_NAMES, profile.parameters()):
                lo, hi = spec.ranges[name]
                assert lo <= value <= hi
        offset += spec.count
    assert offset == len(profiles)


@pytest.mark.unit
class TestArchetypeSpec:
    """Test spec validation and serialization."""

    def test_default_counts(self):
        assert [s.count for s in default_author_specs()] == [50, 150, 300]
        assert [s.count for s in default_journal_specs()] == [5, 15, 30]

    def test_default_ranges(self):
        broad, specialist, normal = default_author_specs()
        assert broad.ranges["alpha_t"] == (1.0, 5.0)
        assert broad.ranges["alpha_q"] == (50.0, 100.0)
        assert specialist.ranges["beta_t"] == (10.0, 100.0)
        assert specialist.ranges["beta_n"] == (1.0, 5.0)
        assert normal.ranges["alpha_n"] == (1.0, 10.0)
        assert normal.ranges["beta_q"] == (5.0, 10.0)

    def test_empty_interval_rejected(self):
        ranges = uniform_ranges()
        ranges["alpha_t"] = (5.0, 1.0)
        with pytest.raises(SpecError, match="empty"):
            ArchetypeSpec(Archetype.NORMAL, 3, ranges)

    def test_nonpositive_bound_rejected(self):
        ranges = uniform_ranges()
        ranges["beta_q"] = (0.0, 1.0)
        with pytest.raises(SpecError, match="beta_q"):
            ArchetypeSpec(Archetype.NORMAL, 3, ranges)

    def test_missing_and_unknown_parameters(self):
        ranges = uniform_ranges()
        del ranges["alpha_n"]
        ranges["gamma"] = (1.0, 2.0)
        with pytest.raises(SpecError) as exc:
            ArchetypeSpec(Archetype.BROAD, 3, ranges)
        assert "alpha_n" in str(exc.value)
        assert "gamma" in str(exc.value)

    def test_negative_count_rejected(self):
        with pytest.raises(SpecError):
            ArchetypeSpec(Archetype.BROAD, -1, uniform_ranges())

    def test_dict_round_trip(self):
        spec = default_author_specs()[1]
        assert ArchetypeSpec.from_dict(spec.to_dict()) == spec

    def test_from_dict_bad_archetype(self):
        with pytest.raises(SpecError):
            ArchetypeSpec.from_dict({"archetype": "generalist", "count": 1, "ranges": {}})


@pytest.mark.unit
class TestGeneration:
    """Test agent generation."""

    def test_dense_ids_and_archetype_order(self):
        authors = generate_authors(default_author_specs(), RngStream(1))
        assert [a.id for a in authors] == list(range(500))
        assert {a.archetype for a in authors[:50]} == {Archetype.BROAD}
        assert {a.archetype for a in authors[50:200]} == {Archetype.SPECIALIST}
        assert {a.archetype for a in authors[200:]} == {Archetype.NORMAL}
        assert all(a.kind is AgentKind.AUTHOR for a in authors)

    def test_parameters_inside_ranges(self):
        specs = default_journal_specs()
        assert_inside(specs, generate_journals(specs, RngStream(2)))

    def test_parameters_inside_ranges_for_many_seeds(self):
        author_specs, journal_specs = default_author_specs(), default_journal_specs()
        for seed in range(100):
            assert_inside(author_specs, generate_authors(author_specs, RngStream(seed, (0,))))
            assert_inside(journal_specs, generate_journals(journal_specs, RngStream(seed, (1,))))

    def test_zero_count_archetype(self):
        specs = [ArchetypeSpec(Archetype.BROAD, 0, uniform_ranges()),
                 ArchetypeSpec(Archetype.NORMAL, 2, uniform_ranges())]
        authors = generate_authors(specs, RngStream(3))
        assert [a.archetype for a in authors] == [Archetype.NORMAL, Archetype.NORMAL]

    def test_same_stream_same_population(self):
        a = build_population(default_author_specs(), default_journal_specs(), RngStream(4, (0,)), RngStream(4, (1,)))
        b = build_population(default_author_specs(), default_journal_specs(), RngStream(4, (0,)), RngStream(4, (1,)))
        assert a.fingerprint() == b.fingerprint()

    def test_different_seed_different_fingerprint(self):
        a = build_population(default_author_specs(), default_journal_specs(), RngStream(4), RngStream(5))
        b = build_population(default_author_specs(), default_journal_specs(), RngStream(6), RngStream(5))
        assert a.fingerprint() != b.fingerprint()


@pytest.mark.unit
class TestJournalImpact:
    """Test the impact formula."""

    def test_uniform_journal(self, make_profile):
        j = make_profile(kind=AgentKind.JOURNAL)
        # 0.5 * 0.5 / 0.2
        assert journal_impact(j) == pytest.approx(1.25)

    def test_high_quality_uniform_topic(self, make_profile):
        j = make_profile(kind=AgentKind.JOURNAL, quality=(50.0, 5.0), novelty=(50.0, 5.0))
        # (50 / 55)^2 / 0.2
        assert journal_impact(j) == pytest.approx(4.1322, abs=1e-4)

    def test_quality_and_novelty_interchangeable(self, make_profile):
        a = make_profile(kind=AgentKind.JOURNAL, topic=(4.0, 9.0), quality=(3.0, 7.0), novelty=(9.0, 2.0))
        b = make_profile(kind=AgentKind.JOURNAL, topic=(4.0, 9.0), quality=(9.0, 2.0), novelty=(3.0, 7.0))
        assert journal_impact(a) == pytest.approx(journal_impact(b), rel=1e-12)

    def test_authors_have_no_impact(self, make_profile):
        with pytest.raises(ValueError):
            journal_impact(make_profile())

    def test_concentrated_topic_lowers_impact(self, make_profile):
        broad = make_profile(kind=AgentKind.JOURNAL, topic=(1.0, 1.0), quality=(2.0, 2.0), novelty=(2.0, 2.0))
        narrow = make_profile(kind=AgentKind.JOURNAL, topic=(80.0, 80.0), quality=(2.0, 2.0), novelty=(2.0, 2.0))
        assert journal_impact(narrow) < journal_impact(broad)

    def test_vectorized_impacts_match(self, small_population):
        expected = [journal_impact(j) for j in small_population.journals]
        np.testing.assert_allclose(small_population.journal_impacts, expected, rtol=1e-12)

    def test_impact_positive(self, small_population):
        assert np.all(small_population.journal_impacts > 0)


@pytest.mark.unit
class TestManuscript:
    """Test drawing manuscripts and the lifecycle graph."""

    def test_draw_records_initial_values(self, make_profile):
        ms = draw_manuscript(make_profile(id=3), month=5, rng=RngStream(1), manuscript_id=9)
        assert ms.author_id == 3
        assert ms.created_month == 5
        assert ms.id == 9
        assert (ms.q0, ms.n0) == (ms.q, ms.n)
        assert ms.state is ManuscriptState.DRAFT
        assert ms.revision_count == 0
        for value in (ms.t, ms.q, ms.n):
            assert 0.0 <= value <= 1.0

    def test_draw_takes_topic_quality_novelty_in_order(self, make_profile):
        author = make_profile(id=1, topic=(2.0, 3.0), quality=(50.0, 5.0), novelty=(4.0, 4.0))
        ms = draw_manuscript(author, 0, RngStream(17))
        rng = RngStream(17)
        expected = tuple(beta_sample(p, rng) for p in (author.topic, author.quality, author.novelty))
        assert (ms.t, ms.q, ms.n) == expected

    def test_journals_do_not_write(self, make_profile):
        with pytest.raises(ValueError):
            draw_manuscript(make_profile(kind=AgentKind.JOURNAL), 0, RngStream(1))

    def test_cs_lifecycle(self):
        ms = Manuscript(0, 0, Setting.CS, 0.5, 0.5, 0.5, 0)
        ms.move_to(ManuscriptState.UNDER_REVIEW)
        ms.move_to(ManuscriptState.REJECTED)
        ms.move_to(ManuscriptState.UNDER_REVIEW)
        ms.publish(journal_id=2, month=7)
        assert ms.is_resolved
        assert (ms.journal_id, ms.outcome_month) == (2, 7)

    def test_cs_cannot_enter_pool(self):
        ms = Manuscript(0, 0, Setting.CS, 0.5, 0.5, 0.5, 0)
        with pytest.raises(IllegalTransitionError):
            ms.move_to(ManuscriptState.IN_FIRST_POOL)

    def test_as_cannot_skip_second_pool(self):
        ms = Manuscript(0, 0, Setting.AS, 0.5, 0.5, 0.5, 0)
        ms.move_to(ManuscriptState.IN_FIRST_POOL)
        with pytest.raises(IllegalTransitionError):
            ms.publish(1, 3)

    @pytest.mark.parametrize("setting", list(Setting))
    def test_terminal_states_have_no_exits(self, setting):
        assert TRANSITIONS[setting][ManuscriptState.PUBLISHED] == set()
        assert TRANSITIONS[setting][ManuscriptState.ABANDONED] == set()

    def test_published_manuscript_cannot_be_abandoned(self):
        ms = Manuscript(0, 0, Setting.CS, 0.5, 0.5, 0.5, 0)
        ms.move_to(ManuscriptState.UNDER_REVIEW)
        ms.publish(0, 3)
        with pytest.raises(IllegalTransitionError):
            ms.abandon(4)


@pytest.mark.unit
class TestProduction:
    """Test monthly manuscript production."""

    def test_productivity_one_everyone_writes(self, uniform_population):
        population = uniform_population(authors=6)
        drafts = produce_manuscripts(population, 0, RngStream(1), 1.0, first_id=10, setting=Setting.AS)
        assert [ms.author_id for ms in drafts] == list(range(6))
        assert [ms.id for ms in drafts] == list(range(10, 16))
        assert all(ms.setting is Setting.AS for ms in drafts)

    def test_productivity_zero_nobody_writes(self, uniform_population):
        assert produce_manuscripts(uniform_population(), 0, RngStream(1), 0.0, 0, Setting.CS) == []

    def test_volume_near_expectation(self, uniform_population):
        population = uniform_population(authors=500)
        rng = RngStream(12)
        total = sum(len(produce_manuscripts(population, m, rng, 0.25, 0, Setting.CS)) for m in range(120))
        assert 14600 <= total <= 15400
