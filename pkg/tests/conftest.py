"""
Pytest configuration and common fixtures for the peer-review simulator tests.
"""

import dataclasses
import sys
from pathlib import Path

import pytest

# Add the python directory to the path so we can import our modules
sys.path.insert(0, str(Path(__file__).parent.parent / 'python'))

from config import SimConfig  # noqa: E402
from population import (AgentKind, AgentProfile, Archetype, Population, build_population,  # noqa: E402
                        default_author_specs, default_journal_specs)
from stochastics import BetaParams, RngStream  # noqa: E402


def scaled_specs(specs, factor):
    """Default archetype specs with every count divided by ``factor``."""
    return [dataclasses.replace(s, count=max(1, s.count // factor)) for s in specs]


@pytest.fixture
def small_config():
    """A fast configuration: 50 authors, 5 journals, two simulated years."""
    return SimConfig(
        master_seed=7,
        months=24,
        author_specs=scaled_specs(default_author_specs(), 10),
        journal_specs=scaled_specs(default_journal_specs(), 10),
    )


@pytest.fixture
def small_population(small_config):
    return build_population(small_config.author_specs, small_config.journal_specs,
                            RngStream(7, (0, 0)), RngStream(7, (0, 1)))


@pytest.fixture
def make_profile():
    """Factory for hand-built authors and journals; shapes default to uniform."""
    def _make(id=0, kind=AgentKind.AUTHOR, topic=(1.0, 1.0), quality=(1.0, 1.0), novelty=(1.0, 1.0),
              archetype=Archetype.NORMAL):
        return AgentProfile(id=id, kind=kind, archetype=archetype, topic=BetaParams(*topic),
                            quality=BetaParams(*quality), novelty=BetaParams(*novelty))
    return _make


@pytest.fixture
def uniform_population(make_profile):
    """Four uniform authors and two uniform journals."""
    def _build(authors=4, journals=2):
        return Population(
            [make_profile(i) for i in range(authors)],
            [make_profile(i, AgentKind.JOURNAL) for i in range(journals)],
        )
    return _build


def pytest_configure(config):
    """Configure pytest with custom markers."""
    config.addinivalue_line(
        "markers", "slow: marks tests as slow (deselect with '-m \"not slow\"')"
    )
    config.addinivalue_line(
        "markers", "integration: marks tests as integration tests"
    )
    config.addinivalue_line(
        "markers", "unit: marks tests as unit tests"
    )
