"""Shared, build-once realizations for the test session."""

from functools import lru_cache

import pytest

from loomfold.catalog import builtin_entries, entry_by_name
from loomfold.polys import family_p
from loomfold.presentation import suite_window
from loomfold.realize import Realization


@lru_cache(maxsize=None)
def cached_family(name: str):
    e = entry_by_name(name)
    return family_p(e.gcm, e.mu)


@lru_cache(maxsize=None)
def cached_realization(name: str):
    """Realization sized for the acceptance bounds (modes 4, plus the
    degree-6 commutator grid)."""
    e = entry_by_name(name)
    fam = cached_family(name)
    m1, m2 = suite_window(e.gcm, e.mu, fam, 4)
    m1 = max(m1, 2 * 6 + 2)
    return Realization(e.gcm, e.mu, m1_window=m1, m2_window=m2)


@pytest.fixture(scope="session")
def realization_for():
    return cached_realization


@pytest.fixture(scope="session")
def family_for():
    return cached_family


@pytest.fixture(scope="session")
def catalog_names():
    return [e.name for e in builtin_entries()]
