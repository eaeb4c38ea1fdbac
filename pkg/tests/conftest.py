"""Shared fixtures: pipeline reports are computed once per session."""

from __future__ import annotations

from functools import lru_cache

import pytest

from bitriple.constructions import BUILTIN_NAMES, builtin, run_pipeline
from bitriple.linsys import H0Oracle


@lru_cache(maxsize=None)
def report_for(name: str):
    spec = builtin(name)
    return run_pipeline(spec, spec.oracle())


@pytest.fixture(scope="session")
def oracle() -> H0Oracle:
    return H0Oracle()


@pytest.fixture(scope="session")
def reports() -> dict:
    return {name: report_for(name) for name in BUILTIN_NAMES}
