from __future__ import annotations

import functools

import pytest
from hypothesis import HealthCheck, settings

from atg.codes import fixture, logical_basis
from atg.graph import build_atg
from atg.stabilizers import bell_stabilizers

settings.register_profile("atg", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("atg")


@functools.lru_cache(maxsize=None)
def graph(name: str, T: int):
    return build_atg(fixture(name), T)


@functools.lru_cache(maxsize=None)
def bell_sets(name: str, T: int):
    g = graph(name, T)
    return bell_stabilizers(g, logical_basis(g.code))


@pytest.fixture
def code422():
    return fixture("422")


@pytest.fixture
def steane():
    return fixture("steane")


# acceptance criteria append (number, passed, detail) here; reported after the run
ACCEPTANCE: list[tuple[int, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
