"""Shared fixtures and the acceptance summary printed at the end of a run."""

from __future__ import annotations

import copy
import itertools
import math

import pytest

from dpdp.scenario import from_dict, load_scenario

# (criterion, passed, detail), filled by test_acceptance.py
ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    merged: dict[str, tuple[bool, list[str]]] = {}
    for name, ok, detail in ACCEPTANCE:
        prev_ok, details = merged.get(name, (True, []))
        merged[name] = (prev_ok and ok, details + ([detail] if detail else []))
    terminalreporter.section("acceptance criteria")
    for name in sorted(merged, key=lambda n: int(n.split()[0][1:])):
        ok, details = merged[name]
        shown = "; ".join(d for d in details if d)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({shown})" if shown else ""))


# -- brute force helpers, independent of dpdp.ga --------------------------------

def feasible_orderings(requests):
    """Every ordering of the pickup/delivery stops of ``requests`` with pickups first."""
    stops = [(k, r) for r in requests for k in ("pickup", "delivery")]
    for perm in itertools.permutations(stops):
        seen = set()
        ok = True
        for kind, r in perm:
            if kind == "pickup":
                seen.add(r)
            elif r not in seen:
                ok = False
                break
        if ok:
            yield perm


def polyline_length(points):
    return sum(math.dist(a, b) for a, b in zip(points, points[1:]))


# -- scenarios -----------------------------------------------------------------

@pytest.fixture(scope="session")
def thesis_doc():
    return load_scenario("thesis-t0")


@pytest.fixture(scope="session")
def thesis_run(thesis_doc):
    from dpdp.simulator import run
    return run(copy.deepcopy(thesis_doc))


def small_world(requests=None, agents=None, **extra):
    """A compact scenario dict for unit tests; validated on request."""
    raw = {
        "name": "unit",
        "world": {"bounds": [0, 0, 1000, 1000], "obstacles": [], "chargers": [{"id": "C1", "position": [0, 0]}]},
        "articles": ["Art1", "Art2"],
        "depots": [{"id": "S1", "position": [100, 100], "stock": {"Art1": 1000, "Art2": 1000}},
                   {"id": "S2", "position": [600, 100], "stock": {"Art1": 1000}}],
        "clients": [{"id": "T1", "position": [100, 600]}, {"id": "T2", "position": [600, 600]},
                    {"id": "T3", "position": [350, 900]}],
        "agents": agents if agents is not None else [{"id": "A1", "start": [50, 50], "speed": 25}],
        "requests": requests if requests is not None else [
            {"id": "R1", "depot": "S1", "article": "Art1", "client": "T1", "quantity": 10, "agent": "A1"},
            {"id": "R2", "depot": "S2", "article": "Art1", "client": "T2", "quantity": 20, "agent": "A1"},
        ],
        "events": [],
        "ga": {"seed": 0},
        "sim": {"max_ticks": 2000},
    }
    raw.update(extra)
    return raw


def small_doc(**kw):
    return from_dict(small_world(**kw))
