"""Shared fixtures plus a per-criterion banner for the acceptance suite."""

from __future__ import annotations

import re
from collections import defaultdict

import pytest

from cisim import CostModel, PolicyConfig, WorldModel
from cisim.simulate import run_trials


@pytest.fixture
def binary_world():
    """Two sensors, two classes at 0 and 2, shared sd 1.5, uniform prior."""
    return WorldModel.indexed(2, 2, 2.0, 1.5)


@pytest.fixture
def uniform_costs():
    return CostModel.uniform(2, 1.0, 4.0)


class McCache:
    """Memoized Monte Carlo runs, shared so no operating point runs twice."""

    def __init__(self):
        self._runs = {}

    def report(
        self,
        delta: float,
        lam: float,
        uplink: float,
        link: float = 1.0,
        trials: int = 10_000,
        seed: int = 7,
        rule: str = "assume-success",
        sensors: int = 2,
        sd: float = 1.5,
    ):
        key = (delta, lam, uplink, link, trials, seed, rule, sensors, sd)
        if key not in self._runs:
            world = WorldModel.indexed(2, sensors, delta, sd)
            costs = CostModel.uniform(sensors, link, uplink)
            config = PolicyConfig(confidence=lam, request_rule=rule)
            self._runs[key] = run_trials(world, costs, config, trials, seed)
        return self._runs[key]


@pytest.fixture(scope="session")
def mc_cache():
    return McCache()


_CRITERIA = {
    1: "analytic direct-rate anchors",
    2: "analytic request anchors",
    3: "simulated reference rows",
    4: "estimator agreement",
    5: "assignment solver exactness",
    6: "devolution limits",
    7: "accuracy sandwich",
    8: "byte-level determinism",
}

_NODE = re.compile(r"test_acceptance\.py::TestC(\d+)")


def pytest_terminal_summary(terminalreporter):
    tally: dict[int, list[int]] = defaultdict(lambda: [0, 0])
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            m = _NODE.search(rep.nodeid)
            if m is None:
                continue
            tally[int(m.group(1))][0 if outcome == "passed" else 1] += 1
    if not tally:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(tally):
        passed, failed = tally[n]
        verdict = "PASS" if failed == 0 else "FAIL"
        label = _CRITERIA.get(n, "criterion")
        terminalreporter.write_line(
            f"C{n} {label}: {verdict} ({passed}/{passed + failed} checks)"
        )
