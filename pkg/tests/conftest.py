import itertools

import pytest

from actclust.oracles import CutOracle, WeightedGraph

ACCEPTANCE_LINES = []


def record_criterion(number, title, ok, detail=""):
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {title}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def path_oracle(n, weight=1):
    return CutOracle(WeightedGraph(n, [(i, i + 1, weight) for i in range(n - 1)]))


def all_subsets(n):
    for r in range(n + 1):
        for c in itertools.combinations(range(n), r):
            yield frozenset(c)


def exhaustive_min(oracle, keep=lambda s: True):
    """Independent reference: plain min over every nonempty proper subset."""
    n = oracle.n
    vals = [oracle(s) for s in all_subsets(n) if 0 < len(s) < n and keep(s)]
    return min(vals)


@pytest.fixture
def path3():
    return path_oracle(3)
