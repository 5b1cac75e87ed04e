"""Set-function oracles: graph cuts, Gaussian mutual information, and views.

Every oracle maps a subset of ``{0, ..., n-1}`` to a real cost and counts
how many times it was evaluated.  Derived oracles (contractions, split
views) share the counter of the oracle they wrap, so the count reported
by any of them is the number of base evaluations actually performed.
"""

from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import InputError

ElementSet = frozenset


def lex_key(s: Iterable[int]) -> tuple:
    """Sort key giving the lexicographic order on sets used for tie-breaks."""
    return tuple(sorted(s))


def _as_index_array(s: Iterable[int], n: int) -> np.ndarray:
    idx = np.fromiter(s, dtype=np.intp)
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        bad = idx[(idx < 0) | (idx >= n)][0]
        raise InputError(f"element id {int(bad)} out of range for ground set of size {n}")
    return idx


@dataclass(frozen=True)
class GroundSet:
    size: int
    labels: Optional[tuple] = None

    def __post_init__(self):
        if self.size < 1:
            raise InputError("ground set must contain at least one element")
        if self.labels is not None and len(self.labels) != self.size:
            raise InputError("one label per element is required")

    @property
    def elements(self) -> frozenset:
        return frozenset(range(self.size))


class WeightedGraph:
    """Undirected graph with nonnegative edge weights.

    Parallel edges are merged by summing their weights; ``(u, v)`` and
    ``(v, u)`` denote the same edge.
    """

    def __init__(self, n: int, edges: Iterable[Sequence] = ()):
        if n < 1:
            raise InputError("graph needs at least one vertex")
        merged: dict[tuple[int, int], float] = {}
        for e in edges:
            u, v, w = int(e[0]), int(e[1]), e[2]
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u}, {v}) out of range for {n} vertices")
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            if not w >= 0 or math.isinf(w):
                raise InputError(f"edge ({u}, {v}) has invalid weight {w!r}")
            key = (u, v) if u < v else (v, u)
            merged[key] = merged.get(key, 0) + w
        self.n = n
        self._edges = dict(sorted(merged.items()))
        pairs = list(self._edges)
        self.u = np.array([p[0] for p in pairs], dtype=np.intp)
        self.v = np.array([p[1] for p in pairs], dtype=np.intp)
        self.w = np.array(list(self._edges.values()), dtype=np.float64)

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return [(u, v, w) for (u, v), w in self._edges.items()]

    def __len__(self):
        return len(self._edges)

    def degree(self, x: int) -> int:
        return int(np.count_nonzero(self.u == x) + np.count_nonzero(self.v == x))

    def induced(self, vertices: Sequence[int], scale: float = 1.0) -> "WeightedGraph":
        """Subgraph on ``vertices``, relabelled to ``0..len(vertices)-1`` in the given order."""
        pos = {x: i for i, x in enumerate(vertices)}
        sub = [
            (pos[a], pos[b], w * scale)
            for (a, b), w in self._edges.items()
            if a in pos and b in pos
        ]
        return WeightedGraph(len(vertices), sub)

    def components(self) -> list[frozenset]:
        """Connected components over edges of strictly positive weight."""
        keep = self.w > 0
        adj = coo_matrix(
            (np.ones(int(keep.sum())), (self.u[keep], self.v[keep])), shape=(self.n, self.n)
        )
        count, labels = connected_components(adj, directed=False)
        comps = [[] for _ in range(count)]
        for x, c in enumerate(labels):
            comps[c].append(x)
        return sorted((frozenset(c) for c in comps), key=lex_key)


def cut_value(graph: WeightedGraph, s: Iterable[int]) -> float:
    """Total weight of edges with exactly one endpoint in ``s``."""
    idx = _as_index_array(s, graph.n)
    mask = np.zeros(graph.n, dtype=bool)
    mask[idx] = True
    return float(graph.w[mask[graph.u] ^ mask[graph.v]].sum())


class GaussianModel:
    def __init__(self, covariance, tol: float = 1e-9):
        cov = np.array(covariance, dtype=np.float64)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] < 1:
            raise InputError("covariance must be a nonempty square matrix")
        if not np.allclose(cov, cov.T, atol=1e-12):
            raise InputError("covariance must be symmetric")
        smallest = float(np.linalg.eigvalsh(cov)[0])
        if smallest <= tol:
            raise InputError(f"covariance is not positive definite (min eigenvalue {smallest:.3g})")
        self.covariance = cov
        self.n = cov.shape[0]
        self.logdet_full = float(np.linalg.slogdet(cov)[1])

    def logdet(self, idx: np.ndarray) -> float:
        if idx.size == 0:
            return 0.0
        return float(np.linalg.slogdet(self.covariance[np.ix_(idx, idx)])[1])


def gaussian_mi_value(model: GaussianModel, s: Iterable[int]) -> float:
    """Mutual information between the variables in ``s`` and the rest, in nats."""
    idx = np.unique(_as_index_array(s, model.n))
    if idx.size == 0 or idx.size == model.n:
        return 0.0
    rest = np.setdiff1d(np.arange(model.n), idx)
    return 0.5 * (model.logdet(idx) + model.logdet(rest) - model.logdet_full)


class CallCounter:
    """Thread-safe evaluation counter."""

    def __init__(self):
        self._lock = threading.Lock()
        self._count = 0

    def tick(self, by: int = 1):
        with self._lock:
            self._count += by

    @property
    def count(self) -> int:
        return self._count


class SubmodularOracle:
    """Value oracle for a normalized symmetric submodular function.

    Subclasses implement :meth:`_evaluate`.  ``tol`` is the absolute
    tolerance used when comparing costs produced by this oracle.
    """

    tol = 1e-9

    def __init__(self, n: int, counter: Optional[CallCounter] = None):
        if n < 1:
            raise InputError("oracle ground set must be nonempty")
        self.n = n
        self.counter = counter if counter is not None else CallCounter()

    @property
    def calls(self) -> int:
        return self.counter.count

    @property
    def ground(self) -> frozenset:
        return frozenset(range(self.n))

    def __call__(self, s: Iterable[int]) -> float:
        value = self._evaluate(s)
        self.counter.tick()
        return value

    def _evaluate(self, s: Iterable[int]) -> float:
        raise NotImplementedError

    def components(self) -> Optional[list[frozenset]]:
        """Zero-cost components if the oracle is a cut function, else ``None``."""
        return None

    def split(self, block: Sequence[int]) -> "SubmodularOracle":
        """Oracle over ``block`` (relabelled in sorted order) for S -> f(S) + f(block - S) - f(block)."""
        return SplitOracle(self, block)


class CutOracle(SubmodularOracle):
    def __init__(self, graph: WeightedGraph, counter: Optional[CallCounter] = None):
        super().__init__(graph.n, counter)
        self.graph = graph

    def _evaluate(self, s):
        return cut_value(self.graph, s)

    def components(self):
        return self.graph.components()

    def split(self, block):
        # f(S) + f(W-S) - f(W) is twice the cut of S inside the induced subgraph.
        return CutOracle(self.graph.induced(sorted(block), scale=2.0), counter=self.counter)


class GaussianMIOracle(SubmodularOracle):
    tol = 1e-7

    def __init__(self, model: GaussianModel, counter: Optional[CallCounter] = None):
        super().__init__(model.n, counter)
        self.model = model

    def _evaluate(self, s):
        return gaussian_mi_value(self.model, s)


class FunctionOracle(SubmodularOracle):
    """Wraps an arbitrary callable; used for diagnostics and tests."""

    def __init__(self, n: int, fn: Callable[[frozenset], float], tol: float = 1e-9,
                 counter: Optional[CallCounter] = None):
        super().__init__(n, counter)
        self.fn = fn
        self.tol = tol

    def _evaluate(self, s):
        return float(self.fn(frozenset(s)))


class ContractedOracle(SubmodularOracle):
    """Oracle over supernodes; a supernode set evaluates as the union of its members."""

    def __init__(self, base: SubmodularOracle, supernodes: Sequence[Iterable[int]]):
        blocks = [frozenset(b) for b in supernodes]
        seen: set[int] = set()
        for b in blocks:
            if not b:
                raise InputError("supernodes must be nonempty")
            if seen & b:
                raise InputError(f"supernodes overlap on {sorted(seen & b)}")
            seen |= b
        if seen != set(range(base.n)):
            raise InputError("supernodes must cover the ground set")
        super().__init__(len(blocks), base.counter)
        self.base = base
        self.supernodes = tuple(blocks)
        self.tol = base.tol

    def expand(self, s: Iterable[int]) -> frozenset:
        out: set[int] = set()
        for i in s:
            out |= self.supernodes[i]
        return frozenset(out)

    def __call__(self, s):
        return self.base(self.expand(s))


def contract(oracle: SubmodularOracle, supernodes: Sequence[Iterable[int]]) -> ContractedOracle:
    return ContractedOracle(oracle, supernodes)


class SplitOracle(SubmodularOracle):
    def __init__(self, base: SubmodularOracle, block: Sequence[int]):
        self.elements = tuple(sorted(block))
        super().__init__(len(self.elements), base.counter)
        self.base = base
        self.tol = base.tol
        self._full = frozenset(self.elements)
        self._block_value = base(self._full)

    def __call__(self, s):
        inside = frozenset(self.elements[i] for i in s)
        return self.base(inside) + self.base(self._full - inside) - self._block_value


@dataclass
class OracleReport:
    symmetry_checked: int = 0
    symmetry_violation: float = 0.0
    submodular_checked: int = 0
    submodular_violation: float = 0.0
    normalization_violation: float = 0.0
    tol: float = 1e-9
    worst_pair: Optional[tuple] = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return max(self.symmetry_violation, self.submodular_violation,
                   self.normalization_violation) <= self.tol


def _random_subset(rng: np.random.Generator, n: int) -> frozenset:
    return frozenset(np.flatnonzero(rng.random(n) < 0.5).tolist())


def check_symmetric_submodular(oracle: SubmodularOracle, samples: int = 1000, seed: int = 0,
                               tol: Optional[float] = None) -> OracleReport:
    """Measure the worst violation of normalization, symmetry and submodularity.

    Symmetry is checked on every subset when ``n <= 12`` and on ``samples``
    random subsets otherwise; submodularity on ``samples`` random pairs.
    Violations are reported, never raised.
    """
    if samples < 1:
        raise InputError("sample count must be at least 1")
    rng = np.random.default_rng(seed)
    n = oracle.n
    full = oracle.ground
    report = OracleReport(tol=oracle.tol if tol is None else tol)
    report.normalization_violation = max(abs(oracle(frozenset())), abs(oracle(full)))

    if n <= 12:
        subsets = (frozenset(c) for r in range(n + 1) for c in itertools.combinations(range(n), r))
    else:
        subsets = (_random_subset(rng, n) for _ in range(samples))
    for s in subsets:
        gap = abs(oracle(s) - oracle(full - s))
        report.symmetry_checked += 1
        report.symmetry_violation = max(report.symmetry_violation, gap)

    for _ in range(samples):
        a, b = _random_subset(rng, n), _random_subset(rng, n)
        slack = oracle(a) + oracle(b) - oracle(a | b) - oracle(a & b)
        report.submodular_checked += 1
        if -slack > report.submodular_violation:
            report.submodular_violation = -slack
            report.worst_pair = (lex_key(a), lex_key(b))
    return report
