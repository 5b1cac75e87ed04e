"""Exact minimizers for symmetric submodular functions.

``queyranne_min`` is the pendant-pair routine for the unconstrained
problem.  ``constrained_min`` and ``minimal_optimal_solutions`` handle
group-cap families by pruned enumeration, with a shortcut for
disconnected cut functions.  The ``brute_force_*`` functions are plain
exhaustive references, kept deliberately separate from the fast paths
so tests can compare the two.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

from .constraints import (FeasibilityCertificate, GroupCapFamily, Grouping, Partition,
                          family_member, is_feasible, required_count)
from .errors import ActClustError, InfeasibleError, InputError, RefusalError
from .oracles import SubmodularOracle, contract, lex_key

BRUTE_MIN_LIMIT = 24
BRUTE_PARTITION_LIMIT = 12
ENUMERATION_LIMIT = 24
COMPONENT_UNION_LIMIT = 16


@dataclass
class PendantRound:
    order: list          # supernode indices in the order they were appended
    candidate: list      # expanded candidate set, sorted
    value: float


@dataclass
class PendantTrace:
    rounds: list = field(default_factory=list)

    def to_dict(self):
        return [{"order": r.order, "candidate": r.candidate, "value": r.value} for r in self.rounds]


@dataclass
class MinimizationResult:
    set: frozenset
    value: float
    calls: int
    trace: Optional[PendantTrace] = None


class _Best:
    """Running minimum by (value, lexicographic set) with a value tolerance."""

    def __init__(self, tol: float):
        self.tol = tol
        self.value = math.inf
        self.set: Optional[frozenset] = None

    def offer(self, s: frozenset, value: float):
        if self.set is None or value < self.value - self.tol:
            self.value, self.set = value, s
        elif value <= self.value + self.tol and lex_key(s) < lex_key(self.set):
            self.value, self.set = min(value, self.value), s


def queyranne_min(oracle: SubmodularOracle) -> MinimizationResult:
    """Minimize a symmetric submodular function over nonempty proper subsets.

    Each round orders the current supernodes greedily (start from the
    lowest index, append the u minimizing f(W + u) - f(u)); the last
    element's singleton is a candidate, and the last two are merged.
    After n - 1 rounds the best candidate is optimal.
    """
    n = oracle.n
    if n < 2:
        raise InputError("need at least two elements to split")
    start = oracle.calls
    full = oracle.ground
    supernodes = [frozenset([i]) for i in range(n)]
    trace = PendantTrace()
    best = _Best(oracle.tol)

    while len(supernodes) > 1:
        view = contract(oracle, supernodes)
        p = len(supernodes)
        single = [view([u]) for u in range(p)]
        order = [0]
        current = {0}
        remaining = list(range(1, p))
        while remaining:
            keys = [(view(current | {u}) - single[u], u) for u in remaining]
            u = min(keys)[1]
            order.append(u)
            current.add(u)
            remaining.remove(u)
        last, prev = order[-1], order[-2]
        found = view.expand([last])
        # For a symmetric f the complement is an equally good answer.
        found = min(found, full - found, key=lex_key)
        trace.rounds.append(PendantRound(order, sorted(found), single[last]))
        best.offer(found, single[last])

        merged = supernodes[prev] | supernodes[last]
        lo = min(prev, last)
        supernodes = [s for i, s in enumerate(supernodes) if i not in (prev, last)]
        supernodes.insert(lo, merged)

    return MinimizationResult(best.set, best.value, oracle.calls - start, trace)


def _mask_set(mask: int, n: int) -> frozenset:
    return frozenset(i for i in range(n) if mask >> i & 1)


def brute_force_min(oracle: SubmodularOracle, family: Optional[GroupCapFamily] = None) -> MinimizationResult:
    """Exhaustive minimum over nonempty proper subsets, optionally within ``family``."""
    n = oracle.n
    if n > BRUTE_MIN_LIMIT:
        raise RefusalError(f"brute_force_min refuses n={n} > {BRUTE_MIN_LIMIT}")
    if n < 2:
        raise InputError("need at least two elements to split")
    start = oracle.calls
    best = _Best(oracle.tol)
    for mask in range(1, (1 << n) - 1):
        s = _mask_set(mask, n)
        if family is not None and not family_member(s, family):
            continue
        best.offer(s, oracle(s))
    if best.set is None:
        raise InfeasibleError("family has no nonempty proper member")
    return MinimizationResult(best.set, best.value, oracle.calls - start)


def _component_unions(oracle, family, comps):
    full = oracle.ground
    for mask in range(1, (1 << len(comps)) - 1):
        s = frozenset().union(*(c for i, c in enumerate(comps) if mask >> i & 1))
        if s != full and family_member(s, family):
            yield s


def _check_family(oracle: SubmodularOracle, family: GroupCapFamily):
    if family.universe != oracle.ground:
        raise InputError("family universe does not match the oracle's ground set")
    if not family.has_proper_member():
        raise InfeasibleError("infeasible split: family has no nonempty proper member")


def _zero_components(oracle):
    comps = oracle.components()
    if comps is not None and 2 <= len(comps) <= COMPONENT_UNION_LIMIT:
        return comps
    return None


def constrained_min(oracle: SubmodularOracle, family: GroupCapFamily,
                    solver: Optional[Callable] = None) -> MinimizationResult:
    """Minimize f over nonempty proper members of a group-cap family.

    ``solver`` is an optional drop-in replacement with the same signature
    and result type; by default the minimum is found by enumeration in
    order of increasing set size, stopping at the largest size any member
    can have.  Disconnected cut functions first try unions of
    components, whose value 0 is a global lower bound.
    """
    _check_family(oracle, family)
    if solver is not None:
        return solver(oracle, family)
    start = oracle.calls
    n = oracle.n
    best = _Best(oracle.tol)

    comps = _zero_components(oracle)
    if comps is not None:
        for s in _component_unions(oracle, family, comps):
            if best.set is None or lex_key(s) < lex_key(best.set):
                best.set = s
        if best.set is not None:
            best.value = oracle(best.set)
            return MinimizationResult(best.set, best.value, oracle.calls - start)

    if n > ENUMERATION_LIMIT:
        raise RefusalError(f"constrained_min enumeration refuses n={n} > {ENUMERATION_LIMIT}")
    top = min(n - 1, family.max_member_size())
    for size in range(1, top + 1):
        for combo in itertools.combinations(range(n), size):
            s = frozenset(combo)
            if family_member(s, family):
                best.offer(s, oracle(s))
    return MinimizationResult(best.set, best.value, oracle.calls - start)


def minimal_optimal_solutions(oracle: SubmodularOracle, family: GroupCapFamily) -> list:
    """All inclusion-minimal optimal members of ``family``, sorted lexicographically.

    These sets are pairwise disjoint; an overlap indicates a broken oracle
    and raises ``ActClustError``.
    """
    opt = constrained_min(oracle, family).value
    tol = oracle.tol
    n = oracle.n
    found: list[frozenset] = []

    comps = _zero_components(oracle)
    if comps is not None and opt <= tol:
        # Zero-cost sets are unions of components; the minimal ones are single components.
        found = [c for c in comps if family_member(c, family) and len(c) < n]
    else:
        if n > ENUMERATION_LIMIT:
            raise RefusalError(f"minimal_optimal_solutions refuses n={n} > {ENUMERATION_LIMIT}")
        top = min(n - 1, family.max_member_size())
        for size in range(1, top + 1):
            for combo in itertools.combinations(range(n), size):
                s = frozenset(combo)
                if any(m < s for m in found) or not family_member(s, family):
                    continue
                if oracle(s) <= opt + tol:
                    found.append(s)

    found.sort(key=lex_key)
    for a, b in itertools.combinations(found, 2):
        if a & b:
            raise ActClustError(
                f"minimal optimal solutions {lex_key(a)} and {lex_key(b)} overlap; "
                "the oracle is not symmetric submodular")
    return found


class PartitionResult(NamedTuple):
    partition: Partition
    cost: float
    certificate: Optional[FeasibilityCertificate]


def brute_force_best_partition(oracle: SubmodularOracle, k: int, grouping: Grouping, t,
                               groups: Optional[Sequence[int]] = None) -> PartitionResult:
    """Cheapest feasible partition into exactly ``k`` blocks, by exhaustive search.

    Partitions are generated as restricted growth strings; ``groups``
    limits which groups may witness feasibility (default: all).
    """
    n = oracle.n
    if n > BRUTE_PARTITION_LIMIT:
        raise RefusalError(f"brute_force_best_partition refuses n={n} > {BRUTE_PARTITION_LIMIT}")
    if not 1 <= k <= n:
        raise RefusalError(f"k={k} outside 1..{n}")
    tol = oracle.tol
    table = [oracle(_mask_set(m, n)) for m in range(1 << n)]
    chosen = range(len(grouping)) if groups is None else groups
    needs = []
    for j in chosen:
        g = grouping.groups[j]
        needs.append((sum(1 << x for x in g), required_count(t, len(g))))

    blocks = [0] * k
    best_cost = math.inf
    best_blocks: Optional[list] = None

    def canonical(bs):
        return sorted(lex_key(_mask_set(b, n)) for b in bs)

    def visit(i, used):
        nonlocal best_cost, best_blocks
        if n - i < k - used:
            return
        if i == n:
            if not any((b & gm).bit_count() >= need for gm, need in needs for b in blocks):
                return
            cost = sum(table[b] for b in blocks)
            if cost < best_cost - tol:
                best_cost, best_blocks = cost, list(blocks)
            elif cost <= best_cost + tol and canonical(blocks) < canonical(best_blocks):
                best_cost, best_blocks = min(cost, best_cost), list(blocks)
            return
        bit = 1 << i
        for j in range(used):
            blocks[j] |= bit
            visit(i + 1, used)
            blocks[j] ^= bit
        if used < k:
            blocks[used] = bit
            visit(i + 1, used + 1)
            blocks[used] = 0

    visit(0, 0)
    if best_blocks is None:
        raise InfeasibleError(f"no feasible {k}-partition exists")
    part = Partition(n, sorted((_mask_set(b, n) for b in best_blocks), key=lex_key))
    return PartitionResult(part, best_cost, is_feasible(part, grouping, t, groups))
