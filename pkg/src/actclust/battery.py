"""Seeded invariant suites behind ``actclust selftest``.

Every suite compares a fast routine with an exhaustive reference on
small random instances.  Results are plain counts so the output is
identical from run to run.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

from .clustering import (actionable_gsa_multigroup, gsa, lemma1_chain, lemma1_check,
                         optimal_two_clustering, parallel_split)
from .constraints import GroupCapFamily, Grouping, family_member, max_k
from .errors import InfeasibleError, RefusalError
from .instances import Instance, random_gaussian_instance, random_instance
from .minimizers import (BRUTE_PARTITION_LIMIT, brute_force_best_partition, brute_force_min,
                         constrained_min, minimal_optimal_solutions, queyranne_min)
from .oracles import check_symmetric_submodular

T_VALUES = (0.4, 0.51, 0.75)


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    skipped: int = 0
    failures: list = field(default_factory=list)  # (seed, message, instance)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, seed, message, instance):
        self.failures.append((seed, message, instance))


def battery_instance(seed: int, n_max: int, m_choices=(1, 2), n_min: int = 4) -> Instance:
    """Deterministic instance for ``seed``: size, groups and t all cycle with the seed."""
    n = n_min + seed % (n_max - n_min + 1)
    m = m_choices[seed % len(m_choices)]
    t = T_VALUES[(seed // len(m_choices)) % len(T_VALUES)]
    density = 0.35 + 0.15 * (seed % 4)
    return random_instance(seed, n, density=density, weights=(1, 9), m=min(m, n), t=t)


def _close(a, b, tol):
    return abs(a - b) <= tol


def suite_oracles(seeds, n_max, k_max):
    res = SuiteResult("oracle contracts")
    for seed in range(seeds):
        for inst in (battery_instance(seed, n_max), random_gaussian_instance(seed, min(n_max, 8))):
            rep = check_symmetric_submodular(inst.oracle(), samples=200, seed=seed)
            res.checked += 1
            if not rep.ok:
                res.fail(seed, f"violations sym={rep.symmetry_violation:.3g} "
                               f"sub={rep.submodular_violation:.3g}", inst)
    return res


def suite_queyranne(seeds, n_max, k_max):
    res = SuiteResult("pendant-pair vs brute force")
    for seed in range(seeds):
        inst = battery_instance(seed, n_max, n_min=2)
        o = inst.oracle()
        q, b = queyranne_min(o), brute_force_min(o)
        res.checked += 1
        if not _close(q.value, b.value, o.tol):
            res.fail(seed, f"pendant-pair {q.value} != brute force {b.value}", inst)
        elif q.calls > 5 * o.n ** 3:
            res.fail(seed, f"{q.calls} oracle calls exceed 5n^3", inst)
    return res


def suite_constrained(seeds, n_max, k_max):
    res = SuiteResult("constrained minimum vs brute force")
    for seed in range(seeds):
        inst = battery_instance(seed, n_max)
        o, grouping = inst.oracle(), inst.grouping()
        fam = GroupCapFamily.from_grouping(grouping, inst.t)
        if not fam.has_proper_member():
            res.skipped += 1
            continue
        c, b = constrained_min(o, fam), brute_force_min(o, fam)
        res.checked += 1
        if not (_close(c.value, b.value, o.tol) and family_member(c.set, fam)):
            res.fail(seed, f"constrained {c.value} != brute force {b.value}", inst)
    return res


def suite_two_clusters(seeds, n_max, k_max):
    res = SuiteResult("k=2 optimality")
    for seed in range(seeds):
        inst = battery_instance(seed, n_max)
        o, grouping = inst.oracle(), inst.grouping()
        if max_k(grouping, inst.t) < 2:
            res.skipped += 1
            continue
        opt = brute_force_best_partition(o, 2, grouping, inst.t).cost
        two = optimal_two_clustering(o, grouping, inst.t)
        greedy = actionable_gsa_multigroup(o, grouping, inst.t, 2)
        res.checked += 1
        if not _close(two.cost, opt, o.tol) or not _close(greedy.cost, opt, o.tol):
            res.fail(seed, f"two-opt {two.cost}, agsa {greedy.cost}, brute force {opt}", inst)
    return res


def suite_gsa_bound(seeds, n_max, k_max):
    res = SuiteResult("greedy splitting 2-2/k bound")
    for seed in range(seeds):
        inst = battery_instance(seed, n_max)
        o = inst.oracle()
        trivial = Grouping.single(inst.n)
        for k in range(2, min(k_max, inst.n) + 1):
            opt = brute_force_best_partition(o, k, trivial, 0.0).cost
            cost = gsa(o, k).cost
            res.checked += 1
            if cost > (2 - 2 / k) * opt + 1e-9:
                res.fail(seed, f"k={k}: gsa {cost} > (2-2/k) * {opt}", inst)
    return res


def suite_minimal(seeds, n_max, k_max):
    res = SuiteResult("minimal optimal solutions")
    for seed in range(seeds):
        inst = battery_instance(seed, n_max)
        o, grouping = inst.oracle(), inst.grouping()
        fam = GroupCapFamily.from_grouping(grouping, inst.t)
        if not fam.has_proper_member():
            res.skipped += 1
            continue
        opt = brute_force_min(o, fam).value
        sols = minimal_optimal_solutions(o, fam)
        res.checked += 1
        bad = [s for s in sols if not _close(o(s), opt, o.tol)]
        overlap = any(a & b for a, b in itertools.combinations(sols, 2))
        if not sols or bad or overlap:
            res.fail(seed, f"{len(sols)} solutions, {len(bad)} suboptimal, overlap={overlap}", inst)
    return res


def suite_lemma1(seeds, n_max, k_max):
    res = SuiteResult("parallel splitting bound")
    for seed in range(seeds):
        inst = battery_instance(seed, min(n_max, 9), m_choices=(1,))
        o, grouping = inst.oracle(), inst.grouping()
        for k in range(2, min(3, k_max) + 1):
            if max_k(grouping, inst.t) < k:
                continue
            run = parallel_split(o, grouping, inst.t, k)
            if run.degraded or not run.feasible:
                res.skipped += 1
                continue
            opt = brute_force_best_partition(o, k, grouping, inst.t)
            check = lemma1_check(run.cost, opt.cost, k)
            blocks = run.partition.blocks
            chain = lemma1_chain(o, blocks[:-1], blocks[-1], opt.partition)
            res.checked += 1
            weak = {name: slack for name, slack in chain.items() if slack < -o.tol}
            if not check.holds or weak:
                res.fail(seed, f"k={k}: ratio {check.ratio:.4g} bound {check.bound}, failing steps {weak}",
                         inst)
    return res


def suite_reduction(seeds, n_max, k_max):
    res = SuiteResult("per-group reduction")
    for seed in range(seeds):
        inst = battery_instance(seed, min(n_max, 9), m_choices=(2, 3))
        o, grouping = inst.oracle(), inst.grouping()
        try:
            direct = brute_force_best_partition(o, 2, grouping, inst.t).cost
        except InfeasibleError:
            res.skipped += 1
            continue
        per_group = []
        for j in range(len(grouping)):
            fam = GroupCapFamily.from_grouping(grouping, inst.t, [j])
            if fam.has_proper_member():
                per_group.append(2 * constrained_min(o, fam).value)
        res.checked += 1
        if not per_group or not _close(min(per_group), direct, o.tol):
            res.fail(seed, f"per-group minimum {per_group} vs direct {direct}", inst)
    return res


def suite_family(seeds, n_max, k_max):
    res = SuiteResult("hereditary family closure")
    for seed in range(seeds):
        inst = battery_instance(seed, min(n_max, 10), m_choices=(1, 2, 3))
        fam = GroupCapFamily.from_grouping(inst.grouping(), inst.t)
        n = inst.n
        members = {frozenset(c) for r in range(n + 1) for c in itertools.combinations(range(n), r)
                   if family_member(c, fam)}
        res.checked += 1
        for s in members:
            if any(s - {x} not in members for x in s):
                res.fail(seed, f"member {sorted(s)} has a subset outside the family", inst)
                break
    return res


SUITES: list[Callable] = [suite_oracles, suite_queyranne, suite_constrained, suite_two_clusters,
                          suite_gsa_bound, suite_minimal, suite_lemma1, suite_reduction, suite_family]


def run_battery(seeds: int = 100, n_max: int = 10, k_max: int = 4) -> list[SuiteResult]:
    if n_max > BRUTE_PARTITION_LIMIT:
        raise RefusalError(
            f"n_max={n_max} exceeds the brute-force limit of {BRUTE_PARTITION_LIMIT}; "
            f"rerun with --n-max {BRUTE_PARTITION_LIMIT} or lower")
    if n_max < 4:
        raise RefusalError("n_max must be at least 4")
    return [suite(seeds, n_max, k_max) for suite in SUITES]
