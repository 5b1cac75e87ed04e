"""Greedy and parallel splitting for (actionable) symmetric submodular clustering."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

from .constraints import (FeasibilityCertificate, GroupCapFamily, Grouping, Partition, check_t,
                          is_feasible, localized_family, max_k, partition_cost)
from .errors import InfeasibleError, InputError
from .minimizers import constrained_min, minimal_optimal_solutions, queyranne_min
from .oracles import SubmodularOracle, lex_key


@dataclass
class SplitCandidate:
    block: frozenset
    beta: int
    split: Optional[tuple]  # (S, block - S), None when the block cannot be split
    increment: float        # math.inf when frozen

    def to_dict(self):
        return {
            "block": sorted(self.block),
            "beta": self.beta,
            "split": None if self.split is None else [sorted(self.split[0]), sorted(self.split[1])],
            "increment": None if math.isinf(self.increment) else self.increment,
        }


@dataclass
class ClusteringRun:
    algorithm: str
    params: dict
    partition: Partition
    cost: float
    oracle_calls: int
    trace: list = field(default_factory=list)
    certificate: Optional[FeasibilityCertificate] = None
    feasible: bool = True
    degraded: bool = False
    group: Optional[int] = None  # group the run was constrained on, if any


def evaluate_split(oracle: SubmodularOracle, block, beta: int = 0,
                   family: Optional[GroupCapFamily] = None) -> SplitCandidate:
    """Best split of ``block`` and its cost increment f(S) + f(W - S) - f(W).

    With ``beta=1`` the part S split off must belong to ``family`` (a family
    over ``block``); an infinite increment marks a block that cannot be split.
    """
    w = frozenset(block)
    frozen = SplitCandidate(w, beta, None, math.inf)
    if len(w) < 2:
        return frozen
    elems = sorted(w)
    local = {x: i for i, x in enumerate(elems)}
    if beta:
        if family is None:
            raise InputError("a constrained split needs a family")
        fam = family.relabel(local)
        if not fam.has_proper_member():
            return frozen
        view = oracle.split(elems)
        res = constrained_min(view, fam)
    else:
        view = oracle.split(elems)
        res = queyranne_min(view)
    s = frozenset(elems[i] for i in res.set)
    return SplitCandidate(w, beta, (s, w - s), res.value)


def _trivial_run(name, oracle, params, grouping=None, t=None):
    part = Partition(oracle.n, [oracle.ground])
    start = oracle.calls
    cost = partition_cost(oracle, part)
    cert = is_feasible(part, grouping, t) if grouping is not None else None
    return ClusteringRun(name, params, part, cost, oracle.calls - start, [], cert,
                         grouping is None or cert is not None)


def _greedy(oracle, k, name, params, grouping=None, group=None, t=None) -> ClusteringRun:
    start = oracle.calls
    tol = oracle.tol
    blocks = [oracle.ground]
    betas = [1 if grouping is not None else 0]
    cache: dict = {}
    trace = []
    for it in range(k - 1):
        cands = []
        for w, beta in zip(blocks, betas):
            key = (w, beta)
            if key not in cache:
                fam = localized_family(w, grouping.groups[group], grouping, t) if beta else None
                cache[key] = evaluate_split(oracle, w, beta, fam)
            cands.append(cache[key])
        low = min(c.increment for c in cands)
        if math.isinf(low):
            raise InfeasibleError(f"{name}: every block is frozen after {len(blocks)} clusters")
        i = next(j for j, c in enumerate(cands) if c.increment <= low + tol)
        s, rest = cands[i].split
        trace.append({"iteration": it + 1, "candidates": [c.to_dict() for c in cands], "chosen": i})
        parent = betas[i]
        blocks[i], betas[i] = s, 0
        blocks.append(rest)
        betas.append(parent)

    part = Partition(oracle.n, blocks)
    cost = partition_cost(oracle, part)
    cert = is_feasible(part, grouping, t) if grouping is not None else None
    return ClusteringRun(name, params, part, cost, oracle.calls - start, trace, cert,
                         grouping is None or cert is not None, group=group)


def _check_k(k, n):
    if not 1 <= k <= n:
        raise InputError(f"k={k} outside 1..{n}")


def gsa(oracle: SubmodularOracle, k: int) -> ClusteringRun:
    """Greedy splitting: repeatedly apply the cheapest optimal binary split."""
    _check_k(k, oracle.n)
    params = {"k": k, "t": None, "group": None}
    if k == 1:
        return _trivial_run("gsa", oracle, params)
    return _greedy(oracle, k, "gsa", params)


def actionable_gsa(oracle: SubmodularOracle, grouping: Grouping, group: int, t, k: int) -> ClusteringRun:
    """Greedy splitting where one tagged block must keep ceil(t|g|) members of ``group``."""
    t = check_t(t)
    _check_k(k, oracle.n)
    if not 0 <= group < len(grouping):
        raise InputError(f"group index {group} out of range")
    params = {"k": k, "t": t, "group": grouping.names[group]}
    if k > max_k(grouping, t):
        raise InfeasibleError(f"k={k} exceeds the largest feasible k={max_k(grouping, t)}")
    if k == 1:
        run = _trivial_run("agsa", oracle, params, grouping, t)
        run.group = group
        return run
    return _greedy(oracle, k, "agsa", params, grouping, group, t)


def actionable_gsa_multigroup(oracle: SubmodularOracle, grouping: Grouping, t, k: int) -> ClusteringRun:
    """Run the actionable greedy split once per group and keep the cheapest feasible run."""
    best: Optional[ClusteringRun] = None
    start = oracle.calls
    summary = []
    for j in range(len(grouping)):
        try:
            run = actionable_gsa(oracle, grouping, j, t, k)
        except InfeasibleError as exc:
            summary.append({"group": grouping.names[j], "cost": None, "reason": str(exc)})
            continue
        summary.append({"group": grouping.names[j], "cost": run.cost})
        if best is None or run.cost < best.cost - oracle.tol:
            best = run
    if best is None:
        raise InfeasibleError("actionable greedy splitting is infeasible for every group")
    best.algorithm = "agsa-multi"
    best.params = {"k": k, "t": float(t), "group": grouping.names[best.group]}
    best.oracle_calls = oracle.calls - start
    best.trace = [{"per_group": summary}] + best.trace
    return best


def optimal_two_clustering(oracle: SubmodularOracle, grouping: Grouping, t) -> ClusteringRun:
    """Optimal feasible 2-partition {S*, D - S*} from one constrained minimization per group."""
    t = check_t(t)
    start = oracle.calls
    best = None
    trace = []
    for j in range(len(grouping)):
        fam = GroupCapFamily.from_grouping(grouping, t, [j])
        if not fam.has_proper_member():
            trace.append({"group": grouping.names[j], "set": None, "value": None})
            continue
        res = constrained_min(oracle, fam)
        trace.append({"group": grouping.names[j], "set": sorted(res.set), "value": res.value})
        if best is None or res.value < best[0].value - oracle.tol:
            best = (res, j)
    if best is None:
        raise InfeasibleError("no group admits a feasible split into two clusters")
    res, j = best
    part = Partition(oracle.n, [res.set, oracle.ground - res.set])
    cost = partition_cost(oracle, part)
    cert = is_feasible(part, grouping, t)
    return ClusteringRun("two-opt", {"k": 2, "t": t, "group": grouping.names[j]}, part, cost,
                         oracle.calls - start, trace, cert, cert is not None, group=j)


def _best_selection(oracle, solutions, grouping, t, k):
    """Largest feasible partition built from minimal solutions plus their residual."""
    n = oracle.n
    full = oracle.ground
    best = None  # (-m, cost, selection key, blocks)
    for size in range(min(len(solutions), k - 1), 0, -1):
        if best is not None and size + 1 < -best[0]:
            break
        for chosen in itertools.combinations(solutions, size):
            residual = full - frozenset().union(*chosen)
            blocks = list(chosen) + ([residual] if residual else [])
            if len(blocks) < 2:
                continue
            part = Partition(n, blocks)
            if is_feasible(part, grouping, t) is None:
                continue
            key = (-len(blocks), partition_cost(oracle, part), tuple(lex_key(c) for c in chosen))
            if best is None or key[0] < best[0] or (
                    key[0] == best[0] and (key[1] < best[1] - oracle.tol
                                           or (key[1] <= best[1] + oracle.tol and key[2] < best[2]))):
                best = key + (part,)
    return best


def parallel_split(oracle: SubmodularOracle, grouping: Grouping, t, k: int) -> ClusteringRun:
    """Build a partition in one shot from disjoint minimal optimal solutions.

    Per group, k - 1 of the minimal solutions plus the residual block form
    the candidate partition.  When no such feasible k-partition exists the
    largest feasible one with fewer blocks is returned, flagged degraded.
    """
    t = check_t(t)
    _check_k(k, oracle.n)
    params = {"k": k, "t": t, "group": None}
    if k == 1:
        return _trivial_run("parallel", oracle, params, grouping, t)
    start = oracle.calls
    best = None
    trace = []
    for j in range(len(grouping)):
        fam = GroupCapFamily.from_grouping(grouping, t, [j])
        if not fam.has_proper_member():
            trace.append({"group": grouping.names[j], "solutions": None})
            continue
        sols = minimal_optimal_solutions(oracle, fam)
        trace.append({"group": grouping.names[j], "solutions": [sorted(s) for s in sols]})
        pick = _best_selection(oracle, sols, grouping, t, k)
        if pick is None:
            continue
        if best is None or pick[0] < best[0][0] or (
                pick[0] == best[0][0] and pick[1] < best[0][1] - oracle.tol):
            best = (pick, j)
    if best is None:
        raise InfeasibleError("parallel splitting cannot reach even two feasible clusters")
    (neg_m, cost, _, part), j = best
    params["group"] = grouping.names[j]
    cert = is_feasible(part, grouping, t)
    return ClusteringRun("parallel", params, part, cost, oracle.calls - start, trace, cert,
                         cert is not None, degraded=-neg_m < k, group=j)


class Lemma1Check(NamedTuple):
    ratio: float
    bound: float
    holds: bool


def lemma1_check(cost: float, opt: float, k: int, tol: float = 1e-9) -> Lemma1Check:
    """Compare a parallel-split cost with the optimum against the 2(1 - 1/k) factor."""
    bound = 2.0 * (1.0 - 1.0 / k)
    if opt > tol:
        ratio = cost / opt
    elif cost <= tol:
        ratio = 1.0
    else:
        ratio = math.inf
    return Lemma1Check(ratio, bound, ratio <= bound + tol)


def lemma1_chain(oracle: SubmodularOracle, solutions: Sequence, residual, optimum: Partition) -> dict:
    """Slack of each step in the approximation argument (nonnegative means it holds).

    ``solutions`` are the k - 1 minimal solutions used by the run,
    ``residual`` its last block, and ``optimum`` an optimal k-partition.
    """
    union = frozenset().union(*solutions)
    f_union = oracle(union)
    f_sols = [oracle(c) for c in solutions]
    f_opt = sorted(oracle(c) for c in optimum.blocks)
    k = len(optimum)
    return {
        "symmetry": -abs(f_union - oracle(residual)),
        "union_bound": math.fsum(f_sols) - f_union,
        "split_optimality": math.fsum(f_opt[:k - 1]) - math.fsum(f_sols),
        "max_vs_mean": f_opt[-1] - math.fsum(f_opt) / k,
    }
