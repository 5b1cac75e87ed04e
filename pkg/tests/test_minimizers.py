import pytest

from actclust.constraints import GroupCapFamily, Grouping, family_member, is_feasible
from actclust.errors import InfeasibleError, InputError, RefusalError
from actclust.instances import CounterexampleSpec, make_counterexample, random_instance
from actclust.minimizers import (brute_force_best_partition, brute_force_min, constrained_min,
                                 minimal_optimal_solutions, queyranne_min)
from actclust.oracles import CutOracle, FunctionOracle, WeightedGraph

from conftest import all_subsets, exhaustive_min, path_oracle


def two_components():
    return CutOracle(WeightedGraph(5, [(0, 1, 2), (1, 2, 3), (3, 4, 1)]))


def test_queyranne_path(path3):
    res = queyranne_min(path3)
    assert res.value == 1
    assert res.set == {0}


def test_queyranne_two_components():
    res = queyranne_min(two_components())
    assert res.value == 0
    assert res.set in ({0, 1, 2}, {3, 4})


def test_queyranne_rejects_singleton():
    with pytest.raises(InputError):
        queyranne_min(path_oracle(1))


@pytest.mark.parametrize("seed", range(50))
def test_queyranne_matches_enumeration(seed):
    o = random_instance(seed, 8, density=0.5, weights=(1, 9)).oracle()
    res = queyranne_min(o)
    assert res.value == pytest.approx(exhaustive_min(o), abs=1e-9)
    assert 0 < len(res.set) < 8
    assert o(res.set) == pytest.approx(res.value, abs=1e-9)


def test_pendant_trace_rounds():
    o = random_instance(4, 9, density=0.6).oracle()
    res = queyranne_min(o)
    rounds = res.trace.rounds
    assert len(rounds) == 8
    assert [len(r.order) for r in rounds] == list(range(9, 1, -1))
    assert min(r.value for r in rounds) == res.value


def test_queyranne_call_budget():
    for n in (4, 16, 32):
        o = random_instance(n, n, density=0.4).oracle()
        assert queyranne_min(o).calls <= 5 * n ** 3


def test_constrained_vacuous_family_matches_unconstrained():
    o = random_instance(9, 8, density=0.5).oracle()
    fam = GroupCapFamily.from_grouping(Grouping.single(8), 0.0)
    assert constrained_min(o, fam).value == pytest.approx(queyranne_min(o).value, abs=1e-9)


def test_constrained_counterexample_fast_path():
    inst, lm = make_counterexample()
    o = inst.oracle()
    fam = GroupCapFamily.from_grouping(inst.grouping(), 0.51)
    res = constrained_min(o, fam)
    assert res.set == frozenset(lm["V1"]) and res.value == 0


def test_constrained_path_cap_one():
    o = path_oracle(4)
    fam = GroupCapFamily.from_grouping(Grouping.single(4), 0.75)
    res = constrained_min(o, fam)
    assert res.value == 1 and res.set == {0}


def test_constrained_infeasible_family():
    o = path_oracle(4)
    fam = GroupCapFamily.from_grouping(Grouping.single(4), 1.0)
    with pytest.raises(InfeasibleError):
        constrained_min(o, fam)


def test_constrained_solver_slot():
    o = path_oracle(4)
    fam = GroupCapFamily.from_grouping(Grouping.single(4), 0.75)
    slot = constrained_min(o, fam, solver=lambda oracle, family: brute_force_min(oracle, family))
    assert slot.value == constrained_min(o, fam).value


def test_constrained_refuses_large_connected():
    o = random_instance(0, 26, density=1.0).oracle()
    fam = GroupCapFamily.from_grouping(Grouping.single(26), 0.5)
    with pytest.raises(RefusalError):
        constrained_min(o, fam)


def _random_caps_family(seed, n):
    import random
    rng = random.Random(seed)
    m = rng.randint(1, 3)
    labels = [i % m for i in range(n)]
    rng.shuffle(labels)
    groups = [[x for x in range(n) if labels[x] == j] for j in range(m)]
    universe = frozenset(range(n))
    return GroupCapFamily(universe, tuple((frozenset(g), rng.randint(0, len(g))) for g in groups))


@pytest.mark.parametrize("seed", range(100))
def test_constrained_matches_brute_force(seed):
    o = random_instance(seed, 8, density=0.5).oracle()
    fam = _random_caps_family(seed, 8)
    if not fam.has_proper_member():
        with pytest.raises(InfeasibleError):
            constrained_min(o, fam)
        return
    res = constrained_min(o, fam)
    ref = brute_force_min(o, fam)
    assert res.value == pytest.approx(ref.value, abs=1e-9)
    assert res.value == pytest.approx(exhaustive_min(o, lambda s: family_member(s, fam)), abs=1e-9)
    assert family_member(res.set, fam) and 0 < len(res.set) < 8


@pytest.mark.parametrize("seed", range(100))
def test_brute_min_matches_queyranne(seed):
    o = random_instance(1000 + seed, 8, density=0.5).oracle()
    assert brute_force_min(o).value == pytest.approx(queyranne_min(o).value, abs=1e-9)


def test_brute_min_path_and_guard(path3):
    assert brute_force_min(path3).value == 1
    with pytest.raises(RefusalError):
        brute_force_min(path_oracle(25))


def test_minimal_solutions_scaled_counterexample_half():
    # At t = 0.5 the path component (6 of 12 vertices) also fits under the cap of 6.
    inst, lm = make_counterexample(CounterexampleSpec(n=12, t=0.5))
    fam = GroupCapFamily.from_grouping(inst.grouping(), 0.5)
    sols = minimal_optimal_solutions(inst.oracle(), fam)
    assert sols == [frozenset(range(6)), frozenset(range(6, 12))]


def test_minimal_solutions_scaled_counterexample_clique_only():
    inst, lm = make_counterexample(CounterexampleSpec(n=12, t=0.51))
    fam = GroupCapFamily.from_grouping(inst.grouping(), 0.51)
    assert minimal_optimal_solutions(inst.oracle(), fam) == [frozenset(lm["V1"])]


def test_minimal_solutions_two_components():
    o = CutOracle(WeightedGraph(6, [(0, 1, 1), (1, 2, 1), (3, 4, 1), (4, 5, 1)]))
    fam = GroupCapFamily.from_grouping(Grouping.single(6), 0.5)
    assert minimal_optimal_solutions(o, fam) == [frozenset({0, 1, 2}), frozenset({3, 4, 5})]


def _brute_minimal(o, fam):
    members = [s for s in all_subsets(o.n) if 0 < len(s) < o.n and family_member(s, fam)]
    opt = min(o(s) for s in members)
    best = [s for s in members if o(s) <= opt + 1e-9]
    return sorted((s for s in best if not any(b < s for b in best)), key=lambda s: sorted(s))


@pytest.mark.parametrize("seed", range(20))
def test_minimal_solutions_match_enumeration(seed):
    n = 6 + seed % 5
    inst = random_instance(seed, n, density=0.4, m=1 + seed % 2, t=(0.4, 0.51, 0.75)[seed % 3])
    o = inst.oracle()
    fam = GroupCapFamily.from_grouping(inst.grouping(), inst.t)
    if not fam.has_proper_member():
        pytest.skip("family has no proper member")
    sols = minimal_optimal_solutions(o, fam)
    assert sols == _brute_minimal(o, fam)
    for i, a in enumerate(sols):
        for b in sols[i + 1:]:
            assert not a & b


def test_minimal_solutions_removal_property():
    inst = random_instance(7, 9, density=0.5, m=2, t=0.51)
    o = inst.oracle()
    fam = GroupCapFamily.from_grouping(inst.grouping(), inst.t)
    opt = constrained_min(o, fam).value
    for s in minimal_optimal_solutions(o, fam):
        for x in s:
            smaller = s - {x}
            assert not smaller or o(smaller) > opt + 1e-9


def test_minimal_solutions_overlap_is_flagged():
    # Not symmetric submodular: {0, 1} and {1, 2} are both minimal optima.
    values = {frozenset({0, 1}): 0.0, frozenset({1, 2}): 0.0}
    o = FunctionOracle(3, lambda s: values.get(s, 1.0 if 0 < len(s) < 3 else 0.0))
    fam = GroupCapFamily.from_grouping(Grouping.single(3), 0.0)
    with pytest.raises(Exception, match="overlap"):
        minimal_optimal_solutions(o, fam)


def test_best_partition_k1():
    o = path_oracle(5)
    res = brute_force_best_partition(o, 1, Grouping.single(5), 0.5)
    assert res.cost == 0 and len(res.partition) == 1 and res.certificate is not None


def test_best_partition_two_components():
    res = brute_force_best_partition(two_components(), 2, Grouping.single(5), 0.4)
    assert res.cost == 0
    assert res.partition.canonical() == ((0, 1, 2), (3, 4))


def test_best_partition_respects_constraint():
    o = path_oracle(4)
    grouping = Grouping.single(4)
    res = brute_force_best_partition(o, 3, grouping, 0.5)
    assert is_feasible(res.partition, grouping, 0.5) is not None
    assert res.cost == 4  # {0,1},{2},{3} or {0},{1},{2,3}: cuts 1 + 2 + 1
    assert res.partition.canonical() == ((0,), (1,), (2, 3))


def test_best_partition_guards():
    with pytest.raises(RefusalError):
        brute_force_best_partition(path_oracle(13), 2, Grouping.single(13), 0.0)
    with pytest.raises(InfeasibleError):
        brute_force_best_partition(path_oracle(4), 2, Grouping.single(4), 1.0)
