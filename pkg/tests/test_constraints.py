import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from actclust.constraints import (ActionabilityParams, GroupCapFamily, Grouping, Partition,
                                  family_member, group_cap, is_feasible, localized_family, max_k,
                                  partition_cost, required_count)
from actclust.errors import InputError, ValidationError
from actclust.instances import make_counterexample

from conftest import all_subsets, path_oracle


def test_grouping_rejects_overlap_naming_element():
    with pytest.raises(ValidationError, match="element 2"):
        Grouping(4, [[0, 1, 2], [2, 3]])


def test_grouping_rejects_uncovered():
    with pytest.raises(ValidationError, match=r"\[3\]"):
        Grouping(4, [[0, 1], [2]])


def test_grouping_smallest():
    g = Grouping(10, [range(4), range(4, 10)])
    assert g.smallest == frozenset(range(4))


def test_actionability_params_range():
    ActionabilityParams(0.0)
    ActionabilityParams(1.0, group=0)
    with pytest.raises(InputError):
        ActionabilityParams(1.5)


def test_required_count_reads_t_as_decimal():
    assert required_count(0.51, 100) == 51
    assert required_count(0.5, 3) == 2
    assert required_count(0.0, 7) == 0
    assert group_cap(0.51, 100) == 49


def test_empty_set_always_member():
    fam = GroupCapFamily.from_grouping(Grouping(5, [[0, 1], [2, 3, 4]]), 1.0)
    assert family_member(frozenset(), fam)


def test_counterexample_clique_in_global_family():
    inst, lm = make_counterexample()
    fam = GroupCapFamily.from_grouping(inst.grouping(), 0.51)
    assert fam.constraints[0][1] == 49
    assert family_member(lm["V1"], fam)


def test_pair_not_member_when_cap_one():
    fam = GroupCapFamily.from_grouping(Grouping.single(4), 0.75)
    sizes = {len(s): family_member(s, fam) for s in all_subsets(4)}
    assert sizes[1] and not sizes[2]


def test_localized_family_whole_set_equals_global():
    grouping = Grouping.single(10)
    loc = localized_family(range(10), grouping.groups[0], grouping, 0.3)
    glob = GroupCapFamily.from_grouping(grouping, 0.3)
    assert loc.constraints == glob.constraints


def test_localized_family_counterexample_tail_is_frozen():
    inst, lm = make_counterexample()
    grouping = inst.grouping()
    fam = localized_family(lm["V2"], grouping.groups[0], grouping, 0.51)
    assert fam.constraints[0][1] == 0
    assert not fam.has_proper_member()


def test_localized_family_vacuous_at_t0():
    grouping = Grouping(6, [[0, 1, 2], [3, 4, 5]])
    fam = localized_family({0, 1, 4}, grouping.groups[0], grouping, 0.0)
    assert fam.constraints[0][1] == 2
    assert all(family_member(s, fam) for s in [set(), {0, 1}, {0, 1, 4}])


def test_localized_family_negative_cap():
    grouping = Grouping.single(6)
    fam = localized_family({0, 1}, grouping.groups[0], grouping, 0.5)
    assert fam.constraints[0][1] == -1
    assert not family_member(frozenset(), fam)
    assert not fam.has_proper_member()


def test_has_proper_member_outside_group():
    grouping = Grouping(4, [[0, 1], [2, 3]])
    fam = localized_family({0, 1, 2}, grouping.groups[0], grouping, 1.0)
    assert fam.has_proper_member()  # {2} touches no member of the group


def test_is_feasible_whole_set():
    grouping = Grouping(5, [[0, 1], [2, 3, 4]])
    cert = is_feasible(Partition(5, [range(5)]), grouping, 1.0)
    assert cert.fraction == 1.0 and (cert.group, cert.block) == (0, 0)


def test_is_feasible_singletons_infeasible():
    assert is_feasible(Partition(3, [[0], [1], [2]]), Grouping.single(3), 0.5) is None


def test_is_feasible_tie_break_smallest_indices():
    grouping = Grouping(4, [[0, 1], [2, 3]])
    cert = is_feasible(Partition(4, [[2, 3], [0, 1]]), grouping, 1.0)
    assert (cert.group, cert.block) == (0, 1)


def test_max_k_examples():
    assert max_k(Grouping.single(100), 0.51) == 50
    assert max_k(Grouping(10, [range(4), range(4, 10)]), 1.0) == 7
    assert max_k(Grouping.single(9), 0.0) == 9


def test_partition_validation_reports_problems():
    with pytest.raises(ValidationError, match="duplicated ids \\[1\\]"):
        Partition(3, [[0, 1], [1, 2]])
    with pytest.raises(ValidationError, match="missing ids \\[2\\]"):
        Partition(3, [[0, 1]])
    with pytest.raises(ValidationError, match="empty"):
        Partition(2, [[0, 1], []])


def test_partition_cost_examples():
    o = path_oracle(4)
    assert partition_cost(o, Partition(4, [range(4)])) == 0
    assert partition_cost(o, Partition(4, [[0, 1], [2, 3]])) == 2


def test_partition_cost_block_order_invariant():
    rng = random.Random(5)
    from actclust.instances import random_instance
    o = random_instance(11, 9, density=0.7).oracle()
    labels = [rng.randrange(4) for _ in range(9)]
    blocks = [[x for x in range(9) if labels[x] == b] for b in range(4)]
    blocks = [b for b in blocks if b]
    base = partition_cost(o, Partition(9, blocks))
    for perm in itertools.permutations(blocks):
        assert partition_cost(o, Partition(9, perm)) == base


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 10), st.integers(1, 3), st.sampled_from([0.0, 0.2, 0.4, 0.5, 0.51, 0.75, 1.0]),
       st.randoms())
def test_family_downward_closed(n, m, t, rnd):
    m = min(m, n)
    labels = [i % m for i in range(n)]
    rnd.shuffle(labels)
    grouping = Grouping(n, [[x for x in range(n) if labels[x] == j] for j in range(m)])
    fam = GroupCapFamily.from_grouping(grouping, t)
    members = {s for s in all_subsets(n) if family_member(s, fam)}
    for s in members:
        for x in s:
            assert s - {x} in members


def test_integer_cap_equivalence_grid():
    for size in range(1, 31):
        for hundredths in range(101):
            t = hundredths / 100
            exact = Fraction(hundredths, 100)
            for c in range(size + 1):
                assert (c <= (1 - exact) * size) == (c <= group_cap(t, size))


def test_ceil_matches_exact_rational():
    for hundredths in range(101):
        for size in range(1, 31):
            assert required_count(hundredths / 100, size) == math.ceil(Fraction(hundredths, 100) * size)
