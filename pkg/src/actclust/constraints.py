"""Groups, the actionability constraint and its hereditary families."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import InputError, ValidationError
from .oracles import SubmodularOracle, lex_key


def _exact(t) -> Fraction:
    # Decimal reading of t: 0.51 * 100 must give 51, not 51.000000000000004.
    if isinstance(t, Fraction):
        return t
    return Fraction(repr(float(t))) if isinstance(t, float) else Fraction(t)


def required_count(t, size: int) -> int:
    """Smallest number of group members that reaches fraction ``t`` of ``size``."""
    return math.ceil(_exact(t) * size)


def group_cap(t, size: int) -> int:
    """Largest intersection a set may have with a group of ``size`` and stay in the family."""
    return size - required_count(t, size)


def check_t(t) -> float:
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise InputError(f"t must lie in [0, 1], got {t}")
    return t


class Grouping:
    """A partition of ``0..n-1`` into named, nonempty groups."""

    def __init__(self, n: int, groups: Sequence[Iterable[int]], names: Optional[Sequence[str]] = None):
        blocks = [frozenset(int(x) for x in g) for g in groups]
        if names is None:
            names = [f"g{i}" for i in range(len(blocks))]
        if len(names) != len(blocks) or len(set(names)) != len(names):
            raise ValidationError("group names must be unique, one per group")
        if not blocks:
            raise ValidationError("at least one group is required")
        owner: dict[int, str] = {}
        for name, g in zip(names, blocks):
            if not g:
                raise ValidationError(f"group {name!r} is empty")
            for x in sorted(g):
                if not 0 <= x < n:
                    raise ValidationError(f"group {name!r} contains out-of-range element {x}")
                if x in owner:
                    raise ValidationError(
                        f"element {x} appears in both group {owner[x]!r} and group {name!r}")
                owner[x] = name
        missing = sorted(set(range(n)) - owner.keys())
        if missing:
            raise ValidationError(f"elements {missing} belong to no group")
        self.n = n
        self.groups = tuple(blocks)
        self.names = tuple(names)

    @classmethod
    def single(cls, n: int, name: str = "all") -> "Grouping":
        return cls(n, [range(n)], [name])

    def __len__(self):
        return len(self.groups)

    def __iter__(self):
        return iter(self.groups)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise InputError(f"unknown group {name!r}; known groups: {list(self.names)}") from None

    @property
    def smallest(self) -> frozenset:
        return min(self.groups, key=len)

    def __eq__(self, other):
        return (isinstance(other, Grouping) and self.n == other.n
                and self.groups == other.groups and self.names == other.names)

    def __repr__(self):
        return f"Grouping(n={self.n}, sizes={[len(g) for g in self.groups]})"


@dataclass(frozen=True)
class ActionabilityParams:
    t: float
    group: Optional[int] = None  # None: any group may witness the constraint

    def __post_init__(self):
        check_t(self.t)


@dataclass(frozen=True)
class GroupCapFamily:
    """Sets S of ``universe`` with |S & g| <= cap for at least one (g, cap) pair.

    Closed under taking subsets.  A negative cap excludes every set,
    including the empty one, for that pair.
    """

    universe: frozenset
    constraints: tuple  # ((group & universe, cap), ...)

    def __contains__(self, s) -> bool:
        return family_member(s, self)

    @classmethod
    def from_grouping(cls, grouping: Grouping, t, groups: Optional[Sequence[int]] = None) -> "GroupCapFamily":
        """The global family: no group may lose more than a (1 - t) share to S."""
        check_t(t)
        chosen = range(len(grouping)) if groups is None else groups
        pairs = tuple((grouping.groups[j], group_cap(t, len(grouping.groups[j]))) for j in chosen)
        return cls(frozenset(range(grouping.n)), pairs)

    def has_proper_member(self) -> bool:
        """Whether some nonempty S != universe belongs to the family."""
        if len(self.universe) < 2:
            return False
        for g, cap in self.constraints:
            if cap < 0:
                continue
            if self.universe - g or cap >= 1:
                return True
        return False

    def max_member_size(self) -> int:
        best = -1
        for g, cap in self.constraints:
            if cap >= 0:
                best = max(best, min(cap, len(g)) + len(self.universe - g))
        return best

    def relabel(self, mapping: dict) -> "GroupCapFamily":
        return GroupCapFamily(
            frozenset(mapping[x] for x in self.universe),
            tuple((frozenset(mapping[x] for x in g), cap) for g, cap in self.constraints),
        )


def family_member(s, family: GroupCapFamily) -> bool:
    s = s if isinstance(s, frozenset) else frozenset(s)
    return any(len(s & g) <= cap for g, cap in family.constraints)


def localized_family(w, group, grouping: Grouping, t) -> GroupCapFamily:
    """Family over block ``w``: subsets that leave at least ceil(t|g|) members of ``group`` in w."""
    w = frozenset(w)
    g = frozenset(group)
    cap = len(w & g) - required_count(t, len(g))
    return GroupCapFamily(w, ((w & g, cap),))


@dataclass(frozen=True)
class FeasibilityCertificate:
    group: int
    block: int
    fraction: float


class Partition:
    """An ordered list of nonempty, disjoint blocks covering ``0..n-1``."""

    def __init__(self, n: int, blocks: Iterable[Iterable[int]]):
        self.n = n
        self.blocks = tuple(frozenset(b) for b in blocks)
        problems = partition_problems(n, self.blocks)
        if problems:
            raise ValidationError("invalid partition: " + "; ".join(problems))

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def canonical(self) -> tuple:
        return tuple(sorted(lex_key(b) for b in self.blocks))

    def __eq__(self, other):
        return isinstance(other, Partition) and self.n == other.n and self.canonical() == other.canonical()

    def __hash__(self):
        return hash((self.n, self.canonical()))

    def __repr__(self):
        return f"Partition({[list(b) for b in self.canonical()]})"


def partition_problems(n: int, blocks: Sequence[Iterable[int]]) -> list[str]:
    """Human-readable reasons why ``blocks`` is not a partition of ``0..n-1``."""
    problems = []
    counts: dict[int, int] = {}
    for i, b in enumerate(blocks):
        b = list(b)
        if not b:
            problems.append(f"block {i} is empty")
        for x in b:
            counts[x] = counts.get(x, 0) + 1
    dup = sorted(x for x, c in counts.items() if c > 1)
    missing = sorted(set(range(n)) - counts.keys())
    extra = sorted(x for x in counts if not 0 <= x < n)
    if dup:
        problems.append(f"duplicated ids {dup}")
    if missing:
        problems.append(f"missing ids {missing}")
    if extra:
        problems.append(f"out-of-range ids {extra}")
    return problems


def is_feasible(partition: Partition, grouping: Grouping, t,
                groups: Optional[Sequence[int]] = None) -> Optional[FeasibilityCertificate]:
    """Witness that some block holds at least ceil(t|g|) members of some group.

    ``groups`` restricts which groups may serve as the witness.
    """
    chosen = range(len(grouping)) if groups is None else sorted(groups)
    for j in chosen:
        g = grouping.groups[j]
        need = required_count(t, len(g))
        for i, block in enumerate(partition.blocks):
            hit = len(block & g)
            if hit >= need:
                return FeasibilityCertificate(j, i, hit / len(g))
    return None


def max_k(grouping: Grouping, t) -> int:
    """Largest k for which a feasible k-partition exists."""
    n = grouping.n
    return min(n, n - required_count(t, len(grouping.smallest)) + 1)


def partition_cost(oracle: SubmodularOracle, partition: Partition) -> float:
    # fsum keeps the total independent of block order.
    return math.fsum(oracle(b) for b in partition.blocks)
