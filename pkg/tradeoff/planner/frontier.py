"""Cost frontiers over (memory, time) and the algebra the planner is built from

A frontier keeps only tuples that no other tuple beats in both memory and
time. ``product`` sums costs pairwise, ``union`` concatenates, and callers
always ``reduce`` the result back to a frontier.
"""

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import FrozenSet, Iterable, Iterator, List, Sequence, Tuple, Union

from ..utils.errors import OverlappingStrategies

Number = Union[int, float]
Assignment = Tuple[Tuple[int, int], ...]


@dataclass(frozen=True, eq=False)
class StrategyTuple:
    """A partial strategy with its cost.

    ``assignment`` holds the (op, config) pairs this tuple introduced itself;
    ``parents`` are the tuples it was summed from. The full strategy is the
    union over the provenance tree. Tuples compare and hash by identity.
    """

    memory: Number
    time: Number
    assignment: Assignment = ()
    parents: Tuple['StrategyTuple', ...] = ()

    @classmethod
    def leaf(cls, op_id: int, cfg: int, memory: Number, time: Number) -> 'StrategyTuple':
        return cls(memory=memory, time=time, assignment=((op_id, cfg),))

    @property
    def cost(self) -> Tuple[Number, Number]:
        return (self.memory, self.time)

    @cached_property
    def strategy(self) -> Assignment:
        """(op, config) pairs of the whole provenance tree, sorted by op id"""
        pairs = []
        stack = [self]
        while stack:
            node = stack.pop()
            # reuse subtrees that were already flattened
            cached = node.__dict__.get('strategy')
            if cached is not None and node is not self:
                pairs.extend(cached)
                continue
            pairs.extend(node.assignment)
            stack.extend(node.parents)
        return tuple(sorted(pairs))

    @cached_property
    def operators(self) -> FrozenSet[int]:
        return frozenset(op for op, _ in self.strategy)

    def __repr__(self) -> str:
        return f"StrategyTuple(memory={self.memory}, time={self.time}, strategy={list(self.strategy)})"


ZERO = StrategyTuple(memory=0, time=0)


def _cost_key(t: StrategyTuple) -> Tuple[Number, Number]:
    return (t.memory, t.time)


class Frontier(Sequence):
    """Tuples sorted by ascending memory and strictly descending time.

    Build one with ``reduce``; the constructor trusts its input.
    """

    __slots__ = ('tuples',)

    def __init__(self, tuples: Iterable[StrategyTuple] = ()):
        self.tuples: Tuple[StrategyTuple, ...] = tuple(tuples)

    def __getitem__(self, index):
        return self.tuples[index]

    def __len__(self) -> int:
        return len(self.tuples)

    def __iter__(self) -> Iterator[StrategyTuple]:
        return iter(self.tuples)

    def __repr__(self) -> str:
        return f"Frontier({self.costs()})"

    def costs(self) -> List[Tuple[Number, Number]]:
        return [t.cost for t in self.tuples]

    def min_time(self) -> StrategyTuple:
        """Fastest tuple (the last one)"""
        if not self.tuples:
            raise ValueError("empty frontier")
        return self.tuples[-1]

    def min_memory(self) -> StrategyTuple:
        """Smallest-memory tuple (the first one)"""
        if not self.tuples:
            raise ValueError("empty frontier")
        return self.tuples[0]


def reduce(candidates: Iterable[StrategyTuple]) -> Frontier:
    """Minimal non-dominated subset of ``candidates``.

    One sort by (memory, time), then a sweep keeping a tuple only if its time
    is strictly below every time kept so far. Of several tuples with the same
    (memory, time), the one with the smallest strategy survives.
    """
    ordered = sorted(candidates, key=_cost_key)
    kept = []
    best = math.inf
    for (_, time), group in itertools.groupby(ordered, key=_cost_key):
        if time >= best:
            continue
        group = list(group)
        kept.append(group[0] if len(group) == 1 else min(group, key=lambda t: t.strategy))
        best = time
    return Frontier(kept)


def product(f1: Iterable[StrategyTuple], f2: Iterable[StrategyTuple]) -> List[StrategyTuple]:
    """All pairwise sums; the two sides must assign disjoint operators"""
    left = list(f1)
    right = list(f2)
    # every tuple of a frontier covers the same operators, so one pair is enough
    if left and right:
        shared = left[0].operators & right[0].operators
        if shared:
            raise OverlappingStrategies(f"Both strategies assign operators {sorted(shared)}")
    return [
        StrategyTuple(memory=a.memory + b.memory, time=a.time + b.time, parents=(a, b))
        for a in left for b in right
    ]


def union(f1: Iterable[StrategyTuple], f2: Iterable[StrategyTuple]) -> List[StrategyTuple]:
    return list(f1) + list(f2)


def dominates(a: Tuple[Number, Number], b: Tuple[Number, Number]) -> bool:
    """Weak dominance on (memory, time)"""
    return a[0] <= b[0] and a[1] <= b[1]


def dominated_fraction(candidate: Iterable[StrategyTuple], reference: Iterable[StrategyTuple]) -> float:
    """Share of ``reference`` points weakly dominated by some ``candidate`` point.

    1.0 means ``candidate`` matches or beats the whole reference frontier.
    """
    reference_costs = [t.cost for t in reference]
    if not reference_costs:
        return 1.0
    candidate_costs = [t.cost for t in candidate]
    covered = sum(1 for r in reference_costs if any(dominates(c, r) for c in candidate_costs))
    return covered / len(reference_costs)
