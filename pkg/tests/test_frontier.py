"""Test the frontier algebra"""

import pytest
from hypothesis import given, settings
from hypothesis.strategies import integers, lists, tuples

from tradeoff.planner.frontier import (
    ZERO, Frontier, StrategyTuple, dominated_fraction, dominates, product, reduce, union,
)
from tradeoff.planner.oracle import pairwise_frontier
from tradeoff.utils.errors import OverlappingStrategies

costs = lists(tuples(integers(0, 50), integers(0, 50)), max_size=40)
small_costs = lists(tuples(integers(0, 50), integers(0, 50)), max_size=12)


def _leaves(points, op_id=0):
    """One tuple per point, config index = position"""
    return [StrategyTuple.leaf(op_id, i, m, t) for i, (m, t) in enumerate(points)]


def _view(tuples):
    return [(t.cost, t.strategy) for t in tuples]


class TestReduce:
    """Test the frontier reduction"""

    def test_empty(self):
        """Test reducing nothing"""
        assert len(reduce([])) == 0

    def test_drops_dominated(self):
        """Test a small hand-checked case"""
        f = reduce(_leaves([(3, 3), (1, 5), (2, 5), (4, 1), (3, 2), (5, 1)]))
        assert f.costs() == [(1, 5), (3, 2), (4, 1)]

    def test_ties_keep_smallest_strategy(self):
        """Test that equal costs keep the lexicographically smallest strategy"""
        a = StrategyTuple.leaf(0, 2, 1, 1)
        b = StrategyTuple.leaf(0, 1, 1, 1)
        f = reduce([a, b])
        assert len(f) == 1
        assert f[0] is b

    def test_min_time_and_memory(self):
        """Test the ends of a frontier"""
        f = reduce(_leaves([(1, 5), (4, 1), (3, 2)]))
        assert f.min_memory().cost == (1, 5)
        assert f.min_time().cost == (4, 1)

    def test_empty_ends(self):
        """Test that an empty frontier has no ends"""
        with pytest.raises(ValueError):
            Frontier().min_time()
        with pytest.raises(ValueError):
            Frontier().min_memory()

    @settings(max_examples=200, deadline=None)
    @given(costs)
    def test_matches_pairwise(self, points):
        """Test the sort-and-sweep against the quadratic filter"""
        leaves = _leaves(points)
        assert _view(reduce(leaves)) == _view(pairwise_frontier(leaves))

    @settings(max_examples=100, deadline=None)
    @given(costs)
    def test_sorted_and_non_dominated(self, points):
        """Test memory strictly up and time strictly down"""
        f = reduce(_leaves(points))
        for a, b in zip(f, f[1:]):
            assert a.memory < b.memory
            assert a.time > b.time

    @settings(max_examples=100, deadline=None)
    @given(costs)
    def test_idempotent(self, points):
        """Test that reducing a frontier changes nothing"""
        once = reduce(_leaves(points))
        assert _view(reduce(once)) == _view(once)


class TestProductAndUnion:
    """Test combining frontiers"""

    def test_product_sums_costs(self):
        """Test pairwise sums and their provenance"""
        left = _leaves([(1, 4), (3, 1)], op_id=0)
        right = _leaves([(2, 2)], op_id=1)
        combined = product(left, right)
        assert [t.cost for t in combined] == [(3, 6), (5, 3)]
        assert combined[1].strategy == ((0, 1), (1, 0))
        assert combined[1].operators == frozenset({0, 1})

    def test_product_overlap(self):
        """Test that two strategies for one operator cannot be added"""
        with pytest.raises(OverlappingStrategies):
            product(_leaves([(1, 1)], op_id=3), _leaves([(2, 2)], op_id=3))

    def test_product_with_zero(self):
        """Test the neutral tuple"""
        left = _leaves([(1, 4)])
        assert [t.cost for t in product(left, [ZERO])] == [(1, 4)]

    def test_product_with_empty(self):
        """Test that an empty side gives nothing"""
        assert product(_leaves([(1, 1)]), []) == []

    @settings(max_examples=100, deadline=None)
    @given(costs, costs)
    def test_product_distributes_over_reduce(self, a, b):
        """Test that reducing the inputs first gives the same frontier"""
        left, right = _leaves(a, op_id=0), _leaves(b, op_id=1)
        full = reduce(product(left, right))
        early = reduce(product(reduce(left), reduce(right)))
        assert full.costs() == early.costs()

    @settings(max_examples=100, deadline=None)
    @given(costs, costs, costs)
    def test_union_associative(self, a, b, c):
        """Test that grouping unions differently gives the same frontier"""
        fa, fb, fc = _leaves(a, 0), _leaves(b, 1), _leaves(c, 2)
        one = reduce(union(reduce(union(fa, fb)), fc))
        two = reduce(union(fa, reduce(union(fb, fc))))
        assert _view(one) == _view(two)

    @settings(max_examples=100, deadline=None)
    @given(small_costs, small_costs, small_costs)
    def test_product_associative(self, a, b, c):
        """Test that grouping products differently gives the same frontier"""
        fa, fb, fc = _leaves(a, 0), _leaves(b, 1), _leaves(c, 2)
        one = reduce(product(fa, product(fb, fc)))
        two = reduce(product(product(fa, fb), fc))
        assert _view(one) == _view(two)

    def test_deep_provenance(self):
        """Test that strategies of long sums are collected without recursion"""
        total = ZERO
        for op_id in range(3000):
            total = product([total], [StrategyTuple.leaf(op_id, op_id % 3, 1, 1)])[0]
        assert total.cost == (3000, 3000)
        assert len(total.strategy) == 3000
        assert total.strategy[5] == (5, 2)


class TestDominance:
    """Test dominance helpers"""

    def test_dominates(self):
        """Test weak dominance"""
        assert dominates((1, 1), (1, 1))
        assert dominates((1, 1), (2, 1))
        assert not dominates((1, 2), (2, 1))

    def test_dominated_fraction(self):
        """Test coverage of a reference frontier"""
        reference = _leaves([(1, 5), (3, 2), (4, 1)])
        assert dominated_fraction(reference, reference) == 1.0
        assert dominated_fraction(_leaves([(1, 5)]), reference) == pytest.approx(1 / 3)
        assert dominated_fraction([], []) == 1.0
