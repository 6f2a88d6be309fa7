"""Test graph eliminations"""

import pytest

from tradeoff.graph.topology import LinearBackbone, is_linear
from tradeoff.planner.eliminate import (
    ElimState, branch_eliminate, choose_config, edge_eliminate, heuristic_eliminate, node_eliminate,
    run_eliminations,
)
from tradeoff.planner.fixtures import gen_fixture
from tradeoff.planner.frontier import Frontier, StrategyTuple
from tradeoff.planner.oracle import brute_force
from tradeoff.planner.solver import ldp
from tradeoff.utils.errors import NotLinearizable, PreconditionViolated, SpaceExplosion


def _unmarked(st):
    st.backbone = LinearBackbone(marked=())
    return st


class TestNodeElimination:
    """Test folding an operator into an edge"""

    def test_fold_middle_operator(self, problem):
        """Test the new edge carries the frontier of the removed operator"""
        g, tables = problem([2, 2, 2], [(0, 1), (1, 2)], op_costs={(1, 0): (1, 4), (1, 1): (3, 1)})
        st = _unmarked(ElimState.from_tables(g, tables))
        node_eliminate(st, 1)

        assert sorted(st.graph.nodes) == [0, 2]
        assert st.edges == {2: (0, 2)}
        for w in range(2):
            for p in range(2):
                assert st.edge_frontier(2, w, p).costs() == [(1, 4), (3, 1)]
        record = st.log[-1]
        assert (record.kind, record.operators, record.edges, record.new_entity) == ('node', (1,), (0, 1), 2)
        assert st.counts() == {'node': 1, 'edge': 0, 'branch': 0, 'heuristic': 0}

    def test_keeps_frontier(self):
        """Test that the chain frontier is unchanged by the elimination"""
        g, tables = gen_fixture('chain', 4, 3, seed=5)
        st = ElimState.from_tables(g, tables)
        before = ldp(st).costs()
        node_eliminate(_unmarked(st), 2)
        assert ldp(st).costs() == before

    def test_backbone_operator_rejected(self, problem):
        """Test that marked operators stay"""
        g, tables = problem([2, 2, 2], [(0, 1), (1, 2)])
        st = ElimState.from_tables(g, tables)
        with pytest.raises(PreconditionViolated, match="backbone"):
            node_eliminate(st, 1)

    def test_wrong_degree_rejected(self, problem):
        """Test an operator with two outputs"""
        g, tables = problem([2, 2, 2], [(0, 1), (0, 2)])
        st = _unmarked(ElimState.from_tables(g, tables))
        with pytest.raises(PreconditionViolated, match="exactly one input and one output"):
            node_eliminate(st, 0)


class TestEdgeElimination:
    """Test merging parallel edges"""

    def test_merge(self, problem):
        """Test that the merged edge costs the sum of the parallel ones"""
        g, tables = problem([2, 2], [(0, 1), (0, 1)], edge_costs={(0, 0, 0): 1, (1, 0, 0): 2, (1, 1, 0): 4})
        st = ElimState.from_tables(g, tables)
        edge_eliminate(st, [1, 0])

        assert st.edges == {2: (0, 1)}
        assert st.edge_frontier(2, 0, 0).costs() == [(0, 3)]
        assert st.edge_frontier(2, 1, 0).costs() == [(0, 4)]
        assert st.edge_frontier(2, 1, 1).costs() == [(0, 0)]
        assert st.log[-1].edges == (0, 1)

    def test_needs_two_edges(self, problem):
        """Test a single edge"""
        g, tables = problem([2, 2], [(0, 1)])
        st = ElimState.from_tables(g, tables)
        with pytest.raises(PreconditionViolated):
            edge_eliminate(st, [0])

    def test_endpoints_must_match(self, problem):
        """Test edges between different operators"""
        g, tables = problem([2, 2, 2], [(0, 1), (1, 2)])
        st = ElimState.from_tables(g, tables)
        with pytest.raises(PreconditionViolated, match="same endpoints"):
            edge_eliminate(st, [0, 1])


class TestBranchElimination:
    """Test merging a leaf operator into its neighbour"""

    def test_composite_configs(self, problem):
        """Test the composite config space of the receiver"""
        g, tables = problem([2, 3, 2], [(0, 1), (0, 2)],
                            op_costs={(0, 1): (1, 1), (2, 1): (5, 0)}, edge_costs={(1, 0, 1): 7})
        st = ElimState.from_tables(g, tables)
        assert st.backbone.marked == (0,)
        branch_eliminate(st, 2, 0)

        assert st.config_counts[0] == 4
        assert 2 not in st.graph
        assert st.composite_spaces[0][3] == ((0, 1), (2, 1))
        assert st.expand(0, 2) == ((0, 1), (2, 0))
        # composite 1 = receiver config 0 with merged config 1 over the edge (0, 1)
        assert st.op_frontier(0, 1).costs() == [(5, 7)]
        # the remaining edge is re-indexed by composite config
        assert set(k for k in st.edge_frontiers if k[0] == 0) == {(0, c, d) for c in range(4) for d in range(3)}

    def test_exact_after_branch(self):
        """Test that the frontier survives the merge"""
        g, tables = gen_fixture('residual', 1, 2, seed=3)
        expected = brute_force(g, tables).costs()
        st = run_eliminations(ElimState.from_tables(g, tables), heuristics=False)
        assert st.counts()['branch'] >= 1
        assert ldp(st).costs() == expected

    def test_isolated_operator(self, problem):
        """Test that an operator without edges merges into the backbone head"""
        g, tables = problem([2, 2, 2], [(0, 1)],
                            op_costs={(0, 0): (1, 3), (1, 1): (2, 0), (2, 0): (0, 2), (2, 1): (2, 0)})
        st = run_eliminations(ElimState.from_tables(g, tables), heuristics=False)
        assert st.log[-1].kind == 'branch'
        assert st.log[-1].new_entity == 0
        assert ldp(st).costs() == brute_force(g, tables).costs()

    def test_other_neighbour_rejected(self, problem):
        """Test a receiver the operator is not connected to"""
        g, tables = problem([2, 2, 2], [(0, 1), (0, 2)])
        st = ElimState.from_tables(g, tables)
        with pytest.raises(PreconditionViolated):
            branch_eliminate(st, 1, 2)

    def test_cap(self, problem):
        """Test that oversized composite spaces are refused"""
        g, tables = problem([4, 2, 3], [(0, 1), (0, 2)])
        st = ElimState.from_tables(g, tables, composite_cap=8)
        with pytest.raises(SpaceExplosion):
            branch_eliminate(st, 2, 0)

    def test_cap_falls_back_to_heuristic(self, problem):
        """Test that the driver skips oversized merges instead of failing"""
        g, tables = problem([4, 2, 3], [(0, 1), (0, 2)])
        st = run_eliminations(ElimState.from_tables(g, tables, composite_cap=7))
        assert st.counts()['branch'] == 0
        assert st.counts()['heuristic'] == 1
        with pytest.raises(NotLinearizable):
            run_eliminations(ElimState.from_tables(g, tables, composite_cap=7), heuristics=False)


class TestHeuristicElimination:
    """Test fixing the configuration of an operator"""

    def test_choose_min_memory(self):
        """Test that the min-memory policy looks at each config's lightest tuple"""
        frontiers = [Frontier([StrategyTuple(3, 1)]), Frontier([StrategyTuple(1, 9)]), Frontier([StrategyTuple(1, 5)])]
        assert choose_config(frontiers) == 2

    def test_choose_weighted(self):
        """Test the weighted policy at both ends of alpha"""
        frontiers = [Frontier([StrategyTuple(3, 1)]), Frontier([StrategyTuple(1, 9)])]
        assert choose_config(frontiers, 'weighted', alpha=0.0) == 0
        assert choose_config(frontiers, 'weighted', alpha=1.0) == 1

    def test_unknown_policy(self):
        """Test policy validation"""
        with pytest.raises(ValueError):
            choose_config([Frontier([StrategyTuple(0, 0)])], 'random')

    def test_shared_input(self):
        """Test removing the shared mask of a chain"""
        g, tables = gen_fixture('shared-input', 3, 2, seed=1)
        st = ElimState.from_tables(g, tables)
        heuristic_eliminate(st, 3)

        assert 3 not in st.graph
        assert is_linear(st.graph)
        record = st.log[-1]
        assert record.kind == 'heuristic'
        assert record.new_entity == 1
        assert record.edges == (2, 3)

    def test_exact_only_fails(self):
        """Test that the shared-input graph needs a heuristic"""
        g, tables = gen_fixture('shared-input', 4, 2, seed=0)
        with pytest.raises(NotLinearizable):
            run_eliminations(ElimState.from_tables(g, tables), heuristics=False)

    def test_one_heuristic(self):
        """Test that the loop uses exactly one heuristic elimination"""
        g, tables = gen_fixture('shared-input', 5, 2, seed=0)
        st = run_eliminations(ElimState.from_tables(g, tables))
        assert st.counts()['heuristic'] == 1
        assert [r['kind'] for r in st.trace()][-1] == 'heuristic'


class TestState:
    """Test the working state"""

    def test_copy_is_independent(self, two_op_problem):
        """Test that eliminating on a copy leaves the original alone"""
        g, tables = two_op_problem
        st = ElimState.from_tables(g, tables)
        work = st.copy()
        work.remove_op(1)
        assert 1 in st.graph
        assert (1, 0) in st.op_frontiers
        assert st.config_counts == {0: 2, 1: 2}

    def test_trace_entries(self):
        """Test the shape of the elimination log"""
        g, tables = gen_fixture('residual', 2, 2, seed=0)
        st = run_eliminations(ElimState.from_tables(g, tables))
        entry = st.trace()[0]
        assert set(entry) == {'kind', 'eliminated', 'new_entity', 'records_count'}
        assert set(entry['eliminated']) == {'operators', 'edges'}

    def test_threads_do_not_change_result(self):
        """Test determinism across worker counts"""
        g, tables = gen_fixture('residual', 3, 3, seed=2)
        serial = run_eliminations(ElimState.from_tables(g, tables, threads=1))
        threaded = run_eliminations(ElimState.from_tables(g, tables, threads=4))
        assert serial.trace() == threaded.trace()
        assert ldp(serial).costs() == ldp(threaded).costs()
