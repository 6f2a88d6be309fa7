"""Test graph models, ordering and backbone marking"""

import networkx as nx
import pytest

from tradeoff.graph.models import (
    BandwidthProfile, ComputationGraph, DeviceGraph, Edge, Operator, PartitionScheme,
    default_device_graph, saturating_profile,
)
from tradeoff.graph.topology import is_linear, mark_backbone, topological_order
from tradeoff.planner.fixtures import chain_graph, residual_graph, shared_input_graph
from tradeoff.utils.errors import CycleDetected, MissingScheme


def _graph(n, edges):
    ops = [Operator(id=i, name=f"op{i}", tensor_shapes=((4,),)) for i in range(n)]
    return ComputationGraph(ops, [Edge(id=i, src=s, dst=d, tensor_shape=(4,)) for i, (s, d) in enumerate(edges)])


class TestComputationGraph:
    """Test the computation graph model"""

    def test_adjacency(self):
        """Test edge lookups and neighbour lists"""
        g = _graph(3, [(0, 1), (0, 2), (1, 2)])
        assert g.op_ids == [0, 1, 2]
        assert [e.id for e in g.out_edges(0)] == [0, 1]
        assert g.successors(0) == [1, 2]
        assert g.predecessors(2) == [0, 1]
        assert g.edge(2).src == 1

    def test_to_networkx_keeps_parallel_edges(self):
        """Test the multigraph view"""
        g = _graph(2, [(0, 1), (0, 1)])
        graph = g.to_networkx()
        assert isinstance(graph, nx.MultiDiGraph)
        assert sorted(k for _, _, k in graph.edges(keys=True)) == [0, 1]

    def test_operator_shapes(self):
        """Test output and parameter shapes"""
        op = Operator(id=0, name="mm", tensor_shapes=((8, 4), (4,), (16, 4)), flags=frozenset({'is_input'}))
        assert op.output_shape == (16, 4)
        assert op.parameter_shapes == ((8, 4), (4,))
        assert op.is_input and not op.is_output


class TestDeviceGraph:
    """Test device graphs and bandwidth profiles"""

    def test_profile_must_increase(self):
        """Test profile validation"""
        with pytest.raises(ValueError, match="strictly increasing"):
            BandwidthProfile(points=((2, 1.0), (1, 2.0)))
        with pytest.raises(ValueError, match="positive"):
            BandwidthProfile(points=((0, 0.0),))

    def test_scheme_for_group(self):
        """Test scheme lookup by group size"""
        dev = default_device_graph(8)
        assert [s.id for s in dev.schemes] == ['g2', 'g4', 'g8']
        assert dev.scheme_for_group(4).group_sizes == (4, 4)
        with pytest.raises(MissingScheme, match="group size 3"):
            dev.scheme_for_group(3)

    def test_resized_reuses_profiles(self):
        """Test deriving a device graph for another count"""
        slow = BandwidthProfile(points=((0, 1.0), (10, 2.0)))
        fast = BandwidthProfile(points=((0, 5.0), (10, 9.0)))
        dev = DeviceGraph(device_count=4, schemes=(
            PartitionScheme('pairs', (2, 2), slow),
            PartitionScheme('all', (4,), fast),
        ))
        bigger = dev.resized(8)
        assert bigger.device_count == 8
        assert bigger.scheme_for_group(2).profile == slow
        assert bigger.scheme_for_group(8).profile == fast

    def test_resized_with_equal_group_sizes(self):
        """Test a template with two schemes of the same group size"""
        intra = BandwidthProfile(points=((0, 5.0), (10, 9.0)))
        inter = BandwidthProfile(points=((0, 1.0), (10, 2.0)))
        dev = DeviceGraph(device_count=8, schemes=(
            PartitionScheme('intra', (2, 2, 2, 2), intra),
            PartitionScheme('inter', (2, 2, 2, 2), inter),
        ))
        smaller = dev.resized(4)
        assert [s.id for s in smaller.schemes] == ['g2', 'g4']
        assert smaller.scheme_for_group(2).profile == intra
        assert smaller.scheme_for_group(4).profile == intra

    def test_saturating_profile(self):
        """Test that the synthetic bandwidth grows with message size"""
        profile = saturating_profile(max_log2=20)
        bandwidths = [bw for _, bw in profile.points]
        assert bandwidths == sorted(bandwidths)
        assert profile.max_bytes == 2 ** 20


class TestOrdering:
    """Test topological order, linearity and backbone marking"""

    def test_ties_by_id(self):
        """Test that unordered operators come out by ascending id"""
        g = _graph(4, [(3, 1), (0, 2)])
        assert topological_order(g) == [0, 2, 3, 1]

    def test_cycle_detected(self):
        """Test cyclic input"""
        graph = nx.MultiDiGraph()
        graph.add_edge(0, 1, key=0)
        graph.add_edge(1, 0, key=1)
        with pytest.raises(CycleDetected):
            topological_order(graph)

    def test_is_linear(self):
        """Test chain detection"""
        assert is_linear(chain_graph(4))
        assert is_linear(_graph(2, [(0, 1), (0, 1)]))
        assert is_linear(_graph(1, []))
        assert not is_linear(_graph(3, [(0, 1), (0, 2), (1, 2)]))
        assert not is_linear(_graph(3, [(0, 1)]))

    def test_backbone_of_chain(self):
        """Test that a chain is its own backbone"""
        backbone = mark_backbone(chain_graph(5))
        assert backbone.marked == (0, 1, 2, 3, 4)

    def test_backbone_stops_at_fork(self):
        """Test that marking stops where an operator has two successors"""
        g = residual_graph(1)
        assert mark_backbone(g).marked == (0,)

    def test_backbone_of_shared_input(self):
        """Test that the mask is left off the backbone"""
        g = shared_input_graph(4)
        backbone = mark_backbone(g)
        assert backbone.marked == (0, 1, 2, 3)
        assert 4 not in backbone

    def test_seeded_backbone_starts_at_a_source(self):
        """Test that a seed picks one of the source operators"""
        g = shared_input_graph(3)
        for seed in range(5):
            assert mark_backbone(g, seed).marked[0] in (0, 3)

    def test_empty_graph(self):
        """Test marking an empty graph"""
        assert len(mark_backbone(ComputationGraph())) == 0
