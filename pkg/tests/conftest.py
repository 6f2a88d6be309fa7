"""Pytest configuration and fixtures"""

import os

import pytest
import yaml

from tradeoff.graph.models import ComputationGraph, Edge, Operator
from tradeoff.planner.costmodel import CostTables, EdgeCost, OperatorCost
from tradeoff.utils.config import CONFIG_FILE, create_default_config


@pytest.fixture(autouse=True)
def clear_config_cache(monkeypatch):
    """Every test starts without a cached configuration"""
    monkeypatch.setattr('tradeoff.utils.config._cached_config', None)


@pytest.fixture
def temp_config(tmp_path):
    """Write a default tradeoff.yaml into a temporary working directory"""
    config = create_default_config()
    config_path = tmp_path / CONFIG_FILE
    with open(config_path, 'w') as f:
        yaml.dump(config, f)

    original_cwd = os.getcwd()
    os.chdir(tmp_path)

    yield config_path

    os.chdir(original_cwd)


@pytest.fixture
def in_tmp_dir(tmp_path):
    """Run the test from an empty temporary directory"""
    original_cwd = os.getcwd()
    os.chdir(tmp_path)
    yield tmp_path
    os.chdir(original_cwd)


def build_problem(ks, edges, op_costs=None, edge_costs=None, shape=(8, 8)):
    """Graph plus cost tables from plain values.

    ``ks`` gives the config count per operator (ids 0..n-1), ``edges`` the
    (src, dst) pairs (edge ids in list order), ``op_costs`` maps
    (op, cfg) -> (memory, time) and ``edge_costs`` maps (edge, s, d) -> time.
    Missing entries cost nothing.
    """
    op_costs = op_costs or {}
    edge_costs = edge_costs or {}
    operators = [Operator(id=i, name=f"op{i}", tensor_shapes=(shape,)) for i in range(len(ks))]
    graph_edges = [Edge(id=i, src=s, dst=d, tensor_shape=shape) for i, (s, d) in enumerate(edges)]
    g = ComputationGraph(operators, graph_edges)

    ops = {}
    for op_id, k_count in enumerate(ks):
        for cfg in range(k_count):
            memory, time = op_costs.get((op_id, cfg), (0, 0))
            ops[(op_id, cfg)] = OperatorCost(mem_param=memory, time_compute=time)
    transfers = {}
    for edge in graph_edges:
        for s in range(ks[edge.src]):
            for d in range(ks[edge.dst]):
                transfers[(edge.id, s, d)] = EdgeCost(edge_costs.get((edge.id, s, d), 0))
    return g, CostTables(op_costs=ops, edge_costs=transfers)


@pytest.fixture
def problem():
    """Factory building (graph, cost tables) from plain values"""
    return build_problem


@pytest.fixture
def two_op_problem():
    """Two operators with two configs each and a hand-checked frontier of (2, 8), (5, 3)"""
    return build_problem(
        [2, 2], [(0, 1)],
        op_costs={(0, 0): (1, 4), (0, 1): (3, 1), (1, 0): (1, 4), (1, 1): (2, 2)},
        edge_costs={(0, 0, 1): 5, (0, 1, 0): 5},
    )


@pytest.fixture
def graph_doc():
    """A valid three-operator graph document"""
    return {
        'operators': [
            {'id': 0, 'name': 'embed', 'tensor_shapes': [[16, 16], [16, 16]], 'flags': ['is_input']},
            {'id': 1, 'name': 'matmul', 'tensor_shapes': [[16, 16], [16, 16]]},
            {'id': 2, 'name': 'loss', 'tensor_shapes': [[16, 16]], 'flags': ['is_output']},
        ],
        'edges': [
            {'id': 0, 'src': 0, 'dst': 1, 'tensor_shape': [16, 16]},
            {'id': 1, 'src': 1, 'dst': 2, 'tensor_shape': [16, 16]},
        ],
    }


@pytest.fixture
def device_doc():
    """Four devices with profiles for groups of two and four"""
    profile = [{'log2_bytes': i, 'bandwidth_bytes_per_s': 1e9 * (i + 1)} for i in range(0, 31)]
    return {
        'device_count': 4,
        'schemes': [
            {'id': 'pairs', 'group_sizes': [2, 2], 'latency_s': 1e-5, 'profile': profile},
            {'id': 'all', 'group_sizes': [4], 'latency_s': 2e-5, 'profile': profile},
        ],
    }
