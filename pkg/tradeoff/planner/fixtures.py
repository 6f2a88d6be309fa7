"""Seeded synthetic graphs with integer cost tables

- ``chain``: n operators in a line.
- ``residual``: a stem followed by n blocks alternating between a diamond
  (two parallel arms) and a skip connection, ending in a loss that also
  reads a label input. Exact eliminations suffice.
- ``shared-input``: a chain plus one mask input feeding every chain operator
  after the first, which takes exactly one heuristic elimination.
"""

import logging
from typing import List, Tuple

import numpy as np

from .costmodel import CostTables, EdgeCost, OperatorCost
from ..graph.models import ComputationGraph, Edge, Operator

logger = logging.getLogger(__name__)

KINDS = ('chain', 'residual', 'shared-input')
MAX_COST = 100
TENSOR = (64, 64)


class _Builder:
    def __init__(self):
        self.operators: List[Operator] = []
        self.edges: List[Edge] = []

    def op(self, name: str, flags=()) -> int:
        op_id = len(self.operators)
        self.operators.append(Operator(id=op_id, name=name, tensor_shapes=(TENSOR, TENSOR),
                                       flags=frozenset(flags)))
        return op_id

    def edge(self, src: int, dst: int) -> None:
        self.edges.append(Edge(id=len(self.edges), src=src, dst=dst, tensor_shape=TENSOR))

    def graph(self) -> ComputationGraph:
        return ComputationGraph(self.operators, self.edges)


def chain_graph(n: int) -> ComputationGraph:
    b = _Builder()
    previous = None
    for i in range(n):
        flags = ['is_input'] if i == 0 else []
        if i == n - 1:
            flags.append('is_output')
        current = b.op(f"layer{i}", flags)
        if previous is not None:
            b.edge(previous, current)
        previous = current
    return b.graph()


def residual_graph(blocks: int) -> ComputationGraph:
    b = _Builder()
    tail = b.op("stem", ['is_input'])
    for i in range(blocks):
        if i % 2 == 0:
            left, right = b.op(f"block{i}_left"), b.op(f"block{i}_right")
            join = b.op(f"block{i}_add")
            for arm in (left, right):
                b.edge(tail, arm)
                b.edge(arm, join)
        else:
            body = b.op(f"block{i}_body")
            join = b.op(f"block{i}_add")
            b.edge(tail, body)
            b.edge(body, join)
            b.edge(tail, join)
        tail = join
    loss = b.op("loss", ['is_output'])
    label = b.op("label", ['is_input'])
    b.edge(tail, loss)
    b.edge(label, loss)
    return b.graph()


def shared_input_graph(n: int) -> ComputationGraph:
    """Chain of max(n, 3) operators so the mask always has two or more consumers"""
    length = max(n, 3)
    b = _Builder()
    layers = []
    for i in range(length):
        flags = ['is_input'] if i == 0 else []
        if i == length - 1:
            flags.append('is_output')
        layers.append(b.op(f"layer{i}", flags))
        if i:
            b.edge(layers[i - 1], layers[i])
    mask = b.op("mask", ['is_input'])
    for layer in layers[1:]:
        b.edge(mask, layer)
    return b.graph()


def random_tables(g: ComputationGraph, k: int, rng: np.random.Generator) -> CostTables:
    """Integer costs: operator memory and time each in [0, 100], edge time in [0, 100]"""
    half = MAX_COST // 2
    op_costs = {}
    for op in g.operators:
        values = rng.integers(0, half + 1, size=(k, 4))
        for cfg, (m_p, m_t, t_c, t_s) in enumerate(values.tolist()):
            op_costs[(op.id, cfg)] = OperatorCost(m_p, m_t, t_c, t_s)
    edge_costs = {}
    for e in g.edges:
        values = rng.integers(0, MAX_COST + 1, size=(k, k))
        for s, row in enumerate(values.tolist()):
            for d, t_x in enumerate(row):
                edge_costs[(e.id, s, d)] = EdgeCost(t_x)
    return CostTables(op_costs=op_costs, edge_costs=edge_costs)


def gen_fixture(kind: str, n: int, k: int, seed: int = 0) -> Tuple[ComputationGraph, CostTables]:
    """Deterministic graph and cost tables for ``kind``"""
    if kind not in KINDS:
        raise ValueError(f"Unknown fixture kind '{kind}'; use one of {KINDS}")
    if n < 1 or k < 1:
        raise ValueError("n and k must be >= 1")
    builders = {'chain': chain_graph, 'residual': residual_graph, 'shared-input': shared_input_graph}
    g = builders[kind](n)
    tables = random_tables(g, k, np.random.default_rng(seed))
    logger.debug("Fixture %s n=%d k=%d seed=%d: %s", kind, n, k, seed, g)
    return g, tables
