"""Topological ordering, backbone marking and linearity checks

Every function accepts either a ComputationGraph or the networkx multigraph
the eliminations work on.
"""

import random
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import networkx as nx

from .models import ComputationGraph
from ..utils.errors import CycleDetected

GraphLike = Union[ComputationGraph, nx.MultiDiGraph]


@dataclass(frozen=True)
class LinearBackbone:
    """Operators on the linear chain that elimination must keep"""

    marked: Tuple[int, ...]

    def __contains__(self, op_id: int) -> bool:
        return op_id in self.marked

    def __len__(self) -> int:
        return len(self.marked)


def _as_nx(g: GraphLike) -> nx.MultiDiGraph:
    if isinstance(g, nx.MultiDiGraph):
        return g
    return g.to_networkx()


def topological_order(g: GraphLike) -> List[int]:
    """Topological order with ties broken by ascending operator id"""
    graph = _as_nx(g)
    try:
        return list(nx.lexicographical_topological_sort(graph))
    except nx.NetworkXUnfeasible as e:
        raise CycleDetected(f"Computation graph contains a cycle: {e}")


def mark_backbone(g: GraphLike, seed: Optional[int] = None) -> LinearBackbone:
    """Mark the first operator, then follow single-successor links.

    Without a seed the first operator is the smallest-id source; with a seed
    one of the sources is picked at random.
    """
    graph = _as_nx(g)
    order = topological_order(graph)
    if not order:
        return LinearBackbone(marked=())

    if seed is None:
        first = order[0]
    else:
        sources = sorted(n for n in graph.nodes if graph.in_degree(n) == 0)
        first = random.Random(seed).choice(sources)

    marked = [first]
    while True:
        downstream = sorted(set(graph.successors(marked[-1])))
        if len(downstream) != 1 or downstream[0] in marked:
            break
        marked.append(downstream[0])
    return LinearBackbone(marked=tuple(marked))


def is_linear(g: GraphLike) -> bool:
    """True iff the operators form a chain; parallel edges between neighbours are fine"""
    graph = _as_nx(g)
    try:
        order = topological_order(graph)
    except CycleDetected:
        return False
    position = {op: i for i, op in enumerate(order)}
    for u, v in graph.edges():
        if position[v] != position[u] + 1:
            return False
    return all(graph.has_edge(a, b) for a, b in zip(order, order[1:]))
