"""Data model for computation graphs and device graphs"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import networkx as nx

from ..utils.errors import MissingScheme

Shape = Tuple[int, ...]

INPUT_FLAG = "is_input"
OUTPUT_FLAG = "is_output"
VALID_FLAGS = (INPUT_FLAG, OUTPUT_FLAG)


@dataclass(frozen=True)
class Operator:
    """One node of the computation graph.

    The last entry of ``tensor_shapes`` is the operator's output tensor; the
    entries before it are parameter tensors.
    """

    id: int
    name: str
    tensor_shapes: Tuple[Shape, ...]
    flags: FrozenSet[str] = frozenset()

    @property
    def is_input(self) -> bool:
        return INPUT_FLAG in self.flags

    @property
    def is_output(self) -> bool:
        return OUTPUT_FLAG in self.flags

    @property
    def output_shape(self) -> Shape:
        return self.tensor_shapes[-1]

    @property
    def parameter_shapes(self) -> Tuple[Shape, ...]:
        return self.tensor_shapes[:-1]


@dataclass(frozen=True)
class Edge:
    """A tensor flowing from ``src`` to ``dst``. Parallel edges are allowed."""

    id: int
    src: int
    dst: int
    tensor_shape: Shape


class ComputationGraph:
    """Operators plus tensor-flow edges; read-only after construction"""

    def __init__(self, operators: Iterable[Operator] = (), edges: Iterable[Edge] = ()):
        self.operators: Tuple[Operator, ...] = tuple(sorted(operators, key=lambda o: o.id))
        self.edges: Tuple[Edge, ...] = tuple(sorted(edges, key=lambda e: e.id))
        self._ops: Dict[int, Operator] = {op.id: op for op in self.operators}
        self._edges: Dict[int, Edge] = {e.id: e for e in self.edges}
        self._out: Dict[int, List[Edge]] = {op.id: [] for op in self.operators}
        self._in: Dict[int, List[Edge]] = {op.id: [] for op in self.operators}
        for edge in self.edges:
            self._out.setdefault(edge.src, []).append(edge)
            self._in.setdefault(edge.dst, []).append(edge)

    def __len__(self) -> int:
        return len(self.operators)

    def __repr__(self) -> str:
        return f"ComputationGraph(operators={len(self.operators)}, edges={len(self.edges)})"

    @property
    def op_ids(self) -> List[int]:
        return [op.id for op in self.operators]

    def operator(self, op_id: int) -> Operator:
        return self._ops[op_id]

    def edge(self, edge_id: int) -> Edge:
        return self._edges[edge_id]

    def out_edges(self, op_id: int) -> List[Edge]:
        return list(self._out.get(op_id, []))

    def in_edges(self, op_id: int) -> List[Edge]:
        return list(self._in.get(op_id, []))

    def successors(self, op_id: int) -> List[int]:
        return sorted({e.dst for e in self._out.get(op_id, [])})

    def predecessors(self, op_id: int) -> List[int]:
        return sorted({e.src for e in self._in.get(op_id, [])})

    def to_networkx(self) -> nx.MultiDiGraph:
        """Multigraph view keyed by edge id"""
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(self.op_ids)
        for edge in self.edges:
            graph.add_edge(edge.src, edge.dst, key=edge.id)
        return graph


@dataclass(frozen=True)
class BandwidthProfile:
    """Measured collective bandwidth at message sizes of 2**log2_bytes"""

    points: Tuple[Tuple[int, float], ...]
    latency: float = 0.0

    def __post_init__(self):
        if not self.points:
            raise ValueError("bandwidth profile needs at least one point")
        sizes = [p[0] for p in self.points]
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError("profile log2_bytes must be strictly increasing")
        if any(p[0] < 0 for p in self.points):
            raise ValueError("profile log2_bytes must be non-negative")
        if any(not p[1] > 0 for p in self.points):
            raise ValueError("profile bandwidths must be positive")
        if self.latency < 0:
            raise ValueError("latency must be non-negative")

    @property
    def max_log2_bytes(self) -> int:
        return self.points[-1][0]

    @property
    def max_bytes(self) -> int:
        return 2 ** self.max_log2_bytes


@dataclass(frozen=True)
class PartitionScheme:
    """A way of splitting the devices into equally sized collective groups"""

    id: str
    group_sizes: Tuple[int, ...]
    profile: BandwidthProfile

    @property
    def group_size(self) -> Optional[int]:
        sizes = set(self.group_sizes)
        return self.group_sizes[0] if len(sizes) == 1 else None


@dataclass(frozen=True)
class DeviceGraph:
    device_count: int
    schemes: Tuple[PartitionScheme, ...] = ()
    groups: Tuple[Tuple[str, Tuple[int, ...]], ...] = field(default=())

    def __post_init__(self):
        if self.device_count < 1:
            raise ValueError("device_count must be >= 1")

    @property
    def bandwidth_profiles(self) -> Dict[str, BandwidthProfile]:
        return {s.id: s.profile for s in self.schemes}

    @property
    def latency(self) -> Dict[str, float]:
        return {s.id: s.profile.latency for s in self.schemes}

    def scheme(self, scheme_id: str) -> PartitionScheme:
        for scheme in self.schemes:
            if scheme.id == scheme_id:
                return scheme
        raise MissingScheme(f"Unknown partition scheme: {scheme_id}")

    def scheme_for_group(self, group_size: int) -> PartitionScheme:
        """First scheme whose groups all have ``group_size`` devices"""
        for scheme in self.schemes:
            if scheme.group_size == group_size:
                return scheme
        raise MissingScheme(f"No partition scheme with group size {group_size} "
                            f"for {self.device_count} devices")

    def resized(self, device_count: int) -> 'DeviceGraph':
        """Device graph for another device count reusing this graph's profiles.

        Each group size that divides the new count takes the profile of the
        scheme with the same group size, else the largest smaller one, else
        the smallest available.
        """
        by_size = sorted(
            ((s.group_size, s) for s in self.schemes if s.group_size is not None),
            key=lambda pair: pair[0],
        )
        if not by_size:
            return default_device_graph(device_count)
        schemes = []
        for size in _group_sizes(device_count):
            fitting = [g for g, _ in by_size if g <= size]
            best = fitting[-1] if fitting else by_size[0][0]
            template = next(s for g, s in by_size if g == best)
            schemes.append(PartitionScheme(
                id=f"g{size}",
                group_sizes=(size,) * (device_count // size),
                profile=template.profile,
            ))
        return DeviceGraph(device_count=device_count, schemes=tuple(schemes))


def _group_sizes(device_count: int) -> List[int]:
    return [g for g in range(2, device_count + 1) if device_count % g == 0]


def saturating_profile(peak_bandwidth: float = 10e9, half_size: float = 2 ** 20,
                       latency: float = 5e-6, max_log2: int = 40) -> BandwidthProfile:
    """Synthetic profile: bandwidth rises towards ``peak_bandwidth`` with message size"""
    points = tuple(
        (i, peak_bandwidth * (2 ** i) / (2 ** i + half_size)) for i in range(max_log2 + 1)
    )
    return BandwidthProfile(points=points, latency=latency)


def default_device_graph(device_count: int, profile: Optional[BandwidthProfile] = None) -> DeviceGraph:
    """Device graph with one scheme per divisor group size, all sharing one profile"""
    profile = profile or saturating_profile()
    schemes = tuple(
        PartitionScheme(id=f"g{size}", group_sizes=(size,) * (device_count // size), profile=profile)
        for size in _group_sizes(device_count)
    )
    return DeviceGraph(device_count=device_count, schemes=schemes)
