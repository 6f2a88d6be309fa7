"""Tensor re-scheduling as a shortest path over tensor layouts

Nodes are the layouts (split states) of one tensor; an edge is a single
collective: an all-gather that unsplits one dimension, a local slice that
splits one dimension of a tensor the device already holds, or an all-to-all
that moves a split from one dimension to another.
"""

import functools
import heapq
import math
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from .collectives import all_gather_bytes, all_to_all_bytes, collective_time
from .configs import (
    UNSPLIT, DeviceMesh, ParallelConfig, TensorMap, check_tensor_map, enumerate_meshes,
    shard_shape,
)
from ..graph.models import DeviceGraph, Shape
from ..utils.errors import InvalidConfig, Unreachable


@dataclass(frozen=True)
class SplitState:
    """Layout of one tensor: a mesh plus a tensor map"""

    mesh: DeviceMesh
    tensor_map: TensorMap

    @property
    def is_replicated(self) -> bool:
        return self.tensor_map.is_replicated

    def sort_key(self) -> Tuple:
        return (not self.is_replicated, self.mesh.rank, self.mesh.dims, self.tensor_map.map)


def replicated_state(shape: Sequence[int], device_count: int) -> SplitState:
    return SplitState(DeviceMesh((device_count,)), TensorMap((UNSPLIT,) * len(shape)))


def canonical(state: SplitState, shape: Sequence[int]) -> SplitState:
    """Every fully replicated layout is the same state whatever its mesh"""
    if state.is_replicated:
        return replicated_state(shape, state.mesh.size)
    return state


def project_layout(shape: Sequence[int], config: ParallelConfig) -> SplitState:
    """Layout ``config`` implies for a tensor of ``shape``.

    The operator's output map is applied dimension by dimension; dimensions
    it cannot split evenly stay unsplit.
    """
    output_map = config.tensor_maps[-1].map
    mapped = []
    used = set()
    for dim, size in enumerate(shape):
        mesh_dim = output_map[dim] if dim < len(output_map) else UNSPLIT
        if (mesh_dim != UNSPLIT and mesh_dim not in used
                and size % config.mesh.dims[mesh_dim] == 0):
            mapped.append(mesh_dim)
            used.add(mesh_dim)
        else:
            mapped.append(UNSPLIT)
    return canonical(SplitState(config.mesh, TensorMap(tuple(mapped))), shape)


class Rescheduler:
    """Shortest re-scheduling times between layouts, cached per tensor shape and source"""

    def __init__(self, dev: DeviceGraph, dtype_bytes: int = 4, max_rank: int = 2,
                 interpolation: str = "linear", comm_scale: float = 1.0):
        self.dev = dev
        self.dtype_bytes = dtype_bytes
        self.max_rank = max_rank
        self.interpolation = interpolation
        self.comm_scale = comm_scale
        self._distances: Dict[Tuple[Shape, SplitState], Dict[SplitState, float]] = {}

    def _collective(self, group_size: int, nbytes) -> float:
        return self.comm_scale * collective_time(self.dev, group_size, nbytes, self.interpolation)

    def _shard_bytes(self, shape: Shape, state: SplitState) -> int:
        return math.prod(shard_shape(shape, state.mesh, state.tensor_map)) * self.dtype_bytes

    def neighbors(self, shape: Shape, state: SplitState) -> List[Tuple[SplitState, float]]:
        """States reachable with one collective, with its time"""
        result = []
        current = list(state.tensor_map.map)

        if state.is_replicated:
            meshes = enumerate_meshes(self.dev.device_count, self.max_rank)
        else:
            meshes = [state.mesh]
        # slice: a held dimension is split locally, no communication
        for mesh in meshes:
            base = current if not state.is_replicated else [UNSPLIT] * len(shape)
            used = {m for m in base if m != UNSPLIT}
            for dim in range(len(shape)):
                if base[dim] != UNSPLIT:
                    continue
                for mesh_dim in range(mesh.rank):
                    if mesh_dim in used or shape[dim] % mesh.dims[mesh_dim] != 0:
                        continue
                    new_map = list(base)
                    new_map[dim] = mesh_dim
                    result.append((SplitState(mesh, TensorMap(tuple(new_map))), 0.0))

        if state.is_replicated:
            return result

        shard = self._shard_bytes(shape, state)
        # gather one split dimension, or move its split to another dimension
        for dim, mesh_dim in enumerate(current):
            if mesh_dim == UNSPLIT:
                continue
            group = state.mesh.dims[mesh_dim]
            gathered = list(current)
            gathered[dim] = UNSPLIT
            target = canonical(SplitState(state.mesh, TensorMap(tuple(gathered))), shape)
            result.append((target, self._collective(group, all_gather_bytes(shard, group))))
            for other in range(len(shape)):
                if current[other] != UNSPLIT or shape[other] % group != 0:
                    continue
                moved = list(gathered)
                moved[other] = mesh_dim
                result.append((
                    SplitState(state.mesh, TensorMap(tuple(moved))),
                    self._collective(group, all_to_all_bytes(shard, group)),
                ))
        return result

    def distances_from(self, shape: Shape, source: SplitState) -> Dict[SplitState, float]:
        """Dijkstra from ``source``; equal-cost ties settle in state order"""
        key = (tuple(shape), source)
        if key in self._distances:
            return self._distances[key]

        dist = {source: 0.0}
        heap = [(0.0, source.sort_key(), source)]
        settled = set()
        while heap:
            cost, _, state = heapq.heappop(heap)
            if state in settled:
                continue
            settled.add(state)
            for neighbor, weight in self.neighbors(tuple(shape), state):
                candidate = cost + weight
                if candidate < dist.get(neighbor, math.inf):
                    dist[neighbor] = candidate
                    heapq.heappush(heap, (candidate, neighbor.sort_key(), neighbor))

        self._distances[key] = dist
        return dist

    def reschedule_time(self, src: SplitState, dst: SplitState, shape: Sequence[int]) -> float:
        shape = tuple(shape)
        for state in (src, dst):
            problems = check_tensor_map(shape, state.mesh, state.tensor_map)
            if problems:
                raise InvalidConfig("; ".join(problems))
        src, dst = canonical(src, shape), canonical(dst, shape)
        if src == dst:
            return 0.0
        dist = self.distances_from(shape, src)
        if dst not in dist:
            raise Unreachable(f"No collective sequence from {src} to {dst} for shape {list(shape)}")
        return dist[dst]


@functools.lru_cache(maxsize=32)
def _shared_rescheduler(dev: DeviceGraph, dtype_bytes: int, max_rank: int,
                        interpolation: str) -> Rescheduler:
    return Rescheduler(dev, dtype_bytes, max_rank, interpolation)


def reschedule_time(src: SplitState, dst: SplitState, tensor_shape: Sequence[int],
                    dev: DeviceGraph, dtype_bytes: int = 4, max_rank: int = 2,
                    interpolation: str = "linear") -> float:
    """Cheapest collective sequence turning layout ``src`` into ``dst``"""
    rescheduler = _shared_rescheduler(dev, dtype_bytes, max(max_rank, src.mesh.rank, dst.mesh.rank),
                                      interpolation)
    return rescheduler.reschedule_time(src, dst, tensor_shape)
