"""Enumeration of parallelization configurations (device mesh + tensor maps)"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Sequence, Tuple

from ..graph.models import ComputationGraph, Operator, Shape
from ..utils.errors import InvalidConfig

logger = logging.getLogger(__name__)

UNSPLIT = -1


@dataclass(frozen=True)
class DeviceMesh:
    """Logical arrangement of devices, e.g. (2, 2) for four devices"""

    dims: Tuple[int, ...]

    @property
    def size(self) -> int:
        return math.prod(self.dims)

    @property
    def rank(self) -> int:
        return len(self.dims)


@dataclass(frozen=True)
class TensorMap:
    """Per tensor dimension: the mesh dimension it is split over, or -1"""

    map: Tuple[int, ...]

    @property
    def mesh_dims(self) -> FrozenSet[int]:
        return frozenset(m for m in self.map if m != UNSPLIT)

    @property
    def is_replicated(self) -> bool:
        return all(m == UNSPLIT for m in self.map)


@dataclass(frozen=True)
class ParallelConfig:
    mesh: DeviceMesh
    tensor_maps: Tuple[TensorMap, ...]

    @property
    def replicated_mesh_dims(self) -> FrozenSet[int]:
        """Mesh dimensions no tensor is split over (redundant computation)"""
        used = set()
        for tensor_map in self.tensor_maps:
            used |= tensor_map.mesh_dims
        return frozenset(range(self.mesh.rank)) - used

    @property
    def is_replicated(self) -> bool:
        return all(m.is_replicated for m in self.tensor_maps)

    def to_dict(self) -> Dict[str, list]:
        return {
            'mesh': list(self.mesh.dims),
            'tensor_maps': [list(m.map) for m in self.tensor_maps],
        }


@dataclass(frozen=True)
class ConfigSpace:
    """Ordered valid configurations for every operator"""

    configs: Dict[int, Tuple[ParallelConfig, ...]]

    def __getitem__(self, op_id: int) -> Tuple[ParallelConfig, ...]:
        return self.configs[op_id]

    def size(self, op_id: int) -> int:
        return len(self.configs[op_id])

    def total_strategies(self) -> int:
        return math.prod(len(c) for c in self.configs.values())


def _ordered_factorizations(n: int, max_parts: int) -> List[Tuple[int, ...]]:
    if max_parts == 0:
        return []
    result = []
    if n >= 2:
        result.append((n,))
    if max_parts > 1:
        for first in range(2, n):
            if n % first == 0:
                for rest in _ordered_factorizations(n // first, max_parts - 1):
                    result.append((first,) + rest)
    return result


def enumerate_meshes(device_count: int, max_rank: int = 2) -> List[DeviceMesh]:
    """All ordered factorizations of ``device_count`` into at most ``max_rank`` factors >= 2.

    The one-dimensional mesh always comes first; a single device gives [1].
    """
    if device_count < 1:
        raise ValueError("device_count must be >= 1")
    if device_count == 1:
        return [DeviceMesh((1,))]
    dims = _ordered_factorizations(device_count, max(1, max_rank))
    return [DeviceMesh(d) for d in sorted(set(dims), key=lambda d: (len(d), d))]


def check_tensor_map(shape: Sequence[int], mesh: DeviceMesh, tensor_map: TensorMap) -> List[str]:
    """Reasons a tensor map is invalid for a shape on a mesh (empty when valid)"""
    problems = []
    if len(tensor_map.map) != len(shape):
        return [f"map {list(tensor_map.map)} does not match rank of shape {list(shape)}"]
    used = [m for m in tensor_map.map if m != UNSPLIT]
    if len(used) != len(set(used)):
        problems.append(f"mesh dimension used twice in map {list(tensor_map.map)}")
    for dim, mesh_dim in enumerate(tensor_map.map):
        if mesh_dim == UNSPLIT:
            continue
        if not 0 <= mesh_dim < mesh.rank:
            problems.append(f"mesh dimension {mesh_dim} out of range for mesh {list(mesh.dims)}")
        elif shape[dim] % mesh.dims[mesh_dim] != 0:
            problems.append(f"dimension {dim} of size {shape[dim]} not divisible by {mesh.dims[mesh_dim]}")
    return problems


def shard_shape(shape: Sequence[int], mesh: DeviceMesh, tensor_map: TensorMap) -> Shape:
    """Per-device slice of a tensor of ``shape`` under ``tensor_map``"""
    problems = check_tensor_map(shape, mesh, tensor_map)
    if problems:
        raise InvalidConfig("; ".join(problems))
    return tuple(
        size if mesh_dim == UNSPLIT else size // mesh.dims[mesh_dim]
        for size, mesh_dim in zip(shape, tensor_map.map)
    )


def enumerate_tensor_maps(shape: Sequence[int], mesh: DeviceMesh) -> List[TensorMap]:
    """Valid maps for one tensor on one mesh, fully replicated first"""
    choices = [UNSPLIT] + list(range(mesh.rank))
    maps = []
    for candidate in itertools.product(choices, repeat=len(shape)):
        tensor_map = TensorMap(tuple(candidate))
        if not check_tensor_map(shape, mesh, tensor_map):
            maps.append(tensor_map)
    return maps


def enumerate_configs(op: Operator, device_count: int, max_rank: int = 2) -> List[ParallelConfig]:
    """Valid configurations of one operator in canonical order.

    The fully replicated configuration appears once, at index 0.
    """
    if not op.tensor_shapes:
        raise ValueError(f"Operator {op.id} has no tensors")

    configs = []
    seen = set()
    for mesh in enumerate_meshes(device_count, max_rank):
        per_tensor = [enumerate_tensor_maps(shape, mesh) for shape in op.tensor_shapes]
        for maps in itertools.product(*per_tensor):
            config = ParallelConfig(mesh=mesh, tensor_maps=tuple(maps))
            # replicated configs on different meshes are one strategy
            key = "replicated" if config.is_replicated else config
            if key in seen:
                continue
            seen.add(key)
            configs.append(config)
    return configs


def build_config_space(g: ComputationGraph, device_count: int, max_rank: int = 2) -> ConfigSpace:
    space = ConfigSpace({op.id: tuple(enumerate_configs(op, device_count, max_rank)) for op in g.operators})
    logger.debug("Config space for %d devices: %s", device_count,
                 {op_id: len(c) for op_id, c in space.configs.items()})
    return space
