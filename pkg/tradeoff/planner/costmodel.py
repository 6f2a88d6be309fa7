"""Operator, edge and total strategy costs

Operator cost: memory m = m_p + m_t, time t = t_c + t_s.
Edge cost: transfer time t_x, no memory.
Strategy cost: sums over operators and edges; communication c = sum t_s + sum t_x.
Float sums are correctly rounded, so every summation order gives the same cost.
"""

import logging
import math
import numbers
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

from .collectives import all_reduce_bytes, collective_time
from .configs import ConfigSpace, ParallelConfig, shard_shape
from .rescheduling import Rescheduler, project_layout
from ..graph.models import ComputationGraph, DeviceGraph, Operator
from ..utils.errors import MissingCost
from ..utils.parallel import parallel_map

logger = logging.getLogger(__name__)

Number = Union[int, float]
OpKey = Tuple[int, int]
EdgeKey = Tuple[int, int, int]


@dataclass(frozen=True)
class OperatorCost:
    mem_param: Number = 0
    mem_temp: Number = 0
    time_compute: Number = 0
    time_sync: Number = 0

    def __post_init__(self):
        if min(self.mem_param, self.mem_temp, self.time_compute, self.time_sync) < 0:
            raise ValueError("operator costs must be non-negative")

    @property
    def memory(self) -> Number:
        return self.mem_param + self.mem_temp

    @property
    def time(self) -> Number:
        return self.time_compute + self.time_sync


@dataclass(frozen=True)
class EdgeCost:
    time_transfer: Number = 0

    def __post_init__(self):
        if self.time_transfer < 0:
            raise ValueError("edge transfer time must be non-negative")

    @property
    def memory(self) -> Number:
        return 0


@dataclass(frozen=True)
class StrategyCost:
    memory: Number
    time: Number
    communication: Number

    @property
    def computation(self) -> Number:
        return self.time - self.communication


@dataclass
class CostTables:
    """Costs keyed by (op, cfg) and (edge, src cfg, dst cfg); read-only once built"""

    op_costs: Dict[OpKey, OperatorCost] = field(default_factory=dict)
    edge_costs: Dict[EdgeKey, EdgeCost] = field(default_factory=dict)
    space: Optional[ConfigSpace] = None

    def __post_init__(self):
        counts: Dict[int, int] = {}
        for op_id, cfg in self.op_costs:
            counts[op_id] = max(counts.get(op_id, 0), cfg + 1)
        self._counts = counts
        self._edge_ids = {key[0] for key in self.edge_costs}

    def config_count(self, op_id: int) -> int:
        if op_id not in self._counts:
            raise MissingCost(f"No operator costs for operator {op_id}")
        return self._counts[op_id]

    def op_cost(self, op_id: int, cfg: int) -> OperatorCost:
        try:
            return self.op_costs[(op_id, cfg)]
        except KeyError:
            raise MissingCost(f"Missing operator cost for op {op_id} config {cfg}")

    def edge_cost(self, edge_id: int, src_cfg: int, dst_cfg: int) -> EdgeCost:
        try:
            return self.edge_costs[(edge_id, src_cfg, dst_cfg)]
        except KeyError:
            raise MissingCost(f"Missing edge cost for edge {edge_id} configs ({src_cfg}, {dst_cfg})")

    def has_edge(self, edge_id: int) -> bool:
        return edge_id in self._edge_ids

    def check_complete(self, g: ComputationGraph) -> None:
        """Raise MissingCost for the first key the graph needs and the tables lack"""
        for op in g.operators:
            for cfg in range(self.config_count(op.id)):
                self.op_cost(op.id, cfg)
        for edge in g.edges:
            for s in range(self.config_count(edge.src)):
                for d in range(self.config_count(edge.dst)):
                    self.edge_cost(edge.id, s, d)

    def config(self, op_id: int, cfg: int) -> Optional[ParallelConfig]:
        if self.space is None or op_id not in self.space.configs:
            return None
        return self.space[op_id][cfg]


@dataclass(frozen=True)
class SyntheticOpModel:
    """Closed-form operator costs for fixtures and experiments.

    t_c is proportional to the output shard's element count, m_p is the
    parameter shard bytes, m_t the output shard bytes, and t_s an all-reduce
    of each parameter's gradient over the mesh dimensions the parameter is
    replicated on while the computation is split.
    """

    seconds_per_element: float = 1e-9
    dtype_bytes: int = 4
    comm_scale: float = 1.0
    interpolation: str = "linear"

    def op_cost(self, op: Operator, config: ParallelConfig, dev: DeviceGraph) -> OperatorCost:
        mesh = config.mesh
        out_map = config.tensor_maps[-1]
        out_elements = math.prod(shard_shape(op.output_shape, mesh, out_map))
        computed_dims = set(range(mesh.rank)) - config.replicated_mesh_dims

        mem_param = 0
        time_sync = 0.0
        for shape, tensor_map in zip(op.parameter_shapes, config.tensor_maps[:-1]):
            shard_bytes = math.prod(shard_shape(shape, mesh, tensor_map)) * self.dtype_bytes
            mem_param += shard_bytes
            # gradients are reduced over mesh dims that split the work but not the parameter
            for mesh_dim in sorted(computed_dims - tensor_map.mesh_dims):
                group = mesh.dims[mesh_dim]
                time_sync += self.comm_scale * collective_time(
                    dev, group, all_reduce_bytes(shard_bytes, group), self.interpolation)

        return OperatorCost(
            mem_param=mem_param,
            mem_temp=out_elements * self.dtype_bytes,
            time_compute=self.seconds_per_element * out_elements,
            time_sync=time_sync,
        )


def build_cost_tables(g: ComputationGraph, space: ConfigSpace, dev: DeviceGraph,
                      op_model: Union[SyntheticOpModel, CostTables, None] = None,
                      threads: int = 1, max_rank: int = 2) -> CostTables:
    """Operator costs from a file or the synthetic model; edge costs by re-scheduling.

    When ``op_model`` is a CostTables loaded from a file, its edge costs are
    used for every edge it covers and re-scheduling fills in the rest.
    """
    model = op_model if isinstance(op_model, SyntheticOpModel) else SyntheticOpModel()
    file_tables = op_model if isinstance(op_model, CostTables) else None

    def op_rows(op: Operator) -> List[Tuple[OpKey, OperatorCost]]:
        rows = []
        for cfg, config in enumerate(space[op.id]):
            if file_tables is not None:
                cost = file_tables.op_cost(op.id, cfg)
            else:
                cost = model.op_cost(op, config, dev)
            rows.append(((op.id, cfg), cost))
        return rows

    op_costs: Dict[OpKey, OperatorCost] = {}
    for rows in parallel_map(op_rows, g.operators, threads):
        op_costs.update(rows)

    rescheduler = Rescheduler(dev, model.dtype_bytes, max_rank, model.interpolation, model.comm_scale)

    def edge_rows(edge) -> List[Tuple[EdgeKey, EdgeCost]]:
        if file_tables is not None and file_tables.has_edge(edge.id):
            return [
                ((edge.id, s, d), file_tables.edge_cost(edge.id, s, d))
                for s in range(len(space[edge.src])) for d in range(len(space[edge.dst]))
            ]
        src_layouts = [project_layout(edge.tensor_shape, c) for c in space[edge.src]]
        dst_layouts = [project_layout(edge.tensor_shape, c) for c in space[edge.dst]]
        return [
            ((edge.id, s, d), EdgeCost(rescheduler.reschedule_time(a, b, edge.tensor_shape)))
            for s, a in enumerate(src_layouts) for d, b in enumerate(dst_layouts)
        ]

    edge_costs: Dict[EdgeKey, EdgeCost] = {}
    for rows in parallel_map(edge_rows, g.edges, threads):
        edge_costs.update(rows)

    logger.info("Built cost tables: %d operator entries, %d edge entries",
                len(op_costs), len(edge_costs))
    return CostTables(op_costs=op_costs, edge_costs=edge_costs, space=space)


def exact_sum(values: Iterable[Number]) -> Number:
    """Correctly rounded sum, independent of the order of ``values``; integers stay exact"""
    values = list(values)
    if all(isinstance(v, numbers.Integral) for v in values):
        return sum(values)
    return math.fsum(values)


def total_cost(strategy: Mapping[int, int], g: ComputationGraph, tables: CostTables) -> StrategyCost:
    """Memory, time and communication of a full strategy (op id -> config index)"""
    memory: List[Number] = []
    time: List[Number] = []
    communication: List[Number] = []
    for op in g.operators:
        if op.id not in strategy:
            raise MissingCost(f"Strategy assigns no configuration to operator {op.id}")
        cost = tables.op_cost(op.id, strategy[op.id])
        memory.append(cost.memory)
        time.append(cost.time)
        communication.append(cost.time_sync)
    for edge in g.edges:
        transfer = tables.edge_cost(edge.id, strategy[edge.src], strategy[edge.dst]).time_transfer
        time.append(transfer)
        communication.append(transfer)
    return StrategyCost(memory=exact_sum(memory), time=exact_sum(time),
                        communication=exact_sum(communication))


def strategy_costs(strategies: Iterable[Mapping[int, int]], g: ComputationGraph,
                   tables: CostTables) -> List[StrategyCost]:
    return [total_cost(s, g, tables) for s in strategies]
