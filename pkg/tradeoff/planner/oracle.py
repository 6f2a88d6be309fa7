"""Brute-force frontier over every strategy, and comparison against frontier tracking"""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .costmodel import CostTables, total_cost
from .frontier import ZERO, Frontier, StrategyTuple, dominated_fraction, reduce
from .solver import FTOptions, FrontierResult, ft
from ..graph.models import ComputationGraph, DeviceGraph
from ..utils.errors import TooLarge

logger = logging.getLogger(__name__)

DEFAULT_LIMIT = 10 ** 7
CHUNK = 1 << 20


def _is_integral(values) -> bool:
    return all(isinstance(v, (int, np.integer)) for v in values)


def _sweep(memory: np.ndarray, time: np.ndarray, index: np.ndarray) -> np.ndarray:
    """Positions of the frontier points; equal costs keep the smallest index"""
    order = np.lexsort((index, time, memory))
    ordered_time = time[order]
    best_before = np.concatenate(([np.inf], np.minimum.accumulate(ordered_time)[:-1]))
    return order[ordered_time < best_before]


def _recosted(t: StrategyTuple, g: ComputationGraph, tables: CostTables) -> StrategyTuple:
    cost = total_cost(dict(t.assignment), g, tables)
    return StrategyTuple(memory=cost.memory, time=cost.time, assignment=t.assignment)


def brute_force(g: ComputationGraph, tables: CostTables, limit: int = DEFAULT_LIMIT) -> Frontier:
    """Evaluate every strategy and reduce.

    Strategies are numbered in lexicographic order of their config vector
    (operators by id), which also breaks ties between equal costs. Float
    frontier points are re-costed with correctly rounded sums, matching
    ``total_cost``.
    """
    op_ids = g.op_ids
    if not op_ids:
        return Frontier([ZERO])
    shape = tuple(tables.config_count(op_id) for op_id in op_ids)
    total = math.prod(shape)
    if total > limit:
        raise TooLarge(f"{total} strategies exceed the brute-force limit of {limit}")

    op_memory = [[tables.op_cost(op_id, k).memory for k in range(n)] for op_id, n in zip(op_ids, shape)]
    op_time = [[tables.op_cost(op_id, k).time for k in range(n)] for op_id, n in zip(op_ids, shape)]
    position = {op_id: i for i, op_id in enumerate(op_ids)}
    edge_time = [
        (position[e.src], position[e.dst],
         [[tables.edge_cost(e.id, s, d).time_transfer for d in range(shape[position[e.dst]])]
          for s in range(shape[position[e.src]])])
        for e in g.edges
    ]
    integral = (all(_is_integral(row) for row in op_memory + op_time)
                and all(_is_integral(row) for *_, rows in edge_time for row in rows))
    dtype = np.int64 if integral else np.float64
    memory_tables = [np.asarray(row, dtype=dtype) for row in op_memory]
    time_tables = [np.asarray(row, dtype=dtype) for row in op_time]
    edge_tables = [(s, d, np.asarray(rows, dtype=dtype)) for s, d, rows in edge_time]

    # each chunk keeps only its own frontier
    survivors = []
    for start in range(0, total, CHUNK):
        index = np.arange(start, min(start + CHUNK, total), dtype=np.int64)
        grid = np.unravel_index(index, shape)
        memory = np.zeros(len(index), dtype=dtype)
        time = np.zeros(len(index), dtype=dtype)
        for i, table in enumerate(memory_tables):
            memory += table[grid[i]]
        for i, table in enumerate(time_tables):
            time += table[grid[i]]
        for s, d, table in edge_tables:
            time += table[grid[s], grid[d]]
        keep = _sweep(memory, time, index)
        survivors.append((memory[keep], time[keep], index[keep]))

    memory = np.concatenate([m for m, _, _ in survivors])
    time = np.concatenate([t for _, t, _ in survivors])
    index = np.concatenate([i for _, _, i in survivors])
    keep = _sweep(memory, time, index)
    configs = np.unravel_index(index[keep], shape)

    tuples = []
    for row, j in enumerate(keep):
        assignment = tuple((op_id, int(configs[i][row])) for i, op_id in enumerate(op_ids))
        tuples.append(StrategyTuple(memory=memory[j].item(), time=time[j].item(), assignment=assignment))
    if not integral:
        # vectorized float sums depend on the order of addition
        tuples = reduce(_recosted(t, g, tables) for t in tuples)
    logger.debug("Brute force over %d strategies: %d frontier points", total, len(tuples))
    return Frontier(tuples)


def cost_multiset(frontier) -> Counter:
    return Counter(t.cost for t in frontier)


@dataclass
class OracleReport:
    match: bool
    result: FrontierResult
    oracle: Frontier
    missing: List[Tuple] = field(default_factory=list)
    extra: List[Tuple] = field(default_factory=list)
    dominated_fraction: float = 1.0

    @property
    def status(self) -> str:
        return "MATCH" if self.match else "MISMATCH"


def compare(found: Frontier, expected: Frontier) -> Tuple[List[Tuple], List[Tuple]]:
    """(points only in ``expected``, points only in ``found``) as sorted cost lists"""
    a, b = cost_multiset(found), cost_multiset(expected)
    return sorted((b - a).elements()), sorted((a - b).elements())


def oracle_check(g: ComputationGraph, dev: Optional[DeviceGraph], tables: CostTables,
                 options: Optional[FTOptions] = None, limit: int = DEFAULT_LIMIT) -> OracleReport:
    result = ft(g, dev, tables, options)
    expected = brute_force(g, tables, limit)
    missing, extra = compare(result.frontier, expected)
    report = OracleReport(
        match=not missing and not extra,
        result=result,
        oracle=expected,
        missing=missing,
        extra=extra,
        dominated_fraction=dominated_fraction(result.frontier, expected),
    )
    logger.info("Oracle check: %s (%d heuristic eliminations, %.3f of oracle points dominated)",
                report.status, result.heuristic_count, report.dominated_fraction)
    return report


def pairwise_frontier(candidates) -> List[StrategyTuple]:
    """Quadratic dominance filter, a reference for ``reduce``"""
    candidates = list(candidates)
    kept = []
    for x in candidates:
        beaten = any(
            y.memory <= x.memory and y.time <= x.time and y.cost != x.cost for y in candidates)
        if not beaten and all(k.cost != x.cost for k in kept):
            ties = [y for y in candidates if y.cost == x.cost]
            kept.append(min(ties, key=lambda t: t.strategy))
    return sorted(kept, key=lambda t: t.cost)
