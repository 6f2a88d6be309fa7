"""Frontier tracking: eliminations, dynamic programming on the backbone, unrolling"""

import dataclasses
import functools
import logging
import math
import numbers
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .costmodel import CostTables, StrategyCost, total_cost
from .eliminate import (
    DEFAULT_COMPOSITE_CAP, POLICIES, ElimState, edge_eliminate, node_eliminate, run_eliminations,
)
from .frontier import ZERO, Frontier, StrategyTuple, product, reduce
from ..graph.models import ComputationGraph, DeviceGraph
from ..graph.topology import LinearBackbone, is_linear, topological_order
from ..utils.errors import BrokenProvenance, NotLinear
from ..utils.parallel import parallel_map

logger = logging.getLogger(__name__)

ROUNDING_TOLERANCE = 1e-9


@dataclass(frozen=True)
class FTOptions:
    threads: int = 1
    heuristic_policy: str = 'min_memory'
    alpha: float = 0.5
    composite_cap: int = DEFAULT_COMPOSITE_CAP
    seed: Optional[int] = None
    heuristics: bool = True

    def __post_init__(self):
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.heuristic_policy not in POLICIES:
            raise ValueError(f"heuristic_policy must be one of {POLICIES}")
        if not 0 <= self.alpha <= 1:
            raise ValueError("alpha must lie in [0, 1]")

    @classmethod
    def from_config(cls, config: dict, **overrides) -> 'FTOptions':
        search = config.get('search', {})
        values = {
            'threads': search.get('threads', 1),
            'heuristic_policy': search.get('heuristic_policy', 'min_memory'),
            'alpha': search.get('heuristic_alpha', 0.5),
            'composite_cap': search.get('composite_cap', DEFAULT_COMPOSITE_CAP),
            'seed': search.get('seed'),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass
class FrontierResult:
    frontier: Frontier
    strategies: List[Dict[int, int]]
    costs: List[StrategyCost] = field(default_factory=list)
    stats: Dict = field(default_factory=dict)
    trace: List[dict] = field(default_factory=list)

    @property
    def heuristic_count(self) -> int:
        return self.stats.get('heuristic_count', 0)

    def __len__(self) -> int:
        return len(self.frontier)


def _linear_order(st: ElimState) -> List[int]:
    if not is_linear(st.graph):
        raise NotLinear("Working graph is not a chain")
    return topological_order(st.graph)


def ldp(st: ElimState, threads: Optional[int] = None, prune: bool = True,
        prefixes: Optional[Dict[int, list]] = None) -> Frontier:
    """Cumulative frontiers along the chain, one per config of the current operator.

    With ``prune=False`` prefixes are carried unreduced and only the final
    answer is reduced; the result must be the same. A ``prefixes`` dict is
    filled with op id -> the cumulative frontiers ending at that operator.
    """
    threads = threads or st.threads
    order = _linear_order(st)
    if not order:
        return Frontier([ZERO])
    settle = reduce if prune else list

    first = order[0]
    cumulative = [st.op_frontier(first, k) for k in range(st.config_counts[first])]
    if prefixes is not None:
        prefixes[first] = cumulative
    for prev, cur in zip(order, order[1:]):
        # parallel edges between neighbours are multiplied in directly
        edge_ids = st.edges_between(prev, cur)

        def step(p, cur=cur, edge_ids=edge_ids, cumulative=cumulative):
            candidates = []
            for k, prefix in enumerate(cumulative):
                parts = [st.edge_frontier(e, k, p) for e in edge_ids]
                combined = functools.reduce(product, parts + [prefix])
                candidates.extend(product(combined, st.op_frontier(cur, p)))
            return settle(candidates)

        cumulative = parallel_map(step, range(st.config_counts[cur]), threads)
        if prefixes is not None:
            prefixes[cur] = cumulative
        logger.debug("LDP step at op %d: cumulative sizes %s", cur, [len(c) for c in cumulative])

    return reduce(t for prefix in cumulative for t in prefix)


def ft_elimination(st: ElimState) -> Frontier:
    """Node-eliminate the second operator until two remain, then try every config pair"""
    order = _linear_order(st)
    if not order:
        return Frontier([ZERO])
    work = st.copy()
    work.backbone = LinearBackbone(marked=())
    # node elimination needs a single edge on each side
    for prev, cur in zip(order, order[1:]):
        parallel = work.edges_between(prev, cur)
        if len(parallel) > 1:
            edge_eliminate(work, parallel)
    if len(order) == 1:
        op_id = order[0]
        return reduce(t for k in range(work.config_counts[op_id]) for t in work.op_frontier(op_id, k))

    while len(order) > 2:
        node_eliminate(work, order[1])
        order = topological_order(work.graph)
        work.backbone = LinearBackbone(marked=())

    first, last = order
    edge_ids = work.edges_between(first, last)
    candidates = []
    for w in range(work.config_counts[first]):
        for p in range(work.config_counts[last]):
            parts = [work.op_frontier(first, w)] + [work.edge_frontier(e, w, p) for e in edge_ids]
            candidates.extend(product(functools.reduce(product, parts), work.op_frontier(last, p)))
    return reduce(candidates)


def unroll(st: ElimState, tup: StrategyTuple, g: ComputationGraph) -> Dict[int, int]:
    """Full strategy behind a frontier tuple.

    Configs come from the provenance tree; the elimination log is then
    replayed newest first to fill or confirm every eliminated operator.
    """
    assignment: Dict[int, int] = {}
    visited = []
    stack = [tup]
    while stack:
        node = stack.pop()
        visited.append(node)
        for op_id, cfg in node.assignment:
            if op_id in assignment:
                raise BrokenProvenance(f"Operator {op_id} assigned twice")
            assignment[op_id] = cfg
        stack.extend(node.parents)

    # tuples that came out of an elimination, grouped by log entry
    by_record: Dict[int, List[StrategyTuple]] = {}
    for node in visited:
        index = st.generated_by.get(node)
        if index is not None:
            by_record.setdefault(index, []).append(node)
    for index in sorted(by_record, reverse=True):
        record = st.log[index]
        for node in by_record[index]:
            for op_id, cfg in record.choices[node]:
                if assignment.setdefault(op_id, cfg) != cfg:
                    raise BrokenProvenance(
                        f"{record.kind} elimination chose config {cfg} for operator {op_id}, "
                        f"provenance says {assignment[op_id]}")

    if set(assignment) != set(g.op_ids):
        missing = sorted(set(g.op_ids) - set(assignment))
        extra = sorted(set(assignment) - set(g.op_ids))
        raise BrokenProvenance(f"Unrolled strategy misses operators {missing}, has unknown {extra}")
    return dict(sorted(assignment.items()))


def _same_cost(t: StrategyTuple, cost: StrategyCost) -> bool:
    """Equal, up to the rounding of adding float terms in another order"""
    for stored, recomputed in ((t.memory, cost.memory), (t.time, cost.time)):
        if isinstance(stored, numbers.Integral) and isinstance(recomputed, numbers.Integral):
            if stored != recomputed:
                return False
        elif not math.isclose(stored, recomputed, rel_tol=ROUNDING_TOLERANCE):
            return False
    return True


def _settle_costs(frontier: Frontier, strategies: List[Dict[int, int]], costs: List[StrategyCost]):
    """Frontier re-keyed by the order-independent cost of each unrolled strategy.

    Products sum terms in elimination order, so float costs can be off by
    rounding; anything further off means the provenance is wrong.
    """
    settled = {}
    for t, strategy, cost in zip(frontier, strategies, costs):
        if not _same_cost(t, cost):
            raise BrokenProvenance(
                f"Strategy {strategy} costs {(cost.memory, cost.time)}, frontier point says {t.cost}")
        settled[dataclasses.replace(t, memory=cost.memory, time=cost.time)] = (strategy, cost)
    # points that only differed by rounding may now tie or dominate each other
    frontier = reduce(settled)
    return (frontier, [settled[t][0] for t in frontier], [settled[t][1] for t in frontier])


def ft(g: ComputationGraph, dev: Optional[DeviceGraph], tables: CostTables,
       options: Optional[FTOptions] = None) -> FrontierResult:
    """Exact (or heuristic-assisted) time/memory frontier of every strategy of ``g``"""
    options = options or FTOptions()
    st = ElimState.from_tables(g, tables, threads=options.threads,
                               composite_cap=options.composite_cap, seed=options.seed)
    run_eliminations(st, heuristics=options.heuristics, policy=options.heuristic_policy,
                     alpha=options.alpha)
    remaining = len(st.graph)
    frontier = ldp(st, options.threads)

    strategies = [unroll(st, t, g) for t in frontier]
    costs = [total_cost(s, g, tables) for s in strategies]
    frontier, strategies, costs = _settle_costs(frontier, strategies, costs)

    counts = st.counts()
    stats = {
        'eliminations': counts,
        'ldp_steps': max(remaining - 1, 0),
        'n': len(g),
        'heuristic_count': counts['heuristic'],
        'frontier_size': len(frontier),
    }
    if dev is not None:
        stats['device_count'] = dev.device_count
    logger.info("Frontier of %d points for %d operators (%s)", len(frontier), len(g), counts)
    return FrontierResult(frontier=frontier, strategies=strategies, costs=costs,
                          stats=stats, trace=st.trace())
