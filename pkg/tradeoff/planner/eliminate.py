"""Graph eliminations that reduce a DAG to its linear backbone

Node, edge and branch elimination keep the cost frontier exact; heuristic
elimination fixes one operator's configuration and may lose frontier
points. Every elimination logs which configuration of the removed operator
produced each new frontier tuple so full strategies can be rebuilt.
"""

import functools
import itertools
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from .costmodel import CostTables
from .frontier import Assignment, Frontier, StrategyTuple, product, reduce
from ..graph.models import ComputationGraph
from ..graph.topology import LinearBackbone, is_linear, mark_backbone, topological_order
from ..utils.errors import NotLinearizable, PreconditionViolated, SpaceExplosion
from ..utils.parallel import parallel_map

logger = logging.getLogger(__name__)

KINDS = ('node', 'edge', 'branch', 'heuristic')
POLICIES = ('min_memory', 'weighted')
DEFAULT_COMPOSITE_CAP = 4096


@dataclass
class ElimRecord:
    kind: str
    operators: Tuple[int, ...]
    edges: Tuple[int, ...]
    new_entity: Optional[int]
    choices: Dict[StrategyTuple, Assignment] = field(default_factory=dict)

    @property
    def records_count(self) -> int:
        return len(self.choices)

    def to_dict(self) -> dict:
        return {
            'kind': self.kind,
            'eliminated': {'operators': list(self.operators), 'edges': list(self.edges)},
            'new_entity': self.new_entity,
            'records_count': self.records_count,
        }


class ElimState:
    """Working graph plus the frontiers of every surviving operator and edge"""

    def __init__(self, graph: nx.MultiDiGraph, edges: Dict[int, Tuple[int, int]],
                 config_counts: Dict[int, int], threads: int = 1,
                 composite_cap: int = DEFAULT_COMPOSITE_CAP, seed: Optional[int] = None):
        self.graph = graph
        self.edges = edges
        self.config_counts = config_counts
        self.op_frontiers: Dict[Tuple[int, int], Frontier] = {}
        self.edge_frontiers: Dict[Tuple[int, int, int], Frontier] = {}
        self.composite_spaces: Dict[int, List[Assignment]] = {}
        self.log: List[ElimRecord] = []
        self.generated_by: Dict[StrategyTuple, int] = {}
        self.backbone = LinearBackbone(marked=())
        self.next_edge_id = max(edges, default=-1) + 1
        self.threads = threads
        self.composite_cap = composite_cap
        self.seed = seed

    @classmethod
    def from_tables(cls, g: ComputationGraph, tables: CostTables, threads: int = 1,
                    composite_cap: int = DEFAULT_COMPOSITE_CAP,
                    seed: Optional[int] = None) -> 'ElimState':
        """Singleton frontiers from the cost tables, one per operator config and edge config pair"""
        counts = {op_id: tables.config_count(op_id) for op_id in g.op_ids}
        st = cls(g.to_networkx(), {e.id: (e.src, e.dst) for e in g.edges}, counts,
                 threads=threads, composite_cap=composite_cap, seed=seed)
        for op_id, k_count in counts.items():
            for k in range(k_count):
                cost = tables.op_cost(op_id, k)
                st.op_frontiers[(op_id, k)] = Frontier([StrategyTuple.leaf(op_id, k, cost.memory, cost.time)])
        for e in g.edges:
            for s in range(counts[e.src]):
                for d in range(counts[e.dst]):
                    t_x = tables.edge_cost(e.id, s, d).time_transfer
                    st.edge_frontiers[(e.id, s, d)] = Frontier([StrategyTuple(memory=0, time=t_x)])
        st.refresh_backbone()
        return st

    def copy(self) -> 'ElimState':
        other = ElimState(self.graph.copy(), dict(self.edges), dict(self.config_counts),
                          threads=self.threads, composite_cap=self.composite_cap, seed=self.seed)
        other.op_frontiers = dict(self.op_frontiers)
        other.edge_frontiers = dict(self.edge_frontiers)
        other.composite_spaces = dict(self.composite_spaces)
        other.log = list(self.log)
        other.generated_by = dict(self.generated_by)
        other.backbone = self.backbone
        other.next_edge_id = self.next_edge_id
        return other

    def refresh_backbone(self) -> LinearBackbone:
        self.backbone = mark_backbone(self.graph, self.seed)
        return self.backbone

    def op_ids(self) -> List[int]:
        return sorted(self.graph.nodes)

    def op_frontier(self, op_id: int, cfg: int) -> Frontier:
        return self.op_frontiers[(op_id, cfg)]

    def edge_frontier(self, edge_id: int, src_cfg: int, dst_cfg: int) -> Frontier:
        return self.edge_frontiers[(edge_id, src_cfg, dst_cfg)]

    def in_edges(self, op_id: int) -> List[Tuple[int, int]]:
        """(edge id, source op) pairs sorted by edge id"""
        return sorted((key, u) for u, _, key in self.graph.in_edges(op_id, keys=True))

    def out_edges(self, op_id: int) -> List[Tuple[int, int]]:
        """(edge id, destination op) pairs sorted by edge id"""
        return sorted((key, v) for _, v, key in self.graph.out_edges(op_id, keys=True))

    def edges_between(self, src: int, dst: int) -> List[int]:
        return sorted(key for key, v in self.out_edges(src) if v == dst)

    def expand(self, op_id: int, cfg: int) -> Assignment:
        """Original (op, config) pairs behind a possibly composite config"""
        space = self.composite_spaces.get(op_id)
        return space[cfg] if space is not None else ((op_id, cfg),)

    def add_edge(self, src: int, dst: int) -> int:
        edge_id = self.next_edge_id
        self.next_edge_id += 1
        self.graph.add_edge(src, dst, key=edge_id)
        self.edges[edge_id] = (src, dst)
        return edge_id

    def remove_edge(self, edge_id: int) -> None:
        src, dst = self.edges.pop(edge_id)
        for s in range(self.config_counts[src]):
            for d in range(self.config_counts[dst]):
                self.edge_frontiers.pop((edge_id, s, d), None)
        self.graph.remove_edge(src, dst, key=edge_id)

    def remove_op(self, op_id: int) -> None:
        for edge_id, _ in self.in_edges(op_id) + self.out_edges(op_id):
            self.remove_edge(edge_id)
        for k in range(self.config_counts[op_id]):
            self.op_frontiers.pop((op_id, k), None)
        self.graph.remove_node(op_id)
        del self.config_counts[op_id]

    def record(self, kind: str, operators: Sequence[int], edges: Sequence[int],
               new_entity: Optional[int], choices: Dict[StrategyTuple, Assignment]) -> ElimRecord:
        entry = ElimRecord(kind, tuple(operators), tuple(edges), new_entity, choices)
        index = len(self.log)
        self.log.append(entry)
        for produced in choices:
            self.generated_by[produced] = index
        logger.debug("%s elimination: ops %s edges %s -> %s (%d tuples)",
                     kind, list(operators), list(edges), new_entity, entry.records_count)
        return entry

    def counts(self) -> Dict[str, int]:
        tally = Counter(r.kind for r in self.log)
        return {kind: tally.get(kind, 0) for kind in KINDS}

    def trace(self) -> List[dict]:
        return [r.to_dict() for r in self.log]


def _require_unmarked(st: ElimState, op_id: int) -> None:
    if op_id not in st.graph:
        raise PreconditionViolated(f"Operator {op_id} is not in the working graph")
    if op_id in st.backbone:
        raise PreconditionViolated(f"Operator {op_id} is on the linear backbone")


def node_eliminate(st: ElimState, op_id: int) -> ElimState:
    """Fold an operator with one input edge and one output edge into a new edge"""
    _require_unmarked(st, op_id)
    ins, outs = st.in_edges(op_id), st.out_edges(op_id)
    if len(ins) != 1 or len(outs) != 1:
        raise PreconditionViolated(
            f"Operator {op_id} needs exactly one input and one output edge, has {len(ins)} and {len(outs)}")
    (e_in, src), (e_out, dst) = ins[0], outs[0]
    k_count = st.config_counts[op_id]

    def combine(pair):
        w, p = pair
        candidates = []
        origin = {}
        for k in range(k_count):
            through = product(st.edge_frontier(e_in, w, k), st.op_frontier(op_id, k))
            for t in product(through, st.edge_frontier(e_out, k, p)):
                candidates.append(t)
                origin[t] = k
        merged = reduce(candidates)
        return merged, {t: st.expand(op_id, origin[t]) for t in merged}

    pairs = list(itertools.product(range(st.config_counts[src]), range(st.config_counts[dst])))
    results = parallel_map(combine, pairs, st.threads)

    new_edge = st.add_edge(src, dst)
    choices = {}
    for (w, p), (merged, chosen) in zip(pairs, results):
        st.edge_frontiers[(new_edge, w, p)] = merged
        choices.update(chosen)
    st.remove_op(op_id)
    st.record('node', (op_id,), (e_in, e_out), new_edge, choices)
    return st


def edge_eliminate(st: ElimState, edge_ids: Sequence[int]) -> ElimState:
    """Merge parallel edges into one whose frontier is their product"""
    edge_ids = sorted(edge_ids)
    if len(edge_ids) < 2:
        raise PreconditionViolated("Edge elimination needs at least two edges")
    ends = {st.edges.get(e) for e in edge_ids}
    if len(ends) != 1 or None in ends:
        raise PreconditionViolated(f"Edges {edge_ids} do not share the same endpoints")
    src, dst = ends.pop()

    def combine(pair):
        s, d = pair
        frontiers = [st.edge_frontier(e, s, d) for e in edge_ids]
        return reduce(functools.reduce(product, frontiers))

    pairs = list(itertools.product(range(st.config_counts[src]), range(st.config_counts[dst])))
    results = parallel_map(combine, pairs, st.threads)

    new_edge = st.add_edge(src, dst)
    choices = {}
    for (s, d), merged in zip(pairs, results):
        st.edge_frontiers[(new_edge, s, d)] = merged
        choices.update((t, ()) for t in merged)
    for e in edge_ids:
        st.remove_edge(e)
    st.record('edge', (), edge_ids, new_edge, choices)
    return st


def branch_eliminate(st: ElimState, op_id: int, receiver: int) -> ElimState:
    """Merge an operator into its only neighbour, whose configs become composite.

    Composite config ``c`` of the receiver stands for (receiver config
    ``c // K_i``, merged config ``c % K_i``). An isolated operator may be
    merged into any receiver; no edge cost is added.
    """
    _require_unmarked(st, op_id)
    if receiver == op_id or receiver not in st.graph:
        raise PreconditionViolated(f"Operator {receiver} cannot receive operator {op_id}")
    incident = [(e, u, v) for e, (u, v) in sorted(st.edges.items()) if op_id in (u, v)]
    if any(receiver not in (u, v) for _, u, v in incident):
        raise PreconditionViolated(f"Operator {op_id} is connected to operators other than {receiver}")
    if len(incident) > 1:
        raise PreconditionViolated(f"Operator {op_id} has {len(incident)} edges to {receiver}; merge them first")

    k_i = st.config_counts[op_id]
    k_h = st.config_counts[receiver]
    size = k_h * k_i
    if size > st.composite_cap:
        raise SpaceExplosion(
            f"Merging operator {op_id} into {receiver} gives {size} configs (cap {st.composite_cap})")
    link = incident[0] if incident else None

    def combine(c):
        p, k = divmod(c, k_i)
        parts = product(st.op_frontier(receiver, p), st.op_frontier(op_id, k))
        if link is not None:
            edge_id, u, _ = link
            s, d = (k, p) if u == op_id else (p, k)
            parts = product(parts, st.edge_frontier(edge_id, s, d))
        merged = reduce(parts)
        return merged, {t: st.expand(op_id, k) for t in merged}

    results = parallel_map(combine, range(size), st.threads)

    # re-key the receiver's other edges by composite config
    for edge_id, u, v in [(e, u, v) for e, (u, v) in sorted(st.edges.items()) if receiver in (u, v)]:
        if link is not None and edge_id == link[0]:
            continue
        old = {}
        for s in range(st.config_counts[u]):
            for d in range(st.config_counts[v]):
                old[(s, d)] = st.edge_frontiers.pop((edge_id, s, d))
        if u == receiver:
            for c in range(size):
                for d in range(st.config_counts[v]):
                    st.edge_frontiers[(edge_id, c, d)] = old[(c // k_i, d)]
        else:
            for s in range(st.config_counts[u]):
                for c in range(size):
                    st.edge_frontiers[(edge_id, s, c)] = old[(s, c // k_i)]

    st.composite_spaces[receiver] = [
        tuple(sorted(st.expand(receiver, c // k_i) + st.expand(op_id, c % k_i))) for c in range(size)
    ]
    choices = {}
    for p in range(k_h):
        del st.op_frontiers[(receiver, p)]
    for c, (merged, chosen) in enumerate(results):
        st.op_frontiers[(receiver, c)] = merged
        choices.update(chosen)
    st.remove_op(op_id)
    st.config_counts[receiver] = size
    st.record('branch', (op_id,), (link[0],) if link else (), receiver, choices)
    return st


def choose_config(frontiers: Sequence[Frontier], policy: str = 'min_memory', alpha: float = 0.5) -> int:
    """Config index a heuristic elimination fixes, judged on each config's min-memory tuple"""
    if policy not in POLICIES:
        raise ValueError(f"Unknown heuristic policy '{policy}'; use one of {POLICIES}")
    reps = [f.min_memory().cost for f in frontiers]
    if policy == 'min_memory':
        return min(range(len(reps)), key=lambda k: (reps[k][0], reps[k][1], k))

    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    memories = [m for m, _ in reps]
    times = [t for _, t in reps]

    def normalized(value, values):
        span = max(values) - min(values)
        return (value - min(values)) / span if span else 0.0

    return min(range(len(reps)), key=lambda k: (
        alpha * normalized(memories[k], memories) + (1 - alpha) * normalized(times[k], times), k))


def heuristic_eliminate(st: ElimState, op_id: int, policy: str = 'min_memory',
                        alpha: float = 0.5) -> ElimState:
    """Fix one config of ``op_id`` and fold its edges into the neighbours.

    The operator's own frontier goes into the topologically first downstream
    neighbour, or the first upstream one when it has no outputs.
    """
    _require_unmarked(st, op_id)
    chosen = choose_config([st.op_frontier(op_id, k) for k in range(st.config_counts[op_id])],
                           policy, alpha)
    own = st.op_frontier(op_id, chosen)
    fixed = st.expand(op_id, chosen)

    position = {op: i for i, op in enumerate(topological_order(st.graph))}
    outs, ins = st.out_edges(op_id), st.in_edges(op_id)
    downstream = sorted({v for _, v in outs}, key=position.get)
    upstream = sorted({u for _, u in ins}, key=position.get)
    if downstream:
        target = downstream[0]
    elif upstream:
        target = upstream[0]
    else:
        target = st.backbone.marked[0]

    def fold(neighbour: int, edge_ids: List[int], outgoing: bool) -> List[Frontier]:
        def update(p):
            parts = st.op_frontier(neighbour, p)
            for e in edge_ids:
                key = (e, chosen, p) if outgoing else (e, p, chosen)
                parts = product(parts, st.edge_frontiers[key])
            if neighbour == target:
                parts = product(parts, own)
            return reduce(parts)
        return parallel_map(update, range(st.config_counts[neighbour]), st.threads)

    # every neighbour absorbs its edges to the fixed config; only the target also takes `own`
    updates = [(v, [e for e, x in outs if x == v], True) for v in downstream]
    updates += [(u, [e for e, x in ins if x == u], False) for u in upstream]
    if not updates:
        updates = [(target, [], True)]

    choices = {}
    for neighbour, edge_ids, outgoing in updates:
        for p, merged in enumerate(fold(neighbour, edge_ids, outgoing)):
            st.op_frontiers[(neighbour, p)] = merged
            choices.update((t, fixed) for t in merged)

    removed_edges = tuple(e for e, _ in ins + outs)
    st.remove_op(op_id)
    st.record('heuristic', (op_id,), removed_edges, target, choices)
    return st


def _try_node(st: ElimState, order: List[int]) -> bool:
    for op_id in order:
        if op_id in st.backbone:
            continue
        if len(st.in_edges(op_id)) == 1 and len(st.out_edges(op_id)) == 1:
            node_eliminate(st, op_id)
            return True
    return False


def _try_edge(st: ElimState, order: List[int]) -> bool:
    for src in order:
        grouped: Dict[int, List[int]] = {}
        for edge_id, dst in st.out_edges(src):
            grouped.setdefault(dst, []).append(edge_id)
        for dst in sorted(grouped, key=order.index):
            if len(grouped[dst]) > 1:
                edge_eliminate(st, grouped[dst])
                return True
    return False


def _branch_candidates(st: ElimState, order: List[int]) -> List[Tuple[int, int, int]]:
    """(K, position, op) for unmarked ops with a single neighbour, or none at all"""
    candidates = []
    for position, op_id in enumerate(order):
        if op_id in st.backbone:
            continue
        edges = st.in_edges(op_id) + st.out_edges(op_id)
        neighbours = {other for _, other in edges}
        # parallel edges to the neighbour are merged by edge elimination first
        if len(neighbours) == 1 and len(edges) == 1:
            candidates.append((st.config_counts[op_id], position, op_id))
        elif not edges and st.backbone.marked:
            candidates.append((st.config_counts[op_id], position, op_id))
    return sorted(candidates)


def _try_branch(st: ElimState, order: List[int]) -> bool:
    for k_count, _, op_id in _branch_candidates(st, order):
        edges = st.in_edges(op_id) + st.out_edges(op_id)
        receiver = edges[0][1] if edges else st.backbone.marked[0]
        if k_count * st.config_counts[receiver] > st.composite_cap:
            logger.debug("Skipping branch elimination of %d into %d: over the composite cap", op_id, receiver)
            continue
        branch_eliminate(st, op_id, receiver)
        return True
    return False


def _try_heuristic(st: ElimState, order: List[int], policy: str, alpha: float) -> bool:
    position = {op: i for i, op in enumerate(order)}
    unmarked = [op for op in order if op not in st.backbone]
    if not unmarked:
        return False
    target = min(unmarked, key=lambda op: (-len(st.out_edges(op)), position[op]))
    heuristic_eliminate(st, target, policy, alpha)
    return True


def run_eliminations(st: ElimState, heuristics: bool = True, policy: str = 'min_memory',
                     alpha: float = 0.5) -> ElimState:
    """Eliminate until only the linear backbone is left.

    Each round re-marks the backbone, then applies the first exact
    elimination found (node, then edge, then branch, each scanned in
    topological order), or else one heuristic elimination.
    """
    while True:
        st.refresh_backbone()
        order = topological_order(st.graph)
        if _try_node(st, order) or _try_edge(st, order) or _try_branch(st, order):
            continue
        if heuristics and _try_heuristic(st, order, policy, alpha):
            continue
        break

    if not is_linear(st.graph):
        raise NotLinearizable(
            f"{st.graph.number_of_nodes()} operators remain off a linear chain "
            f"after {len(st.log)} eliminations")
    logger.info("Eliminations done: %s, %d operators left", st.counts(), st.graph.number_of_nodes())
    return st
