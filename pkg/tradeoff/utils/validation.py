"""Input and output document validation utilities

Validators return lists of human-readable errors naming the offending field;
they never raise.
"""

import math
from typing import Any, Dict, List

import networkx as nx


VALID_FLAGS = ["is_input", "is_output"]
RESULT_KEYS = ["memory_bytes", "time_s", "strategy"]


def is_count(value: Any, minimum: int = 0) -> bool:
    """Integer (not bool) no smaller than ``minimum``"""
    return isinstance(value, int) and not isinstance(value, bool) and value >= minimum


def is_cost(value: Any) -> bool:
    """Finite non-negative number"""
    return (isinstance(value, (int, float)) and not isinstance(value, bool)
            and math.isfinite(value) and value >= 0)


def validate_shape(shape: Any) -> bool:
    """Non-empty list of dimensions, each >= 1"""
    return isinstance(shape, list) and len(shape) > 0 and all(is_count(d, 1) for d in shape)


def get_graph_errors(data: Any) -> List[str]:
    """Get all validation errors for a graph document"""
    if not isinstance(data, dict):
        return ["graph document must be an object"]

    errors = []
    operators = data.get('operators')
    edges = data.get('edges', [])
    if not isinstance(operators, list):
        errors.append("operators: must be a list")
        operators = []
    if not isinstance(edges, list):
        errors.append("edges: must be a list")
        edges = []

    # Validate operators
    op_ids = set()
    for i, op in enumerate(operators):
        where = f"operators[{i}]"
        if not isinstance(op, dict):
            errors.append(f"{where}: must be an object")
            continue
        if not is_count(op.get('id')):
            errors.append(f"{where}.id: must be a non-negative integer")
        elif op['id'] in op_ids:
            errors.append(f"{where}.id: duplicate operator id {op['id']}")
        else:
            op_ids.add(op['id'])
        if not isinstance(op.get('name', ''), str):
            errors.append(f"{where}.name: must be text")
        shapes = op.get('tensor_shapes')
        if not isinstance(shapes, list) or not shapes:
            errors.append(f"{where}.tensor_shapes: must be a non-empty list")
        elif not all(validate_shape(s) for s in shapes):
            errors.append(f"{where}.tensor_shapes: every dimension must be an integer >= 1")
        flags = op.get('flags', [])
        if not isinstance(flags, list) or any(f not in VALID_FLAGS for f in flags):
            errors.append(f"{where}.flags: allowed values are {', '.join(VALID_FLAGS)}")

    # Validate edges
    edge_ids = set()
    graph = nx.MultiDiGraph()
    graph.add_nodes_from(op_ids)
    for i, edge in enumerate(edges):
        where = f"edges[{i}]"
        if not isinstance(edge, dict):
            errors.append(f"{where}: must be an object")
            continue
        if not is_count(edge.get('id')):
            errors.append(f"{where}.id: must be a non-negative integer")
        elif edge['id'] in edge_ids:
            errors.append(f"{where}.id: duplicate edge id {edge['id']}")
        else:
            edge_ids.add(edge['id'])
        src, dst = edge.get('src'), edge.get('dst')
        if src not in op_ids:
            errors.append(f"{where}.src: unknown operator {src}")
        if dst not in op_ids:
            errors.append(f"{where}.dst: unknown operator {dst}")
        if src == dst and src is not None:
            errors.append(f"{where}: src and dst must differ")
        if not validate_shape(edge.get('tensor_shape')):
            errors.append(f"{where}.tensor_shape: every dimension must be an integer >= 1")
        if src in op_ids and dst in op_ids and src != dst:
            graph.add_edge(src, dst)

    if not errors and not nx.is_directed_acyclic_graph(graph):
        errors.append("edges: graph contains a cycle")

    # Only checked when some operator is flagged as an input
    inputs = [op['id'] for op in operators
              if isinstance(op, dict) and 'is_input' in (op.get('flags') or [])]
    if not errors and inputs:
        reachable = set(inputs)
        for op_id in inputs:
            reachable |= nx.descendants(graph, op_id)
        unreachable = sorted(op_ids - reachable)
        if unreachable:
            errors.append(f"operators: not reachable from any input operator: {unreachable}")

    return errors


def get_device_errors(data: Any) -> List[str]:
    """Get all validation errors for a device document"""
    if not isinstance(data, dict):
        return ["device document must be an object"]

    errors = []
    count = data.get('device_count')
    if not is_count(count, 1):
        errors.append("device_count: must be an integer >= 1")

    schemes = data.get('schemes', [])
    if not isinstance(schemes, list):
        return errors + ["schemes: must be a list"]

    seen = set()
    for i, scheme in enumerate(schemes):
        where = f"schemes[{i}]"
        if not isinstance(scheme, dict):
            errors.append(f"{where}: must be an object")
            continue
        scheme_id = scheme.get('id')
        if not isinstance(scheme_id, (str, int)) or isinstance(scheme_id, bool):
            errors.append(f"{where}.id: must be text or an integer")
        elif str(scheme_id) in seen:
            errors.append(f"{where}.id: duplicate scheme id {scheme_id}")
        else:
            seen.add(str(scheme_id))
        groups = scheme.get('group_sizes')
        if not isinstance(groups, list) or not groups or not all(is_count(g, 1) for g in groups):
            errors.append(f"{where}.group_sizes: must be a non-empty list of integers >= 1")
        elif is_count(count, 1) and sum(groups) != count:
            errors.append(f"{where}.group_sizes: must sum to device_count {count}")
        if not is_cost(scheme.get('latency_s', 0)):
            errors.append(f"{where}.latency_s: must be a non-negative number")
        profile = scheme.get('profile')
        if not isinstance(profile, list) or not profile:
            errors.append(f"{where}.profile: must be a non-empty list")
            continue
        previous = -1
        for j, point in enumerate(profile):
            pwhere = f"{where}.profile[{j}]"
            if not isinstance(point, dict):
                errors.append(f"{pwhere}: must be an object")
                continue
            size = point.get('log2_bytes')
            if not is_count(size):
                errors.append(f"{pwhere}.log2_bytes: must be a non-negative integer")
            elif size <= previous:
                errors.append(f"{pwhere}.log2_bytes: must be strictly increasing")
            else:
                previous = size
            bandwidth = point.get('bandwidth_bytes_per_s')
            if not is_cost(bandwidth) or bandwidth == 0:
                errors.append(f"{pwhere}.bandwidth_bytes_per_s: must be a positive number")

    # Every mesh axis over device_count devices communicates in groups of a divisor
    if is_count(count, 1):
        sizes = [s.get('group_sizes') for s in schemes if isinstance(s, dict)]
        covered = {
            groups[0] for groups in sizes
            if isinstance(groups, list) and groups and all(is_count(g, 1) for g in groups)
            and len(set(groups)) == 1
        }
        missing = [g for g in range(2, count + 1) if count % g == 0 and g not in covered]
        if missing:
            errors.append(f"schemes: no scheme with equal groups of {missing} devices "
                          f"(needed by meshes over {count} devices)")

    return errors


def get_cost_table_errors(data: Any) -> List[str]:
    """Get all structural validation errors for a cost-table document"""
    if not isinstance(data, dict):
        return ["cost document must be an object"]

    errors = []
    op_costs = data.get('op_costs')
    edge_costs = data.get('edge_costs', [])
    if not isinstance(op_costs, list):
        errors.append("op_costs: must be a list")
        op_costs = []
    if not isinstance(edge_costs, list):
        errors.append("edge_costs: must be a list")
        edge_costs = []

    for i, row in enumerate(op_costs):
        where = f"op_costs[{i}]"
        if not isinstance(row, dict):
            errors.append(f"{where}: must be an object")
            continue
        for key in ('op', 'cfg'):
            if not is_count(row.get(key)):
                errors.append(f"{where}.{key}: must be a non-negative integer")
        for key in ('m_p', 'm_t', 't_c', 't_s'):
            if not is_cost(row.get(key, 0)):
                errors.append(f"{where}.{key}: must be a non-negative number")

    for i, row in enumerate(edge_costs):
        where = f"edge_costs[{i}]"
        if not isinstance(row, dict):
            errors.append(f"{where}: must be an object")
            continue
        for key in ('edge', 'src_cfg', 'dst_cfg'):
            if not is_count(row.get(key)):
                errors.append(f"{where}.{key}: must be a non-negative integer")
        if not is_cost(row.get('t_x', 0)):
            errors.append(f"{where}.t_x: must be a non-negative number")

    return errors


def validate_result_document(doc: Any) -> List[str]:
    """Validate an emitted frontier result document"""
    if not isinstance(doc, dict):
        return ["result document must be an object"]

    errors = []
    frontier = doc.get('frontier')
    if not isinstance(frontier, list):
        return ["frontier: must be a list"]
    if not isinstance(doc.get('stats', {}), dict):
        errors.append("stats: must be an object")

    previous = None
    for i, point in enumerate(frontier):
        where = f"frontier[{i}]"
        if not isinstance(point, dict):
            errors.append(f"{where}: must be an object")
            continue
        missing = [k for k in RESULT_KEYS if k not in point]
        if missing:
            errors.append(f"{where}: missing {', '.join(missing)}")
            continue
        if not is_cost(point['memory_bytes']) or not is_cost(point['time_s']):
            errors.append(f"{where}: costs must be non-negative numbers")
            continue
        if previous is not None:
            if not (point['memory_bytes'] > previous[0] and point['time_s'] < previous[1]):
                errors.append(f"{where}: frontier must increase in memory and decrease in time")
        previous = (point['memory_bytes'], point['time_s'])
        strategy = point['strategy']
        if not isinstance(strategy, list):
            errors.append(f"{where}.strategy: must be a list")
            continue
        ops = [entry.get('op') for entry in strategy if isinstance(entry, dict)]
        if len(ops) != len(strategy) or len(set(ops)) != len(ops):
            errors.append(f"{where}.strategy: every operator must appear exactly once")
        for j, entry in enumerate(strategy):
            if isinstance(entry, dict) and not is_count(entry.get('config')):
                errors.append(f"{where}.strategy[{j}].config: must be a non-negative integer")

    return errors
