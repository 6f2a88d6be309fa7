"""Reading and writing graph, device and cost-table JSON files"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

from .models import (
    BandwidthProfile, ComputationGraph, DeviceGraph, Edge, Operator, PartitionScheme,
)
from ..utils.errors import FileFormatError, MissingCost
from ..utils.validation import get_cost_table_errors, get_device_errors, get_graph_errors

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def read_json(path: PathLike) -> Any:
    """Parse a JSON file, reporting syntax errors as FileFormatError"""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"File not found: {path}")
    try:
        with open(path, 'r') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise FileFormatError(str(path), [f"invalid JSON at line {e.lineno}: {e.msg}"])


def write_json(data: Any, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w') as f:
        json.dump(data, f, indent=2)
        f.write("\n")
    return path


def graph_from_dict(data: Dict[str, Any], source: str = "<graph>") -> ComputationGraph:
    errors = get_graph_errors(data)
    if errors:
        raise FileFormatError(source, errors)
    operators = [
        Operator(
            id=op['id'],
            name=op.get('name', f"op{op['id']}"),
            tensor_shapes=tuple(tuple(s) for s in op['tensor_shapes']),
            flags=frozenset(op.get('flags', [])),
        )
        for op in data['operators']
    ]
    edges = [
        Edge(id=e['id'], src=e['src'], dst=e['dst'], tensor_shape=tuple(e['tensor_shape']))
        for e in data.get('edges', [])
    ]
    return ComputationGraph(operators, edges)


def graph_to_dict(g: ComputationGraph) -> Dict[str, Any]:
    return {
        'operators': [
            {
                'id': op.id,
                'name': op.name,
                'tensor_shapes': [list(s) for s in op.tensor_shapes],
                'flags': sorted(op.flags),
            }
            for op in g.operators
        ],
        'edges': [
            {'id': e.id, 'src': e.src, 'dst': e.dst, 'tensor_shape': list(e.tensor_shape)}
            for e in g.edges
        ],
    }


def load_graph(path: PathLike) -> ComputationGraph:
    """Load and validate a computation graph file"""
    g = graph_from_dict(read_json(path), source=str(path))
    logger.info("Loaded %s from %s", g, path)
    return g


def dump_graph(g: ComputationGraph, path: PathLike) -> Path:
    return write_json(graph_to_dict(g), path)


def devices_from_dict(data: Dict[str, Any], source: str = "<devices>") -> DeviceGraph:
    errors = get_device_errors(data)
    if errors:
        raise FileFormatError(source, errors)
    schemes = []
    for scheme in data.get('schemes', []):
        profile = BandwidthProfile(
            points=tuple((p['log2_bytes'], p['bandwidth_bytes_per_s']) for p in scheme['profile']),
            latency=scheme.get('latency_s', 0.0),
        )
        schemes.append(PartitionScheme(
            id=str(scheme['id']),
            group_sizes=tuple(scheme['group_sizes']),
            profile=profile,
        ))
    groups = tuple(
        (name, tuple(members)) for name, members in sorted((data.get('groups') or {}).items())
    )
    return DeviceGraph(device_count=data['device_count'], schemes=tuple(schemes), groups=groups)


def devices_to_dict(dev: DeviceGraph) -> Dict[str, Any]:
    doc = {
        'device_count': dev.device_count,
        'schemes': [
            {
                'id': s.id,
                'group_sizes': list(s.group_sizes),
                'latency_s': s.profile.latency,
                'profile': [
                    {'log2_bytes': size, 'bandwidth_bytes_per_s': bw} for size, bw in s.profile.points
                ],
            }
            for s in dev.schemes
        ],
    }
    if dev.groups:
        doc['groups'] = {name: list(members) for name, members in dev.groups}
    return doc


def load_devices(path: PathLike) -> DeviceGraph:
    """Load and validate a device file"""
    dev = devices_from_dict(read_json(path), source=str(path))
    logger.info("Loaded %d devices with %d schemes from %s", dev.device_count, len(dev.schemes), path)
    return dev


def dump_devices(dev: DeviceGraph, path: PathLike) -> Path:
    return write_json(devices_to_dict(dev), path)


def cost_tables_from_dict(data: Dict[str, Any], source: str = "<costs>"):
    from ..planner.costmodel import CostTables, EdgeCost, OperatorCost

    errors = get_cost_table_errors(data)
    if errors:
        raise FileFormatError(source, errors)
    op_costs = {}
    for row in data['op_costs']:
        key = (row['op'], row['cfg'])
        if key in op_costs:
            raise FileFormatError(source, [f"duplicate operator cost for op {key[0]} config {key[1]}"])
        op_costs[key] = OperatorCost(
            mem_param=row.get('m_p', 0), mem_temp=row.get('m_t', 0),
            time_compute=row.get('t_c', 0), time_sync=row.get('t_s', 0),
        )
    edge_costs = {}
    for row in data.get('edge_costs', []):
        key = (row['edge'], row['src_cfg'], row['dst_cfg'])
        if key in edge_costs:
            raise FileFormatError(source, [f"duplicate edge cost for edge {key[0]} configs {key[1:]}"])
        edge_costs[key] = EdgeCost(time_transfer=row.get('t_x', 0))
    return CostTables(op_costs=op_costs, edge_costs=edge_costs)


def cost_tables_to_dict(tables) -> Dict[str, Any]:
    return {
        'op_costs': [
            {'op': op, 'cfg': cfg, 'm_p': c.mem_param, 'm_t': c.mem_temp,
             't_c': c.time_compute, 't_s': c.time_sync}
            for (op, cfg), c in sorted(tables.op_costs.items())
        ],
        'edge_costs': [
            {'edge': e, 'src_cfg': s, 'dst_cfg': d, 't_x': c.time_transfer}
            for (e, s, d), c in sorted(tables.edge_costs.items())
        ],
    }


def load_cost_tables(path: PathLike, g: Optional[ComputationGraph] = None):
    """Load a cost-table file; with ``g``, every key the graph needs must be present"""
    tables = cost_tables_from_dict(read_json(path), source=str(path))
    if g is not None:
        unknown = sorted({op for op, _ in tables.op_costs} - set(g.op_ids))
        if unknown:
            raise FileFormatError(str(path), [f"costs given for unknown operators {unknown}"])
        try:
            tables.check_complete(g)
        except MissingCost as e:
            raise MissingCost(f"{path}: {e}")
    logger.info("Loaded %d operator and %d edge cost entries from %s",
                len(tables.op_costs), len(tables.edge_costs), path)
    return tables


def dump_cost_tables(tables, path: PathLike) -> Path:
    return write_json(cost_tables_to_dict(tables), path)
