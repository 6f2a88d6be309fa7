"""CSV and JSON emission of frontiers, profiles, benchmarks and traces"""

import contextlib
import csv
import json
import sys
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, TextIO, Union

PathLike = Union[str, Path, None]

FRONTIER_COLUMNS = ['memory_bytes', 'time_s', 'strategy_id', 'comm_time_s', 'compute_time_s']


@contextlib.contextmanager
def _open(path: PathLike) -> Iterator[TextIO]:
    """File at ``path``, or stdout for None and '-'"""
    if path is None or str(path) == '-':
        yield sys.stdout
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        yield f


def _export_csv(data: List[Dict], path: PathLike, fieldnames: Sequence[str]) -> None:
    with _open(path) as f:
        writer = csv.DictWriter(f, fieldnames=list(fieldnames), extrasaction='ignore')
        writer.writeheader()
        writer.writerows(data)


def _export_json(data: Any, path: PathLike) -> None:
    with _open(path) as f:
        json.dump(data, f, indent=2, default=str)
        f.write("\n")


def frontier_rows(result) -> List[Dict[str, Any]]:
    """One row per frontier point, ascending memory; ``strategy_id`` is the row index"""
    rows = []
    for i, t in enumerate(result.frontier):
        row = {'memory_bytes': t.memory, 'time_s': t.time, 'strategy_id': i}
        if i < len(result.costs):
            row['comm_time_s'] = result.costs[i].communication
            row['compute_time_s'] = result.costs[i].computation
        rows.append(row)
    return rows


def write_frontier_csv(result, path: PathLike) -> None:
    _export_csv(frontier_rows(result), path, FRONTIER_COLUMNS)


def _strategy_entries(strategy: Dict[int, int], tables=None) -> List[Dict[str, Any]]:
    entries = []
    for op_id, cfg in sorted(strategy.items()):
        entry: Dict[str, Any] = {'op': op_id, 'config': cfg}
        config = tables.config(op_id, cfg) if tables is not None else None
        if config is not None:
            entry.update(config.to_dict())
        entries.append(entry)
    return entries


def result_document(result, tables=None) -> Dict[str, Any]:
    """Frontier plus unrolled strategies; mesh and tensor maps when the config space is known"""
    points = []
    for row, strategy in zip(frontier_rows(result), result.strategies):
        point = {k: v for k, v in row.items() if k != 'strategy_id'}
        point['strategy'] = _strategy_entries(strategy, tables)
        points.append(point)
    return {
        'frontier': points,
        'stats': result.stats,
    }


def write_result_json(result, path: PathLike, tables=None) -> None:
    _export_json(result_document(result, tables), path)


def profile_rows(rows) -> List[Dict[str, Any]]:
    """(count, Choice or Infeasible) pairs as flat rows"""
    flat = []
    for count, outcome in rows:
        if outcome:
            flat.append({'device_count': count, 'status': 'ok',
                         'min_time_s': outcome.time, 'memory_bytes': outcome.memory})
        else:
            flat.append({'device_count': count, 'status': 'infeasible',
                         'min_time_s': '', 'memory_bytes': ''})
    return flat


def write_profile_csv(rows, path: PathLike) -> None:
    _export_csv(profile_rows(rows), path, ['device_count', 'status', 'min_time_s', 'memory_bytes'])


def write_profile_json(rows, path: PathLike) -> None:
    _export_json({'profile': profile_rows(rows)}, path)


def write_bench_csv(rows, path: PathLike) -> None:
    _export_csv([r.to_dict() for r in rows], path,
                ['k', 'ldp_s', 'ft_elimination_s', 'ratio', 'frontier_size'])


def write_bench_json(rows, path: PathLike) -> None:
    _export_json({'bench': [r.to_dict() for r in rows]}, path)


def write_trace(trace: List[dict], path: Optional[PathLike]) -> None:
    _export_json(trace, path)


def choice_document(choice, tables=None, device_count: Optional[int] = None) -> Dict[str, Any]:
    doc: Dict[str, Any] = {
        'memory_bytes': choice.memory,
        'time_s': choice.time,
        'strategy': _strategy_entries(choice.strategy, tables),
    }
    if device_count is not None:
        doc['device_count'] = device_count
    return doc


def write_choice(choice, path: PathLike, fmt: str = 'json', tables=None,
                 device_count: Optional[int] = None) -> None:
    doc = choice_document(choice, tables, device_count)
    if fmt == 'json':
        _export_json(doc, path)
        return
    row = {k: v for k, v in doc.items() if k != 'strategy'}
    row['strategy'] = ' '.join(f"{e['op']}:{e['config']}" for e in doc['strategy'])
    _export_csv([row], path, list(row))
