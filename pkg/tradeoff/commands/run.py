"""The run command: frontier, deployment options, oracle check and benchmark"""

import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import click

from ..graph.loader import load_cost_tables, load_devices, load_graph
from ..planner.bench import benchmark_linear
from ..planner.configs import build_config_space
from ..planner.costmodel import SyntheticOpModel, build_cost_tables
from ..planner.oracle import oracle_check
from ..planner.options import (
    ParallelismSweep, device_family, mini_parallelism, pick_min_time, profile,
)
from ..planner.solver import FTOptions, ft
from ..utils import export
from ..utils.config import VALID_FORMATS, VALID_LOG_LEVELS
from ..utils.errors import NoFeasibleCount, TradeoffError
from ..utils.settings_init import with_settings

logger = logging.getLogger(__name__)

MODES = ['frontier', 'mini-time', 'mini-parallelism', 'profile', 'oracle-check', 'bench']

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2


@dataclass
class RunSpec:
    mode: str
    graph: Optional[Path] = None
    devices: Optional[Path] = None
    costs: Optional[Path] = None
    memory_limit: Optional[float] = None
    counts: List[int] = field(default_factory=list)
    threads: int = 1
    seed: Optional[int] = None
    out: Optional[Path] = None
    fmt: str = 'csv'
    trace: Optional[Path] = None

    def errors(self) -> List[str]:
        errors = []
        if self.mode not in MODES:
            return [f"mode must be one of {', '.join(MODES)}"]
        if self.threads < 1:
            errors.append("--threads must be >= 1")
        if self.fmt not in VALID_FORMATS:
            errors.append(f"--format must be one of {', '.join(VALID_FORMATS)}")
        if self.mode != 'bench' and self.graph is None:
            errors.append(f"--graph is required in {self.mode} mode")
        if self.mode in ('frontier', 'mini-time', 'oracle-check') and not (self.costs or self.devices):
            errors.append(f"--costs or --devices is required in {self.mode} mode")
        if self.mode in ('mini-time', 'mini-parallelism', 'profile'):
            if self.memory_limit is None:
                errors.append(f"--memory-limit is required in {self.mode} mode")
            elif self.memory_limit < 0:
                errors.append("--memory-limit must be non-negative")
        if self.mode in ('mini-parallelism', 'profile'):
            if not self.counts:
                errors.append(f"--counts is required in {self.mode} mode")
            elif self.counts != sorted(self.counts) or min(self.counts) < 1:
                errors.append("--counts must be positive and ascending")
        return errors


def parse_counts(value: Optional[str]) -> List[int]:
    if not value:
        return []
    try:
        return [int(part) for part in value.split(',') if part.strip()]
    except ValueError:
        raise click.BadParameter(f"'{value}' is not a comma-separated list of integers")


def _op_model(settings: Dict[str, Any]) -> SyntheticOpModel:
    cm = settings['costmodel']
    return SyntheticOpModel(seconds_per_element=cm['seconds_per_element'], dtype_bytes=cm['dtype_bytes'],
                            comm_scale=cm['comm_scale'], interpolation=cm['interpolation'])


def _load_inputs(spec: RunSpec, settings: Dict[str, Any]):
    """Graph, device graph (or None) and complete cost tables"""
    g = load_graph(spec.graph)
    dev = load_devices(spec.devices) if spec.devices else None
    rank = settings['search']['max_mesh_rank']

    if dev is None:
        return g, None, load_cost_tables(spec.costs, g)

    # a cost file next to --devices replaces the synthetic operator model
    space = build_config_space(g, dev.device_count, rank)
    model = load_cost_tables(spec.costs) if spec.costs else _op_model(settings)
    return g, dev, build_cost_tables(g, space, dev, model, threads=spec.threads, max_rank=rank)


def _options(spec: RunSpec, settings: Dict[str, Any]) -> FTOptions:
    return FTOptions.from_config(settings, threads=spec.threads, seed=spec.seed)


def _run_frontier(spec: RunSpec, settings: Dict[str, Any]) -> int:
    g, dev, tables = _load_inputs(spec, settings)
    result = ft(g, dev, tables, _options(spec, settings))
    if spec.fmt == 'json':
        export.write_result_json(result, spec.out, tables)
    else:
        export.write_frontier_csv(result, spec.out)
    if spec.trace:
        export.write_trace(result.trace, spec.trace)
    if spec.out:
        click.echo(f"✅ Frontier with {len(result)} points written to {spec.out}")
        click.echo(f"   Eliminations: {result.stats['eliminations']}")
    return EXIT_OK


def _run_mini_time(spec: RunSpec, settings: Dict[str, Any]) -> int:
    g, dev, tables = _load_inputs(spec, settings)
    result = ft(g, dev, tables, _options(spec, settings))
    if spec.trace:
        export.write_trace(result.trace, spec.trace)
    outcome = pick_min_time(result, spec.memory_limit)
    if not outcome:
        click.echo(f"❌ Infeasible: {outcome.reason}")
        return EXIT_INFEASIBLE
    click.echo(f"✅ Fastest strategy within {spec.memory_limit:g} bytes: "
               f"time {outcome.time:g} s, memory {outcome.memory:g} bytes")
    if spec.out:
        export.write_choice(outcome, spec.out, spec.fmt, tables)
    return EXIT_OK


def _sweep(spec: RunSpec, settings: Dict[str, Any]):
    g = load_graph(spec.graph)
    template = load_devices(spec.devices) if spec.devices else None
    return ParallelismSweep(g, device_family(template), _op_model(settings), _options(spec, settings),
                            max_rank=settings['search']['max_mesh_rank'])


def _run_mini_parallelism(spec: RunSpec, settings: Dict[str, Any]) -> int:
    sweep = _sweep(spec, settings)
    try:
        count, choice = mini_parallelism(sweep, spec.memory_limit, spec.counts)
    except NoFeasibleCount as e:
        click.echo(f"❌ {e}")
        return EXIT_INFEASIBLE
    click.echo(f"✅ {count} devices suffice: time {choice.time:g} s, {choice.memory:g} bytes per device")
    if spec.out:
        export.write_choice(choice, spec.out, spec.fmt, device_count=count)
    return EXIT_OK


def _run_profile(spec: RunSpec, settings: Dict[str, Any]) -> int:
    rows = profile(_sweep(spec, settings), spec.memory_limit, spec.counts)
    if spec.fmt == 'json':
        export.write_profile_json(rows, spec.out)
    else:
        export.write_profile_csv(rows, spec.out)
    if spec.out:
        click.echo(f"✅ Profile for {len(rows)} device counts written to {spec.out}")
    if not any(outcome for _, outcome in rows):
        click.echo("❌ Infeasible at every device count")
        return EXIT_INFEASIBLE
    return EXIT_OK


def _run_oracle_check(spec: RunSpec, settings: Dict[str, Any]) -> int:
    g, dev, tables = _load_inputs(spec, settings)
    report = oracle_check(g, dev, tables, _options(spec, settings),
                          limit=settings['search']['brute_force_limit'])
    click.echo(report.status)
    click.echo(f"   Frontier points: {len(report.result)} (oracle {len(report.oracle)})")
    click.echo(f"   Heuristic eliminations: {report.result.heuristic_count}")
    click.echo(f"   Oracle points dominated: {report.dominated_fraction:.3f}")
    for point in report.missing:
        click.echo(f"   - missing {point}")
    for point in report.extra:
        click.echo(f"   + extra {point}")
    if spec.out:
        if spec.fmt == 'json':
            export.write_result_json(report.result, spec.out, tables)
        else:
            export.write_frontier_csv(report.result, spec.out)
    if spec.trace:
        export.write_trace(report.result.trace, spec.trace)
    # heuristic eliminations may legitimately lose points
    if not report.match and report.result.heuristic_count == 0:
        return EXIT_ERROR
    return EXIT_OK


def _run_bench(spec: RunSpec, settings: Dict[str, Any]) -> int:
    bench = settings['bench']
    seed = spec.seed if spec.seed is not None else (settings['search']['seed'] or 0)
    rows = benchmark_linear(bench['n'], bench['ks'], seed, spec.threads)
    if spec.fmt == 'json':
        export.write_bench_json(rows, spec.out)
    else:
        export.write_bench_csv(rows, spec.out)
    if spec.out:
        click.echo(f"✅ Benchmark for k in {bench['ks']} written to {spec.out}")
        for row in rows:
            click.echo(f"   k={row.k}: ldp {row.ldp_s:.4f}s, ft_elimination {row.ft_elimination_s:.4f}s "
                       f"(x{row.ratio:.1f})")
    return EXIT_OK


HANDLERS = {
    'frontier': _run_frontier,
    'mini-time': _run_mini_time,
    'mini-parallelism': _run_mini_parallelism,
    'profile': _run_profile,
    'oracle-check': _run_oracle_check,
    'bench': _run_bench,
}


def run_spec(spec: RunSpec, settings: Dict[str, Any]) -> int:
    """Validate ``spec``, dispatch on its mode and return the exit status"""
    errors = spec.errors()
    if errors:
        click.echo("❌ Invalid arguments:")
        for error in errors:
            click.echo(f"  • {error}")
        return EXIT_ERROR
    try:
        return HANDLERS[spec.mode](spec, settings)
    except FileNotFoundError as e:
        click.echo(f"❌ {e}")
    except TradeoffError as e:
        click.echo(f"❌ {type(e).__name__}: {e}")
    except ValueError as e:
        click.echo(f"❌ {e}")
    return EXIT_ERROR


@click.command()
@click.option('--mode', type=click.Choice(MODES), default='frontier', show_default=True,
              help='What to compute')
@click.option('--graph', type=click.Path(path_type=Path), help='Computation graph JSON')
@click.option('--devices', type=click.Path(path_type=Path), help='Device graph JSON')
@click.option('--costs', type=click.Path(path_type=Path), help='Cost table JSON')
@click.option('--memory-limit', type=float, help='Memory limit in bytes (per device)')
@click.option('--counts', help='Comma-separated ascending device counts, e.g. 1,2,4')
@click.option('--threads', type=int, help='Worker threads (default from config)')
@click.option('--seed', type=int, help='Seed for randomized tie-breaks and benchmark fixtures')
@click.option('--out', type=click.Path(path_type=Path), help='Output file (default: stdout)')
@click.option('--format', 'fmt', type=click.Choice(VALID_FORMATS), help='Output format (default from config)')
@click.option('--trace', type=click.Path(path_type=Path), help='Write the elimination log as JSON')
@click.option('--log-level', type=click.Choice(VALID_LOG_LEVELS, case_sensitive=False),
              help='Logging level (default from config)')
@with_settings
def run(mode, graph, devices, costs, memory_limit, counts, threads, seed, out, fmt, trace,
        log_level, settings):
    """Compute the time/memory frontier or a deployment option"""
    spec = RunSpec(
        mode=mode,
        graph=graph,
        devices=devices,
        costs=costs,
        memory_limit=memory_limit,
        counts=parse_counts(counts),
        threads=threads if threads is not None else settings['search']['threads'],
        seed=seed,
        out=out,
        fmt=fmt or settings['output']['format'],
        trace=trace,
    )
    status = run_spec(spec, settings)
    if status:
        sys.exit(status)
