"""Synthetic fixture generation command"""

import sys
from pathlib import Path

import click

from ..graph.loader import dump_cost_tables, dump_graph
from ..planner.fixtures import KINDS, gen_fixture


@click.command('gen-fixture')
@click.option('--kind', type=click.Choice(KINDS), required=True, help='Graph shape')
@click.option('-n', 'n', type=int, default=3, show_default=True,
              help='Chain length, or number of residual blocks')
@click.option('-k', 'k', type=int, default=2, show_default=True, help='Configurations per operator')
@click.option('--seed', type=int, default=0, show_default=True, help='Cost seed')
@click.option('--out-dir', type=click.Path(path_type=Path), default=Path('.'), show_default=True,
              help='Directory for graph.json and costs.json')
def gen_fixture_cmd(kind, n, k, seed, out_dir):
    """Write a seeded synthetic graph and cost table"""
    try:
        g, tables = gen_fixture(kind, n, k, seed)
    except ValueError as e:
        click.echo(f"❌ {e}")
        sys.exit(1)

    graph_path = dump_graph(g, out_dir / 'graph.json')
    costs_path = dump_cost_tables(tables, out_dir / 'costs.json')
    click.echo(f"✅ Generated {kind} fixture: {len(g.operators)} operators, {len(g.edges)} edges")
    click.echo(f"   Graph: {graph_path}")
    click.echo(f"   Costs: {costs_path}")
