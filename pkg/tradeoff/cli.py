"""Main CLI entry point for the parallelization tradeoff planner"""

import click
import sys

from . import __version__
from .utils.config import create_default_config, save_config, load_config, get_config_path, validate_config_file
from .commands.run import run
from .commands.fixture import gen_fixture_cmd


@click.group()
@click.version_option(version=__version__)
def cli():
    """Parallel Tradeoff CLI: time/memory frontiers of parallelization strategies"""
    pass


@cli.command('init-config')
@click.option('--force', is_flag=True, help='Overwrite an existing file without asking')
def init_config(force):
    """Write tradeoff.yaml with the default settings"""
    config_path = get_config_path()
    if config_path.exists() and not force:
        if not click.confirm("Configuration file already exists. Overwrite?"):
            click.echo("Setup cancelled.")
            return

    try:
        save_config(create_default_config())
        click.echo(f"✅ Configuration saved to {config_path}")
    except OSError as e:
        click.echo(f"❌ Failed to save configuration: {e}")
        sys.exit(1)


@cli.command('validate-config')
def validate_config():
    """Validate the current configuration file"""
    try:
        config_path = get_config_path()

        if not config_path.exists():
            click.echo("❌ Configuration file not found. Run 'tradeoff init-config' first.")
            sys.exit(1)

        click.echo(f"🔍 Validating configuration: {config_path}")

        errors = validate_config_file()

        if not errors:
            click.echo("✅ Configuration is valid!")

            config = load_config(force_reload=True)
            search = config['search']
            click.echo("\n📋 Current Configuration:")
            click.echo(f"  Max mesh rank: {search['max_mesh_rank']}")
            click.echo(f"  Heuristic policy: {search['heuristic_policy']}")
            click.echo(f"  Threads: {search['threads']}")
            click.echo(f"  Interpolation: {config['costmodel']['interpolation']}")
            click.echo(f"  Output format: {config['output']['format']}")
        else:
            click.echo("❌ Configuration errors found:")
            for error in errors:
                click.echo(f"  • {error}")
            sys.exit(1)

    except ValueError as e:
        click.echo(f"❌ Validation error: {e}")
        sys.exit(1)


# Register commands
cli.add_command(run)
cli.add_command(gen_fixture_cmd)


def main():
    """Main entry point for the CLI"""
    cli()


if __name__ == '__main__':
    main()
