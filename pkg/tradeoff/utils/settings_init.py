"""Settings loading and logging setup for CLI commands"""

import functools
import logging
import sys

import click

from .config import get_config, validate_config_structure

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'


def configure_logging(level: str) -> None:
    root = logging.getLogger()
    root.setLevel(level.upper())
    if not root.handlers:
        logging.basicConfig(level=level.upper(), format=LOG_FORMAT, stream=sys.stderr)


def with_settings(func):
    """Decorator that loads tradeoff.yaml (or the defaults) and passes it as ``settings``.

    A ``log_level`` option on the command overrides the configured level.
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            config = get_config()
        except ValueError as e:
            click.echo(f"❌ Configuration error: {e}")
            sys.exit(1)
        errors = validate_config_structure(config)
        if errors:
            click.echo("❌ Configuration errors found:")
            for error in errors:
                click.echo(f"  • {error}")
            sys.exit(1)

        configure_logging(kwargs.get('log_level') or config['logging']['level'])
        return func(*args, settings=config, **kwargs)

    return wrapper
