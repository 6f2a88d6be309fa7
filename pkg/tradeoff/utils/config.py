"""Configuration management for YAML config files"""

import copy
import logging
import yaml
from pathlib import Path
from typing import Dict, Any, List, Optional


CONFIG_FILE = "tradeoff.yaml"
_cached_config: Optional[Dict[str, Any]] = None

VALID_POLICIES = ["min_memory", "weighted"]
VALID_INTERPOLATIONS = ["linear", "log"]
VALID_FORMATS = ["csv", "json"]
VALID_LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


def get_config_path() -> Path:
    """Get the path to the config file"""
    return Path.cwd() / CONFIG_FILE


def create_default_config() -> Dict[str, Any]:
    """Create default configuration structure"""
    return {
        'search': {
            'max_mesh_rank': 2,
            'composite_cap': 4096,
            'brute_force_limit': 10_000_000,
            'heuristic_policy': 'min_memory',
            'heuristic_alpha': 0.5,
            'threads': 1,
            'seed': None,
        },
        'costmodel': {
            'dtype_bytes': 4,
            'interpolation': 'linear',
            'seconds_per_element': 1e-9,
            'comm_scale': 1.0,
        },
        'bench': {
            'n': 16,
            'ks': [8, 16, 32],
        },
        'output': {
            'format': 'csv',
        },
        'logging': {
            'level': 'WARNING',
        },
    }


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(force_reload: bool = False) -> Dict[str, Any]:
    """Load configuration from YAML file, filling gaps from the defaults"""
    global _cached_config

    if _cached_config is not None and not force_reload:
        return _cached_config

    config_path = get_config_path()

    if not config_path.exists():
        raise FileNotFoundError(f"Configuration file not found: {config_path}")

    try:
        with open(config_path, 'r') as f:
            raw = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ValueError(f"Invalid YAML configuration: {e}")

    if not isinstance(raw, dict):
        raise ValueError("Invalid YAML configuration: top level must be a mapping")

    _cached_config = _merge(create_default_config(), raw)
    return _cached_config


def save_config(config: Dict[str, Any]) -> None:
    """Save configuration to YAML file"""
    global _cached_config

    config_path = get_config_path()

    try:
        with open(config_path, 'w') as f:
            yaml.dump(config, f, default_flow_style=False, indent=2, sort_keys=False)
        _cached_config = config
    except OSError as e:
        raise OSError(f"Failed to save configuration: {e}")


def get_config() -> Dict[str, Any]:
    """Get current configuration, or the defaults when no file exists"""
    try:
        return load_config()
    except FileNotFoundError:
        logging.getLogger(__name__).debug("No %s found, using defaults", CONFIG_FILE)
        return create_default_config()


def _check_int(errors: List[str], section: Dict[str, Any], name: str, minimum: int) -> None:
    if name in section:
        value = section[name]
        if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
            errors.append(f"{name} must be an integer >= {minimum}")


def _check_number(errors: List[str], section: Dict[str, Any], name: str,
                  low: float, high: Optional[float] = None) -> None:
    if name in section:
        value = section[name]
        ok = isinstance(value, (int, float)) and not isinstance(value, bool) and value >= low
        if ok and high is not None:
            ok = value <= high
        if not ok:
            bound = f"between {low} and {high}" if high is not None else f">= {low}"
            errors.append(f"{name} must be a number {bound}")


def validate_config_structure(config: Dict[str, Any]) -> List[str]:
    """Validate configuration structure and return any errors"""
    errors = []

    if not isinstance(config, dict):
        return ["configuration must be a mapping"]

    # Check sections
    known_sections = create_default_config().keys()
    for section in config:
        if section not in known_sections:
            errors.append(f"Unknown section: {section}")

    for section in known_sections:
        if section in config and not isinstance(config[section], dict):
            errors.append(f"{section} section must be a dictionary")

    # Validate search section
    search = config.get('search')
    if isinstance(search, dict):
        _check_int(errors, search, 'max_mesh_rank', 1)
        _check_int(errors, search, 'composite_cap', 1)
        _check_int(errors, search, 'brute_force_limit', 1)
        _check_int(errors, search, 'threads', 1)
        if 'heuristic_policy' in search and search['heuristic_policy'] not in VALID_POLICIES:
            errors.append(f"heuristic_policy must be one of {', '.join(VALID_POLICIES)}")
        _check_number(errors, search, 'heuristic_alpha', 0.0, 1.0)
        seed = search.get('seed')
        if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool)):
            errors.append("seed must be an integer or null")

    # Validate costmodel section
    costmodel = config.get('costmodel')
    if isinstance(costmodel, dict):
        _check_int(errors, costmodel, 'dtype_bytes', 1)
        if 'interpolation' in costmodel and costmodel['interpolation'] not in VALID_INTERPOLATIONS:
            errors.append(f"interpolation must be one of {', '.join(VALID_INTERPOLATIONS)}")
        _check_number(errors, costmodel, 'seconds_per_element', 0.0)
        _check_number(errors, costmodel, 'comm_scale', 0.0)

    # Validate bench section
    bench = config.get('bench')
    if isinstance(bench, dict):
        _check_int(errors, bench, 'n', 2)
        if 'ks' in bench:
            ks = bench['ks']
            if not isinstance(ks, list) or not ks or not all(isinstance(k, int) and k >= 1 for k in ks):
                errors.append("ks must be a non-empty list of positive integers")

    # Validate output and logging sections
    output = config.get('output')
    if isinstance(output, dict):
        if 'format' in output and output['format'] not in VALID_FORMATS:
            errors.append(f"format must be one of {', '.join(VALID_FORMATS)}")

    log_section = config.get('logging')
    if isinstance(log_section, dict):
        level = log_section.get('level', 'WARNING')
        if not isinstance(level, str) or level.upper() not in VALID_LOG_LEVELS:
            errors.append(f"logging level must be one of {', '.join(VALID_LOG_LEVELS)}")

    return errors


def validate_config_file() -> List[str]:
    """Validate the current config file"""
    try:
        config_path = get_config_path()
        if not config_path.exists():
            raise FileNotFoundError(f"Configuration file not found: {config_path}")
        with open(config_path, 'r') as f:
            raw = yaml.safe_load(f) or {}
        return validate_config_structure(raw)
    except Exception as e:
        return [f"Failed to load config file: {e}"]
