"""Config loading: read, validate and convert config/solver.yaml into typed settings."""

import logging
from pathlib import Path
from typing import Optional

import yaml

from src.exceptions import ConfigError
from src.models import MapsConfig, OracleConfig, SolverConfig

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).parent.parent / "config" / "solver.yaml"


def load_config(path: Optional[Path] = None) -> dict:
    """Load and parse the solver YAML. An empty file yields an empty dict."""
    if path is None:
        path = DEFAULT_CONFIG_PATH
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except FileNotFoundError:
        raise ConfigError(f"Solver config not found: {path}")
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML in {path}: {e}")

    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"Solver config {path} must be a mapping")
    return data


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _check(errors: list[str], section: dict, key: str, name: str, predicate, rule: str, integer=False):
    if key not in section:
        return
    value = section[key]
    if not (_is_int(value) if integer else _is_number(value)):
        kind = "an integer" if integer else "a number"
        errors.append(f"'{name}.{key}' must be {kind}, got {value!r}")
    elif not predicate(value):
        errors.append(f"'{name}.{key}' must be {rule}, got {value!r}")


def validate_config(data: dict) -> list[str]:
    """Validate config structure. Returns list of error strings (empty = valid)."""
    errors: list[str] = []

    if not isinstance(data, dict):
        return ["Config must be a dictionary"]

    for name in ("solver", "maps", "oracle"):
        if name in data and not isinstance(data[name], dict):
            errors.append(f"'{name}' must be a dictionary")
    if errors:
        return errors

    solver = data.get("solver", {})
    _check(errors, solver, "n_steps", "solver", lambda v: v >= 1, ">= 1", integer=True)
    _check(errors, solver, "sigma", "solver", lambda v: v > 0, "> 0")
    _check(errors, solver, "max_newton_iters", "solver", lambda v: v >= 1, ">= 1", integer=True)
    _check(errors, solver, "damping", "solver", lambda v: 0 < v <= 1, "in (0, 1]")
    _check(errors, solver, "max_backtracks", "solver", lambda v: v >= 1, ">= 1", integer=True)

    maps = data.get("maps", {})
    _check(errors, maps, "curve_resolution", "maps", lambda v: v >= 64, ">= 64", integer=True)
    _check(errors, maps, "laurent_samples", "maps", lambda v: v >= 8, ">= 8", integer=True)
    if "laurent_radii" in maps:
        radii = maps["laurent_radii"]
        if not isinstance(radii, list) or not radii:
            errors.append("'maps.laurent_radii' must be a non-empty list")
        elif not all(_is_number(r) and r > 0 for r in radii):
            errors.append(f"'maps.laurent_radii' must contain positive numbers, got {radii!r}")

    oracle = data.get("oracle", {})
    _check(errors, oracle, "grid_points", "oracle", lambda v: v >= 5, ">= 5", integer=True)
    _check(errors, oracle, "shrink", "oracle", lambda v: v > 1, "> 1")
    _check(errors, oracle, "depth", "oracle", lambda v: v >= 1, ">= 1", integer=True)

    return errors


def _load_section(path: Optional[Path], name: str) -> dict:
    data = load_config(path)
    errors = validate_config(data)
    if errors:
        raise ConfigError("Invalid solver config: " + "; ".join(errors))
    return dict(data.get(name, {}))


def load_solver_config(path: Optional[Path] = None, **overrides) -> SolverConfig:
    """SolverConfig from the file, with non-None keyword overrides (CLI flags) on top."""
    values = _load_section(path, "solver")
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        cfg = SolverConfig(**values)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid solver settings: {e}")
    logger.debug("Solver config: %s", cfg)
    return cfg


def load_maps_config(path: Optional[Path] = None) -> MapsConfig:
    values = _load_section(path, "maps")
    if "laurent_radii" in values:
        values["laurent_radii"] = tuple(float(r) for r in values["laurent_radii"])
    try:
        return MapsConfig(**values)
    except TypeError as e:
        raise ConfigError(f"Invalid maps settings: {e}")


def load_oracle_config(path: Optional[Path] = None) -> OracleConfig:
    values = _load_section(path, "oracle")
    try:
        return OracleConfig(**values)
    except TypeError as e:
        raise ConfigError(f"Invalid oracle settings: {e}")
