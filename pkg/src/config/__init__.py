"""Configuration loading for ctw_sp.

Loads solver, oracle and benchmark settings from a YAML file. Every field
has a default, so a missing file is not an error; a file that is present
must be valid.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Optional

import yaml


# --------------------------------------------------------------------------- #
# Locations
# --------------------------------------------------------------------------- #

# Environment variable naming an alternative config file.
CONFIG_ENV_VAR: str = "CTW_CONFIG"

# Repo-relative default, resolved from this file (src/config/__init__.py).
DEFAULT_CONFIG_PATH: Path = Path(__file__).resolve().parents[2] / "config" / "solver.yaml"

# --------------------------------------------------------------------------- #
# Limits
# --------------------------------------------------------------------------- #

# Largest instance the layout-enumeration oracle accepts. Connected-layout
# search stays interactive up to roughly eleven vertices.
DEFAULT_ORACLE_LIMIT: int = 11

# Largest instance for unrestricted-layout treewidth. Unrestricted layouts
# grow faster than connected ones, hence the lower ceiling.
DEFAULT_TW_LIMIT: int = 9

DEFAULT_BENCH_SIZES: tuple[int, ...] = (200, 400, 800, 1600, 3200)


@dataclass
class SolverConfig:
    """Settings shared by the solver, the oracle and the CLI.

    Attributes:
        oracle_limit: Max vertices for brute-force connected-layout search
        tw_limit: Max vertices for brute-force treewidth
        cap_slack: Added to the table cap (saturation audits)
        jobs: Worker processes for per-block solves (1 = in-process)
        witness: Whether solves reconstruct a witness layout
        audit_witness_steps: Re-check every composed witness against its
            table entry, not only the final one
        compare_trials: Instances per generator family in compare runs
        compare_max_n: Vertex ceiling for generated compare instances
        table_audit_max_vertices: Largest entry instance checked by the
            table-level audit
        bench_sizes: Target vertex counts for the scaling benchmark
        seed: Default seed for generators
    """

    oracle_limit: int = DEFAULT_ORACLE_LIMIT
    tw_limit: int = DEFAULT_TW_LIMIT
    cap_slack: int = 0
    jobs: int = 1
    witness: bool = True
    audit_witness_steps: bool = False
    compare_trials: int = 500
    compare_max_n: int = 8
    table_audit_max_vertices: int = 9
    bench_sizes: list[int] = field(default_factory=lambda: list(DEFAULT_BENCH_SIZES))
    seed: int = 0


def _check_value(name: str, value: Any, default: Any, source: Path) -> Any:
    """Validate one YAML value against the type of its default."""
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ValueError(f"{source}: '{name}' must be true or false, got {value!r}")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValueError(f"{source}: '{name}' must be an integer, got {value!r}")
        if value < 0:
            raise ValueError(f"{source}: '{name}' must be non-negative, got {value}")
        return value
    if isinstance(default, list):
        if not isinstance(value, list) or not all(
            isinstance(v, int) and not isinstance(v, bool) and v > 0 for v in value
        ):
            raise ValueError(f"{source}: '{name}' must be a list of positive integers")
        return list(value)
    return value


def resolve_config_path(config_path: Optional[Path] = None) -> Path:
    """Pick the config file: explicit path, then $CTW_CONFIG, then the default."""
    if config_path is not None:
        return Path(config_path)
    env_path = os.environ.get(CONFIG_ENV_VAR)
    if env_path:
        return Path(env_path)
    return DEFAULT_CONFIG_PATH


def load_config(config_path: Optional[Path] = None) -> SolverConfig:
    """Load solver configuration from a YAML file.

    Args:
        config_path: Path to a solver.yaml file. When None, $CTW_CONFIG
            or config/solver.yaml is used.

    Returns:
        SolverConfig with file values applied over the defaults

    Raises:
        ValueError: If the YAML is invalid, has unknown keys, or a value
            has the wrong type
    """
    path = resolve_config_path(config_path)
    config = SolverConfig()
    if not path.exists():
        return config

    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as e:
        raise ValueError(f"Invalid YAML in {path}: {e}") from e

    if not data:
        return config
    if not isinstance(data, dict):
        raise ValueError(f"{path}: top level must be a mapping")

    # Accept either a flat mapping or one nested under "solver".
    if set(data) == {"solver"} and isinstance(data["solver"], dict):
        data = data["solver"]

    known = {f.name: f for f in fields(SolverConfig)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ValueError(f"{path}: unknown config keys: {', '.join(unknown)}")

    for name, value in data.items():
        setattr(config, name, _check_value(name, value, getattr(config, name), path))

    if config.jobs < 1:
        raise ValueError(f"{path}: 'jobs' must be at least 1")
    return config
