"""Configuration loader for qst-bell.

Loads settings from config/settings.yaml and environment variables from .env.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml
from dotenv import load_dotenv


# Project root is 3 levels up from this file: src/qst_bell/utils/config.py
PROJECT_ROOT = Path(__file__).resolve().parent.parent.parent.parent

THREADS_ENV_VAR = "QSTBELL_THREADS"


@dataclass(frozen=True)
class LinalgConfig:
    """Numerical tolerances and caps of the dense linear-algebra kernel."""

    normalization_tol: float = 1e-10
    hermitian_tol: float = 1e-12
    eigen_residual_tol: float = 1e-8
    jacobi_tol: float = 1e-12
    jacobi_max_sweeps: int = 100
    max_dim: int = 64


@dataclass(frozen=True)
class StatesConfig:
    """State construction settings."""

    max_d: int = 6


@dataclass(frozen=True)
class GameConfig:
    """Targeting game simulation settings."""

    default_rounds: int = 100_000
    default_seed: int = 0
    # Probability that Bob picks his target from the A' basis
    bob_aprime_probability: float = 0.5


@dataclass(frozen=True)
class BellConfig:
    """Bell sum verification settings."""

    seesaw_trials: int = 20
    seesaw_max_iterations: int = 500
    seesaw_tol: float = 1e-12
    perturbation_samples: int = 50
    perturbation_scale: float = 0.1


@dataclass(frozen=True)
class LhvConfig:
    """Local hidden variable scan settings."""

    exhaustive_max_d: int = 4
    sample_size: int = 1_000_000


@dataclass(frozen=True)
class RuntimeConfig:
    """Parallelism hint for the scans."""

    threads: int = 1


@dataclass(frozen=True)
class OutputConfig:
    """Result serialization settings."""

    format: str = "text"
    csv_significant_digits: int = 7
    schema_version: int = 1


@dataclass(frozen=True)
class LoggingConfig:
    """Logging configuration."""

    level: str = "INFO"
    format: str = "text"


@dataclass(frozen=True)
class AppConfig:
    """Top-level application configuration."""

    linalg: LinalgConfig = field(default_factory=LinalgConfig)
    states: StatesConfig = field(default_factory=StatesConfig)
    game: GameConfig = field(default_factory=GameConfig)
    bell: BellConfig = field(default_factory=BellConfig)
    lhv: LhvConfig = field(default_factory=LhvConfig)
    runtime: RuntimeConfig = field(default_factory=RuntimeConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)


def _load_yaml(config_path: Path | None = None) -> dict[str, Any]:
    """Load settings from YAML config file."""
    if config_path is None:
        config_path = PROJECT_ROOT / "config" / "settings.yaml"

    if not config_path.exists():
        return {}

    with open(config_path) as f:
        return yaml.safe_load(f) or {}


def _build_linalg_config(yaml_data: dict[str, Any]) -> LinalgConfig:
    """Build LinalgConfig from YAML data."""
    linalg_yaml = yaml_data.get("linalg", {})
    defaults = LinalgConfig()
    return LinalgConfig(
        normalization_tol=float(linalg_yaml.get("normalization_tol", defaults.normalization_tol)),
        hermitian_tol=float(linalg_yaml.get("hermitian_tol", defaults.hermitian_tol)),
        eigen_residual_tol=float(linalg_yaml.get("eigen_residual_tol", defaults.eigen_residual_tol)),
        jacobi_tol=float(linalg_yaml.get("jacobi_tol", defaults.jacobi_tol)),
        jacobi_max_sweeps=int(linalg_yaml.get("jacobi_max_sweeps", defaults.jacobi_max_sweeps)),
        max_dim=int(linalg_yaml.get("max_dim", defaults.max_dim)),
    )


def _build_bell_config(yaml_data: dict[str, Any]) -> BellConfig:
    """Build BellConfig from YAML data."""
    bell_yaml = yaml_data.get("bell", {})
    seesaw_yaml = bell_yaml.get("seesaw", {})
    perturbation_yaml = bell_yaml.get("perturbation", {})
    defaults = BellConfig()
    return BellConfig(
        seesaw_trials=int(seesaw_yaml.get("trials", defaults.seesaw_trials)),
        seesaw_max_iterations=int(seesaw_yaml.get("max_iterations", defaults.seesaw_max_iterations)),
        seesaw_tol=float(seesaw_yaml.get("tol", defaults.seesaw_tol)),
        perturbation_samples=int(perturbation_yaml.get("samples", defaults.perturbation_samples)),
        perturbation_scale=float(perturbation_yaml.get("scale", defaults.perturbation_scale)),
    )


def _resolve_threads(runtime_yaml: dict[str, Any]) -> int:
    """Threads come from QSTBELL_THREADS first, then the YAML file."""
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return max(1, int(runtime_yaml.get("threads", 1)))


def load_config(config_path: Path | None = None, env_path: Path | None = None) -> AppConfig:
    """Load the full application configuration.

    Loads settings from:
    1. .env file (QSTBELL_THREADS and other environment overrides)
    2. config/settings.yaml (for all other parameters)

    Args:
        config_path: Optional path to settings.yaml. Defaults to config/settings.yaml.
        env_path: Optional path to .env file. Defaults to project root .env.

    Returns:
        Fully populated AppConfig instance.
    """
    # Load environment variables from .env
    if env_path is None:
        env_path = PROJECT_ROOT / ".env"
    load_dotenv(env_path)

    # Load YAML settings
    yaml_data = _load_yaml(config_path)

    states_yaml = yaml_data.get("states", {})
    states_config = StatesConfig(max_d=int(states_yaml.get("max_d", 6)))

    game_yaml = yaml_data.get("game", {})
    game_config = GameConfig(
        default_rounds=int(game_yaml.get("default_rounds", 100_000)),
        default_seed=int(game_yaml.get("default_seed", 0)),
        bob_aprime_probability=float(game_yaml.get("bob_aprime_probability", 0.5)),
    )

    lhv_yaml = yaml_data.get("lhv", {})
    lhv_config = LhvConfig(
        exhaustive_max_d=int(lhv_yaml.get("exhaustive_max_d", 4)),
        sample_size=int(lhv_yaml.get("sample_size", 1_000_000)),
    )

    runtime_config = RuntimeConfig(threads=_resolve_threads(yaml_data.get("runtime", {})))

    output_yaml = yaml_data.get("output", {})
    output_config = OutputConfig(
        format=output_yaml.get("format", "text"),
        csv_significant_digits=int(output_yaml.get("csv_significant_digits", 7)),
        schema_version=int(output_yaml.get("schema_version", 1)),
    )

    logging_yaml = yaml_data.get("logging", {})
    logging_config = LoggingConfig(
        level=logging_yaml.get("level", "INFO"),
        format=logging_yaml.get("format", "text"),
    )

    return AppConfig(
        linalg=_build_linalg_config(yaml_data),
        states=states_config,
        game=game_config,
        bell=_build_bell_config(yaml_data),
        lhv=lhv_config,
        runtime=runtime_config,
        output=output_config,
        logging=logging_config,
    )
