"""Tests for the configuration loader."""

import os
from pathlib import Path
from unittest.mock import patch

import pytest
import yaml

from qst_bell.utils.config import THREADS_ENV_VAR, AppConfig, load_config


@pytest.fixture
def minimal_settings(tmp_path: Path) -> Path:
    """Create a minimal settings.yaml for testing."""
    settings = {
        "linalg": {
            "jacobi_tol": 1e-13,
            "jacobi_max_sweeps": 50,
        },
        "states": {"max_d": 5},
        "game": {
            "default_rounds": 2000,
            "default_seed": 7,
        },
        "bell": {
            "seesaw": {"trials": 3, "max_iterations": 100},
            "perturbation": {"samples": 5, "scale": 0.05},
        },
        "lhv": {"exhaustive_max_d": 3},
        "runtime": {"threads": 2},
        "output": {"format": "json"},
        "logging": {"level": "DEBUG", "format": "json"},
    }

    config_path = tmp_path / "settings.yaml"
    with open(config_path, "w") as f:
        yaml.dump(settings, f)

    return config_path


@pytest.fixture
def env_file(tmp_path: Path) -> Path:
    """Create an empty .env file."""
    env_path = tmp_path / ".env"
    env_path.write_text("")
    return env_path


@pytest.fixture(autouse=True)
def clean_threads_env(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv(THREADS_ENV_VAR, raising=False)


def test_load_config_from_yaml(minimal_settings: Path, env_file: Path) -> None:
    """Test that config loads correctly from YAML."""
    config = load_config(config_path=minimal_settings, env_path=env_file)

    assert isinstance(config, AppConfig)
    assert config.linalg.jacobi_tol == 1e-13
    assert config.linalg.jacobi_max_sweeps == 50
    assert config.states.max_d == 5
    assert config.game.default_rounds == 2000
    assert config.game.default_seed == 7
    assert config.lhv.exhaustive_max_d == 3
    assert config.output.format == "json"
    assert config.logging.level == "DEBUG"


def test_partial_sections_keep_defaults(minimal_settings: Path, env_file: Path) -> None:
    config = load_config(config_path=minimal_settings, env_path=env_file)

    assert config.linalg.normalization_tol == 1e-10
    assert config.linalg.eigen_residual_tol == 1e-8
    assert config.game.bob_aprime_probability == 0.5
    assert config.lhv.sample_size == 1_000_000
    assert config.output.csv_significant_digits == 7


def test_nested_bell_sections(minimal_settings: Path, env_file: Path) -> None:
    """Test that the seesaw and perturbation sub-sections are read."""
    config = load_config(config_path=minimal_settings, env_path=env_file)

    assert config.bell.seesaw_trials == 3
    assert config.bell.seesaw_max_iterations == 100
    assert config.bell.seesaw_tol == 1e-12
    assert config.bell.perturbation_samples == 5
    assert config.bell.perturbation_scale == 0.05


def test_defaults_when_yaml_missing(env_file: Path, tmp_path: Path) -> None:
    """Test that defaults are used when settings.yaml doesn't exist."""
    config = load_config(config_path=tmp_path / "nonexistent.yaml", env_path=env_file)

    assert config.states.max_d == 6
    assert config.game.default_rounds == 100_000
    assert config.bell.seesaw_trials == 20
    assert config.bell.seesaw_max_iterations == 500
    assert config.lhv.exhaustive_max_d == 4
    assert config.runtime.threads == 1
    assert config.output.schema_version == 1


def test_threads_from_yaml(minimal_settings: Path, env_file: Path) -> None:
    config = load_config(config_path=minimal_settings, env_path=env_file)
    assert config.runtime.threads == 2


def test_threads_env_overrides_yaml(
    minimal_settings: Path, env_file: Path, monkeypatch: pytest.MonkeyPatch
) -> None:
    monkeypatch.setenv(THREADS_ENV_VAR, "6")
    config = load_config(config_path=minimal_settings, env_path=env_file)
    assert config.runtime.threads == 6


def test_threads_from_dotenv_file(minimal_settings: Path, tmp_path: Path) -> None:
    env_path = tmp_path / "threads.env"
    env_path.write_text(f"{THREADS_ENV_VAR}=3\n")

    with patch.dict(os.environ, {}, clear=False):
        config = load_config(config_path=minimal_settings, env_path=env_path)

    assert config.runtime.threads == 3


def test_invalid_threads_env_falls_back(
    minimal_settings: Path, env_file: Path, monkeypatch: pytest.MonkeyPatch
) -> None:
    monkeypatch.setenv(THREADS_ENV_VAR, "many")
    config = load_config(config_path=minimal_settings, env_path=env_file)
    assert config.runtime.threads == 2


def test_config_is_frozen(minimal_settings: Path, env_file: Path) -> None:
    """Test that config dataclasses are immutable."""
    config = load_config(config_path=minimal_settings, env_path=env_file)

    with pytest.raises(AttributeError):
        config.states.max_d = 10  # type: ignore
