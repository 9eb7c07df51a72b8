"""Experiment configuration files.

A config is a JSON document::

    {
      "experiment": "bernoulli-bound",
      "mode": "exact",
      "parameters": {"p": [[0.1, 0.1]]},
      "monte_carlo": {"reps": 10000, "t_star": 30.0, "seed": 7},
      "output": {"directory": "out", "prefix": "bernoulli"}
    }

Command-line options override the matching fields before validation. The
seed has no default: every run must name its master seed.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Literal

from .errors import ConfigurationError
from .logging import get_logger
from .rng import MAX_SEED

logger = get_logger(__name__)

EXPERIMENTS = ("bernoulli-bound", "matern-scaling", "renewal-bound", "stein-factor", "palm-exact")
ConfigMode = Literal["exact", "mc"]
MODES: tuple[ConfigMode, ...] = ("exact", "mc")


@dataclass(frozen=True)
class MonteCarloSettings:
    """Replication count, time horizon T* and master seed."""

    seed: int
    reps: int = 10_000
    t_star: float = 30.0


@dataclass(frozen=True)
class OutputSettings:
    """Where an experiment writes its CSV table and JSON sidecar."""

    directory: Path = Path("out")
    prefix: str = ""

    def table_path(self, experiment: str) -> Path:
        return self.directory / f"{self.prefix or experiment}.csv"

    def sidecar_path(self, experiment: str) -> Path:
        return self.directory / f"{self.prefix or experiment}.json"


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated experiment configuration."""

    name: str
    parameters: dict[str, Any] = field(default_factory=dict)
    monte_carlo: MonteCarloSettings = field(default_factory=lambda: MonteCarloSettings(seed=0))
    output: OutputSettings = field(default_factory=OutputSettings)
    mode: ConfigMode = "exact"

    def canonical(self) -> dict[str, Any]:
        """Resolved settings as plain JSON data (output paths excluded)."""
        return {
            "experiment": self.name,
            "mode": self.mode,
            "parameters": self.parameters,
            "monte_carlo": asdict(self.monte_carlo),
        }

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON form."""
        text = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _section(data: dict[str, Any], key: str) -> dict[str, Any]:
    value = data.get(key, {})
    if not isinstance(value, dict):
        raise ConfigurationError(key, "must be an object")
    return value


def _integer(value: Any, path: str, minimum: int, maximum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigurationError(path, f"must be an integer, got {value!r}")
    if value < minimum or (maximum is not None and value > maximum):
        bound = f"[{minimum}, {maximum}]" if maximum is not None else f">= {minimum}"
        raise ConfigurationError(path, f"must be {bound}, got {value}")
    return value


def parse_experiment_config(
    data: Any,
    *,
    seed: int | None = None,
    out: str | Path | None = None,
    mode: str | None = None,
    reps: int | None = None,
) -> ExperimentConfig:
    """Validate a decoded config document and apply overrides.

    Raises:
        ConfigurationError: For the first invalid field, with its dotted path.
    """
    if not isinstance(data, dict):
        raise ConfigurationError("", "config must be a JSON object")
    name = data.get("experiment")
    if name not in EXPERIMENTS:
        raise ConfigurationError(
            "experiment", f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}"
        )

    resolved_mode = mode if mode is not None else data.get("mode", "exact")
    if resolved_mode not in MODES:
        raise ConfigurationError(
            "mode", f"must be one of {', '.join(MODES)}, got {resolved_mode!r}"
        )

    parameters = _section(data, "parameters")
    mc = _section(data, "monte_carlo")
    raw_seed = seed if seed is not None else mc.get("seed")
    if raw_seed is None:
        raise ConfigurationError("monte_carlo.seed", "a master seed is required")
    settings = MonteCarloSettings(
        seed=_integer(raw_seed, "monte_carlo.seed", 0, MAX_SEED),
        reps=_integer(reps if reps is not None else mc.get("reps", 10_000), "monte_carlo.reps", 1),
        t_star=_positive(mc.get("t_star", 30.0), "monte_carlo.t_star"),
    )

    output = _section(data, "output")
    directory = out if out is not None else output.get("directory", "out")
    prefix = output.get("prefix", "")
    if not isinstance(prefix, str):
        raise ConfigurationError("output.prefix", "must be a string")
    return ExperimentConfig(
        name, parameters, settings, OutputSettings(Path(directory), prefix), resolved_mode
    )


def _positive(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, int | float) or not value > 0:
        raise ConfigurationError(path, f"must be a positive number, got {value!r}")
    return float(value)


def load_experiment_config(
    path: str | Path,
    *,
    seed: int | None = None,
    out: str | Path | None = None,
    mode: str | None = None,
    reps: int | None = None,
) -> ExperimentConfig:
    """Read and validate a JSON config file."""
    source = Path(path)
    try:
        data = json.loads(source.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigurationError("", f"cannot read {source}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        message = f"{source} is not valid JSON (line {exc.lineno}): {exc.msg}"
        raise ConfigurationError("", message) from exc
    config = parse_experiment_config(data, seed=seed, out=out, mode=mode, reps=reps)
    logger.debug("loaded config %s (hash %s)", source, config.config_hash()[:12])
    return config
