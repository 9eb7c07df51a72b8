"""Tests for experiment configuration parsing."""

from collections.abc import Callable
from pathlib import Path
from typing import Any

import pytest

from stein_poisson.config import (
    ExperimentConfig,
    MonteCarloSettings,
    OutputSettings,
    load_experiment_config,
    parse_experiment_config,
)
from stein_poisson.errors import ConfigurationError
from stein_poisson.rng import MAX_SEED

MINIMAL = {"experiment": "bernoulli-bound", "monte_carlo": {"seed": 7}}


def _field(document: Any, **overrides: Any) -> str:
    with pytest.raises(ConfigurationError) as info:
        parse_experiment_config(document, **overrides)
    return info.value.field_path


class TestParse:
    """Tests for validation of decoded documents."""

    def test_defaults(self) -> None:
        """Missing sections take their defaults."""
        config = parse_experiment_config(MINIMAL)
        assert config.name == "bernoulli-bound"
        assert config.mode == "exact"
        assert config.parameters == {}
        assert config.monte_carlo == MonteCarloSettings(seed=7, reps=10_000, t_star=30.0)
        assert config.output == OutputSettings(Path("out"), "")

    def test_overrides_win(self) -> None:
        """Command-line values replace the document's."""
        config = parse_experiment_config(MINIMAL, seed=3, out="elsewhere", mode="mc", reps=50)
        assert config.monte_carlo.seed == 3
        assert config.monte_carlo.reps == 50
        assert config.mode == "mc"
        assert config.output.directory == Path("elsewhere")

    def test_seed_from_override_only(self) -> None:
        """A seed given on the command line is enough."""
        config = parse_experiment_config({"experiment": "palm-exact"}, seed=0)
        assert config.monte_carlo.seed == 0

    @pytest.mark.parametrize(
        ("document", "path"),
        [
            ([], ""),
            ({"experiment": "nope", "monte_carlo": {"seed": 1}}, "experiment"),
            ({**MINIMAL, "mode": "fast"}, "mode"),
            ({"experiment": "palm-exact"}, "monte_carlo.seed"),
            ({"experiment": "palm-exact", "monte_carlo": {"seed": True}}, "monte_carlo.seed"),
            ({"experiment": "palm-exact", "monte_carlo": {"seed": -1}}, "monte_carlo.seed"),
            (
                {"experiment": "palm-exact", "monte_carlo": {"seed": MAX_SEED + 1}},
                "monte_carlo.seed",
            ),
            ({"experiment": "palm-exact", "monte_carlo": {"seed": 1.5}}, "monte_carlo.seed"),
            ({**MINIMAL, "monte_carlo": {"seed": 1, "reps": 0}}, "monte_carlo.reps"),
            ({**MINIMAL, "monte_carlo": {"seed": 1, "t_star": 0}}, "monte_carlo.t_star"),
            ({**MINIMAL, "parameters": [1, 2]}, "parameters"),
            ({**MINIMAL, "output": {"prefix": 3}}, "output.prefix"),
        ],
    )
    def test_invalid_fields(self, document: Any, path: str) -> None:
        """Each invalid field is reported by its dotted path."""
        assert _field(document) == path

    def test_invalid_override(self) -> None:
        """Overrides are validated like document values."""
        assert _field(MINIMAL, reps=0) == "monte_carlo.reps"
        assert _field(MINIMAL, mode="both") == "mode"


class TestHash:
    """Tests for the canonical form and its hash."""

    def test_hash_ignores_output(self) -> None:
        """Moving the output does not change the run's identity."""
        first = parse_experiment_config(MINIMAL)
        second = parse_experiment_config(MINIMAL, out="/tmp/elsewhere")
        assert first.config_hash() == second.config_hash()

    def test_hash_tracks_seed(self) -> None:
        """A different seed is a different run."""
        assert (
            parse_experiment_config(MINIMAL).config_hash()
            != parse_experiment_config(MINIMAL, seed=8).config_hash()
        )

    def test_canonical_content(self) -> None:
        """The canonical form names the experiment and resolved settings."""
        canonical = parse_experiment_config(MINIMAL).canonical()
        assert canonical["experiment"] == "bernoulli-bound"
        assert canonical["monte_carlo"]["seed"] == 7
        assert "output" not in canonical

    def test_output_paths(self) -> None:
        """The prefix, or else the experiment name, names both files."""
        config = ExperimentConfig("palm-exact", output=OutputSettings(Path("o"), "run1"))
        assert config.output.table_path(config.name) == Path("o/run1.csv")
        assert OutputSettings(Path("o")).sidecar_path("palm-exact") == Path("o/palm-exact.json")


class TestLoad:
    """Tests for reading config files."""

    def test_load(self, write_config: Callable[[dict[str, Any]], Path]) -> None:
        """A file on disk parses like the decoded document."""
        path = write_config({**MINIMAL, "mode": "mc"})
        config = load_experiment_config(path)
        assert config.mode == "mc"
        assert config.output.directory == path.parent / "out"

    def test_missing_file(self, tmp_path: Path) -> None:
        """An unreadable file is a configuration error."""
        with pytest.raises(ConfigurationError, match="cannot read"):
            load_experiment_config(tmp_path / "absent.json")

    def test_invalid_json(self, tmp_path: Path) -> None:
        """Malformed JSON names the line."""
        path = tmp_path / "bad.json"
        path.write_text('{"experiment": ', encoding="utf-8")
        with pytest.raises(ConfigurationError, match="not valid JSON"):
            load_experiment_config(path)


@pytest.mark.parametrize(
    "path", sorted((Path(__file__).parents[1] / "configs").glob("*.json")), ids=lambda p: p.stem
)
def test_example_configs_load(path: Path) -> None:
    """Every shipped example config validates and names its own experiment."""
    config = load_experiment_config(path)
    assert config.name == path.stem
