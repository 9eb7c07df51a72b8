"""Tests for the tool configuration in pyproject.toml."""

import re
import tomllib
from pathlib import Path

ROOT = Path(__file__).parents[1]

# Tables configured by a tool that ships inside another package.
PROVIDED_BY = {"hatch": "hatchling", "coverage": "pytest-cov"}


def _requirement_names(requirements: list[str]) -> set[str]:
    return {re.split(r"[<>=\[ ]", requirement, maxsplit=1)[0] for requirement in requirements}


def test_every_tool_table_has_a_declared_tool() -> None:
    """[tool.*] tables only configure tools the project installs."""
    document = tomllib.loads((ROOT / "pyproject.toml").read_text(encoding="utf-8"))
    declared = _requirement_names(document["build-system"]["requires"])
    for extra in document["project"]["optional-dependencies"].values():
        declared |= _requirement_names(extra)
    for table in document["tool"]:
        assert PROVIDED_BY.get(table, table) in declared, table


def test_no_security_scanner_config() -> None:
    """The dropped security tooling leaves no configuration behind."""
    document = tomllib.loads((ROOT / "pyproject.toml").read_text(encoding="utf-8"))
    assert "bandit" not in document["tool"]
