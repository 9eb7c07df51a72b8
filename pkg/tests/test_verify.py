"""Tests for the self-check suites at their quick sizes."""

import pytest

from stein_poisson.errors import DomainError
from stein_poisson.verify import SUITES, run_suite, suite_names


def test_suite_names() -> None:
    """Every suite can be named, plus ``all``."""
    assert suite_names() == (*SUITES, "all")


def test_unknown_suite() -> None:
    """Unknown names are domain errors."""
    with pytest.raises(DomainError, match="unknown suite"):
        run_suite("everything")


@pytest.mark.parametrize("suite", ["metrics", "palm", "models", "bounds"])
def test_quick_suite_passes(suite: str) -> None:
    """Fast suites pass at their default sizes."""
    (report,) = run_suite(suite, seed=0)
    assert report.suite == suite
    assert report.checks
    failed = [check.name for check in report.checks if not check.passed]
    assert not failed


@pytest.mark.slow
@pytest.mark.parametrize("suite", ["univariate", "imdeath"])
def test_simulation_suite_passes(suite: str) -> None:
    """Suites driven by longer simulations pass at their default sizes."""
    (report,) = run_suite(suite, seed=0)
    assert report.passed


@pytest.mark.slow
def test_imdeath_suite_checks_atom_marginals() -> None:
    """Stationarity is checked on the total count and on every atom's count."""
    (report,) = run_suite("imdeath", seed=0)
    names = {check.name for check in report.checks}
    for lam in (1.0, 4.0):
        assert f"stationary-total lam={lam}" in names
        assert {f"stationary-atom{atom} lam={lam}" for atom in (0, 1)} <= names


def test_report_dict() -> None:
    """Reports serialise with a suite-level verdict."""
    (report,) = run_suite("palm")
    data = report.to_dict()
    assert data["suite"] == "palm"
    assert data["passed"] is report.passed
    assert {check["name"] for check in data["checks"]} >= {"campbell", "poisson-palm-shift"}
