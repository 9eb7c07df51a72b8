"""Testing-related doit tasks."""

from typing import Any

from doit.tools import title_with_actions


def task_test() -> dict[str, Any]:
    """Run pytest in parallel, skipping slow Monte Carlo tests."""
    return {
        "actions": ['uv run pytest -n auto -v -m "not slow"'],
        "title": title_with_actions,
        "verbosity": 0,
    }


def task_test_slow() -> dict[str, Any]:
    """Run only the slow Monte Carlo tests."""
    return {
        "actions": ["uv run pytest -n auto -v -m slow"],
        "title": title_with_actions,
        "verbosity": 0,
    }


def task_coverage() -> dict[str, Any]:
    """Run pytest with coverage (serial, so branch data is exact)."""
    return {
        "actions": [
            "uv run pytest -m 'not slow' "
            "--cov=stein_poisson --cov-report=term-missing "
            "--cov-report=html:tmp/htmlcov --cov-report=xml:tmp/coverage.xml -v"
        ],
        "title": title_with_actions,
    }
