"""Timing tasks for the numerical kernels.

The suites under ``tests/benchmarks/`` time the optimal assignment behind
d₁′, d₁′ on the interval, the recursive Stein solution and the exact d₂ of
a Bernoulli process, plus the structured logging helpers they call.
"""

from typing import Any

from doit.tools import title_with_actions

BENCHMARK_DIR = "tests/benchmarks/"
STORAGE_DIR = "tmp/benchmarks"
BASELINE = "baseline"


def _benchmark_action(*options: str) -> str:
    command = [
        "uv run pytest",
        BENCHMARK_DIR,
        "--benchmark-enable --benchmark-only",
        f"--benchmark-storage={STORAGE_DIR}",
        *options,
        "-v",
    ]
    return " ".join(command)


def _task(action: str) -> dict[str, Any]:
    return {"actions": [action], "title": title_with_actions, "verbosity": 0}


def task_benchmark() -> dict[str, Any]:
    """Time the assignment, d₁′, recursive Stein solution and exact d₂ kernels."""
    return _task(_benchmark_action())


def task_benchmark_save() -> dict[str, Any]:
    """Time the kernels and store the run as the baseline under tmp/benchmarks."""
    return _task(_benchmark_action(f"--benchmark-save={BASELINE}"))


def task_benchmark_compare() -> dict[str, Any]:
    """Time the kernels and compare against the first stored baseline."""
    return _task(_benchmark_action(f"--benchmark-compare=0001_{BASELINE}"))
