"""Numerical run tasks: self-checks and the example experiments."""

from pathlib import Path
from typing import Any

from doit.tools import title_with_actions

CONFIG_DIR = Path("configs")
OUTPUT_DIR = Path("tmp/experiments")


def task_verify() -> dict[str, Any]:
    """Run every self-check suite at the quick sample sizes."""
    return {
        "actions": [
            "mkdir -p tmp",
            "uv run stein-poisson verify --suite all --json tmp/verify.json",
        ],
        "title": title_with_actions,
        "verbosity": 2,
    }


def task_verify_full() -> dict[str, Any]:
    """Run every self-check suite at acceptance-scale sample sizes (slow)."""
    return {
        "actions": [
            "mkdir -p tmp",
            "uv run stein-poisson verify --suite all --full --json tmp/verify-full.json",
        ],
        "title": title_with_actions,
        "verbosity": 2,
    }


def task_experiments() -> Any:
    """Run each example config under configs/ into tmp/experiments/."""
    for config in sorted(CONFIG_DIR.glob("*.json")):
        yield {
            "name": config.stem,
            "actions": [
                f"mkdir -p {OUTPUT_DIR}",
                f"uv run stein-poisson --log-file {OUTPUT_DIR}/{config.stem}.log "
                f"experiment --config {config} --out {OUTPUT_DIR}"
            ],
            "file_dep": [str(config)],
            "targets": [str(OUTPUT_DIR / f"{config.stem}.csv")],
            "title": title_with_actions,
        }
