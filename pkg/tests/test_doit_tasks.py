"""Tests for doit task discovery and the numerical run tasks."""

from pathlib import Path

import pytest

from tools.doit import discover_tasks
from tools.doit.benchmark import (
    BENCHMARK_DIR,
    STORAGE_DIR,
    task_benchmark,
    task_benchmark_compare,
    task_benchmark_save,
)
from tools.doit.runs import CONFIG_DIR, task_experiments, task_verify

ROOT = Path(__file__).parents[1]


class TestDiscoverTasks:
    """Tests for discover_tasks."""

    def test_discovers_doit_config(self) -> None:
        """DOIT_CONFIG is picked up from the base module."""
        discovered = discover_tasks()
        assert isinstance(discovered["DOIT_CONFIG"], dict)

    def test_discovers_known_tasks(self) -> None:
        """Tasks from every module are collected."""
        discovered = discover_tasks()
        for name in ("task_test", "task_lint", "task_check", "task_verify", "task_experiments"):
            assert name in discovered

    def test_only_tasks_and_config(self) -> None:
        """Helpers are never exported as tasks."""
        for name, obj in discover_tasks().items():
            assert name.startswith("task_") or name == "DOIT_CONFIG"
            if name.startswith("task_"):
                assert callable(obj)


class TestRunTasks:
    """Tests for the self-check and experiment tasks."""

    def test_verify_writes_report(self) -> None:
        """The quick self-check writes its JSON report under tmp/."""
        actions = task_verify()["actions"]
        assert any("--json tmp/verify.json" in action for action in actions)

    def test_one_subtask_per_config(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """Each shipped config becomes a subtask targeting its own table."""
        monkeypatch.chdir(ROOT)
        subtasks = list(task_experiments())
        stems = sorted(path.stem for path in (ROOT / CONFIG_DIR).glob("*.json"))
        assert [task["name"] for task in subtasks] == stems
        for task in subtasks:
            assert task["targets"] == [f"tmp/experiments/{task['name']}.csv"]


class TestBenchmarkTasks:
    """Tests for the kernel timing tasks."""

    def test_benchmark_directory_holds_the_kernel_suite(self) -> None:
        """The timed directory is the one holding the numerical kernel benchmarks."""
        assert (ROOT / BENCHMARK_DIR / "test_bench_numerics.py").exists()

    def test_every_task_uses_the_shared_storage(self) -> None:
        """Plain, save and compare runs all time the same suite and store under tmp/."""
        for task in (task_benchmark, task_benchmark_save, task_benchmark_compare):
            (action,) = task()["actions"]
            assert f" {BENCHMARK_DIR} " in action
            assert f"--benchmark-storage={STORAGE_DIR}" in action

    def test_compare_reads_the_saved_baseline(self) -> None:
        """The compare run names the baseline that the save run writes."""
        (save,) = task_benchmark_save()["actions"]
        (compare,) = task_benchmark_compare()["actions"]
        assert "--benchmark-save=baseline" in save
        assert "--benchmark-compare=0001_baseline" in compare
