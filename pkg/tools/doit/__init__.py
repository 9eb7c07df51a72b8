"""Doit task modules for stein-poisson.

Tasks are grouped by concern (testing, quality, docs, benchmarks, numerical
runs) and auto-discovered from every public module in this package.
"""

import importlib
from pathlib import Path
from typing import Any


def discover_tasks() -> dict[str, Any]:
    """Collect every ``task_*`` function and ``DOIT_CONFIG`` from the task modules.

    Returns:
        Mapping of names to task functions/config for ``globals().update()``
        in ``dodo.py``.
    """
    discovered: dict[str, Any] = {}
    package_dir = Path(__file__).parent

    for py_file in sorted(package_dir.rglob("*.py")):
        if py_file.name.startswith("_"):
            continue
        # tools/doit/testing.py -> tools.doit.testing
        relative = py_file.relative_to(package_dir.parent.parent)
        module_name = ".".join(relative.with_suffix("").parts)
        module = importlib.import_module(module_name)
        for name in dir(module):
            if name.startswith("task_") or name == "DOIT_CONFIG":
                discovered[name] = getattr(module, name)

    return discovered
