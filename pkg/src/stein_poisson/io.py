"""Plain-text formats for distributions, paths and bound tables.

Every writer takes an optional header mapping; each entry becomes a
``# key=value`` comment line so output files carry the config hash and the
master seed of the run that produced them. Floats are written with 17
significant digits, so reading a file back gives the same values.
"""

from __future__ import annotations

import csv
import io
import json
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from typing import Any

import numpy as np

from .bounds import BoundReport
from .carrier import CarrierSpace, Configuration, Cube, FiniteAtoms, Lifted, Point
from .errors import DomainError
from .imdeath import Trajectory
from .palmexact import ConfigDistribution

DISTRIBUTION_MAGIC = "stein-poisson-distribution 1"
REPORT_COLUMNS = ("name", "mode", "valid", "value", "lower", "upper", "reason", "coupling")


def _float(value: float) -> str:
    return format(float(value), ".17g")


def format_point(x: Point, space: CarrierSpace | None = None) -> str:
    """Text form of a carrier point: ``3``, ``0.25``, ``0.1;0.7`` or ``2:0.25``.

    Labelled points of a :class:`Lifted` carrier are only recognised when that
    carrier is passed; without a carrier a tuple is read as cube coordinates.
    """
    if isinstance(space, Lifted):
        label, base_point = x
        return f"{int(label)}:{format_point(base_point, space.base)}"
    if isinstance(space, Cube) or isinstance(x, tuple):
        return ";".join(_float(c) for c in x)
    if isinstance(space, FiniteAtoms) or isinstance(x, (int, np.integer)):
        return str(int(x))
    return _float(x)


def header_lines(header: Mapping[str, Any] | None) -> list[str]:
    if not header:
        return []
    return [f"# {key}={value}" for key, value in header.items()]


def _strip_header(lines: Iterable[str]) -> tuple[dict[str, str], list[str]]:
    meta: dict[str, str] = {}
    body = []
    for line in lines:
        if line.startswith("# ") and "=" in line:
            key, _, value = line[2:].partition("=")
            meta[key] = value
        elif line.strip():
            body.append(line)
    return meta, body


# ---------------------------------------------------------------------------
# Distributions
# ---------------------------------------------------------------------------


def format_distribution(dist: ConfigDistribution, header: Mapping[str, Any] | None = None) -> str:
    """Serialise a finite distribution with its carrier."""
    carrier = dist.carrier
    lines = [*header_lines(header), DISTRIBUTION_MAGIC, f"atoms {carrier.size}"]
    for i, label in enumerate(carrier.labels):
        lines.append(f"label {i} {label}")
    if carrier.component_of is not None:
        lines.append("components " + " ".join(str(c) for c in carrier.component_of))
    lines.append("metric")
    lines.extend(" ".join(_float(v) for v in row) for row in carrier.distances)
    lines.append(f"truncated_mass {_float(dist.truncated_mass)}")
    lines.append(f"support {len(dist)}")
    lines.extend(" ".join(str(c) for c in key) + " " + _float(prob) for key, prob in dist)
    return "\n".join(lines) + "\n"


def parse_distribution(text: str) -> ConfigDistribution:
    """Inverse of :func:`format_distribution`.

    Raises:
        DomainError: If the text is not a distribution file.
    """
    _, body = _strip_header(text.splitlines())
    if not body or body[0] != DISTRIBUTION_MAGIC:
        raise DomainError("missing distribution header line")
    try:
        pos = 1
        k = int(body[pos].split()[1])
        pos += 1
        labels: dict[int, str] = {}
        while body[pos].startswith("label "):
            _, index, name = body[pos].split(" ", 2)
            labels[int(index)] = name
            pos += 1
        components = None
        if body[pos].startswith("components"):
            components = tuple(int(c) for c in body[pos].split()[1:])
            pos += 1
        if body[pos] != "metric":
            raise DomainError(f"expected 'metric', got {body[pos]!r}")
        metric = np.array([[float(v) for v in body[pos + 1 + r].split()] for r in range(k)])
        pos += 1 + k
        truncated = float(body[pos].split()[1])
        support = int(body[pos + 1].split()[1])
        rows = body[pos + 2 : pos + 2 + support]
    except (IndexError, ValueError) as exc:
        raise DomainError(f"malformed distribution file: {exc}") from exc
    if len(rows) != support:
        raise DomainError(f"expected {support} support rows, found {len(rows)}")
    probabilities: dict[tuple[int, ...], float] = {}
    for row in rows:
        *counts, prob = row.split()
        if len(counts) != k:
            raise DomainError(f"support row has {len(counts)} counts for {k} atoms")
        probabilities[tuple(int(c) for c in counts)] = float(prob)
    carrier = FiniteAtoms(metric, tuple(labels[i] for i in sorted(labels)), components)
    return ConfigDistribution(carrier, probabilities, truncated)


def write_distribution(
    dist: ConfigDistribution, path: str | Path, header: Mapping[str, Any] | None = None
) -> Path:
    target = Path(path)
    target.write_text(format_distribution(dist, header), encoding="utf-8")
    return target


def read_distribution(path: str | Path) -> ConfigDistribution:
    return parse_distribution(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# Paths and configurations
# ---------------------------------------------------------------------------


def _write_rows(
    path: str | Path,
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
    header: Mapping[str, Any] | None,
) -> Path:
    buffer = io.StringIO()
    for line in header_lines(header):
        buffer.write(line + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    target = Path(path)
    target.write_text(buffer.getvalue(), encoding="utf-8")
    return target


def trajectory_rows(
    trajectory: Trajectory, space: CarrierSpace | None = None
) -> list[tuple[str, str, str]]:
    """``(time, event, location)`` rows; initial points appear as ``initial`` at time 0."""
    rows = [(_float(0.0), "initial", format_point(x, space)) for x in trajectory.initial]
    rows.extend(
        (_float(e.time), e.kind, format_point(e.location, space)) for e in trajectory.events
    )
    return rows


def write_trajectory_csv(
    trajectory: Trajectory,
    path: str | Path,
    header: Mapping[str, Any] | None = None,
    space: CarrierSpace | None = None,
) -> Path:
    rows = trajectory_rows(trajectory, space)
    return _write_rows(path, ("time", "event", "location"), rows, header)


def write_configuration_csv(
    configuration: Configuration,
    path: str | Path,
    header: Mapping[str, Any] | None = None,
    space: CarrierSpace | None = None,
) -> Path:
    """One point per row; points of a :class:`Lifted` carrier get a ``label`` column."""
    points = list(configuration)
    if isinstance(space, Lifted):
        rows = ((str(int(x[0])), format_point(x[1], space.base)) for x in points)
        return _write_rows(path, ("label", "point"), rows, header)
    return _write_rows(path, ("point",), ((format_point(x, space),) for x in points), header)


# ---------------------------------------------------------------------------
# Bound reports
# ---------------------------------------------------------------------------


def report_row(report: BoundReport, extra: Mapping[str, Any] | None = None) -> dict[str, Any]:
    """Flatten a report to one CSV row; terms become ``term_<name>`` columns."""
    row: dict[str, Any] = dict(extra or {})
    row.update(
        name=report.name,
        mode=report.mode,
        valid=report.valid,
        value="" if report.value is None else _float(report.value),
        lower="" if report.lower is None else _float(report.lower),
        upper="" if report.upper is None else _float(report.upper),
        reason=report.reason,
        coupling=report.coupling or "",
    )
    for key, value in sorted(report.terms.items()):
        row[f"term_{key}"] = _float(value)
    for key, value in sorted(report.standard_errors.items()):
        row[f"se_{key}"] = _float(value)
    return row


def write_table_csv(
    rows: Sequence[Mapping[str, Any]], path: str | Path, header: Mapping[str, Any] | None = None
) -> Path:
    """Write dict rows; the column order is first-seen order across rows."""
    columns: list[str] = []
    for row in rows:
        columns.extend(key for key in row if key not in columns)
    cells = ([_cell(row.get(c, "")) for c in columns] for row in rows)
    return _write_rows(path, columns, cells, header)


def _cell(value: Any) -> Any:
    if isinstance(value, float):
        return _float(value)
    return value


def write_json(data: Any, path: str | Path) -> Path:
    target = Path(path)
    text = json.dumps(data, indent=2, sort_keys=True, default=_json_default)
    target.write_text(text + "\n", encoding="utf-8")
    return target


def _json_default(value: Any) -> Any:
    if hasattr(value, "tolist"):
        return value.tolist()
    if hasattr(value, "to_dict"):
        return value.to_dict()
    raise TypeError(f"cannot serialise {type(value).__name__}")


def read_table_csv(path: str | Path) -> tuple[dict[str, str], list[dict[str, str]]]:
    """Header comments and rows of a CSV written by :func:`write_table_csv`."""
    meta, body = _strip_header(Path(path).read_text(encoding="utf-8").splitlines())
    return meta, list(csv.DictReader(body))
