"""Sweep records and deterministic CSV/JSON emission.

All file output in the package goes through the helpers here: floats are
formatted with 17 significant digits so repeated runs are byte-identical,
CSV files start with the versioned header line ``# geomgate-csv v1``, and
writes are atomic (temp file then rename).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

CSV_HEADER = "# geomgate-csv v1"


def format_float(x: Any) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, (int,)):
        return str(x)
    return f"{float(x):.17g}"


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with tmp.open("w", encoding="utf-8", newline="\n") as f:
        f.write(text)
        f.flush()
        os.fsync(f.fileno())
    os.replace(tmp, path)


def atomic_write_json(path, obj: Any) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


@dataclass
class SweepResult:
    """One parameter scan: an axis, named metric columns, and run metadata.

    ``metadata`` must echo everything needed to reproduce the run (input
    parameters, integrator settings, code version).  Scalar entries under
    ``metadata['footer']`` are appended to the CSV as comment lines.
    """

    axis_name: str
    axis_values: list[float]
    metrics: dict[str, list[float]]
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = len(self.axis_values)
        for name, col in self.metrics.items():
            if len(col) != n:
                raise ValueError(f"metric {name!r} has {len(col)} values for {n} axis points")

    def to_csv_text(self) -> str:
        names = list(self.metrics)
        lines = [CSV_HEADER, ",".join([self.axis_name] + names)]
        for k, x in enumerate(self.axis_values):
            row = [x] + [self.metrics[m][k] for m in names]
            lines.append(",".join(format_float(v) for v in row))
        footer = self.metadata.get("footer", {})
        for key in sorted(footer):
            lines.append(f"# {key} = {format_float(footer[key])}")
        return "\n".join(lines) + "\n"

    def to_csv(self, path) -> None:
        atomic_write_text(path, self.to_csv_text())

    def to_json_dict(self) -> dict:
        return {
            "axis_name": self.axis_name,
            "axis_values": list(self.axis_values),
            "metrics": {k: list(v) for k, v in self.metrics.items()},
            "metadata": self.metadata,
        }

    def to_json(self, path) -> None:
        atomic_write_json(path, self.to_json_dict())
