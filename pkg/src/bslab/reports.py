"""Tabular reports shared by all models: long-format CSV plus a JSON mirror."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return str(v)


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else int(v)
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


@dataclass
class ConvergenceReport:
    """Rows of one scan, in index order, plus provenance metadata."""

    model: str
    columns: list[str]
    rows: list[dict] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, **row) -> None:
        unknown = set(row) - set(self.columns)
        if unknown:
            raise KeyError(f"unknown report columns {sorted(unknown)}")
        self.rows.append(row)

    def column(self, name: str) -> list:
        return [r.get(name) for r in self.rows]

    def to_csv(self, header: str | None = None) -> str:
        buf = io.StringIO()
        if header:
            buf.write(f"# {header}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_cell(r.get(c)) for c in self.columns])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {"model": self.model, "meta": _jsonable(self.meta), "columns": self.columns,
               "rows": [_jsonable({c: r.get(c) for c in self.columns}) for r in self.rows]}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def write(self, outdir: Path, stem: str, header: str | None = None) -> tuple[Path, Path]:
        outdir.mkdir(parents=True, exist_ok=True)
        csv_path, json_path = outdir / f"{stem}.csv", outdir / f"{stem}.json"
        csv_path.write_text(self.to_csv(header))
        json_path.write_text(self.to_json())
        return csv_path, json_path
