"""Readers for the dynmix output formats: CSV tables with '#'-prefixed
provenance headers, and JSON sidecars."""
from __future__ import annotations

import csv
import json
import math


class MissingColumn(ValueError):
    def __init__(self, column: str, path: str):
        super().__init__(f"column {column!r} missing or empty in {path}")
        self.column = column


def read_table(path) -> tuple[dict, list[dict]]:
    """Parse a dynmix CSV: returns (provenance, rows). Numeric fields are
    floats; empty cells become NaN."""
    provenance: dict = {}
    body: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                provenance[key.strip()] = value.strip()
            else:
                body.append(line)
    if not body:
        raise ValueError(f"no table body in {path}")
    rows = []
    for rec in csv.DictReader(body):
        parsed = {}
        for key, value in rec.items():
            if value is None or value == "":
                parsed[key] = math.nan
            else:
                try:
                    parsed[key] = float(value)
                except ValueError:
                    parsed[key] = value
        rows.append(parsed)
    if not rows:
        raise ValueError(f"no data rows in {path}")
    return provenance, rows


def column(rows: list[dict], name: str, path: str = "<table>") -> list[float]:
    """Extract a numeric column; a fully absent or fully-NaN column is an
    error naming the column."""
    if name not in rows[0]:
        raise MissingColumn(name, path)
    vals = [row[name] for row in rows]
    if all(isinstance(v, float) and math.isnan(v) for v in vals):
        raise MissingColumn(name, path)
    return vals


def read_sidecar(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
