"""Output emission: CSV tables (RFC-4180, '#'-prefixed provenance header
lines) and JSON sidecars. Bodies are byte-identical across reruns with
the same arguments and seed; timestamps are opt-in.
"""
from __future__ import annotations

import csv
import io
import json
from datetime import datetime, timezone

import numpy as np

from . import __version__

RESULT_COLUMNS = [
    "t",
    "tv_plugin",
    "tv_plugin_se",
    "tv_struct",
    "tau_tail",
    "tau_tail_se",
    "tau_theory",
    "tv_stopped",
    "tv_unstopped",
]

TOPOLOGY_COLUMNS = [
    "t",
    "mean_ball_size",
    "nu_power_prediction",
    "tree_fraction",
    "good_density",
]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if np.isnan(v):
        return ""
    return format(v, ".10g")


def provenance(seed, extra: dict | None = None, timestamp: bool = False) -> dict:
    out = {"generator": f"dynmix {__version__}", "seed": seed}
    if extra:
        out.update(extra)
    if timestamp:
        out["written_at"] = datetime.now(timezone.utc).isoformat()
    return out


def render_csv(columns: list[str], rows: list[dict], header: dict) -> str:
    buf = io.StringIO()
    for key, value in header.items():
        buf.write(f"# {key}: {value}\n")
    writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(col)) for col in columns])
    return buf.getvalue()


def write_csv(path, columns: list[str], rows: list[dict], header: dict) -> None:
    text = render_csv(columns, rows, header)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def render_json_rows(columns: list[str], rows: list[dict], header: dict) -> str:
    payload = {
        "provenance": header,
        "rows": [
            {col: (None if _fmt(row.get(col)) == "" else row.get(col)) for col in columns}
            for row in rows
        ],
    }
    return json.dumps(payload, indent=2, default=_json_default) + "\n"


def write_rows(path, columns, rows, header, fmt: str = "csv") -> None:
    if fmt == "csv":
        write_csv(path, columns, rows, header)
    elif fmt == "json":
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(render_json_rows(columns, rows, header))
    else:
        raise ValueError(f"unknown output format {fmt!r}")


def _json_default(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        v = float(value)
        return None if np.isnan(v) else v
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"cannot serialize {type(value)}")


def write_sidecar(path, scalars: dict, header: dict) -> None:
    payload = {"provenance": header}
    payload.update(scalars)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(payload, indent=2, default=_json_default) + "\n")
