"""Machine-readable run reports.

Reports are plain dicts with a fixed key order so a fixed configuration
serializes to identical bytes run after run (only ``wall_time_ms``
varies). JSON is the primary format; CSV keeps scalar fields only,
flattened with dotted keys. Floats are serialized by Python's default
shortest round-trip repr, which is lossless.
"""

from __future__ import annotations

import csv
import io
import json

ORIENTATION_TAG = "text_consistent"


def build_report(command: str, config: dict, result: dict, wall_time_ms: float, version: str) -> dict:
    return {
        "command": command,
        "config": config,
        "result": result,
        "eq6_orientation": ORIENTATION_TAG,
        "wall_time_ms": wall_time_ms,
        "version": version,
    }


def render_json(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def _flatten_scalars(prefix: str, value, into: dict) -> None:
    if isinstance(value, dict):
        for key, sub in value.items():
            _flatten_scalars(f"{prefix}.{key}" if prefix else key, sub, into)
    elif isinstance(value, (str, int, float, bool)) or value is None:
        into[prefix] = value
    # lists/matrices are summarized by their scalar companions in JSON


def render_csv(report: dict) -> str:
    flat: dict = {}
    _flatten_scalars("", report, flat)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(flat.keys())
    writer.writerow(flat.values())
    return buffer.getvalue()


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return render_json(report)
    if fmt == "csv":
        return render_csv(report)
    raise ValueError(f"unknown format {fmt!r}")
