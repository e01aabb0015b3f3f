"""Deterministic CSV/JSON writers for traces, maps and sweeps.

All floats are printed with 9 significant digits, '.' decimal separator and
'\n' line endings, so repeated runs produce byte-identical artifacts.
"""
from __future__ import annotations

import json

from .model import FrequencyTrace

__all__ = ["fmt", "write_trace_csv", "write_csv", "write_json"]


def fmt(value) -> str:
    """Format one number with 9 significant digits."""
    return format(float(value), ".9g")


def write_csv(path, header, rows) -> None:
    """Write rows of numbers under a comma-separated header."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def write_trace_csv(path, trace: FrequencyTrace) -> None:
    """Standard trace artifact: t_s,delta_f_hz."""
    write_csv(path, ("t_s", "delta_f_hz"), zip(trace.times, trace.samples))


def write_json(path, obj) -> None:
    """Stable JSON artifact: sorted keys, trailing newline."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(json.dumps(obj, sort_keys=True, indent=2))
        fh.write("\n")
