"""Readers for swarmstore per-run CSV files (schema v1).

A series file starts with the schema line, holds the per-step table,
then a ``# deliveries`` marker and the delivery table. This module is
deliberately independent of the simulator package: the file format is
the only contract.
"""

from __future__ import annotations

import os
import re

import numpy as np

SCHEMA_LINE = "# swarmstore-schema v1"
STEP_COLUMNS = ("step", "n_g", "n_l", "reliability_step", "reliability_cum",
                "items_on_agents", "items_at_base", "total_stored",
                "mean_memory_pct")
DELIVERY_COLUMNS = ("datum_creator", "datum_seq", "created_step",
                    "delivered_step", "hops")

_RUN_FILE = re.compile(r"^(?P<name>.+)_(?P<policy>[a-z]+)_seed(?P<seed>\d+)\.csv$")


class SchemaError(ValueError):
    """Input file does not carry the expected schema."""


def read_series(path: str):
    """Returns (step_table, delivery_table) as dicts of numpy arrays."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != SCHEMA_LINE:
        raise SchemaError(f"{path}: expected first line {SCHEMA_LINE!r}")
    try:
        marker = lines.index("# deliveries")
    except ValueError:
        raise SchemaError(f"{path}: missing '# deliveries' section") from None
    steps = _parse_table(lines[1:marker], STEP_COLUMNS, path)
    deliveries = _parse_table(lines[marker + 1:], DELIVERY_COLUMNS, path)
    return steps, deliveries


def _parse_table(lines, columns, path):
    if not lines or tuple(lines[0].split(",")) != columns:
        raise SchemaError(f"{path}: unexpected header {lines[0] if lines else ''!r}")
    rows = [line.split(",") for line in lines[1:] if line]
    table = {}
    for idx, col in enumerate(columns):
        values = [row[idx] for row in rows]
        table[col] = np.array([float(v) for v in values])
    return table


def discover_runs(directory: str) -> dict:
    """Maps policy name to the sorted list of its per-run CSV paths."""
    runs: dict = {}
    for name in sorted(os.listdir(directory)):
        match = _RUN_FILE.match(name)
        if match and not name.endswith("_summary.csv"):
            runs.setdefault(match.group("policy"), []).append(
                os.path.join(directory, name))
    return runs
