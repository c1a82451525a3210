"""Text formats for instances, schedules and result documents.

All three are JSON objects written with a stable key order and one matrix
row per line.  An instance file::

    {
      "format": "multistage-knapsack-instance",
      "T": 2,
      "n": 3,
      "profits": [
        [1, 1, 1],
        [1, 1, 1]
      ],
      "weights": [...],       T rows of n integers
      "bonuses": [...],       T-1 rows of n integers
      "capacities": [2, 2]
    }

A schedule file is any JSON object with a ``"schedule"`` key holding ``T``
rows of ``n`` zeros and ones; result documents written by ``multiknap
solve`` qualify.
"""

from __future__ import annotations

import json
from typing import Any

from .core import Instance, Schedule, StructuralError

INSTANCE_FORMAT = "multistage-knapsack-instance"
RESULT_FORMAT = "multistage-knapsack-result"


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.line = line
        self.field = field


def dumps(obj: Any, indent: int = 2) -> str:
    """JSON with lists of scalars kept on one line."""

    def scalar(v):
        return not isinstance(v, (dict, list, tuple))

    def enc(v, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(v, dict):
            if not v:
                return "{}"
            items = [f"{pad}{json.dumps(str(k))}: {enc(val, level + 1)}" for k, val in v.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(v, (list, tuple)):
            if all(scalar(e) for e in v):
                return "[" + ", ".join(json.dumps(e) for e in v) + "]"
            return "[\n" + ",\n".join(pad + enc(e, level + 1) for e in v) + "\n" + end + "]"
        return json.dumps(v)

    return enc(obj, 0) + "\n"


def _load_json(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON ({exc.msg}, column {exc.colno})", line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be a JSON object", line=1)
    return doc


def _int_matrix(doc: dict, key: str, text: str) -> list[list[int]]:
    if key not in doc:
        raise ParseError("missing", field=key)
    m = doc[key]
    if not isinstance(m, list) or not all(isinstance(r, list) for r in m):
        raise ParseError("expected a list of rows", line=_line_of(text, key), field=key)
    for k, r in enumerate(m):
        for v in r:
            if isinstance(v, bool) or not isinstance(v, int):
                raise ParseError(f"non-integer entry {v!r}", line=_row_line(text, key, k), field=key)
    return m


def _row_line(text: str, key: str, row: int) -> int | None:
    # rows sit one per line after an opening bracket, as dumps() writes them
    start = _line_of(text, key)
    if start is None:
        return None
    lines = text.splitlines()
    if lines[start - 1].rstrip().endswith("[") and start + row < len(lines):
        return start + 1 + row
    return start


def _line_of(text: str, key: str) -> int | None:
    needle = json.dumps(key)
    for k, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return k
    return None


def instance_to_dict(inst: Instance) -> dict:
    return {
        "format": INSTANCE_FORMAT,
        "T": inst.T,
        "n": inst.n,
        "profits": [list(r) for r in inst.p],
        "weights": [list(r) for r in inst.w],
        "bonuses": [list(r) for r in inst.B],
        "capacities": list(inst.C),
    }


def format_instance(inst: Instance) -> str:
    return dumps(instance_to_dict(inst))


def parse_instance(text: str) -> Instance:
    doc = _load_json(text)
    for key in ("T", "n"):
        if key not in doc:
            raise ParseError("missing", field=key)
        if isinstance(doc[key], bool) or not isinstance(doc[key], int):
            raise ParseError("expected an integer", line=_line_of(text, key), field=key)
    mats = {k: _int_matrix(doc, k, text) for k in ("profits", "weights", "bonuses")}
    if "capacities" not in doc:
        raise ParseError("missing", field="capacities")
    caps = doc["capacities"]
    if not isinstance(caps, list):
        raise ParseError("expected a list", line=_line_of(text, "capacities"), field="capacities")
    try:
        return Instance(doc["T"], doc["n"], mats["profits"], mats["weights"], mats["bonuses"], caps)
    except StructuralError as exc:
        field = str(exc).split(":", 1)[0]
        line = _line_of(text, field) if field in doc else None
        raise ParseError(str(exc), line=line, field=field if field in doc else None) from None


def schedule_rows(sched: Schedule) -> list[list[int]]:
    return sched.as_int_rows()


def parse_schedule(text: str) -> Schedule:
    doc = _load_json(text)
    rows = _int_matrix(doc, "schedule", text)
    for k, r in enumerate(rows):
        if any(v not in (0, 1) for v in r):
            raise ParseError("entries must be 0 or 1", line=_row_line(text, "schedule", k), field="schedule")
    if len({len(r) for r in rows}) > 1:
        raise ParseError("rows differ in length", line=_line_of(text, "schedule"), field="schedule")
    return Schedule(tuple(tuple(bool(v) for v in r) for r in rows))


def format_schedule(sched: Schedule) -> str:
    return dumps({"schedule": schedule_rows(sched)})
