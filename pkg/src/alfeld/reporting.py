"""Deterministic JSON emission: sorted keys, rationals as ``"p/q"`` strings."""

from __future__ import annotations

import dataclasses
import json
from fractions import Fraction
from typing import Any

from .exact import format_rational


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, float):
        raise TypeError("floats are not allowed in reports")
    if hasattr(obj, "as_dict"):
        return to_jsonable(obj.as_dict())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"


def format_table(rows: list[dict]) -> str:
    """Aligned text in the column order d, m, r_1, r_2..r_d, rho, k, b."""
    header = ["d", "m", "parity", "r", "rho", "k", "b", "valid"]
    lines = [header]
    for row in rows:
        valid = "n/a" if row["valid"] is None else ("yes" if row["valid"] else "no")
        lines.append(
            [
                str(row["d"]),
                str(row["m"]),
                row["parity"],
                "(" + ", ".join(str(x) for x in row["r"]) + ")",
                str(row["rho"]),
                str(row["k"]),
                str(row["b"]),
                valid,
            ]
        )
    widths = [max(len(line[i]) for line in lines) for i in range(len(header))]
    return "\n".join("  ".join(cell.rjust(w) for cell, w in zip(line, widths)) for line in lines) + "\n"
