"""Verdict containers shared by the analysis modules, plus JSON helpers."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any


class InputError(ValueError):
    """Malformed user input (bad JSON field, invalid parameter)."""


class Unsupported(Exception):
    pass


def jsonify(obj: Any) -> Any:
    """Recursively convert Fractions to "p/q" strings and containers to lists/dicts."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float):
        return "inf" if math.isinf(obj) and obj > 0 else ("-inf" if math.isinf(obj) else obj)
    if hasattr(obj, "to_json"):
        return jsonify(obj.to_json())
    if isinstance(obj, dict):
        return {str(k): jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonify(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def parse_rat(s: Any, what: str = "value") -> Fraction:
    if isinstance(s, Fraction):
        return s
    if isinstance(s, bool):
        raise InputError(f"{what}: expected a rational, got {s!r}")
    try:
        return Fraction(str(s).strip())
    except (ValueError, ZeroDivisionError):
        raise InputError(f"{what}: cannot parse rational {s!r}") from None


@dataclass
class Verdict:
    holds: bool | None
    name: str = ""
    certificate: dict = field(default_factory=dict)
    witness: Any = None
    window: Any = None
    stabilized: bool = True
    unsupported: bool = False

    def to_json(self) -> dict:
        out = {
            "holds": self.holds,
            "name": self.name,
            "stabilized": self.stabilized,
            "certificate": jsonify(self.certificate),
        }
        if self.unsupported:
            out["unsupported"] = True
        if self.window is not None:
            out["window"] = jsonify(self.window)
        if self.witness is not None:
            out["witness"] = jsonify(self.witness)
        return out

    @classmethod
    def unsupported_dims(cls, name: str, n: int) -> "Verdict":
        return cls(None, name, {"reason": f"n = {n} is not supported"}, unsupported=True)


@dataclass
class MonoVerdict(Verdict):
    kappa: Fraction = Fraction(0)
    degenerate: bool = False

    def to_json(self) -> dict:
        out = super().to_json()
        out["kappa"] = str(self.kappa)
        if self.degenerate:
            out["degenerate"] = True
        return out
