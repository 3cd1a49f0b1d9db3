"""JSON helpers: exact rationals travel as ``"p/q"`` strings."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from . import __version__
from .fan import StackyFan


def to_jsonable(obj: Any) -> Any:
    """Recursively replace rationals by strings and tuples by lists."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return obj.numerator if obj.denominator == 1 else f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, float):
        raise TypeError("floats are not allowed in exact output")
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    if hasattr(obj, "to_json"):
        return to_jsonable(obj.to_json())
    if hasattr(obj, "item"):          # numpy scalars
        return to_jsonable(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def parse_rational(text) -> Fraction:
    """``"3"``, ``"-1/8"`` or an int; floats are refused."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, str) and all(c in "+-0123456789/ " for c in text):
        return Fraction(text.replace(" ", ""))
    raise ValueError(f"not an exact rational: {text!r}")


def parse_vector(text: str) -> tuple:
    """``"x,y,z"`` or a JSON array into a tuple of integers."""
    text = text.strip()
    if text.startswith("["):
        return tuple(int(x) for x in json.loads(text))
    return tuple(int(x) for x in text.split(","))


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=False)


def fan_from_document(doc: dict) -> StackyFan:
    """Accept a bare fan or a certificate whose outputs carry one."""
    if "rays" in doc:
        return StackyFan.from_json(doc)
    outputs = doc.get("outputs", {})
    if isinstance(outputs, dict) and "fan" in outputs:
        return StackyFan.from_json(outputs["fan"])
    raise ValueError("document holds no fan")


@dataclass
class Certificate:
    command: str
    inputs: dict
    outputs: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    timing_ms: int = 0

    def add_check(self, name: str, ok: bool, witness=None) -> None:
        self.checks.append({"name": name, "status": "pass" if ok else "fail", "witness": witness})

    @property
    def ok(self) -> bool:
        return all(c["status"] == "pass" for c in self.checks)

    def to_json(self) -> dict:
        return to_jsonable({
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "checks": self.checks,
            "tool_version": __version__,
            "timing": {"ms": self.timing_ms},
        })

    @classmethod
    def from_json(cls, doc: dict) -> "Certificate":
        return cls(doc["command"], doc.get("inputs", {}), doc.get("outputs", {}), doc.get("checks", []),
                   doc.get("timing", {}).get("ms", 0))
