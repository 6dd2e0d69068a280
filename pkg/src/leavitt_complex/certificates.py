"""Structured pass/fail results that serialize to JSON."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

SCHEMA_VERSION = 1


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, bool) or x is None or isinstance(x, (int, float, str)):
        return x
    if isinstance(x, Fraction):
        return str(x)
    return str(x)


@dataclass
class Certificate:
    check: str
    quiver: str
    window: dict
    passed: bool
    anchor: str = ""
    dimensions: dict = field(default_factory=dict)
    witness: object = None
    details: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def fail(self, witness) -> "Certificate":
        """Record the first failure only."""
        if self.passed:
            self.passed = False
            self.witness = witness
        return self

    def absorb(self, sub: "Certificate") -> "Certificate":
        self.details.append(sub)
        if not sub.passed:
            self.fail({"subcheck": sub.check, "witness": sub.witness})
        return self

    def to_dict(self) -> dict:
        d = {
            "schema": SCHEMA_VERSION,
            "check": self.check,
            "quiver": self.quiver,
            "window": self.window,
            "status": self.status,
            "dimensions": _jsonable(self.dimensions),
            "anchor": self.anchor,
        }
        if self.witness is not None:
            d["witness"] = _jsonable(self.witness)
        d.update({k: _jsonable(v) for k, v in self.extra.items()})
        if self.details:
            d["details"] = [s.to_dict() for s in self.details]
        return d

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=False)

    def __bool__(self) -> bool:
        return self.passed


def window_dict(lmin: int, lmax: int, N: int) -> dict:
    return {"lmin": lmin, "lmax": lmax, "N": N}
