"""Verdict reports shared by every verifier."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

VERDICTS = ("holds", "fails", "vacuous", "inconclusive")


class VerificationError(AssertionError):
    """A checked inequality failed where the argument says it cannot."""


def fraction_str(x: Fraction | int) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _value(x):
    if x is None:
        return None
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, (int, Fraction)):
        return fraction_str(x)
    return str(x)


def _jsonable(x):
    if isinstance(x, Fraction):
        return fraction_str(x)
    if isinstance(x, (frozenset, set)):
        return sorted(_jsonable(v) for v in x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, float) and x != x:
        return "nan"
    return x


@dataclass
class VerdictReport:
    """Outcome of checking one inequality on one instance.

    ``lhs``/``rhs`` are exact rationals unless ``approx`` is set, which is
    reserved for checks against irrational bounds and sampled estimates.
    """

    lemma: str
    instance_hash: str
    lhs: Any
    rhs: Any
    verdict: str
    witness: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    seed: int | None = None
    elapsed: float | None = None
    approx: bool = False

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == "fails" and not self.witness:
            raise ValueError("a failing verdict must carry a witness")

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"

    def to_dict(self, timing: bool = False) -> dict:
        d = {
            "lemma": self.lemma,
            "instance_hash": self.instance_hash,
            "lhs": _value(self.lhs),
            "rhs": _value(self.rhs),
            "verdict": self.verdict,
            "witness": _jsonable(self.witness),
            "details": _jsonable(self.details),
            "seed": self.seed,
        }
        if self.approx:
            d["approx"] = True
        if timing:
            d["elapsed"] = self.elapsed
        return d

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), sort_keys=True)

    def to_text(self) -> str:
        mark = "~" if self.approx else ""
        return (
            f"{self.lemma:<18} {self.instance_hash}  {self.verdict:<12} "
            f"lhs={mark}{_value(self.lhs)} rhs={mark}{_value(self.rhs)}"
        )

    def key(self) -> tuple:
        """Content used to compare runs: everything but timing."""
        return self.to_json()
