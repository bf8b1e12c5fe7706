"""Tri-state verdicts with structured evidence."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .scalar import QQi, scalar_to_json

HOLDS = "holds"
FAILS = "fails"
INCONCLUSIVE = "inconclusive"


def jsonable(value):
    """Convert evidence payloads to JSON-friendly structures."""
    if isinstance(value, (QQi, Fraction)):
        return scalar_to_json(value)
    if isinstance(value, complex):
        return scalar_to_json(value)
    if isinstance(value, float):
        return value
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if hasattr(value, "to_json"):
        return value.to_json()
    if isinstance(value, (int, str, bool)) or value is None:
        return value
    return str(value)


@dataclass
class Verdict:
    status: str
    criterion: str = ""
    reason: str = ""
    evidence: dict = field(default_factory=dict)
    order: int | None = None

    def __post_init__(self):
        if self.status not in (HOLDS, FAILS, INCONCLUSIVE):
            raise ValueError(f"bad verdict status {self.status!r}")

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    @property
    def fails(self) -> bool:
        return self.status == FAILS

    @property
    def inconclusive(self) -> bool:
        return self.status == INCONCLUSIVE

    def to_json(self):
        return {
            "status": self.status,
            "criterion": self.criterion,
            "reason": self.reason,
            "order": self.order,
            "evidence": jsonable(self.evidence),
        }

    def __str__(self):
        return f"{self.criterion or 'verdict'}: {self.status} ({self.reason})"
