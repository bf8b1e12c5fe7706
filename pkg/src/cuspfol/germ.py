"""Foliation germs: a generating 1-form plus a coordinate normal-crossings divisor."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .forms import Form


@dataclass(frozen=True)
class DivisorComponent:
    """Coordinate hyperplane ``var = 0`` of the (exceptional) divisor."""

    var: str
    invariant: bool = True
    multiplicity: int = 1

    def to_json(self):
        return {"var": self.var, "invariant": self.invariant, "multiplicity": self.multiplicity}


@dataclass(frozen=True)
class FoliationGerm:
    """A 1-form (up to units) at the origin, adapted to coordinate divisor components."""

    form: Form
    divisor: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.form.degree != 1:
            raise ValueError("a foliation germ is generated by a 1-form")
        comps = []
        for c in self.divisor:
            comps.append(c if isinstance(c, DivisorComponent) else DivisorComponent(str(c)))
        for c in comps:
            if c.var not in self.form.vars:
                raise ValueError(f"divisor variable {c.var!r} is not a coordinate")
        object.__setattr__(self, "divisor", tuple(comps))

    @property
    def vars(self) -> tuple:
        return self.form.vars

    @property
    def divisor_vars(self) -> tuple:
        return tuple(c.var for c in self.divisor)

    def is_singular(self) -> bool:
        """All coefficients vanish at the origin."""
        return all(c.constant_term() == 0 for c in self.form.coeffs.values())

    def with_divisor(self, divisor: Sequence) -> "FoliationGerm":
        return FoliationGerm(self.form, tuple(divisor))

    def __str__(self):
        d = ", ".join(f"{c.var}=0" for c in self.divisor)
        return f"{self.form}" + (f"  [E: {d}]" if d else "")
