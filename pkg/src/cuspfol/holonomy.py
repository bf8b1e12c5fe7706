"""Numerical holonomy of invariant divisor components.

A loop ``gamma`` on the component ``{t = 0}`` of a planar foliation
``A dt + B dw = 0`` is lifted to the leaves by integrating

    dt/ds = -B(t, gamma(s)) / A(t, gamma(s)) * gamma'(s)

on the transversal fiber over the basepoint.  The argument of ``t`` is
integrated alongside so that fractional powers can be continued along the
lift instead of being taken on the principal branch.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .forms import Form
from .germ import FoliationGerm
from .verdict import FAILS, HOLDS, INCONCLUSIVE, Verdict

RTOL = 1e-12
ATOL = 1e-14
MAX_STEP = math.pi / 50
HOLD_TOL = 1e-6
FAIL_TOL = 1e-2
RICHARDSON_T0 = (0.05, 0.025, 0.0125)


class HolonomyError(RuntimeError):
    """Numerical failure of a lift (escape from the polydisk, lost transversality)."""


# -- loops --------------------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    kind: str              # "line" or "arc"
    start: complex
    end: complex = 0j
    center: complex = 0j
    turns: float = 0.0      # signed number of turns for arcs

    def point(self, s: float) -> complex:
        if self.kind == "line":
            return self.start + s * (self.end - self.start)
        r = self.start - self.center
        return self.center + r * cmath.exp(2j * math.pi * self.turns * s)

    def velocity(self, s: float) -> complex:
        if self.kind == "line":
            return self.end - self.start
        r = self.start - self.center
        return 2j * math.pi * self.turns * r * cmath.exp(2j * math.pi * self.turns * s)

    def reversed(self) -> "Segment":
        if self.kind == "line":
            return Segment("line", self.end, self.start)
        end = self.point(1.0)
        return Segment("arc", end, center=self.center, turns=-self.turns)

    def max_step(self) -> float:
        if self.kind == "line":
            return 1.0 / max(8, int(abs(self.end - self.start) * 50))
        return MAX_STEP / (2 * math.pi * max(abs(self.turns), 1e-9))


@dataclass(frozen=True)
class LoopSpec:
    """Lasso loop on a divisor component: tail to a circle around ``center`` and back."""

    divisor_var: str
    center: complex
    radius: float
    basepoint: complex
    orientation: int = 1
    path_var: str | None = None

    def segments(self) -> list[Segment]:
        c, b = complex(self.center), complex(self.basepoint)
        d = b - c
        if abs(d) < 1e-15:
            raise HolonomyError("basepoint coincides with the loop center")
        if self.radius >= abs(d) - 1e-12:
            foot = b
            tail: list[Segment] = []
        else:
            foot = c + self.radius * d / abs(d)
            tail = [Segment("line", b, foot)]
        arc = Segment("arc", foot, center=c, turns=float(self.orientation))
        back = [s.reversed() for s in reversed(tail)]
        return tail + [arc] + back

    def reversed(self) -> "LoopSpec":
        return LoopSpec(self.divisor_var, self.center, self.radius, self.basepoint, -self.orientation,
                        self.path_var)


def check_loop_clearance(loop: LoopSpec, marked: Sequence[complex], factor: float = 2.0):
    """Every other marked point must be at least ``factor * radius`` from the center."""
    for m in marked:
        d = abs(complex(m) - complex(loop.center))
        if d > 1e-12 and d < factor * loop.radius:
            raise HolonomyError(f"radius too large: marked point {m} within {factor}x the loop radius")


# -- fast evaluation ------------------------------------------------------------

class _Poly2:
    """Float evaluator of a two-variable series."""

    def __init__(self, series, t_index: int):
        self.terms = [(complex(c), e[t_index], e[1 - t_index]) for e, c in series.terms.items()]

    def __call__(self, t: complex, w: complex) -> complex:
        total = 0j
        for c, i, j in self.terms:
            total += c * t ** i * w ** j
        return total


def _vars(form: Form, divisor_var: str, path_var: str | None):
    if len(form.vars) != 2:
        raise HolonomyError("holonomy lifting works on planar germs")
    if divisor_var not in form.vars:
        raise HolonomyError(f"unknown divisor variable {divisor_var!r}")
    other = [v for v in form.vars if v != divisor_var][0]
    if path_var is not None and path_var != other:
        raise HolonomyError("path variable must be the other coordinate")
    return form.vars.index(divisor_var), other


def lift_path(form: Form, divisor_var: str, segments: Sequence[Segment], t0: complex,
              escape: float = 1.0, path_var: str | None = None, eps: float = 1e-12) -> tuple[complex, float]:
    """Lift a path on ``{divisor_var = 0}``; returns ``(endpoint, accumulated arg change)``."""
    ti, _ = _vars(form, divisor_var, path_var)
    comps = form.components()
    a = _Poly2(comps[ti], ti)
    b = _Poly2(comps[1 - ti], ti)
    t = complex(t0)
    if t == 0:
        return 0j, 0.0
    dtheta = 0.0
    for k, seg in enumerate(segments):
        def rhs(s, y, seg=seg):
            tt = complex(y[0], y[1])
            w = seg.point(s)
            av = a(tt, w)
            if abs(av) < eps:
                raise HolonomyError(f"transversality lost on segment {k} at s={s:.4f}, w={w:.6g}")
            dt = -b(tt, w) / av * seg.velocity(s)
            darg = (dt / tt).imag if tt != 0 else 0.0
            return [dt.real, dt.imag, darg]

        def escaped(s, y):
            return escape - math.hypot(y[0], y[1])
        escaped.terminal = True

        sol = solve_ivp(rhs, (0.0, 1.0), [t.real, t.imag, 0.0], method="DOP853", rtol=RTOL, atol=ATOL,
                        max_step=seg.max_step(), events=escaped)
        if sol.status == 1:
            raise HolonomyError(f"radius too large: lift left the polydisk |t| < {escape} on segment {k}")
        if not sol.success:
            raise HolonomyError(f"integration failed on segment {k}: {sol.message}")
        t = complex(sol.y[0, -1], sol.y[1, -1])
        dtheta += sol.y[2, -1]
    return t, dtheta


def lift_loop(germ, loop: LoopSpec, t0: complex, escape: float = 1.0) -> complex:
    """Endpoint of the lift of ``loop`` starting at ``t0`` on the transversal fiber."""
    form = germ.form if isinstance(germ, FoliationGerm) else germ
    return lift_path(form, loop.divisor_var, loop.segments(), t0, escape, loop.path_var)[0]


# -- one-variable maps ------------------------------------------------------------

class Diffeo1D:
    """Germ of a map of the transversal; ``lift`` also returns the argument change."""

    label = ""

    def lift(self, t: complex) -> tuple[complex, float]:
        raise NotImplementedError

    def __call__(self, t: complex) -> complex:
        return self.lift(t)[0]

    def then(self, other: "Diffeo1D") -> "Diffeo1D":
        """First ``self``, then ``other`` (the map ``other o self``)."""
        return Composite([self, other])

    def inverse(self) -> "Diffeo1D":
        raise NotImplementedError

    def power(self, k: int) -> "Diffeo1D":
        if k == 0:
            return LinearMap(0.0)
        base = self if k > 0 else self.inverse()
        return Composite([base] * abs(k))

    def multiplier(self, ts: Sequence[float] = RICHARDSON_T0) -> complex:
        """``h'(0)`` by Richardson extrapolation of ``h(t)/t`` over halving ``t``."""
        d = [self(t) / t for t in ts]
        if len(d) < 3:
            return 2 * d[1] - d[0]
        e1 = 2 * d[1] - d[0]
        e2 = 2 * d[2] - d[1]
        return (4 * e2 - e1) / 3

    def period(self, t0: float = 0.05, max_order: int = 12, tol: float = 1e-4):
        """Smallest ``k <= max_order`` with ``|h^k(t0) - t0| < tol``; returns ``(k, residuals)``."""
        t = complex(t0)
        res = []
        for k in range(1, max_order + 1):
            t = self(t)
            res.append(abs(t - t0))
            if res[-1] < tol:
                return k, res
        return None, res


class LinearMap(Diffeo1D):
    """``t -> modulus * exp(i angle) * t`` with the angle kept unreduced."""

    def __init__(self, angle: float, modulus: float = 1.0, label: str = ""):
        self.angle = float(angle)
        self.modulus = float(modulus)
        self.label = label

    def lift(self, t):
        return self.modulus * cmath.exp(1j * self.angle) * t, self.angle

    def inverse(self):
        return LinearMap(-self.angle, 1.0 / self.modulus, f"{self.label}^-1")

    @property
    def xi(self) -> complex:
        return self.modulus * cmath.exp(1j * self.angle)


class Composite(Diffeo1D):
    def __init__(self, maps: Sequence[Diffeo1D]):
        flat = []
        for m in maps:
            flat.extend(m.maps if isinstance(m, Composite) else [m])
        self.maps = flat
        self.label = " ; ".join(m.label for m in flat)

    def lift(self, t):
        total = 0.0
        for m in self.maps:
            t, d = m.lift(t)
            total += d
        return t, total

    def inverse(self):
        return Composite([m.inverse() for m in reversed(self.maps)])


class HolonomyMap(Diffeo1D):
    """Holonomy along a loop, evaluated by path lifting."""

    def __init__(self, form: Form, loop: LoopSpec, label: str = "", escape: float = 1.0):
        self.form = form
        self.loop = loop
        self.label = label or f"loop({loop.center})"
        self.escape = escape
        self._cache: dict = {}

    def lift(self, t):
        key = complex(t)
        if key not in self._cache:
            self._cache[key] = lift_path(self.form, self.loop.divisor_var, self.loop.segments(), key,
                                         self.escape, self.loop.path_var)
        return self._cache[key]

    def inverse(self):
        return HolonomyMap(self.form, self.loop.reversed(), f"{self.label}^-1", self.escape)


@dataclass
class GeneratorReport:
    label: str
    center: complex
    multiplier: complex
    order: int | None
    residuals: list = field(default_factory=list)

    def to_json(self):
        return {"label": self.label, "center": {"re": complex(self.center).real, "im": complex(self.center).imag},
                "multiplier": {"re": self.multiplier.real, "im": self.multiplier.imag},
                "periodicity_order": self.order, "residuals": self.residuals}


def holonomy_generators(form: Form, divisor_var: str, marked: Sequence[complex], basepoint: complex,
                        radii: Sequence[float] | None = None, escape: float = 1.0,
                        invariant: bool = True) -> list[HolonomyMap]:
    """One positively oriented lasso generator per marked point of the component."""
    if not invariant:
        raise HolonomyError("component is dicritical: no holonomy")
    marked = [complex(m) for m in marked]
    gens = []
    for i, m in enumerate(marked):
        others = [abs(m - o) for o in marked if o != m]
        r = radii[i] if radii else (min(others) / 3 if others else 0.5)
        r = min(r, abs(complex(basepoint) - m))
        loop = LoopSpec(divisor_var, m, r, basepoint)
        check_loop_clearance(loop, marked)
        gens.append(HolonomyMap(form, loop, f"h{i + 1}", escape))
    return gens


def generator_table(gens: Sequence[Diffeo1D], t0: float = 0.05, max_order: int = 12,
                    tol: float = 1e-4) -> list[GeneratorReport]:
    out = []
    for g in gens:
        k, res = g.period(t0, max_order, tol)
        center = g.loop.center if isinstance(g, HolonomyMap) else 0j
        out.append(GeneratorReport(g.label, center, g.multiplier(), k, res))
    return out


def commutator_displacement(g: Diffeo1D, h: Diffeo1D, t0: float = 0.05) -> float:
    """``|[g, h](t0) - t0|`` with ``[g, h] = h^-1 g^-1 h g`` (first ``g``)."""
    c = Composite([g, h, g.inverse(), h.inverse()])
    return abs(c(t0) - t0)


@dataclass
class HolonomyProbe:
    """Numeric evidence about a holonomy group for the arithmetic criteria."""

    orders: list
    commutators: list
    residuals: list
    t0: float = 0.05

    @property
    def all_finite(self) -> bool:
        return all(o is not None for o in self.orders)

    @property
    def max_commutator(self) -> float:
        return max(self.commutators, default=0.0)

    def to_json(self):
        return {"orders": self.orders, "commutators": self.commutators, "residuals": self.residuals,
                "t0": self.t0}


def probe_group(gens: Sequence[Diffeo1D], t0: float = 0.05, max_order: int = 12, tol: float = 1e-4) -> HolonomyProbe:
    orders, residuals = [], []
    for g in gens:
        k, res = g.period(t0, max_order, tol)
        orders.append(k)
        residuals.append(res[k - 1] if k else min(res))
    comms = [commutator_displacement(gens[i], gens[j], t0)
             for i in range(len(gens)) for j in range(i + 1, len(gens))]
    return HolonomyProbe(orders, comms, residuals, t0)


# -- Dulac maps and adjunction ----------------------------------------------------

@dataclass
class DulacValue:
    value: complex
    argument: float
    leaf_residual: float


def dulac_map(p: int, q: int, t: complex, base_arg: float | None = None) -> DulacValue:
    """``D(t) = t^(p/q)`` across the corner ``p y dx + q x dy``.

    The argument of ``t`` is taken continuously from ``base_arg`` (nearest
    representative); without it the principal argument is used.
    """
    t = complex(t)
    if t == 0:
        raise ValueError("Dulac map is undefined at t = 0")
    arg = cmath.phase(t)
    if base_arg is not None:
        arg += 2 * math.pi * round((base_arg - arg) / (2 * math.pi))
    val = abs(t) ** (p / q) * cmath.exp(1j * arg * p / q)
    # (t, 1) and (1, D(t)) lie on the leaf x^p y^q = t^p
    resid = abs(val ** q - t ** p)
    return DulacValue(val, arg, resid)


class Adjoined(Diffeo1D):
    """Conjugate of ``h`` by the Dulac map, with argument tracking through ``h``.

    ``convention="geometric"`` gives ``D^-1 o h o D`` (``h`` acts on the side
    where ``D`` lands); ``"literal"`` gives ``D o h o D^-1``.
    """

    def __init__(self, p: int, q: int, h: Diffeo1D, convention: str = "geometric"):
        if convention not in ("geometric", "literal"):
            raise ValueError(f"unknown convention {convention!r}")
        self.p, self.q, self.h, self.convention = p, q, h, convention
        self.label = f"adj({h.label})"

    def _power(self, t, arg, e):
        return abs(t) ** e * cmath.exp(1j * arg * e), arg * e

    def lift(self, s):
        s = complex(s)
        e_in, e_out = (self.p / self.q, self.q / self.p) if self.convention == "geometric" \
            else (self.q / self.p, self.p / self.q)
        t, arg_t = self._power(s, cmath.phase(s), e_in)
        ht, darg = self.h.lift(t)
        out, arg_out = self._power(ht, arg_t + darg, e_out)
        return out, arg_out - cmath.phase(s)

    def inverse(self):
        return Adjoined(self.p, self.q, self.h.inverse(), self.convention)


def adjoin(p: int, q: int, h: Diffeo1D, convention: str = "geometric") -> Diffeo1D:
    """Transport ``h`` across the corner ``p y dx + q x dy`` (see :class:`Adjoined`)."""
    if p <= 0 or q <= 0:
        raise ValueError("corner exponents must be positive")
    return Adjoined(p, q, h, convention)


# -- invariant rational functions --------------------------------------------------

class Rational1D:
    """``num(T) / den(T)`` from coefficient lists (constant term first)."""

    def __init__(self, num: Sequence, den: Sequence = (1,)):
        self.num = np.array([complex(c) for c in num], dtype=complex)
        self.den = np.array([complex(c) for c in den], dtype=complex)

    @classmethod
    def from_series(cls, num, den, var: str) -> "Rational1D":
        return cls(num.univariate_coeffs(var) or [0], den.univariate_coeffs(var) or [1])

    def parts(self, t: complex) -> tuple[complex, complex]:
        return (np.polynomial.polynomial.polyval(t, self.num), np.polynomial.polynomial.polyval(t, self.den))

    def __call__(self, t: complex) -> complex:
        n, d = self.parts(t)
        return n / d


def invariant_rational_test(gens: Sequence[Diffeo1D], r: Rational1D | Callable, samples: Sequence[complex],
                            hold_tol: float = HOLD_TOL, fail_tol: float = FAIL_TOL) -> Verdict:
    """Relative residual of ``r o h - r`` over generators and samples."""
    worst = 0.0
    rows = []
    for t in samples:
        t = complex(t)
        if isinstance(r, Rational1D):
            _, d = r.parts(t)
            if abs(d) < 1e-14:
                raise ValueError(f"sample {t} is a pole of the rational function")
        rt = r(t)
        for g in gens:
            val = abs(r(g(t)) - rt) / (1 + abs(rt))
            rows.append({"generator": g.label, "t": [t.real, t.imag], "residual": val})
            worst = max(worst, val)
    ev = {"max_residual": worst, "hold_tol": hold_tol, "fail_tol": fail_tol, "samples": rows}
    if worst < hold_tol:
        return Verdict(HOLDS, "invariant-rational", "rational function invariant under all generators", ev)
    if worst > fail_tol:
        return Verdict(FAILS, "invariant-rational", "rational function moved by a generator", ev)
    return Verdict(INCONCLUSIVE, "invariant-rational", "residual inside the undecided band", ev)


# -- special components of the cusp family --------------------------------------

@dataclass
class SpecialComponent:
    """Chart of the component carrying the projective holonomy of ``d(z^2 + t^N) + ...``.

    ``N = 2m``: chart ``z = t^m v`` (``t = u``); marked points are the roots
    of the ``du`` coefficient on ``u = 0``.  ``N`` odd: chart
    ``t = u^2 v, z = u^N v^((N+1)/2)``, with corners at ``v = 0`` and
    ``v = infinity`` and the cusp branch crossing at the remaining root.
    """

    N: int
    chart: object
    form: Form
    marked: list
    basepoint: complex
    corner_loops: bool

    def generators(self, escape: float = 1.0) -> list[HolonomyMap]:
        if not self.corner_loops:
            return holonomy_generators(self.form, "u", self.marked, self.basepoint, escape=escape)
        c = sum(self.marked) / len(self.marked)
        R = abs(self.basepoint - c)
        others = [abs(m) for m in self.marked if abs(m) > 1e-12]
        r0 = min(others) / 3 if others else 0.5
        h1 = HolonomyMap(self.form, LoopSpec("u", 0j, r0, self.basepoint), "h1", escape)
        # loop around infinity: the big circle through the basepoint, clockwise
        h2 = HolonomyMap(self.form, LoopSpec("u", c, R, self.basepoint, -1), "h2", escape)
        return [h1, h2]

    def restrict_to_transversal(self, series_tz) -> list:
        """Univariate ``u``-coefficients of a function of ``(t, z)`` on the fiber over the basepoint."""
        s = self.chart.substitution.apply_series(series_tz.with_vars(self.chart.old_vars))
        s = s.to_float().restrict("v", self.basepoint)
        return s.univariate_coeffs("u") if s.terms else [0]

    def to_json(self):
        return {"N": self.N, "chart": self.chart.to_json(), "form": str(self.form),
                "marked": [[complex(m).real, complex(m).imag] for m in self.marked],
                "basepoint": [self.basepoint.real, self.basepoint.imag]}


def special_component(form: Form, N: int, basepoint: complex | None = None) -> SpecialComponent:
    """Weighted blow-up chart of a planar form in ``(t, z)`` with cusp ``z^2 + t^N``."""
    from .blowup import ChartMap, strict_transform
    if len(form.vars) != 2:
        raise HolonomyError("special component needs a planar form in (t, z)")
    if N % 2 == 0:
        mat = [[1, 0], [N // 2, 1]]
    else:
        mat = [[2, 1], [N, (N + 1) // 2]]
    chart = ChartMap.monomial(form.vars, ("u", "v"), mat, f"cusp chart N={N}")
    strict, _ = strict_transform(form, chart)
    a0 = strict.components()[0].restrict("u", 0)
    coeffs = a0.univariate_coeffs("v") if a0.terms else []
    if not coeffs or all(abs(complex(c)) < 1e-14 for c in coeffs):
        raise HolonomyError("component is dicritical: no holonomy")
    poly = [complex(c) for c in coeffs]
    while poly and abs(poly[-1]) < 1e-14:
        poly.pop()
    roots = sorted((complex(r) for r in np.roots(poly[::-1])), key=lambda r: (round(r.real, 10), r.imag)) \
        if len(poly) > 1 else []
    marked: list = []
    for r in roots:
        if all(abs(r - m) > 1e-8 for m in marked):
            marked.append(complex(round(r.real, 13), round(r.imag, 13)))
    if not marked:
        raise HolonomyError("no marked points on the special component")
    corner = N % 2 == 1
    if basepoint is None:
        c = sum(marked) / len(marked)
        spread = max(abs(m - c) for m in marked)
        basepoint = c + 1j * max(1.0, 2 * spread)
    return SpecialComponent(N, chart, strict, marked, complex(basepoint), corner)
