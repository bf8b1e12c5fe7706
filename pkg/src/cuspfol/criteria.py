"""Arithmetic criteria for the cuspidal family and the evaluators built on them.

The family is

    Omega = d(z^2 + (x^p y^q)^k) + alpha (x^p y^q)^n U(x^p y^q) dz

with planar shadow ``omega = d(z^2 + t^k) + alpha t^n U(t) dz``.  All
arithmetic runs on ``A = alpha^2`` so that irrational ``alpha`` such as
``8/sqrt(3)`` stays exact; ``alpha`` itself is materialized as a float only
when a square root is needed for dynamics.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .blowup import blowup_axes, singular_points_on_divisor, ChartMap, strict_transform
from .classify import as_rational, classify_simple_type, first_integral_local_verdict
from .forms import Form
from .scalar import QQi, as_fraction, exact_sqrt, is_exact, quadratic_roots, rational_sqrt
from .series import TruncSeries
from .verdict import FAILS, HOLDS, INCONCLUSIVE, Verdict

COMMUTATOR_TOL = 1e-3
ROOT_MATCH_TOL = 1e-7


class CriteriaError(ValueError):
    """Input outside the domain of a criterion (boundary alpha, wrong exponents)."""


class NotDicritical(CriteriaError):
    pass


def _exact_scalar(value):
    """Coerce ints, Fractions, numeric strings and QQi to QQi; leave floats alone."""
    if isinstance(value, QQi):
        return value
    if isinstance(value, (int, Fraction)):
        return QQi(Fraction(value))
    if isinstance(value, str):
        return QQi(Fraction(value))
    if isinstance(value, float):
        return value
    if isinstance(value, complex):
        return value
    raise TypeError(f"cannot interpret {value!r} as a scalar")


# -- parameters ------------------------------------------------------------------

@dataclass
class FamilyParams:
    """Parameters ``(p, q, k, n, alpha^2, U)`` of the cuspidal family.

    ``U`` is given by its coefficients ``U_0 = 1, U_1, ...``.  ``alpha``
    optionally fixes the sign of the square root of ``alpha_sq``.
    """

    p: int
    q: int
    k: int
    n: int
    alpha_sq: object
    U: tuple = (1,)
    alpha: object = None

    def __post_init__(self):
        for name in ("p", "q", "k", "n"):
            v = getattr(self, name)
            if not isinstance(v, int) or v <= 0:
                raise CriteriaError(f"{name} must be a positive integer, got {v!r}")
        if math.gcd(self.p, self.q) != 1:
            raise CriteriaError(f"p and q must be coprime, got ({self.p}, {self.q})")
        self.alpha_sq = _exact_scalar(self.alpha_sq)
        self.U = tuple(_exact_scalar(c) for c in (self.U or (1,)))
        if self.U[0] != 1:
            raise CriteriaError("U(0) must equal 1")
        if self.alpha is not None:
            self.alpha = _exact_scalar(self.alpha)
            diff = self.alpha * self.alpha - self.alpha_sq
            if abs(complex(diff)) > 1e-9 * max(1.0, abs(complex(self.alpha_sq))):
                raise CriteriaError("alpha^2 does not match alpha_sq")
        if abs(complex(self.alpha_sq)) == 0:
            raise CriteriaError("alpha must be nonzero")

    @property
    def exact(self) -> bool:
        return is_exact(self.alpha_sq) and all(is_exact(c) for c in self.U) and is_exact(self.alpha_value())

    def alpha_value(self):
        """``alpha`` itself: exact when ``alpha_sq`` is a square in Q(i), float otherwise."""
        if self.alpha is not None:
            return self.alpha
        return alpha_from_square(self.alpha_sq)

    def u_series(self, var: str = "t") -> TruncSeries:
        return TruncSeries.from_univariate(list(self.U), var, None)

    def form_2d(self, vars=("t", "z")) -> Form:
        """``d(z^2 + t^k) + alpha t^n U(t) dz``."""
        return family_form_2d(self.k, self.n, self.alpha_value(), self.U, vars)

    def form_3d(self, vars=("x", "y", "z")) -> Form:
        x, y, z = vars
        f = TruncSeries.monomial((self.p, self.q, 0), QQi(1), vars, None)
        zz = TruncSeries.var(z, vars, None)
        u = self.u_series("t").subs({"t": f}, vars, None)
        g = zz * zz + _power(f, self.k)
        coef = _power(f, self.n) * u * self.alpha_value()
        return Form.function(g).d() + Form.one_form(vars, [TruncSeries.zero(vars, None),
                                                           TruncSeries.zero(vars, None), coef])

    def to_json(self):
        from .verdict import jsonable
        return {"p": self.p, "q": self.q, "k": self.k, "n": self.n, "alpha_sq": jsonable(self.alpha_sq),
                "alpha": jsonable(self.alpha_value()), "U": jsonable(list(self.U))}


def _power(s: TruncSeries, k: int) -> TruncSeries:
    out = TruncSeries.const(QQi(1), s.vars, s.order)
    for _ in range(k):
        out = out * s
    return out


def family_form_2d(k: int, n: int, alpha, U: Sequence = (1,), vars=("t", "z")) -> Form:
    """``d(z^2 + t^k) + alpha t^n U(t) dz`` as a polynomial form."""
    t, z = vars
    tt = TruncSeries.var(t, vars, None)
    zz = TruncSeries.var(z, vars, None)
    u = TruncSeries.from_univariate([_exact_scalar(c) for c in U], "t", None).subs({"t": tt}, vars, None)
    g = zz * zz + _power(tt, k)
    coef = _power(tt, n) * u * alpha
    return Form.function(g).d() + Form.one_form(vars, [TruncSeries.zero(vars, None), coef])


def alpha_from_square(A):
    """Square root with non-negative real part; exact inside Q(i) when possible."""
    if isinstance(A, QQi):
        r = exact_sqrt(A)
        if r is not None:
            return r
    root = cmath.sqrt(complex(A))
    return root if root.imag != 0 else root.real + 0j


# -- alpha-resonance ----------------------------------------------------------------

@dataclass
class ResonanceSolution:
    """Solution of ``alpha^2 = (16 + r)^2 / (16 + 2 r)`` for ``r >= 0``.

    ``boundary`` flags ``r = 0`` (``alpha = +-4``, double root of
    ``2y^2 + alpha y + 2``).
    """

    A: object
    r: Fraction | None
    boundary: bool = False
    exact: bool = True
    alpha: object = None
    alpha_roots: tuple | None = None
    quotients: tuple | None = None
    note: str = ""

    @property
    def positive(self) -> bool:
        return self.r is not None and self.r > 0

    def to_json(self):
        from .verdict import jsonable
        return {"A": jsonable(self.A), "r": jsonable(self.r), "boundary": self.boundary, "exact": self.exact,
                "alpha": jsonable(self.alpha), "alpha_roots": jsonable(self.alpha_roots),
                "quotients": jsonable(self.quotients), "note": self.note}


def alpha_resonance_solve(alpha_sq, p: int = 1) -> ResonanceSolution:
    """Solve ``r^2 + (32 - 2A) r + (256 - 16A) = 0`` for ``r`` in Q_{>=0}.

    The roots are ``(A - 16) +- sqrt(A (A - 16))``; a non-negative rational
    root exists iff ``A(A - 16)`` is a rational square and ``A >= 16``, and
    it is then unique (the product of the roots is ``16 (16 - A) <= 0``).
    The roots of ``2y^2 + alpha y + 2`` and the eigenvalue quotients (for
    exponent ``p``) are attached whenever they are defined.
    """
    A = _exact_scalar(alpha_sq)
    if abs(complex(A)) == 0:
        raise CriteriaError("alpha^2 = 0: alpha must be nonzero")
    alpha = alpha_from_square(A)
    A_rat = as_fraction(A) if isinstance(A, QQi) else None
    r = None
    note = ""
    if A_rat is None:
        note = "alpha^2 is not an exact rational; resonance equation not decided exactly"
        exact = False
    else:
        exact = True
        s = rational_sqrt(A_rat * (A_rat - 16))
        if s is None:
            note = "A(A-16) is not a rational square"
        else:
            cands = [c for c in ((A_rat - 16) + s, (A_rat - 16) - s) if c >= 0]
            if cands:
                r = min(cands)
                assert Fraction((16 + r) ** 2, 16 + 2 * r) == A_rat
            else:
                note = "no non-negative root"
    boundary = r == 0
    roots = quots = None
    if not boundary:
        try:
            a1, a2, l1, l2 = labeled_roots(p, alpha)
            roots, quots = (a1, a2), (l1, l2)
        except CriteriaError:
            pass
    else:
        note = "boundary r=0: alpha = +-4 gives a double root"
    return ResonanceSolution(A, r, boundary, exact, alpha, roots, quots, note)


def _quotient(p, a1, a2, alpha):
    return 2 * p * (a2 - a1) / (2 * a1 + alpha)


def _positive_rational(x) -> Fraction | None:
    q = as_rational(x)
    return q if q is not None and q > 0 else None


def labeled_roots(p: int, alpha) -> tuple:
    """``(alpha_1, alpha_2, lambda_1, lambda_2)`` for the roots of ``2y^2 + alpha y + 2``.

    ``alpha_1`` is the root whose quotient is a positive rational when such a
    root exists, otherwise the roots are ordered by real then imaginary part.
    """
    alpha = _exact_scalar(alpha)
    two = QQi(2) if isinstance(alpha, QQi) else 2.0
    r1, r2 = quadratic_roots(two, alpha, two)
    if (isinstance(r1, QQi) and r1 == r2) or abs(complex(r1) - complex(r2)) < 1e-12:
        raise CriteriaError("double root: alpha = +-4 is excluded")
    pairs = [(r1, r2), (r2, r1)]
    pos = [pr for pr in pairs if _positive_rational(_quotient(p, pr[0], pr[1], alpha)) is not None]
    if pos:
        a1, a2 = pos[0]
    else:
        a1, a2 = sorted((r1, r2), key=lambda v: (complex(v).real, complex(v).imag))
    return a1, a2, _quotient(p, a1, a2, alpha), _quotient(p, a2, a1, alpha)


def eigen_quotients(p: int, alpha) -> tuple:
    """The two eigenvalue quotients ``2p(alpha_2 - alpha_1)/(2 alpha_1 + alpha)`` and its swap."""
    _, _, l1, l2 = labeled_roots(p, alpha)
    return l1, l2


# -- prop5 -------------------------------------------------------------------------

def _family_points(params: FamilyParams):
    """Axis blow-up chain ``z = (x^p y^q)^n z'`` and the singular points on ``x = 0``."""
    form = params.form_3d()
    res, steps = blowup_axes(form, params.q * params.n, params.p * params.n)
    pts = singular_points_on_divisor(res, "x", "z")
    return res, steps, pts


def _near(a, b, tol=ROOT_MATCH_TOL) -> bool:
    return abs(complex(a) - complex(b)) < tol


def prop5_check(params: FamilyParams) -> Verdict:
    """Necessary condition ``k = 2n`` for a pure meromorphic first integral."""
    k, n = params.k, params.n
    crit = "prop5"
    if k == 2 * n:
        return Verdict(HOLDS, crit, "k = 2n: necessary condition met; existence is decided by thm6",
                       {"k": k, "n": n})
    if 2 * n > k:
        return Verdict(FAILS, crit, "2n > k: generalized surface, no pure meromorphic first integral",
                       {"k": k, "n": n})
    res, steps, pts = _family_points(params)
    target = -params.alpha_value() / 2
    ev = {"k": k, "n": n, "chart": res.chart.label, "steps": steps, "transform": str(res.form)}
    for pt in pts:
        if pt.kind != "point" or not _near(pt.coords["z"], target):
            continue
        cls = classify_simple_type(pt.germ)
        ev.update(point={"x": 0, "z": pt.coords["z"]}, classification=cls.to_json(),
                  saddle_node_confirmed=cls.label == "saddle-node")
        return Verdict(FAILS, crit, f"2n < k: saddle-node at t = -alpha/2 = {_fmt(target)}", ev)
    ev["saddle_node_confirmed"] = False
    return Verdict(FAILS, crit, "2n < k: excluded, but the point t = -alpha/2 was not located", ev)


def _fmt(v) -> str:
    from .scalar import format_scalar
    return format_scalar(v)


# -- family classification ------------------------------------------------------------

GENERIC = "generic"
DICRITICAL_CANDIDATE = "resonant-dicritical-candidate"
RESONANT_DULAC = "resonant-dulac"
BOUNDARY = "boundary"


@dataclass
class FamilyClass:
    label: str
    resonance: ResonanceSolution
    p1: dict = field(default_factory=dict)
    p2: dict = field(default_factory=dict)
    classification: object = None
    evidence: dict = field(default_factory=dict)

    @property
    def decision_complete(self) -> bool:
        return bool(self.classification is not None
                    and self.classification.evidence.get("decision_complete", self.label != DICRITICAL_CANDIDATE))

    def to_json(self):
        from .verdict import jsonable
        return {"label": self.label, "resonance": self.resonance.to_json(), "P1": jsonable(self.p1),
                "P2": jsonable(self.p2),
                "classification": self.classification.to_json() if self.classification else None,
                "evidence": jsonable(self.evidence)}


def family_classify(params: FamilyParams, order: int = 12) -> FamilyClass:
    """Generic / linearizable-candidate / Dulac split of a ``k = 2n`` family.

    In the resonant case the 3D germ at ``P1`` (the point over
    ``alpha_1``) is classified through the axis blow-up chain; its residues
    are ``(pn, qn, alpha_2/(alpha_2 - alpha_1))`` and the linearizable versus
    Dulac question is delegated to the planar normal form.
    """
    if params.k != 2 * params.n:
        raise CriteriaError("family classification needs k = 2n")
    sol = alpha_resonance_solve(params.alpha_sq, params.n)
    if sol.boundary:
        raise CriteriaError("double root / boundary r=0: alpha = +-4 is excluded")
    if sol.r is None:
        return FamilyClass(GENERIC, sol, evidence={"reason": sol.note or "no resonance r"})
    alpha = params.alpha_value()
    a1, a2, l1, l2 = labeled_roots(params.n, alpha)
    res, steps, pts = _family_points(params)
    p1 = p2 = None
    for pt in pts:
        if pt.kind != "point":
            continue
        if _near(pt.coords["z"], a1):
            p1 = pt
        elif _near(pt.coords["z"], a2):
            p2 = pt
    if p1 is None:
        raise CriteriaError("family not in expected shape: P1 not found on the divisor")
    cls = classify_simple_type(p1.germ, order=order)
    expected_residues = (params.p * params.n, params.q * params.n, a2 / (a2 - a1))
    ev = {"chart": res.chart.label, "steps": steps, "transform": str(res.form),
          "expected_residues": expected_residues}
    info1 = {"z": p1.coords["z"], "quotient": l1, "label": cls.label}
    info2 = {"z": a2, "quotient": l2}
    if p2 is not None:
        c2 = classify_simple_type(p2.germ, order=order)
        info2["label"] = c2.label
        info2["parameters"] = c2.parameters
    if cls.label == "resonant-linearizable-candidate":
        label = DICRITICAL_CANDIDATE
    elif cls.label == "dulac-C":
        label = RESONANT_DULAC
    else:
        raise CriteriaError(f"unexpected class {cls.label!r} at P1")
    return FamilyClass(label, sol, info1, info2, cls, ev)


# -- planar side ----------------------------------------------------------------

def planar_points(k: int, n: int, alpha, U: Sequence = (1,), order: int = 12) -> list:
    """Singular points on the component ``z = t^n w`` of ``d(z^2 + t^{2n}) + alpha t^n U dz``."""
    if k != 2 * n:
        raise CriteriaError("planar chart z = t^n w needs k = 2n")
    form = family_form_2d(k, n, alpha, U)
    chart = ChartMap.monomial(("t", "z"), ("t", "w"), [[1, 0], [n, 1]], f"z = t^{n} w")
    strict, _ = strict_transform(form, chart)
    out = []
    from .germ import FoliationGerm
    for pt in singular_points_on_divisor(FoliationGerm(strict, ("t",)), "t", "w"):
        if pt.kind != "point":
            continue
        cls = classify_simple_type(pt.germ, order=order)
        out.append({"w": pt.coords["w"], "class": cls, "verdict": first_integral_local_verdict(cls)})
    return out


# -- cor4 -------------------------------------------------------------------------------

def corollary4_check(n: int, p: int, alpha_sq, probe=None, commutator_tol: float = COMMUTATOR_TOL) -> Verdict:
    """Holomorphic first integral of ``d(z^2 + t^n) + alpha t^p U dz`` and its pull-backs.

    The exponent and resonance conditions are decided exactly.  The holonomy
    conditions (abelian, generators of finite order) come from ``probe``,
    a :class:`~cuspfol.holonomy.HolonomyProbe`; numeric agreement can only
    make the verdict lean towards holding.
    """
    crit = "cor4"
    ev: dict = {"n": n, "p": p}
    if n > 2 * p:
        return Verdict(FAILS, crit, "n > 2p: dicritical components or saddle-nodes in the reduction", ev)
    if n == 2 * p:
        sol = alpha_resonance_solve(alpha_sq, p)
        ev["resonance"] = sol.to_json()
        if not sol.exact:
            return Verdict(INCONCLUSIVE, crit, "alpha^2 not exact: resonance condition undecided", ev)
        if sol.r is not None:
            tag = " (boundary)" if sol.boundary else ""
            return Verdict(FAILS, crit, f"alpha^2 = (16+r)^2/(16+2r) with r = {sol.r}{tag}", ev)
    if probe is None:
        return Verdict(INCONCLUSIVE, crit, "arithmetic conditions met; holonomy not probed", ev)
    ev["holonomy"] = probe.to_json()
    if not probe.all_finite:
        return Verdict(FAILS, crit, "a generator has no period up to the probed order", ev)
    if probe.max_commutator > commutator_tol:
        return Verdict(FAILS, crit,
                       f"generators of orders {probe.orders} do not commute "
                       f"(displacement {probe.max_commutator:.3g})", ev)
    ev["lean"] = HOLDS
    return Verdict(INCONCLUSIVE, crit, "arithmetic conditions met; holonomy numerically finite and abelian", ev)


def corollary4_probe(n: int, p: int, alpha, U: Sequence = (1,), form: Form | None = None,
                     t0: float = 0.05, max_order: int = 12, tol: float = 1e-4):
    """Holonomy probe of the special component of ``d(z^2 + t^n) + alpha t^p U dz`` (or ``form``)."""
    from .holonomy import probe_group, special_component
    form = form if form is not None else family_form_2d(n, p, alpha, U)
    sc = special_component(form, n)
    return probe_group(sc.generators(), t0, max_order, tol), sc


# -- thm6 ---------------------------------------------------------------------------------

DEFAULT_SAMPLES = (0.03, 0.02j, 0.01 + 0.015j)


def _restrict_candidate(sc, candidate):
    from .holonomy import Rational1D
    if isinstance(candidate, Rational1D):
        return candidate
    num, den = candidate if isinstance(candidate, tuple) else (candidate.num, candidate.den)
    return Rational1D(sc.restrict_to_transversal(num), sc.restrict_to_transversal(den))


def theorem6_check(params: FamilyParams, candidate=None, samples: Sequence = DEFAULT_SAMPLES,
                   hold_tol: float = 1e-6, fail_tol: float = 1e-2, order: int = 12) -> Verdict:
    """Pure meromorphic first integral of the 3D family.

    ``candidate`` is a first integral of the planar form in ``(t, z)``
    (a ``MeroFunction`` or a ``(num, den)`` pair) or a ready-made
    :class:`~cuspfol.holonomy.Rational1D` on the transversal.  Its
    restriction to the fiber over the basepoint of the special component is
    tested for invariance under the computed holonomy generators.
    """
    crit = "thm6"
    p5 = prop5_check(params)
    if p5.fails:
        return Verdict(FAILS, crit, f"k != 2n ({p5.reason})", {"prop5": p5.to_json()})
    if candidate is None:
        try:
            fc = family_classify(params, order)
        except CriteriaError as exc:
            return Verdict(FAILS, crit, str(exc), {})
        if fc.label == RESONANT_DULAC:
            return Verdict(FAILS, crit, "Dulac type point on the divisor excludes a first integral",
                           {"family": fc.to_json()})
        return Verdict(INCONCLUSIVE, crit,
                       "first integral iff a rational function on the special transversal is holonomy "
                       "invariant; no candidate supplied", {"family": fc.to_json()})
    from .holonomy import invariant_rational_test, special_component
    sc = special_component(params.form_2d(), params.k)
    gens = sc.generators()
    r = _restrict_candidate(sc, candidate)
    v = invariant_rational_test(gens, r, samples, hold_tol, fail_tol)
    ev = {"special_component": sc.to_json(), "invariance": v.evidence,
          "restricted_num": [complex(c) for c in r.num], "restricted_den": [complex(c) for c in r.den],
          "multipliers": [g.multiplier() for g in gens]}
    return Verdict(v.status, crit, f"candidate on the special transversal: {v.reason}", ev)


# -- thm7 ---------------------------------------------------------------------------------------

def theorem7_check(params: FamilyParams, f=None, build_section: bool = False, order: int = 12,
                   section_order: int = 8) -> Verdict:
    """Dicriticalness of ``d(z^2 + f^{2n}) + alpha f^n U(f) dz`` via its planar shadow.

    ``f`` is only needed for the section: a monomial exponent pair
    ``(p1, p2)`` or an ``FSpec``.  The planar side does not see ``f``.
    """
    crit = "thm7"
    ev: dict = {"k": params.k, "n": params.n}
    if params.k != 2 * params.n:
        return Verdict(FAILS, crit, "not dicritical: the t-exponent must be twice the alpha exponent", ev)
    sol = alpha_resonance_solve(params.alpha_sq, params.n)
    ev["resonance"] = sol.to_json()
    if sol.boundary:
        return Verdict(FAILS, crit, "not dicritical: alpha = +-4 (double root)", ev)
    if sol.r is None:
        if not sol.exact:
            q = [_positive_rational(x) for x in (sol.quotients or ())]
            if not any(q):
                return Verdict(FAILS, crit, "not dicritical: no positive rational quotient", ev)
        else:
            return Verdict(FAILS, crit, "not dicritical: no positive rational quotient (generic case)", ev)
    pts = planar_points(params.k, params.n, params.alpha_value(), params.U, order)
    a1, a2, l1, l2 = labeled_roots(params.n, params.alpha_value())
    ev["quotients"] = (l1, l2)
    ev["points"] = [{"w": pt["w"], "class": pt["class"].to_json()} for pt in pts]
    at_p1 = [pt for pt in pts if _near(pt["w"], a1)]
    if not at_p1:
        raise CriteriaError("family not in expected shape: P1 not found on the planar divisor")
    cls = at_p1[0]["class"]
    if cls.label == "dulac-C":
        k_obs = cls.parameters.get("obstruction_order")
        return Verdict(FAILS, crit, f"not dicritical: Dulac type at P1 (obstruction order {k_obs})", ev, k_obs)
    if cls.label != "resonant-linearizable-candidate":
        raise CriteriaError(f"unexpected planar class {cls.label!r} at P1")
    if not cls.evidence.get("decision_complete"):
        return Verdict(INCONCLUSIVE, crit, "no normal-form obstruction found to the working order", ev, order)
    verdict = Verdict(HOLDS, crit, f"dicritical: linearizable node with ratio {_fmt(l1)} at P1", ev, order)
    if build_section:
        from .integral import dicriticalness_section
        sec = dicriticalness_section(params, f if f is not None else (1, 1), order=section_order)
        ev["section"] = sec.to_json()
    return verdict
