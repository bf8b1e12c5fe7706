"""First integrals, separatrix families and dicriticalness sections.

Everything here is exact when the inputs are: first integrals are verified
by clearing denominators, ``(den d(num) - num d(den)) ^ Omega == 0``, and
separatrices by substituting a parameterization and checking that the
pulled-back 1-form vanishes to the working order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .criteria import NotDicritical as _CriteriaNotDicritical
from .forms import Form, SubstitutionMap
from .scalar import QQi
from .series import TruncSeries, all_exact
from .verdict import FAILS, HOLDS, INCONCLUSIVE, Verdict, jsonable

MAX_DENOMINATOR = 24


class IntegralError(ValueError):
    pass


class NotDicritical(_CriteriaNotDicritical, IntegralError):
    """The family has no dicritical component at the expected point."""


# -- meromorphic functions ------------------------------------------------------------

@dataclass
class MeroFunction:
    """``num / den`` with the common monomial factor removed."""

    num: TruncSeries
    den: TruncSeries

    def __post_init__(self):
        if self.den.is_zero():
            raise IntegralError("denominator vanishes identically")
        vars = tuple(dict.fromkeys(self.num.vars + self.den.vars))
        self.num = self.num.with_vars(vars)
        self.den = self.den.with_vars(vars)
        if not self.num.is_zero():
            m = tuple(min(a, b) for a, b in zip(self.num.monomial_content(), self.den.monomial_content()))
            if any(m):
                self.num = self.num.divide_monomial(m)
                self.den = self.den.divide_monomial(m)

    @classmethod
    def parse(cls, text: str, vars: Sequence[str]) -> "MeroFunction":
        from .parser import parse_quotient
        num, den = parse_quotient(text, vars)
        return cls(num, den)

    @property
    def vars(self):
        return self.num.vars

    @property
    def order(self):
        orders = [o for o in (self.num.order, self.den.order) if o is not None]
        return min(orders) if orders else None

    def is_constant(self) -> bool:
        # num * den' - num' * den == 0 for every partial derivative
        return all((self.den * self.num.diff(v) - self.num * self.den.diff(v)).is_zero() for v in self.vars)

    def evaluate(self, point) -> complex:
        return self.num.evaluate(point) / self.den.evaluate(point)

    def to_json(self):
        return {"num": str(self.num), "den": str(self.den), "order": self.order}

    def __str__(self):
        return f"({self.num})/({self.den})"


def cleared_differential(F: MeroFunction) -> Form:
    """``den d(num) - num d(den)``, the numerator of ``dF``."""
    return Form.function(F.num).d().scale(F.den) - Form.function(F.den).d().scale(F.num)


def verify_first_integral(F: MeroFunction, omega: Form, order: int | None = None) -> Verdict:
    """Decide ``dF ^ omega == 0`` with denominators cleared."""
    crit = "first-integral"
    if F.is_constant():
        raise IntegralError("F is constant")
    vars = omega.vars
    F = MeroFunction(F.num.with_vars(vars), F.den.with_vars(vars))
    w = cleared_differential(F).wedge(omega)
    if order is not None:
        w = w.truncate(order)
    work = w.order
    exact = all_exact(F.num, F.den) and all(c.is_exact() for c in omega.coeffs.values())
    nonzero = [(k, c) for k, c in w.coeffs.items() if not c.is_zero()]
    if not exact:
        nonzero = [(k, c) for k, c in nonzero if c.max_abs() > 1e-10]
    ev = {"order": work, "exact": exact, "F": F.to_json(), "form": str(omega)}
    if nonzero:
        k, c = nonzero[0]
        ev["lowest_degree"] = min(c.valuation() for _, c in nonzero)
        ev["sample_term"] = f"({c})*{w.basis_name(k)}"
        return Verdict(FAILS, crit, "dF ^ omega does not vanish", ev, work)
    if work is not None:
        lowest = _lowest_possible(F, omega)
        if work < lowest:
            ev["required_order"] = lowest
            return Verdict(INCONCLUSIVE, crit, f"working order {work} too low to certify; need {lowest}", ev, work)
        return Verdict(HOLDS, crit, f"dF ^ omega vanishes through order {work}", ev, work)
    return Verdict(HOLDS, crit, "dF ^ omega vanishes identically", ev)


def _lowest_possible(F: MeroFunction, omega: Form) -> int:
    vals = [c.valuation() for c in omega.coeffs.values() if not c.is_zero()]
    fv = [s.valuation() for s in (F.num, F.den) if not s.is_zero()]
    return (min(vals) if vals else 0) + sum(fv)


def fiber_map(f: TruncSeries, source=("x", "y", "z"), target=("t", "z")) -> SubstitutionMap:
    """``Phi(x, y, z) = (f(x, y), z)``."""
    if len(source) != 3 or len(target) != 2:
        raise IntegralError("fiber map goes from three coordinates to two")
    f = f.with_vars(source)
    return SubstitutionMap(source, target, {target[0]: f, target[1]: TruncSeries.var(source[2], source, None)})


def monomial_fiber_map(exps: Sequence[int], source=("x", "y", "z"), target=("t", "z")) -> SubstitutionMap:
    f = TruncSeries.monomial((exps[0], exps[1], 0), QQi(1), source, None)
    return fiber_map(f, source, target)


def pullback_integral(F: MeroFunction, phi: SubstitutionMap, order: int | None = None) -> MeroFunction:
    """``F o Phi``; errors when the denominator pulls back to zero."""
    num = phi.apply_series(F.num.with_vars(phi.target), order)
    den = phi.apply_series(F.den.with_vars(phi.target), order)
    if den.is_zero():
        raise IntegralError("denominator vanishes identically under the map")
    return MeroFunction(num, den)


# -- separatrix families ----------------------------------------------------------------------

@dataclass
class PuiseuxCurve:
    """Parameterization ``target_v = images[v](params)`` after ramification by ``denominator``.

    The ramified parameter ``tau`` satisfies ``t = tau^denominator``; the
    images are ordinary power series in the ramified parameters.
    """

    params: tuple
    images: dict
    denominator: int = 1
    order: int | None = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.denominator > MAX_DENOMINATOR:
            raise IntegralError(f"Puiseux denominator {self.denominator} exceeds {MAX_DENOMINATOR}")

    def substitution(self, target: Sequence[str]) -> SubstitutionMap:
        return SubstitutionMap(self.params, target, self.images)

    def tangent(self, var: str, over: str):
        """Ratio of the lowest-degree coefficients of ``images[var]`` and ``images[over]``."""
        a, b = self.images[var], self.images[over]
        va, vb = a.valuation(), b.valuation()
        if va != vb:
            return QQi(0) if (va is None or (vb is not None and va > vb)) else None
        ea = min(a.homogeneous_part(va).terms)
        eb = min(b.homogeneous_part(vb).terms)
        ca, cb = a.coeff(ea), b.coeff(eb)
        return ca / cb if isinstance(ca, QQi) and isinstance(cb, QQi) else complex(ca) / complex(cb)

    def to_json(self):
        return {"params": list(self.params), "images": {k: str(v) for k, v in self.images.items()},
                "denominator": self.denominator, "order": self.order, "provenance": jsonable(self.provenance)}


def verify_separatrix(curve: PuiseuxCurve, omega: Form, order: int = 8) -> Verdict:
    """Substitute the parameterization into ``omega``; the result must vanish to ``order``."""
    crit = "separatrix"
    if curve.order is not None and curve.order < order:
        return Verdict(INCONCLUSIVE, crit, f"curve known to order {curve.order} only; need {order}",
                       {"required_order": order}, curve.order)
    pulled = curve.substitution(omega.vars).pullback(omega, order + 1)
    bad = []
    for k, c in pulled.coeffs.items():
        c = c.truncate(order)
        if c.is_exact():
            if not c.is_zero():
                bad.append(c.valuation())
        elif c.max_abs() > 1e-9:
            bad.append(min(sum(e) for e, v in c.terms.items() if abs(v) > 1e-9))
    ev = {"order": order, "curve": curve.to_json()}
    if bad:
        ev["lowest_degree"] = min(bad)
        return Verdict(FAILS, crit, f"pulled-back form has a term of degree {min(bad)}", ev, order)
    return Verdict(HOLDS, crit, f"pulled-back form vanishes through order {order}", ev, order)


@dataclass
class LeafExpansion:
    """Leaves ``w = alpha_1 + sum b_j tau^j`` through ``P1`` in the chart ``z = t^n w``, ``t = tau^s2``.

    ``coeffs[j]`` is ``None`` at the free (resonant) index ``s1`` when no
    value was chosen for it.
    """

    alpha1: object
    s1: int
    s2: int
    n: int
    coeffs: list

    def series(self, tau: str = "s", order: int | None = None) -> TruncSeries:
        if any(b is None for b in self.coeffs):
            raise IntegralError("free coefficient not chosen")
        return TruncSeries.from_univariate(self.coeffs, tau, order)

    def determined_part(self, upto: int) -> list:
        """Coefficients ``b_1..b_{upto-1}`` (all determined below the free index)."""
        return [b for b in self.coeffs[1:upto]]


def _chart_form(params) -> Form:
    from .blowup import ChartMap, strict_transform
    n = params.n
    chart = ChartMap.monomial(("t", "z"), ("t", "w"), [[1, 0], [n, 1]], f"z = t^{n} w")
    strict, _ = strict_transform(params.form_2d(), chart)
    return strict


def _resonance_data(params):
    from .criteria import alpha_resonance_solve, labeled_roots
    if params.k != 2 * params.n:
        raise NotDicritical("k != 2n")
    sol = alpha_resonance_solve(params.alpha_sq, params.n)
    if sol.boundary:
        raise NotDicritical("alpha = +-4 (double root)")
    a1, a2, l1, l2 = labeled_roots(params.n, params.alpha_value())
    from .classify import as_rational
    s = as_rational(l1)
    if s is None or s <= 0:
        raise NotDicritical("no positive rational eigenvalue quotient (generic case)")
    return a1, s


def leaf_expansion(params, order: int = 12, c=None) -> LeafExpansion:
    """Solve the leaf equation through ``P1`` degree by degree.

    With ``t = tau^s2`` and ``w = alpha_1 + u(tau)`` the coefficient of
    ``tau^(s2 + j - 1)`` in ``A' s2 tau^(s2-1) + B' u'`` is affine in
    ``b_j``; it degenerates exactly at ``j = s1``, where the remaining
    constant must vanish (otherwise the point is of Dulac type).
    With ``c`` given, ``b_{s1} = c`` and the expansion continues to
    ``order``; otherwise it stops at the free index.
    """
    a1, s = _resonance_data(params)
    s1, s2 = s.numerator, s.denominator
    form = _chart_form(params)
    A, B = form.coeffs[(0,)], form.coeffs[(1,)]
    exact = isinstance(a1, QQi) and all(c.is_exact() for c in (A, B))
    zero = QQi(0) if exact else 0j
    coeffs: list = [a1]
    tau = ("s",)

    def residual(bs, deg):
        u = TruncSeries.from_univariate([zero] + [zero if b is None else b for b in bs], "s", deg + 1)
        t_img = TruncSeries.monomial((s2,), QQi(1), tau, deg + 1)
        w_img = u + a1
        imgs = {"t": t_img, "w": w_img}
        a = A.subs(imgs, tau, deg + 1)
        b = B.subs(imgs, tau, deg + 1)
        r = a * TruncSeries.monomial((s2 - 1,), QQi(s2), tau, deg + 1) + b * u.diff("s")
        return r.coeff((deg,))

    bs: list = []
    for j in range(1, order + 1):
        deg = s2 + j - 1
        r0 = residual(bs + [zero], deg)
        r1 = residual(bs + [QQi(1) if exact else 1.0], deg)
        slope = r1 - r0
        if (slope == 0) if exact else abs(complex(slope)) < 1e-9:
            if (r0 != 0) if exact else abs(complex(r0)) > 1e-7:
                raise NotDicritical(f"resonant obstruction at index {j}: Dulac type")
            if c is None:
                bs.append(None)
                break
            bs.append(c)
        else:
            bs.append(-r0 / slope)
    return LeafExpansion(a1, s1, s2, params.n, coeffs + bs)


def _level(F: MeroFunction, curve: PuiseuxCurve):
    """``lim F`` along the curve: ratio of leading coefficients (``None`` for a pole)."""
    sub = curve.substitution(F.vars)
    num = sub.apply_series(F.num, curve.order)
    den = sub.apply_series(F.den, curve.order)
    vn, vd = num.valuation(), den.valuation()
    if vd is None or (vn is not None and vn < vd):
        return None
    if vn is None or vn > vd:
        return QQi(0)
    cn = num.coeff(min(num.homogeneous_part(vn).terms))
    cd = den.coeff(min(den.homogeneous_part(vd).terms))
    return cn / cd


def separatrix_family(params, C, order: int = 8, dim: int = 2, first_integral: MeroFunction | None = None,
                      f_exps: Sequence[int] | None = None) -> PuiseuxCurve:
    """Member of the separatrix family through ``P1``.

    ``C = 0`` is the member with vanishing free coefficient (the curve
    tangent to the eigen-line, ``z = alpha_1 t^n`` exactly in the linear
    case).  For ``C != 0`` the free coefficient is ``K / C`` where ``K`` is
    the level of ``first_integral`` on the member with free coefficient 1,
    so that ``C`` is the first-integral level; without a first integral
    ``C`` is the free coefficient itself.
    ``dim = 3`` pushes the curve through ``t = x^p y^q`` (``f_exps``
    defaults to ``(params.p, params.q)``).
    """
    from .criteria import family_classify, RESONANT_DULAC
    fc = family_classify(params)
    if fc.label == RESONANT_DULAC:
        raise IntegralError("no dicritical family: Dulac type point")
    work = order + 2
    a1, _ = _resonance_data(params)
    one = QQi(1) if isinstance(a1, QQi) else 1.0
    C = C if not isinstance(C, (int, Fraction)) else QQi(Fraction(C))
    mode = "coefficient"
    if _is_zero(C):
        c = one - one
        mode = "eigen-line"
    elif first_integral is not None:
        K = _level(first_integral, _planar_curve(leaf_expansion(params, work, one), work))
        if K is None or _is_zero(K):
            raise IntegralError("first integral has no finite nonzero level on the family")
        c = K / C
        mode = "level"
    else:
        c = C
    lx = leaf_expansion(params, work, c)
    planar = _planar_curve(lx, work)
    planar.provenance.update(mode=mode, C=C, free_coefficient=c)
    if dim == 2:
        return planar
    if dim != 3:
        raise IntegralError("dim must be 2 or 3")
    p1, p2 = f_exps if f_exps is not None else (params.p, params.q)
    return _fiber_curve(planar, lx, p1, p2, order, work)


def _is_zero(c) -> bool:
    return c == 0 if isinstance(c, QQi) else abs(complex(c)) < 1e-15


def _planar_curve(lx: LeafExpansion, work: int) -> PuiseuxCurve:
    tau = ("s",)
    w = lx.series("s", work)
    t_img = TruncSeries.monomial((lx.s2,), QQi(1), tau, work)
    z_img = (w * TruncSeries.monomial((lx.n * lx.s2,), QQi(1), tau, None)).truncate(work)
    return PuiseuxCurve(tau, {"t": t_img, "z": z_img}, lx.s2, work - 1,
                        {"alpha1": lx.alpha1, "quotient": Fraction(lx.s1, lx.s2), "free_index": lx.s1})


def _fiber_curve(planar: PuiseuxCurve, lx: LeafExpansion, p1: int, p2: int, order: int, work: int) -> PuiseuxCurve:
    src = ("x", "y") if lx.s2 == 1 else ("a", "b")
    d = lx.s2
    tau_img = TruncSeries.monomial((p1, p2), QQi(1), src, None)
    # tau = t^(1/d) with t = x^p1 y^p2 and x = a^d, y = b^d
    deg_bound = (work + 1) * (p1 + p2)
    z3 = planar.images["z"].truncate(work).subs({"s": tau_img}, src, deg_bound)
    images = {"x": TruncSeries.monomial((d, 0), QQi(1), src, None),
              "y": TruncSeries.monomial((0, d), QQi(1), src, None), "z": z3}
    prov = dict(planar.provenance, f_exponents=(p1, p2))
    return PuiseuxCurve(src, images, d, None, prov)


# -- rectification ---------------------------------------------------------------------------

def rectify(omega, order: int = 8, vars=("t", "z")) -> TruncSeries:
    """``S_1`` with ``S(t, z) = (t S_1(t, z), z)`` mapping the lines ``t = c`` to leaves.

    ``omega`` is ``dt + B dz`` (a Form, normalized by its ``dt`` coefficient)
    or ``B`` itself.  ``T(c, z) = c S_1(c, z)`` solves ``dT/dz = -B(T, z)``,
    ``T(c, 0) = c``, by Picard iteration in the z-direction.
    """
    if isinstance(omega, Form):
        vars = omega.vars
        P, Q = omega.coeffs.get((0,)), omega.coeffs.get((1,))
        P = P if P is not None else TruncSeries.zero(vars, None)
        Q = Q if Q is not None else TruncSeries.zero(vars, None)
        if P.is_zero() or _is_zero(P.constant_term()):
            raise IntegralError("dt coefficient is not a unit; the form is not dt + B dz")
        B = (Q * P.truncate(order).inverse(order)).truncate(order)
    else:
        B = omega.truncate(order)
    t, z = vars
    if not B.restrict(t, 0).is_zero():
        raise IntegralError("axis not invariant; choose other axis convention")
    T = TruncSeries.var(t, vars, order)
    for _ in range(order + 2):
        rhs = B.subs({t: T, z: TruncSeries.var(z, vars, order)}, vars, order)
        nxt = (TruncSeries.var(t, vars, order) - rhs.integrate(z)).truncate(order)
        if nxt.equals(T):
            break
        T = nxt
    return T.divide_monomial((1, 0)).truncate(order - 1)


def rectify_check(B: TruncSeries, S1: TruncSeries, order: int, vars=("t", "z")) -> bool:
    """``S^*(dt + B dz) ^ dt == 0`` through ``order``."""
    t, z = vars
    T = S1 * TruncSeries.var(t, vars, None)
    lhs = T.diff(z) + B.subs({t: T, z: TruncSeries.var(z, vars, None)}, vars, order)
    return lhs.truncate(order - 1).is_zero() if lhs.is_exact() else lhs.truncate(order - 1).max_abs() < 1e-9


# -- dicriticalness section -------------------------------------------------------------------

@dataclass
class FSpec:
    """``f o rho = x^a y^b V(x, y)``; a monomial ``f`` is ``V = 1``."""

    a: int
    b: int
    V: TruncSeries | None = None

    @property
    def monomial(self) -> bool:
        return self.V is None or (len(self.V.terms) == 1 and self.V.constant_term() == 1)

    def f_series(self, vars=("x", "y", "z")) -> TruncSeries:
        mono = TruncSeries.monomial((self.a, self.b, 0), QQi(1), vars, None)
        if self.monomial:
            return mono
        return mono * self.V.with_vars(vars[:2]).with_vars(vars)

    def to_json(self):
        return {"a": self.a, "b": self.b, "V": None if self.monomial else str(self.V)}


@dataclass
class SectionMap:
    """``sigma = (sigma_1, sigma_2, sigma_3)`` in the coordinates ``(t, z)``."""

    components: dict
    provenance: dict
    certificate: dict = field(default_factory=dict)

    def substitution(self, target=("x", "y", "z")) -> SubstitutionMap:
        return SubstitutionMap(("t", "z"), target, self.components)

    def to_json(self):
        return {"components": {k: str(v) for k, v in self.components.items()},
                "provenance": jsonable(self.provenance), "certificate": jsonable(self.certificate)}


def _chart_exponents(s: Fraction) -> tuple:
    """``(n1, m1, n2, m2)`` with ``(m1, m2) = (s2, s1)`` and ``n1 m2 - m1 n2 = 1``."""
    s1, s2 = s.numerator, s.denominator
    for n1 in range(1, s2 + 1):
        if (n1 * s1 - 1) % s2 == 0:
            return n1, s2, (n1 * s1 - 1) // s2, s1
    raise IntegralError("no unimodular chart for the quotient")


def _to_fspec(f) -> FSpec:
    if isinstance(f, FSpec):
        return f
    if isinstance(f, (tuple, list)) and len(f) == 2:
        return FSpec(int(f[0]), int(f[1]))
    if isinstance(f, (tuple, list)) and len(f) == 3:
        return FSpec(int(f[0]), int(f[1]), f[2])
    raise IntegralError("missing monomialization: give f as (p1, p2) or (a, b, V)")


def dicriticalness_section(params, f=(1, 1), order: int = 8) -> SectionMap:
    """Section ``sigma`` with ``sigma^* Omega ^ dt == 0`` and ``sigma^* Omega != 0``.

    Steps: the chart ``E`` at ``P1`` that turns the leaves into graphs over
    the dicritical axis; rectification ``S`` of the saturated ``E^* omega``;
    the ramification ``phi``; and the lift through ``Phi = (f, z)``.
    """
    from .criteria import theorem7_check
    v = theorem7_check(params)
    if not v.holds:
        raise NotDicritical(f"planar side: {v.reason}")
    fs = _to_fspec(f)
    if fs.a <= 0 or fs.b <= 0:
        raise IntegralError("f exponents must be positive")
    if not fs.monomial and _is_zero(fs.V.constant_term()):
        raise IntegralError("implicit-function solve fails: V(0, 0) = 0")
    a1, s = _resonance_data(params)
    n1, m1, n2, m2 = _chart_exponents(s)
    lx = leaf_expansion(params, s.numerator)
    p = params.n
    vars = ("t", "z")
    tt, zz = TruncSeries.var("t", vars, None), TruncSeries.var("z", vars, None)
    T = tt ** n1 * zz ** m1
    W = tt ** n2 * zz ** m2
    # determined part of the leaves below the free index, in powers of T^(1/s2)
    corr = TruncSeries.zero(vars, None)
    for j, b in enumerate(lx.determined_part(lx.s1), start=1):
        if b is None or _is_zero(b):
            continue
        if j % lx.s2:
            raise IntegralError("fractional correction terms are not supported")
        corr = corr + (T ** (j // lx.s2)).scale(b)
    E = SubstitutionMap(vars, vars, {"t": T, "z": T ** p * (W + corr + a1)})
    pulled = E.pullback(params.form_2d())
    sat, _ = pulled.saturate()
    # sigma^* Omega is E^* omega pulled back by the rectification and (t^a, z^b)
    low = min(c.valuation() for c in pulled.coeffs.values())
    probe = max(order, max(fs.a, fs.b) * (low + 1))
    work = probe + 2
    P, Q = sat.coeffs.get((0,)), sat.coeffs.get((1,))
    axis = "z=0"
    if P is not None and not _is_zero(P.constant_term()):
        rect_form = sat
    elif Q is not None and not _is_zero(Q.constant_term()):
        axis = "t=0"
        rect_form = sat.rename({"t": "z", "z": "t"}).with_vars(vars)
    else:
        raise IntegralError("the chart E does not reach a regular point of the pulled-back foliation")
    S1 = rectify(rect_form.truncate(work), work)
    if axis == "t=0":
        S1 = S1.rename({"t": "z", "z": "t"}).with_vars(vars)
    prov = {"chart_exponents": {"n1": n1, "m1": m1, "n2": n2, "m2": m2}, "p": p, "alpha1": a1,
            "quotient": s, "axis": axis, "S1": str(S1.truncate(4)), "f": fs.to_json(),
            "E": {k: str(g) for k, g in E.images.items()}}
    if axis != "z=0":
        raise IntegralError("vertical-axis rectification is recorded but not lifted; "
                            "the horizontal axis is expected to be transversal here")
    comps = _lift(fs, S1, n1, m1, n2, m2, p, a1, corr, work)
    sec = SectionMap(comps, prov)
    sec.certificate = section_certificate(sec, params, fs, order, probe)
    if not sec.certificate["tangent_to_dt"] or not sec.certificate["nonzero"]:
        raise IntegralError(f"section certificate failed: {sec.certificate}")
    return sec


def _lift(fs: FSpec, S1, n1, m1, n2, m2, p, a1, corr, work) -> dict:
    vars = ("t", "z")
    tt, zz = TruncSeries.var("t", vars, None), TruncSeries.var("z", vars, None)
    if fs.monomial:
        p1, p2 = fs.a, fs.b
        phi = {"t": tt ** p1, "z": zz ** p2}
        S1p = S1.subs(phi, vars, work)
        sig1 = tt ** n1 * S1p.unit_power(Fraction(n1, p1), work)
        sig2 = zz ** m1
        base_t = tt ** p1 * S1p
        base_z = zz ** p2
    else:
        a = fs.a
        # z^b V(t^n1, z^m1)^(1/m1) = S1(t^a, phi2)^(n1/m1) phi2, solved by fixed point
        V = fs.V.with_vars(("x", "y")).subs({"x": tt ** n1, "y": zz ** m1}, vars, work)
        lhs = zz ** fs.b * V.unit_power(Fraction(1, m1), work)
        phi2 = lhs
        for _ in range(work + 2):
            S1p = S1.subs({"t": tt ** a, "z": phi2}, vars, work)
            nxt = (lhs * S1p.unit_power(Fraction(-n1, m1), work)).truncate(work)
            if nxt.equals(phi2):
                break
            phi2 = nxt
        S1p = S1.subs({"t": tt ** a, "z": phi2}, vars, work)
        sig1 = tt ** n1
        sig2 = zz ** m1
        base_t = tt ** a * S1p
        base_z = phi2
    Tt = (base_t ** n1 * base_z ** m1).truncate(work)
    Wt = (base_t ** n2 * base_z ** m2).truncate(work)
    corr_t = corr.subs({"t": base_t, "z": base_z}, vars, work) if not corr.is_zero() else corr
    sig3 = (Tt ** p * (Wt + corr_t + a1)).truncate(work)
    return {"x": sig1.truncate(work), "y": sig2.truncate(work), "z": sig3}


def section_certificate(sec: SectionMap, params, fs: FSpec, order: int, probe: int | None = None) -> dict:
    """``sigma^* Omega ^ dt`` through ``order`` and the lowest term of ``sigma^* Omega``.

    ``sigma^* Omega`` starts around degree ``k deg(f o sigma)``, so the
    search for a nonzero term runs to ``probe >= order``.
    """
    omega3 = _omega_f(params, fs)
    probe = max(order, probe or order)
    pulled = sec.substitution().pullback(omega3, probe + 1).truncate(probe)
    dt = Form.differential("t", ("t", "z"))
    wedge = pulled.wedge(dt)
    tangent = all((c.is_zero() if c.is_exact() else c.max_abs() < 1e-9) for c in wedge.coeffs.values())
    nz = [c for c in pulled.coeffs.values() if not c.is_zero()]
    lowest = min((c.valuation() for c in nz), default=None)
    return {"order": probe, "tangent_to_dt": tangent, "nonzero": bool(nz), "lowest_degree": lowest}


def _omega_f(params, fs: FSpec) -> Form:
    """``d(z^2 + f^k) + alpha f^n U(f) dz`` for ``f`` given by ``fs``."""
    vars = ("x", "y", "z")
    f = fs.f_series(vars)
    zz = TruncSeries.var("z", vars, None)
    u = params.u_series("t").subs({"t": f}, vars, None)
    g = zz * zz + f ** params.k
    coef = f ** params.n * u * params.alpha_value()
    return Form.function(g).d() + Form.one_form(vars, [TruncSeries.zero(vars, None),
                                                       TruncSeries.zero(vars, None), coef])
