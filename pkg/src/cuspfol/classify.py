"""Local analysis of a singular point.

Planar germs are studied through the dual vector field ``X = -Q d/da + P d/db``
of ``w = P da + Q db``.  Three-dimensional germs are matched against the
logarithmic models

* A: ``sum l_i dx_i/x_i``
* B: ``sum_{i<=k} p_i dx_i/x_i + psi(x^P) sum_{i>=2} alpha_i dx_i/x_i``
* C: ``dx_1 - x_1 sum p_i dx_i/x_i + x^P sum alpha_i dx_i/x_i``

or, when the germ is the pullback of a planar form under a monomial map
``(x, y, z) -> (x^a y^b, z)``, reduced to the plane.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .blowup import BlowupError, blowup_point, divisor_invariant
from .forms import Form, LogForm, VectorField
from .germ import FoliationGerm
from .linalg import eigenvalues_2x2, inverse, nullspace, rank
from .scalar import QQi, as_fraction, rational_approx
from .series import DEFAULT_ORDER, TruncSeries
from .verdict import FAILS, HOLDS, INCONCLUSIVE, Verdict, jsonable

LABELS = ("regular", "simple-A", "simple-B-resonant", "saddle-node", "dulac-C",
          "resonant-linearizable-candidate", "dicritical-radial", "unclassified")

FLOAT_TOL = 1e-9
MAX_WEIGHT = 20
_INF = 10 ** 9


class ClassifyError(ValueError):
    pass


class NotPreSimple(ClassifyError):
    """The germ needs further blow-ups before it can be classified."""


def _zero(c, tol=FLOAT_TOL) -> bool:
    if isinstance(c, QQi):
        return c.is_zero()
    return abs(c) <= tol


def _div(a, b):
    if isinstance(a, QQi) and isinstance(b, QQi):
        return a / b
    return complex(a) / complex(b)


def _val(s: TruncSeries) -> int:
    v = s.valuation()
    return _INF if v is None else v


def as_rational(x) -> Fraction | None:
    """Rational value of a real scalar; floats are recognised up to denominator 1000."""
    if isinstance(x, QQi):
        return as_fraction(x)
    return rational_approx(complex(x), 1000, FLOAT_TOL)


def _germ(g) -> FoliationGerm:
    return g if isinstance(g, FoliationGerm) else FoliationGerm(g)


# -- linear part -------------------------------------------------------------

def dual_field(form: Form) -> VectorField:
    """Dual field of a planar 1-form; it spans the kernel of ``form``."""
    if len(form.vars) != 2 or form.degree != 1:
        raise ClassifyError("dual field is defined for planar 1-forms")
    p, q = form.components()
    return VectorField(form.vars, [-q, p])


@dataclass
class LinearPart:
    matrix: list | None
    eigenvalues: tuple
    nilpotent: bool
    kind: str = "dual-field"       # or "residues"
    poles: tuple = ()

    @property
    def ratio(self):
        """``l2 / l1`` for planar germs (``None`` when ``l1 = 0``)."""
        if len(self.eigenvalues) != 2 or _zero(self.eigenvalues[0]):
            return None
        return _div(self.eigenvalues[1], self.eigenvalues[0])

    def to_json(self):
        return {"kind": self.kind, "matrix": jsonable(self.matrix), "eigenvalues": jsonable(self.eigenvalues),
                "nilpotent": self.nilpotent, "poles": list(self.poles)}


def _ordered_eigenvalues(m):
    # triangular matrices keep the eigenvalue of each coordinate direction in place
    if _zero(m[1][0], 0.0) or _zero(m[0][1], 0.0):
        return (m[0][0], m[1][1])
    return tuple(eigenvalues_2x2(m))


def linear_part(germ) -> LinearPart:
    """Linear part of the dual field (planar) or residues of the log presentation (3D)."""
    germ = _germ(germ)
    if not germ.is_singular():
        raise ClassifyError("linear part requested at a regular point (not singular)")
    form = germ.form
    if len(form.vars) == 2:
        m = dual_field(form).linear_matrix()
        ev = _ordered_eigenvalues(m)
        return LinearPart(m, ev, all(_zero(e) for e in ev))
    poles = natural_poles(germ)
    if not poles:
        raise ClassifyError("form is not in logarithmic shape: no invariant coordinate hyperplane")
    lf = log_presentation(form, poles)
    res = tuple(lf.coeffs[v].constant_term() for v in lf.poles)
    return LinearPart(None, res, all(_zero(r) for r in res), "residues", lf.poles)


# -- logarithmic presentation -----------------------------------------------

def log_presentation(form: Form, poles: Sequence[str]) -> LogForm:
    """Coprime logarithmic coefficients ``a_i`` of ``form`` relative to ``poles``."""
    return LogForm.from_holomorphic(form, poles)


def natural_poles(germ: FoliationGerm) -> tuple:
    """Divisor components plus invariant coordinate hyperplanes."""
    form = germ.form
    out = set(germ.divisor_vars)
    for v in form.vars:
        if v not in out and divisor_invariant(form, v):
            out.add(v)
    return tuple(v for v in form.vars if v in out)


# -- adapted invariants ------------------------------------------------------

@dataclass
class AdaptedInvariants:
    nu: int
    mu: int
    Rs: int | None
    dimensional_type_bounds: tuple
    weights: tuple | None = None
    note: str = ""

    def to_json(self):
        return {"nu": self.nu, "mu": self.mu, "Rs": self.Rs,
                "dimensional_type_bounds": list(self.dimensional_type_bounds),
                "weights": list(self.weights) if self.weights else None, "note": self.note}


def _check_divisor(form: Form, E) -> tuple:
    E = tuple(E)
    if len(set(E)) != len(E) or any(v not in form.vars for v in E):
        raise ClassifyError(f"E not normal crossings in the given coordinates: {E}")
    return E


def radially_dicritical(form: Form) -> bool:
    """Whether the first point blow-up produces a dicritical component."""
    if not FoliationGerm(form).is_singular():
        return False
    try:
        res = blowup_point(form, form.vars[0])
    except BlowupError:
        return False
    return not res.divisor[-1].invariant


def _initial_matrix(series: list, nu: int):
    """Columns are the degree-``nu`` parts of ``series``; rows are monomials."""
    monos = sorted({e for s in series for e in s.homogeneous_part(nu).terms})
    return [[s.coeff(e) for s in series] for e in monos]


def _positive_cone_meets(kernel: list) -> bool:
    """Does the real span of ``kernel`` contain a strictly positive vector?"""
    if not kernel:
        return False
    n = len(kernel[0])
    if len(kernel) == n:
        return True
    if len(kernel) == 1:
        v = kernel[0]
        if any(not isinstance(c, QQi) or c.im != 0 for c in v):
            return False
        signs = {c.re > 0 for c in v if c.re != 0}
        return all(c.re != 0 for c in v) and len(signs) == 1
    import numpy as np
    from scipy.optimize import linprog
    # maximise t subject to K^T c >= t, t <= 1
    k = np.array([[complex(c).real for c in v] for v in kernel])
    m = len(kernel)
    cost = np.zeros(m + 1)
    cost[-1] = -1.0
    a_ub = np.hstack([-k.T, np.ones((n, 1))])
    res = linprog(cost, A_ub=a_ub, b_ub=np.zeros(n), bounds=[(None, None)] * m + [(None, 1.0)])
    return bool(res.success and -res.fun > 1e-9)


def _weight_search(series: list, nu: int):
    mat = _initial_matrix(series, nu)
    n = len(series)
    if not mat:
        return (1,) * n, True
    kernel = nullspace(mat, n)
    if not kernel:
        return None, False
    for phi in itertools.product(range(1, MAX_WEIGHT + 1), repeat=n):
        if math.gcd(*phi) != 1:
            continue
        if all(_zero(sum((row[i] * phi[i] for i in range(n)), QQi(0))) for row in mat):
            return phi, True
    return None, _positive_cone_meets(kernel)


def _monomials(n: int, max_deg: int):
    out = []
    for d in range(max_deg + 1):
        for e in itertools.product(range(d + 1), repeat=n):
            if sum(e) == d:
                out.append(e)
    return out


def dimensional_type_bounds(form: Form, jet: int = 3) -> tuple[int, int]:
    """Bounds on the dimensional type from polynomial solutions of ``form(X) = 0``.

    Jet solutions of degree ``jet`` overestimate the span of ``X(0)`` and so
    give a lower bound; exact polynomial solutions (exact input only) give
    an upper bound.
    """
    n = len(form.vars)
    comps = form.components()
    singular = FoliationGerm(form).is_singular()
    if not singular:
        return (1, 1)
    if form.order is not None:
        jet = max(0, min(jet, form.order))
    monos = _monomials(n, jet)
    unknowns = [(i, m) for i in range(n) for m in monos]

    def span_dim(equations_upto):
        rows: dict = {}
        for col, (i, m) in enumerate(unknowns):
            prod = comps[i].multiply_monomial(m)
            for e, c in prod.terms.items():
                if equations_upto is not None and sum(e) > equations_upto:
                    continue
                rows.setdefault(e, [QQi(0)] * len(unknowns))[col] = c
        sol = nullspace(list(rows.values()), len(unknowns)) if rows else \
            [[QQi(int(r == c)) for r in range(len(unknowns))] for c in range(len(unknowns))]
        zero_cols = [col for col, (i, m) in enumerate(unknowns) if sum(m) == 0]
        return rank([[v[c] for c in zero_cols] for v in sol]) if sol else 0

    lower = max(2, n - span_dim(jet))
    upper = n
    if form.is_exact():
        upper = max(lower, n - span_dim(None))
    return (lower, upper)


def adapted_invariants(germ, E=None, jet: int = 3) -> AdaptedInvariants:
    """Adapted order, adapted multiplicity and resonance invariant relative to ``E``."""
    germ = _germ(germ)
    form = germ.form
    E = _check_divisor(form, germ.divisor_vars if E is None else E)
    lf = log_presentation(form, E)
    vals = {v: _val(lf.coeffs[v]) for v in form.vars}
    nu = min(vals.values())
    mu = min([vals[v] for v in lf.poles] + [vals[v] + 1 for v in form.vars if v not in lf.poles])
    bounds = dimensional_type_bounds(form, jet)
    rs, weights, note = 0, None, ""
    if nu == mu:
        if radially_dicritical(form.saturate()[0]):
            rs = 1
        elif lf.poles:
            phi, positive = _weight_search([lf.coeffs[v] for v in lf.poles], nu)
            if phi is not None:
                rs, weights = 2, phi
            elif positive:
                rs, note = None, f"no weight <= {MAX_WEIGHT}"
    return AdaptedInvariants(nu, mu, rs, bounds, weights, note)


def is_pre_simple(germ, E=None) -> tuple[bool, str]:
    """Pre-simplicity relative to ``E``; returns ``(flag, reason)``."""
    germ = _germ(germ)
    form = germ.form
    E = _check_divisor(form, germ.divisor_vars if E is None else E)
    for v in E:
        if not divisor_invariant(form, v):
            return False, f"component {v}=0 is dicritical"
    inv = adapted_invariants(germ, E)
    if inv.nu == 0:
        return True, "adapted order 0"
    if not (inv.nu == inv.mu == 1 and inv.Rs == 0):
        return False, f"nu={inv.nu}, mu={inv.mu}, Rs={inv.Rs}"
    lf = log_presentation(form, E)
    n = len(form.vars)
    lin = [[lf.coeffs[v].coeff(tuple(int(k == j) for k in range(n))) for j in range(n)] for v in lf.poles]
    lin = [row for row in lin if any(not _zero(c) for c in row)]
    if rank(lin) != 1:
        return False, "directrix does not have codimension one"
    ell = lin[0]
    coords = [[QQi(int(k == form.vars.index(v))) for k in range(n)] for v in E]
    if rank(coords + [ell]) == len(coords) + 1:
        return True, "directrix transverse to E"
    if any(rank([c, ell]) == 1 for c in coords):
        return True, "directrix is a component of E"
    return False, "directrix not normal crossings with E"


# -- monomial pullback reduction ---------------------------------------------

@dataclass
class MonomialReduction:
    """``form = m * Phi^*(eta) / f`` up to units with ``Phi = (u^a v^b, fiber)``."""

    eta: Form
    weights: tuple
    monomial: tuple
    source_vars: tuple
    fiber: str

    def to_json(self):
        return {"eta": str(self.eta), "weights": list(self.weights), "monomial": list(self.monomial),
                "source_vars": list(self.source_vars), "fiber": self.fiber}


def monomial_reduction(form: Form, fiber: str | None = None, fvar: str = "f") -> MonomialReduction | None:
    """Recognise a 3D form as a monomial pullback of a planar form."""
    vars = form.vars
    if len(vars) != 3:
        return None
    fibers = [fiber] if fiber else [vars[2], vars[1], vars[0]]
    for fb in fibers:
        red = _reduce_with_fiber(form, fb, fvar)
        if red is not None:
            return red
    return None


def _reduce_with_fiber(form: Form, fiber: str, fvar: str):
    vars = form.vars
    u, v = [w for w in vars if w != fiber]
    iu, iv, iz = vars.index(u), vars.index(v), vars.index(fiber)
    comps = form.components()
    A, B, C = comps[iu], comps[iv], comps[iz]
    if A.is_zero() or B.is_zero():
        return None
    ua = A.multiply_monomial(tuple(int(k == iu) for k in range(3)))
    vb = B.multiply_monomial(tuple(int(k == iv) for k in range(3)))
    e0 = min(ua.terms)
    if e0 not in vb.terms:
        return None
    ratio = as_rational(_div(ua.terms[e0], vb.terms[e0]))
    if ratio is None or ratio <= 0:
        return None
    a, b = ratio.numerator, ratio.denominator
    tol = 0.0 if ua.is_exact() and all(isinstance(c, QQi) for c in ua.terms.values()) else 1e-10
    if not (ua.scale(QQi(b)) - vb.scale(QQi(a))).equals(TruncSeries.zero(vars, None), tol=tol):
        return None
    Q = ua.scale(QQi(Fraction(1, a)))
    terms = [(e, "Q") for e in Q.terms] + [(e, "C") for e in C.terms]
    if not terms:
        return None
    deltas = {b * e[iu] - a * e[iv] for e, _ in terms}
    if len(deltas) != 1:
        return None
    base = min(terms, key=lambda t: (t[0][iu], t[0][iv]))[0]
    i0, j0 = base[iu], base[iv]
    nvars = (fvar, fiber)
    qf, cf = {}, {}
    for src, dst in ((Q, qf), (C, cf)):
        for e, c in src.terms.items():
            k, rem = divmod(e[iu] - i0, a)
            if rem or k < 0 or e[iv] - j0 != k * b:
                return None
            dst[(k, e[iz])] = c
    order = None
    if form.order is not None:
        order = max(0, (form.order - i0 - j0) // (a + b))
    qs = TruncSeries(nvars, qf, order)
    cs = TruncSeries(nvars, cf, order).multiply_monomial((1, 0))
    eta = Form.one_form(nvars, [qs, cs])
    if eta.is_zero():
        return None
    eta, _ = eta.saturate()
    return MonomialReduction(eta, (a, b), (i0, j0), (u, v), fiber)


# -- planar normal forms -------------------------------------------------------

def _eigvec(m, lam):
    r1 = (m[0][0] - lam, m[0][1])
    if not (_zero(r1[0]) and _zero(r1[1])):
        return [m[0][1], lam - m[0][0]]
    r2 = (m[1][0], m[1][1] - lam)
    if not (_zero(r2[0]) and _zero(r2[1])):
        return [lam - m[1][1], m[1][0]]
    return None


def diagonalize(X: VectorField, lambdas) -> tuple[VectorField, list]:
    """Linear change ``x = P y`` putting a diagonalizable linear part in diagonal form."""
    m = X.linear_matrix()
    if _zero(m[0][1], 0.0) and _zero(m[1][0], 0.0) and _zero(m[0][0] - lambdas[0], 0.0):
        return X, [[QQi(1), QQi(0)], [QQi(0), QQi(1)]]
    cols = []
    for lam in lambdas:
        v = _eigvec(m, lam)
        if v is None:
            raise ClassifyError("cannot diagonalize the linear part")
        cols.append(v)
    p = [[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]]
    pinv = inverse(p)
    a, b = X.vars
    imgs = {a: TruncSeries.var(a, X.vars, None).scale(p[0][0]) + TruncSeries.var(b, X.vars, None).scale(p[0][1]),
            b: TruncSeries.var(a, X.vars, None).scale(p[1][0]) + TruncSeries.var(b, X.vars, None).scale(p[1][1])}
    moved = [c.subs(imgs, X.vars) for c in X.comps]
    comps = [moved[0].scale(pinv[i][0]) + moved[1].scale(pinv[i][1]) for i in range(2)]
    return VectorField(X.vars, comps), p


@dataclass
class NormalForm:
    """Poincare-Dulac normal form of a planar field with diagonal linear part."""

    field: VectorField
    resonant: list          # (degree, exponent, component, coefficient)
    order: int
    chart: dict             # x = chart(y) in the diagonal coordinates

    def first_obstruction(self):
        for d, e, j, c in self.resonant:
            if not _zero(c, 1e-10):
                return d, e, j, c
        return None


def poincare_dulac(X: VectorField, lambdas, order: int) -> NormalForm:
    """Remove non-resonant terms degree by degree up to ``order``."""
    vars = X.vars
    Y = [c.truncate(order) for c in X.comps]
    chart = {v: TruncSeries.var(v, vars, order) for v in vars}
    resonant = []
    exact = all(isinstance(l, QQi) for l in lambdas)
    for d in range(2, order + 1):
        # h is an exact polynomial: its derivatives must not lose truncation order
        h = [TruncSeries.zero(vars, None), TruncSeries.zero(vars, None)]
        touched = False
        for j in range(2):
            for e, c in Y[j].homogeneous_part(d).terms.items():
                den = e[0] * lambdas[0] + e[1] * lambdas[1] - lambdas[j]
                if _zero(den, 0.0 if exact else FLOAT_TOL):
                    continue
                h[j] = h[j] + TruncSeries.monomial(e, _div(c, den), vars, None)
                touched = True
        if touched:
            imgs = {vars[i]: TruncSeries.var(vars[i], vars, order) + h[i] for i in range(2)}
            ys = [y.subs(imgs, vars, order) for y in Y]
            j00 = h[0].diff(vars[0]) + 1
            j01 = h[0].diff(vars[1])
            j10 = h[1].diff(vars[0])
            j11 = h[1].diff(vars[1]) + 1
            det_inv = (j00 * j11 - j01 * j10).inverse(order)
            Y = [((j11 * ys[0] - j01 * ys[1]) * det_inv).truncate(order),
                 ((j00 * ys[1] - j10 * ys[0]) * det_inv).truncate(order)]
            chart = {v: g.subs(imgs, vars, order) for v, g in chart.items()}
        for j in range(2):
            for e, c in Y[j].homogeneous_part(d).terms.items():
                if not _zero(c, 1e-12):
                    resonant.append((d, e, j, c))
    return NormalForm(VectorField(vars, Y), resonant, order, chart)


def center_manifold(X: VectorField, lam, order: int):
    """Reduced field on the center manifold ``y1 = h(y2)`` for linear part ``diag(lam, 0)``.

    Returns ``(h coefficients, g coefficients)`` as lists indexed by degree.
    """
    a, b = X.vars
    h = [QQi(0)] * (order + 1) if isinstance(lam, QQi) else [0j] * (order + 1)
    uni = ("s",)

    def restricted(hc):
        hs = TruncSeries.from_univariate(hc, "s", order)
        imgs = {a: hs, b: TruncSeries.var("s", uni, order)}
        return [c.subs(imgs, uni, order) for c in X.comps], hs

    for d in range(2, order + 1):
        (y1, y2), hs = restricted(h)
        resid = (y1 - hs.diff("s") * y2).truncate(order)
        r = resid.coeff((d,))
        if not _zero(r, 0.0):
            h[d] = h[d] - _div(r, lam)
    (y1, y2), _ = restricted(h)
    g = [y2.coeff((k,)) for k in range(order + 1)]
    return h, g


# -- classification ------------------------------------------------------------

@dataclass
class SingularityClass:
    label: str
    parameters: dict = field(default_factory=dict)
    evidence: dict = field(default_factory=dict)
    order: int | None = None
    data: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.label not in LABELS:
            raise ClassifyError(f"unknown label {self.label!r}")

    def to_json(self):
        return {"label": self.label, "parameters": jsonable(self.parameters),
                "evidence": jsonable(self.evidence), "order": self.order}


def classify_simple_type(germ, E=None, order: int = DEFAULT_ORDER) -> SingularityClass:
    """Formal type of a singular point, to truncation order ``order``."""
    germ = _germ(germ)
    if E is not None:
        germ = germ.with_divisor(E)
    if not germ.is_singular():
        return SingularityClass("regular", {}, {"reason": "nonvanishing form"}, order)
    n = len(germ.vars)
    if n == 2:
        return classify_planar(germ.form, order)
    if n == 3:
        return _classify_3d(germ, order)
    raise ClassifyError("classification supports two or three variables")


def classify_planar(form: Form, order: int = DEFAULT_ORDER) -> SingularityClass:
    lp = linear_part(form)
    l1, l2 = lp.eigenvalues
    ev = {"eigenvalues": (l1, l2)}
    base = {"matrix": lp.matrix}
    X = dual_field(form)
    if lp.nilpotent:
        return SingularityClass("unclassified", ev, dict(base, reason="nilpotent linear part; blow up further"),
                                order)
    if _zero(l1) or _zero(l2):
        lam = l2 if _zero(l1) else l1
        pair = (lam, QQi(0) if isinstance(lam, QQi) else 0j)
        Y, P = diagonalize(X, pair)
        h, g = center_manifold(Y, lam, order)
        mult = next((k for k in range(1, order + 1) if not _zero(g[k], 1e-10)), None)
        if mult is None:
            return SingularityClass("unclassified", ev,
                                    dict(base, reason=f"center manifold flat to order {order}"), order)
        if mult == 1:
            raise ClassifyError("inconsistent center manifold reduction")
        params = dict(ev, multiplicity=mult, leading=g[mult])
        return SingularityClass("saddle-node", params, dict(base, strong_eigenvalue=lam), order)
    ratio = _div(l2, l1)
    ev["ratio"] = ratio
    r = as_rational(ratio)
    if r is None:
        return SingularityClass("simple-A", ev, dict(base, reason="non-rational eigenvalue ratio"), order)
    if r < 0:
        return SingularityClass("simple-B-resonant", ev, dict(base, model="planar resonant saddle"), order)
    if r == 1:
        m = lp.matrix
        if _zero(m[0][1], 0.0) and _zero(m[1][0], 0.0):
            return SingularityClass("dicritical-radial", ev, dict(base, reason="scalar linear part"), order)
        return SingularityClass("dulac-C", dict(ev, obstruction_order=1),
                                dict(base, reason="non-diagonalizable linear part"), order)
    Y, P = diagonalize(X, (l1, l2))
    if r.denominator == 1 or r.numerator == 1:
        k = max(r.numerator, r.denominator)
        depth = min(order, k)
        nf = poincare_dulac(Y, (l1, l2), depth)
        obs = nf.first_obstruction()
        data = {"normal_form": nf, "P": P}
        evid = dict(base, normal_form_order=depth, resonance_degree=k)
        if obs is not None:
            d, e, j, c = obs
            return SingularityClass("dulac-C", dict(ev, obstruction_order=d, obstruction=c),
                                    dict(evid, obstruction_monomial=list(e), component=j), order, data)
        complete = depth >= k
        return SingularityClass("resonant-linearizable-candidate", ev,
                                dict(evid, decision_complete=complete,
                                     reason="resonant coefficient vanishes" if complete
                                     else f"no obstruction up to order {depth}"), order, data)
    nf = poincare_dulac(Y, (l1, l2), min(order, 3))
    return SingularityClass("resonant-linearizable-candidate", ev,
                            dict(base, decision_complete=True, reason="no resonant monomials"),
                            order, {"normal_form": nf, "P": P})


def _scale_rational(values) -> tuple | None:
    """Integer vector proportional to ``values`` (all real rational ratios), else ``None``."""
    ref = next((v for v in values if not _zero(v)), None)
    if ref is None:
        return None
    ratios = []
    for v in values:
        q = as_rational(_div(v, ref))
        if q is None:
            return None
        ratios.append(q)
    den = math.lcm(*[q.denominator for q in ratios])
    ints = [int(q * den) for q in ratios]
    g = math.gcd(*ints) or 1
    return tuple(i // g for i in ints)


def _resonant_residues(res, bound: int) -> bool:
    for m in itertools.product(range(bound + 1), repeat=len(res)):
        if any(m) and _zero(sum((mi * r for mi, r in zip(m, res)), QQi(0))):
            return True
    return False


def _classify_3d(germ: FoliationGerm, order: int) -> SingularityClass:
    form = germ.form
    poles = natural_poles(germ)
    lf = log_presentation(form, poles)
    vals = {v: _val(lf.coeffs[v]) for v in form.vars}
    nu = min(vals.values())
    ev = {"poles": list(poles), "log_form": str(lf), "adapted_order": nu}
    if nu == 0:
        for matcher in (_match_a, _match_b, _match_c):
            cls = matcher(lf, order, ev)
            if cls is not None and cls.label == "dulac-C" and not cls.evidence.get("shape_exact"):
                # only the leading coefficients were matched; let the normal form decide
                red = monomial_reduction(form)
                if red is not None:
                    return _from_reduction(red, order, ev)
                return cls
            if cls is not None and cls.label != "simple-A":
                return cls
            if cls is not None:
                if cls.evidence.get("resonant") and not cls.evidence.get("exact_model"):
                    red = monomial_reduction(form)
                    if red is not None:
                        return _from_reduction(red, order, ev)
                return cls
    red = monomial_reduction(form)
    if red is not None:
        return _from_reduction(red, order, ev)
    raise NotPreSimple(f"germ is not pre-simple or not in a recognised shape (adapted order {nu}); "
                       "continue the reduction with further blow-ups")


def _from_reduction(red: MonomialReduction, order: int, ev: dict) -> SingularityClass:
    inner = classify_planar(red.eta, order)
    evidence = dict(ev, reduction=red.to_json(), planar=inner.evidence)
    return SingularityClass(inner.label, inner.parameters, evidence, order, dict(inner.data, reduction=red))


def _match_a(lf: LogForm, order, ev):
    if lf.poles != lf.vars:
        return None
    res = [lf.coeffs[v].constant_term() for v in lf.vars]
    if any(_zero(r) for r in res):
        return None
    exact_model = all(len(lf.coeffs[v].terms) == 1 for v in lf.vars)
    resonant = _resonant_residues(res, min(order, 12))
    return SingularityClass("simple-A", {"lambda": tuple(res)},
                            dict(ev, exact_model=exact_model, resonant=resonant), order)


def _match_b(lf: LogForm, order, ev):
    if lf.poles != lf.vars:
        return None
    vars = lf.vars
    res = {v: lf.coeffs[v].constant_term() for v in vars}
    K = [v for v in vars if not _zero(res[v])]
    Z = [v for v in vars if _zero(res[v])]
    if not K or not Z:
        return None
    p = _scale_rational([res[v] for v in K])
    if p is None:
        return None
    if p[0] < 0:
        p = tuple(-x for x in p)
    if any(x <= 0 for x in p):
        return None
    scale = _div(res[K[0]], QQi(p[0]))
    a = {v: lf.coeffs[v].scale(_div(QQi(1), scale)) - (QQi(p[K.index(v)]) if v in K else 0) for v in vars}
    P = tuple(p[K.index(v)] if v in K else 0 for v in vars)
    lead = a[Z[0]]
    if lead.is_zero():
        return None
    e0 = min(lead.terms, key=lambda e: (sum(e), e))
    m = next((e0[i] // P[i] for i in range(len(vars)) if P[i]), 0)
    if m < 1 or tuple(m * x for x in P) != e0:
        return None
    mono = e0
    alpha = {v: a[v].coeff(mono) for v in vars}
    psi = a[Z[0]].scale(_div(QQi(1), alpha[Z[0]]))
    tol = 0.0 if isinstance(alpha[Z[0]], QQi) else 1e-10
    if not all(a[v].equals(psi.scale(alpha[v]), tol=tol) for v in vars):
        return None
    k = len(K)
    params = {"p": tuple(p), "alpha": tuple(alpha[v] for v in vars), "k": k, "psi_monomial": list(mono)}
    evid = dict(ev, psi=str(psi))
    if k == 2:
        return SingularityClass("saddle-node", params, dict(evid, model="B", reason="k = 2"), order)
    if len(Z) == 2:
        a2, a3 = alpha[Z[0]], alpha[Z[1]]
        q = None if _zero(a3) else as_rational(_div(a2, a3))
        params["residual_resonant"] = q is not None and q < 0
    return SingularityClass("simple-B-resonant", params, dict(evid, model="B"), order)


def _match_c(lf: LogForm, order, ev):
    vars = lf.vars
    free = [v for v in vars if v not in lf.poles and not _zero(lf.coeffs[v].constant_term())]
    if len(free) != 1 or len(lf.poles) != len(vars) - 1:
        return None
    x1 = free[0]
    i1 = vars.index(x1)
    unit = lf.coeffs[x1].constant_term()
    a = {v: lf.coeffs[v].scale(_div(QQi(1), unit)) for v in vars}
    lin = tuple(int(k == i1) for k in range(len(vars)))
    p = {}
    for v in lf.poles:
        c = a[v].coeff(lin)
        q = as_rational(-c) if not _zero(c) else Fraction(0)
        if q is None or q.denominator != 1 or q < 0:
            return None
        p[v] = int(q)
    if not any(p.values()):
        return None
    P = tuple(p.get(v, 0) for v in vars)
    alpha = {v: a[v].coeff(P) for v in vars}
    alpha[x1] = QQi(0)
    model = {v: (TruncSeries.monomial(lin, -p[v], vars, None) + TruncSeries.monomial(P, alpha[v], vars, None))
             for v in lf.poles}
    model[x1] = TruncSeries.const(1, vars, None)
    shape_exact = all(a[v].equals(model[v], order=order) for v in vars)
    params = {"x1": x1, "p": tuple(p.get(v, 0) for v in vars if v != x1),
              "alpha": tuple(alpha[v] for v in vars if v != x1)}
    return SingularityClass("dulac-C", params, dict(ev, model="C", shape_exact=shape_exact), order)


# -- first-integral verdicts ---------------------------------------------------

def first_integral_local_verdict(cls: SingularityClass) -> Verdict:
    """Local meromorphic first-integral verdict for a classified point."""
    crit = "local-first-integral"
    lab, par = cls.label, cls.parameters
    if lab == "regular":
        return Verdict(HOLDS, crit, "regular point: a coordinate is a first integral", order=cls.order)
    if lab == "simple-A":
        lam = par.get("lambda") or par.get("eigenvalues")
        ints = _scale_rational(lam)
        if ints is None:
            return Verdict(FAILS, crit, "case A with an irrational eigenvalue ratio: holonomy not periodic",
                           {"lambda": lam}, cls.order)
        return Verdict(HOLDS, crit, "case A with rational eigenvalue ratios",
                       {"lambda": lam, "monomial_exponents": ints}, cls.order)
    if lab == "saddle-node":
        return Verdict(FAILS, crit, "saddle-node", {"parameters": par}, cls.order)
    if lab == "simple-B-resonant":
        if par.get("residual_resonant"):
            return Verdict(FAILS, crit, "case B with resonant residual spectrum", {"parameters": par}, cls.order)
        return Verdict(INCONCLUSIVE, crit, "resonant singularity: first integral iff linearizable (not decided)",
                       {"parameters": par}, cls.order)
    if lab == "dulac-C":
        alpha = par.get("alpha")
        if alpha is not None and all(_zero(a) for a in alpha):
            p = par.get("p")
            return Verdict(HOLDS, crit, "case C with vanishing alpha is linear",
                           {"p": p}, cls.order)
        return Verdict(FAILS, crit, "Dulac type: holonomy not periodic", {"parameters": par}, cls.order)
    if lab == "resonant-linearizable-candidate":
        ratio = as_rational(par["ratio"])
        ev = {"ratio": ratio, "monomial_exponents": (ratio.numerator, -ratio.denominator)}
        if cls.evidence.get("decision_complete"):
            return Verdict(HOLDS, crit, "linearizable node with rational ratio", ev, cls.order)
        return Verdict(INCONCLUSIVE, crit, f"no obstruction up to order {cls.evidence.get('normal_form_order')}",
                       ev, cls.order)
    if lab == "dicritical-radial":
        return Verdict(HOLDS, crit, "radial point: ratio of coordinates", {"monomial_exponents": (1, -1)},
                       cls.order)
    return Verdict(INCONCLUSIVE, crit, "unclassified point", {"evidence": cls.evidence}, cls.order)
