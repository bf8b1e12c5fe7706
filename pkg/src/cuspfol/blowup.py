"""Monomial blow-up charts, strict transforms and singular points on the divisor."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .forms import Form, SubstitutionMap
from .germ import DivisorComponent, FoliationGerm
from .scalar import QQi, is_exact, quadratic_roots
from .series import TruncSeries, poly_gcd_univariate


class BlowupError(ValueError):
    pass


ROOT_TOL = 1e-10
DEDUP_TOL = 1e-8


@dataclass
class ChartMap:
    """Substitution ``old coordinates = images(new coordinates)`` with divisor bookkeeping.

    ``matrix[i][j]`` is the exponent of new variable ``j`` in old variable
    ``i`` when the chart is monomial, else ``None``.
    """

    substitution: SubstitutionMap
    matrix: list | None = None
    divisor: list = field(default_factory=list)
    label: str = ""

    @classmethod
    def identity(cls, vars) -> "ChartMap":
        n = len(vars)
        return cls(SubstitutionMap.identity(vars), [[int(i == j) for j in range(n)] for i in range(n)], [], "id")

    @classmethod
    def monomial(cls, old_vars, new_vars, matrix, label="", divisor=None) -> "ChartMap":
        old_vars, new_vars = tuple(old_vars), tuple(new_vars)
        imgs = {}
        for i, v in enumerate(old_vars):
            imgs[v] = TruncSeries.monomial(tuple(matrix[i]), 1, new_vars, None)
        return cls(SubstitutionMap(new_vars, old_vars, imgs), [list(r) for r in matrix], list(divisor or []), label)

    @classmethod
    def translation(cls, vars, var, shift, label="") -> "ChartMap":
        vars = tuple(vars)
        img = TruncSeries.var(var, vars, None) + shift
        return cls(SubstitutionMap(vars, vars, {var: img}), None, [], label or f"{var} -> {var} + {shift}")

    @property
    def old_vars(self):
        return self.substitution.target

    @property
    def new_vars(self):
        return self.substitution.source

    def then(self, nxt: "ChartMap") -> "ChartMap":
        """Composite chart: first this chart, then ``nxt`` on its new coordinates."""
        sub = self.substitution.compose(nxt.substitution)
        mat = None
        if self.matrix is not None and nxt.matrix is not None:
            a, b = self.matrix, nxt.matrix
            mat = [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]
        label = " ; ".join(x for x in (self.label, nxt.label) if x)
        return ChartMap(sub, mat, list(self.divisor) + list(nxt.divisor), label)

    def determinant(self):
        if self.matrix is None:
            return None
        return round(float(np.linalg.det(np.array(self.matrix, dtype=float))))

    def to_json(self):
        return {
            "label": self.label,
            "old_vars": list(self.old_vars),
            "new_vars": list(self.new_vars),
            "matrix": self.matrix,
            "substitution": {v: str(self.substitution.images[v]) for v in self.old_vars},
            "divisor": [list(d) for d in self.divisor],
        }


@dataclass
class TransformResult:
    chart: ChartMap
    form: Form
    cofactor: TruncSeries
    divisor: list
    original: Form | None = None

    @property
    def germ(self) -> FoliationGerm:
        return FoliationGerm(self.form, tuple(self.divisor))

    def check_pullback_identity(self) -> bool:
        """``chart^* original == cofactor * form`` exactly."""
        if self.original is None:
            return True
        lhs = self.chart.substitution.pullback(self.original)
        rhs = self.form.scale(self.cofactor)
        return lhs.equals(rhs, order=min(x for x in (lhs.order, rhs.order, 10 ** 9) if x is not None))

    def to_json(self):
        return {
            "chart": self.chart.to_json(),
            "form": str(self.form),
            "cofactor": str(self.cofactor),
            "order": self.form.order,
            "divisor": [c.to_json() for c in self.divisor],
        }


def _fresh(base: str, taken) -> str:
    if base not in taken:
        return base
    k = 1
    while f"{base}{k}" in taken:
        k += 1
    return f"{base}{k}"


def strict_transform(form: Form, chart: ChartMap) -> tuple[Form, TruncSeries]:
    pulled = chart.substitution.pullback(form)
    if pulled.is_zero():
        raise BlowupError("pullback vanishes identically (chart inside a leaf)")
    return pulled.saturate()


def divisor_invariant(form: Form, component: str) -> bool:
    """Whether ``component = 0`` is invariant: the other coefficients vanish on it."""
    if component not in form.vars:
        raise BlowupError(f"variable {component!r} not in form variables {form.vars}")
    k = form.vars.index(component)
    for key, c in form.coeffs.items():
        if key == (k,):
            continue
        if not c.restrict(component, 0).is_zero():
            return False
    return True


def _carry_divisor(germ: FoliationGerm, chart_vars_kept) -> list:
    return [c for c in germ.divisor if c.var in chart_vars_kept]


def blowup_point_2d(germ: FoliationGerm | Form, chart: str = "main", new_var: str | None = None) -> TransformResult:
    """Point blow-up of a planar germ.

    Over coordinates ``(a, b)`` the ``main`` chart is ``b = a*w`` (new
    coordinates ``(a, w)``, divisor ``a = 0``); the ``other`` chart is
    ``a = b*w`` (new coordinates ``(w, b)``, divisor ``b = 0``).
    """
    if isinstance(germ, Form):
        germ = FoliationGerm(germ)
    form = germ.form
    if len(form.vars) != 2:
        raise BlowupError("planar blow-up needs exactly two variables")
    if not germ.is_singular():
        raise BlowupError("nothing to blow up: the point is regular")
    a, b = form.vars
    w = new_var or _fresh("w", form.vars)
    if chart == "main":
        new_vars = (a, w)
        mat = [[1, 0], [1, 1]]
        div = a
    elif chart == "other":
        new_vars = (w, b)
        mat = [[1, 1], [0, 1]]
        div = b
    else:
        raise BlowupError(f"unknown chart {chart!r}")
    cm = ChartMap.monomial((a, b), new_vars, mat, f"point blow-up ({chart})")
    sat, cof = strict_transform(form, cm)
    mult = cof.monomial_content()[new_vars.index(div)] if not cof.is_zero() else 0
    comp = DivisorComponent(div, divisor_invariant(sat, div), mult)
    cm.divisor = [(div, mult)]
    # the old component through the chart's centre survives as its strict transform
    carried = [c for c in germ.divisor if c.var in new_vars and c.var != div]
    return TransformResult(cm, sat, cof, carried + [comp], form)


def blowup_point(germ: FoliationGerm | Form, chart_var: str | None = None) -> TransformResult:
    """Point blow-up in any dimension, chart ``x_i = x_j * x_i'`` for ``i != j``."""
    if isinstance(germ, Form):
        germ = FoliationGerm(germ)
    form = germ.form
    if not germ.is_singular():
        raise BlowupError("nothing to blow up: the point is regular")
    vars = form.vars
    j = 0 if chart_var is None else vars.index(chart_var)
    n = len(vars)
    mat = [[1 if (r == c or c == j) else 0 for c in range(n)] for r in range(n)]
    cm = ChartMap.monomial(vars, vars, mat, f"point blow-up (chart {vars[j]})")
    sat, cof = strict_transform(form, cm)
    div = vars[j]
    mult = cof.monomial_content()[j]
    cm.divisor = [(div, mult)]
    comp = DivisorComponent(div, divisor_invariant(sat, div), mult)
    return TransformResult(cm, sat, cof, [comp], form)


def axis_in_singular_locus(form: Form, axis_var: str) -> bool:
    """Whether the coordinate axis of ``axis_var`` lies in the singular locus."""
    others = [v for v in form.vars if v != axis_var]
    for c in form.coeffs.values():
        r = c
        for v in others:
            r = r.restrict(v, 0)
        if not r.is_zero():
            return False
    return True


def blowup_axis_3d(germ: FoliationGerm | Form, axis: str, count: int = 1,
                   fiber: str | None = None) -> TransformResult:
    """Blow up a coordinate axis ``count`` times in the chart ``fiber = other * fiber'``.

    For coordinates ``(x, y, z)`` and ``fiber = z``: blowing up the x-axis
    uses ``z = y z'``, the y-axis uses ``z = x z'``.  The new fiber
    coordinate keeps the name of the old one.
    """
    if isinstance(germ, Form):
        germ = FoliationGerm(germ)
    form = germ.form
    vars = form.vars
    if len(vars) != 3:
        raise BlowupError("axis blow-up needs three variables")
    fiber = fiber or vars[-1]
    if axis in ("x-axis", "x"):
        axis_var = vars[0]
    elif axis in ("y-axis", "y"):
        axis_var = vars[1]
    else:
        axis_var = axis
    if axis_var == fiber or axis_var not in vars:
        raise BlowupError(f"cannot blow up the {axis_var}-axis with fiber {fiber}")
    other = [v for v in vars if v not in (axis_var, fiber)][0]
    chart = ChartMap.identity(vars)
    cur = form
    cof_total = TruncSeries.const(1, vars, None)
    for step in range(count):
        if not axis_in_singular_locus(cur, axis_var):
            raise BlowupError(f"the {axis_var}-axis is not in the singular locus (step {step + 1})")
        mat = [[1 if r == c else 0 for c in range(3)] for r in range(3)]
        fi, oi = vars.index(fiber), vars.index(other)
        mat[fi][oi] = 1
        cm = ChartMap.monomial(vars, vars, mat, f"{axis_var}-axis blow-up", [(other, 1)])
        cur, cof = strict_transform(cur, cm)
        # accumulated cofactor relative to the original form
        cof_total = cm.substitution.apply_series(cof_total) * cof
        chart = chart.then(cm)
    divisor = _axis_divisor(cur, germ, vars, fiber)
    return TransformResult(chart, cur, cof_total, divisor, form)


def _axis_divisor(form, germ, vars, fiber):
    out = []
    for v in vars:
        if v == fiber:
            continue
        out.append(DivisorComponent(v, divisor_invariant(form, v)))
    return out


def blowup_axes(germ: FoliationGerm | Form, x_times: int, y_times: int,
                fiber: str | None = None) -> tuple[TransformResult, list]:
    """Composite axis blow-ups giving ``fiber = x^y_times * y^x_times * fiber'``.

    The per-step order is not fixed in advance: at each step the x-axis is
    tried first, then the y-axis, among the axes still owed a blow-up and
    lying in the singular locus.  Returns the result and the step sequence.
    """
    if isinstance(germ, Form):
        germ = FoliationGerm(germ)
    form = germ.form
    vars = form.vars
    fiber = fiber or vars[-1]
    remaining = {vars[0]: x_times, vars[1]: y_times}
    chart = ChartMap.identity(vars)
    cur = form
    cof_total = TruncSeries.const(1, vars, None)
    steps = []
    while any(remaining.values()):
        for axis_var in (vars[0], vars[1]):
            if remaining[axis_var] and axis_in_singular_locus(cur, axis_var):
                break
        else:
            raise BlowupError("no owed axis lies in the singular locus; "
                              f"remaining blow-ups {remaining}")
        res = blowup_axis_3d(FoliationGerm(cur), axis_var, 1, fiber)
        cur = res.form
        cof_total = res.chart.substitution.apply_series(cof_total) * res.cofactor
        chart = chart.then(res.chart)
        remaining[axis_var] -= 1
        steps.append(axis_var)
    chart.label = f"{fiber} = {vars[0]}^{y_times}*{vars[1]}^{x_times}*{fiber}"
    result = TransformResult(chart, cur, cof_total, _axis_divisor(cur, germ, vars, fiber), form)
    return result, steps


# -- singular points ---------------------------------------------------------

@dataclass
class SingularPoint:
    """A singular point (or recognised curve) on a divisor component."""

    kind: str                      # "point" or "corner-curve"
    coords: dict
    germ: FoliationGerm | None = None
    multiplicity: int = 1
    exact: bool = True

    def to_json(self):
        from .scalar import scalar_to_json
        return {"kind": self.kind, "coords": {k: scalar_to_json(v) for k, v in self.coords.items()},
                "multiplicity": self.multiplicity, "exact": self.exact,
                "form": str(self.germ.form) if self.germ else None}


def univariate_roots(coeffs: list, exact_ok: bool = True) -> list[tuple]:
    """Distinct roots with multiplicity of ``sum c_k y^k``.

    Exact roots for exact input of degree <= 2 (when the discriminant is a
    square in Q(i)); companion-matrix roots otherwise.
    """
    while coeffs and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    deg = len(coeffs) - 1
    if deg <= 0:
        return []
    exact = exact_ok and all(isinstance(c, QQi) for c in coeffs)
    if exact:
        if deg == 1:
            return [(-coeffs[0] / coeffs[1], 1)]
        if deg == 2:
            r1, r2 = quadratic_roots(coeffs[2], coeffs[1], coeffs[0])
            if isinstance(r1, QQi):
                if r1 == r2:
                    return [(r1, 2)]
                return sorted([(r1, 1), (r2, 1)], key=lambda r: (float(r[0].re), float(r[0].im)))
        # try rational roots of a higher-degree exact polynomial via gcd with derivative
    vals = np.roots([complex(c) for c in reversed(coeffs)])
    out: list = []
    for r in vals:
        for i, (q, m) in enumerate(out):
            if abs(q - r) < max(DEDUP_TOL, 1e-5 if deg > 2 else DEDUP_TOL):
                out[i] = ((q * m + r) / (m + 1), m + 1)
                break
        else:
            out.append((complex(r), 1))
    out = [(complex(round(q.real, 14), round(q.imag, 14)), m) for q, m in out]
    return sorted(out, key=lambda r: (r[0].real, r[0].imag))


def singular_points_on_divisor(result: TransformResult | FoliationGerm, divisor_var: str,
                               fiber_var: str | None = None) -> list[SingularPoint]:
    """Singular points of a saturated transform on the component ``divisor_var = 0``.

    The restricted coefficients are split into a monomial factor in the
    non-fiber variables (recognised as corner curves) and polynomials in the
    fiber variable alone, whose common roots are the isolated points.
    """
    form = result.form if isinstance(result, (TransformResult, FoliationGerm)) else result
    divisor = list(result.divisor) if hasattr(result, "divisor") else []
    vars = form.vars
    if divisor_var not in vars:
        raise BlowupError(f"unknown divisor variable {divisor_var!r}")
    if fiber_var is None:
        fiber_var = vars[-1] if vars[-1] != divisor_var else vars[0]
    fi = vars.index(fiber_var)
    restricted = [c.restrict(divisor_var, 0) for c in form.coeffs.values()]
    restricted = [r for r in restricted if not r.is_zero()]
    if not restricted:
        raise BlowupError("family not in expected shape: form vanishes on the divisor")
    content = [min(e[i] for r in restricted for e in r.terms) for i in range(len(vars))]
    content[fi] = 0
    content[vars.index(divisor_var)] = 0
    points: list[SingularPoint] = []
    for i, k in enumerate(content):
        if k:
            points.append(SingularPoint("corner-curve", {divisor_var: QQi(0), vars[i]: QQi(0)}, None, k))
    polys = []
    for r in restricted:
        q = r.divide_monomial(content)
        for e in q.terms:
            if any(e[i] for i in range(len(vars)) if i != fi):
                raise BlowupError("family not in expected shape: restricted coefficients depend on "
                                  "more than the fiber variable")
        polys.append(q.univariate_coeffs(fiber_var) if q.terms else [QQi(0)])
    g = polys[0]
    for p in polys[1:]:
        g = poly_gcd_univariate(g, p)
    if len(g) <= 1:
        return points
    roots = univariate_roots(g)
    exact_all = all(isinstance(c, QQi) for c in g)
    for root, mult in roots:
        coords = {divisor_var: QQi(0), fiber_var: root}
        local = form.translate(fiber_var, root) if form.order is None else _translate_truncated(form, fiber_var, root)
        if not isinstance(root, QQi):
            # round-off from the float root would make the point look regular
            local = local.chop(1e-10)
        local_div = [DivisorComponent(c.var, c.invariant, c.multiplicity) for c in divisor
                     if c.var != fiber_var]
        if not any(c.var == divisor_var for c in local_div):
            local_div.append(DivisorComponent(divisor_var, divisor_invariant(form, divisor_var)))
        points.append(SingularPoint("point", coords, FoliationGerm(local, tuple(local_div)), mult,
                                    exact_all and isinstance(root, QQi)))
    return points


def _translate_truncated(form: Form, var: str, shift) -> Form:
    raise BlowupError("re-centering at a point of the divisor needs exact polynomial coefficients; "
                      "use a polynomial unit or rerun with order=None")
