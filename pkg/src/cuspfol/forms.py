"""Differential forms, vector fields and substitution maps over ``TruncSeries``.

Forms of degree 0..3 store one coefficient per increasing index tuple, so
``{(0, 2): c}`` over ``(x, y, z)`` is ``c dx^dz``.  Logarithmic 1-forms keep
their own presentation (``LogForm``) and convert to holomorphic ones by
clearing the pole divisor.
"""
from __future__ import annotations

from itertools import combinations
from typing import Mapping, Sequence

from .scalar import QQi, scalar
from .series import TruncSeries, TruncationError, _min_order, format_series


class FormError(ValueError):
    pass


def _sort_sign(idx: Sequence[int]) -> tuple[int, tuple]:
    """Sign of the permutation sorting ``idx`` and the sorted tuple (0 on repeats)."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    # bubble sort counts transpositions; tuples have length <= 3
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return sign, tuple(idx)


class Form:
    """Holomorphic differential form of a fixed degree."""

    __slots__ = ("vars", "degree", "coeffs", "bound")

    def __init__(self, vars: Sequence[str], degree: int, coeffs: Mapping | None = None,
                 order: int | None = None):
        self.vars = tuple(vars)
        if not 0 <= degree <= len(self.vars):
            raise FormError(f"degree {degree} impossible over {len(self.vars)} variables")
        self.degree = degree
        clean = {}
        bound = order
        for idx, c in (coeffs or {}).items():
            if isinstance(idx, str):
                idx = (idx,)
            idx = tuple(self.vars.index(i) if isinstance(i, str) else i for i in idx)
            if len(idx) != degree:
                raise FormError(f"basis element {idx} has wrong degree")
            sign, key = _sort_sign(idx)
            if not isinstance(c, TruncSeries):
                c = TruncSeries.const(c, self.vars, None)
            c = c.with_vars(self.vars)
            # zero coefficients still carry their truncation bound
            bound = _min_order(bound, c.order)
            if sign == 0:
                continue
            if sign < 0:
                c = -c
            if key in clean:
                c = clean[key] + c
            clean[key] = c
        self.coeffs = {k: v for k, v in clean.items() if not v.is_zero()}
        self.bound = bound

    # -- constructors ------------------------------------------------------------
    @classmethod
    def function(cls, f: TruncSeries) -> "Form":
        return cls(f.vars, 0, {(): f})

    @classmethod
    def differential(cls, name: str, vars: Sequence[str]) -> "Form":
        vars = tuple(vars)
        return cls(vars, 1, {(vars.index(name),): TruncSeries.const(1, vars, None)})

    @classmethod
    def zero(cls, vars, degree, order=None) -> "Form":
        return cls(vars, degree, {}, order)

    @classmethod
    def one_form(cls, vars: Sequence[str], comps: Sequence) -> "Form":
        vars = tuple(vars)
        return cls(vars, 1, {(i,): c for i, c in enumerate(comps)})

    # -- queries -------------------------------------------------------------------
    @property
    def order(self) -> int | None:
        return self.bound

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs.values())

    def is_exact(self) -> bool:
        return all(c.is_exact() for c in self.coeffs.values())

    def coeff(self, key) -> TruncSeries:
        """Coefficient of a basis element given as names or indices."""
        if isinstance(key, str):
            key = (key,)
        idx = tuple(self.vars.index(k) if isinstance(k, str) else k for k in key)
        sign, skey = _sort_sign(idx)
        c = self.coeffs.get(skey)
        if c is None:
            return TruncSeries.zero(self.vars, self.order)
        return c if sign > 0 else -c

    def components(self) -> list[TruncSeries]:
        """For 1-forms: coefficient list in variable order."""
        if self.degree != 1:
            raise FormError("components() is defined for 1-forms")
        return [self.coeff((i,)) for i in range(len(self.vars))]

    def function_value(self) -> TruncSeries:
        if self.degree != 0:
            raise FormError("not a function")
        return self.coeff(())

    def nonzero_items(self):
        return sorted(((k, c) for k, c in self.coeffs.items() if not c.is_zero()), key=lambda kv: kv[0])

    # -- variable handling ---------------------------------------------------------
    def with_vars(self, vars: Sequence[str]) -> "Form":
        vars = tuple(vars)
        if vars == self.vars:
            return self
        coeffs = {}
        for k, c in self.coeffs.items():
            names = tuple(self.vars[i] for i in k)
            if any(n not in vars for n in names):
                if c.is_zero():
                    continue
                raise FormError(f"form uses a differential outside {vars}")
            coeffs[names] = c.with_vars(vars)
        return Form(vars, self.degree, coeffs, self.order)

    def rename(self, mapping: Mapping[str, str]) -> "Form":
        nv = tuple(mapping.get(v, v) for v in self.vars)
        return Form(nv, self.degree, {k: c.rename(mapping) for k, c in self.coeffs.items()}, self.order)

    def _align(self, other: "Form") -> "Form":
        if other.vars != self.vars:
            return other.with_vars(self.vars)
        return other

    # -- linear structure -----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        other = self._align(other)
        if other.degree != self.degree:
            raise FormError("cannot add forms of different degree")
        coeffs = dict(self.coeffs)
        for k, c in other.coeffs.items():
            coeffs[k] = coeffs[k] + c if k in coeffs else c
        return Form(self.vars, self.degree, coeffs, _min_order(self.order, other.order))

    def __neg__(self):
        return Form(self.vars, self.degree, {k: -c for k, c in self.coeffs.items()}, self.order)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor) -> "Form":
        """Multiply every coefficient by a scalar or a series."""
        if isinstance(factor, TruncSeries):
            factor = factor.with_vars(self.vars)
        else:
            factor = TruncSeries.const(factor, self.vars, None)
        return Form(self.vars, self.degree, {k: c * factor for k, c in self.coeffs.items()},
                    _min_order(self.order, factor.order))

    def __mul__(self, other):
        if isinstance(other, Form):
            return self.wedge(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def truncate(self, order) -> "Form":
        return Form(self.vars, self.degree, {k: c.truncate(order) for k, c in self.coeffs.items()},
                    _min_order(self.order, order))

    def map_coeffs(self, fn) -> "Form":
        return Form(self.vars, self.degree, {k: fn(c) for k, c in self.coeffs.items()}, self.order)

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        try:
            other = self._align(other)
        except FormError:
            return False
        if other.degree != self.degree:
            return False
        keys = set(self.coeffs) | set(other.coeffs)
        return all(self.coeff(k).terms == other.coeff(k).terms for k in keys) and self.order == other.order

    def __hash__(self):
        return hash((self.vars, self.degree, tuple(sorted((k, hash(c)) for k, c in self.coeffs.items()))))

    def equals(self, other: "Form", order: int | None = None, tol: float = 0.0) -> bool:
        other = self._align(other)
        if other.degree != self.degree:
            return False
        keys = set(self.coeffs) | set(other.coeffs)
        return all(self.coeff(k).equals(other.coeff(k), order, tol) for k in keys)

    def is_proportional(self, other: "Form") -> bool:
        """Exact test that two 1-forms define the same distribution pointwise (w1 ^ w2 == 0)."""
        return self.wedge(self._align(other)).is_zero()

    # -- exterior calculus ---------------------------------------------------------
    def d(self) -> "Form":
        n = len(self.vars)
        if self.degree >= n:
            raise FormError("top degree: exterior derivative of a top-degree form")
        coeffs: dict = {}
        order = self.order
        for k, c in self.coeffs.items():
            for j in range(n):
                if j in k:
                    continue
                dc = c.diff(self.vars[j])
                sign, key = _sort_sign((j,) + k)
                term = dc if sign > 0 else -dc
                coeffs[key] = coeffs[key] + term if key in coeffs else term
        return Form(self.vars, self.degree + 1, coeffs,
                    None if order is None else order - 1)

    def wedge(self, other: "Form") -> "Form":
        other = self._align(other)
        deg = self.degree + other.degree
        if deg > len(self.vars):
            raise FormError("degree overflow in wedge product")
        coeffs: dict = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                sign, key = _sort_sign(k1 + k2)
                if sign == 0:
                    continue
                p = c1 * c2
                if sign < 0:
                    p = -p
                coeffs[key] = coeffs[key] + p if key in coeffs else p
        return Form(self.vars, deg, coeffs, _min_order(self.order, other.order))

    def interior(self, X: "VectorField") -> "Form":
        if X.vars != self.vars:
            if set(X.vars) == set(self.vars):
                X = X.with_vars(self.vars)
            else:
                raise FormError(f"variable mismatch: field over {X.vars}, form over {self.vars}")
        if self.degree == 0:
            raise FormError("interior product of a function")
        coeffs: dict = {}
        for k, c in self.coeffs.items():
            for pos, i in enumerate(k):
                rest = k[:pos] + k[pos + 1:]
                term = c * X.comps[i]
                if pos % 2:
                    term = -term
                coeffs[rest] = coeffs[rest] + term if rest in coeffs else term
        order = self.order
        for c in X.comps:
            order = _min_order(order, c.order)
        return Form(self.vars, self.degree - 1, coeffs, order)

    def apply(self, X: "VectorField") -> TruncSeries:
        """Evaluate a 1-form on a vector field."""
        if self.degree != 1:
            raise FormError("apply() needs a 1-form")
        return self.interior(X).function_value()

    def pullback(self, phi: "SubstitutionMap", order: int | None = None) -> "Form":
        return phi.pullback(self, order)

    def integrability(self) -> "Form":
        """``w ^ dw`` (zero for an integrable 1-form)."""
        return self.wedge(self.d())

    def restrict(self, name: str, value=0) -> "Form":
        return Form(self.vars, self.degree, {k: c.restrict(name, value) for k, c in self.coeffs.items()},
                    self.order)

    def translate(self, name: str, shift) -> "Form":
        return Form(self.vars, self.degree, {k: c.translate(name, shift) for k, c in self.coeffs.items()},
                    self.order)

    # -- saturation --------------------------------------------------------------
    def monomial_content(self) -> tuple:
        nz = [c for c in self.coeffs.values() if not c.is_zero()]
        if not nz:
            raise FormError("saturation of the zero form")
        contents = [c.monomial_content() for c in nz]
        return tuple(min(c[i] for c in contents) for i in range(len(self.vars)))

    def divide_monomial(self, exps) -> "Form":
        order = None if self.order is None else self.order - sum(exps)
        return Form(self.vars, self.degree, {k: c.divide_monomial(exps) for k, c in self.coeffs.items()
                                             if not c.is_zero()}, order)

    def saturate(self) -> tuple["Form", TruncSeries]:
        """Remove the largest common monomial factor; returns ``(form, cofactor)``."""
        m = self.monomial_content()
        cof = TruncSeries.monomial(m, 1, self.vars, None)
        if not any(m):
            return self, cof
        return self.divide_monomial(m), cof

    def to_float(self) -> "Form":
        return self.map_coeffs(lambda c: c.to_float())

    def chop(self, tol=1e-12) -> "Form":
        return self.map_coeffs(lambda c: c.chop(tol))

    def evaluate(self, point) -> dict:
        return {k: c.evaluate(point) for k, c in self.coeffs.items()}

    # -- printing -----------------------------------------------------------------
    def basis_name(self, key) -> str:
        return "*".join("d" + self.vars[i] for i in key)

    def __str__(self):
        return format_form(self)

    def __repr__(self):
        return f"Form({self.vars}, deg={self.degree}, {format_form(self)!r}, order={self.order})"


def format_form(w: Form) -> str:
    items = w.nonzero_items()
    if not items:
        return "0"
    parts = []
    for k, c in items:
        basis = w.basis_name(k)
        body = format_series(c)
        if w.degree == 0:
            parts.append(body)
            continue
        if len(c.terms) == 1:
            if body == "1":
                parts.append(basis)
            elif body == "-1":
                parts.append("-" + basis)
            else:
                parts.append(f"{body}*{basis}")
        else:
            parts.append(f"({body})*{basis}")
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


class VectorField:
    """Vector field ``sum comps[i] d/dvars[i]``."""

    __slots__ = ("vars", "comps")

    def __init__(self, vars: Sequence[str], comps: Sequence):
        self.vars = tuple(vars)
        if len(comps) != len(self.vars):
            raise FormError("component count must equal the number of variables")
        self.comps = tuple(c.with_vars(self.vars) if isinstance(c, TruncSeries)
                           else TruncSeries.const(c, self.vars, None) for c in comps)

    def with_vars(self, vars) -> "VectorField":
        vars = tuple(vars)
        m = dict(zip(self.vars, self.comps))
        return VectorField(vars, [m[v].with_vars(vars) if v in m else TruncSeries.zero(vars, None) for v in vars])

    def apply(self, f: TruncSeries) -> TruncSeries:
        f = f.with_vars(self.vars)
        acc = TruncSeries.zero(self.vars, None)
        for v, c in zip(self.vars, self.comps):
            acc = acc + c * f.diff(v)
        return acc

    def bracket(self, other: "VectorField") -> "VectorField":
        other = other.with_vars(self.vars)
        return VectorField(self.vars, [self.apply(b) - other.apply(a) for a, b in zip(self.comps, other.comps)])

    def __add__(self, other):
        other = other.with_vars(self.vars)
        return VectorField(self.vars, [a + b for a, b in zip(self.comps, other.comps)])

    def scale(self, c) -> "VectorField":
        return VectorField(self.vars, [a * c for a in self.comps])

    def linear_matrix(self) -> list[list]:
        """Jacobian at the origin: ``M[i][j] = d comps[i] / d vars[j] (0)``."""
        n = len(self.vars)
        out = []
        for c in self.comps:
            row = []
            for j in range(n):
                e = tuple(1 if k == j else 0 for k in range(n))
                row.append(c.coeff(e))
            out.append(row)
        return out

    def __str__(self):
        return " + ".join(f"({format_series(c)})*d/d{v}" for v, c in zip(self.vars, self.comps)
                          if not c.is_zero()) or "0"

    __repr__ = __str__


class SubstitutionMap:
    """Map from ``source`` coordinates to ``target`` coordinates.

    ``images[v]`` gives the target coordinate ``v`` as a series in the source
    variables.  Pulling back a form written in the target variables yields a
    form in the source variables.
    """

    __slots__ = ("source", "target", "images")

    def __init__(self, source: Sequence[str], target: Sequence[str], images: Mapping):
        self.source = tuple(source)
        self.target = tuple(target)
        imgs = {}
        for v in self.target:
            if v in images:
                g = images[v]
                if not isinstance(g, TruncSeries):
                    g = TruncSeries.const(g, self.source, None)
                imgs[v] = g.with_vars(self.source)
            elif v in self.source:
                imgs[v] = TruncSeries.var(v, self.source, None)
            else:
                raise FormError(f"no image given for target variable {v!r}")
        self.images = imgs

    @classmethod
    def identity(cls, vars) -> "SubstitutionMap":
        return cls(vars, vars, {})

    def compose(self, inner: "SubstitutionMap") -> "SubstitutionMap":
        """``self o inner``: first ``inner`` (whose target is our source), then ``self``."""
        if inner.target != self.source:
            if set(inner.target) != set(self.source):
                raise FormError("maps do not chain")
        imgs = {v: g.subs(inner.images, inner.source) for v, g in self.images.items()}
        return SubstitutionMap(inner.source, self.target, imgs)

    def apply_series(self, f: TruncSeries, order: int | None = None) -> TruncSeries:
        f = f.with_vars(self.target) if set(f.vars) <= set(self.target) else f
        return f.subs(self.images, self.source, order)

    def pullback(self, w: Form, order: int | None = None) -> Form:
        if set(w.vars) - set(self.target):
            raise FormError(f"form variables {w.vars} not in map target {self.target}")
        w = w.with_vars(self.target)
        jac = {v: [self.images[v].diff(s) if self.images[v].order is None or self.images[v].order > 0
                   else TruncSeries.zero(self.source, 0) for s in self.source] for v in self.target}
        out = Form.zero(self.source, w.degree)
        for k, c in w.coeffs.items():
            cc = c.subs(self.images, self.source, order)
            piece = Form.function(cc)
            for i in k:
                dphi = Form.one_form(self.source, jac[self.target[i]])
                piece = piece.wedge(dphi)
            out = out + piece
        return out

    def jacobian_matrix(self) -> list[list[TruncSeries]]:
        return [[self.images[v].diff(s) for s in self.source] for v in self.target]

    def __str__(self):
        return ", ".join(f"{v} = {format_series(self.images[v])}" for v in self.target)

    __repr__ = __str__


class LogForm:
    """Logarithmic 1-form ``sum_{i in poles} a_i dx_i/x_i + sum_{j not in poles} a_j dx_j``."""

    __slots__ = ("vars", "poles", "coeffs")

    def __init__(self, vars: Sequence[str], poles: Sequence[str], coeffs: Mapping):
        self.vars = tuple(vars)
        self.poles = tuple(v for v in self.vars if v in set(poles))
        if set(poles) - set(self.vars):
            raise FormError("pole variables must be coordinates")
        self.coeffs = {}
        for v in self.vars:
            c = coeffs.get(v, 0)
            if not isinstance(c, TruncSeries):
                c = TruncSeries.const(c, self.vars, None)
            self.coeffs[v] = c.with_vars(self.vars)

    def pole_monomial(self) -> TruncSeries:
        e = tuple(1 if v in self.poles else 0 for v in self.vars)
        return TruncSeries.monomial(e, 1, self.vars, None)

    def to_holomorphic(self) -> tuple[Form, TruncSeries]:
        """Return ``(M*w, M)`` where ``M`` is the product of the pole variables."""
        comps = []
        for i, v in enumerate(self.vars):
            a = self.coeffs[v]
            e = [1 if (u in self.poles and u != v) else 0 for u in self.vars]
            comps.append(a.multiply_monomial(e))
        return Form.one_form(self.vars, comps), self.pole_monomial()

    @classmethod
    def from_holomorphic(cls, w: Form, poles: Sequence[str], multiplier: TruncSeries | None = None) -> "LogForm":
        """Inverse of ``to_holomorphic``.

        With ``multiplier=None`` the form is read as ``w`` itself, written in
        logarithmic basis, and the common monomial factor of the resulting
        coefficients is removed.
        """
        if w.degree != 1:
            raise FormError("logarithmic presentation is for 1-forms")
        vars = w.vars
        poles = tuple(v for v in vars if v in set(poles))
        comps = w.components()
        a = {}
        for v, c in zip(vars, comps):
            a[v] = c.multiply_monomial([1 if u == v else 0 for u in vars]) if v in poles else c
        if multiplier is None:
            nz = [s for s in a.values() if not s.is_zero()]
            if nz:
                m = tuple(min(s.monomial_content()[i] for s in nz) for i in range(len(vars)))
                if any(m):
                    a = {v: s.divide_monomial(m) if not s.is_zero() else s for v, s in a.items()}
            return cls(vars, poles, a)
        m = multiplier.with_vars(vars)
        if len(m.terms) != 1:
            raise FormError("multiplier must be a monomial")
        (e, c), = m.terms.items()
        a = {v: s.divide_monomial(e).scale(c.inverse() if isinstance(c, QQi) else 1 / c) if not s.is_zero() else s
             for v, s in a.items()}
        return cls(vars, poles, a)

    def residues(self) -> dict:
        return {v: self.coeffs[v].constant_term() for v in self.poles}

    def equals(self, other: "LogForm", order=None, tol=0.0) -> bool:
        return (self.vars == other.vars and self.poles == other.poles
                and all(self.coeffs[v].equals(other.coeffs[v], order, tol) for v in self.vars))

    def __str__(self):
        parts = []
        for v in self.vars:
            c = self.coeffs[v]
            if c.is_zero():
                continue
            basis = f"d{v}/{v}" if v in self.poles else f"d{v}"
            parts.append(f"({format_series(c)})*{basis}")
        return " + ".join(parts) or "0"

    __repr__ = __str__


def exact_one_form(f: TruncSeries) -> Form:
    return Form.function(f).d()


def basis_keys(n: int, degree: int):
    return list(combinations(range(n), degree))


__all__ = ["Form", "VectorField", "SubstitutionMap", "LogForm", "FormError",
           "exact_one_form", "basis_keys", "TruncationError", "scalar"]
