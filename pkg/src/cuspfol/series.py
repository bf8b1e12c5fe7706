"""Sparse multivariate power series truncated at a total degree.

A ``TruncSeries`` is a dictionary ``exponent tuple -> coefficient`` over an
ordered tuple of variable names, together with the total degree ``order``
up to which the stored terms are known to be correct.  ``order=None`` marks
an exact polynomial: nothing was ever cut off, so operations that would
otherwise lose precision (translation, evaluation at nonzero points) are
allowed.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .scalar import QQi, format_scalar, is_exact, scalar

DEFAULT_ORDER = 12


class TruncationError(ValueError):
    """Raised when an operation would leave no valid terms."""


def _min_order(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _deg(e):
    return sum(e)


def _coerce_coeff(c):
    return scalar(c)


def _is_zero_coeff(c) -> bool:
    if isinstance(c, QQi):
        return c.re == 0 and c.im == 0
    return c == 0


class TruncSeries:
    """Truncated multivariate power series with exact or float coefficients."""

    __slots__ = ("vars", "terms", "order")

    def __init__(self, vars: Sequence[str], terms: Mapping | None = None,
                 order: int | None = DEFAULT_ORDER):
        self.vars = tuple(vars)
        if order is not None and order < 0:
            raise TruncationError("truncation underflow: no valid terms remain")
        self.order = order
        clean = {}
        n = len(self.vars)
        for e, c in (terms or {}).items():
            e = tuple(int(k) for k in e)
            if len(e) != n:
                raise ValueError(f"exponent {e} does not match variables {self.vars}")
            if any(k < 0 for k in e):
                raise ValueError(f"negative exponent {e}")
            if order is not None and _deg(e) > order:
                continue
            c = _coerce_coeff(c)
            if _is_zero_coeff(c):
                continue
            clean[e] = c
        self.terms = clean

    # -- constructors ------------------------------------------------------------
    @classmethod
    def _raw(cls, vars, terms, order):
        obj = cls.__new__(cls)
        obj.vars = vars
        obj.terms = terms
        obj.order = order
        return obj

    @classmethod
    def zero(cls, vars, order=DEFAULT_ORDER):
        return cls(vars, {}, order)

    @classmethod
    def const(cls, c, vars, order=DEFAULT_ORDER):
        return cls(vars, {(0,) * len(vars): c}, order)

    @classmethod
    def var(cls, name, vars, order=DEFAULT_ORDER):
        vars = tuple(vars)
        e = tuple(1 if v == name else 0 for v in vars)
        if name not in vars:
            raise ValueError(f"unknown variable {name!r}")
        return cls(vars, {e: QQi(1)}, order)

    @classmethod
    def monomial(cls, exps, coeff=1, vars=(), order=DEFAULT_ORDER):
        return cls(vars, {tuple(exps): coeff}, order)

    @classmethod
    def from_univariate(cls, coeffs: Sequence, var: str, order=DEFAULT_ORDER):
        """Series in one variable from a list of coefficients ``c_0, c_1, ...``."""
        return cls((var,), {(k,): c for k, c in enumerate(coeffs)}, order)

    # -- basic queries -------------------------------------------------------------
    @property
    def nvars(self) -> int:
        return len(self.vars)

    def is_exact(self) -> bool:
        """True when every coefficient is an exact scalar."""
        return all(isinstance(c, QQi) for c in self.terms.values())

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def coeff(self, exps) -> object:
        return self.terms.get(tuple(exps), QQi(0))

    def constant_term(self):
        return self.coeff((0,) * self.nvars)

    def valuation(self) -> int | None:
        """Lowest total degree present, ``None`` for the zero series."""
        if not self.terms:
            return None
        return min(_deg(e) for e in self.terms)

    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(_deg(e) for e in self.terms)

    def degree_in(self, name: str) -> int:
        i = self.vars.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def sorted_terms(self):
        """Terms in descending lexicographic exponent order (printing order)."""
        return sorted(self.terms.items(), key=lambda kv: kv[0], reverse=True)

    def homogeneous_part(self, d: int) -> "TruncSeries":
        return TruncSeries._raw(self.vars, {e: c for e, c in self.terms.items() if _deg(e) == d},
                                None if self.order is None else self.order)

    # -- variable management -------------------------------------------------------
    def with_vars(self, vars: Sequence[str]) -> "TruncSeries":
        """Re-express over another variable tuple (inserting or reordering)."""
        vars = tuple(vars)
        if vars == self.vars:
            return self
        idx = []
        for v in vars:
            idx.append(self.vars.index(v) if v in self.vars else None)
        for j, v in enumerate(self.vars):
            if v not in vars and any(e[j] for e in self.terms):
                raise ValueError(f"variable {v!r} is used and cannot be dropped")
        terms = {}
        for e, c in self.terms.items():
            terms[tuple(e[i] if i is not None else 0 for i in idx)] = c
        return TruncSeries._raw(vars, terms, self.order)

    def rename(self, mapping: Mapping[str, str]) -> "TruncSeries":
        return TruncSeries._raw(tuple(mapping.get(v, v) for v in self.vars), dict(self.terms), self.order)

    def _align(self, other):
        if isinstance(other, TruncSeries):
            if other.vars != self.vars:
                if set(other.vars) <= set(self.vars):
                    other = other.with_vars(self.vars)
                else:
                    raise ValueError(f"variable sets differ: {self.vars} vs {other.vars}")
            return other
        return TruncSeries._raw(self.vars, {(0,) * self.nvars: _coerce_coeff(other)}
                                if not _is_zero_coeff(_coerce_coeff(other)) else {}, None)

    def truncate(self, order: int | None) -> "TruncSeries":
        order = _min_order(self.order, order)
        return TruncSeries(self.vars, self.terms, order)

    # -- arithmetic ---------------------------------------------------------------
    def __add__(self, other):
        try:
            other = self._align(other)
        except TypeError:
            return NotImplemented
        order = _min_order(self.order, other.order)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            if e in terms:
                s = terms[e] + c
                if _is_zero_coeff(s):
                    del terms[e]
                else:
                    terms[e] = s
            else:
                terms[e] = c
        if order is not None:
            terms = {e: c for e, c in terms.items() if _deg(e) <= order}
        return TruncSeries._raw(self.vars, terms, order)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return TruncSeries._raw(self.vars, {e: -c for e, c in self.terms.items()}, self.order)

    def __sub__(self, other):
        try:
            other = self._align(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            try:
                c = _coerce_coeff(other)
            except TypeError:
                return NotImplemented
            return self.scale(c)
        other = self._align(other)
        order = _min_order(self.order, other.order)
        terms: dict = {}
        for e1, c1 in self.terms.items():
            d1 = _deg(e1)
            for e2, c2 in other.terms.items():
                if order is not None and d1 + _deg(e2) > order:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                p = c1 * c2
                if e in terms:
                    terms[e] = terms[e] + p
                else:
                    terms[e] = p
        terms = {e: c for e, c in terms.items() if not _is_zero_coeff(c)}
        return TruncSeries._raw(self.vars, terms, order)

    def __rmul__(self, other):
        return self.__mul__(other)

    def scale(self, c) -> "TruncSeries":
        c = _coerce_coeff(c)
        if _is_zero_coeff(c):
            return TruncSeries._raw(self.vars, {}, self.order)
        return TruncSeries._raw(self.vars, {e: v * c for e, v in self.terms.items()
                                            if not _is_zero_coeff(v * c)}, self.order)

    def __truediv__(self, other):
        if isinstance(other, TruncSeries):
            return self * other.inverse()
        c = _coerce_coeff(other)
        if _is_zero_coeff(c):
            raise ZeroDivisionError("division by zero scalar")
        return self.scale(1 / c if not isinstance(c, QQi) else c.inverse())

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("series powers must be integers; use unit_power for fractional exponents")
        if k < 0:
            return self.inverse() ** (-k)
        result = TruncSeries.const(1, self.vars, None)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, TruncSeries):
            try:
                other = self._align(other)
            except ValueError:
                return False
            return self.terms == other.terms and self.order == other.order
        try:
            return self == self._align(other).truncate(self.order)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items()), self.order))

    def equals(self, other, order: int | None = None, tol: float = 0.0) -> bool:
        """Coefficient equality up to total degree ``order`` (and ``tol`` for floats)."""
        other = self._align(other)
        diff = self - other
        for e, c in diff.terms.items():
            if order is not None and _deg(e) > order:
                continue
            if tol and not isinstance(c, QQi):
                if abs(c) > tol:
                    return False
            elif tol and isinstance(c, QQi):
                if abs(complex(c)) > tol:
                    return False
            else:
                return False
        return True

    # -- calculus -----------------------------------------------------------------
    def diff(self, name: str) -> "TruncSeries":
        i = self.vars.index(name)
        terms = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                terms[ne] = c * k
        order = None if self.order is None else self.order - 1
        if order is not None and order < 0:
            raise TruncationError("truncation underflow: derivative of an order-0 series")
        return TruncSeries._raw(self.vars, terms, order)

    def integrate(self, name: str) -> "TruncSeries":
        """Antiderivative with zero constant along ``name``."""
        i = self.vars.index(name)
        terms = {}
        for e, c in self.terms.items():
            k = e[i] + 1
            ne = e[:i] + (k,) + e[i + 1:]
            terms[ne] = c / k if isinstance(c, complex) else c * Fraction(1, k)
        order = None if self.order is None else self.order + 1
        return TruncSeries._raw(self.vars, terms, order)

    # -- substitution -------------------------------------------------------------
    def subs(self, images: Mapping[str, "TruncSeries"], new_vars: Sequence[str] | None = None,
             order: int | None = None) -> "TruncSeries":
        """Compose: replace each variable by a series in ``new_vars``.

        Variables absent from ``images`` are kept (they must then belong to
        ``new_vars``).  The result order is the largest degree up to which
        the composite is certainly correct, capped by ``order``.
        """
        if new_vars is None:
            sample = next(iter(images.values()), None)
            new_vars = sample.vars if sample is not None else self.vars
        new_vars = tuple(new_vars)
        imgs = []
        for v in self.vars:
            if v in images:
                g = images[v]
                if not isinstance(g, TruncSeries):
                    g = TruncSeries.const(g, new_vars, None)
                imgs.append(g.with_vars(new_vars))
            else:
                if v not in new_vars:
                    raise ValueError(f"no image for variable {v!r}")
                imgs.append(TruncSeries.var(v, new_vars, None))
        used = [i for i in range(self.nvars) if any(e[i] for e in self.terms)]
        res_order = order
        vmin = None
        for i in used:
            g = imgs[i]
            vg = g.valuation()
            vg = 10 ** 9 if vg is None else vg
            vmin = vg if vmin is None else min(vmin, vg)
            if g.order is not None:
                # errors in g appear from degree g.order+1 times other factors
                res_order = _min_order(res_order, g.order)
        if self.order is not None:
            if vmin is None:
                # constant series: nothing is composed, the bound carries over
                res_order = _min_order(res_order, self.order)
            elif vmin == 0:
                raise TruncationError("truncation underflow: truncated series composed "
                                      "with an image that has a constant term")
            else:
                res_order = _min_order(res_order, (self.order + 1) * vmin - 1)
        if res_order is not None and res_order < 0:
            raise TruncationError("truncation underflow")
        powers: dict = {}

        def power(i, k):
            key = (i, k)
            if key not in powers:
                if k == 0:
                    powers[key] = TruncSeries.const(1, new_vars, None)
                elif k == 1:
                    powers[key] = imgs[i].truncate(res_order)
                else:
                    powers[key] = (power(i, k - 1) * imgs[i]).truncate(res_order)
            return powers[key]

        acc = TruncSeries.zero(new_vars, res_order)
        for e, c in self.terms.items():
            term = TruncSeries.const(c, new_vars, res_order)
            for i, k in enumerate(e):
                if k:
                    term = (term * power(i, k)).truncate(res_order)
            acc = acc + term
        return TruncSeries._raw(new_vars, acc.terms, res_order)

    def compose(self, images, new_vars=None, order=None):
        return self.subs(images, new_vars, order)

    def restrict(self, name: str, value=0) -> "TruncSeries":
        """Set one variable to a constant (the variable stays in ``vars``)."""
        i = self.vars.index(name)
        value = _coerce_coeff(value)
        if _is_zero_coeff(value):
            terms = {e: c for e, c in self.terms.items() if e[i] == 0}
            return TruncSeries._raw(self.vars, terms, self.order)
        if self.order is not None:
            raise TruncationError("cannot evaluate a truncated series at a nonzero value")
        terms: dict = {}
        for e, c in self.terms.items():
            ne = e[:i] + (0,) + e[i + 1:]
            v = c * value ** e[i]
            terms[ne] = terms.get(ne, QQi(0)) + v
        return TruncSeries(self.vars, terms, None)

    def drop_var(self, name: str) -> "TruncSeries":
        """Remove a variable that does not occur."""
        return self.with_vars(tuple(v for v in self.vars if v != name))

    def translate(self, name: str, shift) -> "TruncSeries":
        """Substitute ``name -> name + shift`` (exact polynomials only)."""
        shift = _coerce_coeff(shift)
        if _is_zero_coeff(shift):
            return self
        if self.order is not None:
            raise TruncationError("translation of a truncated series loses all precision")
        img = TruncSeries.var(name, self.vars, None) + shift
        return self.subs({name: img}, self.vars)

    def evaluate(self, point: Mapping[str, complex] | Sequence) -> complex:
        """Numeric value of the stored terms at a point (float)."""
        if not isinstance(point, Mapping):
            point = dict(zip(self.vars, point))
        vals = [complex(point.get(v, 0)) for v in self.vars]
        total = 0j
        for e, c in self.terms.items():
            m = complex(c)
            for x, k in zip(vals, e):
                if k:
                    m *= x ** k
            total += m
        return total

    def evaluate_exact(self, point: Mapping) -> QQi:
        vals = [scalar(point.get(v, 0)) for v in self.vars]
        total = QQi(0)
        for e, c in self.terms.items():
            m = c
            for x, k in zip(vals, e):
                if k:
                    m = m * x ** k
            total = total + m
        return total

    # -- units ---------------------------------------------------------------------
    def inverse(self, order: int | None = None) -> "TruncSeries":
        """Multiplicative inverse of a unit (nonzero constant term)."""
        c0 = self.constant_term()
        if _is_zero_coeff(c0):
            raise ZeroDivisionError("series is not a unit (zero constant term)")
        order = _min_order(self.order, order)
        if order is None:
            if len(self.terms) == 1:
                return TruncSeries.const(1 / c0 if not isinstance(c0, QQi) else c0.inverse(), self.vars, None)
            raise TruncationError("inverse of a non-constant polynomial needs a truncation order")
        inv0 = c0.inverse() if isinstance(c0, QQi) else 1 / c0
        w = (self.scale(inv0) - 1).truncate(order)
        # 1/(1+w) = sum (-w)^k, w has positive valuation
        result = TruncSeries.const(1, self.vars, order)
        term = TruncSeries.const(1, self.vars, order)
        for _ in range(order):
            term = (term * (-w)).truncate(order)
            if term.is_zero():
                break
            result = result + term
        return result.scale(inv0)

    def unit_power(self, exponent, order: int | None = None, root=None) -> "TruncSeries":
        """``self ** exponent`` for a unit via the binomial series.

        ``root`` is the chosen value of ``c0 ** exponent`` for the constant
        term; it defaults to 1 when ``c0 == 1`` and otherwise to an exact
        root if one exists, else the principal float power.
        """
        exponent = Fraction(exponent)
        if exponent.denominator == 1 and exponent >= 0 and order is None:
            return self ** int(exponent)
        c0 = self.constant_term()
        if _is_zero_coeff(c0):
            raise ZeroDivisionError("fractional power of a non-unit")
        order = _min_order(self.order, order)
        if order is None:
            raise TruncationError("fractional power of a polynomial needs a truncation order")
        if root is None:
            root = _scalar_power(c0, exponent)
        inv0 = c0.inverse() if isinstance(c0, QQi) else 1 / c0
        w = (self.scale(inv0) - 1).truncate(order)
        result = TruncSeries.const(1, self.vars, order)
        term = TruncSeries.const(1, self.vars, order)
        binom = Fraction(1)
        for k in range(1, order + 1):
            binom = binom * (exponent - (k - 1)) / k
            term = (term * w).truncate(order)
            if term.is_zero() or binom == 0:
                break
            result = result + term.scale(binom)
        return result.scale(root)

    # -- monomial factors -------------------------------------------------------
    def monomial_content(self) -> tuple:
        """Exponent-wise minimum over all terms (the monomial gcd)."""
        if not self.terms:
            return (0,) * self.nvars
        es = list(self.terms)
        return tuple(min(e[i] for e in es) for i in range(self.nvars))

    def divide_monomial(self, exps) -> "TruncSeries":
        exps = tuple(exps)
        terms = {}
        for e, c in self.terms.items():
            ne = tuple(a - b for a, b in zip(e, exps))
            if any(k < 0 for k in ne):
                raise ValueError(f"monomial {exps} does not divide the series")
            terms[ne] = c
        order = None if self.order is None else self.order - sum(exps)
        if order is not None and order < 0:
            raise TruncationError("truncation underflow after monomial division")
        return TruncSeries._raw(self.vars, terms, order)

    def multiply_monomial(self, exps) -> "TruncSeries":
        exps = tuple(exps)
        terms = {tuple(a + b for a, b in zip(e, exps)): c for e, c in self.terms.items()}
        order = None if self.order is None else self.order + sum(exps)
        return TruncSeries._raw(self.vars, terms, order)

    # -- numeric helpers ----------------------------------------------------------
    def to_float(self) -> "TruncSeries":
        return TruncSeries._raw(self.vars, {e: complex(c) for e, c in self.terms.items()}, self.order)

    def chop(self, tol: float = 1e-12) -> "TruncSeries":
        terms = {}
        for e, c in self.terms.items():
            if isinstance(c, QQi):
                terms[e] = c
                continue
            re = c.real if abs(c.real) > tol else 0.0
            im = c.imag if abs(c.imag) > tol else 0.0
            if re or im:
                terms[e] = complex(re, im)
        return TruncSeries._raw(self.vars, terms, self.order)

    def max_abs(self) -> float:
        return max((abs(complex(c)) for c in self.terms.values()), default=0.0)

    def univariate_coeffs(self, name: str | None = None) -> list:
        """Coefficient list ``[c_0, c_1, ...]`` of a series in one used variable."""
        if name is None:
            used = [v for j, v in enumerate(self.vars) if any(e[j] for e in self.terms)]
            if len(used) > 1:
                raise ValueError("series depends on more than one variable")
            name = used[0] if used else self.vars[0]
        i = self.vars.index(name)
        out: list = []
        for e, c in self.terms.items():
            if any(k for j, k in enumerate(e) if j != i):
                raise ValueError(f"series depends on variables other than {name!r}")
            while len(out) <= e[i]:
                out.append(QQi(0))
            out[e[i]] = c
        return out

    # -- printing -----------------------------------------------------------------
    def __str__(self):
        return format_series(self)

    def __repr__(self):
        return f"TruncSeries({self.vars}, {format_series(self)!r}, order={self.order})"


def _scalar_power(c, exponent: Fraction):
    if exponent.denominator == 1:
        return c ** int(exponent)
    if isinstance(c, QQi) and c == 1:
        return QQi(1)
    if isinstance(c, QQi) and exponent.denominator == 2:
        from .scalar import exact_sqrt
        r = exact_sqrt(c)
        if r is not None:
            return r ** exponent.numerator
    return complex(c) ** float(exponent)


def _monomial_str(vars, e) -> str:
    parts = []
    for v, k in zip(vars, e):
        if k == 1:
            parts.append(v)
        elif k > 1:
            parts.append(f"{v}^{k}")
    return "*".join(parts)


def format_term(coeff, mono: str) -> tuple[str, str]:
    """Return (sign, body) for a coefficient times a monomial string."""
    if isinstance(coeff, QQi) and coeff.im == 0:
        sign = "-" if coeff.re < 0 else "+"
        mag = format_scalar(abs(coeff.re))
        if not mono:
            return sign, mag
        if mag == "1":
            return sign, mono
        return sign, f"{mag}*{mono}"
    if isinstance(coeff, complex) and coeff.imag == 0:
        sign = "-" if coeff.real < 0 else "+"
        mag = repr(abs(coeff.real))
        return sign, (f"{mag}*{mono}" if mono else mag)
    body = format_scalar(coeff)
    if isinstance(coeff, QQi) and coeff.re == 0:
        sign = "-" if coeff.im < 0 else "+"
        body = format_scalar(QQi(0, abs(coeff.im)))
    elif isinstance(coeff, complex) and coeff.real == 0:
        sign = "-" if coeff.imag < 0 else "+"
        body = format_scalar(complex(0, abs(coeff.imag)))
    else:
        sign = "+"
    return sign, (f"{body}*{mono}" if mono else body)


def format_series(s: TruncSeries) -> str:
    if not s.terms:
        return "0"
    out = []
    for e, c in s.sorted_terms():
        sign, body = format_term(c, _monomial_str(s.vars, e))
        if not out:
            out.append(("-" if sign == "-" else "") + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


def series_vars(*series: TruncSeries) -> tuple:
    """Union of variable tuples in first-seen order."""
    seen: list = []
    for s in series:
        for v in s.vars:
            if v not in seen:
                seen.append(v)
    return tuple(seen)


def monomial_gcd(series: Iterable[TruncSeries]) -> tuple:
    series = [s for s in series if not s.is_zero()]
    if not series:
        raise ValueError("monomial gcd of zero series")
    contents = [s.monomial_content() for s in series]
    return tuple(min(c[i] for c in contents) for i in range(len(contents[0])))


def all_exact(*series: TruncSeries) -> bool:
    return all(s.is_exact() for s in series)


def poly_gcd_univariate(a: list, b: list) -> list:
    """Monic gcd of two univariate coefficient lists (exact or float)."""
    def trim(p):
        p = list(p)
        while p and (_is_zero_coeff(p[-1]) or (not is_exact(p[-1]) and abs(p[-1]) < 1e-12)):
            p.pop()
        return p

    a, b = trim(a), trim(b)
    while b:
        # remainder of a by b
        a = list(a)
        lead = b[-1]
        inv = lead.inverse() if isinstance(lead, QQi) else 1 / lead
        while len(a) >= len(b):
            f = a[-1] * inv
            shift = len(a) - len(b)
            for j, c in enumerate(b):
                a[shift + j] = a[shift + j] - f * c
            a.pop()
            a = trim(a)
            if not a:
                break
        a, b = b, trim(a)
    if not a:
        return []
    lead = a[-1]
    inv = lead.inverse() if isinstance(lead, QQi) else 1 / lead
    return [c * inv for c in a]


def poly_divide_univariate(a: list, b: list) -> tuple[list, list]:
    """Quotient and remainder of univariate coefficient lists."""
    a = list(a)
    q = [QQi(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    inv = lead.inverse() if isinstance(lead, QQi) else 1 / lead
    while len(a) >= len(b) and a:
        f = a[-1] * inv
        shift = len(a) - len(b)
        q[shift] = f
        for j, c in enumerate(b):
            a[shift + j] = a[shift + j] - f * c
        a.pop()
        while a and _is_zero_coeff(a[-1]):
            a.pop()
    return q, a
