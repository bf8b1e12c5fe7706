"""Coefficient arithmetic.

Two coefficient kinds coexist:

* ``QQi`` -- exact Gaussian rationals ``a + b*i`` with ``a, b`` in Q.
* Python ``complex`` -- double precision floats.

Mixing the two always yields ``complex``.  Everything that must be decided
exactly (discriminants, eigenvalue quotients, resonance tests) is done with
``QQi``.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction
from numbers import Rational
from typing import Union

Scalar = Union["QQi", complex]

FLOAT_ZERO_TOL = 1e-12


class QQi:
    """Exact complex rational ``re + im*i``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    # -- construction ----------------------------------------------------------
    @classmethod
    def coerce(cls, value) -> "QQi":
        if isinstance(value, QQi):
            return value
        if isinstance(value, (int, Fraction, Rational)):
            return cls(value)
        raise TypeError(f"cannot coerce {value!r} to an exact scalar")

    # -- predicates ------------------------------------------------------------
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- arithmetic ------------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, QQi):
            return QQi(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction)):
            return QQi(self.re + other, self.im)
        if isinstance(other, (float, complex)):
            return complex(self) + other
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, QQi):
            return QQi(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Fraction)):
            return QQi(self.re - other, self.im)
        if isinstance(other, (float, complex)):
            return complex(self) - other
        return NotImplemented

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, QQi):
            if self.im == 0 and other.im == 0:
                return QQi(self.re * other.re)
            return QQi(self.re * other.re - self.im * other.im,
                       self.re * other.im + self.im * other.re)
        if isinstance(other, (int, Fraction)):
            return QQi(self.re * other, self.im * other)
        if isinstance(other, (float, complex)):
            return complex(self) * other
        return NotImplemented

    __rmul__ = __mul__

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> "QQi":
        return QQi(self.re, -self.im)

    def inverse(self) -> "QQi":
        n = self.norm2()
        if n == 0:
            raise ZeroDivisionError("division by exact zero")
        return QQi(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if isinstance(other, QQi):
            return self * other.inverse()
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by exact zero")
            return QQi(self.re / other, self.im / other)
        if isinstance(other, (float, complex)):
            return complex(self) / other
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return QQi(other) / self
        if isinstance(other, (float, complex)):
            return other / complex(self)
        return NotImplemented

    def __pow__(self, k):
        if not isinstance(k, int):
            return complex(self) ** k
        if k < 0:
            return self.inverse() ** (-k)
        result, base = QQi(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- comparison / hashing --------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, QQi):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, (float, complex)):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"QQi({self.re}, {self.im})"

    def __str__(self):
        return format_scalar(self)


ZERO = QQi(0)
ONE = QQi(1)
I = QQi(0, 1)


def scalar(value) -> Scalar:
    """Normalise a Python number into one of the two coefficient kinds."""
    if isinstance(value, QQi):
        return value
    if isinstance(value, bool):
        return QQi(int(value))
    if isinstance(value, (int, Fraction)):
        return QQi(value)
    if isinstance(value, (float, complex)):
        return complex(value)
    if hasattr(value, "__complex__"):
        return complex(value)
    raise TypeError(f"not a scalar: {value!r}")


def is_exact(value) -> bool:
    return isinstance(value, (QQi, int, Fraction))


def is_zero(value, tol: float = 0.0) -> bool:
    if isinstance(value, QQi):
        return value.is_zero()
    if tol:
        return abs(value) <= tol
    return value == 0


def to_complex(value) -> complex:
    return complex(value)


def as_fraction(value) -> Fraction | None:
    """Return the rational value of a real exact scalar, else ``None``."""
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, QQi) and value.im == 0:
        return value.re
    return None


# -- exact roots --------------------------------------------------------------

def _isqrt_exact(n: int) -> int | None:
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def rational_sqrt(q: Fraction) -> Fraction | None:
    """Exact non-negative square root of a non-negative rational, if rational."""
    q = Fraction(q)
    if q < 0:
        return None
    a = _isqrt_exact(q.numerator)
    b = _isqrt_exact(q.denominator)
    if a is None or b is None:
        return None
    return Fraction(a, b)


def exact_sqrt(z: QQi) -> QQi | None:
    """A square root of ``z`` inside Q(i), or ``None`` when none exists.

    The returned root has non-negative real part (positive imaginary part
    when the real part vanishes), mirroring the principal branch.
    """
    z = QQi.coerce(z)
    if z.is_zero():
        return QQi(0)
    modulus = rational_sqrt(z.norm2())
    if modulus is None:
        return None
    x2 = (z.re + modulus) / 2
    y2 = (modulus - z.re) / 2
    x = rational_sqrt(x2)
    y = rational_sqrt(y2)
    if x is None or y is None:
        return None
    if z.im < 0:
        y = -y
    root = QQi(x, y)
    if root.re < 0 or (root.re == 0 and root.im < 0):
        root = -root
    return root


def sqrt(z: Scalar) -> Scalar:
    """Exact square root when it exists in Q(i), principal float root otherwise."""
    if isinstance(z, QQi):
        r = exact_sqrt(z)
        if r is not None:
            return r
    return cmath.sqrt(complex(z))


def quadratic_roots(a: Scalar, b: Scalar, c: Scalar) -> tuple[Scalar, Scalar]:
    """Roots of ``a y^2 + b y + c``; exact when the discriminant is a square."""
    disc = b * b - 4 * a * c
    if all(isinstance(v, QQi) for v in (a, b, c)):
        r = exact_sqrt(disc)
        if r is not None:
            two_a = 2 * a
            return ((-b - r) / two_a, (-b + r) / two_a)
    a, b, c = complex(a), complex(b), complex(c)
    r = cmath.sqrt(b * b - 4 * a * c)
    # stable pairing: compute the large-magnitude root first
    sgn = 1 if (b.conjugate() * r).real >= 0 else -1
    q = -(b + sgn * r) / 2
    if q == 0:
        return (0j, 0j)
    roots = sorted([q / a, c / q], key=lambda v: (round(v.real, 12), round(v.imag, 12)))
    return roots[0], roots[1]


def rational_approx(x: complex, max_den: int = 1000, tol: float = 1e-9) -> Fraction | None:
    """Best rational with denominator <= ``max_den`` matching a real float."""
    x = complex(x)
    if abs(x.imag) > tol * max(1.0, abs(x)):
        return None
    f = Fraction(x.real).limit_denominator(max_den)
    if abs(float(f) - x.real) <= tol * max(1.0, abs(x.real)):
        return f
    return None


# -- formatting ---------------------------------------------------------------

def _fmt_fraction(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def format_scalar(value) -> str:
    """Format a coefficient in the expression grammar."""
    if isinstance(value, (int, Fraction)):
        return _fmt_fraction(Fraction(value))
    if isinstance(value, QQi):
        if value.im == 0:
            return _fmt_fraction(value.re)
        if value.re == 0:
            if value.im == 1:
                return "i"
            if value.im == -1:
                return "-i"
            return f"{_fmt_fraction(value.im)}*i"
        im = value.im
        sign = "+" if im > 0 else "-"
        mag = _fmt_fraction(abs(im))
        tail = "i" if abs(im) == 1 else f"{mag}*i"
        return f"({_fmt_fraction(value.re)}{sign}{tail})"
    value = complex(value)
    if value.imag == 0:
        return repr(value.real)
    if value.real == 0:
        return f"{value.imag!r}*i"
    sign = "+" if value.imag >= 0 else "-"
    return f"({value.real!r}{sign}{abs(value.imag)!r}*i)"


def scalar_to_json(value):
    """JSON-friendly representation: exact values as grammar strings."""
    if isinstance(value, (QQi, int, Fraction)):
        return format_scalar(value)
    value = complex(value)
    return {"re": value.real, "im": value.imag}
