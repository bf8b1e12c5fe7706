from __future__ import annotations

from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import settings, strategies as st

from cuspfol.forms import Form
from cuspfol.scalar import QQi
from cuspfol.series import TruncSeries

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

SYMBOLS = {name: sp.Symbol(name) for name in ("t", "z", "x", "y", "w", "u", "v", "s")}


def to_sympy(s: TruncSeries):
    """Independent representation: a sympy polynomial expression."""
    out = 0
    for e, c in s.terms.items():
        coeff = sp.Rational(c.re.numerator, c.re.denominator) + sp.I * sp.Rational(c.im.numerator, c.im.denominator)
        mono = 1
        for v, k in zip(s.vars, e):
            mono *= SYMBOLS[v] ** k
        out += coeff * mono
    return sp.expand(out)


def from_sympy(expr, vars, order=None) -> TruncSeries:
    poly = sp.Poly(sp.expand(expr), *[SYMBOLS[v] for v in vars])
    terms = {}
    for mono, c in poly.terms():
        re, im = sp.re(c), sp.im(c)
        terms[mono] = QQi(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))
    return TruncSeries(vars, terms, order)


def sympy_truncate(expr, vars, order):
    poly = sp.Poly(sp.expand(expr), *[SYMBOLS[v] for v in vars])
    return sp.expand(sum(c * sp.prod([SYMBOLS[v] ** k for v, k in zip(vars, m)])
                         for m, c in poly.terms() if sum(m) <= order))


small_fraction = st.fractions(min_value=-5, max_value=5, max_denominator=6)
small_qqi = st.builds(QQi, small_fraction, small_fraction)


@st.composite
def polynomials(draw, vars=("t", "z"), max_deg=4, max_terms=5, exact_only=True):
    n = len(vars)
    k = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(k):
        e = tuple(draw(st.integers(0, max_deg)) for _ in range(n))
        terms[e] = draw(small_qqi)
    return TruncSeries(vars, terms, None)


@st.composite
def one_forms(draw, vars=("t", "z"), max_deg=3):
    return Form.one_form(vars, [draw(polynomials(vars, max_deg, 4)) for _ in vars])


@pytest.fixture
def alpha5_2d():
    from cuspfol.parser import parse_one_form
    return parse_one_form("d(z^2 + t^2) + 5*t*dz", ("t", "z"))


# -- acceptance summary -----------------------------------------------------------------

_ACCEPTANCE: dict = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _ACCEPTANCE[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        num = name.split("_")[2]
        terminalreporter.write_line(f"criterion {int(num):2d}: {_ACCEPTANCE[name]}  ({name})")
