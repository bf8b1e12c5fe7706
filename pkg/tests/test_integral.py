"""First integrals, separatrix families, rectification and dicriticalness sections."""
from __future__ import annotations

from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from conftest import to_sympy
from cuspfol.criteria import FamilyParams
from cuspfol.integral import (FSpec, IntegralError, MeroFunction, NotDicritical, dicriticalness_section,
                              leaf_expansion, monomial_fiber_map, pullback_integral, rectify, rectify_check,
                              separatrix_family, verify_first_integral, verify_separatrix)
from cuspfol.parser import parse_one_form, parse_series
from cuspfol.scalar import QQi
from cuspfol.series import TruncSeries
from cuspfol.verdict import FAILS, HOLDS, INCONCLUSIVE

TZ = ("t", "z")
ALPHA5 = FamilyParams(1, 1, 2, 1, 25, (1,), 5)
F5 = "(t+2*z)^4/(2*t+z)"


def test_first_integral_alpha5_sympy_oracle():
    t, z = sp.symbols("t z")
    F = (t + 2 * z) ** 4 / (2 * t + z)
    P, Q = 2 * t, 5 * t + 2 * z
    assert sp.simplify(sp.diff(F, t) * Q - sp.diff(F, z) * P) == 0
    assert verify_first_integral(MeroFunction.parse(F5, TZ), ALPHA5.form_2d()).status == HOLDS


def test_first_integral_failures_and_order():
    om = ALPHA5.form_2d()
    v = verify_first_integral(MeroFunction.parse("(t+2*z)^3/(2*t+z)", TZ), om)
    assert v.status == FAILS
    low = verify_first_integral(MeroFunction.parse(F5, TZ), om, order=3)
    assert low.status == INCONCLUSIVE and low.evidence["required_order"] == 6
    with pytest.raises(IntegralError, match="constant"):
        verify_first_integral(MeroFunction.parse("(t+z)/(t+z)", TZ), om)


def test_mero_function_removes_common_monomial():
    F = MeroFunction.parse("t^2*z/(t*z^2)", TZ)
    assert F.num == TruncSeries.var("t", TZ, None)
    assert F.den == TruncSeries.var("z", TZ, None)
    with pytest.raises(IntegralError):
        MeroFunction(TruncSeries.var("t", TZ, None), TruncSeries.zero(TZ, None))


@pytest.mark.parametrize("exps", [(1, 1), (2, 1), (1, 3)])
def test_pulled_back_integral_of_3d_family(exps):
    p = FamilyParams(exps[0], exps[1], 2, 1, 25, (1,), 5)
    G = pullback_integral(MeroFunction.parse(F5, TZ), monomial_fiber_map(exps))
    assert verify_first_integral(G, p.form_3d()).status == HOLDS


def test_separatrix_eigen_line():
    c = separatrix_family(ALPHA5, 0)
    assert str(c.images["z"]) == "-2*s"
    assert verify_separatrix(c, ALPHA5.form_2d()).status == HOLDS
    c3 = separatrix_family(ALPHA5, 0, dim=3)
    assert str(c3.images["z"]) == "-2*x*y"
    assert verify_separatrix(c3, ALPHA5.form_3d()).status == HOLDS


def test_separatrix_level_mode_matches_sympy():
    F = MeroFunction.parse(F5, TZ)
    c = separatrix_family(ALPHA5, 1, first_integral=F)
    zs = c.images["z"].univariate_coeffs("s")
    assert zs[:8] == [0, -2, 0, 0, 81, 0, 0, -17496]
    s = sp.symbols("s")
    z = sum(sp.Rational(str(v)) * s ** i for i, v in enumerate(zs[:8]))
    level = sp.series((s + 2 * z) ** 4 / (2 * s + z), s, 0, 4).removeO()
    assert sp.expand(level) == 1
    # the leaf equation 2t + (5t + 2z) z' = 0 holds through degree 7
    resid = sp.expand(2 * s + (5 * s + 2 * z) * sp.diff(z, s))
    assert all(resid.coeff(s, d) == 0 for d in range(8))
    assert verify_separatrix(c, ALPHA5.form_2d()).status == HOLDS
    assert separatrix_family(ALPHA5, 81, first_integral=F).provenance["free_coefficient"] == QQi(1)


def test_separatrix_wrong_curve_fails():
    c = separatrix_family(ALPHA5, 0)
    assert verify_separatrix(c, parse_one_form("2*t*dt + (4*t + 2*z)*dz", TZ)).status == FAILS


def test_leaf_expansion_stops_at_free_index():
    lx = leaf_expansion(ALPHA5, 8)
    assert (lx.alpha1, lx.s1, lx.s2) == (QQi(-2), 3, 1)
    assert lx.coeffs == [QQi(-2), QQi(0), QQi(0), None]
    with pytest.raises(IntegralError):
        lx.series()


def test_rectify_examples():
    t, z = (TruncSeries.var(v, TZ, None) for v in TZ)
    zz = sp.symbols("z")
    S1 = rectify(t, 8)
    assert sp.expand(to_sympy(S1) - sp.series(sp.exp(-zz), zz, 0, 8).removeO()) == 0
    S1 = rectify(t * z, 8)
    assert sp.expand(to_sympy(S1) - sp.series(sp.exp(-zz ** 2 / 2), zz, 0, 7).removeO()) == 0
    with pytest.raises(IntegralError, match="axis not invariant"):
        rectify(z + t, 6)


@given(st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_rectify_solves_leaf_equation(cs):
    t, z = (TruncSeries.var(v, TZ, None) for v in TZ)
    B = t.scale(cs[0]) + (t * z).scale(cs[1]) + (t * t).scale(cs[2]) + (t * z * z).scale(cs[3])
    S1 = rectify(B, 7)
    assert rectify_check(B, S1, 7)


def test_section_alpha5_frozen():
    sec = dicriticalness_section(ALPHA5, (1, 1))
    assert {k: str(v) for k, v in sec.components.items()} == {
        "x": "8/3*t^3*z^3 + t", "y": "z", "z": "-13/3*t^3*z^4 - 2*t*z"}
    cert = sec.certificate
    assert cert["tangent_to_dt"] and cert["nonzero"]
    assert (cert["order"], cert["lowest_degree"]) == (9, 8)


def test_section_other_monomials():
    cert = dicriticalness_section(ALPHA5, (2, 3)).certificate
    assert cert["tangent_to_dt"] and cert["nonzero"] and cert["lowest_degree"] == 22
    V = parse_series("1 + x", ("x", "y"))
    assert dicriticalness_section(ALPHA5, FSpec(1, 1, V)).certificate["nonzero"]
    sec = dicriticalness_section(FamilyParams(1, 1, 2, 1, 25, (1, 0, 1), 5), (1, 1))
    assert sec.certificate["tangent_to_dt"]


def test_section_errors():
    with pytest.raises(NotDicritical, match="Dulac type at P1"):
        dicriticalness_section(FamilyParams(1, 1, 2, 1, 25, (1, 1), 5))
    with pytest.raises(NotDicritical):
        dicriticalness_section(FamilyParams(1, 1, 2, 1, 17))
    with pytest.raises(IntegralError, match="V\\(0, 0\\) = 0"):
        dicriticalness_section(ALPHA5, FSpec(1, 1, parse_series("x", ("x", "y"))))
