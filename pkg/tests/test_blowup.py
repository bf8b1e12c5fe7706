"""Point and axis blow-ups, divisor invariance and singular points on the divisor."""
from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cuspfol.blowup import (BlowupError, ChartMap, blowup_axes, blowup_axis_3d, blowup_point_2d,
                            divisor_invariant, singular_points_on_divisor)
from cuspfol.classify import classify_simple_type, linear_part
from cuspfol.criteria import FamilyParams
from cuspfol.forms import Form
from cuspfol.germ import FoliationGerm
from cuspfol.parser import parse_one_form
from cuspfol.scalar import QQi
from cuspfol.series import TruncSeries

TZ = ("t", "z")
XYZ = ("x", "y", "z")


def family_transform_expected(p, q, n, alpha, U, k=None):
    """Saturated axis transform of the family written out by hand, in (x, y, z)."""
    k = 2 * n if k is None else k
    x, y, z = (TruncSeries.var(v, XYZ, None) for v in XYZ)
    f = TruncSeries.monomial((p, q, 0), 1, XYZ, None)
    u = TruncSeries.from_univariate(list(U), "t", None).subs({"t": f}, XYZ)
    a = QQi(alpha)
    if k == 2 * n:
        lead = z * z * 2 + (z * u).scale(a) + 2
        lead = lead.scale(n)
    else:
        lead = (z * z).scale(2 * n) + (f ** (k - 2 * n)).scale(k) + (z * u).scale(a * n)
    base = Form.one_form(XYZ, [y.scale(p), x.scale(q), 0])
    tail = Form.one_form(XYZ, [0, 0, x * y * (z.scale(2) + u.scale(a))])
    return base.scale(lead) + tail


def random_tuples(count, seed):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        p, q = rng.randint(1, 3), rng.randint(1, 3)
        if (p, q) != (1, 1) and __import__("math").gcd(p, q) != 1:
            continue
        n = rng.randint(1, 2)
        alpha = rng.choice((3, 5, 7))
        U = (1,) + tuple(Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(4))
        out.append((p, q, n, alpha, U))
    return out


@pytest.mark.parametrize("p,q,n,alpha,U", random_tuples(6, 11))
def test_axis_chain_reproduces_family_transform(p, q, n, alpha, U):
    params = FamilyParams(p, q, 2 * n, n, alpha * alpha, U, alpha)
    res, steps = blowup_axes(params.form_3d(), q * n, p * n)
    assert len(steps) == (p + q) * n
    assert res.form == family_transform_expected(p, q, n, alpha, U)
    assert res.check_pullback_identity()


def test_prop5_transform_shape():
    params = FamilyParams(1, 1, 4, 1, 25, (1,), 5)
    res, _ = blowup_axes(params.form_3d(), 1, 1)
    expected = parse_one_form("(2*z^2 + 4*(x*y)^2 + 5*z)*(y*dx + x*dy) + x*y*(2*z + 5)*dz", XYZ)
    assert res.form == expected


def test_point_blowup_examples():
    w = parse_one_form("2*t*dt + (5*t + 2*z)*dz", TZ)
    res = blowup_point_2d(w)
    assert res.form == parse_one_form("(2*w^2 + 5*w + 2)*dt + t*(2*w + 5)*dw", ("t", "w"))
    assert res.cofactor == TruncSeries.var("t", ("t", "w"), None)
    assert divisor_invariant(res.form, "t")
    assert res.check_pullback_identity()
    radial = blowup_point_2d(parse_one_form("t*dz - z*dt", TZ))
    assert radial.form == parse_one_form("dw", ("t", "w"))
    assert not radial.divisor[-1].invariant
    cusp = blowup_point_2d(parse_one_form("d(z^2 + t^3)", TZ))
    assert cusp.form == parse_one_form("(2*w^2 + 3*t)*dt + 2*t*w*dw", ("t", "w"))
    pts = [p for p in singular_points_on_divisor(cusp, "t", "w") if p.kind == "point"]
    assert [p.coords["w"] for p in pts] == [QQi(0)]


def test_regular_point_errors():
    with pytest.raises(BlowupError, match="nothing to blow up"):
        blowup_point_2d(parse_one_form("dt + z*dz", TZ))


def test_axis_blowup_examples():
    om = parse_one_form("d(z^2 + (x*y)^2) + 5*x*y*dz", XYZ)
    res, _ = blowup_axes(om, 1, 1)
    assert res.form == parse_one_form("(2*z^2+5*z+2)*(y*dx+x*dy) + x*y*(2*z+5)*dz", XYZ)
    ident = blowup_axis_3d(om, "x-axis", 0)
    assert ident.form == om
    with pytest.raises(BlowupError):
        blowup_axis_3d(parse_one_form("dz + x*dx", XYZ), "x-axis", 1)


def test_divisor_invariance_examples():
    assert divisor_invariant(parse_one_form("(2*w^2+5*w+2)*dt + t*(2*w+5)*dw", ("t", "w")), "t")
    assert not divisor_invariant(parse_one_form("dw", ("t", "w")), "t")
    assert divisor_invariant(parse_one_form("y*dx + x*dy", ("x", "y")), "x")
    with pytest.raises(Exception):
        divisor_invariant(parse_one_form("dx", ("x", "y")), "q")


def test_singular_points_alpha5():
    res, _ = blowup_axes(parse_one_form("d(z^2 + (x*y)^2) + 5*x*y*dz", XYZ), 1, 1)
    pts = singular_points_on_divisor(res, "x", "z")
    zs = sorted((p.coords["z"] for p in pts if p.kind == "point"), key=lambda v: float(v.re))
    assert zs == [QQi(-2), QQi(Fraction(-1, 2))]
    assert any(p.kind == "corner-curve" for p in pts)


def test_singular_points_alpha4_double_root():
    res, _ = blowup_axes(parse_one_form("d(z^2 + (x*y)^2) + 4*x*y*dz", XYZ), 1, 1)
    pts = [p for p in singular_points_on_divisor(res, "x", "z") if p.kind == "point"]
    assert [(p.coords["z"], p.multiplicity) for p in pts] == [(QQi(-1), 2)]


def test_singular_points_prop5():
    res, _ = blowup_axes(parse_one_form("d(z^2 + (x*y)^4) + 5*x*y*dz", XYZ), 1, 1)
    zs = sorted((p.coords["z"] for p in singular_points_on_divisor(res, "x", "z") if p.kind == "point"),
                key=lambda v: float(v.re))
    assert zs == [QQi(Fraction(-5, 2)), QQi(0)]


def test_chart_composition_multiplies_matrices():
    a = ChartMap.monomial(TZ, TZ, [[1, 0], [1, 1]])
    b = ChartMap.monomial(TZ, TZ, [[1, 0], [2, 1]])
    assert a.then(b).matrix == [[1, 0], [3, 1]]
    assert a.then(b).substitution.images["z"] == TruncSeries.monomial((3, 1), 1, TZ, None)


@given(st.fractions(min_value=-4, max_value=4, max_denominator=4).filter(lambda v: v != 0),
       st.fractions(min_value=-4, max_value=4, max_denominator=4).filter(lambda v: v != 0))
def test_chart_overlap_classification_agrees(l1, l2):
    # diagonal linear field X = l1 t dt' + ..., dual form; the point on the divisor visible
    # in both charts after w -> 1/w is (t, w) = (0, 1) for the form with eigen-directions off the axes
    if l1 == l2:
        return
    t, z = (TruncSeries.var(v, TZ, None) for v in TZ)
    # X = l1 (t) d_t + l2 (z) d_z written in the rotated coordinates a = t + z, b = t - z
    a = t + z
    b = t - z
    # dual form of X = l1 a d_a + l2 b d_b: omega = -l2 b da + l1 a db, in (t, z)
    om = Form.function(a).d().scale(b.scale(-l2)) + Form.function(b).d().scale(a.scale(l1))
    main = blowup_point_2d(om, "main")
    other = blowup_point_2d(om, "other")
    labels_main = {(p.coords["w"]): classify_simple_type(p.germ).label
                   for p in singular_points_on_divisor(main, "t", "w") if p.kind == "point"}
    labels_other = {(p.coords["w"]): classify_simple_type(p.germ).label
                    for p in singular_points_on_divisor(other, "z", "w") if p.kind == "point"}
    # the eigen-directions z = t and z = -t have w = 1 and w = -1 in both charts
    for w in (QQi(1), QQi(-1)):
        assert labels_main[w] == labels_other[1 / w]
        lm = linear_part(next(p.germ for p in singular_points_on_divisor(main, "t", "w")
                              if p.kind == "point" and p.coords["w"] == w))
        assert lm.eigenvalues is not None


def test_linear_node_integer_ratio_becomes_dicritical():
    # dual field t d_t + k z d_z; along the chain z = t w the ratio drops by one per blow-up
    for k in (1, 2, 3):
        om = parse_one_form(f"{k}*z*dt - t*dz", TZ)
        cur = om
        for step in range(1, k + 1):
            res = blowup_point_2d(cur)
            cur = res.form.rename({"w": "z"})
            if step < k:
                assert res.divisor[-1].invariant
        assert not res.divisor[-1].invariant
