"""Path lifting, holonomy generators, Dulac maps and invariance tests."""
from __future__ import annotations

import cmath
import math

import pytest
from hypothesis import given, settings, strategies as st

from cuspfol.criteria import FamilyParams, corollary4_probe
from cuspfol.holonomy import (HolonomyError, HolonomyMap, LinearMap, LoopSpec, Rational1D, adjoin,
                              check_loop_clearance, commutator_displacement, dulac_map, holonomy_generators,
                              invariant_rational_test, lift_loop, probe_group, special_component)
from cuspfol.parser import parse_one_form
from cuspfol.verdict import FAILS, HOLDS

XZ = ("x", "z")
CORNER = parse_one_form("z*dx + 2*x*dz", XZ)


def power_form(num: int, den: int):
    # leaves z = c x^(num/den): holonomy around x = 0 is multiplication by exp(2 pi i num/den)
    return parse_one_form(f"({num}/{den})*z*dx - x*dz", XZ)


def test_corner_lift_is_minus_identity():
    h = HolonomyMap(CORNER, LoopSpec("z", 0j, 0.5, 1 + 0j))
    assert abs(h(0.05) + 0.05) < 1e-10
    assert abs(h.multiplier() + 1) < 1e-9
    assert h.period()[0] == 2
    assert abs(lift_loop(CORNER, LoopSpec("z", 0j, 0.5, 1 + 0j), 0.05) + 0.05) < 1e-10


@pytest.mark.parametrize("radius,basepoint", [(0.2, 0.5 + 0.5j), (0.8, 1j), (0.1, -2 + 0j)])
def test_homotopy_invariance(radius, basepoint):
    h = HolonomyMap(CORNER, LoopSpec("z", 0j, radius, basepoint))
    assert abs(h(0.05) + 0.05) < 1e-9


@pytest.mark.parametrize("num,den", [(1, 3), (2, 5), (-1, 4)])
def test_monomial_multiplier(num, den):
    h = HolonomyMap(power_form(num, den), LoopSpec("z", 0j, 0.4, 1 + 0j))
    assert abs(h.multiplier() - cmath.exp(2j * math.pi * num / den)) < 1e-8
    assert h.period()[0] == den


def test_orientation_reversal_is_inverse():
    h = HolonomyMap(power_form(1, 3), LoopSpec("z", 0j, 0.4, 1 + 0j))
    t = 0.03 + 0.01j
    assert abs(h.inverse()(h(t)) - t) < 1e-10
    assert abs(h.then(h.inverse())(t) - t) < 1e-10


def test_composition_order():
    g = HolonomyMap(power_form(1, 3), LoopSpec("z", 0j, 0.4, 1 + 0j))
    h = LinearMap(0.0, 2.0)
    t = 0.02
    assert abs(g.then(h)(t) - h(g(t))) < 1e-14
    assert abs(g.then(h)(t) - 2 * g(t)) < 1e-14


@given(st.floats(-7, 7), st.floats(-7, 7), st.floats(0.5, 2.0))
def test_linear_maps_form_a_group(a, b, m):
    g, h = LinearMap(a, m), LinearMap(b)
    t = 0.3 - 0.1j
    assert abs(g.then(h)(t) - cmath.exp(1j * (a + b)) * m * t) < 1e-12
    assert abs(g.inverse()(g(t)) - t) < 1e-12
    assert commutator_displacement(g, h, 0.1) < 1e-12
    assert abs(g.power(3)(t) - g(g(g(t)))) < 1e-12


def test_loop_clearance():
    with pytest.raises(HolonomyError, match="radius too large"):
        check_loop_clearance(LoopSpec("z", 0j, 0.6, 2 + 0j), [0j, 1 + 0j])
    with pytest.raises(HolonomyError):
        LoopSpec("z", 1 + 0j, 0.5, 1 + 0j).segments()


def test_dicritical_component_has_no_holonomy():
    with pytest.raises(HolonomyError):
        holonomy_generators(CORNER, "z", [0j], 1 + 0j, invariant=False)
    with pytest.raises(HolonomyError, match="dicritical"):
        special_component(parse_one_form("t*dz - z*dt", ("t", "z")), 2)


def test_alpha5_special_component_multipliers():
    sc = special_component(FamilyParams(1, 1, 2, 1, 25, (1,), 5).form_2d(), 2)
    assert sc.marked == [-2 + 0j, -0.5 + 0j]
    mults = sorted((g.multiplier() for g in sc.generators()), key=lambda z: z.imag)
    w = cmath.exp(2j * math.pi / 3)
    assert abs(mults[0] - w.conjugate()) < 1e-8 and abs(mults[1] - w) < 1e-8
    probe = probe_group(sc.generators())
    assert probe.orders == [3, 3]
    assert probe.max_commutator < 1e-8


def test_moussu_group_is_not_abelian():
    probe, sc = corollary4_probe(3, 2, 2)
    assert sorted(probe.orders) == [2, 3]
    assert probe.max_commutator > 1e-3


@given(st.complex_numbers(min_magnitude=0.01, max_magnitude=2.0), st.integers(1, 5), st.integers(1, 5))
def test_dulac_map_lands_on_leaf(t, p, q):
    d = dulac_map(p, q, t)
    assert d.leaf_residual < 1e-9 * max(1.0, abs(t) ** p)
    assert abs(abs(d.value) - abs(t) ** (p / q)) < 1e-12


def test_dulac_map_tracks_argument():
    t = cmath.exp(0.9j * math.pi)
    principal = dulac_map(1, 2, t)
    tracked = dulac_map(1, 2, t, base_arg=-1.2 * math.pi)
    assert abs(tracked.value + principal.value) < 1e-12
    with pytest.raises(ValueError):
        dulac_map(1, 2, 0)


@pytest.mark.parametrize("p,q", [(1, 2), (2, 3), (3, 1)])
def test_adjoin_conventions(p, q):
    theta = 2 * math.pi / 5
    h = LinearMap(theta)
    geo = adjoin(p, q, h)
    lit = adjoin(p, q, h, "literal")
    s = 0.04 + 0.01j
    assert abs(geo(s) / s - cmath.exp(1j * theta * q / p)) < 1e-10
    assert abs(lit(s) / s - cmath.exp(1j * theta * p / q)) < 1e-10
    assert abs(geo.inverse()(geo(s)) - s) < 1e-12
    with pytest.raises(ValueError):
        adjoin(0, q, h)


def test_invariant_rational_test():
    g = LinearMap(2 * math.pi / 3)
    samples = [0.1, 0.05j, 0.02 + 0.03j]
    assert invariant_rational_test([g], Rational1D([0, 0, 0, 1]), samples).status == HOLDS
    assert invariant_rational_test([g], Rational1D([0, 0, 1]), samples).status == FAILS
    with pytest.raises(ValueError, match="pole"):
        invariant_rational_test([g], Rational1D([1], [0, 1]), [0.0])


def test_multipliers_agree_with_eigenvalues():
    # divisor holonomy at a linearizable point: exp(2 pi i lambda_transverse / lambda_along)
    from cuspfol.criteria import planar_points
    sc = special_component(FamilyParams(1, 1, 2, 1, 25, (1,), 5).form_2d(), 2)
    gens = {complex(g.loop.center): g for g in sc.generators()}
    for pt in planar_points(2, 1, 5):
        l_t, l_s = (complex(v) for v in pt["class"].parameters["eigenvalues"])
        g = gens[complex(pt["w"])]
        assert abs(g.multiplier() - cmath.exp(2j * math.pi * l_t / l_s)) < 1e-5
