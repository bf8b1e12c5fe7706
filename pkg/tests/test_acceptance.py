"""The ten acceptance criteria, each at its stated tolerance and time budget.

A one-line pass/fail summary per criterion is printed at the end of the run.
"""
from __future__ import annotations

import cmath
import math
import random
import time
from fractions import Fraction

import pytest

from cuspfol.blowup import blowup_axes
from cuspfol.config import load_config
from cuspfol.criteria import (FamilyParams, alpha_resonance_solve, corollary4_check, corollary4_probe,
                              eigen_quotients, prop5_check, theorem6_check, theorem7_check)
from cuspfol.holonomy import HolonomyMap, LoopSpec, lift_path, special_component
from cuspfol.integral import (MeroFunction, dicriticalness_section, monomial_fiber_map, pullback_integral,
                              separatrix_family, verify_first_integral, verify_separatrix)
from cuspfol.parser import parse_one_form
from cuspfol.scalar import QQi, quadratic_roots
from cuspfol.verdict import FAILS, HOLDS, INCONCLUSIVE

from test_blowup import family_transform_expected

ALPHA5 = FamilyParams(1, 1, 2, 1, 25, (1,), 5)
F5 = "(t+2*z)^4/(2*t+z)"


class Budget:
    def __init__(self, seconds):
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.seconds, f"took {self.elapsed:.2f} s, budget {self.seconds} s"


def _random_family_tuples(count, seed=7):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        p, q = rng.randint(1, 3), rng.randint(1, 3)
        if math.gcd(p, q) != 1:
            continue
        n = rng.randint(1, 2)
        alpha = rng.choice((3, 5, 7))
        U = (1,) + tuple(Fraction(rng.randint(-4, 4), rng.randint(1, 4)) for _ in range(4))
        out.append((p, q, n, alpha, U))
    return out


def test_criterion_01_transform_fidelity():
    with Budget(5):
        for p, q, n, alpha, U in _random_family_tuples(25):
            params = FamilyParams(p, q, 2 * n, n, alpha * alpha, U, alpha)
            res, _ = blowup_axes(params.form_3d(), q * n, p * n)
            assert res.form == family_transform_expected(p, q, n, alpha, U), (p, q, n, alpha, U)
        for p, q, n, k in [(1, 1, 1, 4), (1, 2, 1, 3), (2, 1, 1, 5), (3, 2, 2, 5)]:
            params = FamilyParams(p, q, k, n, 25, (1, Fraction(1, 2)), 5)
            res, _ = blowup_axes(params.form_3d(), q * n, p * n)
            assert res.form == family_transform_expected(p, q, n, 5, (1, Fraction(1, 2)), k), (p, q, n, k)


def test_criterion_02_singular_point_arithmetic():
    with Budget(1):
        roots = set(quadratic_roots(QQi(2), QQi(5), QQi(2)))
        assert roots == {QQi(-2), QQi(Fraction(-1, 2))}
        assert set(eigen_quotients(1, 5)) == {QQi(3), QQi(Fraction(-3, 4))}
        assert alpha_resonance_solve(25).r == 24
        assert alpha_resonance_solve(Fraction(64, 3)).r == 16
        assert alpha_resonance_solve(17).r is None
        assert alpha_resonance_solve(16).boundary


def test_criterion_03_resonance_round_trip():
    rng = random.Random(3)
    for _ in range(200):
        r = Fraction(rng.randint(0, 10 ** 4), rng.randint(1, 10 ** 3))
        A = Fraction((16 + r) ** 2) / (16 + 2 * r)
        assert alpha_resonance_solve(A).r == r


def test_criterion_04_prop5_fixture():
    cfg = load_config("prop5")
    assert (cfg.family.n, cfg.family.k) == (1, 4) and cfg.family.alpha_value() == QQi(5)
    v = prop5_check(cfg.family)
    assert v.status == FAILS
    assert v.evidence["point"]["z"] == QQi(Fraction(-5, 2))
    assert v.evidence["classification"]["label"] == "saddle-node"
    assert theorem6_check(cfg.family).status == FAILS


def test_criterion_05_first_integral_certificate():
    with Budget(2):
        F = MeroFunction.parse(F5, ("t", "z"))
        v = verify_first_integral(F, ALPHA5.form_2d())
        assert v.status == HOLDS and v.order is None
        for exps in [(1, 1), (2, 3)]:
            params = FamilyParams(exps[0], exps[1], 2, 1, 25, (1,), 5)
            G = pullback_integral(F, monomial_fiber_map(exps))
            vt = verify_first_integral(G, params.form_3d(), order=12)
            assert vt.status != FAILS
            assert verify_first_integral(G, params.form_3d()).status == HOLDS


def test_criterion_06_separatrix_family():
    F = MeroFunction.parse(F5, ("t", "z"))
    values = [0, 1, -1, 2, Fraction(1, 2), 81, -3, 5, Fraction(-2, 7), 1000]
    om2, om3 = ALPHA5.form_2d(), ALPHA5.form_3d()
    for C in values:
        c2 = separatrix_family(ALPHA5, C, order=8, first_integral=F)
        c3 = separatrix_family(ALPHA5, C, order=8, dim=3, first_integral=F)
        assert verify_separatrix(c2, om2, 8).status == HOLDS, C
        assert verify_separatrix(c3, om3, 8).status == HOLDS, C
        assert c2.tangent("z", "t") == QQi(-2), C
        z3 = c3.images["z"]
        assert str(z3.homogeneous_part(2)) == "-2*x*y", C
        if C == 0:
            assert str(c2.images["z"]) == "-2*s" and str(c2.images["t"]) == "s"
            assert str(z3) == "-2*x*y"


def test_criterion_07_holonomy_numerics():
    with Budget(10):
        corner = load_config("corner")
        form = parse_one_form(corner.form.text, corner.form.vars)
        loop = LoopSpec("z", 0j, 0.5, 1 + 0j)
        h = HolonomyMap(form, loop)
        assert abs(h(0.05) + 0.05) < 1e-6
        # homotopy: other radius and basepoint
        for r, b in [(0.25, 0.5 + 0.5j), (0.9, -1 + 0j)]:
            assert abs(HolonomyMap(form, LoopSpec("z", 0j, r, b))(0.05) - h(0.05)) < 1e-6
        # composition: lifting gamma1 * gamma2 equals hol(gamma2) o hol(gamma1)
        sc = special_component(ALPHA5.form_2d(), 2)
        g1, g2 = sc.generators()
        segs = g1.loop.segments() + g2.loop.segments()
        joined, _ = lift_path(sc.form, "u", segs, 0.05)
        assert abs(joined - g1.then(g2)(0.05)) < 1e-6
        assert abs(joined - g2(g1(0.05))) < 1e-6
        shifted = HolonomyMap(sc.form, LoopSpec("u", g1.loop.center, g1.loop.radius / 2, sc.basepoint))
        assert abs(shifted(0.05) - g1(0.05)) < 1e-6
    mults = {complex(g.loop.center): g.multiplier() for g in (g1, g2)}
    target = cmath.exp(1.5j * math.pi)
    print("alpha=5 generator multipliers:", {k: complex(round(v.real, 9), round(v.imag, 9))
                                             for k, v in mults.items()})
    assert any(abs(m - target) < 1e-5 for m in mults.values()), \
        f"no generator multiplier within 1e-5 of exp(3 pi i / 2); got {list(mults.values())}"


def test_criterion_08_moussu_fixture():
    with Budget(30):
        cfg = load_config("moussu")
        fam = cfg.family
        probe, sc = corollary4_probe(fam.k, fam.n, fam.alpha_value(), fam.U, t0=0.05)
        h1, h2 = sorted(sc.generators(), key=lambda g: g.period(0.05)[0] or 99)
        t0 = 0.05
        assert abs(h1.power(2)(t0) - t0) < 1e-4
        assert abs(h2.power(3)(t0) - t0) < 1e-4
        assert probe.max_commutator > 1e-3
        assert corollary4_check(fam.k, fam.n, fam.alpha_sq, probe).status == FAILS


def test_criterion_09_theorems_end_to_end():
    with Budget(60):
        v7 = theorem7_check(ALPHA5, f=(1, 1), build_section=True)
        assert v7.status == HOLDS
        sec = dicriticalness_section(ALPHA5, (1, 1), order=8)
        cert = sec.certificate
        assert cert["tangent_to_dt"] and cert["nonzero"] and cert["order"] >= 8
        v6 = theorem6_check(ALPHA5, candidate=MeroFunction.parse(F5, ("t", "z")), hold_tol=1e-6)
        assert v6.status == HOLDS
        assert v6.evidence["invariance"]["max_residual"] < 1e-6
        a17 = FamilyParams(1, 1, 2, 1, 17)
        assert theorem7_check(a17).status == FAILS
        assert theorem6_check(a17).status in (INCONCLUSIVE, FAILS)


def test_criterion_10_calculus_invariants():
    from test_blowup import test_chart_overlap_classification_agrees
    from test_series_core import (test_d_of_d_is_zero, test_d_of_d_on_one_forms, test_pullback_functoriality,
                                  test_saturation_idempotent, test_wedge_graded_antisymmetry)
    for check in (test_d_of_d_is_zero, test_d_of_d_on_one_forms, test_wedge_graded_antisymmetry,
                  test_pullback_functoriality, test_saturation_idempotent,
                  test_chart_overlap_classification_agrees):
        check()
