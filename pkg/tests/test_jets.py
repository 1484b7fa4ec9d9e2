"""Jet arithmetic: spec examples, ring axioms, truncation coherence."""
from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest

from crflat.errors import SingularSubstitutionError
from crflat.jets import (
    Jet,
    JetVector,
    Monomial,
    cr_field,
    cr_field_bar,
    heisenberg_w,
    restrict_to_heisenberg,
)
from crflat.scalars import CR_I, ComplexRational


def z(i=0, n=1, m=4):
    return Jet.z_var(i, n, m)


def zb(i=0, n=1, m=4):
    return Jet.zbar_var(i, n, m)


def u(n=1, m=4):
    return Jet.u_var(n, m)


def test_mul_weights():
    p = z() * zb()
    assert p.weighted_order() == 2
    assert p.coefficient(Monomial((1,), (1,), 0)) == ComplexRational.of(1)


def test_conj_of_iz():
    j = z().scale(CR_I)
    c = j.conj()
    assert c.coefficient(Monomial((0,), (1,), 0)) == ComplexRational.of(0, -1)


def test_truncation_kills_high_weight():
    uu = Jet.u_var(1, 3)
    assert (uu * uu).is_zero()


def test_weighted_order_examples():
    j = z(0, 2, 5) * z(0, 2, 5) * zb(1, 2, 5)
    assert j.weighted_order() == 3
    assert Jet.zero(2, 5).weighted_order() == math.inf
    assert (u() + z() * z() * z()).weighted_order() == 2


def test_differentiate_examples():
    uu = u(1, 4)
    d = (uu * uu).diff("u")
    assert d.coefficient(Monomial((0,), (0,), 1)) == ComplexRational.of(2)
    p = z() * zb()
    assert p.diff("z", 0) == zb(0, 1, 3)
    q = z(0, 2, 4) * z(0, 2, 4)
    assert q.diff("zbar", 1).is_zero()


def test_diff_order_drop():
    assert z(0, 1, 4).diff("z", 0).order == 3
    assert u(1, 4).diff("u").order == 2


def test_geometric_series_substitution():
    # 1/(1-w) with w = u + i z zbar at order 2 -> 1 + u + i z zbar
    n, m = 1, 2
    w = heisenberg_w(n, m)
    one = Jet.const(1, n, m)
    inv = (one - w).inverse()
    expected = one + w
    assert inv == expected


def test_inverse_singular():
    with pytest.raises(SingularSubstitutionError):
        z().inverse()


def test_restrict_to_heisenberg_w():
    F = JetVector((Jet.u_var(1, 4),))
    r = restrict_to_heisenberg(F)[0]
    assert r == heisenberg_w(1, 4)


def test_restrict_z_unchanged():
    F = JetVector((z(),))
    assert restrict_to_heisenberg(F)[0] == z()


def test_restrict_w_squared():
    # w^2 -> u^2 + 2i u z zbar - (z zbar)^2
    F = JetVector((u() * u(),))
    got = restrict_to_heisenberg(F)[0]
    w = heisenberg_w(1, 4)
    assert got == w * w
    assert got.coefficient(Monomial((0,), (0,), 2)) == ComplexRational.of(1)
    assert got.coefficient(Monomial((1,), (1,), 1)) == ComplexRational.of(0, 2)
    assert got.coefficient(Monomial((2,), (2,), 0)) == ComplexRational.of(-1)


def _random_jet(rng, n=2, order=4, maxterms=6):
    terms = {}
    for _ in range(maxterms):
        zexp = tuple(rng.randint(0, 2) for _ in range(n))
        zbexp = tuple(rng.randint(0, 2) for _ in range(n))
        uexp = rng.randint(0, 2)
        c = ComplexRational.of(Fraction(rng.randint(-4, 4), rng.randint(1, 4)),
                               Fraction(rng.randint(-4, 4), rng.randint(1, 4)))
        terms[Monomial(zexp, zbexp, uexp)] = c
    return Jet(n, order, terms, "exact")


def test_ring_axioms_random():
    rng = random.Random(7)
    for _ in range(20):
        a, b, c = (_random_jet(rng) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert a + b == b + a
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c


def test_truncation_coherence_random():
    rng = random.Random(11)
    for _ in range(20):
        a, b = _random_jet(rng, order=6), _random_jet(rng, order=6)
        m = 3
        assert (a * b).truncate(m) == (a.truncate(m) * b.truncate(m)).truncate(m)


def test_conj_involution_and_mixed_partials():
    rng = random.Random(13)
    for _ in range(10):
        a = _random_jet(rng)
        assert a.conj().conj() == a
        assert a.diff("z", 0).diff("z", 1) == a.diff("z", 1).diff("z", 0)


def test_exact_substitution_matches_float_eval():
    # exact-mode substitution then float evaluation == float-mode pipeline
    rng = random.Random(17)
    n, m = 1, 6
    w = heisenberg_w(n, m)
    one = Jet.const(1, n, m)
    exact_composite = (one - w).inverse()
    float_composite = (one.to_float() - w.to_float()).inverse()
    for _ in range(100):
        zv = complex(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2))
        uv = rng.uniform(-0.2, 0.2)
        via_exact = complex(exact_composite.eval([zv], uv))
        via_float = complex(float_composite.eval([zv], uv))
        assert abs(via_exact - via_float) < 1e-12
    # loose sanity against the analytic function inside the convergence box
    zv, uv = 0.03 + 0.02j, 0.04
    wv = complex(uv, abs(zv) ** 2)
    assert abs(complex(exact_composite.eval([zv], uv)) - 1.0 / (1.0 - wv)) < 1e-5


def test_sqrt_jet():
    n, m = 1, 4
    base = Jet.const(4, n, m) + z(0, n, m) * zb(0, n, m)
    r = base.sqrt()
    assert r.mode == "exact"
    assert (r * r) == base
    base9 = Jet.const(2, n, m) + u(n, m)
    r9 = base9.sqrt()
    assert r9.mode == "float"
    prod = r9 * r9
    diff = prod - base9.to_float()
    assert diff.max_abs() < 1e-12


def test_cr_fields_kill_antiholomorphic_and_holomorphic():
    n, m = 2, 4
    w = heisenberg_w(n, m)
    wbar = w.conj()
    assert cr_field(wbar, 0).is_zero()
    assert cr_field(wbar, 1).is_zero()
    assert cr_field_bar(w, 0).is_zero()
    zb1 = Jet.zbar_var(0, n, m)
    assert cr_field(zb1, 0).is_zero()
