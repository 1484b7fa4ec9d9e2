"""Map-spec parsing, Cayley transport, translated jets, properness."""
from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest

from crflat import expr as ex
from crflat.errors import DimensionError, MapParseError, PoleError
from crflat.fixtures import linear_fixture, non_proper_fixture, rank_one_exact, whitney_ball, whitney_siegel
from crflat.jets import Monomial
from crflat.maps import (
    BoundaryPoint,
    cayley,
    cayley_point,
    compose_mapspec,
    jets_at,
    map_value,
    origin,
    parse_map,
    verify_proper,
)
from crflat.scalars import ComplexRational


def test_parse_quotient_tree():
    e = ex.parse_expression("(2*z1)/(1 - i*w)", {"z1", "w"})
    assert isinstance(e, ex.Div)
    val = ex.eval_scalar(e, {"z1": ComplexRational.of(1), "w": ComplexRational.of(0)}, "exact")
    assert val == ComplexRational.of(2)


def test_parse_component_count_mismatch():
    doc = {"model": "siegel", "n": 1, "N": 2, "components": ["z1", "w"]}
    with pytest.raises(DimensionError):
        parse_map(json.dumps(doc))


def test_parse_syntax_error_positions():
    with pytest.raises(MapParseError) as err:
        ex.parse_expression("z1 + ", {"z1", "w"})
    assert "line 1" in str(err.value)


def test_parse_rejects_decimals_and_unknown_names():
    with pytest.raises(MapParseError):
        ex.parse_expression("0.5*z1", {"z1"})
    with pytest.raises(MapParseError):
        ex.parse_expression("q + 1", {"z1"})


def test_cayley_point_examples():
    zs, w = cayley_point("siegel->ball", [ComplexRational.of(0)], ComplexRational.of(0))
    assert zs[0].is_zero() and w == ComplexRational.of(1)
    zs, w = cayley_point("siegel->ball", [ComplexRational.of(1)], ComplexRational.of(0, 1))
    assert zs[0] == ComplexRational.of(1) and w.is_zero()
    assert float(zs[0].abs2() + w.abs2()) == 1.0


def test_cayley_involutive_on_whitney():
    Wb = whitney_ball()
    Ws = cayley(Wb)
    back = cayley(Ws)
    rng = random.Random(3)
    for _ in range(6):
        z = ComplexRational.of(Fraction(rng.randint(-3, 3), 10), Fraction(rng.randint(-3, 3), 10))
        w = ComplexRational.of(Fraction(rng.randint(-3, 3), 10), Fraction(rng.randint(-3, 3), 10))
        a = map_value(Wb, [z], w)
        b = map_value(back, [z], w)
        assert all((x - y).is_zero() for x, y in zip(a, b))


def test_jets_at_linear_is_identity_like():
    F = linear_fixture(1, 2)
    mj = jets_at(F, origin(1), order=4)
    f, phi, g = mj.holomorphic
    assert f.coefficient(Monomial((1,), (0,), 0)) == ComplexRational.of(1)
    assert phi.is_zero()
    assert g.coefficient(Monomial((0,), (0,), 1)) == ComplexRational.of(1)
    assert f.constant_term().is_zero() and g.constant_term().is_zero()


def test_jets_at_vanishes_at_zero_random_points():
    F = whitney_siegel()
    rng = random.Random(5)
    for _ in range(5):
        p = BoundaryPoint.of([ComplexRational.of(Fraction(rng.randint(-2, 2), 5), Fraction(rng.randint(-2, 2), 7))],
                             Fraction(rng.randint(-2, 2), 3))
        mj = jets_at(F, p, order=3)
        for jet in mj.holomorphic:
            assert jet.constant_term().is_zero()


def test_jets_at_reexpansion_recovers():
    # expanding F_p at the antipode point undoes the translation
    F = whitney_siegel()
    p = BoundaryPoint.of([ComplexRational.of(Fraction(1, 3), Fraction(1, 5))], Fraction(2, 7))
    mj = jets_at(F, p, order=4)
    base = jets_at(F, origin(1), order=4)
    # sigma_p^{-1}(0) has z = -z0 and w chosen back on the hypersurface
    z_back = [-v for v in p.z]
    u_back = ComplexRational.of(-((p.u + ComplexRational.of(0)).re))
    q = BoundaryPoint.of(z_back, u_back.re)

    from crflat.maps import sigma0_mapspec, tauF_mapspec
    # F_p as exact rational map: tau o F o sigma composed symbolically
    sig = sigma0_mapspec(p)
    tau = tauF_mapspec(F, p)
    Fp = compose_mapspec(tau, compose_mapspec(F, sig))
    mj2 = jets_at(Fp, q, order=4)
    for a, b in zip(mj2.holomorphic, base.holomorphic):
        assert (a - b).is_zero()


def test_verify_proper_linear_exact_zero():
    for order in (2, 3, 4, 5, 6):
        res = verify_proper(linear_fixture(2, 4), order=order)
        assert res.mode == "exact" and res.is_zero()


def test_verify_proper_whitney_exact_zero():
    W = whitney_siegel()
    assert verify_proper(W, order=4).is_zero()
    p = BoundaryPoint.of([ComplexRational.of(Fraction(1, 2), Fraction(-1, 3))], Fraction(1, 4))
    assert verify_proper(W, p, order=5).is_zero()


def test_verify_proper_rank_one_exact_zero():
    assert verify_proper(rank_one_exact(), order=6).is_zero()


def test_verify_proper_nonzero_residual():
    res = verify_proper(non_proper_fixture(), order=4)
    assert not res.is_zero()
    assert res.weighted_order() == 2


def test_pole_detection():
    F = parse_map(json.dumps({
        "model": "siegel", "n": 1, "N": 1,
        "components": ["z1/w", "w"],
    }))
    with pytest.raises(PoleError):
        map_value(F, [ComplexRational.of(1)], ComplexRational.of(0))
