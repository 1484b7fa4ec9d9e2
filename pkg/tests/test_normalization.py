"""Stage-two and stage-three normal forms, geometric rank, kappa_0."""
from __future__ import annotations

import random
from fractions import Fraction

from crflat import linalg as la
from crflat.automorphisms import conjugate_map, make_isotropy, make_sigma0, make_tauF
from crflat.fixtures import linear_fixture, rank_one_exact, whitney_siegel
from crflat.maps import BoundaryPoint, jets_at, origin
from crflat.normalization import (
    geometric_rank,
    kappa0,
    normalize_star2,
    normalize_star3,
    star2_condition_residuals,
)
from crflat.sampling import boundary_points
from crflat.scalars import ComplexRational, abs_s, real_part

CR = ComplexRational.of
TOL = 1e-9


def test_star2_linear_is_identity_gauge():
    F = linear_fixture(1, 2)
    mj = jets_at(F, origin(1), order=4)
    s2 = normalize_star2(mj.holomorphic, 1, 2)
    assert s2.mode == "exact"
    assert s2.max_residual() == 0.0
    assert la.max_abs(la.mat_sub(s2.tau_matrix, la.identity(4, "exact"))) == 0.0
    assert all(abs_s(s2.a_matrix[j][l]) == 0 for j in range(1) for l in range(1))


def test_star2_rank_one_exact_stays_exact():
    F = rank_one_exact()
    mj = jets_at(F, origin(1), order=4)
    s2 = normalize_star2(mj.holomorphic, 1, 3)
    assert s2.mode == "exact"
    assert s2.max_residual() == 0.0
    assert s2.a_matrix[0][0] == CR(4)


def test_star2_whitney_origin():
    # at p = 0 the Whitney parametrization is rank-degenerate: a == 0 there
    F = whitney_siegel()
    mj = jets_at(F, origin(1), order=4)
    s2 = normalize_star2(mj.holomorphic, 1, 2)
    assert s2.max_residual() <= TOL
    assert abs_s(s2.a_matrix[0][0]) <= TOL


def test_star2_whitney_random_points_constraint():
    F = whitney_siegel()
    for k, p in enumerate(boundary_points(1, 5, seed=3)):
        mj = jets_at(F, p, order=4)
        s2 = normalize_star2(mj.holomorphic, 1, 2)
        assert s2.residuals["lemma21_constraint"] <= TOL, (k, s2.residuals)
        assert s2.max_residual() <= TOL
        # generic points: both constraint sides nonzero
        assert abs_s(s2.a_matrix[0][0]) > 1e-3


def test_star2_gauge_invariance_under_precomposed_isotropy():
    F = whitney_siegel()
    p = boundary_points(1, 1, seed=9)[0]
    mj = jets_at(F, p, order=4)
    s2a = normalize_star2(mj.holomorphic, 1, 2)
    extra = make_isotropy(Fraction(3, 2), Fraction(1, 3),
                          [CR(Fraction(1, 4), Fraction(-1, 5)), CR(0, Fraction(1, 6))],
                          la.identity(2, "exact"), 2)
    twisted = conjugate_map(extra, F, make_isotropy(1, 0, [0], la.identity(1, "exact"), 1))
    mj2 = jets_at(twisted, p, order=4)
    s2b = normalize_star2(mj2.holomorphic, 1, 2)
    assert s2b.max_residual() <= TOL
    sva = la.singular_values(s2a.a_matrix)
    svb = la.singular_values(s2b.a_matrix)
    assert all(abs(x - y) <= 1e-9 for x, y in zip(sva, svb))


def test_rank_linear_zero_exact():
    F = linear_fixture(1, 2)
    for p in boundary_points(1, 20, seed=0):
        rep = geometric_rank(F, p)
        assert rep.rank == 0
        assert rep.mode == "exact"
        assert all(s == 0.0 for s in rep.singular_values)


def test_rank_whitney_one_generic():
    F = whitney_siegel()
    for p in boundary_points(1, 5, seed=1):
        rep = geometric_rank(F, p)
        assert rep.rank == 1
        assert rep.gap() >= 1e-3  # 10^3 x rank tolerance


def test_rank_invariance_under_equivalence():
    rng = random.Random(31)
    F = linear_fixture(1, 2)
    p0 = BoundaryPoint.of([CR(Fraction(1, 3), Fraction(1, 7))], Fraction(1, 5))
    sigma = make_sigma0(p0)
    tau = make_tauF(F, boundary_points(1, 1, seed=4)[0]).inverse()
    G = conjugate_map(tau, F, sigma)
    for p in boundary_points(1, 6, seed=2):
        assert geometric_rank(G, p).rank == 0


def test_kappa0_values_and_bound():
    assert kappa0(linear_fixture(1, 2), samples=6).kappa0 == 0
    repW = kappa0(whitney_siegel(), samples=6)
    assert repW.kappa0 == 1
    assert repW.bound_ok
    repE = kappa0(rank_one_exact(), samples=6)
    assert repE.kappa0 == 1
    assert repE.bound_ok


def test_star3_rank_one_exact_all_exact():
    F = rank_one_exact()
    s3 = normalize_star3(F, origin(1))
    assert s3.mode == "exact"
    assert s3.mu_data.kappa0 == 1
    assert s3.mu_data.mu[0] == CR(4)
    assert s3.mu_data.mu_pairs[(1, 1)] == CR(2)
    assert s3.mu_data.relations_residual == 0.0
    assert s3.mu_data.bound_ok
    assert s3.max_residual() == 0.0
    assert not s3.flags
    # gauges are trivial here: the fixture is already fully normalized
    assert la.max_abs(la.mat_sub(s3.sigma_matrix, la.identity(3, "exact"))) == 0.0
    assert la.max_abs(la.mat_sub(s3.tau_matrix, la.identity(5, "exact"))) == 0.0


def test_star3_whitney_generic_point():
    F = whitney_siegel()
    for p in boundary_points(1, 3, seed=5):
        s3 = normalize_star3(F, p)
        md = s3.mu_data
        assert md.kappa0 == 1
        mu1 = float(real_part(md.mu[0]))
        assert mu1 > 0
        mu11 = abs_s(md.mu_pairs[(1, 1)])
        assert abs(float(mu11) - mu1 ** 0.5) <= 1e-9
        assert md.relations_residual <= 1e-9
        assert s3.max_residual() <= 1e-9
        assert md.bound_ok
        # star3 output still satisfies the star2 validator
        r2 = star2_condition_residuals(s3.jets, 1, 2)
        assert max(r2.values()) <= 1e-9


def test_star3_linear_trivial():
    F = linear_fixture(2, 4)
    s3 = normalize_star3(F, origin(2))
    assert s3.mu_data.kappa0 == 0
    assert s3.mu_data.mu == []
    assert s3.max_residual() == 0.0


def test_star3_kappa_zero_after_conjugation():
    F = linear_fixture(1, 2)
    sigma = make_sigma0(BoundaryPoint.of([CR(Fraction(1, 2))], Fraction(1, 3)))
    G = conjugate_map(make_tauF(F, origin(1)).inverse(), F, sigma)
    p = boundary_points(1, 1, seed=7)[0]
    s3 = normalize_star3(G, p)
    assert s3.mu_data.kappa0 == 0
    assert s3.max_residual() <= 1e-9
