"""Partial and full normal forms of proper map germs, geometric rank, kappa_0.

Stage two (after Lemma-2.1-type target gauge): f = z + (i/2)a(z)w + o_wt(3),
phi = phi^(2)(z) + o_wt(2), g = w + o_wt(4), with the constraint
<zbar, a(z)>|z|^2 = |phi^(2)(z)|^2.  The matrix A(p) is the coefficient matrix
of a; its rank is the geometric rank at p.  Stage three diagonalizes A(p) and
rotates the quadratic block so that phi_{jl} = mu_{jl} z_j z_l + o_wt(2).

All stages are solved constructively gauge-by-gauge and then validated as
postconditions; residuals are reported, never assumed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg as la
from .automorphisms import Automorphism, make_isotropy
from .errors import NormalizationError
from .jets import Jet, JetVector, Monomial, restrict_to_heisenberg
from .maps import (
    BoundaryPoint,
    MapSpec,
    compose_jet_map,
    identity_jets,
    jets_at,
    map_jets,
    properness_residual_jet,
)
from .sampling import boundary_points
from .scalars import (
    EXACT,
    ComplexRational,
    Scalar,
    abs_s,
    coerce,
    conj_s,
    imag_part,
    join_modes,
    real_part,
    sqrt_positive,
    to_complex,
)

RANK_TOL = 1e-6
NORM_TOL = 1e-9

ADVISORY = (
    "geometric rank is lower semi-continuous in p: it can only drop on thin sets, "
    "so generic sampling is reliable"
)


# -- gauge application helpers -------------------------------------------------


def apply_target_gauge(aut: Automorphism, jets: JetVector) -> JetVector:
    """Compose a target automorphism with a jet vector: tau o F."""
    order = jets.order
    mode = join_modes(jets.mode, aut.mode)
    return map_jets(aut.rational_form, list(jets), order, mode)


def apply_source_gauge(jets: JetVector, aut: Automorphism, n: int) -> JetVector:
    """Compose a jet vector with a source automorphism: F o sigma."""
    order = jets.order
    mode = join_modes(jets.mode, aut.mode)
    sig_jets = map_jets(aut.rational_form, identity_jets(n, order, mode), order, mode)
    return compose_jet_map(jets, list(sig_jets))


# -- coefficient extraction ----------------------------------------------------


def _zero_exp(n: int) -> tuple[int, ...]:
    return (0,) * n


def _e(n: int, j: int, amount: int = 1) -> tuple[int, ...]:
    return tuple(amount if k == j else 0 for k in range(n))


def _pair_exp(n: int, j: int, l: int) -> tuple[int, ...]:
    e = [0] * n
    e[j] += 1
    e[l] += 1
    return tuple(e)


def linear_z_matrix(jets: JetVector, n: int, N: int) -> la.Matrix:
    """B[k][j] = d ftilde_k / d z_j at 0 (N x n)."""
    return [[jets[k].coefficient(Monomial(_e(n, j), _zero_exp(n), 0)) for j in range(n)] for k in range(N)]


def w_coefficients(jets: JetVector, n: int, N: int) -> list[Scalar]:
    return [jets[k].coefficient(Monomial(_zero_exp(n), _zero_exp(n), 1)) for k in range(N)]


def a_matrix_of(jets: JetVector, n: int) -> la.Matrix:
    """A[j][l] = -2i * coefficient of z_j w in f_l."""
    minus_2i = ComplexRational.of(0, -2)
    out = la.zeros(n, n, jets.mode)
    for l in range(n):
        for j in range(n):
            c = jets[l].coefficient(Monomial(_e(n, j), _zero_exp(n), 1))
            out[j][l] = coerce(minus_2i, jets.mode) * c
    return out


def quad_columns(jets: JetVector, n: int, N: int) -> dict[tuple[int, int], list[Scalar]]:
    """Coefficient columns v_{jl}[mu] of z_j z_l in the phi block (0-based pairs j<=l)."""
    cols: dict[tuple[int, int], list[Scalar]] = {}
    for j in range(n):
        for l in range(j, n):
            mono = Monomial(_pair_exp(n, j, l), _zero_exp(n), 0)
            cols[(j, l)] = [jets[n + mu].coefficient(mono) for mu in range(N - n)]
    return cols


# -- stage-two normalization -----------------------------------------------------


@dataclass
class Star2Result:
    jets: JetVector
    restricted: JetVector
    n: int
    N: int
    order: int
    mode: str
    target_gauge: list[Automorphism]
    tau_matrix: la.Matrix
    a_matrix: la.Matrix
    residuals: dict[str, float]

    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)


def star2_condition_residuals(jets: JetVector, n: int, N: int) -> dict[str, float]:
    """Deviations of a holomorphic jet vector from the stage-two normal form."""
    mode = jets.mode
    res: dict[str, float] = {}
    res["origin"] = max((abs_s(j.constant_term()) for j in jets), default=0.0)
    B = linear_z_matrix(jets, n, N)
    ident_block = [[coerce(1 if (k == j and k < n) else 0, mode) for j in range(n)] for k in range(N)]
    res["f_linear"] = la.max_abs(la.mat_sub(B, ident_block))
    res["ft_w"] = max((abs_s(c) for c in w_coefficients(jets, n, N)), default=0.0)
    # f block: no z-quadratics, no z-cubics
    fq = 0.0
    fc = 0.0
    for l in range(n):
        for m, c in jets[l].terms.items():
            if m.u == 0 and sum(m.z) == 2:
                fq = max(fq, abs_s(c))
            if m.u == 0 and sum(m.z) == 3:
                fc = max(fc, abs_s(c))
    res["f_quadratic"] = fq
    res["f_cubic"] = fc
    g = jets[N]
    res["g_w"] = abs_s(g.coefficient(Monomial(_zero_exp(n), _zero_exp(n), 1)) - coerce(1, mode))
    g3 = 0.0
    g4 = 0.0
    for m, c in g.terms.items():
        w = m.weight
        if w == 3:
            g3 = max(g3, abs_s(c))
        if w == 4:
            g4 = max(g4, abs_s(c))
    res["g_weight3"] = g3
    res["g_weight4"] = g4
    # constraint <zbar, a(z)>|z|^2 = |phi^(2)(z)|^2 as jets in (z, zbar)
    A = a_matrix_of(jets, n)
    order = jets.order
    lhs = Jet.zero(n, order, mode)
    for l in range(n):
        a_l = Jet.zero(n, order, mode)
        for j in range(n):
            a_l = a_l + Jet.z_var(j, n, order, mode).scale(A[j][l])
        lhs = lhs + Jet.zbar_var(l, n, order, mode) * a_l
    norm_z = Jet.zero(n, order, mode)
    for j in range(n):
        norm_z = norm_z + Jet.z_var(j, n, order, mode) * Jet.zbar_var(j, n, order, mode)
    lhs = lhs * norm_z
    rhs = Jet.zero(n, order, mode)
    for mu in range(N - n):
        phi2 = Jet(n, order, {m: c for m, c in jets[n + mu].terms.items() if m.u == 0 and m.weight == 2}, mode)
        rhs = rhs + phi2 * phi2.conj()
    res["lemma21_constraint"] = (lhs - rhs).max_abs()
    AH = la.mat_sub(A, la.conj_transpose(A))
    res["a_antihermitian"] = 0.5 * la.max_abs(AH)
    return res


def normalize_star2(Fp: JetVector, n: int, N: int, tol: float = NORM_TOL) -> Star2Result:
    """Stage-two normalization by a target isotropy chain (lambda/U, a, r)."""
    order, mode = Fp.order, Fp.mode
    if max(abs_s(j.constant_term()) for j in Fp) > 1e-12:
        raise NormalizationError("stage-two input must vanish at the origin")
    prop = properness_residual_jet(restrict_to_heisenberg(Fp), N).max_abs()
    if prop > 1e-8:
        raise NormalizationError(f"stage-two input is not proper to truncation order (residual {prop:.3e})")
    gauges: list[Automorphism] = []
    jets = Fp

    # weight one: lambda and U from the linear data
    g = jets[N]
    b = g.coefficient(Monomial(_zero_exp(n), _zero_exp(n), 1))
    b_im = abs(float(imag_part(b)))
    b_re = float(real_part(b))
    if b_re <= 1e-12 or b_im > 1e-9 * max(1.0, abs(b_re)):
        raise NormalizationError(f"degenerate differential: g_w(0) = {to_complex(b)} is not positive real")
    b_real: Scalar = ComplexRational.of(real_part(b)) if isinstance(b, ComplexRational) else b_re
    B = linear_z_matrix(jets, n, N)
    BtB = la.mat_mul(la.conj_transpose(B), B)
    scaled_id = la.mat_scale(la.identity(n, mode), coerce(b_real, mode))
    ortho_res = la.max_abs(la.mat_sub(BtB, scaled_id))
    if ortho_res > 1e-8 * max(1.0, abs(b_re)):
        raise NormalizationError(
            f"weight-one data violates the properness structure (||B*B - g_w I|| = {ortho_res:.3e})"
        )
    lam = sqrt_positive(b_real)
    lam_mode = EXACT if isinstance(lam, ComplexRational) else "float"
    inv_lam = coerce(1, lam_mode) / lam
    cols = [[coerce(B[k][j], join_modes(mode, lam_mode)) * coerce(inv_lam, join_modes(mode, lam_mode)) for k in range(N)] for j in range(n)]
    V = la.gram_schmidt_complete(cols, N, join_modes(mode, lam_mode))
    U1 = la.conj_transpose(V)
    tau1 = make_isotropy(inv_lam, 0, [0] * N, U1, N)
    gauges.append(tau1)
    jets = apply_target_gauge(tau1, jets)

    # weight two: a kills the w-linear coefficients of (f, phi)
    gamma = w_coefficients(jets, n, N)
    tau2 = make_isotropy(1, 0, [-c for c in gamma], la.identity(N, jets.mode), N)
    gauges.append(tau2)
    jets = apply_target_gauge(tau2, jets)

    # weight four: r kills the real part of the g_{ww} term
    t = jets[N].coefficient(Monomial(_zero_exp(n), _zero_exp(n), 2))
    r = -real_part(t)
    tau3 = make_isotropy(1, r if isinstance(r, Fraction) else float(r), [0] * N, la.identity(N, jets.mode), N)
    gauges.append(tau3)
    jets = apply_target_gauge(tau3, jets)

    residuals = star2_condition_residuals(jets, n, N)
    residuals["input_properness"] = prop
    residuals["g_ww_imag"] = abs(float(imag_part(t)))
    tau_matrix = la.identity(N + 2, jets.mode)
    for gauge in gauges:
        tau_matrix = la.mat_mul(gauge.matrix.as_lists(), tau_matrix)
    hard = max(residuals[k] for k in ("origin", "f_linear", "ft_w", "f_quadratic", "g_w", "g_weight3", "g_weight4"))
    if hard > max(tol, 1e-7):
        raise NormalizationError(f"stage-two normalization failed to converge (residual {hard:.3e})")
    return Star2Result(
        jets=jets,
        restricted=restrict_to_heisenberg(jets),
        n=n,
        N=N,
        order=order,
        mode=jets.mode,
        target_gauge=gauges,
        tau_matrix=tau_matrix,
        a_matrix=a_matrix_of(jets, n),
        residuals=residuals,
    )


# -- geometric rank --------------------------------------------------------------


@dataclass
class RankReport:
    point: BoundaryPoint
    a_matrix: la.Matrix
    singular_values: list[float]
    hermitian_eigenvalues: list[float]
    rank: int
    tol: float
    mode: str
    advisory: str
    star2_residuals: dict[str, float]

    def gap(self) -> float:
        """Smallest retained singular value (0 when rank is 0)."""
        return self.singular_values[self.rank - 1] if self.rank > 0 else 0.0


def geometric_rank(F: MapSpec, p: BoundaryPoint, tol: float = RANK_TOL, order: int = 4) -> RankReport:
    """Rank of A(p), computed from the stage-two normal form at p."""
    mj = jets_at(F, p, order)
    s2 = normalize_star2(mj.holomorphic, F.n, F.N)
    A = s2.a_matrix
    sv = la.singular_values(A)
    H = la.mat_scale(la.mat_sub(A, la.mat_scale(la.conj_transpose(A), coerce(-1, s2.mode))), coerce(Fraction(1, 2), s2.mode))
    eig, _ = la.eigh_sorted(H) if F.n > 1 else ([float(real_part(A[0][0]))], None)
    rank = la.matrix_rank(A, tol)
    return RankReport(
        point=p,
        a_matrix=A,
        singular_values=sv,
        hermitian_eigenvalues=eig,
        rank=rank,
        tol=tol,
        mode=s2.mode,
        advisory=ADVISORY,
        star2_residuals=s2.residuals,
    )


@dataclass
class Kappa0Report:
    kappa0: int
    ranks: list[int]
    points: list[BoundaryPoint]
    tol: float
    bound_P: int
    bound_ok: bool
    sampling: str


def kappa0(
    F: MapSpec,
    samples: int = 20,
    seed: int = 0,
    points: list[BoundaryPoint] | None = None,
    tol: float = RANK_TOL,
    order: int = 4,
) -> Kappa0Report:
    """Max of Rk_F(p) over a deterministic low-discrepancy sample plus user points."""
    pts = boundary_points(F.n, samples, seed) + list(points or [])
    ranks = [geometric_rank(F, p, tol, order).rank for p in pts]
    k0 = max(ranks) if ranks else 0
    P = k0 * (2 * F.n - k0 - 1) // 2
    return Kappa0Report(
        kappa0=k0,
        ranks=ranks,
        points=pts,
        tol=tol,
        bound_P=P,
        bound_ok=F.N >= F.n + P,
        sampling=f"van der Corput grid, {samples} points, seed {seed}",
    )


# -- stage-three normalization ----------------------------------------------------


@dataclass
class MuData:
    kappa0: int
    mu: list[Scalar]
    mu_pairs: dict[tuple[int, int], Scalar]
    S0: list[tuple[int, int]]
    S: list[tuple[int, int]]
    bound_P: int
    bound_ok: bool
    relations_residual: float


@dataclass
class Star3Result:
    jets: JetVector
    restricted: JetVector
    n: int
    N: int
    order: int
    mode: str
    sigma_matrix: la.Matrix
    tau_matrix: la.Matrix
    a_matrix: la.Matrix
    mu_data: MuData
    residuals: dict[str, float]
    flags: list[str] = field(default_factory=list)

    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)


def _index_sets(n: int, N: int, k0: int) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """1-based S_0 and S: S_0 = {(j,l): j <= k0, j <= l <= n}; S fills up to N-n pairs."""
    S0 = [(j, l) for j in range(1, k0 + 1) for l in range(j, n + 1)]
    fill = (N - n) - len(S0)
    if fill < 0:
        raise NormalizationError(f"codimension too small for rank {k0}: need N-n >= {len(S0)}")
    S = S0 + [(k0 + 1, l) for l in range(k0 + 1, k0 + 1 + fill)]
    return S0, S


def _diag_rotation(A: la.Matrix, n: int, mode: str, tol: float):
    """Unitary W with W^dagger Herm(A) W diagonal (descending); exact path if A is diagonal.

    Returns (eigs, eigs_float, W, offdiag_max).
    """
    off = max((abs_s(A[j][l]) for j in range(n) for l in range(n) if j != l), default=0.0)
    diag_re = [real_part(A[j][j]) for j in range(n)]
    if off <= tol * 1e-3 or n == 1:
        idx = sorted(range(n), key=lambda j: -float(diag_re[j]))
        W = la.zeros(n, n, mode)
        for c, j in enumerate(idx):
            W[j][c] = coerce(1, mode)
        eigs = [diag_re[j] for j in idx]
        return eigs, [float(e) for e in eigs], W, off
    H = la.mat_scale(la.mat_sub(A, la.mat_scale(la.conj_transpose(A), coerce(-1, mode))), coerce(Fraction(1, 2), mode))
    eigs, Wnp = la.eigh_sorted(H)
    W = [[complex(Wnp[r][c]) for c in range(n)] for r in range(n)]
    return eigs, [float(e) for e in eigs], W, off


def _w2_coeffs(jets: JetVector, n: int, k0: int) -> list[Scalar]:
    return [jets[j].coefficient(Monomial(_zero_exp(n), _zero_exp(n), 2)) for j in range(k0)]


def normalize_star3(
    F: MapSpec,
    p: BoundaryPoint,
    rank_tol: float = RANK_TOL,
    tol: float = NORM_TOL,
    order: int = 4,
) -> Star3Result:
    """Full normalization at p: source and target gauges realizing Lemma-2.3 form."""
    n, N = F.n, F.N
    mj = jets_at(F, p, order)
    s2 = normalize_star2(mj.holomorphic, n, N)
    jets = s2.jets
    tau_matrix = s2.tau_matrix
    sigma_matrix = la.identity(n + 2, s2.mode)
    flags: list[str] = []

    A = s2.a_matrix
    if s2.residuals["a_antihermitian"] > max(tol, 1e-8):
        flags.append("svd_fallback")
    k0 = la.matrix_rank(A, rank_tol)
    S0, S = _index_sets(n, N, k0)

    # outer loop: diagonalize A, then kill w^2 coefficients of f_j (j <= k0)
    for _outer in range(8):
        eigs, eigs_float, W, off = _diag_rotation(A, n, jets.mode, rank_tol)
        sv = la.singular_values(A)
        top = max(sv) if sv else 0.0
        needs_rotation = off > tol * max(1.0, top) or any(
            abs(to_complex(A[j][j]) - complex(eigs_float[j])) > tol * max(1.0, top) for j in range(n)
        )
        if needs_rotation and k0 > 0:
            V = [[conj_s(W[r][c]) for c in range(n)] for r in range(n)]
            sigma_rot = make_isotropy(1, 0, [0] * n, V, n)
            Ublock = la.identity(N, jets.mode if jets.mode == EXACT and la.mat_mode(V) == EXACT else "float")
            Vh = la.conj_transpose(V)
            for rr in range(n):
                for cc in range(n):
                    Ublock[rr][cc] = Vh[rr][cc]
            tau_rot = make_isotropy(1, 0, [0] * N, Ublock, N)
            jets = apply_source_gauge(jets, sigma_rot, n)
            jets = apply_target_gauge(tau_rot, jets)
            sigma_matrix = la.mat_mul(sigma_matrix, sigma_rot.matrix.as_lists())
            tau_matrix = la.mat_mul(tau_rot.matrix.as_lists(), tau_matrix)
            s2b = normalize_star2(jets, n, N)
            jets = s2b.jets
            tau_matrix = la.mat_mul(s2b.tau_matrix, tau_matrix)
            A = s2b.a_matrix

        if k0 == 0:
            break

        mu = [real_part(A[j][j]) for j in range(k0)]
        if any(float(m) <= 0 for m in mu):
            raise NormalizationError(f"non-positive mu in stage three: {[float(m) for m in mu]}")

        # Newton on the source a-gauge for the w^2 coefficients of f_j, j <= k0
        base = jets
        base_tau = tau_matrix
        b = [coerce(0, jets.mode) for _ in range(n)]
        d = _w2_coeffs(base, n, k0)
        accepted = False
        for _it in range(12):
            if max((abs_s(v) for v in d), default=0.0) <= tol:
                accepted = True
                break
            two_i = ComplexRational.of(0, 2)
            for j in range(k0):
                b[j] = b[j] + coerce(two_i, jets.mode) * d[j] / coerce(mu[j], jets.mode)
            sigma_b = make_isotropy(1, 0, b, la.identity(n, jets.mode), n)
            trial = apply_source_gauge(base, sigma_b, n)
            s2c = normalize_star2(trial, n, N)
            jets = s2c.jets
            d = _w2_coeffs(jets, n, k0)
            if max((abs_s(v) for v in d), default=0.0) <= tol:
                sigma_matrix = la.mat_mul(sigma_matrix, sigma_b.matrix.as_lists())
                tau_matrix = la.mat_mul(s2c.tau_matrix, base_tau)
                accepted = True
                break
        if not accepted:
            raise NormalizationError("stage-three w^2 correction did not converge")
        if max((abs_s(v) for v in _w2_coeffs(jets, n, k0)), default=0.0) > tol:
            raise NormalizationError("stage-three w^2 correction did not converge")
        A = a_matrix_of(jets, n)
        off_now = max((abs_s(A[j][l]) for j in range(n) for l in range(n) if j != l), default=0.0)
        if off_now <= tol * max(1.0, max(la.singular_values(A) or [0.0])):
            break

    # phi-block rotation from the Gram structure of the quadratic columns
    cols = quad_columns(jets, n, N)
    codim = N - n
    mode_now = jets.mode
    if codim > 0:
        picked: list[list[Scalar]] = []
        norms: dict[tuple[int, int], Scalar] = {}
        gram_res = 0.0
        offS0_res = 0.0
        for (j, l) in S0:
            v = cols[(j - 1, l - 1)]
            norm2 = coerce(0, mode_now)
            for x in v:
                norm2 = norm2 + x * conj_s(x)
            norm2_real = ComplexRational.of(real_part(norm2)) if isinstance(norm2, ComplexRational) else float(real_part(norm2))
            if float(real_part(norm2)) <= (tol * tol):
                raise NormalizationError(f"vanishing quadratic column for pair {(j, l)}")
            root = sqrt_positive(norm2_real)
            norms[(j, l)] = root
            m = join_modes(mode_now, EXACT if isinstance(root, ComplexRational) else "float")
            inv = coerce(1, m) / coerce(root, m)
            picked.append([coerce(x, m) * inv for x in v])
        for i1 in range(len(picked)):
            for i2 in range(i1 + 1, len(picked)):
                ip = coerce(0, mode_now)
                for x, y in zip(picked[i1], picked[i2]):
                    ip = ip + x * conj_s(y)
                gram_res = max(gram_res, abs_s(ip))
        for (j, l), v in cols.items():
            if (j + 1, l + 1) not in S0:
                offS0_res = max(offS0_res, max((abs_s(x) for x in v), default=0.0))
        P = la.gram_schmidt_complete(picked, codim, mode_now)
        W2 = la.conj_transpose(P)
        Ublock = la.identity(N, la.mat_mode(W2))
        for rr in range(codim):
            for cc in range(codim):
                Ublock[n + rr][n + cc] = W2[rr][cc]
        tau_phi = make_isotropy(1, 0, [0] * N, Ublock, N)
        jets = apply_target_gauge(tau_phi, jets)
        tau_matrix = la.mat_mul(tau_phi.matrix.as_lists(), tau_matrix)
    else:
        norms = {}
        gram_res = 0.0
        offS0_res = 0.0
        if k0 > 0:
            raise NormalizationError("positive rank with zero codimension contradicts properness")

    A = a_matrix_of(jets, n)
    mu_final = [real_part(A[j][j]) for j in range(k0)]
    mu_scalars: list[Scalar] = [
        ComplexRational.of(m) if isinstance(m, Fraction) else float(m) for m in mu_final
    ]

    # validations
    residuals = star2_condition_residuals(jets, n, N)
    off_res = max((abs_s(A[j][l]) for j in range(n) for l in range(n) if j != l), default=0.0)
    residuals["a_offdiagonal"] = off_res
    residuals["f_w2"] = max((abs_s(v) for v in _w2_coeffs(jets, n, k0)), default=0.0)
    residuals["a_tail"] = max((abs_s(A[j][j]) for j in range(k0, n)), default=0.0)
    residuals["phi_gram"] = gram_res
    residuals["phi_off_S0"] = offS0_res
    # phi components in final coordinates: phi_s = mu_s z_j z_l + o_wt(2)
    cols2 = quad_columns(jets, n, N)
    phi_form = 0.0
    mu_pairs: dict[tuple[int, int], Scalar] = {}
    for s_idx, (j, l) in enumerate(S):
        expected = norms.get((j, l), coerce(0, mode_now))
        mu_pairs[(j, l)] = expected
        for (jj, ll), v in cols2.items():
            want = expected if (jj + 1, ll + 1) == (j, l) else coerce(0, mode_now)
            phi_form = max(phi_form, abs_s(v[s_idx] - want))
    residuals["phi_normal_form"] = phi_form
    # mu relations of the third normal form
    rel = 0.0
    for (j, l) in S0:
        muj = float(real_part(mu_scalars[j - 1])) if j - 1 < k0 else 0.0
        if j == l and j <= k0:
            want = muj ** 0.5
        elif l <= k0 and j < l:
            mul_ = float(real_part(mu_scalars[l - 1]))
            want = (muj + mul_) ** 0.5
        else:
            want = muj ** 0.5
        rel = max(rel, abs(float(abs_s(mu_pairs[(j, l)])) - want))
    P_bound = k0 * (2 * n - k0 - 1) // 2
    mu_data = MuData(
        kappa0=k0,
        mu=mu_scalars,
        mu_pairs=mu_pairs,
        S0=S0,
        S=S,
        bound_P=P_bound,
        bound_ok=N >= n + P_bound,
        relations_residual=rel,
    )
    return Star3Result(
        jets=jets,
        restricted=restrict_to_heisenberg(jets),
        n=n,
        N=N,
        order=order,
        mode=jets.mode,
        sigma_matrix=sigma_matrix,
        tau_matrix=tau_matrix,
        a_matrix=A,
        mu_data=mu_data,
        residuals=residuals,
        flags=flags,
    )
