"""CR second fundamental form by two routes, their agreement, and flatness.

Frame route: extract q^mu_{alpha beta} from omega^mu_beta = q omega^alpha_0
mod omega^{N+1}_0 by least squares in the chart cobasis at the base point.
Extrinsic route: derivatives of the target defining-function gradient along
tangential CR fields, projected modulo the first-order span E_1(p).
Vanishing of either is equivalent (both are the second fundamental form);
their disagreement is flagged, never silenced.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg as la
from .automorphisms import make_sigma0, make_tauF
from .errors import ChartError, DegenerateFrameError
from .frames import LiftFrame, MCForm, build_general_lift, build_spherical_lift, pullback_mc
from .hermitian import mobius_to_mapspec
from .jets import Jet, cr_field, restrict_to_heisenberg
from .maps import (
    BoundaryPoint,
    MapJets,
    MapSpec,
    identity_jets,
    jets_at,
    map_jets,
    map_value,
    sigma0_mapspec,
)
from .normalization import kappa0 as kappa0_report
from .normalization import normalize_star3
from .sampling import boundary_points
from .scalars import ComplexRational, Scalar, abs_s, coerce, to_complex

VANISH_TOL = 1e-8
RANK_TOL = 1e-6


# -- frame-based tensor -----------------------------------------------------------


@dataclass
class SFFTensor:
    base_point: BoundaryPoint
    n: int
    N: int
    q: list[list[list[Scalar]]]  # q[mu][alpha][beta]
    extraction_residual: float
    symmetry_defect: float
    norm: float
    frame_kind: str
    mode: str
    reduction2_residual: float | None = None

    def q_rank(self, tol: float = RANK_TOL) -> int:
        if self.N == self.n:
            return 0
        rows = []
        for a in range(self.n):
            for b in range(self.n):
                rows.append([self.q[mu][a][b] for mu in range(self.N - self.n)])
        return la.matrix_rank(rows, tol)


@dataclass
class SFFResult:
    tensor: SFFTensor
    frame: LiftFrame
    mc: MCForm
    map_jets: MapJets


def extract_q(mc: MCForm, n: int, N: int, tol: float = 1e-9):
    """Solve omega^mu_beta = q^mu_ab omega^a_0 + c^mu_b omega^{N+1}_0 at the base."""
    keys = mc.keys
    dims = len(keys)

    def vec(r: int, c: int) -> list[Scalar]:
        e = mc.entry(r, c)
        return [e[k].constant_term() for k in keys]

    basis_cols = [vec(a + 1, 0) for a in range(n)] + [vec(N + 1, 0)]
    M = [[basis_cols[c][r] for c in range(n + 1)] for r in range(dims)]
    sv = la.singular_values(M)
    if not sv or min(sv) <= tol:
        raise ChartError("the forms (omega^alpha_0, omega^{N+1}_0) are degenerate at this point")
    q: list[list[list[Scalar]]] = []
    worst = 0.0
    for mu in range(n + 1, N + 1):
        q_mu = [[coerce(0, mc.coeffs["u"][0][0].mode) for _ in range(n)] for _ in range(n)]
        for b in range(n):
            rhs = vec(mu, b + 1)
            x, res = la.lstsq(M, rhs)
            worst = max(worst, res)
            for a in range(n):
                q_mu[a][b] = x[a]
        q.append(q_mu)
    # reorder to q[mu][alpha][beta]
    return q, worst


def sff_from_frame(frame: LiftFrame, mc: MCForm | None = None, tol: float = 1e-9) -> SFFTensor:
    """Second fundamental form extracted from a given adapted lift."""
    mc = mc or pullback_mc(frame)
    n, N = frame.n, frame.N
    q, worst = extract_q(mc, n, N, tol)
    sym = 0.0
    norm = 0.0
    for mu in range(N - n):
        for a in range(n):
            for b in range(n):
                norm = max(norm, abs_s(q[mu][a][b]))
                sym = max(sym, abs_s(q[mu][a][b] - q[mu][b][a]))
    return SFFTensor(
        base_point=frame.base_point,
        n=n,
        N=N,
        q=q,
        extraction_residual=worst,
        symmetry_defect=sym,
        norm=norm,
        frame_kind=frame.kind,
        mode=frame.mode,
    )


def phi_hessian_at_origin(mj: MapJets) -> list[list[list[Scalar]]]:
    """H[mu][a][b] = d^2 phi_mu / dz_a dz_b at 0 from the holomorphic jets."""
    n, N = mj.n, mj.N
    out = []
    for mu in range(N - n):
        jet = mj.holomorphic[n + mu]
        H = [[None] * n for _ in range(n)]
        for a in range(n):
            for b in range(n):
                H[a][b] = jet.diff("z", a).diff("z", b).constant_term()
        out.append(H)
    return out


def sff_frame(
    F: MapSpec,
    p: BoundaryPoint,
    order: int = 4,
    lift: str = "spherical",
    tol: float = 1e-9,
) -> SFFResult:
    """Frame-definition second fundamental form of F(boundary) at p.

    Falls back from the spherical to the general lift when the (f, g) graph
    chart is singular at p; the tensor does not depend on that choice where
    both exist.
    """
    mj = jets_at(F, p, order)
    if lift == "spherical":
        try:
            frame = build_spherical_lift(F, p, order=order)
        except ChartError:
            frame = build_general_lift(mj)
    else:
        frame = build_general_lift(mj)
    mc = pullback_mc(frame)
    tensor = sff_from_frame(frame, mc, tol)
    # when the frame is the identity at the base, q(0) must equal the phi-Hessian
    ident_dev = la.max_abs(la.mat_sub(frame.at_base(), la.identity(frame.N + 2, "exact")))
    if float(ident_dev) <= 1e-9:
        H = phi_hessian_at_origin(mj)
        dev = 0.0
        for mu in range(frame.N - frame.n):
            for a in range(frame.n):
                for b in range(frame.n):
                    dev = max(dev, abs_s(tensor.q[mu][a][b] - H[mu][a][b]))
        tensor.reduction2_residual = float(dev)
    return SFFResult(tensor=tensor, frame=frame, mc=mc, map_jets=mj)


# -- extrinsic tensor ----------------------------------------------------------------


@dataclass
class SpanReport:
    """Basis and dimension of the span E_k(p); E_{k-1} is contained in E_k."""

    k: int
    basis: list[list[complex]]
    dimension: int


@dataclass
class ExtrinsicReport:
    base_point: BoundaryPoint
    n: int
    N: int
    spans: list[SpanReport]  # E_0(p), E_1(p)
    ii_rank: int
    ii_norm: float
    values: list[list[list[complex]]]  # values[a][b] in C^{N+1}, projected mod E1
    mode: str

    @property
    def dim_E1(self) -> int:
        return self.spans[1].dimension

    def vanishes(self, tol: float = VANISH_TOL) -> bool:
        return self.ii_norm <= tol


def sff_extrinsic(F: MapSpec, p: BoundaryPoint, order: int = 4, tol: float = RANK_TOL) -> ExtrinsicReport:
    """Defining-function route: E_k spans and the quotient-valued Hessian.

    Works with the conjugated family (dbar rho) o F and the tangential fields
    L_a; the reported form is the conjugate of the paper's, with identical
    vanishing, norm and rank.
    """
    n, N = F.n, F.N
    mode = F.mode
    sig = sigma0_mapspec(p)
    base_mode = "exact" if p.mode == "exact" and mode == "exact" else "float"
    ident = identity_jets(n, order + 0, base_mode)
    s_jets = map_jets(sig, ident, order, base_mode)
    f_jets = map_jets(F, list(s_jets), order, base_mode)  # F o sigma_p, holomorphic
    restr = restrict_to_heisenberg(f_jets)
    arity = restr[0].n
    grad = [restr[k] for k in range(N)] + [Jet.const(ComplexRational.of(0, Fraction(-1, 2)), arity, order, base_mode)]

    first = [[cr_field(c, a) for c in grad] for a in range(n)]
    second = [[[cr_field(c, b) for c in first[a]] for b in range(n)] for a in range(n)]

    def at0(vecjets) -> list[complex]:
        return [to_complex(j.constant_term()) for j in vecjets]

    e0_rows = [at0(grad)]
    e1_rows = e0_rows + [at0(first[a]) for a in range(n)]
    dim_E0 = la.matrix_rank(e0_rows, tol)
    dim_E1 = la.matrix_rank(e1_rows, tol)
    if dim_E0 != 1:
        raise DegenerateFrameError("E_0(p) is not one-dimensional")
    if dim_E1 < n + 1:
        raise DegenerateFrameError(f"E_1(p) rank {dim_E1} < {n + 1}: degenerate embedding at p")

    A = np.array(e1_rows, dtype=complex)  # rows span E1bar
    values: list[list[list[complex]]] = []
    stacked = []
    norm = 0.0
    for a in range(n):
        row_vals = []
        for b in range(n):
            v = np.array(at0(second[a][b]), dtype=complex)
            coef, *_ = np.linalg.lstsq(A.T, v, rcond=None)
            perp = v - A.T @ coef
            row_vals.append([complex(x) for x in perp.tolist()])
            stacked.append([complex(x) for x in perp.tolist()])
            norm = max(norm, float(np.max(np.abs(perp))) if perp.size else 0.0)
        values.append(row_vals)
    ii_rank = la.matrix_rank(stacked, tol)
    return ExtrinsicReport(
        base_point=p,
        n=n,
        N=N,
        dim_E1=dim_E1,
        ii_rank=ii_rank,
        ii_norm=norm,
        values=values,
        mode=base_mode,
    )


# -- agreement of the definitions ----------------------------------------------------


@dataclass
class EquivalenceReport:
    base_point: BoundaryPoint
    frame_norm: float
    extrinsic_norm: float
    frame_vanishes: bool
    extrinsic_vanishes: bool
    vanish_agree: bool
    frame_rank: int
    extrinsic_rank: int
    rank_agree: bool
    consistent: bool
    tol: float


def check_equivalence(
    F: MapSpec,
    p: BoundaryPoint,
    tol: float = VANISH_TOL,
    order: int = 4,
    rank_tol: float = RANK_TOL,
) -> EquivalenceReport:
    """Vanishing (and rank) agreement between the frame and extrinsic forms."""
    fr = sff_frame(F, p, order=order)
    ext = sff_extrinsic(F, p, order=order, tol=rank_tol)
    fv = fr.tensor.norm <= tol
    ev = ext.ii_norm <= tol
    frank = fr.tensor.q_rank(rank_tol)
    erank = ext.ii_rank
    vanish_agree = fv == ev
    rank_agree = frank == erank
    return EquivalenceReport(
        base_point=p,
        frame_norm=fr.tensor.norm,
        extrinsic_norm=ext.ii_norm,
        frame_vanishes=fv,
        extrinsic_vanishes=ev,
        vanish_agree=vanish_agree,
        frame_rank=frank,
        extrinsic_rank=erank,
        rank_agree=rank_agree,
        consistent=vanish_agree and rank_agree,
        tol=tol,
    )


# -- flatness ---------------------------------------------------------------------------


@dataclass
class FlatnessVerdict:
    verdict: str  # flat | non-flat | inconclusive
    max_sff_norm: float
    kappa0: int | None
    sample_points: list[BoundaryPoint]
    witness: MapSpec | None
    witness_residual: float | None
    diagnostics: list[str] = field(default_factory=list)
    vanish_tol: float = VANISH_TOL
    rank_tol: float = RANK_TOL


def _linear_embedding_matrix(n: int, N: int) -> la.Matrix:
    L = la.zeros(N + 2, n + 2, "exact")
    L[0][0] = coerce(1, "exact")
    for k in range(n):
        L[k + 1][k + 1] = coerce(1, "exact")
    L[N + 1][n + 1] = coerce(1, "exact")
    return L


def flatness_verdict(
    F: MapSpec,
    samples: int = 20,
    seed: int = 0,
    vanish_tol: float = VANISH_TOL,
    rank_tol: float = RANK_TOL,
    order: int = 4,
) -> FlatnessVerdict:
    """Theorem-1.1 pipeline: vanishing SFF => rank zero => linear-fractional witness."""
    n, N = F.n, F.N
    pts = boundary_points(n, samples, seed)
    diagnostics: list[str] = []
    max_norm = 0.0
    for p in pts:
        res = sff_frame(F, p, order=order)
        max_norm = max(max_norm, res.tensor.norm)
        if res.tensor.norm > vanish_tol:
            diagnostics.append(
                f"second fundamental form is nonzero at z={[to_complex(v) for v in p.z]}, "
                f"u={float(abs_s(p.u)):.4g} (|q| = {res.tensor.norm:.3e})"
            )
            return FlatnessVerdict(
                verdict="non-flat",
                max_sff_norm=max_norm,
                kappa0=None,
                sample_points=pts[: pts.index(p) + 1],
                witness=None,
                witness_residual=None,
                diagnostics=diagnostics,
                vanish_tol=vanish_tol,
                rank_tol=rank_tol,
            )
    k0rep = kappa0_report(F, samples=min(samples, 8), seed=seed, tol=rank_tol, order=order)
    if k0rep.kappa0 != 0:
        diagnostics.append(
            f"SFF vanishes within {vanish_tol} but geometric rank is {k0rep.kappa0}: inconclusive"
        )
        return FlatnessVerdict(
            verdict="inconclusive",
            max_sff_norm=max_norm,
            kappa0=k0rep.kappa0,
            sample_points=pts,
            witness=None,
            witness_residual=None,
            diagnostics=diagnostics,
            vanish_tol=vanish_tol,
            rank_tol=rank_tol,
        )
    # build the linear-fractional witness from the full normalization at one point
    p0 = pts[0]
    s3 = normalize_star3(F, p0, rank_tol=rank_tol, order=order)
    sig0 = make_sigma0(p0)
    tau0 = make_tauF(F, p0)
    tau_full = la.mat_mul(s3.tau_matrix, tau0.matrix.as_lists())
    sigma_full = la.mat_mul(sig0.matrix.as_lists(), s3.sigma_matrix)
    W = la.mat_mul(
        la.mat_mul(la.inverse(tau_full), _linear_embedding_matrix(n, N)),
        la.inverse(sigma_full),
    )
    witness = mobius_to_mapspec(W, n, name="flatness-witness")
    fresh = boundary_points(n, 20, seed + 1)
    residual = 0.0
    for q in fresh:
        try:
            got = map_value(witness, list(q.z), q.w)
            want = map_value(F, list(q.z), q.w)
        except Exception:
            diagnostics.append("witness evaluation hit a pole at a fresh sample point")
            continue
        residual = max(residual, max(float(abs_s(a - b)) for a, b in zip(got, want)))
    if residual <= vanish_tol:
        return FlatnessVerdict(
            verdict="flat",
            max_sff_norm=max_norm,
            kappa0=0,
            sample_points=pts,
            witness=witness,
            witness_residual=residual,
            diagnostics=diagnostics,
            vanish_tol=vanish_tol,
            rank_tol=rank_tol,
        )
    diagnostics.append(
        f"SFF vanishes and rank is zero but the witness residual is {residual:.3e} > {vanish_tol}"
    )
    return FlatnessVerdict(
        verdict="inconclusive",
        max_sff_norm=max_norm,
        kappa0=0,
        sample_points=pts,
        witness=witness,
        witness_residual=residual,
        diagnostics=diagnostics,
        vanish_tol=vanish_tol,
        rank_tol=rank_tol,
    )
