"""First-order adapted lifts into SU(N+1,1) and their Maurer-Cartan forms.

A lift is an (N+2)x(N+2) matrix of jets over the source chart (z, zbar, u)
around a translated base point: columns (e_0 | e_alpha | e_mu | e_{N+1}).
e_0 is the graph of the map, e_alpha come from tangential CR derivatives,
e_{N+1} corrects the Reeb derivative, and e_mu complete to a Q-frame.  The
Maurer-Cartan form omega = e^{-1} de is stored by its coefficient jets over
the chart cobasis (dz_alpha, dzbar_alpha, du).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg as la
from .automorphisms import Automorphism
from .errors import ChartError, DegenerateFrameError, JetOrderError
from .hermitian import form_eval, gram_matrix
from .jets import Jet, cr_field, reeb_field
from .maps import BoundaryPoint, MapJets, MapSpec, jets_at
from .scalars import ComplexRational, abs_s, coerce, join_modes

JetMatrix = list[list[Jet]]

HALF_I = ComplexRational.of(0, Fraction(1, 2))
MINUS_HALF_I = ComplexRational.of(0, Fraction(-1, 2))


# -- jet matrix helpers --------------------------------------------------------


def jmat_mul(A: JetMatrix, B: JetMatrix) -> JetMatrix:
    rows, inner, cols = len(A), len(B), len(B[0])
    out = []
    for r in range(rows):
        row = []
        for c in range(cols):
            acc = A[r][0] * B[0][c]
            for k in range(1, inner):
                acc = acc + A[r][k] * B[k][c]
            row.append(acc)
        out.append(row)
    return out


def jmat_scalar_mul(S: la.Matrix, B: JetMatrix) -> JetMatrix:
    rows, inner, cols = len(S), len(B), len(B[0])
    out = []
    for r in range(rows):
        row = []
        for c in range(cols):
            acc = B[0][c].scale(S[r][0])
            for k in range(1, inner):
                acc = acc + B[k][c].scale(S[r][k])
            row.append(acc)
        out.append(row)
    return out


def jmat_inverse(M: JetMatrix) -> JetMatrix:
    """Gauss-Jordan over the jet ring; pivots need invertible constant terms."""
    k = len(M)
    n, order, mode = M[0][0].n, min(j.order for r in M for j in r), M[0][0].mode
    work = [[M[r][c] for c in range(k)] + [Jet.const(1 if c == r else 0, n, order, mode) for c in range(k)] for r in range(k)]
    for col in range(k):
        pivot = max(range(col, k), key=lambda r: abs_s(work[r][col].constant_term()))
        if abs_s(work[pivot][col].constant_term()) == 0:
            raise DegenerateFrameError("jet matrix is singular at the base point")
        work[col], work[pivot] = work[pivot], work[col]
        inv = work[col][col].inverse()
        work[col] = [x * inv for x in work[col]]
        for r in range(k):
            if r == col:
                continue
            factor = work[r][col]
            if factor.is_zero():
                continue
            work[r] = [work[r][c] - factor * work[col][c] for c in range(2 * k)]
    return [[work[r][k + c] for c in range(k)] for r in range(k)]


def jmat_det(M: JetMatrix) -> Jet:
    k = len(M)
    n, order, mode = M[0][0].n, min(j.order for r in M for j in r), M[0][0].mode
    work = [[M[r][c] for c in range(k)] for r in range(k)]
    det = Jet.const(1, n, order, mode)
    for col in range(k):
        pivot = max(range(col, k), key=lambda r: abs_s(work[r][col].constant_term()))
        if abs_s(work[pivot][col].constant_term()) == 0:
            raise DegenerateFrameError("jet matrix has vanishing determinant at the base point")
        if pivot != col:
            work[col], work[pivot] = work[pivot], work[col]
            det = -det
        det = det * work[col][col]
        inv = work[col][col].inverse()
        for r in range(col + 1, k):
            factor = work[r][col] * inv
            if factor.is_zero():
                continue
            work[r] = [work[r][c] - factor * work[col][c] for c in range(k)]
    return det


def jmat_diff(M: JetMatrix, kind: str, index: int = 0) -> JetMatrix:
    return [[entry.diff(kind, index) for entry in row] for row in M]


def jmat_at_base(M: JetMatrix) -> la.Matrix:
    return [[entry.constant_term() for entry in row] for row in M]


# -- lift frames -----------------------------------------------------------------


@dataclass
class LiftFrame:
    n: int
    N: int
    order: int
    mode: str
    base_point: BoundaryPoint
    entries: JetMatrix
    kind: str
    residuals: dict[str, float] = field(default_factory=dict)
    direct_orthonormal: bool | None = None

    def column(self, c: int) -> list[Jet]:
        return [self.entries[r][c] for r in range(len(self.entries))]

    def at_base(self) -> la.Matrix:
        return jmat_at_base(self.entries)

    def qframe_residual_jets(self) -> float:
        """Max deviation of the scalar products from the Q-frame table, as jets."""
        return _qframe_residual(self.entries, self.N, at_base=False)

    def qframe_residual_base(self) -> float:
        return _qframe_residual(self.entries, self.N, at_base=True)

    def qframe_product_table(self) -> list[list[float]]:
        """Per-pair deviations of <E_j, E_k> from the Q-frame table at the base."""
        J = gram_matrix(self.N, "exact")
        k = self.N + 2
        cols = [self.column(c) for c in range(k)]
        table = []
        for j in range(k):
            row = []
            for l in range(k):
                prod = form_eval(cols[j], cols[l])
                row.append(float(abs_s(prod.constant_term() - coerce(J[l][j], prod.mode))))
            table.append(row)
        return table


def _qframe_residual(entries: JetMatrix, N: int, at_base: bool) -> float:
    J = gram_matrix(N, "exact")
    worst = 0.0
    k = N + 2
    cols = [[entries[r][c] for r in range(k)] for c in range(k)]
    for j in range(k):
        for l in range(k):
            prod = form_eval(cols[j], cols[l])
            expected = J[l][j]
            dev = prod - Jet.const(expected, prod.n, prod.order, prod.mode)
            worst = max(worst, abs_s(dev.constant_term()) if at_base else dev.max_abs())
    return worst


def _sqrt_norm(col: list[Jet]) -> Jet:
    norm2 = form_eval(col, col)
    return norm2.sqrt()


def _scale_col(col: list[Jet], factor: Jet) -> list[Jet]:
    return [c * factor for c in col]


def _axpy(col: list[Jet], coeff: Jet, other: list[Jet]) -> list[Jet]:
    return [a - coeff * b for a, b in zip(col, other)]


def build_lift_from_jets(mj: MapJets, kind: str = "spherical", tol: float = 1e-10) -> LiftFrame:
    """Shared constructive core for the general and spherical lifts."""
    n, N = mj.n, mj.N
    R = mj.restricted
    order = R.order
    mode = R.mode
    arity = R[0].n

    e0: list[Jet] = [Jet.const(1, arity, order, mode)] + list(R)

    # tangential CR derivatives
    et = []
    for beta in range(n):
        et.append([Jet.zero(arity, order - 2, mode)] + [cr_field(c, beta) for c in R])

    gram = [[form_eval(et[a], et[b]) for b in range(n)] for a in range(n)]
    off = max((gram[a][b].max_abs() for a in range(n) for b in range(n) if a != b), default=0.0)
    direct_ok = off <= tol

    e_alpha: list[list[Jet]] = []
    if kind == "spherical" and direct_ok:
        for a in range(n):
            e_alpha.append(_scale_col(et[a], _sqrt_norm(et[a]).inverse()))
    else:
        work = [list(c) for c in et]
        for a in range(n):
            v = work[a]
            for b in range(a):
                v = _axpy(v, form_eval(v, e_alpha[b]), e_alpha[b])
            norm2 = form_eval(v, v)
            if float(abs_s(norm2.constant_term())) <= tol:
                raise DegenerateFrameError("CR tangent vectors are degenerate at the base point")
            e_alpha.append(_scale_col(v, norm2.sqrt().inverse()))

    # Reeb direction and the last column
    et_n1 = [reeb_field(c) for c in e0]
    pairing = form_eval(et_n1, e0)
    if abs_s(pairing.constant_term()) <= tol:
        raise DegenerateFrameError("degenerate Reeb pairing <E~_{N+1}, E_0> = 0")
    C = pairing.inverse().scale(HALF_I)
    B = [-(C * form_eval(et_n1, e_alpha[a])) for a in range(n)]
    self_prod = form_eval(et_n1, et_n1)
    imA = Jet.zero(arity, self_prod.order, mode)
    for a in range(n):
        imA = imA + B[a] * B[a].conj()
    imA = imA - C * C.conj() * self_prod
    A_coeff = imA.scale(ComplexRational.of(0, 1))  # Re(A) = 0 by convention
    e_n1 = [A_coeff * x0 + sum_cols(B, e_alpha, r) + C * et_n1[r] for r, x0 in enumerate(e0)]

    # complete with e_mu columns
    frame_cols: list[list[Jet]] = [e0] + e_alpha + [e_n1]
    mu_cols: list[list[Jet]] = []
    min_order = min(j.order for col in frame_cols for j in col)
    for cand_idx in range(N + 2):
        if len(mu_cols) == N - n:
            break
        cand = [Jet.const(1 if r == cand_idx else 0, arity, min_order, mode) for r in range(N + 2)]
        known = frame_cols + mu_cols
        K = [[form_eval(known[j], known[kk]) for j in range(len(known))] for kk in range(len(known))]
        rhs = [[form_eval(cand, known[kk])] for kk in range(len(known))]
        coeffs = _jet_solve(K, rhs)
        for j, colj in enumerate(known):
            cand = _axpy(cand, coeffs[j][0], colj)
        norm2 = form_eval(cand, cand)
        if float(abs_s(norm2.constant_term())) < 0.25:
            continue
        mu_cols.append(_scale_col(cand, norm2.sqrt().inverse()))
    if len(mu_cols) != N - n:
        raise DegenerateFrameError("Q-frame completion failed: rank deficiency in the complement")

    columns = [e0] + e_alpha + mu_cols + [e_n1]
    entries: JetMatrix = [[columns[c][r] for c in range(N + 2)] for r in range(N + 2)]

    # force det == 1 exactly by a unit scalar on one companion column
    d = jmat_det(entries)
    fix_col = N if N > n else n
    inv_d = d.inverse()
    for r in range(N + 2):
        entries[r][fix_col] = entries[r][fix_col] * inv_d

    frame = LiftFrame(
        n=n,
        N=N,
        order=order,
        mode=join_modes(*(j.mode for row in entries for j in row)),
        base_point=mj.base_point,
        entries=entries,
        kind=kind,
        direct_orthonormal=direct_ok if kind == "spherical" else None,
    )
    frame.residuals = {
        "qframe_base": frame.qframe_residual_base(),
        "qframe_jets": frame.qframe_residual_jets(),
        "det_base": float(abs_s(jmat_det(entries).constant_term() - coerce(1, frame.mode))),
        "span_t10": _span_residual(frame, et, first_order=True),
        "span_full": _span_residual(frame, [et_n1], first_order=False),
        "e0_isotropic": form_eval(e0, e0).max_abs(),
    }
    return frame


def sum_cols(coeffs: list[Jet], cols: list[list[Jet]], r: int) -> Jet:
    acc = None
    for c, col in zip(coeffs, cols):
        term = c * col[r]
        acc = term if acc is None else acc + term
    if acc is None:
        raise ValueError("empty column combination")
    return acc


def _jet_solve(K: list[list[Jet]], B: list[list[Jet]]) -> list[list[Jet]]:
    """Solve K X = B over the jet ring (K constant-term invertible)."""
    k = len(K)
    cols = len(B[0])
    work = [[K[r][c] for c in range(k)] + [B[r][c] for c in range(cols)] for r in range(k)]
    for col in range(k):
        pivot = max(range(col, k), key=lambda r: abs_s(work[r][col].constant_term()))
        if abs_s(work[pivot][col].constant_term()) == 0:
            raise DegenerateFrameError("singular pairing matrix in frame completion")
        work[col], work[pivot] = work[pivot], work[col]
        inv = work[col][col].inverse()
        work[col] = [x * inv for x in work[col]]
        for r in range(k):
            if r == col:
                continue
            factor = work[r][col]
            if factor.is_zero():
                continue
            work[r] = [work[r][c] - factor * work[col][c] for c in range(k + cols)]
    return [[work[r][k + c] for c in range(cols)] for r in range(k)]


def _span_residual(frame: LiftFrame, extra_cols: list[list[Jet]], first_order: bool) -> float:
    """Rank-based span check at the base point.

    first_order: span(e_0, e_alpha) must contain the raw CR derivatives.
    otherwise: span(e_0, e_alpha, e_{N+1}) must contain the raw Reeb derivative.
    """
    base = frame.at_base()
    k = frame.N + 2
    idx = [0] + list(range(1, frame.n + 1)) + ([] if first_order else [k - 1])
    cols = [[base[r][c] for r in range(k)] for c in idx]
    M = la.to_numpy([[cols[c][r] for c in range(len(cols))] for r in range(k)])
    worst = 0.0
    for ec in extra_cols:
        v = la.to_numpy([[x.constant_term()] for x in ec])[:, 0]
        coef, *_ = np.linalg.lstsq(M, v, rcond=None)
        worst = max(worst, float(np.linalg.norm(M @ coef - v)))
    return worst


def build_general_lift(mj: MapJets, tol: float = 1e-10) -> LiftFrame:
    """Adapted lift by the direct construction (Gram-Schmidt on all CR columns)."""
    return build_lift_from_jets(mj, kind="general", tol=tol)


def build_spherical_lift(F: MapSpec, p: BoundaryPoint, order: int = 4, tol: float = 1e-10) -> LiftFrame:
    """Adapted lift along F(boundary) using the graph structure of (f, g)."""
    mj = jets_at(F, p, order)
    # chart precondition: the (f, g) Jacobian at the base point
    jac = la.zeros(F.n + 1, F.n + 1, mj.mode)
    for r in range(F.n):
        for c in range(F.n):
            jac[r][c] = mj.holomorphic[r].coefficient_of(_unit_exp(F.n, c))
        jac[r][F.n] = mj.holomorphic[r].coefficient_of((0,) * F.n, None, 1)
    for c in range(F.n):
        jac[F.n][c] = mj.holomorphic[F.N].coefficient_of(_unit_exp(F.n, c))
    jac[F.n][F.n] = mj.holomorphic[F.N].coefficient_of((0,) * F.n, None, 1)
    if abs_s(la.det(jac)) <= tol:
        raise ChartError("(f, g) Jacobian is singular at the chart point; choose another point")
    return build_lift_from_jets(mj, kind="spherical", tol=tol)


def _unit_exp(n: int, j: int) -> tuple[int, ...]:
    return tuple(1 if k == j else 0 for k in range(n))


def transport_lift(aut: Automorphism, frame: LiftFrame) -> LiftFrame:
    """Pull a lift of A*(M) back to a lift of M: s = A^{-1} . s~ (same chart)."""
    if aut.dim != frame.N:
        raise DegenerateFrameError("automorphism dimension does not match the frame")
    Ainv = la.inverse(aut.matrix.as_lists())
    entries = jmat_scalar_mul(Ainv, frame.entries)
    out = LiftFrame(
        n=frame.n,
        N=frame.N,
        order=frame.order,
        mode=join_modes(*(j.mode for row in entries for j in row)),
        base_point=frame.base_point,
        entries=entries,
        kind="transported",
        direct_orthonormal=frame.direct_orthonormal,
    )
    out.residuals = {
        "qframe_base": out.qframe_residual_base(),
        "qframe_jets": out.qframe_residual_jets(),
    }
    return out


# -- Maurer-Cartan form ------------------------------------------------------------


VarKey = str  # "z1".."zn", "zb1".."zbn", "u"


@dataclass
class MCForm:
    n: int
    N: int
    coeffs: dict[VarKey, JetMatrix]

    @property
    def keys(self) -> list[VarKey]:
        return [f"z{k + 1}" for k in range(self.n)] + [f"zb{k + 1}" for k in range(self.n)] + ["u"]

    def entry(self, r: int, c: int) -> dict[VarKey, Jet]:
        return {k: self.coeffs[k][r][c] for k in self.keys}

    def conj_entry(self, r: int, c: int) -> dict[VarKey, Jet]:
        """Conjugate 1-form: swaps dz and dzbar coefficients, conjugates jets."""
        out: dict[VarKey, Jet] = {}
        for k in range(self.n):
            out[f"z{k + 1}"] = self.coeffs[f"zb{k + 1}"][r][c].conj()
            out[f"zb{k + 1}"] = self.coeffs[f"z{k + 1}"][r][c].conj()
        out["u"] = self.coeffs["u"][r][c].conj()
        return out


def _form_abs(form: dict[VarKey, Jet], at_base: bool) -> float:
    if at_base:
        return max((abs_s(j.constant_term()) for j in form.values()), default=0.0)
    return max((j.max_abs() for j in form.values()), default=0.0)


def _form_add(*forms: dict[VarKey, Jet]) -> dict[VarKey, Jet]:
    keys = forms[0].keys()
    return {k: _sum_jets([f[k] for f in forms]) for k in keys}


def _sum_jets(js: list[Jet]) -> Jet:
    acc = js[0]
    for j in js[1:]:
        acc = acc + j
    return acc


def _form_scale(form: dict[VarKey, Jet], s) -> dict[VarKey, Jet]:
    return {k: v.scale(s) for k, v in form.items()}


def pullback_mc(frame: LiftFrame) -> MCForm:
    """omega = e^{-1} de as coefficient jets over the chart cobasis."""
    inv = jmat_inverse(frame.entries)
    coeffs: dict[VarKey, JetMatrix] = {}
    for k in range(frame.n):
        coeffs[f"z{k + 1}"] = jmat_mul(inv, jmat_diff(frame.entries, "z", k))
        coeffs[f"zb{k + 1}"] = jmat_mul(inv, jmat_diff(frame.entries, "zbar", k))
    coeffs["u"] = jmat_mul(inv, jmat_diff(frame.entries, "u"))
    return MCForm(n=frame.n, N=frame.N, coeffs=coeffs)


def mc_relation_residuals(mc: MCForm, at_base: bool = True) -> dict[str, float]:
    """Deviations from the SU(N+1,1) Maurer-Cartan relations (and omega^mu_0 = 0)."""
    n, N = mc.n, mc.N
    last = N + 1
    res: dict[str, float] = {}
    res["mc_00_plus_conj_N1N1"] = _form_abs(_form_add(mc.entry(0, 0), mc.conj_entry(last, last)), at_base)
    worst = 0.0
    for A in range(1, N + 1):
        dev = _form_add(mc.entry(last, A), _form_scale(mc.conj_entry(A, 0), ComplexRational.of(0, -2)))
        worst = max(worst, _form_abs(dev, at_base))
    res["mc_N1A_eq_2i_conj_A0"] = worst
    worst = 0.0
    for A in range(1, N + 1):
        dev = _form_add(mc.entry(A, last), _form_scale(mc.conj_entry(0, A), HALF_I))
        worst = max(worst, _form_abs(dev, at_base))
    res["mc_AN1_eq_minus_half_i_conj_0A"] = worst
    worst = 0.0
    for A in range(1, N + 1):
        for Bb in range(1, N + 1):
            dev = _form_add(mc.entry(A, Bb), mc.conj_entry(Bb, A))
            worst = max(worst, _form_abs(dev, at_base))
    res["mc_block_skew"] = worst
    trace = mc.entry(0, 0)
    for A in range(1, N + 1):
        trace = _form_add(trace, mc.entry(A, A))
    trace = _form_add(trace, mc.entry(last, last))
    res["mc_trace"] = _form_abs(trace, at_base)
    worst = 0.0
    for mu in range(n + 1, N + 1):
        worst = max(worst, _form_abs(mc.entry(mu, 0), at_base))
    res["mc_mu0_zero"] = worst
    theta = mc.entry(last, 0)
    theta_conj = mc.conj_entry(last, 0)
    res["mc_theta_real"] = _form_abs(
        {k: theta[k] - theta_conj[k] for k in theta}, at_base
    )
    res["mc_0N1_real"] = _form_abs(
        {k: mc.entry(0, last)[k] - mc.conj_entry(0, last)[k] for k in mc.entry(0, last)}, at_base
    )
    return res


def mc_curvature_residual(mc: MCForm) -> float:
    """Max norm of d omega + omega ^ omega at the base point over cobasis pairs.

    Needs jets of order >= 2 in the omega coefficients; build the frame with
    truncation order >= 6.
    """
    keys = mc.keys

    def diff_key(M: JetMatrix, key: VarKey) -> JetMatrix:
        if key == "u":
            return jmat_diff(M, "u")
        if key.startswith("zb"):
            return jmat_diff(M, "zbar", int(key[2:]) - 1)
        return jmat_diff(M, "z", int(key[1:]) - 1)

    worst = 0.0
    for i1, k1 in enumerate(keys):
        for k2 in keys[i1 + 1 :]:
            try:
                d_part = [
                    [a.constant_term() - b.constant_term() for a, b in zip(ra, rb)]
                    for ra, rb in zip(diff_key(mc.coeffs[k2], k1), diff_key(mc.coeffs[k1], k2))
                ]
            except JetOrderError as exc:
                raise JetOrderError(
                    "curvature check needs frame truncation order >= 6"
                ) from exc
            w1 = jmat_at_base(mc.coeffs[k1])
            w2 = jmat_at_base(mc.coeffs[k2])
            wedge = la.mat_sub(la.mat_mul(w1, w2), la.mat_mul(w2, w1))
            total = [[d_part[r][c] + wedge[r][c] for c in range(len(w1))] for r in range(len(w1))]
            worst = max(worst, la.max_abs(total))
    return worst
