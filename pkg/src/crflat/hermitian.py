"""Signature-(N+1,1) Hermitian product, Q-frames, group membership, Moebius action.

The quadric Q in C^{N+2} is <Z, Z> = 0 for
<Z, Z'> = sum_A Z^A conj(Z'^A) + (i/2)(Z^{N+1} conj(Z'^0) - Z^0 conj(Z'^{N+1})),
linear in Z, anti-linear in Z'.  Index 0 and N+1 are the null slots, 1..N the
positive block.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import expr as ex
from . import linalg as la
from .errors import DimensionError, MathDomainError, PointAtInfinityError
from .jets import Jet
from .maps import SIEGEL, MapSpec
from .scalars import (
    EXACT,
    FLOAT,
    ComplexRational,
    Scalar,
    abs_s,
    coerce,
    conj_s,
    imag_part,
    join_modes,
    real_part,
)

HALF_I = ComplexRational.of(0, Fraction(1, 2))


def gram_matrix(N: int, mode: str = EXACT) -> la.Matrix:
    """Matrix J with <Z, Z'> = (Z')^dagger J Z."""
    k = N + 2
    J = la.zeros(k, k, mode)
    for A in range(1, N + 1):
        J[A][A] = coerce(1, mode)
    J[0][N + 1] = coerce(HALF_I, mode)
    J[N + 1][0] = coerce(-HALF_I, mode)
    return J


def form_eval(Z, Zp):
    """Hermitian scalar product <Z, Z'>; works on scalar and jet vectors."""
    if len(Z) != len(Zp):
        raise DimensionError(f"vector dimensions differ: {len(Z)} vs {len(Zp)}")
    N = len(Z) - 2
    if N < 0:
        raise DimensionError("vectors must have dimension at least 2")

    def cj(x):
        return x.conj() if isinstance(x, Jet) else conj_s(x)

    total = Z[len(Z) - 1] * cj(Zp[0]) - Z[0] * cj(Zp[len(Z) - 1])
    total = total * HALF_I if isinstance(total, Jet) else coerce(HALF_I, _mode_of_pair(Z, Zp)) * total
    for A in range(1, N + 1):
        total = total + Z[A] * cj(Zp[A])
    return total


def _mode_of_pair(Z, Zp) -> str:
    modes = []
    for v in list(Z) + list(Zp):
        if isinstance(v, Jet):
            modes.append(v.mode)
        else:
            modes.append(EXACT if isinstance(v, ComplexRational) else FLOAT)
    return join_modes(*modes)


def hat_reduction(Z):
    """Vector hat(Z) with <Z, Z'> = <hat(Z), Z'>_0 for the standard product.

    hat(Z) = ((i/2) Z^{N+1}, Z^A, -(i/2) Z^0); applying it twice scales the
    two null slots by 1/4 and fixes the middle block.
    """
    last = len(Z) - 1

    def mul(x, s):
        return x.scale(s) if isinstance(x, Jet) else coerce(s, EXACT if isinstance(x, ComplexRational) else FLOAT) * x

    return [mul(Z[last], HALF_I)] + [Z[A] for A in range(1, last)] + [mul(Z[0], -HALF_I)]


def standard_inner(Z, Zp):
    """Usual Hermitian inner product <Z, Z'>_0 = sum Z_k conj(Z'_k)."""
    def cj(x):
        return x.conj() if isinstance(x, Jet) else conj_s(x)

    total = Z[0] * cj(Zp[0])
    for k in range(1, len(Z)):
        total = total + Z[k] * cj(Zp[k])
    return total


@dataclass(frozen=True)
class MembershipResult:
    is_su: bool
    is_glq: bool
    scale: Scalar
    det: Scalar
    residual_su: float
    residual_glq: float
    det_residual: float

    def as_dict(self) -> dict:
        from .scalars import format_scalar

        return {
            "is_su": self.is_su,
            "is_glq": self.is_glq,
            "scale": format_scalar(self.scale),
            "det": format_scalar(self.det),
            "residual_su": self.residual_su,
            "residual_glq": self.residual_glq,
            "det_residual": self.det_residual,
        }


def membership(A: la.Matrix, tol: float = 1e-10) -> MembershipResult:
    """Test A^dagger J A = J (SU, with det 1) and A^dagger J A = c J (GL^Q)."""
    k = len(A)
    if any(len(row) != k for row in A):
        raise DimensionError("membership requires a square matrix")
    N = k - 2
    mode = la.mat_mode(A)
    J = gram_matrix(N, mode)
    H = la.mat_mul(la.mat_mul(la.conj_transpose(A), J), A)
    d = la.det(A)
    if abs_s(d) <= tol:
        raise MathDomainError("membership test on a singular matrix")
    res_su = la.max_abs(la.mat_sub(H, J))
    det_res = abs_s(d - coerce(1, mode))
    # GL^Q scale read from a middle-block diagonal entry
    c = H[1][1] if N >= 1 else H[0][k - 1] * coerce(ComplexRational.of(0, -2), mode)
    c_real = real_part(c)
    c_imag_ok = abs(float(imag_part(c))) <= tol * max(1.0, abs(float(c_real)))
    res_glq = la.max_abs(la.mat_sub(H, la.mat_scale(J, c)))
    if mode == EXACT:
        is_su = res_su == 0.0 and det_res == 0.0
        is_glq = res_glq == 0.0 and imag_part(c) == 0 and real_part(c) > 0
    else:
        is_su = res_su <= tol and det_res <= tol
        is_glq = res_glq <= tol and c_imag_ok and float(c_real) > 0
    return MembershipResult(is_su, is_glq, c, d, float(res_su), float(res_glq), float(det_res))


@dataclass(frozen=True)
class FrameMatrix:
    """(N+2)x(N+2) complex matrix with its Q-frame membership residuals."""

    entries: tuple[tuple[Scalar, ...], ...]
    tol: float = 1e-10

    @staticmethod
    def of(rows: la.Matrix, tol: float = 1e-10) -> "FrameMatrix":
        return FrameMatrix(tuple(tuple(r) for r in rows), tol)

    @property
    def N(self) -> int:
        return len(self.entries) - 2

    @property
    def mode(self) -> str:
        return la.mat_mode(self.as_lists())

    def as_lists(self) -> la.Matrix:
        return [list(r) for r in self.entries]

    def membership(self) -> MembershipResult:
        return membership(self.as_lists(), self.tol)

    def is_qframe(self) -> bool:
        m = self.membership()
        return m.is_su


def mobius_action(A: la.Matrix, point) -> list[Scalar]:
    """Projective action in non-homogeneous coordinates.

    Accepts an affine point (length N+1, chart z_0 = 1) and returns an affine
    point; a homogeneous point (length N+2) is mapped linearly.
    """
    k = len(A)
    pt = list(point)
    if len(pt) == k:
        return la.mat_vec(A, pt)
    if len(pt) != k - 1:
        raise DimensionError(f"point has length {len(pt)}, expected {k - 1} or {k}")
    mode = join_modes(la.mat_mode(A), la.mat_mode([pt]))
    hom = [coerce(1, mode)] + [coerce(v, mode) for v in pt]
    image = la.mat_vec(A, hom)
    denom = image[0]
    if abs_s(denom) == 0:
        raise PointAtInfinityError("chart denominator vanishes under the Moebius action")
    inv = coerce(1, mode) / denom
    return [v * inv for v in image[1:]]


def mobius_to_mapspec(A: la.Matrix, n_source: int, name: str | None = None) -> MapSpec:
    """Rational map realized by a matrix in non-homogeneous coordinates.

    Rectangular (N+2) x (n_source+2) matrices are allowed; they realize
    linear-fractional embeddings.
    """
    rows = len(A)
    cols = len(A[0])
    if cols != n_source + 2:
        raise DimensionError(f"matrix has {cols} columns, expected {n_source + 2}")
    N_target = rows - 2

    def row_expr(row) -> ex.Expr:
        acc: ex.Expr | None = None
        for j, coeff in enumerate(row):
            if abs_s(coeff) == 0:
                continue
            if j == 0:
                term: ex.Expr = ex.scalar_to_expr(coeff)
            else:
                var = ex.Var(f"z{j}") if j <= n_source else ex.Var("w")
                one_like = coeff == coerce(1, EXACT) if isinstance(coeff, ComplexRational) else False
                term = var if one_like else ex.Mul(ex.scalar_to_expr(coeff), var)
            acc = term if acc is None else ex.Add(acc, term)
        return acc if acc is not None else ex.Num(Fraction(0))

    denom = row_expr(A[0])
    trivial_denom = (
        abs_s(A[0][0] - coerce(1, la.mat_mode(A))) == 0
        and all(abs_s(v) == 0 for v in A[0][1:])
    )
    comps = []
    for r in range(1, rows):
        num = row_expr(A[r])
        comps.append(num if trivial_denom else ex.Div(num, denom))
    return MapSpec(SIEGEL, n_source, N_target, tuple(comps), name)
