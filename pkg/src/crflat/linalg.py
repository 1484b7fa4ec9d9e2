"""Small dense linear algebra over exact Gaussian rationals and floats.

Matrix sizes here are (N+2) x (N+2) at most, so plain Gauss-Jordan with exact
pivots is entirely adequate.  Float paths delegate to numpy.
"""
from __future__ import annotations

import numpy as np

from .errors import MathDomainError
from .scalars import (
    EXACT,
    FLOAT,
    ComplexRational,
    Scalar,
    abs_s,
    coerce,
    conj_s,
    join_modes,
    to_complex,
)

Matrix = list[list[Scalar]]
Vector = list[Scalar]


def mat_mode(A: Matrix) -> str:
    return join_modes(*(join_modes(*(("exact" if isinstance(x, ComplexRational) else "float") for x in row)) for row in A))


def zeros(rows: int, cols: int, mode: str) -> Matrix:
    return [[coerce(0, mode) for _ in range(cols)] for _ in range(rows)]


def identity(k: int, mode: str) -> Matrix:
    M = zeros(k, k, mode)
    for j in range(k):
        M[j][j] = coerce(1, mode)
    return M


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    mode = join_modes(mat_mode(A), mat_mode(B))
    rows, inner, cols = len(A), len(B), len(B[0])
    out = zeros(rows, cols, mode)
    for r in range(rows):
        for c in range(cols):
            acc = coerce(0, mode)
            for k in range(inner):
                acc = acc + coerce(A[r][k], mode) * coerce(B[k][c], mode)
            out[r][c] = acc
    return out


def mat_vec(A: Matrix, v: Vector) -> Vector:
    mode = join_modes(mat_mode(A), mat_mode([v]))
    return [
        sum((coerce(A[r][k], mode) * coerce(v[k], mode) for k in range(len(v))), coerce(0, mode))
        for r in range(len(A))
    ]


def conj_transpose(A: Matrix) -> Matrix:
    return [[conj_s(A[r][c]) for r in range(len(A))] for c in range(len(A[0]))]


def mat_sub(A: Matrix, B: Matrix) -> Matrix:
    mode = join_modes(mat_mode(A), mat_mode(B))
    return [
        [coerce(A[r][c], mode) - coerce(B[r][c], mode) for c in range(len(A[0]))]
        for r in range(len(A))
    ]


def mat_scale(A: Matrix, s: Scalar) -> Matrix:
    return [[x * s for x in row] for row in A]


def max_abs(A: Matrix) -> float:
    return max((abs_s(x) for row in A for x in row), default=0.0)


def to_numpy(A: Matrix) -> np.ndarray:
    return np.array([[to_complex(x) for x in row] for row in A], dtype=complex)


def from_numpy(A: np.ndarray) -> Matrix:
    return [[complex(x) for x in row] for row in A.tolist()]


def det(A: Matrix) -> Scalar:
    mode = mat_mode(A)
    if mode == FLOAT:
        return complex(np.linalg.det(to_numpy(A)))
    M = [row[:] for row in A]
    k = len(M)
    result = coerce(1, EXACT)
    for col in range(k):
        pivot = None
        for r in range(col, k):
            if not M[r][col].is_zero():
                pivot = r
                break
        if pivot is None:
            return coerce(0, EXACT)
        if pivot != col:
            M[col], M[pivot] = M[pivot], M[col]
            result = -result
        p = M[col][col]
        result = result * p
        inv_p = coerce(1, EXACT) / p
        for r in range(col + 1, k):
            factor = M[r][col] * inv_p
            if factor.is_zero():
                continue
            M[r] = [M[r][c] - factor * M[col][c] for c in range(k)]
    return result


def solve(A: Matrix, B: Matrix) -> Matrix:
    """Solve A X = B for X (B given column-stacked as a matrix)."""
    mode = join_modes(mat_mode(A), mat_mode(B))
    if mode == FLOAT:
        X = np.linalg.solve(to_numpy(A), to_numpy(B))
        return from_numpy(X)
    k = len(A)
    M = [[coerce(A[r][c], EXACT) for c in range(k)] + [coerce(B[r][c], EXACT) for c in range(len(B[0]))] for r in range(k)]
    cols = len(B[0])
    for col in range(k):
        pivot = None
        for r in range(col, k):
            if not M[r][col].is_zero():
                pivot = r
                break
        if pivot is None:
            raise MathDomainError("singular exact linear system")
        M[col], M[pivot] = M[pivot], M[col]
        inv_p = coerce(1, EXACT) / M[col][col]
        M[col] = [x * inv_p for x in M[col]]
        for r in range(k):
            if r == col or M[r][col].is_zero():
                continue
            factor = M[r][col]
            M[r] = [M[r][c] - factor * M[col][c] for c in range(k + cols)]
    return [[M[r][k + c] for c in range(cols)] for r in range(k)]


def inverse(A: Matrix) -> Matrix:
    return solve(A, identity(len(A), mat_mode(A)))


def lstsq(A: Matrix, b: Vector) -> tuple[Vector, float]:
    """Least squares min ||A x - b||_2; returns (x, residual_norm).

    Exact inputs go through exact normal equations, so an exactly consistent
    system yields an exact solution with zero residual.
    """
    mode = join_modes(mat_mode(A), mat_mode([b]))
    if mode == EXACT:
        At = conj_transpose(A)
        AtA = mat_mul(At, A)
        Atb = mat_vec(At, b)
        try:
            x = [row[0] for row in solve(AtA, [[v] for v in Atb])]
        except MathDomainError:
            return _lstsq_float(A, b)
        r = [sum((A[i][j] * x[j] for j in range(len(x))), coerce(0, EXACT)) - b[i] for i in range(len(b))]
        res = float(sum(float(v.abs2()) for v in r)) ** 0.5
        return x, res
    return _lstsq_float(A, b)


def _lstsq_float(A: Matrix, b: Vector) -> tuple[Vector, float]:
    An = to_numpy(A)
    bn = np.array([to_complex(v) for v in b], dtype=complex)
    x, *_ = np.linalg.lstsq(An, bn, rcond=None)
    res = float(np.linalg.norm(An @ x - bn))
    return [complex(v) for v in x.tolist()], res


def gram_schmidt_complete(cols: list[Vector], dim: int, mode: str) -> Matrix:
    """Complete orthonormal columns to a unitary dim x dim matrix (columns).

    The given columns must already be orthonormal for the standard Hermitian
    product.  Exact inputs stay exact when the completion norms are perfect
    squares; otherwise the result demotes to float.
    """
    from .scalars import sqrt_positive

    def vec_mode(v: Vector) -> str:
        return "exact" if all(isinstance(x, ComplexRational) for x in v) else "float"

    basis: list[Vector] = [list(c) for c in cols]
    for k in range(dim):
        cand: Vector = [coerce(1 if j == k else 0, mode) for j in range(dim)]
        for b in basis:
            m = join_modes(vec_mode(cand), vec_mode(b))
            proj = coerce(0, m)
            for j in range(dim):
                proj = proj + conj_s(coerce(b[j], m)) * coerce(cand[j], m)
            cand = [coerce(cand[j], m) - proj * coerce(b[j], m) for j in range(dim)]
        norm2 = coerce(0, vec_mode(cand))
        for v in cand:
            norm2 = norm2 + v * conj_s(v)
        if abs_s(norm2) <= 1e-20:
            continue
        root = sqrt_positive(_realify(norm2))
        m = join_modes(vec_mode(cand), "exact" if isinstance(root, ComplexRational) else "float")
        inv = coerce(1, m) / coerce(root, m)
        basis.append([coerce(v, m) * inv for v in cand])
        if len(basis) == dim:
            break
    if len(basis) != dim:
        raise MathDomainError("unitary completion failed")
    return [[basis[c][r] for c in range(dim)] for r in range(dim)]


def _realify(x: Scalar) -> Scalar:
    if isinstance(x, ComplexRational):
        return ComplexRational.of(x.re)
    return complex(complex(x).real, 0.0)


def eigh_sorted(H: Matrix) -> tuple[list[float], np.ndarray]:
    """Eigenvalues (descending) and eigenvectors of a Hermitian matrix."""
    w, V = np.linalg.eigh(to_numpy(H))
    idx = np.argsort(-w)
    return [float(v) for v in w[idx]], V[:, idx]


def singular_values(A: Matrix) -> list[float]:
    if not A or not A[0]:
        return []
    return [float(s) for s in np.linalg.svd(to_numpy(A), compute_uv=False)]


def matrix_rank(A: Matrix, tol: float) -> int:
    """Singular values above tol * max(largest singular value, 1).

    The unit floor makes an all-noise matrix rank zero, which pure relative
    thresholding cannot do; entries here are O(1) second-jet data.
    """
    sv = singular_values(A)
    if not sv:
        return 0
    top = max(sv)
    if top == 0.0:
        return 0
    return sum(1 for s in sv if s > tol * max(top, 1.0))
