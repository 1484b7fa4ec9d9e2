"""Independent oracle for the geometric rank.

Deliberately avoids the package's jet engine and sequential normalizer:
maps are hardcoded closed forms evaluated in complex arithmetic, Taylor
coefficients come from discrete Cauchy integrals on polydiscs, and the
normalizing gauge is found by a dense scipy least-squares solve over raw
isotropy parameters (lambda = e^s, r, a, U = Cayley transform of a Hermitian
matrix).  Only the contract is shared with the main path.
"""
from __future__ import annotations

import numpy as np
from scipy.optimize import least_squares

M_GRID = 24  # Cauchy nodes per variable
RHO_Z = 0.15
RHO_W = 0.12


def whitney_eval(z: complex, w: complex) -> np.ndarray:
    d = 1.0 - w * w
    return np.array([z * (1 - 1j * w) / d, z * (1 + 1j * w) / d, 2 * w / d])


def rank_one_eval(z: complex, w: complex) -> np.ndarray:
    d = 1.0 - 2j * w
    return np.array([z / d, 2 * z * z / d, 2 * z * w / d, w])


def linear_eval(z: complex, w: complex) -> np.ndarray:
    return np.array([z, 0.0 * z, w])


def coeff_grid(G, n_z: int, n_w: int) -> np.ndarray:
    """Taylor coefficients c[j, k, comp] of z^j w^k via 2D discrete Cauchy integrals."""
    nodes = np.exp(2j * np.pi * np.arange(M_GRID) / M_GRID)
    probe = G(RHO_Z * nodes[0], RHO_W * nodes[0])
    vals = np.zeros((M_GRID, M_GRID, len(probe)), dtype=complex)
    for a, za in enumerate(nodes):
        for b, wb in enumerate(nodes):
            vals[a, b] = G(RHO_Z * za, RHO_W * wb)
    spec = np.fft.fft2(vals, axes=(0, 1)) / (M_GRID * M_GRID)
    out = np.zeros((n_z + 1, n_w + 1, len(probe)), dtype=complex)
    for j in range(n_z + 1):
        for k in range(n_w + 1):
            out[j, k] = spec[j, k] / (RHO_Z ** j) / (RHO_W ** k)
    return out


def translate(G, z0: complex, w0: complex):
    """F_p = tau^F_p o F o sigma^0_p for the hardcoded formulas (n = 1)."""
    F_p0 = G(z0, w0)
    ft0, g0 = F_p0[:-1], F_p0[-1]

    def H(z, w):
        zz = z + z0
        ww = w + w0 + 2j * z * np.conj(z0)
        vals = G(zz, ww)
        ft, g = vals[:-1], vals[-1]
        z_star = ft - ft0
        w_star = g - np.conj(g0) - 2j * np.dot(ft, np.conj(ft0))
        return np.append(z_star, w_star)

    return H


def _unitary_from_params(params: np.ndarray, N: int, U0: np.ndarray) -> np.ndarray:
    """Cayley chart around the seed U0 (K = 0 gives U0)."""
    K = np.zeros((N, N), dtype=complex)
    idx = 0
    for j in range(N):
        K[j, j] = params[idx]
        idx += 1
    for j in range(N):
        for l in range(j + 1, N):
            K[j, l] = params[idx] + 1j * params[idx + 1]
            K[l, j] = params[idx] - 1j * params[idx + 1]
            idx += 2
    eye = np.eye(N)
    return U0 @ np.linalg.solve(eye - 1j * K, eye + 1j * K)


def _apply_isotropy(vals: np.ndarray, lam: float, r: float, a: np.ndarray, U: np.ndarray) -> np.ndarray:
    """F_{lam,r,a,U}: f = lam U (z + a w)/delta, g = lam^2 w/delta.

    The a-slot must pass through U for the map to preserve the quadric
    (the form-breaking variant with a bare a*g term is not an automorphism).
    """
    ft, g = vals[:-1], vals[-1]
    delta = 1.0 - 2j * np.dot(ft, np.conj(a)) - (r + 1j * np.vdot(a, a).real) * g
    new_ft = lam * (U @ (ft + a * g)) / delta
    new_g = lam * lam * g / delta
    return np.append(new_ft, new_g)


def _param_count(N: int) -> int:
    return 1 + 1 + 2 * N + N * N


def _unpack(params: np.ndarray, N: int, seed: tuple[float, np.ndarray]):
    lam0, U0 = seed
    s, r = params[0], params[1]
    a = params[2 : 2 + N] + 1j * params[2 + N : 2 + 2 * N]
    U = _unitary_from_params(params[2 + 2 * N :], N, U0)
    return float(lam0 * np.exp(s)), float(r), a, U


def _seed_gauge(H, n: int, N: int) -> tuple[float, np.ndarray]:
    """Initial lambda and U from the weight-one data, by plain numpy QR."""
    c = coeff_grid(H, 1, 1)
    B = np.array([[c[1, 0, k]] for k in range(N)])  # n = 1 columns
    b = c[0, 1, N].real
    lam0 = 1.0 / np.sqrt(b)
    cols = [B[:, 0] / np.sqrt(b)]
    for k in range(N):
        cand = np.zeros(N, dtype=complex)
        cand[k] = 1.0
        for v in cols:
            cand = cand - np.vdot(v, cand) * v
        nrm = np.linalg.norm(cand)
        if nrm > 0.5:
            cols.append(cand / nrm)
        if len(cols) == N:
            break
    V = np.column_stack(cols)
    return lam0, V.conj().T


def _residuals(params: np.ndarray, H, n: int, N: int, seed) -> np.ndarray:
    lam, r, a, U = _unpack(params, N, seed)

    def HH(z, w):
        return _apply_isotropy(H(z, w), lam, r, a, U)

    c = coeff_grid(HH, 3, 2)
    res: list[float] = []

    def push(x: complex):
        res.extend([x.real, x.imag])

    # ftilde linear block = [I; 0], no w-linear terms, f has no z^2 part
    for k in range(N):
        push(c[1, 0, k] - (1.0 if k < n else 0.0))
        push(c[0, 1, k])
    for k in range(n):
        push(c[2, 0, k])
    # g = w + o_wt(4)
    push(c[0, 1, N] - 1.0)
    push(c[1, 0, N])
    push(c[2, 0, N])
    push(c[1, 1, N])
    push(c[3, 0, N])
    push(c[0, 2, N])
    return np.array(res)


def oracle_rank(G, z0: complex, w0: complex, n: int = 1, N: int | None = None, tol: float = 1e-6):
    """Dense-solve normalization at p = (z0, w0); returns (singular_values, rank, mu)."""
    probe = G(0.123, 0.045 + 1j * 0.123 ** 2)
    N = N if N is not None else len(probe) - 1
    H = translate(G, z0, w0)
    seed = _seed_gauge(H, n, N)
    x0 = np.zeros(_param_count(N))
    sol = least_squares(_residuals, x0, args=(H, n, N, seed), xtol=1e-14, ftol=1e-14, gtol=1e-14)
    if not sol.success or np.max(np.abs(sol.fun)) > 1e-8:
        raise RuntimeError(f"oracle normalization failed: residual {np.max(np.abs(sol.fun)):.3e}")
    lam, r, a, U = _unpack(sol.x, N, seed)

    def HH(z, w):
        return _apply_isotropy(H(z, w), lam, r, a, U)

    c = coeff_grid(HH, 1, 1)
    A = np.zeros((n, n), dtype=complex)
    for l in range(n):
        A[0, l] = -2j * c[1, 1, l]
    sv = np.linalg.svd(A, compute_uv=False)
    top = max(sv) if len(sv) else 0.0
    rank = int(sum(1 for s in sv if s > tol * max(top, 1.0)))
    return [float(s) for s in sv], rank, A
