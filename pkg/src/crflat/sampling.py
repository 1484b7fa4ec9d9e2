"""Deterministic low-discrepancy sampling of Heisenberg boundary points.

Van der Corput sequences in the first 2n+1 prime bases fill a box in
(Re z, Im z, u); the seed offsets the index window, so a fixed seed always
reproduces the same points, and coordinates are exact dyadic-like rationals.
"""
from __future__ import annotations

from fractions import Fraction

from .maps import BoundaryPoint

_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43]


def van_der_corput(index: int, base: int) -> Fraction:
    """Radical-inverse of index in the given base, in [0, 1)."""
    value = Fraction(0)
    denom = 1
    k = index
    while k > 0:
        k, digit = divmod(k, base)
        denom *= base
        value += Fraction(digit, denom)
    return value


def boundary_points(n: int, count: int, seed: int = 0, scale: Fraction = Fraction(1, 2)) -> list[BoundaryPoint]:
    """Deterministic exact boundary points of the hypersurface of CR dimension n."""
    dims = 2 * n + 1
    if dims > len(_PRIMES):
        raise ValueError(f"sampling supports CR dimension up to {(len(_PRIMES) - 1) // 2}")
    points = []
    offset = 1 + seed * 7919
    for k in range(count):
        idx = offset + k
        coords = [van_der_corput(idx, _PRIMES[d]) - Fraction(1, 2) for d in range(dims)]
        z = [complex_rational(coords[2 * j] * 2 * scale, coords[2 * j + 1] * 2 * scale) for j in range(n)]
        u = coords[2 * n] * 2 * scale
        points.append(BoundaryPoint.of(z, u))
    return points


def complex_rational(re: Fraction, im: Fraction):
    from .scalars import ComplexRational

    return ComplexRational.of(re, im)
