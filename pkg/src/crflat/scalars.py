"""Scalar tower: exact Gaussian-rational complex numbers and float complexes.

Exact mode is closed under +,-,*,/ and conjugation; a square root stays exact
only when the radicand is a perfect rational square, otherwise the value (and
everything downstream) demotes to float.  Float comparisons always go through
an explicit tolerance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

EXACT = "exact"
FLOAT = "float"

RationalLike = int | Fraction


def _frac(x: RationalLike) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class ComplexRational:
    """Complex number with Fraction real and imaginary parts."""

    re: Fraction
    im: Fraction

    @staticmethod
    def of(re: RationalLike = 0, im: RationalLike = 0) -> "ComplexRational":
        return ComplexRational(_frac(re), _frac(im))

    def __add__(self, other):
        e = as_exact(other)
        if e is NotImplemented:
            if isinstance(other, (float, complex)):
                return complex(self) + other
            return NotImplemented
        return ComplexRational(self.re + e.re, self.im + e.im)

    __radd__ = __add__

    def __sub__(self, other):
        e = as_exact(other)
        if e is NotImplemented:
            if isinstance(other, (float, complex)):
                return complex(self) - other
            return NotImplemented
        return ComplexRational(self.re - e.re, self.im - e.im)

    def __rsub__(self, other):
        e = as_exact(other)
        if e is NotImplemented:
            if isinstance(other, (float, complex)):
                return other - complex(self)
            return NotImplemented
        return e - self

    def __neg__(self):
        return ComplexRational(-self.re, -self.im)

    def __mul__(self, other):
        e = as_exact(other)
        if e is NotImplemented:
            if isinstance(other, (float, complex)):
                return complex(self) * other
            return NotImplemented
        return ComplexRational(
            self.re * e.re - self.im * e.im,
            self.re * e.im + self.im * e.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        e = as_exact(other)
        if e is NotImplemented:
            if isinstance(other, (float, complex)):
                return complex(self) / other
            return NotImplemented
        d = e.re * e.re + e.im * e.im
        if d == 0:
            raise ZeroDivisionError("division by exact zero")
        return ComplexRational(
            (self.re * e.re + self.im * e.im) / d,
            (self.im * e.re - self.re * e.im) / d,
        )

    def __rtruediv__(self, other):
        e = as_exact(other)
        if e is NotImplemented:
            if isinstance(other, (float, complex)):
                return other / complex(self)
            return NotImplemented
        return e / self

    def conjugate(self) -> "ComplexRational":
        return ComplexRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}*i"


CR_ZERO = ComplexRational.of(0)
CR_ONE = ComplexRational.of(1)
CR_I = ComplexRational.of(0, 1)

Scalar = ComplexRational | complex


def as_exact(x) -> ComplexRational:
    """Coerce ints and Fractions to ComplexRational; NotImplemented otherwise."""
    if isinstance(x, ComplexRational):
        return x
    if isinstance(x, (int, Fraction)):
        return ComplexRational(_frac(x), Fraction(0))
    return NotImplemented


def mode_of(x: Scalar) -> str:
    return EXACT if isinstance(x, ComplexRational) else FLOAT


def coerce(x, mode: str) -> Scalar:
    """Bring a number into the coefficient type of the given mode."""
    if mode == EXACT:
        e = as_exact(x)
        if e is NotImplemented:
            raise TypeError(f"cannot use {x!r} as an exact coefficient")
        return e
    if isinstance(x, ComplexRational):
        return complex(x)
    return complex(x)


def join_modes(*modes: str) -> str:
    return EXACT if all(m == EXACT for m in modes) else FLOAT


def conj_s(x: Scalar) -> Scalar:
    if isinstance(x, ComplexRational):
        return x.conjugate()
    return complex(x).conjugate()


def abs2_s(x: Scalar):
    if isinstance(x, ComplexRational):
        return x.abs2()
    x = complex(x)
    return x.real * x.real + x.imag * x.imag


def abs_s(x: Scalar) -> float:
    return math.sqrt(float(abs2_s(x)))


def to_complex(x) -> complex:
    if isinstance(x, ComplexRational):
        return complex(x)
    return complex(x)


def is_zero_s(x: Scalar, tol: float = 0.0) -> bool:
    if isinstance(x, ComplexRational):
        return x.is_zero()
    return abs(complex(x)) <= tol


def real_part(x: Scalar):
    if isinstance(x, ComplexRational):
        return x.re
    return complex(x).real


def imag_part(x: Scalar):
    if isinstance(x, ComplexRational):
        return x.im
    return complex(x).imag


def exact_sqrt_fraction(q: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative Fraction, or None."""
    if q < 0:
        return None
    num, den = q.numerator, q.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def sqrt_positive(x: Scalar, tol: float = 1e-12) -> Scalar:
    """Square root of a (numerically) positive real scalar.

    Stays exact when the input is an exact perfect square; otherwise returns a
    float, which marks the demotion point of the surrounding computation.
    """
    if isinstance(x, ComplexRational):
        if x.im != 0:
            raise ValueError(f"sqrt of non-real exact scalar {x}")
        if x.re < 0:
            raise ValueError(f"sqrt of negative scalar {x}")
        r = exact_sqrt_fraction(x.re)
        if r is not None:
            return ComplexRational(r, Fraction(0))
        return complex(math.sqrt(float(x.re)), 0.0)
    z = complex(x)
    if abs(z.imag) > tol * max(1.0, abs(z)) or z.real < -tol:
        raise ValueError(f"sqrt of non-positive scalar {z}")
    return complex(math.sqrt(max(z.real, 0.0)), 0.0)


def format_scalar(x: Scalar) -> str:
    if isinstance(x, ComplexRational):
        return str(x)
    z = complex(x)
    return f"{z.real!r}{'+' if z.imag >= 0 else '-'}{abs(z.imag)!r}j"
