"""Weighted-truncated polynomial arithmetic in (z, zbar, u).

A jet of arity n lives in variables z_1..z_n, zbar_1..zbar_n and one extra
slot of weight two.  The slot is read as the real coordinate u on the
Heisenberg hypersurface, or as the holomorphic coordinate w when a jet
represents a holomorphic germ (then no zbar exponent may appear and
conjugation is meaningless).  A jet of truncation order m represents its
function up to o_wt(m): all stored monomials have weight <= m and every
coefficient of weight <= m is meaningful.

Weights: z and zbar count 1, the u/w slot counts 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, NamedTuple

from .errors import JetOrderError, SingularSubstitutionError
from .scalars import (
    EXACT,
    FLOAT,
    ComplexRational,
    Scalar,
    abs_s,
    coerce,
    conj_s,
    is_zero_s,
    join_modes,
    mode_of,
    sqrt_positive,
    to_complex,
)


class Monomial(NamedTuple):
    z: tuple[int, ...]
    zbar: tuple[int, ...]
    u: int

    @property
    def weight(self) -> int:
        return sum(self.z) + sum(self.zbar) + 2 * self.u

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(
            tuple(a + b for a, b in zip(self.z, other.z)),
            tuple(a + b for a, b in zip(self.zbar, other.zbar)),
            self.u + other.u,
        )

    def conj(self) -> "Monomial":
        return Monomial(self.zbar, self.z, self.u)

    def sort_key(self):
        return (self.weight, self.z, self.zbar, self.u)

    def render(self) -> str:
        parts = []
        for i, e in enumerate(self.z):
            if e:
                parts.append(f"z{i + 1}" + (f"^{e}" if e > 1 else ""))
        for i, e in enumerate(self.zbar):
            if e:
                parts.append(f"zb{i + 1}" + (f"^{e}" if e > 1 else ""))
        if self.u:
            parts.append("u" + (f"^{self.u}" if self.u > 1 else ""))
        return "*".join(parts) if parts else "1"


def _unit(n: int) -> tuple[int, ...]:
    return (0,) * n


def _scalar_mode(x) -> str:
    return EXACT if isinstance(x, (int, Fraction, ComplexRational)) else FLOAT


class Jet:
    """Immutable sparse weighted-truncated polynomial."""

    __slots__ = ("n", "order", "mode", "terms")

    def __init__(self, n: int, order: int, terms: dict[Monomial, Scalar], mode: str):
        if order < 0:
            raise JetOrderError("jet truncation order fell below zero")
        self.n = n
        self.order = order
        self.mode = mode
        clean: dict[Monomial, Scalar] = {}
        for m, c in terms.items():
            if m.weight > order or is_zero_s(c):
                continue
            clean[m] = c
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(n: int, order: int, mode: str = EXACT) -> "Jet":
        return Jet(n, order, {}, mode)

    @staticmethod
    def const(value, n: int, order: int, mode: str = EXACT) -> "Jet":
        c = coerce(value, mode)
        return Jet(n, order, {Monomial(_unit(n), _unit(n), 0): c}, mode)

    @staticmethod
    def z_var(i: int, n: int, order: int, mode: str = EXACT) -> "Jet":
        e = tuple(1 if j == i else 0 for j in range(n))
        return Jet(n, order, {Monomial(e, _unit(n), 0): coerce(1, mode)}, mode)

    @staticmethod
    def zbar_var(i: int, n: int, order: int, mode: str = EXACT) -> "Jet":
        e = tuple(1 if j == i else 0 for j in range(n))
        return Jet(n, order, {Monomial(_unit(n), e, 0): coerce(1, mode)}, mode)

    @staticmethod
    def u_var(n: int, order: int, mode: str = EXACT) -> "Jet":
        return Jet(n, order, {Monomial(_unit(n), _unit(n), 1): coerce(1, mode)}, mode)

    # -- bookkeeping --------------------------------------------------------

    def _coerced(self, other: "Jet") -> tuple["Jet", "Jet"]:
        if self.n != other.n:
            raise JetOrderError(f"jet arity mismatch: {self.n} vs {other.n}")
        mode = join_modes(self.mode, other.mode)
        return self.as_mode(mode), other.as_mode(mode)

    def as_mode(self, mode: str) -> "Jet":
        if mode == self.mode:
            return self
        if mode == EXACT:
            raise TypeError("cannot promote a float jet back to exact mode")
        return Jet(self.n, self.order, {m: to_complex(c) for m, c in self.terms.items()}, FLOAT)

    def to_float(self) -> "Jet":
        return self.as_mode(FLOAT)

    def truncate(self, order: int) -> "Jet":
        if order >= self.order:
            return Jet(self.n, min(order, self.order), dict(self.terms), self.mode)
        return Jet(self.n, order, {m: c for m, c in self.terms.items() if m.weight <= order}, self.mode)

    def coefficient(self, m: Monomial) -> Scalar:
        return self.terms.get(m, coerce(0, self.mode))

    def coefficient_of(self, z: tuple[int, ...], zbar: tuple[int, ...] | None = None, u: int = 0) -> Scalar:
        return self.coefficient(Monomial(tuple(z), tuple(zbar) if zbar else _unit(self.n), u))

    def constant_term(self) -> Scalar:
        return self.coefficient(Monomial(_unit(self.n), _unit(self.n), 0))

    def weighted_order(self) -> int | float:
        """Smallest weight of a nonzero term; infinity for the zero jet."""
        if not self.terms:
            return math.inf
        return min(m.weight for m in self.terms)

    def weight_part(self, w: int) -> "Jet":
        return Jet(self.n, self.order, {m: c for m, c in self.terms.items() if m.weight == w}, self.mode)

    def is_holomorphic(self) -> bool:
        return all(sum(m.zbar) == 0 for m in self.terms)

    def is_zero(self, tol: float = 0.0) -> bool:
        if self.mode == EXACT:
            return not self.terms
        return all(abs_s(c) <= tol for c in self.terms.values())

    def max_abs(self) -> float:
        return max((abs_s(c) for c in self.terms.values()), default=0.0)

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Jet):
            other = Jet.const(other, self.n, self.order, _scalar_mode(other))
        a, b = self._coerced(other)
        order = min(a.order, b.order)
        terms = dict(a.truncate(order).terms)
        for m, c in b.truncate(order).terms.items():
            terms[m] = terms.get(m, coerce(0, a.mode)) + c
        return Jet(a.n, order, terms, a.mode)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.n, self.order, {m: -c for m, c in self.terms.items()}, self.mode)

    def __sub__(self, other):
        if not isinstance(other, Jet):
            other = Jet.const(other, self.n, self.order, _scalar_mode(other))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return self.scale(other)
        a, b = self._coerced(other)
        order = min(a.order, b.order)
        terms: dict[Monomial, Scalar] = {}
        for ma, ca in a.terms.items():
            if ma.weight > order:
                continue
            for mb, cb in b.terms.items():
                m = ma * mb
                if m.weight > order:
                    continue
                prod = ca * cb
                terms[m] = terms.get(m, coerce(0, a.mode)) + prod
        return Jet(a.n, order, terms, a.mode)

    __rmul__ = __mul__

    def scale(self, scalar) -> "Jet":
        mode = join_modes(self.mode, _scalar_mode(scalar))
        c = coerce(scalar, mode)
        a = self.as_mode(mode)
        return Jet(a.n, a.order, {m: c * v for m, v in a.terms.items()}, mode)

    def conj(self) -> "Jet":
        """Formal conjugation: swaps z and zbar exponents, conjugates coefficients.

        Only meaningful for jets restricted to the hypersurface (u real).
        """
        return Jet(self.n, self.order, {m.conj(): conj_s(c) for m, c in self.terms.items()}, self.mode)

    def diff(self, kind: str, index: int = 0) -> "Jet":
        """Formal partial derivative by z_i, zbar_i or the u/w slot.

        The truncation order drops by the variable's weight.
        """
        drop = 2 if kind == "u" else 1
        terms: dict[Monomial, Scalar] = {}
        for m, c in self.terms.items():
            if kind == "z":
                e = m.z[index]
                if e == 0:
                    continue
                nm = Monomial(m.z[:index] + (e - 1,) + m.z[index + 1 :], m.zbar, m.u)
            elif kind == "zbar":
                e = m.zbar[index]
                if e == 0:
                    continue
                nm = Monomial(m.z, m.zbar[:index] + (e - 1,) + m.zbar[index + 1 :], m.u)
            elif kind == "u":
                e = m.u
                if e == 0:
                    continue
                nm = Monomial(m.z, m.zbar, e - 1)
            else:
                raise ValueError(f"unknown variable kind {kind!r}")
            terms[nm] = terms.get(nm, coerce(0, self.mode)) + c * coerce(e, self.mode)
        return Jet(self.n, self.order - drop, terms, self.mode)

    # -- series operations --------------------------------------------------

    def inverse(self) -> "Jet":
        """Multiplicative inverse by geometric series; constant term must be a unit."""
        c0 = self.constant_term()
        if is_zero_s(c0):
            raise SingularSubstitutionError("cannot invert a jet with zero constant term")
        one = Jet.const(1, self.n, self.order, self.mode)
        x = one - self.scale(coerce(1, self.mode) / c0)
        acc = one
        power = one
        for _ in range(self.order):
            power = power * x
            if power.is_zero():
                break
            acc = acc + power
        return acc.scale(coerce(1, self.mode) / c0)

    def sqrt(self) -> "Jet":
        """Principal square root; constant term must be real positive.

        Demotes to float mode unless the constant term is a perfect square.
        """
        c0 = self.constant_term()
        r0 = sqrt_positive(c0)
        mode = join_modes(self.mode, mode_of(r0))
        a = self.as_mode(mode)
        one = Jet.const(1, a.n, a.order, mode)
        x = a.scale(coerce(1, mode) / coerce(c0, mode)) - one
        acc = one
        power = one
        binom = Fraction(1)
        for k in range(1, a.order + 1):
            binom *= Fraction(Fraction(1, 2) - (k - 1), k)
            power = power * x
            if power.is_zero():
                break
            acc = acc + power.scale(binom)
        return acc.scale(r0)

    def subs_u(self, replacement: "Jet") -> "Jet":
        """Substitute a jet for the weight-two slot variable."""
        a, rep = self._coerced(replacement)
        order = min(a.order, rep.order)
        result = Jet.zero(a.n, order, a.mode)
        powers: list[Jet] = [Jet.const(1, a.n, order, a.mode)]
        max_u = max((m.u for m in a.terms), default=0)
        for _ in range(max_u):
            powers.append(powers[-1] * rep)
        for m, c in a.terms.items():
            base = Jet(a.n, order, {Monomial(m.z, m.zbar, 0): c}, a.mode)
            result = result + base * powers[m.u]
        return result

    def eval(self, z_values: Iterable, u_value, zbar_values: Iterable | None = None) -> Scalar:
        """Evaluate at a point; zbar defaults to the conjugate of z."""
        zs = list(z_values)
        if zbar_values is None:
            zbs = [conj_s(v) for v in zs]
        else:
            zbs = list(zbar_values)
        mode = self.mode if all(isinstance(v, ComplexRational) for v in zs + zbs + [u_value]) else FLOAT
        mode = join_modes(self.mode, mode)
        total = coerce(0, mode)
        for m, c in self.terms.items():
            val = coerce(c, mode)
            for v, e in zip(zs, m.z):
                for _ in range(e):
                    val = val * coerce(v, mode)
            for v, e in zip(zbs, m.zbar):
                for _ in range(e):
                    val = val * coerce(v, mode)
            for _ in range(m.u):
                val = val * coerce(u_value, mode)
            total = total + val
        return total

    def map_coefficients(self, fn: Callable[[Scalar], Scalar], mode: str | None = None) -> "Jet":
        return Jet(self.n, self.order, {m: fn(c) for m, c in self.terms.items()}, mode or self.mode)

    # -- misc ---------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Jet):
            return NotImplemented
        return (
            self.n == other.n
            and self.mode == other.mode
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.n, self.mode, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            body = "0"
        else:
            chunks = []
            for m in sorted(self.terms, key=Monomial.sort_key):
                chunks.append(f"({self.terms[m]})*{m.render()}")
            body = " + ".join(chunks)
        return f"Jet[n={self.n}, m={self.order}, {self.mode}]({body})"


@dataclass(frozen=True)
class JetVector:
    """Fixed-length sequence of jets sharing arity and truncation order."""

    entries: tuple[Jet, ...]

    def __post_init__(self):
        if not self.entries:
            raise ValueError("empty jet vector")
        n = self.entries[0].n
        if any(j.n != n for j in self.entries):
            raise JetOrderError("jet vector entries must share arity")

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i: int) -> Jet:
        return self.entries[i]

    @property
    def n(self) -> int:
        return self.entries[0].n

    @property
    def order(self) -> int:
        return min(j.order for j in self.entries)

    @property
    def mode(self) -> str:
        return join_modes(*(j.mode for j in self.entries))

    def to_float(self) -> "JetVector":
        return JetVector(tuple(j.to_float() for j in self.entries))

    def map(self, fn: Callable[[Jet], Jet]) -> "JetVector":
        return JetVector(tuple(fn(j) for j in self.entries))


def heisenberg_w(n: int, order: int, mode: str = EXACT) -> Jet:
    """The restriction of w to the hypersurface: u + i * sum_j z_j zbar_j."""
    terms = {Monomial(_unit(n), _unit(n), 1): coerce(1, mode)}
    for j in range(n):
        e = tuple(1 if k == j else 0 for k in range(n))
        terms[Monomial(e, e, 0)] = coerce(ComplexRational.of(0, 1), mode)
    return Jet(n, order, terms, mode)


def restrict_to_heisenberg(F: JetVector) -> JetVector:
    """Replace w by u + i|z|^2 in a vector of holomorphic (z, w) jets."""
    for j in F:
        if not j.is_holomorphic():
            raise JetOrderError("restriction requires holomorphic jets (no zbar dependence)")
    n, order, mode = F.n, F.order, F.mode
    w = heisenberg_w(n, order, mode)
    return F.map(lambda j: j.subs_u(w))


def cr_field(h: Jet, alpha: int) -> Jet:
    """Tangential CR operator L_alpha on restricted jets.

    Realizes the ambient field d/dz_alpha + 2i zbar_alpha d/dw applied to a
    function of (z, w)|_Sigma, expressed in the chart (z, zbar, u).
    """
    zb = Jet.zbar_var(alpha, h.n, h.order - 2 if h.order >= 2 else 0, h.mode)
    return h.diff("z", alpha) + zb.scale(ComplexRational.of(0, 1)) * h.diff("u")


def cr_field_bar(h: Jet, alpha: int) -> Jet:
    """Conjugate tangential CR operator Lbar_alpha on restricted jets."""
    z = Jet.z_var(alpha, h.n, h.order - 2 if h.order >= 2 else 0, h.mode)
    return h.diff("zbar", alpha) - z.scale(ComplexRational.of(0, 1)) * h.diff("u")


def reeb_field(h: Jet) -> Jet:
    """Reeb derivative d/du on restricted jets."""
    return h.diff("u")
