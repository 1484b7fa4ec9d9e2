"""Automorphism families of the Heisenberg hypersurface, as maps and matrices.

Families: translations sigma^0_p, target normalizers tau^F_p, and isotropy
maps F_{lambda, r, a, U} fixing the origin.  Every automorphism carries both a
rational form (MapSpec) and its matrix in SU(n+1,1) or GL^Q; the rational form
is generated from the matrix, so the two realizations agree by construction.

Isotropy convention: f = lambda U (z + a w) / delta, g = lambda^2 w / delta,
delta = 1 - 2i <z, conj(a)> - (r + i|a|^2) w, with U acting on column vectors.
This is the parametrization for which
F_{l,r,a,U} = F_{l,0,0,Id} o F_{1,0,0,U} o F_{1,r,a,Id} holds exactly as a
matrix product.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from . import linalg as la
from .errors import DimensionError, MapParseError, MathDomainError
from .hermitian import FrameMatrix, mobius_action, mobius_to_mapspec
from .maps import BoundaryPoint, MapSpec, compose_mapspec, map_value
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
    to_complex,
)

TWO_I = ComplexRational.of(0, 2)


@dataclass(frozen=True)
class AutParams:
    kind: str  # sigma0 | tauF | isotropy | composite | inverse | matrix
    data: dict


@dataclass(frozen=True)
class Automorphism:
    """An automorphism of the Heisenberg hypersurface of CR dimension dim."""

    params: AutParams
    matrix: FrameMatrix
    rational_form: MapSpec

    @property
    def dim(self) -> int:
        return self.matrix.N

    @property
    def mode(self) -> str:
        return self.matrix.mode

    def apply_point(self, z_values, w_value):
        out = mobius_action(self.matrix.as_lists(), list(z_values) + [w_value])
        return out[:-1], out[-1]

    def apply_rational(self, z_values, w_value):
        vals = map_value(self.rational_form, list(z_values), w_value)
        return vals[:-1], vals[-1]

    def inverse(self) -> "Automorphism":
        inv = la.inverse(self.matrix.as_lists())
        return from_matrix(inv, AutParams("inverse", {"of": self.params.kind}))

    def before(self, other: "Automorphism") -> "Automorphism":
        """self o other."""
        return compose(self, other)


def from_matrix(rows: la.Matrix, params: AutParams | None = None) -> Automorphism:
    n = len(rows) - 2
    fm = FrameMatrix.of(rows)
    rational = mobius_to_mapspec(rows, n)
    return Automorphism(params or AutParams("matrix", {}), fm, rational)


def compose(A: Automorphism, B: Automorphism) -> Automorphism:
    """Composition A o B via the matrix product."""
    if A.dim != B.dim:
        raise DimensionError(f"cannot compose automorphisms of dims {A.dim} and {B.dim}")
    prod = la.mat_mul(A.matrix.as_lists(), B.matrix.as_lists())
    return from_matrix(prod, AutParams("composite", {"kinds": [A.params.kind, B.params.kind]}))


def make_sigma0(p: BoundaryPoint) -> Automorphism:
    """Translation sigma^0_p with sigma^0_p(0) = p; matrix in SU(n+1,1)."""
    n = p.n
    mode = p.mode
    rows = la.identity(n + 2, mode)
    for k in range(n):
        rows[k + 1][0] = coerce(p.z[k], mode)
    rows[n + 1][0] = coerce(p.w, mode)
    for k in range(n):
        rows[n + 1][k + 1] = coerce(TWO_I, mode) * conj_s(coerce(p.z[k], mode))
    aut = from_matrix(rows, AutParams("sigma0", {"z0": list(p.z), "u0": p.u}))
    zs, w = aut.apply_rational([coerce(0, mode)] * n, coerce(0, mode))
    if any(abs_s(a - coerce(b, mode)) > 1e-12 for a, b in zip(zs, p.z)) or abs_s(w - coerce(p.w, mode)) > 1e-12:
        raise MathDomainError("sigma0 self-check failed: p is off the hypersurface")
    return aut


def make_tauF(F: MapSpec, p: BoundaryPoint) -> Automorphism:
    """Target normalizer tau^F_p with tau^F_p(F(p)) = 0."""
    values = map_value(F, list(p.z), p.w)
    mode = join_modes(F.mode, p.mode)
    N = F.N
    ft, g = values[:N], values[N]
    rows = la.identity(N + 2, mode)
    for k in range(N):
        rows[k + 1][0] = -coerce(ft[k], mode)
    rows[N + 1][0] = -conj_s(coerce(g, mode))
    for k in range(N):
        rows[N + 1][k + 1] = -(coerce(TWO_I, mode) * conj_s(coerce(ft[k], mode)))
    aut = from_matrix(rows, AutParams("tauF", {"p": [list(p.z), p.u], "map": F.name}))
    zs, w = aut.apply_rational(ft, g)
    if any(abs_s(v) > 1e-9 for v in list(zs) + [w]):
        raise MathDomainError("tauF self-check failed: tau(F(p)) != 0 (map not proper at p?)")
    return aut


def make_isotropy(lam: Scalar, r: Scalar, a, U: la.Matrix, dim: int | None = None) -> Automorphism:
    """Isotropy automorphism F_{lambda, r, a, U} fixing the origin."""
    a = list(a)
    n = dim if dim is not None else len(a)
    if len(a) != n:
        raise DimensionError("length of a must match the CR dimension")
    if len(U) != n or any(len(row) != n for row in U):
        raise DimensionError("U must be an n x n matrix")
    modes = [EXACT if isinstance(v, (int, Fraction, ComplexRational)) else FLOAT for v in [lam, r] + a]
    mode = join_modes(la.mat_mode(U), *modes)
    lam_s = coerce(lam, mode)
    r_s = coerce(r, mode)
    if imag_part(lam_s) != 0 and abs(float(imag_part(lam_s))) > 1e-14:
        raise MathDomainError("lambda must be real")
    if float(real_part(lam_s)) <= 0:
        raise MathDomainError("lambda must be positive")
    if abs(float(imag_part(r_s))) > 1e-14:
        raise MathDomainError("r must be real")
    UH = la.mat_mul(la.conj_transpose(U), U)
    unitary_res = la.max_abs(la.mat_sub(UH, la.identity(n, mode)))
    if (mode == EXACT and unitary_res != 0) or (mode == FLOAT and unitary_res > 1e-10):
        raise MathDomainError(f"U is not unitary (residual {unitary_res})")
    a_s = [coerce(v, mode) for v in a]
    norm2 = coerce(0, mode)
    for v in a_s:
        norm2 = norm2 + v * conj_s(v)
    rows = la.zeros(n + 2, n + 2, mode)
    rows[0][0] = coerce(1, mode)
    for k in range(n):
        rows[0][k + 1] = -(coerce(TWO_I, mode) * conj_s(a_s[k]))
    rows[0][n + 1] = -(r_s + coerce(ComplexRational.of(0, 1), mode) * norm2)
    Ua = la.mat_vec(U, a_s)
    for k in range(n):
        for j in range(n):
            rows[k + 1][j + 1] = lam_s * coerce(U[k][j], mode)
        rows[k + 1][n + 1] = lam_s * coerce(Ua[k], mode)
    rows[n + 1][n + 1] = lam_s * lam_s
    return from_matrix(rows, AutParams("isotropy", {"lambda": lam, "r": r, "a": a, "U": U}))


def isotropy_factors(lam, r, a, U) -> tuple[Automorphism, Automorphism, Automorphism]:
    """Factors (F_{l,0,0,Id}, F_{1,0,0,U}, F_{1,r,a,Id}) whose product is F_{l,r,a,U}."""
    n = len(a)
    ident = la.identity(n, EXACT)
    return (
        make_isotropy(lam, 0, [0] * n, ident, n),
        make_isotropy(1, 0, [0] * n, U, n),
        make_isotropy(1, r, list(a), ident, n),
    )


def conjugate_map(tau: Automorphism, F: MapSpec, sigma: Automorphism, name: str | None = None) -> MapSpec:
    """The equivalent map tau o F o sigma as a symbolic MapSpec."""
    if sigma.dim != F.n or tau.dim != F.N:
        raise DimensionError("automorphism dimensions do not match the map")
    return compose_mapspec(tau.rational_form, compose_mapspec(F, sigma.rational_form), name)


# -- automorphism files --------------------------------------------------------


def parse_automorphism(text: str) -> Automorphism:
    """Parse an automorphism document (JSON; kinds sigma0 and isotropy)."""
    from . import expr as ex

    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MapParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from exc
    if not isinstance(doc, dict) or "kind" not in doc:
        raise MapParseError("automorphism document must be a JSON object with a 'kind' field")

    def scalar_of(s) -> Scalar:
        if isinstance(s, (int, float)):
            return ComplexRational.of(Fraction(s)) if isinstance(s, int) else complex(s)
        e = ex.parse_expression(str(s), set())
        return ex.eval_scalar(e, {}, EXACT if ex.expr_mode(e) == EXACT else FLOAT)

    kind = doc["kind"]
    if kind == "sigma0":
        z0 = [scalar_of(v) for v in doc.get("z0", [])]
        u0 = scalar_of(doc.get("u0", 0))
        if isinstance(u0, ComplexRational):
            p = BoundaryPoint.of(z0, u0.re)
        else:
            p = BoundaryPoint.of(z0, complex(u0).real)
        return make_sigma0(p)
    if kind == "isotropy":
        lam = scalar_of(doc.get("lambda", 1))
        r = scalar_of(doc.get("r", 0))
        a = [scalar_of(v) for v in doc.get("a", [])]
        U_doc = doc.get("U")
        if U_doc is None:
            n = len(a)
            U = la.identity(n, EXACT)
        else:
            U = [[scalar_of(v) for v in row] for row in U_doc]
        lam_v = lam if isinstance(lam, ComplexRational) else complex(lam).real
        r_v = r if isinstance(r, ComplexRational) else complex(r).real
        if isinstance(lam_v, ComplexRational):
            lam_v = lam_v.re if lam_v.im == 0 else lam_v
        if isinstance(r_v, ComplexRational):
            r_v = r_v.re if r_v.im == 0 else r_v
        return make_isotropy(lam_v, r_v, a, U)
    raise MapParseError(f"unknown automorphism kind {kind!r}")


def parse_automorphism_file(path: str) -> Automorphism:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_automorphism(fh.read())
    except FileNotFoundError as exc:
        raise MapParseError(f"automorphism file not found: {path}") from exc
