"""Rational proper maps between ball and Siegel models, and their jets.

Source space C^{n+1} with coordinates (z_1..z_n, w), target C^{N+1}; a Siegel
map has components (f_1..f_n, phi_1..phi_{N-n}, g).  Boundary points live on
the Heisenberg hypersurface Im w = |z|^2.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from . import expr as ex
from .errors import DimensionError, MapParseError, MathDomainError, PoleError
from .jets import Jet, JetVector, restrict_to_heisenberg
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
    to_complex,
)

BALL = "ball"
SIEGEL = "siegel"


@dataclass(frozen=True)
class MapSpec:
    """A rational map between balls or Siegel domains, component expressions parsed."""

    model: str
    n: int
    N: int
    components: tuple[ex.Expr, ...]
    name: str | None = None

    def __post_init__(self):
        if self.model not in (BALL, SIEGEL):
            raise MapParseError(f"unknown model {self.model!r}")
        if self.n < 1 or self.N < self.n:
            raise DimensionError(f"need 1 <= n <= N, got n={self.n}, N={self.N}")
        if len(self.components) != self.N + 1:
            raise DimensionError(
                f"expected {self.N + 1} components for target CR dimension {self.N}, got {len(self.components)}"
            )

    @property
    def variables(self) -> list[str]:
        return [f"z{k + 1}" for k in range(self.n)] + ["w"]

    @property
    def mode(self) -> str:
        return join_modes(*(ex.expr_mode(c) for c in self.components))

    def f_components(self) -> tuple[ex.Expr, ...]:
        return self.components[: self.n]

    def phi_components(self) -> tuple[ex.Expr, ...]:
        return self.components[self.n : self.N]

    def g_component(self) -> ex.Expr:
        return self.components[self.N]


@dataclass(frozen=True)
class BoundaryPoint:
    """Point of the Heisenberg hypersurface: w = u + i|z|^2."""

    z: tuple[Scalar, ...]
    u: Scalar

    @staticmethod
    def of(z_values, u_value) -> "BoundaryPoint":
        zs = tuple(coerce(v, EXACT) if isinstance(v, (int, Fraction, ComplexRational)) else complex(v) for v in z_values)
        if isinstance(u_value, (int, Fraction)):
            uu: Scalar = ComplexRational.of(u_value)
        elif isinstance(u_value, ComplexRational):
            uu = u_value
        else:
            uu = complex(u_value)
        if abs(imag_part(uu)) > 0 and not isinstance(uu, ComplexRational):
            raise MathDomainError("u must be real")
        if isinstance(uu, ComplexRational) and uu.im != 0:
            raise MathDomainError("u must be real")
        return BoundaryPoint(zs, uu)

    @property
    def mode(self) -> str:
        vals = list(self.z) + [self.u]
        return EXACT if all(isinstance(v, ComplexRational) for v in vals) else FLOAT

    @property
    def n(self) -> int:
        return len(self.z)

    @property
    def w(self) -> Scalar:
        mode = self.mode
        total = coerce(self.u, mode)
        i = coerce(ComplexRational.of(0, 1), mode)
        for v in self.z:
            total = total + i * coerce(v, mode) * conj_s(coerce(v, mode))
        return total

    def origin_like(self) -> bool:
        return all(abs_s(v) == 0 for v in self.z) and abs_s(self.u) == 0


def origin(n: int) -> BoundaryPoint:
    return BoundaryPoint.of([0] * n, 0)


# -- parsing -----------------------------------------------------------------


def parse_map(text: str) -> MapSpec:
    """Parse a map-spec document (JSON with model, n, N, components, name?)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MapParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from exc
    if not isinstance(doc, dict):
        raise MapParseError("map-spec document must be a JSON object")
    missing = {"model", "n", "N", "components"} - set(doc)
    if missing:
        raise MapParseError(f"missing fields: {sorted(missing)}")
    n, N = doc["n"], doc["N"]
    if not isinstance(n, int) or not isinstance(N, int):
        raise MapParseError("n and N must be integers")
    comps = doc["components"]
    if not isinstance(comps, list) or not all(isinstance(c, str) for c in comps):
        raise MapParseError("components must be an array of expression strings")
    if len(comps) != N + 1:
        raise DimensionError(f"expected {N + 1} components, got {len(comps)}")
    variables = {f"z{k + 1}" for k in range(n)} | {"w"}
    parsed = tuple(ex.parse_expression(c, variables) for c in comps)
    return MapSpec(doc["model"], n, N, parsed, doc.get("name"))


def parse_map_file(path: str) -> MapSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_map(fh.read())
    except FileNotFoundError as exc:
        raise MapParseError(f"map-spec file not found: {path}") from exc


def mapspec_to_doc(F: MapSpec) -> dict:
    return {
        "model": F.model,
        "n": F.n,
        "N": F.N,
        "components": [render_expr(c) for c in F.components],
        **({"name": F.name} if F.name else {}),
    }


def render_expr(e: ex.Expr) -> str:
    """Serialize an expression tree back to grammar text."""
    if isinstance(e, ex.Num):
        v = e.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(e, ex.Const):
        v = e.value
        re_s = f"{v.re.numerator}/{v.re.denominator}" if v.re.denominator != 1 else str(v.re.numerator)
        im_s = f"{v.im.numerator}/{v.im.denominator}" if v.im.denominator != 1 else str(v.im.numerator)
        if v.im == 0:
            return f"({re_s})"
        if v.re == 0:
            return f"(({im_s})*i)"
        return f"(({re_s})+({im_s})*i)"
    if isinstance(e, ex.FloatConst):
        z = e.value
        return f"(({z.real!r})+({z.imag!r})*i)"
    if isinstance(e, ex.Imag):
        return "i"
    if isinstance(e, ex.Var):
        return e.name
    if isinstance(e, ex.Neg):
        return f"(-{render_expr(e.a)})"
    if isinstance(e, ex.Add):
        return f"({render_expr(e.a)}+{render_expr(e.b)})"
    if isinstance(e, ex.Sub):
        return f"({render_expr(e.a)}-{render_expr(e.b)})"
    if isinstance(e, ex.Mul):
        return f"({render_expr(e.a)}*{render_expr(e.b)})"
    if isinstance(e, ex.Div):
        return f"({render_expr(e.a)}/{render_expr(e.b)})"
    if isinstance(e, ex.Pow):
        return f"({render_expr(e.a)}^{e.k})"
    raise TypeError(f"unknown expression node {e!r}")


# -- evaluation and composition ----------------------------------------------


def map_value(F: MapSpec, z_values, w_value, mode: str | None = None) -> list[Scalar]:
    """Evaluate all components of F at a source point."""
    if len(z_values) != F.n:
        raise DimensionError(f"point arity {len(z_values)} does not match n={F.n}")
    vals = list(z_values) + [w_value]
    if mode is None:
        point_mode = EXACT if all(isinstance(v, (int, Fraction, ComplexRational)) for v in vals) else FLOAT
        mode = join_modes(F.mode, point_mode)
    env = {f"z{k + 1}": z_values[k] for k in range(F.n)}
    env["w"] = w_value
    return [ex.eval_scalar(c, env, mode) for c in F.components]


def compose_mapspec(outer: MapSpec, inner: MapSpec, name: str | None = None) -> MapSpec:
    """Symbolic composition outer o inner by tree substitution."""
    if outer.model != inner.model:
        raise DimensionError("model mismatch in composition")
    if outer.n != inner.N:
        raise DimensionError(f"cannot compose: outer n={outer.n}, inner N={inner.N}")
    bindings = {f"z{k + 1}": inner.components[k] for k in range(outer.n)}
    bindings["w"] = inner.components[outer.n]
    comps = tuple(ex.substitute_vars(c, bindings) for c in outer.components)
    return MapSpec(outer.model, inner.n, outer.N, comps, name)


def identity_jets(n: int, order: int, mode: str) -> list[Jet]:
    """Jets of the identity chart (z_1..z_n, w) at the origin."""
    return [Jet.z_var(k, n, order, mode) for k in range(n)] + [Jet.u_var(n, order, mode)]


def map_jets(F: MapSpec, args: list[Jet], order: int, mode: str) -> JetVector:
    """Substitute jets for the source variables of F (holomorphic encoding)."""
    n_vars = args[0].n
    env = {f"z{k + 1}": args[k] for k in range(F.n)}
    env["w"] = args[F.n]
    return JetVector(tuple(ex.eval_jet(c, env, n_vars, order, mode) for c in F.components))


def compose_jet_map(outer: JetVector, inner: list[Jet]) -> JetVector:
    """Compose jet vectors: outer holomorphic in (z_1..z_m, w), inner jets plugged in.

    Sound for weighted truncation when inner z-components have weighted order
    >= 1 and the inner w-component has weighted order >= 2.
    """
    m = len(inner) - 1
    for j in range(m):
        if inner[j].weighted_order() < 1:
            raise MathDomainError("jet composition needs vanishing inner z-components")
    if inner[m].weighted_order() < 2:
        raise MathDomainError("jet composition needs an inner w-component of weighted order >= 2")
    n = inner[0].n
    order = min(j.order for j in inner)
    mode = join_modes(*(j.mode for j in inner), outer.mode)
    out_entries = []
    for comp in outer:
        if not comp.is_holomorphic():
            raise MathDomainError("jet composition requires holomorphic outer jets")
        acc = Jet.zero(n, order, mode)
        for mon, c in comp.terms.items():
            term = Jet.const(c, n, order, mode)
            for j in range(m):
                for _ in range(mon.z[j]):
                    term = term * inner[j]
            for _ in range(mon.u):
                term = term * inner[m]
            acc = acc + term
        out_entries.append(acc)
    return JetVector(tuple(out_entries))


# -- Cayley transform ---------------------------------------------------------


def _rho_bindings(n: int) -> dict[str, ex.Expr]:
    """Variable bindings realizing rho(z, w) = (2z/(1-iw), (1+iw)/(1-iw))."""
    one = ex.Num(Fraction(1))
    two = ex.Num(Fraction(2))
    w = ex.Var("w")
    denom = ex.Sub(one, ex.Mul(ex.Imag(), w))
    out: dict[str, ex.Expr] = {}
    for k in range(n):
        out[f"z{k + 1}"] = ex.Div(ex.Mul(two, ex.Var(f"z{k + 1}")), denom)
    out["w"] = ex.Div(ex.Add(one, ex.Mul(ex.Imag(), w)), denom)
    return out


def _rho_inv_bindings(n: int) -> dict[str, ex.Expr]:
    """Variable bindings realizing rho^{-1}(zeta, eta) = (zeta/(1+eta), i(1-eta)/(1+eta))."""
    one = ex.Num(Fraction(1))
    w = ex.Var("w")
    denom = ex.Add(one, w)
    out: dict[str, ex.Expr] = {}
    for k in range(n):
        out[f"z{k + 1}"] = ex.Div(ex.Var(f"z{k + 1}"), denom)
    out["w"] = ex.Div(ex.Mul(ex.Imag(), ex.Sub(one, w)), denom)
    return out


def cayley_point(direction: str, z_values, w_value) -> tuple[list[Scalar], Scalar]:
    """Apply rho (siegel->ball) or rho^{-1} (ball->siegel) to a point."""
    vals = list(z_values) + [w_value]
    mode = EXACT if all(isinstance(v, (int, Fraction, ComplexRational)) for v in vals) else FLOAT
    one = coerce(1, mode)
    i = coerce(ComplexRational.of(0, 1), mode)
    w = coerce(w_value, mode)
    if direction == "siegel->ball":
        denom = one - i * w
        if abs_s(denom) == 0:
            raise PoleError("Cayley pole at the requested point")
        return [coerce(2, mode) * coerce(v, mode) / denom for v in z_values], (one + i * w) / denom
    if direction == "ball->siegel":
        denom = one + w
        if abs_s(denom) == 0:
            raise PoleError("Cayley pole at the requested point")
        return [coerce(v, mode) / denom for v in z_values], i * (one - w) / denom
    raise MathDomainError(f"unknown Cayley direction {direction!r}")


def cayley(F: MapSpec) -> MapSpec:
    """Transport F across the Cayley transform, flipping its model tag.

    ball -> siegel returns rho_N^{-1} o F o rho_n;
    siegel -> ball returns rho_N o F o rho_n^{-1}.
    """
    if F.model == BALL:
        inner = _rho_bindings(F.n)
        mid = tuple(ex.substitute_vars(c, inner) for c in F.components)
        outer = _rho_inv_bindings(F.N)
        comps = tuple(ex.substitute_vars(outer[v], {f"z{k + 1}": mid[k] for k in range(F.N)} | {"w": mid[F.N]})
                      for v in [f"z{k + 1}" for k in range(F.N)] + ["w"])
        result = MapSpec(SIEGEL, F.n, F.N, comps, F.name)
    else:
        inner = _rho_inv_bindings(F.n)
        mid = tuple(ex.substitute_vars(c, inner) for c in F.components)
        outer = _rho_bindings(F.N)
        comps = tuple(ex.substitute_vars(outer[v], {f"z{k + 1}": mid[k] for k in range(F.N)} | {"w": mid[F.N]})
                      for v in [f"z{k + 1}" for k in range(F.N)] + ["w"])
        result = MapSpec(BALL, F.n, F.N, comps, F.name)
    _check_model_valid(result)
    return result


def _check_model_valid(F: MapSpec) -> None:
    probes = [[Fraction(j, 7) for _ in range(F.n)] for j in (0, 1, 2)]
    ok = False
    for j, zs in enumerate(probes):
        try:
            if F.model == SIEGEL:
                p = BoundaryPoint.of(zs, Fraction(j, 5))
                map_value(F, list(p.z), p.w)
            else:
                map_value(F, [Fraction(0)] * F.n, Fraction(j, 5))
            ok = True
            break
        except PoleError:
            continue
    if not ok:
        raise MathDomainError("composed map has vanishing denominators at all test points")


# -- translations sigma / tau and jets ----------------------------------------


def sigma0_components(p: BoundaryPoint) -> tuple[ex.Expr, ...]:
    """Components of sigma^0_p(z, w) = (z + z0, w + w0 + 2i<z, conj(z0)>)."""
    n = p.n
    comps: list[ex.Expr] = []
    for k in range(n):
        comps.append(ex.Add(ex.Var(f"z{k + 1}"), ex.scalar_to_expr(p.z[k])))
    acc: ex.Expr = ex.Add(ex.Var("w"), ex.scalar_to_expr(p.w))
    two_i = ComplexRational.of(0, 2)
    for k in range(n):
        coeff = coerce(two_i, p.mode) * conj_s(coerce(p.z[k], p.mode))
        acc = ex.Add(acc, ex.Mul(ex.scalar_to_expr(coeff), ex.Var(f"z{k + 1}")))
    comps.append(acc)
    return tuple(comps)


def sigma0_mapspec(p: BoundaryPoint) -> MapSpec:
    return MapSpec(SIEGEL, p.n, p.n, sigma0_components(p), "sigma0")


def tauF_components(F: MapSpec, p: BoundaryPoint) -> tuple[ex.Expr, ...]:
    """Components of tau^F_p, built from the value F(p)."""
    values = map_value(F, list(p.z), p.w)
    ft, g = values[: F.N], values[F.N]
    comps: list[ex.Expr] = []
    for k in range(F.N):
        comps.append(ex.Sub(ex.Var(f"z{k + 1}"), ex.scalar_to_expr(ft[k])))
    mode = join_modes(F.mode, p.mode)
    acc: ex.Expr = ex.Sub(ex.Var("w"), ex.scalar_to_expr(conj_s(coerce(g, mode))))
    two_i = coerce(ComplexRational.of(0, 2), mode)
    for k in range(F.N):
        coeff = two_i * conj_s(coerce(ft[k], mode))
        acc = ex.Sub(acc, ex.Mul(ex.scalar_to_expr(coeff), ex.Var(f"z{k + 1}")))
    comps.append(acc)
    return tuple(comps)


def tauF_mapspec(F: MapSpec, p: BoundaryPoint) -> MapSpec:
    return MapSpec(SIEGEL, F.N, F.N, tauF_components(F, p), "tauF")


@dataclass(frozen=True)
class MapJets:
    """Jets of a translated map F_p at the origin."""

    holomorphic: JetVector
    restricted: JetVector
    base_point: BoundaryPoint
    n: int
    N: int
    order: int
    mode: str


def jets_at(F: MapSpec, p: BoundaryPoint, order: int = 4) -> MapJets:
    """Weighted jets of F_p = tau^F_p o F o sigma^0_p at 0 (holomorphic and restricted)."""
    if F.model != SIEGEL:
        raise MathDomainError("jets_at requires a Siegel-model map; apply cayley first")
    if p.n != F.n:
        raise DimensionError(f"point arity {p.n} does not match n={F.n}")
    mode = join_modes(F.mode, p.mode)
    ident = identity_jets(F.n, order, mode)
    sig = sigma0_mapspec(p)
    s_jets = map_jets(sig, ident, order, mode)
    f_jets = map_jets(F, list(s_jets), order, mode)
    tau = tauF_mapspec(F, p)
    t_jets = map_jets(tau, list(f_jets), order, mode)
    holo = t_jets
    restr = restrict_to_heisenberg(holo)
    return MapJets(holo, restr, p, F.n, F.N, order, mode)


def jets_of_raw(F: MapSpec, order: int = 4) -> MapJets:
    """Jets of F itself at 0 (no translation); F(0) need not be 0."""
    if F.model != SIEGEL:
        raise MathDomainError("jets require a Siegel-model map")
    mode = F.mode
    ident = identity_jets(F.n, order, mode)
    holo = map_jets(F, ident, order, mode)
    return MapJets(holo, restrict_to_heisenberg(holo), origin(F.n), F.n, F.N, order, mode)


def properness_residual_jet(restricted: JetVector, N: int) -> Jet:
    """Residual jet of sum f fbar + sum phi phibar + (i/2)(g - gbar) on the hypersurface."""
    g = restricted[N]
    total = (g - g.conj()).scale(ComplexRational.of(0, Fraction(1, 2)))
    for k in range(N):
        total = total + restricted[k] * restricted[k].conj()
    return total


def verify_proper(F: MapSpec, p: BoundaryPoint | None = None, order: int = 4) -> Jet:
    """Properness residual jet of F at p (default: the origin).

    A zero jet certifies properness to the truncation order; a nonzero
    residual is a report, not an error.  Ball-model maps are transported to
    the Siegel model first.
    """
    G = cayley(F) if F.model == BALL else F
    if p is None:
        p = origin(G.n)
    mj = jets_at(G, p, order)
    return properness_residual_jet(mj.restricted, G.N)
