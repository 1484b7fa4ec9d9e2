"""Request handlers: one per command, shared by the FastAPI app and the CLI."""
from __future__ import annotations

import json
import time

from .. import expr as ex
from ..automorphisms import parse_automorphism
from ..errors import InconsistencyError
from ..frames import (
    build_general_lift,
    build_spherical_lift,
    mc_curvature_residual,
    mc_relation_residuals,
    pullback_mc,
)
from ..maps import BoundaryPoint, MapSpec, cayley, jets_at, parse_map
from ..normalization import geometric_rank, normalize_star2, normalize_star3
from ..reports import (
    RunReport,
    digest_of,
    map_entry,
    matrix_entry,
    point_entry,
    residual_entry,
    scalar_entry,
)
from ..sampling import boundary_points
from ..scalars import ComplexRational
from ..sff import check_equivalence, flatness_verdict, sff_extrinsic, sff_frame
from .models import (
    CheckAutRequest,
    FlatRequest,
    FrameRequest,
    MapDocument,
    NormalizeRequest,
    PointModel,
    RankRequest,
    ReportResponse,
    SffRequest,
)


def _mapspec(doc: MapDocument) -> MapSpec:
    F = parse_map(doc.model_dump_json(exclude_none=True))
    return cayley(F) if F.model == "ball" else F


def _scalar(text: str):
    tree = ex.parse_expression(text, set())
    mode = "exact" if ex.expr_mode(tree) == "exact" else "float"
    return ex.eval_scalar(tree, {}, mode)


def _point(pm: PointModel) -> BoundaryPoint:
    z = [_scalar(s) for s in pm.z]
    u = _scalar(pm.u)
    if isinstance(u, ComplexRational):
        return BoundaryPoint.of(z, u.re)
    return BoundaryPoint.of(z, complex(u).real)


def _points(F: MapSpec, points: list[PointModel] | None, samples: int, seed: int) -> list[BoundaryPoint]:
    out = [_point(pm) for pm in (points or [])]
    if samples > 0:
        out.extend(boundary_points(F.n, samples, seed))
    return out


def _digest(req) -> str:
    return digest_of(req.model_dump_json())


def handle_rank(req: RankRequest) -> ReportResponse:
    t0 = time.perf_counter()
    F = _mapspec(req.map)
    pts = _points(F, req.points, req.samples, req.seed)
    per_point = []
    for p in pts:
        rep = geometric_rank(F, p, tol=req.rank_tol, order=req.order)
        per_point.append({
            "point": point_entry(p),
            "rank": rep.rank,
            "singular_values": [float(s) for s in rep.singular_values],
            "gap": rep.gap(),
            "mode": rep.mode,
            "star2_residuals": {k: residual_entry(v, 1e-7) for k, v in sorted(rep.star2_residuals.items())},
        })
    k0 = max((r["rank"] for r in per_point), default=0)
    P = k0 * (2 * F.n - k0 - 1) // 2
    report = RunReport(
        command="rank",
        inputs_digest=_digest(req),
        parameters={"samples": req.samples, "seed": req.seed, "rank_tol": req.rank_tol, "order": req.order},
        results={
            "map": map_entry(F),
            "points": per_point,
            "advisory": "rank is lower semi-continuous: it can only drop on thin sets",
            "kappa0": k0,
            "codimension_bound": {"P": P, "satisfied": F.N >= F.n + P},
        },
        verdicts={"kappa0": k0},
        mode="exact" if all(r["mode"] == "exact" for r in per_point) else "float",
        timing_seconds=time.perf_counter() - t0,
    )
    return ReportResponse(command="rank", report=report.as_dict())


def handle_normalize(req: NormalizeRequest) -> ReportResponse:
    t0 = time.perf_counter()
    F = _mapspec(req.map)
    p = _point(req.point) if req.point else BoundaryPoint.of([0] * F.n, 0)
    if req.stage == "star2":
        mj = jets_at(F, p, req.order)
        s2 = normalize_star2(mj.holomorphic, F.n, F.N)
        results = {
            "map": map_entry(F),
            "point": point_entry(p),
            "stage": "star2",
            "residuals": {k: residual_entry(v, 1e-9) for k, v in sorted(s2.residuals.items())},
            "a_matrix": matrix_entry(s2.a_matrix),
            "target_gauge_matrix": matrix_entry(s2.tau_matrix),
        }
        mode = s2.mode
        verdicts = {"normalized": bool(s2.max_residual() <= 1e-7)}
    else:
        s3 = normalize_star3(F, p, rank_tol=req.rank_tol, order=req.order)
        md = s3.mu_data
        results = {
            "map": map_entry(F),
            "point": point_entry(p),
            "stage": "star3",
            "residuals": {k: residual_entry(v, 1e-9) for k, v in sorted(s3.residuals.items())},
            "a_matrix": matrix_entry(s3.a_matrix),
            "mu": [scalar_entry(m) for m in md.mu],
            "mu_pairs": {f"{j},{l}": scalar_entry(v) for (j, l), v in sorted(md.mu_pairs.items())},
            "index_sets": {"S0": md.S0, "S": md.S},
            "kappa0": md.kappa0,
            "codimension_bound": {"P": md.bound_P, "satisfied": md.bound_ok},
            "mu_relations_residual": residual_entry(md.relations_residual, 1e-9),
            "flags": s3.flags,
            "source_gauge_matrix": matrix_entry(s3.sigma_matrix),
            "target_gauge_matrix": matrix_entry(s3.tau_matrix),
        }
        mode = s3.mode
        verdicts = {"normalized": bool(s3.max_residual() <= 1e-7), "kappa0": md.kappa0}
    report = RunReport(
        command="normalize",
        inputs_digest=_digest(req),
        parameters={"stage": req.stage, "rank_tol": req.rank_tol, "order": req.order},
        results=results,
        verdicts=verdicts,
        mode=mode,
        timing_seconds=time.perf_counter() - t0,
    )
    return ReportResponse(command="normalize", report=report.as_dict())


def handle_sff(req: SffRequest) -> ReportResponse:
    t0 = time.perf_counter()
    F = _mapspec(req.map)
    pts = _points(F, req.points, req.samples, req.seed)
    per_point = []
    inconsistent = 0
    for p in pts:
        fr = sff_frame(F, p, order=req.order)
        extr = sff_extrinsic(F, p, order=req.order, tol=req.rank_tol)
        eq = check_equivalence(F, p, tol=req.vanish_tol, order=req.order, rank_tol=req.rank_tol)
        if not eq.consistent:
            inconsistent += 1
        t = fr.tensor
        entry = {
            "point": point_entry(p),
            "frame": {
                "q": [[[scalar_entry(t.q[mu][a][b]) for b in range(t.n)] for a in range(t.n)]
                      for mu in range(t.N - t.n)],
                "norm": t.norm,
                "symmetry_defect": residual_entry(t.symmetry_defect, 1e-9),
                "extraction_residual": residual_entry(t.extraction_residual, 1e-9),
                "mode": t.mode,
            },
            "extrinsic": {
                "dim_E1": extr.dim_E1,
                "rank": extr.ii_rank,
                "norm": extr.ii_norm,
            },
            "equivalence": {
                "vanish_agree": eq.vanish_agree,
                "rank_agree": eq.rank_agree,
                "consistent": eq.consistent,
                "frame_rank": eq.frame_rank,
                "extrinsic_rank": eq.extrinsic_rank,
            },
        }
        if t.reduction2_residual is not None:
            entry["frame"]["reduction2_residual"] = residual_entry(t.reduction2_residual, 1e-9)
        per_point.append(entry)
    report = RunReport(
        command="sff",
        inputs_digest=_digest(req),
        parameters={"samples": req.samples, "seed": req.seed, "vanish_tol": req.vanish_tol,
                    "rank_tol": req.rank_tol, "order": req.order},
        results={"map": map_entry(F), "points": per_point, "inconsistent_points": inconsistent},
        verdicts={"definitions_agree": inconsistent == 0},
        mode="exact" if all(e["frame"]["mode"] == "exact" for e in per_point) else "float",
        timing_seconds=time.perf_counter() - t0,
    )
    if inconsistent:
        raise InconsistencyError(
            f"frame and extrinsic second fundamental forms disagree at {inconsistent} point(s); "
            f"report: {report.structured()}"
        )
    return ReportResponse(command="sff", report=report.as_dict())


def handle_flat(req: FlatRequest) -> ReportResponse:
    t0 = time.perf_counter()
    F = _mapspec(req.map)
    v = flatness_verdict(F, samples=req.samples, seed=req.seed,
                         vanish_tol=req.vanish_tol, rank_tol=req.rank_tol, order=req.order)
    results = {
        "map": map_entry(F),
        "max_sff_norm": v.max_sff_norm,
        "kappa0": v.kappa0,
        "samples_used": len(v.sample_points),
        "diagnostics": v.diagnostics,
        "witness": map_entry(v.witness) if v.witness is not None else None,
        "witness_residual": (residual_entry(v.witness_residual, req.vanish_tol)
                             if v.witness_residual is not None else None),
    }
    report = RunReport(
        command="flat",
        inputs_digest=_digest(req),
        parameters={"samples": req.samples, "seed": req.seed, "vanish_tol": req.vanish_tol,
                    "rank_tol": req.rank_tol, "order": req.order},
        results=results,
        verdicts={"flatness": v.verdict},
        mode="float",
        timing_seconds=time.perf_counter() - t0,
    )
    return ReportResponse(command="flat", report=report.as_dict())


def handle_frame(req: FrameRequest) -> ReportResponse:
    t0 = time.perf_counter()
    F = _mapspec(req.map)
    pts = _points(F, req.points, req.samples, req.seed)
    per_point = []
    for p in pts:
        if req.kind == "spherical":
            frame = build_spherical_lift(F, p, order=req.order, tol=req.frame_tol)
        else:
            frame = build_general_lift(jets_at(F, p, req.order), tol=req.frame_tol)
        mc = pullback_mc(frame)
        rel = mc_relation_residuals(mc, at_base=True)
        entry = {
            "point": point_entry(p),
            "kind": frame.kind,
            "mode": frame.mode,
            "direct_orthonormal": frame.direct_orthonormal,
            "frame_residuals": {k: residual_entry(v, req.frame_tol if k.startswith("qframe") else 1e-9)
                                 for k, v in sorted(frame.residuals.items())},
            "qframe_products": frame.qframe_product_table(),
            "maurer_cartan_residuals": {k: residual_entry(v, 1e-9) for k, v in sorted(rel.items())},
            "frame_at_base": matrix_entry(frame.at_base()),
        }
        if req.order >= 6:
            entry["curvature_residual"] = residual_entry(mc_curvature_residual(mc), 1e-8)
        per_point.append(entry)
    report = RunReport(
        command="frame",
        inputs_digest=_digest(req),
        parameters={"samples": req.samples, "seed": req.seed, "kind": req.kind,
                    "frame_tol": req.frame_tol, "order": req.order},
        results={"map": map_entry(F), "points": per_point},
        verdicts={"all_adapted": all(
            all(v["pass"] for v in e["frame_residuals"].values()) for e in per_point)},
        mode="exact" if all(e["mode"] == "exact" for e in per_point) else "float",
        timing_seconds=time.perf_counter() - t0,
    )
    return ReportResponse(command="frame", report=report.as_dict())


def handle_check_aut(req: CheckAutRequest) -> ReportResponse:
    t0 = time.perf_counter()
    doc = req.automorphism.model_dump(by_alias=True, exclude_none=True)
    aut = parse_automorphism(json.dumps(doc))
    m = aut.matrix.membership()
    report = RunReport(
        command="check-aut",
        inputs_digest=_digest(req),
        parameters={"tol": req.tol},
        results={
            "kind": aut.params.kind,
            "dim": aut.dim,
            "membership": m.as_dict(),
            "matrix": matrix_entry(aut.matrix.as_lists()),
            "rational_form": map_entry(aut.rational_form),
        },
        verdicts={"is_su": m.is_su, "is_glq": m.is_glq},
        mode=aut.mode,
        timing_seconds=time.perf_counter() - t0,
    )
    return ReportResponse(command="check-aut", report=report.as_dict())
