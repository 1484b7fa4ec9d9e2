"""Thin command-line client over the service handlers.

Reads map-spec / automorphism files, builds the same request models the HTTP
endpoints accept, dispatches in-process by default (or to a remote service
with --server), and renders the response.  Exit codes: 0 success, 1 usage,
2 parse error, 3 math-domain error, 4 internal inconsistency.
"""
from __future__ import annotations

import argparse
import json
import sys

from .errors import CRFlatError, MapParseError, UsageError
from .service import handlers
from .service.models import (
    AutDocument,
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


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse defaults to exit code 2; usage is 1 here
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _load_map_document(path: str) -> MapDocument:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError as exc:
        raise UsageError(f"map-spec file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise MapParseError(f"invalid JSON in {path}: {exc.msg}", exc.lineno, exc.colno) from exc
    try:
        return MapDocument(**doc)
    except Exception as exc:
        raise MapParseError(f"invalid map-spec document {path}: {exc}") from exc


def _load_aut_document(path: str) -> AutDocument:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError as exc:
        raise UsageError(f"automorphism file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise MapParseError(f"invalid JSON in {path}: {exc.msg}", exc.lineno, exc.colno) from exc
    try:
        return AutDocument(**doc)
    except Exception as exc:
        raise MapParseError(f"invalid automorphism document {path}: {exc}") from exc


def _parse_points(raw: list[str] | None) -> list[PointModel] | None:
    if not raw:
        return None
    out = []
    for item in raw:
        parts = item.split(";")
        if len(parts) < 2:
            raise UsageError("--point takes 'z1;...;zn;u' with expression coordinates")
        out.append(PointModel(z=parts[:-1], u=parts[-1]))
    return out


def _dispatch(command: str, request, server: str | None) -> ReportResponse:
    if server is None:
        fn = {
            "rank": handlers.handle_rank,
            "normalize": handlers.handle_normalize,
            "sff": handlers.handle_sff,
            "flat": handlers.handle_flat,
            "frame": handlers.handle_frame,
            "check-aut": handlers.handle_check_aut,
        }[command]
        return fn(request)
    import httpx

    url = server.rstrip("/") + "/v1/" + command
    resp = httpx.post(url, json=json.loads(request.model_dump_json(by_alias=True)), timeout=600.0)
    if resp.status_code != 200:
        body = resp.json()
        err = CRFlatError(body.get("detail", "remote error"))
        err.exit_code = int(body.get("exit_code", 3))
        raise err
    return ReportResponse(**resp.json())


def _emit(response: ReportResponse, fmt: str) -> None:
    from .reports import RunReport

    if fmt == "json":
        body = {"command": response.command, "exit_code": response.exit_code, "report": response.report}
        sys.stdout.write(json.dumps(body, sort_keys=True, indent=2) + "\n")
        return
    rep = response.report
    rr = RunReport(
        command=rep.get("command", response.command),
        inputs_digest=rep.get("inputs_digest", ""),
        parameters=rep.get("parameters", {}),
        results=rep.get("results", {}),
        verdicts=rep.get("verdicts", {}),
        mode=rep.get("mode", ""),
    )
    sys.stdout.write(rr.text())


def build_parser() -> _Parser:
    parser = _Parser(prog="crflat", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, samples_default: int):
        p.add_argument("map", help="map-spec JSON file")
        p.add_argument("--samples", type=int, default=samples_default)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--order", type=int, default=4)
        p.add_argument("--point", action="append", help="z1;...;zn;u (repeatable)")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--server", help="base URL of a running crflat service")

    p_rank = sub.add_parser("rank", help="geometric rank at sample points and kappa_0")
    common(p_rank, 5)
    p_rank.add_argument("--rank-tol", type=float, default=1e-6)

    p_norm = sub.add_parser("normalize", help="stage-two/three normal form at a point")
    common(p_norm, 0)
    p_norm.add_argument("--stage", choices=("star2", "star3"), default="star3")
    p_norm.add_argument("--rank-tol", type=float, default=1e-6)

    p_sff = sub.add_parser("sff", help="second fundamental form, both definitions")
    common(p_sff, 3)
    p_sff.add_argument("--vanish-tol", type=float, default=1e-8)
    p_sff.add_argument("--rank-tol", type=float, default=1e-6)

    p_flat = sub.add_parser("flat", help="flatness verdict with witness")
    common(p_flat, 20)
    p_flat.add_argument("--vanish-tol", type=float, default=1e-8)
    p_flat.add_argument("--rank-tol", type=float, default=1e-6)

    p_frame = sub.add_parser("frame", help="adapted lift residuals and Maurer-Cartan relations")
    common(p_frame, 1)
    p_frame.set_defaults(order=6)
    p_frame.add_argument("--kind", choices=("spherical", "general"), default="spherical")
    p_frame.add_argument("--frame-tol", type=float, default=1e-10)

    p_aut = sub.add_parser("check-aut", help="SU/GL^Q membership of an automorphism file")
    p_aut.add_argument("automorphism", help="automorphism JSON file")
    p_aut.add_argument("--tol", type=float, default=1e-12)
    p_aut.add_argument("--format", choices=("text", "json"), default="text")
    p_aut.add_argument("--server", help="base URL of a running crflat service")

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)

    return parser


def run(argv: list[str]) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .service.app import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    if args.command == "check-aut":
        request = CheckAutRequest(automorphism=_load_aut_document(args.automorphism), tol=args.tol)
    else:
        doc = _load_map_document(args.map)
        points = _parse_points(getattr(args, "point", None))
        if args.command == "rank":
            request = RankRequest(map=doc, points=points, samples=args.samples, seed=args.seed,
                                  rank_tol=args.rank_tol, order=args.order)
        elif args.command == "normalize":
            request = NormalizeRequest(map=doc, point=points[0] if points else None,
                                       stage=args.stage, rank_tol=args.rank_tol, order=args.order)
        elif args.command == "sff":
            request = SffRequest(map=doc, points=points, samples=args.samples, seed=args.seed,
                                 vanish_tol=args.vanish_tol, rank_tol=args.rank_tol, order=args.order)
        elif args.command == "flat":
            request = FlatRequest(map=doc, samples=args.samples, seed=args.seed,
                                  vanish_tol=args.vanish_tol, rank_tol=args.rank_tol, order=args.order)
        elif args.command == "frame":
            request = FrameRequest(map=doc, points=points, samples=args.samples, seed=args.seed,
                                   kind=args.kind, frame_tol=args.frame_tol, order=args.order)
        else:  # pragma: no cover
            raise UsageError(f"unknown command {args.command}")
    response = _dispatch(args.command, request, args.server)
    _emit(response, args.format)
    return response.exit_code


def main() -> None:
    try:
        sys.exit(run(sys.argv[1:]))
    except CRFlatError as exc:
        sys.stderr.write(f"error: {exc}\n")
        sys.exit(exc.exit_code)


if __name__ == "__main__":
    main()
