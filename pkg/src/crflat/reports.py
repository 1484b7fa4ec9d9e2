"""Deterministic run reports: canonical structured form plus a text rendering.

Structured reports are byte-reproducible for identical inputs and seed: keys
are sorted, numbers are plain JSON floats or exact-scalar strings tagged with
their mode, and wall time is deliberately excluded (it appears only in the
text rendering).
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

from . import linalg as la
from .maps import BoundaryPoint, MapSpec, mapspec_to_doc
from .scalars import ComplexRational, Scalar, format_scalar, to_complex


def scalar_entry(x: Scalar) -> dict:
    mode = "exact" if isinstance(x, ComplexRational) else "float"
    z = to_complex(x)
    return {"text": format_scalar(x), "re": z.real, "im": z.imag, "mode": mode}


def residual_entry(value: float, tol: float) -> dict:
    return {"value": float(value), "tol": float(tol), "pass": bool(float(value) <= float(tol))}


def point_entry(p: BoundaryPoint) -> dict:
    return {
        "z": [scalar_entry(v) for v in p.z],
        "u": scalar_entry(p.u),
        "mode": p.mode,
    }


def matrix_entry(M: la.Matrix) -> list[list[dict]]:
    return [[scalar_entry(x) for x in row] for row in M]


def map_entry(F: MapSpec) -> dict:
    return mapspec_to_doc(F)


def digest_of(*texts: str) -> str:
    h = hashlib.sha256()
    for t in texts:
        h.update(t.encode("utf-8"))
    return h.hexdigest()[:16]


@dataclass
class RunReport:
    command: str
    inputs_digest: str
    parameters: dict
    results: dict
    verdicts: dict = field(default_factory=dict)
    mode: str = "exact"
    timing_seconds: float | None = None

    def structured(self) -> str:
        body = {
            "command": self.command,
            "inputs_digest": self.inputs_digest,
            "parameters": self.parameters,
            "results": self.results,
            "verdicts": self.verdicts,
            "mode": self.mode,
        }
        return json.dumps(body, sort_keys=True, indent=2) + "\n"

    def as_dict(self) -> dict:
        return json.loads(self.structured())

    def text(self) -> str:
        lines = [f"crflat {self.command}", f"  inputs digest: {self.inputs_digest}", f"  mode: {self.mode}"]
        for k in sorted(self.parameters):
            lines.append(f"  {k}: {self.parameters[k]}")
        lines.append("")
        lines.extend(_render_block(self.results, indent=0))
        if self.verdicts:
            lines.append("")
            for k in sorted(self.verdicts):
                lines.append(f"verdict {k}: {self.verdicts[k]}")
        if self.timing_seconds is not None:
            lines.append("")
            lines.append(f"elapsed: {self.timing_seconds:.3f}s")
        return "\n".join(lines) + "\n"


def _render_block(obj: Any, indent: int) -> list[str]:
    pad = "  " * indent
    out: list[str] = []
    if isinstance(obj, dict):
        if set(obj) == {"value", "tol", "pass"}:
            mark = "ok" if obj["pass"] else "FAIL"
            return [f"{pad}{obj['value']:.3e}  (tol {obj['tol']:.1e})  {mark}"]
        if set(obj) == {"text", "re", "im", "mode"}:
            return [f"{pad}{obj['text']} [{obj['mode']}]"]
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)):
                out.append(f"{pad}{k}:")
                out.extend(_render_block(v, indent + 1))
            else:
                out.append(f"{pad}{k}: {v}")
        return out
    if isinstance(obj, list):
        if obj and all(_is_scalar_entry(v) for v in obj):
            return [f"{pad}[ " + ", ".join(v["text"] for v in obj) + " ]"]
        if obj and all(isinstance(v, list) and v and all(_is_scalar_entry(x) for x in v) for v in obj):
            return [f"{pad}[ " + ", ".join(x["text"] for x in row) + " ]" for row in obj]
        for i, v in enumerate(obj):
            if isinstance(v, (dict, list)):
                out.append(f"{pad}[{i}]")
                out.extend(_render_block(v, indent + 1))
            else:
                out.append(f"{pad}[{i}] {v}")
        return out
    return [f"{pad}{obj}"]


def _is_scalar_entry(v: Any) -> bool:
    return isinstance(v, dict) and set(v) == {"text", "re", "im", "mode"}
