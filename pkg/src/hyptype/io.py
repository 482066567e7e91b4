"""JSON documents for curves, involutions, and certificates."""

from __future__ import annotations

import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any

from .errors import GraphError
from .graph import GraphLike, TropicalCurve, WeightedGraph, as_curve
from .hyperelliptic import Involution
from .matroid import TwoIsomorphism
from .minors import MinorModel

log = logging.getLogger(__name__)


class DocumentError(GraphError):
    """Invalid graph document; ``path`` points at the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _length(value, path: str) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise DocumentError(path, "lengths must be integers or rational strings like '3/2'")
    if isinstance(value, int):
        out = Fraction(value)
    elif isinstance(value, str):
        try:
            out = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise DocumentError(path, f"cannot parse length {value!r}") from None
    else:
        raise DocumentError(path, f"unsupported length {value!r}")
    if out <= 0:
        raise DocumentError(path, "lengths must be positive")
    return out


def parse_document(doc: Any) -> TropicalCurve:
    if not isinstance(doc, dict):
        raise DocumentError("$", "expected an object")
    verts = doc.get("vertices")
    edges = doc.get("edges", [])
    if not isinstance(verts, list):
        raise DocumentError("$.vertices", "expected a list")
    if not isinstance(edges, list):
        raise DocumentError("$.edges", "expected a list")
    weights: dict[str, int] = {}
    for i, v in enumerate(verts):
        path = f"$.vertices[{i}]"
        if not isinstance(v, dict) or not isinstance(v.get("id"), str):
            raise DocumentError(path + ".id", "expected a string id")
        w = v.get("weight", 0)
        if not isinstance(w, int) or isinstance(w, bool) or w < 0:
            raise DocumentError(path + ".weight", "expected a nonnegative integer")
        if v["id"] in weights:
            raise DocumentError(path + ".id", f"duplicate vertex id {v['id']!r}")
        weights[v["id"]] = w
    ends: dict[str, tuple[str, str]] = {}
    lengths: dict[str, Fraction] = {}
    for i, e in enumerate(edges):
        path = f"$.edges[{i}]"
        if not isinstance(e, dict) or not isinstance(e.get("id"), str):
            raise DocumentError(path + ".id", "expected a string id")
        eid = e["id"]
        if eid in ends:
            raise DocumentError(path + ".id", f"duplicate edge id {eid!r}")
        pair = e.get("ends")
        if not isinstance(pair, list) or len(pair) != 2:
            raise DocumentError(path + ".ends", "expected two vertex ids")
        for k, x in enumerate(pair):
            if x not in weights:
                raise DocumentError(f"{path}.ends[{k}]", f"unknown vertex {x!r}")
        ends[eid] = (pair[0], pair[1])
        if "length" in e:
            lengths[eid] = _length(e["length"], path + ".length")
        else:
            log.warning("edge %s has no length; using 1", eid)
            lengths[eid] = Fraction(1)
    try:
        return TropicalCurve(WeightedGraph(weights, ends), lengths)
    except GraphError as exc:
        raise DocumentError("$", str(exc)) from exc


def format_length(x: Fraction) -> str:
    return str(Fraction(x))


def serialize(obj: GraphLike) -> dict:
    c = as_curve(obj)
    g = c.graph
    return {
        "vertices": [{"id": v, "weight": w} for v, w in g.weights.items()],
        "edges": [{"id": e, "ends": list(p), "length": format_length(c.lengths[e])}
                  for e, p in g.ends.items()],
    }


def load_curve(path) -> TropicalCurve:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError("$", f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError("$", f"invalid JSON: {exc}") from exc
    return parse_document(doc)


def dump_curve(c: GraphLike, path) -> None:
    Path(path).write_text(json.dumps(serialize(c), indent=2) + "\n", encoding="utf-8")


# ------------------------------------------------------------- other objects

def involution_to_json(t: Involution) -> dict:
    return {
        "vertex_map": dict(t.vertex_map),
        "half_edge_map": [[e, s, f, r] for (e, s), (f, r) in t.half_edge_map.items()],
        "flipped": sorted(t.flipped),
    }


def involution_from_json(data: dict) -> Involution:
    try:
        vmap = {str(k): str(v) for k, v in data["vertex_map"].items()}
        hmap = {(e, int(s)): (f, int(r)) for e, s, f, r in data["half_edge_map"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError("$", f"malformed involution: {exc}") from exc
    return Involution(vmap, hmap)


def witness_to_json(w: TwoIsomorphism) -> dict:
    return {"mapping": dict(w.mapping), "length_preserving": w.length_preserving}


def witness_from_json(data: dict) -> TwoIsomorphism:
    return TwoIsomorphism(dict(data["mapping"]), bool(data["length_preserving"]))


def certificate_to_json(cert) -> dict:
    out: dict[str, Any] = {"hyperelliptic_type": cert.verdict}
    if cert.minor is not None:
        out["minor"] = cert.minor.to_json()
    if cert.model is not None:
        out["model"] = serialize(cert.model)
        out["involution"] = involution_to_json(cert.involution)
        out["witness"] = witness_to_json(cert.witness)
    return out


def certificate_from_json(data: dict):
    from .decision import HyptypeCertificate

    verdict = bool(data["hyperelliptic_type"])
    if not verdict:
        return HyptypeCertificate(False, minor=MinorModel.from_json(data["minor"]))
    if "model" not in data:
        return HyptypeCertificate(True)
    return HyptypeCertificate(
        True,
        model=parse_document(data["model"]),
        involution=involution_from_json(data["involution"]),
        witness=witness_from_json(data["witness"]),
    )
