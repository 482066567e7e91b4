"""Jacobian Gram matrices, the Torelli comparison, and the hyperelliptic-type decision."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .connectivity import three, transport_lengths, two_edge_connectivization
from .ears import (
    ensure_three_initial_ears,
    hedify,
    htedify,
    involution_from_hed,
    nested_ear_decomposition,
)
from .errors import GraphError, InvalidInvolutionError, PipelineError, SizeGuardError
from .graph import (
    GraphLike,
    TropicalCurve,
    WeightedGraph,
    _is_connected,
    are_isomorphic,
    as_curve,
    blocks,
    contract_edges,
    fresh_id,
    graph_of,
    induced_subcurve,
    stable_model,
)
from .hyperelliptic import (
    Involution,
    check_involution,
    fixed_points,
    hyperelliptify_lengths,
    is_hyperelliptic,
    is_strongly_hyperelliptic_type,
    quotient,
    subdivide_flipped_edge,
)
from .matroid import TwoIsomorphism, _spanning_forest, find_two_isomorphism, verify_two_isomorphism
from .minors import K4, L3, MinorModel, blocks_series_parallel, find_minor_model, verify_minor_model

MAX_SPANNING_SUBSETS = 200_000


# ------------------------------------------------------------- Gram matrices

@dataclass(frozen=True)
class GramMatrix:
    """Quadratic form on a cycle basis, padded with zero rows for vertex weights."""

    matrix: tuple
    cycles: tuple  # signed edge vectors, one per basis cycle
    weight_directions: int

    @property
    def size(self) -> int:
        return len(self.matrix)

    @property
    def cycle_block(self) -> list[list[Fraction]]:
        k = len(self.cycles)
        return [list(row[:k]) for row in self.matrix[:k]]

    def determinant(self) -> Fraction:
        return determinant(self.matrix)

    def cycle_determinant(self) -> Fraction:
        """Determinant of the nondegenerate block (ignores weight directions)."""
        return determinant(self.cycle_block)

    def rank(self) -> int:
        return _rank(self.matrix)


def _eliminate(rows):
    m = [list(map(Fraction, r)) for r in rows]
    n = len(m)
    det = Fraction(1)
    rank = 0
    cols = len(m[0]) if m else 0
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, n) if m[i][c] != 0), None)
        if pivot is None:
            det = Fraction(0)
            continue
        if pivot != r:
            m[r], m[pivot] = m[pivot], m[r]
            det = -det
        det *= m[r][c]
        for i in range(r + 1, n):
            if m[i][c]:
                factor = m[i][c] / m[r][c]
                m[i] = [x - factor * y for x, y in zip(m[i], m[r])]
        r += 1
        rank += 1
    return det, rank


def determinant(rows) -> Fraction:
    if not rows:
        return Fraction(1)
    return _eliminate(rows)[0]


def _rank(rows) -> int:
    return _eliminate(rows)[1] if rows else 0


def _signed_cycles(g: WeightedGraph) -> list[dict[str, int]]:
    """Fundamental cycles as signed vectors: each non-tree edge runs forward, tree path closes it."""
    tree, parent = _spanning_forest(g)
    out = []
    for e, (a, b) in g.ends.items():
        if e in tree:
            continue
        vec = {e: 1}
        if a != b:
            # walk b -> root and a -> root; the cycle is e (a->b) then b ~> a
            def chain(v):
                path = []
                while parent[v][0] is not None:
                    path.append(v)
                    v = parent[v][0]
                return path + [v]

            ca, cb = chain(a), chain(b)
            common = set(ca) & set(cb)
            for v in cb:
                if v in common:
                    break
                p, te = parent[v]
                # traversing from v up to p
                vec[te] = vec.get(te, 0) + (1 if g.ends[te] == (v, p) else -1)
            for v in ca:
                if v in common:
                    break
                p, te = parent[v]
                # traversing from p down to v
                vec[te] = vec.get(te, 0) + (1 if g.ends[te] == (p, v) else -1)
        out.append(vec)
    return out


def jacobian_gram(obj: GraphLike, basis: Optional[Sequence[dict]] = None) -> GramMatrix:
    """Gram matrix of the length form on a cycle basis, plus one zero row per unit of weight.

    ``basis`` may supply signed cycle vectors; by default the fundamental
    cycles of a DFS spanning tree are used.
    """
    c = as_curve(obj)
    g = c.graph
    if c.genus < 1:
        raise GraphError("jacobian needs genus >= 1")
    cycles = [dict(v) for v in basis] if basis is not None else _signed_cycles(g)
    if len(cycles) != g.b1:
        raise GraphError(f"basis has {len(cycles)} cycles, expected {g.b1}")
    w = g.total_weight
    n = len(cycles) + w
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i, x in enumerate(cycles):
        for j, y in enumerate(cycles):
            rows[i][j] = sum((x[e] * y[e] * c.lengths[e] for e in x if e in y), Fraction(0))
    return GramMatrix(tuple(tuple(r) for r in rows), tuple(cycles), w)


def _spanning_trees(g: WeightedGraph):
    verts = list(g.weights)
    k = len(verts) - 1
    cand = [e for e in g.ends if not g.is_loop(e)]
    if math.comb(len(cand), k) > MAX_SPANNING_SUBSETS:
        raise SizeGuardError("too many edge subsets for spanning-tree enumeration")
    for subset in itertools.combinations(cand, k):
        if _is_connected(g.weights, {e: g.ends[e] for e in subset}):
            yield subset


def gram_determinant_oracle(obj: GraphLike) -> Fraction:
    """Sum over spanning trees of the product of the lengths of the edges left out."""
    c = as_curve(obj)
    if c.graph.total_weight:
        raise GraphError("oracle defined for weight-0 curves")
    total = Fraction(0)
    for tree in _spanning_trees(c.graph):
        inside = set(tree)
        prod = Fraction(1)
        for e in c.graph.ends:
            if e not in inside:
                prod *= c.lengths[e]
        total += prod
    return total


def jacobians_isomorphic(a: GraphLike, b: GraphLike):
    """Torelli comparison: equal genus and length-preserving 2-isomorphic 3-edge connectivizations.

    Returns ``(verdict, witness)``.
    """
    ca, cb = as_curve(a), as_curve(b)
    if ca.genus != cb.genus:
        return False, None
    w = find_two_isomorphism(three(ca), three(cb), length_preserving=True)
    return w is not None, w


# ------------------------------------------------------------- models

@dataclass(frozen=True)
class HyperellipticModel:
    model: TropicalCurve
    involution: Involution
    witness: TwoIsomorphism
    route: str


def _block_part(two: TropicalCurve, block):
    """Hyperelliptic replacement of one block of a bridgeless curve."""
    if block.kind == "weight":
        return TropicalCurve(WeightedGraph({"w": 1}, {}), {}), None
    if block.genus == 1:
        total = two.total_length(block.edges)
        e = min(block.edges, key=list(two.graph.ends).index)
        v = min(block.vertices, key=list(two.graph.weights).index)
        curve = TropicalCurve(WeightedGraph({v: 0}, {e: (v, v)}), {e: total})
        return curve, Involution.from_edges(curve.graph, {v: v}, {e: e}, flipped=[e])
    sub = induced_subcurve(two, block.edges)
    s, _ = stable_model(sub)
    d = nested_ear_decomposition(s.graph)
    if d is None:
        raise PipelineError("block has no nested ear decomposition; a K4 minor is present")
    d = ensure_three_initial_ears(htedify(d))
    refined = hedify(s, d)
    hed = involution_from_hed(refined.decomposition)
    curve = transport_lengths(graph_of(refined.graph), refined.trace, s)
    try:
        check_involution(curve, hed.involution)
        tau = hed.involution
    except InvalidInvolutionError:
        curve = hyperelliptify_lengths(curve)
        tau = is_hyperelliptic(curve)
    return curve, tau


def _glue_point(curve: TropicalCurve, tau: Optional[Involution]):
    """A fixed vertex, subdividing a flipped edge at its midpoint if necessary."""
    if tau is None:
        return curve, tau, next(iter(curve.graph.weights))
    for kind, x in fixed_points(curve, tau):
        if kind == "vertex":
            return curve, tau, x
    e = min(tau.flipped, key=list(curve.graph.ends).index)
    out, t2, m = subdivide_flipped_edge(curve, tau, e)
    return out, t2, m


def _assemble(parts) -> tuple[TropicalCurve, Involution]:
    """Glue parts at their chosen fixed vertices; ids of later parts are made unique."""
    weights, ends, lengths = {}, {}, {}
    vmap_all, hmap_all = {}, {}
    center = None
    for curve, tau, glue in parts:
        g = curve.graph
        vren = {}
        for v in g.weights:
            if v == glue and center is not None:
                vren[v] = center
            else:
                vren[v] = fresh_id(v, set(weights) | set(vren.values()))
        eren = {}
        for e in g.ends:
            eren[e] = fresh_id(e, set(ends) | set(eren.values()))
        if center is None:
            center = vren[glue]
        for v, w in g.weights.items():
            weights[vren[v]] = weights.get(vren[v], 0) + w
        for e, (a, b) in g.ends.items():
            ends[eren[e]] = (vren[a], vren[b])
            lengths[eren[e]] = curve.lengths[e]
        if tau is None:
            vmap_all.setdefault(vren[glue], vren[glue])
            continue
        for v, u in tau.vertex_map.items():
            vmap_all[vren[v]] = vren[u]
        for (e, s), (f, r) in tau.half_edge_map.items():
            hmap_all[(eren[e], s)] = (eren[f], r)
    model = TropicalCurve(WeightedGraph(weights, ends), lengths)
    return model, Involution(vmap_all, hmap_all)


def _tree_quotient(c: TropicalCurve, t: Involution) -> bool:
    return (all(t.vertex_map[v] == v for v, w in c.graph.weights.items() if w > 0)
            and quotient(c, t).is_tree())


def hyperelliptic_model(obj: GraphLike, route: str = "auto") -> HyperellipticModel:
    """A stable hyperelliptic curve with the same polarized Jacobian as ``obj``.

    When some choice of lengths makes the stable graph hyperelliptic, its
    lengths are averaged over C1-sets.  Otherwise, or with
    ``route="blocks"``, the curve is rebuilt block by block: weight units become weight-1 vertices, genus-1
    blocks become loops of the same total length, larger blocks go through
    the ear pipeline.  Parts are glued at fixed points of their involutions.
    """
    c = as_curve(obj)
    if c.genus < 2:
        raise GraphError("needs genus >= 2")
    if route not in ("auto", "blocks"):
        raise GraphError(f"unknown route {route!r}")
    s, _ = stable_model(c)
    if route == "auto" and is_strongly_hyperelliptic_type(s) is not None:
        model = hyperelliptify_lengths(s)
        tau = is_hyperelliptic(model)
        route = "averaging"
    else:
        route = "blocks"
        two = two_edge_connectivization(s).result
        parts = [_block_part(two, block) for block in blocks(two)]
        if len(parts) == 1:
            model, tau = parts[0]
        else:
            model, tau = _assemble([_glue_point(curve, t) for curve, t in parts])
    try:
        check_involution(model, tau)
    except InvalidInvolutionError as exc:
        raise PipelineError(f"assembled involution is invalid: {exc}") from exc
    if not _tree_quotient(model, tau):
        raise PipelineError("assembled involution does not have a tree quotient")
    witness = find_two_isomorphism(three(c), three(model), length_preserving=True)
    if witness is None:
        raise PipelineError("model is not Torelli-equivalent to the input")
    return HyperellipticModel(model, tau, witness, route)


# ------------------------------------------------------------- decision

@dataclass(frozen=True)
class HyptypeCertificate:
    verdict: bool
    minor: Optional[MinorModel] = None
    model: Optional[TropicalCurve] = None
    involution: Optional[Involution] = None
    witness: Optional[TwoIsomorphism] = None

    def __bool__(self) -> bool:
        return self.verdict


def obstruction(obj: GraphLike) -> Optional[MinorModel]:
    """A K4 or L3 minor model in the underlying graph, or ``None``."""
    g = graph_of(obj)
    if not blocks_series_parallel(g):
        model = find_minor_model(g, K4())
        if model is None:
            raise PipelineError("series-parallel test and K4 search disagree")
        return model
    return find_minor_model(g, L3())


def is_hyperelliptic_type(obj: GraphLike, certificate: bool = True) -> HyptypeCertificate:
    """Decide by excluded minors; positive answers carry a hyperelliptic model."""
    c = as_curve(obj)
    if c.genus < 2:
        raise GraphError("hyperelliptic type is defined for genus >= 2")
    minor = obstruction(c)
    if minor is not None:
        return HyptypeCertificate(False, minor=minor)
    if not certificate:
        return HyptypeCertificate(True)
    m = hyperelliptic_model(c)
    return HyptypeCertificate(True, model=m.model, involution=m.involution, witness=m.witness)


def verify_certificate(obj: GraphLike, cert: HyptypeCertificate) -> bool:
    c = as_curve(obj)
    if not cert.verdict:
        if cert.minor is None:
            return False
        pattern = {"K4": K4, "L3": L3}.get(cert.minor.pattern)
        return pattern is not None and verify_minor_model(c, pattern(), cert.minor)
    if cert.model is None or cert.involution is None or cert.witness is None:
        return False
    try:
        check_involution(cert.model, cert.involution)
    except InvalidInvolutionError:
        return False
    if not _tree_quotient(cert.model, cert.involution):
        return False
    return cert.witness.length_preserving and verify_two_isomorphism(
        three(c), three(cert.model), cert.witness)


def is_specialization(g: GraphLike, gp: GraphLike) -> Optional[list[str]]:
    """Edges of ``gp`` whose contraction gives a graph isomorphic to ``g``, or ``None``."""
    g, gp = graph_of(g), graph_of(gp)
    if g.genus != gp.genus:
        return None
    k = len(gp.ends) - len(g.ends)
    if k < 0:
        return None
    if math.comb(len(gp.ends), k) > MAX_SPANNING_SUBSETS:
        raise SizeGuardError("too many contraction sets to search")
    for subset in itertools.combinations(gp.ends, k):
        result, _ = contract_edges(gp, subset)
        if are_isomorphic(result, g):
            return list(subset)
    return None
