"""Nested ear decompositions and their refinement into hyperelliptic involutions."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

from .connectivity import c1_sets
from .errors import GraphError, PipelineError
from .graph import (
    EdgeTrace,
    GraphLike,
    TropicalCurve,
    WeightedGraph,
    contract_edges,
    d_invariant,
    graph_of,
    is_stable,
    is_two_connected,
)
from .hyperelliptic import Involution, check_involution, quotient
from .minors import SPNode, is_series_parallel

STAGES = ("ear", "open", "nested", "hted", "hed")


@dataclass(frozen=True)
class Ear:
    """Path ``vertices[0] - edges[0] - vertices[1] - ...``."""

    vertices: tuple
    edges: tuple

    @property
    def ends(self) -> tuple[str, str]:
        return self.vertices[0], self.vertices[-1]

    @property
    def interior(self) -> tuple:
        return self.vertices[1:-1]

    def reversed(self) -> "Ear":
        return Ear(self.vertices[::-1], self.edges[::-1])

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "edges": list(self.edges)}


@dataclass(frozen=True)
class EarDecomposition:
    graph: WeightedGraph
    ears: tuple
    stage: str = "ear"

    # -- derived structure

    def owner(self) -> dict[str, int]:
        """Index of the ear holding each vertex in its interior."""
        return {v: i for i, ear in enumerate(self.ears) for v in ear.interior}

    def position(self, i: int) -> dict[str, int]:
        return {v: p for p, v in enumerate(self.ears[i].vertices)}

    def is_nested_in(self, j: int, i: int) -> bool:
        pos = self.position(i)
        return i < j and all(v in pos for v in self.ears[j].ends)

    def interval(self, i: int, j: int) -> Optional[tuple[int, int]]:
        """Positions in ear ``i`` spanned by the endpoints of ear ``j``."""
        pos = self.position(i)
        a, b = self.ears[j].ends
        if a not in pos or b not in pos:
            return None
        return tuple(sorted((pos[a], pos[b])))

    def parent(self, j: int) -> Optional[int]:
        """The ear ``j`` is properly nested in; ``None`` for initial ears."""
        if j == 0:
            return None
        own = self.owner()
        hits = [own[v] for v in self.ears[j].ends if v in own]
        return max(hits) if hits else None

    def parents(self) -> list:
        own = self.owner()
        out = [None]
        for ear in self.ears[1:]:
            hits = [own[v] for v in ear.ends if v in own]
            out.append(max(hits) if hits else None)
        return out

    def initial_ears(self) -> list[int]:
        par = self.parents()
        return [0] + [j for j in range(1, len(self.ears)) if par[j] is None]

    def children(self, i: int) -> list[int]:
        par = self.parents()
        return [j for j in range(len(self.ears)) if par[j] == i]

    def below(self, i: int, j: int) -> bool:
        """``E_i <= E_j`` in the order generated by proper nesting."""
        par = self.parents()
        while j is not None:
            if j == i:
                return True
            j = par[j]
        return False

    def with_stage(self, stage: str) -> "EarDecomposition":
        return replace(self, stage=stage)

    def to_json(self) -> dict:
        return {"stage": self.stage, "ears": [e.to_json() for e in self.ears]}

    @classmethod
    def from_json(cls, g: GraphLike, data: dict) -> "EarDecomposition":
        ears = tuple(Ear(tuple(e["vertices"]), tuple(e["edges"])) for e in data["ears"])
        return cls(graph_of(g), ears, data.get("stage", "ear"))


@dataclass
class VerifyReport:
    ok: bool
    violations: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def _contains(outer, inner) -> bool:
    return outer[0] <= inner[0] and inner[1] <= outer[1]


def _check_ear_axioms(d: EarDecomposition, out: list, open_: bool) -> None:
    g = d.graph
    seen_edges = []
    for k, ear in enumerate(d.ears):
        if len(ear.vertices) != len(ear.edges) + 1 or not ear.edges:
            out.append(f"ear {k}: malformed path")
            continue
        for p, e in enumerate(ear.edges):
            if e not in g.ends or set(g.ends[e]) != {ear.vertices[p], ear.vertices[p + 1]} \
                    or len(set(g.ends[e])) != len({ear.vertices[p], ear.vertices[p + 1]}):
                out.append(f"ear {k}: edge {e} does not join positions {p}, {p + 1}")
        inner = ear.vertices[1:-1]
        if len(set(inner)) != len(inner) or set(inner) & set(ear.ends):
            out.append(f"ear {k}: repeated vertex")
        if open_ and ear.ends[0] == ear.ends[1]:
            out.append(f"ear {k}: endpoints coincide")
        seen_edges.extend(ear.edges)
    if sorted(seen_edges) != sorted(g.ends):
        out.append("ears do not partition the edge set")
    earlier: set = set()
    for k, ear in enumerate(d.ears):
        if k >= 1:
            for v in ear.ends:
                if v not in earlier:
                    out.append(f"ear {k}: endpoint {v} not on an earlier ear")
            for v in ear.interior:
                if v in earlier:
                    out.append(f"ear {k}: interior vertex {v} already used")
        earlier.update(ear.vertices)
    if earlier != set(g.weights):
        out.append("ears do not cover every vertex")


def verify(d: EarDecomposition, stage: str) -> VerifyReport:
    """Check every condition up to ``stage`` (ear, open, nested, hted, hed)."""
    if stage not in STAGES:
        raise GraphError(f"unknown stage {stage!r}")
    level = STAGES.index(stage)
    out: list[str] = []
    _check_ear_axioms(d, out, open_=level >= 1)
    if out or level < 2:
        return VerifyReport(not out, out)
    n = len(d.ears)
    nested_in = {i: [j for j in range(i + 1, n) if d.is_nested_in(j, i)] for i in range(n)}
    for j in range(1, n):
        if not any(j in nested_in[i] for i in range(j)):
            out.append(f"ear {j} is not nested in an earlier ear")
    for i in range(n):
        ivs = {j: d.interval(i, j) for j in nested_in[i]}
        js = list(ivs)
        for x, j in enumerate(js):
            for k in js[x + 1:]:
                a, b = ivs[j], ivs[k]
                disjoint = a[1] <= b[0] or b[1] <= a[0]
                if not (disjoint or _contains(a, b) or _contains(b, a)):
                    out.append(f"nest intervals of ears {j}, {k} in ear {i} cross")
    if out or level < 3:
        return VerifyReport(not out, out)
    par = d.parents()
    for i in range(n):
        kids = [j for j in range(n) if par[j] == i]
        for j in kids:
            if d.interval(i, j) is None:
                out.append(f"ear {j} is properly nested in ear {i} without being nested in it")
        ivs = {j: d.interval(i, j) for j in kids if d.interval(i, j) is not None}
        js = list(ivs)
        for x, j in enumerate(js):
            for k in js[x + 1:]:
                if not (_contains(ivs[j], ivs[k]) or _contains(ivs[k], ivs[j])):
                    out.append(f"properly nested ears {j}, {k} of ear {i} have incomparable intervals")
    if out or level < 4:
        return VerifyReport(not out, out)
    for j in range(1, n):
        i = par[j]
        if i is None:
            continue
        inner = set(d.ears[i].interior)
        if not all(v in inner for v in d.ears[j].ends):
            out.append(f"ear {j}: endpoints not interior to its parent ear {i}")
    for i in range(n):
        ivs = {j: d.interval(i, j) for j in nested_in[i]}
        for j, a in ivs.items():
            for k, b in ivs.items():
                if j == k or not _contains(b, a) or a == b:
                    continue
                if not (b[0] < a[0] and a[1] < b[1]):
                    out.append(f"ear {j}: endpoints not interior to the nest interval of ear {k} in ear {i}")
    return VerifyReport(not out, out)


# ------------------------------------------------------------- construction

def _paths(node: SPNode) -> list[Ear]:
    """First entry runs from ``node.s`` to ``node.t``; the rest are its later ears."""
    if node.kind == "edge":
        return [Ear((node.s, node.t), (node.edge,))]
    if node.kind == "series":
        parts = [_paths(c) for c in node.children]
        verts, edges = [node.s], []
        for p in parts:
            verts.extend(p[0].vertices[1:])
            edges.extend(p[0].edges)
        return [Ear(tuple(verts), tuple(edges))] + [e for p in parts for e in p[1:]]
    out = []
    for c in node.children:
        out.extend(_paths(c))
    return out


def nested_ear_decomposition(obj: GraphLike) -> Optional[EarDecomposition]:
    """Nested decomposition read off the series-parallel tree, or ``None`` when not series-parallel."""
    g = graph_of(obj)
    if any(g.is_loop(e) for e in g.ends) or not is_two_connected(g, ignore_weights=True):
        raise GraphError("nested ear decompositions need a 2-connected loopless graph")
    if g.b1 < 1:
        raise GraphError("nested ear decompositions need genus >= 1")
    sp = is_series_parallel(g)
    if not sp:
        return None
    d = EarDecomposition(g, tuple(_paths(sp.tree)), "nested")
    report = verify(d, "nested")
    if not report:
        raise PipelineError(f"decomposition from series-parallel tree failed: {report.violations}")
    return d


def _orient_initial(d: EarDecomposition) -> tuple[Ear, Ear]:
    e0, e1 = d.ears[0], d.ears[1]
    if e1.vertices[0] != e0.vertices[0]:
        e1 = e1.reversed()
    return e0, e1


def _swap_first_two(d: EarDecomposition) -> EarDecomposition:
    ears = list(d.ears)
    ears[0], ears[1] = ears[1], ears[0]
    return replace(d, ears=tuple(ears))


def _hted_step(d: EarDecomposition) -> EarDecomposition:
    n = len(d.ears)
    par = d.parents()
    bad = None
    for i in range(n):
        kids = [j for j in range(n) if par[j] == i and d.interval(i, j) is not None]
        for x, j in enumerate(kids):
            for k in kids[x + 1:]:
                a, b = d.interval(i, j), d.interval(i, k)
                if not (_contains(a, b) or _contains(b, a)):
                    bad = bad if bad is not None else i
    if bad is None:
        raise PipelineError("no HTED violation found although verification failed")
    initial = d.initial_ears()
    if len(initial) != 2:
        raise PipelineError(f"HTED repair needs exactly 2 initial ears, found {len(initial)}; "
                            "an L3 minor is suspected")
    if d.below(0, bad):
        d = _swap_first_two(d)
        bad = 1 if bad == 0 else bad
    if bad != 1:
        raise PipelineError(f"ear {bad} has crossing children but is not an initial ear; "
                            "an L3 minor is suspected")
    e0, e1 = _orient_initial(d)
    d = replace(d, ears=(e0, e1) + d.ears[2:])
    ivs = [d.interval(1, j) for j in d.children(1)]
    maximal = sorted({iv for iv in ivs if not any(o != iv and _contains(o, iv) for o in ivs)})
    if len(maximal) < 2:
        raise PipelineError("HTED repair found fewer than 2 maximal nest intervals")
    t_pos = maximal[1][0]
    new0 = Ear(e0.vertices + e1.vertices[-2:t_pos - 1 if t_pos else None:-1],
               e0.edges + e1.edges[t_pos:][::-1])
    new1 = Ear(e1.vertices[:t_pos + 1], e1.edges[:t_pos])
    return replace(d, ears=(new0, new1) + d.ears[2:])


def htedify(d: EarDecomposition) -> EarDecomposition:
    """Re-root the two initial ears until the decomposition is hyperelliptic type adapted."""
    if not verify(d, "nested"):
        raise GraphError("htedify needs a nested ear decomposition")
    bound = len(d.graph.ends) ** 2
    for _ in range(bound + 1):
        if verify(d, "hted"):
            return d.with_stage("hted")
        d = _hted_step(d)
        if not verify(d, "nested"):
            raise PipelineError("HTED repair broke nestedness; an L3 minor is suspected")
    raise PipelineError(f"HTED repair did not converge in {bound} steps; "
                        f"violations: {verify(d, 'hted').violations}")


def ensure_three_initial_ears(d: EarDecomposition) -> EarDecomposition:
    """Shorten the first initial ear so that a third ear becomes initial."""
    if not verify(d, "hted"):
        raise GraphError("ensure_three_initial_ears needs a HTED")
    if len(d.initial_ears()) >= 3:
        return d.with_stage("hted")
    if len(d.initial_ears()) != 2 or not is_stable(d.graph):
        raise GraphError("needs a stable graph with two initial ears")
    for flip_ends in (False, True):
        for swap in (False, True):
            cur = _swap_first_two(d) if swap else d
            e0, e1 = _orient_initial(cur)
            if flip_ends:
                e0, e1 = e0.reversed(), e1.reversed()
            cur = replace(cur, ears=(e0, e1) + cur.ears[2:])
            s = e0.vertices[0]
            cands = [j for j in range(2, len(cur.ears))
                     if s in cur.ears[j].ends and cur.is_nested_in(j, 0)]
            if not cands:
                continue
            j = max(cands, key=lambda j: (cur.interval(0, j)[1], -j))
            q = cur.interval(0, j)[1]
            new0 = Ear(e0.vertices[:q + 1], e0.edges[:q])
            new1 = Ear(e1.vertices + e0.vertices[-2:q - 1:-1], e1.edges + e0.edges[q:][::-1])
            out = replace(cur, ears=(new0, new1) + cur.ears[2:], stage="hted")
            if verify(out, "hted") and len(out.initial_ears()) >= 3:
                return out
    raise PipelineError("could not produce a HTED with three initial ears")


# ------------------------------------------------------------- HED refinement

@dataclass(frozen=True)
class HedResult:
    """Refined graph with a HED; ``trace`` contracts the added edges back onto the input."""

    graph: GraphLike
    decomposition: EarDecomposition
    added_edges: tuple
    trace: EdgeTrace


def _find_violation(d: EarDecomposition):
    """Return ``(i, j, shared_vertex)`` for the first case (a) or (b) violation."""
    n = len(d.ears)
    par = d.parents()
    for i in range(n):
        kids = [j for j in range(n) if par[j] == i]
        ends_i = set(d.ears[i].ends)
        touching = [j for j in kids if set(d.ears[j].ends) & ends_i]
        if touching:
            # the largest child interval touches the same end
            j = max(kids, key=lambda j: (d.interval(i, j)[1] - d.interval(i, j)[0], -j))
            shared = set(d.ears[j].ends) & ends_i
            if shared:
                return i, j, sorted(shared)[0]
            j = touching[0]
            return i, j, sorted(set(d.ears[j].ends) & ends_i)[0]
    for i in range(n):
        nested = [j for j in range(i + 1, n) if d.is_nested_in(j, i)]
        for k in nested:
            bk = d.interval(i, k)
            cands = []
            for j in nested:
                a = d.interval(i, j)
                if j == k or a == bk or not _contains(bk, a):
                    continue
                inside = [p for p in a if bk[0] < p < bk[1]]
                if len(inside) == 1:
                    cands.append(j)
            if cands:
                j = max(cands, key=lambda j: (d.interval(i, j)[1] - d.interval(i, j)[0], -j))
                a = d.interval(i, j)
                shared_pos = a[0] if a[0] in bk else a[1]
                return i, j, d.ears[i].vertices[shared_pos]
    return None


def _refine_step(g: WeightedGraph, lengths, d: EarDecomposition, step: int):
    found = _find_violation(d)
    if found is None:
        raise PipelineError("HED verification failed but no refinable configuration was found")
    i, j, a = found
    ear_i = d.ears[i]
    lo, hi = d.interval(i, j)
    pos_a = ear_i.vertices.index(a)
    b = f"h{step}"
    while b in g.weights:
        b += "_"
    f = f"f{step}"
    while f in g.ends:
        f += "_"
    ends = dict(g.ends)
    weights = dict(g.weights)
    weights[b] = 0
    if pos_a == lo:
        x = ear_i.edges[pos_a]
        new_i = Ear(ear_i.vertices[:pos_a + 1] + (b,) + ear_i.vertices[pos_a + 1:],
                    ear_i.edges[:pos_a] + (f, x) + ear_i.edges[pos_a + 1:])
    elif pos_a == hi:
        x = ear_i.edges[pos_a - 1]
        new_i = Ear(ear_i.vertices[:pos_a] + (b,) + ear_i.vertices[pos_a:],
                    ear_i.edges[:pos_a - 1] + (x, f) + ear_i.edges[pos_a:])
    else:
        raise PipelineError(f"shared vertex {a} is not an end of the nest interval")
    ends[x] = tuple(b if v == a else v for v in ends[x])
    ends[f] = (a, b)
    new_lengths = None
    if lengths is not None:
        new_lengths = dict(lengths)
        new_lengths[x] = lengths[x] / 2
        new_lengths[f] = lengths[x] / 2
    ears = list(d.ears)
    ears[i] = new_i
    # everything hanging inside the nest interval of E_j moves with it
    inside = [m for m in range(len(ears))
              if m == j or (d.is_nested_in(m, i) and _contains((lo, hi), d.interval(i, m)))]
    for l in range(len(ears)):
        if l == i or a not in d.ears[l].ends:
            continue
        if not any(d.below(m, l) for m in inside):
            continue
        ear = ears[l]
        if ear.vertices[0] == a:
            edge = ear.edges[0]
            ears[l] = Ear((b,) + ear.vertices[1:], ear.edges)
        else:
            edge = ear.edges[-1]
            ears[l] = Ear(ear.vertices[:-1] + (b,), ear.edges)
        ends[edge] = tuple(b if v == a else v for v in ends[edge])
    g2 = WeightedGraph(weights, ends)
    return g2, new_lengths, EarDecomposition(g2, tuple(ears), "hted"), f


def hedify(obj: GraphLike, d: EarDecomposition) -> HedResult:
    """Subdivide and re-attach ears until the decomposition is a HED.

    Each step must keep the graph stable, lower the d-invariant by one, put
    the new edge in a C1-set of size at least 2, and keep the HTED property.
    New edges get half the length of the edge they split.
    """
    g = graph_of(obj)
    lengths = dict(obj.lengths) if isinstance(obj, TropicalCurve) else None
    if d.graph != g:
        raise GraphError("decomposition belongs to a different graph")
    if not verify(d, "hted") or len(d.initial_ears()) < 3:
        raise GraphError("hedify needs a HTED with at least three initial ears")
    added = []
    step = 0
    while not verify(d, "hed"):
        if d_invariant(g) == 0:
            raise PipelineError("trivalent graph with 3 initial ears failed HED verification: "
                                f"{verify(d, 'hed').violations}")
        before = d_invariant(g)
        g, lengths, d, f = _refine_step(g, lengths, d, step)
        step += 1
        added.append(f)
        if not is_stable(g):
            raise PipelineError(f"refinement step {step} produced an unstable graph")
        if d_invariant(g) != before - 1:
            raise PipelineError(f"refinement step {step} did not lower the d-invariant")
        if len(c1_sets(g).set_of(f)) < 2:
            raise PipelineError(f"new edge {f} is not in a separating pair")
        report = verify(d, "hted")
        if not report:
            raise PipelineError(f"refinement step {step} broke the HTED: {report.violations}")
    out = g if lengths is None else TropicalCurve(g, lengths)
    back, trace = contract_edges(out, added)
    if graph_of(back) != graph_of(obj):
        raise PipelineError("contracting the added edges does not recover the input graph")
    return HedResult(out, d.with_stage("hed"), tuple(added), trace)


# ------------------------------------------------------------- involution

@dataclass(frozen=True)
class HedInvolution:
    involution: Involution
    equal_length_pairs: tuple

    def constrained_lengths(self, g: GraphLike, base=None) -> TropicalCurve:
        """Lengths meeting the constraints: each pair gets the larger of its base lengths."""
        g = graph_of(g)
        lengths = {e: Fraction(1) for e in g.ends} if base is None else dict(base)
        for e, f in self.equal_length_pairs:
            lengths[e] = lengths[f] = max(lengths[e], lengths[f])
        return TropicalCurve(g, lengths)


def involution_from_hed(d: EarDecomposition) -> HedInvolution:
    """Reverse every ear; this is an involution with tree quotient on a HED."""
    if not verify(d, "hed"):
        raise GraphError("involution_from_hed needs a HED")
    g = d.graph
    if g.genus < 2:
        raise GraphError("needs genus >= 2")
    sigma = {}
    edge_map = {}
    s, t = d.ears[0].ends
    sigma[s], sigma[t] = t, s
    for ear in d.ears:
        L = len(ear.edges)
        for p, v in enumerate(ear.vertices[1:-1], start=1):
            sigma[v] = ear.vertices[L - p]
        for p, e in enumerate(ear.edges):
            edge_map[e] = ear.edges[L - 1 - p]
    for k, ear in enumerate(d.ears):
        a, b = ear.ends
        if sigma.get(a) != b:
            raise PipelineError(f"reversal of ear {k} disagrees with its endpoints")
    try:
        tau = Involution.from_edges(g, sigma, edge_map)
        check_involution(g, tau)
    except GraphError as exc:
        raise PipelineError(f"ear reversal is not an involution: {exc}") from exc
    if not quotient(g, tau).is_tree():
        raise PipelineError("quotient by the ear reversal is not a tree")
    pairs = tuple(sorted({tuple(sorted((e, f))) for e, f in edge_map.items() if e != f}))
    return HedInvolution(tau, pairs)
