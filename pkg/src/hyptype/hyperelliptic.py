"""Involutions of tropical curves, quotients and the hyperelliptic test."""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Union

from .connectivity import c1_sets, separating_edges
from .errors import GraphError, InvalidInvolutionError, PipelineError, SizeGuardError
from .graph import (
    GraphLike,
    HalfEdge,
    TropicalCurve,
    WeightedGraph,
    as_curve,
    fresh_id,
    stable_model,
    subdivide,
)

MAX_VERTICES = 12
MAX_EDGES = 16


@dataclass(frozen=True)
class Involution:
    """Order <= 2 symmetry given on vertices and half-edges."""

    vertex_map: Mapping[str, str]
    half_edge_map: Mapping[HalfEdge, HalfEdge]

    @property
    def edge_map(self) -> dict[str, str]:
        return {e: self.half_edge_map[(e, 0)][0] for (e, s) in self.half_edge_map if s == 0}

    @property
    def flipped(self) -> frozenset[str]:
        return frozenset(e for (e, s), h in self.half_edge_map.items() if s == 0 and h == (e, 1))

    @property
    def fixed_vertices(self) -> list[str]:
        return [v for v, w in self.vertex_map.items() if v == w]

    def is_identity(self) -> bool:
        return (all(v == w for v, w in self.vertex_map.items())
                and all(h == k for h, k in self.half_edge_map.items()))

    def fixes_pointwise(self, e: str) -> bool:
        return self.half_edge_map[(e, 0)] == (e, 0)

    @classmethod
    def from_edges(cls, g: GraphLike, vertex_map: Mapping[str, str], edge_map: Mapping[str, str],
                   flipped=(), loop_twist=()) -> "Involution":
        """Build the half-edge map from a vertex map and an edge map.

        Non-loop edges are oriented by the vertex map.  A loop mapped to
        itself is flipped iff listed in ``flipped``; a loop mapped to another
        loop sends half-edge ``s`` to ``s`` unless listed in ``loop_twist``.
        """
        g = g.graph if isinstance(g, TropicalCurve) else g
        flipped, loop_twist = set(flipped), set(loop_twist)
        half = {}
        for e, f in edge_map.items():
            a, b = g.ends[e]
            if a == b:
                if f == e:
                    flip = e in flipped
                    half[(e, 0)], half[(e, 1)] = ((e, 1), (e, 0)) if flip else ((e, 0), (e, 1))
                else:
                    tw = e in loop_twist or f in loop_twist
                    half[(e, 0)], half[(e, 1)] = ((f, 1), (f, 0)) if tw else ((f, 0), (f, 1))
                continue
            fa, fb = g.ends[f]
            if vertex_map[a] == fa and vertex_map[b] == fb:
                half[(e, 0)], half[(e, 1)] = (f, 0), (f, 1)
            elif vertex_map[a] == fb and vertex_map[b] == fa:
                half[(e, 0)], half[(e, 1)] = (f, 1), (f, 0)
            else:
                raise InvalidInvolutionError(f"edge {e} cannot map to {f} under the vertex map")
        return cls(dict(vertex_map), half)

    @classmethod
    def identity(cls, g: GraphLike) -> "Involution":
        g = g.graph if isinstance(g, TropicalCurve) else g
        return cls({v: v for v in g.weights}, {(e, s): (e, s) for e in g.ends for s in (0, 1)})


def check_involution(c: GraphLike, t: Involution) -> None:
    """Raise :class:`InvalidInvolutionError` unless ``t`` is a valid involution of ``c``."""
    c = as_curve(c)
    g = c.graph
    sigma, tau = t.vertex_map, t.half_edge_map
    if set(sigma) != set(g.weights) or set(sigma.values()) != set(g.weights):
        raise InvalidInvolutionError("vertex map is not a permutation of the vertices")
    halves = {(e, s) for e in g.ends for s in (0, 1)}
    if set(tau) != halves or set(tau.values()) != halves:
        raise InvalidInvolutionError("half-edge map is not a permutation of the half-edges")
    for v in g.weights:
        if sigma[sigma[v]] != v:
            raise InvalidInvolutionError(f"vertex map has order > 2 at {v}")
        if g.weights[sigma[v]] != g.weights[v]:
            raise InvalidInvolutionError(f"weight not preserved at {v}")
    for (e, s), (f, r) in tau.items():
        if tau[(f, r)] != (e, s):
            raise InvalidInvolutionError(f"half-edge map has order > 2 at {(e, s)}")
        if tau[(e, 1 - s)] != (f, 1 - r):
            raise InvalidInvolutionError(f"edge {e} is not mapped to a whole edge")
        if g.ends[f][r] != sigma[g.ends[e][s]]:
            raise InvalidInvolutionError(f"incidence not preserved at half-edge {(e, s)}")
        if c.lengths[e] != c.lengths[f]:
            raise InvalidInvolutionError(f"length not preserved on {e}")


# ------------------------------------------------------------- vertex maps

def _pair_key(a, b):
    return (a, b) if a <= b else (b, a)


def _bundles(c: TropicalCurve) -> dict[tuple[str, str], list[str]]:
    out = defaultdict(list)
    for e, (a, b) in c.graph.ends.items():
        out[_pair_key(a, b)].append(e)
    return out


def _vertex_involutions(c: TropicalCurve, fix_weighted: bool) -> Iterator[dict[str, str]]:
    """Vertex involutions compatible with weights and length multisets of every bundle."""
    g = c.graph
    bundles = _bundles(c)
    bundle_lengths = {k: tuple(sorted(c.lengths[e] for e in es)) for k, es in bundles.items()}

    def blen(a, b):
        return bundle_lengths.get(_pair_key(a, b), ())

    def signature(v):
        return (g.weights[v], g.valence(v), blen(v, v),
                tuple(sorted(blen(v, u) for u in g.weights if u != v and blen(v, u))))

    sig = {v: signature(v) for v in g.weights}
    order = list(g.weights)
    sigma: dict[str, str] = {}

    def consistent(v):
        image = sigma[v]
        return all(blen(v, x) == blen(image, sigma[x]) for x in sigma)

    def extend(k):
        while k < len(order) and order[k] in sigma:
            k += 1
        if k == len(order):
            yield dict(sigma)
            return
        v = order[k]
        choices = [v]
        if not (fix_weighted and g.weights[v] > 0):
            choices += [u for u in order[k + 1:] if u not in sigma and sig[u] == sig[v]]
        for u in choices:
            sigma[v] = u
            sigma[u] = v
            if consistent(v) and consistent(u):
                yield from extend(k + 1)
            del sigma[v]
            sigma.pop(u, None)

    yield from extend(0)


def _involutive_matchings(items: list[str], key) -> Iterator[list[tuple[str, str]]]:
    """All involutive permutations (as pair lists, fixed points as (x, x)) respecting ``key``."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for tail in _involutive_matchings(rest, key):
        yield [(first, first)] + tail
    for i, other in enumerate(rest):
        if key(other) == key(first):
            for tail in _involutive_matchings(rest[:i] + rest[i + 1:], key):
                yield [(first, other)] + tail


def _bijections(src: list[str], dst: list[str], key) -> Iterator[list[tuple[str, str]]]:
    if not src:
        yield []
        return
    first = src[0]
    for i, d in enumerate(dst):
        if key(d) == key(first):
            for tail in _bijections(src[1:], dst[:i] + dst[i + 1:], key):
                yield [(first, d)] + tail


def _class_options(c: TropicalCurve, sigma, key_a, key_b, bundles):
    """Edge-map options for one orbit of vertex-pair classes.

    Each option is ``(edge_map, flipped, loop_twist)`` restricted to the class.
    """
    length = c.lengths.__getitem__
    a, b = key_a
    options = []
    if key_a != key_b:
        for pairs in _bijections(bundles[key_a], bundles[key_b], length):
            base = {}
            for e, f in pairs:
                base[e], base[f] = f, e
            if a == b:
                for twists in itertools.product((False, True), repeat=len(pairs)):
                    options.append((base, (), [e for (e, _), tw in zip(pairs, twists) if tw]))
            else:
                options.append((base, (), ()))
        return options
    for pairs in _involutive_matchings(bundles[key_a], length):
        base = {}
        for e, f in pairs:
            base[e], base[f] = f, e
        if a == b:
            fixed = [e for e, f in pairs if e == f]
            swapped = [e for e, f in pairs if e != f]
            for flips in itertools.product((False, True), repeat=len(fixed)):
                for twists in itertools.product((False, True), repeat=len(swapped)):
                    options.append((base, [e for e, fl in zip(fixed, flips) if fl],
                                    [e for e, tw in zip(swapped, twists) if tw]))
        else:
            flipped = [e for e, f in pairs if e == f] if sigma[a] == b else []
            options.append((base, flipped, ()))
    return options


def _class_orbits(sigma, bundles):
    seen = set()
    out = []
    for k in bundles:
        if k in seen:
            continue
        k2 = _pair_key(sigma[k[0]], sigma[k[1]])
        seen.update({k, k2})
        out.append((k, k2))
    return out


def enumerate_involutions(obj: GraphLike) -> list[Involution]:
    """Every weight and length preserving involution, in deterministic order."""
    c = as_curve(obj)
    g = c.graph
    if len(g.weights) > MAX_VERTICES or len(g.ends) > MAX_EDGES:
        raise SizeGuardError(f"involution enumeration limited to {MAX_VERTICES} vertices, "
                             f"{MAX_EDGES} edges")
    bundles = _bundles(c)
    out = []
    for sigma in _vertex_involutions(c, fix_weighted=False):
        per_class = [_class_options(c, sigma, k, k2, bundles)
                     for k, k2 in _class_orbits(sigma, bundles)]
        for combo in itertools.product(*per_class):
            edge_map, flipped, twist = {}, [], []
            for em, fl, tw in combo:
                edge_map.update(em)
                flipped.extend(fl)
                twist.extend(tw)
            out.append(Involution.from_edges(g, sigma, edge_map, flipped, twist))
    return out


# ------------------------------------------------------------- quotients

@dataclass(frozen=True)
class QuotientResult:
    quotient: TropicalCurve
    vertex_projection: Mapping[str, str]
    edge_projection: Mapping[str, tuple[str, str]]
    fixed_points: tuple

    def is_tree(self) -> bool:
        g = self.quotient.graph
        return len(g.ends) == len(g.weights) - 1


def fixed_points(obj: GraphLike, t: Involution) -> list[tuple[str, str]]:
    """Fixed vertices, then midpoints of flipped edges, as ``(kind, id)`` pairs."""
    g = as_curve(obj).graph
    out = [("vertex", v) for v in g.weights if t.vertex_map[v] == v]
    flipped = t.flipped
    out += [("midpoint", e) for e in g.ends if e in flipped]
    return out


def quotient(obj: GraphLike, t: Involution) -> QuotientResult:
    """Unweighted quotient curve; a fixed edge of a nontrivial involution doubles in length."""
    c = as_curve(obj)
    check_involution(c, t)
    g = c.graph
    order = list(g.weights)
    vrep = {}
    for v in order:
        w = t.vertex_map[v]
        vrep[v] = v if order.index(v) <= order.index(w) else w
    nontrivial = not t.is_identity()
    flipped = t.flipped
    emap = t.edge_map
    ends, lengths, eproj = {}, {}, {}
    for e in g.ends:
        if e in flipped:
            eproj[e] = ("v", vrep[g.ends[e][0]])
            continue
        f = emap[e]
        rep = e if list(g.ends).index(e) <= list(g.ends).index(f) else f
        eproj[e] = ("e", rep)
        if rep == e:
            a, b = g.ends[e]
            ends[e] = (vrep[a], vrep[b])
            stab = 2 if (nontrivial and f == e) else 1
            lengths[e] = stab * c.lengths[e]
    weights = {v: 0 for v in order if vrep[v] == v}
    q = TropicalCurve(WeightedGraph(weights, ends), lengths)
    return QuotientResult(q, vrep, eproj, tuple(fixed_points(c, t)))


# ------------------------------------------------------------- hyperelliptic test

def _greedy_involution(c: TropicalCurve, sigma, bundles) -> Involution:
    """Among involutions over ``sigma``, one with the fewest quotient edges."""
    length = c.lengths.__getitem__
    edge_map, flipped = {}, []
    for k, k2 in _class_orbits(sigma, bundles):
        a, b = k
        if k != k2:
            src = sorted(bundles[k], key=lambda e: (length(e), e))
            dst = sorted(bundles[k2], key=lambda e: (length(e), e))
            for e, f in zip(src, dst):
                edge_map[e], edge_map[f] = f, e
        elif a == b or sigma[a] == b:
            for e in bundles[k]:
                edge_map[e] = e
                flipped.append(e)
        else:
            groups = defaultdict(list)
            for e in bundles[k]:
                groups[length(e)].append(e)
            for es in groups.values():
                for i in range(0, len(es) - 1, 2):
                    edge_map[es[i]], edge_map[es[i + 1]] = es[i + 1], es[i]
                if len(es) % 2:
                    edge_map[es[-1]] = es[-1]
    return Involution.from_edges(c.graph, sigma, edge_map, flipped)


def _quotient_is_tree(c: TropicalCurve, t: Involution) -> bool:
    g = c.graph
    vertex_orbits = len({frozenset((v, t.vertex_map[v])) for v in g.weights})
    emap = t.edge_map
    flipped = t.flipped
    edge_orbits = len({frozenset((e, emap[e])) for e in g.ends if e not in flipped})
    return edge_orbits == vertex_orbits - 1


def hyperelliptic_involutions(obj: GraphLike) -> tuple[TropicalCurve, list[Involution]]:
    """Stable model together with one tree-quotient involution per admissible vertex map."""
    c = as_curve(obj)
    if c.genus < 2:
        raise GraphError("hyperellipticity is defined for genus >= 2")
    s, _ = stable_model(c)
    if len(s.graph.weights) > 16:
        raise SizeGuardError("hyperelliptic search limited to 16 vertices")
    bundles = _bundles(s)
    found = []
    for sigma in _vertex_involutions(s, fix_weighted=True):
        t = _greedy_involution(s, sigma, bundles)
        if _quotient_is_tree(s, t):
            found.append(t)
    return s, found


def is_hyperelliptic(obj: GraphLike) -> Involution | None:
    """The hyperelliptic involution of the stable model, or ``None``.

    Among admissible involutions the one fixing every separating edge
    pointwise is preferred; remaining ties go to enumeration order.  The
    returned involution acts on ``stable_model(obj)[0]``.
    """
    s, found = hyperelliptic_involutions(obj)
    if not found:
        return None
    seps = separating_edges(s)
    for t in found:
        if all(t.fixes_pointwise(e) for e in seps):
            return t
    return found[0]


def is_strongly_hyperelliptic_type(obj: GraphLike) -> Involution | None:
    """Involution witnessing that some choice of lengths makes the graph hyperelliptic.

    The search runs on the stable graph with all lengths equal, where
    length preservation is vacuous, so it covers every solution of the
    equal-length constraints.  The involution acts on that stable graph.
    """
    s, _ = stable_model(as_curve(obj))
    return is_hyperelliptic(as_curve(s.graph))


def hyperelliptify_lengths(obj: TropicalCurve) -> TropicalCurve:
    """Average lengths over each C1-set; raise if the result is not hyperelliptic."""
    c = as_curve(obj)
    lengths = dict(c.lengths)
    for s in c1_sets(c).sets:
        avg = c.total_length(s) / len(s)
        for e in s:
            lengths[e] = avg
    out = c.with_lengths(lengths)
    if is_hyperelliptic(out) is None:
        raise PipelineError("averaged curve is not hyperelliptic; input is not strongly "
                            "of hyperelliptic type")
    return out


# ------------------------------------------------------------- wedges

Point = Union[str, tuple[str, object]]


def _materialize(c: TropicalCurve, p: Point) -> tuple[TropicalCurve, str]:
    if isinstance(p, str):
        if p not in c.graph.weights:
            raise GraphError(f"no such vertex: {p!r}")
        return c, p
    e, offset = p
    offset = Fraction(offset)
    if offset == 0:
        return c, c.graph.ends[e][0]
    if offset == c.lengths[e]:
        return c, c.graph.ends[e][1]
    out, v, _ = subdivide(c, e, offset)
    return out, v


def _rename(c: TropicalCurve, taken_v, taken_e):
    vmap = {}
    for v in c.graph.weights:
        vmap[v] = fresh_id(v, taken_v | set(vmap.values())) if v in taken_v else v
    emap = {}
    for e in c.graph.ends:
        emap[e] = fresh_id(e, taken_e | set(emap.values())) if e in taken_e else e
    return vmap, emap


def wedge(a: GraphLike, pa: Point, b: GraphLike, pb: Point) -> TropicalCurve:
    """One-point union of two curves.

    A point is a vertex id or ``(edge_id, offset)`` measured from the
    edge's half-edge-0 end; interior points are subdivided.  Ids of ``b``
    that clash with ids of ``a`` get a numeric suffix; the glued vertex
    keeps ``a``'s id and the summed weight.
    """
    ca, va = _materialize(as_curve(a), pa)
    cb, vb = _materialize(as_curve(b), pb)
    vmap, emap = _rename(cb, set(ca.graph.weights), set(ca.graph.ends))
    vmap[vb] = va
    weights = dict(ca.graph.weights)
    for v, w in cb.graph.weights.items():
        weights[vmap[v]] = weights.get(vmap[v], 0) + w
    ends = dict(ca.graph.ends)
    lengths = dict(ca.lengths)
    for e, (x, y) in cb.graph.ends.items():
        ends[emap[e]] = (vmap[x], vmap[y])
        lengths[emap[e]] = cb.lengths[e]
    return TropicalCurve(WeightedGraph(weights, ends), lengths)


def subdivide_flipped_edge(c: TropicalCurve, t: Involution, e: str):
    """Subdivide a flipped edge at its midpoint and extend the involution.

    Returns ``(curve, involution, midpoint_vertex)``; the two halves are
    exchanged and the midpoint is fixed.
    """
    if e not in t.flipped:
        raise GraphError(f"edge {e} is not flipped")
    out, m, e2 = subdivide(c, e)
    vertex_map = dict(t.vertex_map)
    vertex_map[m] = m
    half = {h: k for h, k in t.half_edge_map.items() if h[0] != e}
    half[(e, 0)], half[(e2, 1)] = (e2, 1), (e, 0)
    half[(e, 1)], half[(e2, 0)] = (e2, 0), (e, 1)
    return out, Involution(vertex_map, half), m
