"""Vertex-weighted multigraphs and tropical curves.

Graphs are stored as two ordered maps: vertex id -> weight and edge id ->
(vertex of half-edge 0, vertex of half-edge 1).  A half-edge is the pair
``(edge_id, side)`` with ``side`` in ``{0, 1}``.  Insertion order is the
canonical order used for every deterministic tie-break in the package.

Every rewriting operation returns an :class:`EdgeTrace` describing where each
source vertex and edge went.
"""

from __future__ import annotations

import random
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Union

from .errors import DisconnectedError, GraphError

HalfEdge = tuple[str, int]
# ("v", vertex_id) or ("e", edge_id)
Cell = tuple[str, str]


def _to_fraction(value) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise GraphError(f"lengths must be exact rationals, got {value!r}")
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise GraphError(f"invalid length {value!r}") from exc


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Connected multigraph with nonnegative integer vertex weights."""

    weights: Mapping[str, int]
    ends: Mapping[str, tuple[str, str]]

    def __post_init__(self):
        weights = {}
        for v, w in self.weights.items():
            if not isinstance(v, str) or not v:
                raise GraphError(f"vertex id must be a nonempty string, got {v!r}")
            if isinstance(w, bool) or int(w) != w or w < 0:
                raise GraphError(f"weight of {v!r} must be a nonnegative integer")
            weights[v] = int(w)
        if not weights:
            raise GraphError("a graph needs at least one vertex")
        ends = {}
        for e, (a, b) in self.ends.items():
            if not isinstance(e, str) or not e:
                raise GraphError(f"edge id must be a nonempty string, got {e!r}")
            if a not in weights or b not in weights:
                raise GraphError(f"edge {e!r} references an unknown vertex")
            ends[e] = (a, b)
        object.__setattr__(self, "weights", MappingProxyType(weights))
        object.__setattr__(self, "ends", MappingProxyType(ends))
        if not _is_connected(weights, ends):
            raise DisconnectedError("underlying graph is not connected")

    def __eq__(self, other):
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return dict(self.weights) == dict(other.weights) and dict(self.ends) == dict(other.ends)

    def __hash__(self):
        return hash((frozenset(self.weights.items()), frozenset(self.ends.items())))

    def __repr__(self):
        return f"WeightedGraph(weights={dict(self.weights)}, ends={dict(self.ends)})"

    @property
    def vertices(self) -> tuple[str, ...]:
        return tuple(self.weights)

    @property
    def edge_ids(self) -> tuple[str, ...]:
        return tuple(self.ends)

    @property
    def total_weight(self) -> int:
        return sum(self.weights.values())

    @property
    def b1(self) -> int:
        return len(self.ends) - len(self.weights) + 1

    @property
    def genus(self) -> int:
        return self.b1 + self.total_weight

    def is_loop(self, e: str) -> bool:
        a, b = self.ends[e]
        return a == b

    def other_end(self, e: str, v: str) -> str:
        a, b = self.ends[e]
        return b if a == v else a

    def half_edges(self, v: str) -> list[HalfEdge]:
        return [(e, s) for e, pair in self.ends.items() for s in (0, 1) if pair[s] == v]

    def valence(self, v: str) -> int:
        return sum((a == v) + (b == v) for a, b in self.ends.values())

    def incident_edges(self, v: str) -> list[str]:
        return [e for e, (a, b) in self.ends.items() if a == v or b == v]

    def loops_at(self, v: str) -> list[str]:
        return [e for e, (a, b) in self.ends.items() if a == v and b == v]

    def edges_between(self, u: str, v: str) -> list[str]:
        return [e for e, (a, b) in self.ends.items() if {a, b} == {u, v} and (a != b or u == v)]

    def adjacency(self) -> dict[str, list[tuple[str, str]]]:
        """vertex -> list of (edge, neighbour); loops appear once."""
        adj: dict[str, list[tuple[str, str]]] = {v: [] for v in self.weights}
        for e, (a, b) in self.ends.items():
            adj[a].append((e, b))
            if a != b:
                adj[b].append((e, a))
        return adj

    def unweighted(self) -> "WeightedGraph":
        return WeightedGraph({v: 0 for v in self.weights}, self.ends)


@dataclass(frozen=True, eq=False)
class TropicalCurve:
    """A weighted graph together with positive rational edge lengths."""

    graph: WeightedGraph
    lengths: Mapping[str, Fraction]

    def __post_init__(self):
        lengths = {e: _to_fraction(self.lengths[e]) if e in self.lengths else None
                   for e in self.graph.ends}
        missing = [e for e, x in lengths.items() if x is None]
        if missing:
            raise GraphError(f"edges without length: {missing}")
        extra = set(self.lengths) - set(self.graph.ends)
        if extra:
            raise GraphError(f"lengths given for unknown edges: {sorted(extra)}")
        bad = [e for e, x in lengths.items() if x <= 0]
        if bad:
            raise GraphError(f"nonpositive lengths on {bad}")
        object.__setattr__(self, "lengths", MappingProxyType(lengths))

    def __eq__(self, other):
        if not isinstance(other, TropicalCurve):
            return NotImplemented
        return self.graph == other.graph and dict(self.lengths) == dict(other.lengths)

    def __hash__(self):
        return hash((self.graph, frozenset(self.lengths.items())))

    def __repr__(self):
        lengths = {e: str(x) for e, x in self.lengths.items()}
        return f"TropicalCurve({self.graph!r}, lengths={lengths})"

    # convenience pass-throughs
    @property
    def weights(self):
        return self.graph.weights

    @property
    def ends(self):
        return self.graph.ends

    @property
    def vertices(self):
        return self.graph.vertices

    @property
    def edge_ids(self):
        return self.graph.edge_ids

    @property
    def genus(self) -> int:
        return self.graph.genus

    def length(self, e: str) -> Fraction:
        return self.lengths[e]

    def with_lengths(self, lengths: Mapping[str, object]) -> "TropicalCurve":
        return TropicalCurve(self.graph, lengths)

    def total_length(self, edges: Iterable[str] | None = None) -> Fraction:
        edges = self.graph.ends if edges is None else edges
        return sum((self.lengths[e] for e in edges), Fraction(0))


GraphLike = Union[WeightedGraph, TropicalCurve]


def make_graph(edges, weights: Mapping[str, int] | None = None) -> WeightedGraph:
    """Build a graph from ``{id: (u, v)}`` or a sequence of ``(u, v)`` pairs.

    Vertices mentioned only in ``weights`` are kept (isolated single vertex
    graphs need this).  Sequence input gets ids ``e0, e1, ...``.
    """
    if not isinstance(edges, Mapping):
        edges = {f"e{i}": tuple(pair) for i, pair in enumerate(edges)}
    order: dict[str, int] = {}
    for v in (weights or {}):
        order.setdefault(v, 0)
    for a, b in edges.values():
        order.setdefault(a, 0)
        order.setdefault(b, 0)
    for v, w in (weights or {}).items():
        order[v] = w
    return WeightedGraph(order, {e: (a, b) for e, (a, b) in edges.items()})


def make_curve(edges, lengths=None, weights=None) -> TropicalCurve:
    """Like :func:`make_graph`; ``lengths`` is a mapping or a sequence aligned with edges."""
    g = make_graph(edges, weights)
    if lengths is None:
        lengths = {e: 1 for e in g.ends}
    elif not isinstance(lengths, Mapping):
        lengths = dict(zip(g.ends, lengths))
    return TropicalCurve(g, lengths)


def as_curve(obj: GraphLike) -> TropicalCurve:
    """Curves pass through; graphs get unit lengths."""
    if isinstance(obj, TropicalCurve):
        return obj
    if isinstance(obj, WeightedGraph):
        return TropicalCurve(obj, {e: 1 for e in obj.ends})
    raise TypeError(f"expected WeightedGraph or TropicalCurve, got {type(obj).__name__}")


def graph_of(obj: GraphLike) -> WeightedGraph:
    return obj.graph if isinstance(obj, TropicalCurve) else obj


def _unpack(obj: GraphLike):
    if isinstance(obj, TropicalCurve):
        return obj.graph, dict(obj.lengths)
    if isinstance(obj, WeightedGraph):
        return obj, None
    raise TypeError(f"expected WeightedGraph or TropicalCurve, got {type(obj).__name__}")


def _pack(weights, ends, lengths):
    g = WeightedGraph(weights, ends)
    if lengths is None:
        return g
    return TropicalCurve(g, {e: lengths[e] for e in ends})


def _is_connected(weights, ends) -> bool:
    if not weights:
        return False
    adj = defaultdict(list)
    for a, b in ends.values():
        adj[a].append(b)
        adj[b].append(a)
    start = next(iter(weights))
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(weights)


def is_connected_edges(vertices: Iterable[str], ends: Mapping[str, tuple[str, str]]) -> bool:
    return _is_connected({v: 0 for v in vertices}, ends)


# ---------------------------------------------------------------- traces

@dataclass(frozen=True)
class EdgeTrace:
    """Where each source edge and vertex went in a derived graph.

    Values are cells: ``("e", id)`` for a surviving edge (or the edge a
    suppressed piece was merged into) and ``("v", id)`` for a vertex.
    """

    edges: Mapping[str, Cell]
    vertices: Mapping[str, Cell]

    @classmethod
    def identity(cls, g: GraphLike) -> "EdgeTrace":
        g = graph_of(g)
        return cls({e: ("e", e) for e in g.ends}, {v: ("v", v) for v in g.weights})

    def then(self, other: "EdgeTrace") -> "EdgeTrace":
        """Composition: apply ``self`` first, then ``other``."""

        def push(cell: Cell) -> Cell:
            kind, name = cell
            return other.vertices[name] if kind == "v" else other.edges[name]

        return EdgeTrace({e: push(c) for e, c in self.edges.items()},
                         {v: push(c) for v, c in self.vertices.items()})

    def edge_image(self, e: str) -> str | None:
        kind, name = self.edges[e]
        return name if kind == "e" else None

    def contracted(self) -> list[str]:
        return [e for e, (kind, _) in self.edges.items() if kind == "v"]


# ---------------------------------------------------------------- invariants

def genus(g: GraphLike) -> int:
    return graph_of(g).genus


def is_stable(g: GraphLike) -> bool:
    g = graph_of(g)
    return all(2 * w - 2 + g.valence(v) > 0 for v, w in g.weights.items())


def d_invariant(g: GraphLike) -> int:
    """Sum over vertices of ``val(v) + 3 w(v) - 3``; defined for stable graphs."""
    g = graph_of(g)
    if not is_stable(g):
        raise GraphError("d-invariant is defined for stable graphs only")
    return sum(g.valence(v) + 3 * w - 3 for v, w in g.weights.items())


# ---------------------------------------------------------------- rewriting

def contract_edges(obj: GraphLike, edge_ids: Iterable[str]):
    """Weighted contraction of a set of edges at once.

    A contracted edge that closes a cycle among the contracted ones acts as a
    loop contraction and adds one to the weight.  Merged vertices keep the id
    that comes first in vertex order.  Returns ``(result, trace)``.
    """
    g, lengths = _unpack(obj)
    chosen = set(edge_ids)
    missing = chosen - set(g.ends)
    if missing:
        raise GraphError(f"no such edge(s): {sorted(missing)}")
    order = {v: i for i, v in enumerate(g.weights)}
    parent = {v: v for v in g.weights}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in g.ends:
        if e in chosen:
            ra, rb = find(g.ends[e][0]), find(g.ends[e][1])
            if ra != rb:
                if order[rb] < order[ra]:
                    ra, rb = rb, ra
                parent[rb] = ra
    members = Counter(find(v) for v in g.weights)
    inner = Counter(find(g.ends[e][0]) for e in chosen)
    weights = {}
    for v in g.weights:
        r = find(v)
        if r == v:
            weights[v] = 0
    for v, w in g.weights.items():
        weights[find(v)] += w
    for r in weights:
        weights[r] += inner[r] - (members[r] - 1)
    ends = {e: (find(a), find(b)) for e, (a, b) in g.ends.items() if e not in chosen}
    trace = EdgeTrace(
        {e: (("v", find(g.ends[e][0])) if e in chosen else ("e", e)) for e in g.ends},
        {v: ("v", find(v)) for v in g.weights},
    )
    return _pack(weights, ends, lengths), trace


def contract_edge(obj: GraphLike, e: str):
    if e not in graph_of(obj).ends:
        raise GraphError(f"no such edge: {e!r}")
    return contract_edges(obj, [e])


def delete_edges(obj: GraphLike, edge_ids: Iterable[str]) -> GraphLike:
    g, lengths = _unpack(obj)
    gone = set(edge_ids)
    missing = gone - set(g.ends)
    if missing:
        raise GraphError(f"no such edge(s): {sorted(missing)}")
    ends = {e: p for e, p in g.ends.items() if e not in gone}
    if not _is_connected(g.weights, ends):
        raise DisconnectedError(f"deleting {sorted(gone)} disconnects the graph")
    return _pack(dict(g.weights), ends, lengths)


def delete_edge(obj: GraphLike, e: str) -> GraphLike:
    return delete_edges(obj, [e])


def lower_weight(obj: GraphLike, v: str) -> GraphLike:
    g, lengths = _unpack(obj)
    if g.weights.get(v, 0) < 1:
        raise GraphError(f"vertex {v!r} has no weight to lower")
    weights = dict(g.weights)
    weights[v] -= 1
    return _pack(weights, dict(g.ends), lengths)


def stable_model(obj: GraphLike):
    """Stable model of a genus >= 2 curve (or graph).

    Applies two local moves until none applies: drop a 1-valent weight-0
    vertex together with its edge, and suppress a 2-valent weight-0 vertex
    not carrying a loop (the two edges merge, lengths add, the earlier edge
    id survives).  Returns ``(result, trace)``.
    """
    g, lengths = _unpack(obj)
    if g.genus < 2:
        raise GraphError(f"stable model needs genus >= 2, got {g.genus}")
    weights = dict(g.weights)
    ends = dict(g.ends)
    lengths = None if lengths is None else dict(lengths)
    edge_cell: dict[str, Cell] = {e: ("e", e) for e in ends}
    vertex_cell: dict[str, Cell] = {v: ("v", v) for v in weights}

    def redirect(old: Cell, new: Cell):
        for table in (edge_cell, vertex_cell):
            for k, c in table.items():
                if c == old:
                    table[k] = new

    changed = True
    while changed:
        changed = False
        for x in list(weights):
            if weights[x] != 0:
                continue
            inc = [e for e, (a, b) in ends.items() if a == x or b == x]
            val = sum((ends[e][0] == x) + (ends[e][1] == x) for e in inc)
            if val == 1:
                (e,) = inc
                nb = ends[e][1] if ends[e][0] == x else ends[e][0]
                del ends[e], weights[x]
                if lengths is not None:
                    del lengths[e]
                redirect(("e", e), ("v", nb))
                redirect(("v", x), ("v", nb))
                changed = True
                break
            if val == 2 and len(inc) == 2:
                a, b = inc
                ua = ends[a][1] if ends[a][0] == x else ends[a][0]
                ub = ends[b][1] if ends[b][0] == x else ends[b][0]
                ends[a] = (ua, ub)
                del ends[b], weights[x]
                if lengths is not None:
                    lengths[a] = lengths[a] + lengths.pop(b)
                redirect(("e", b), ("e", a))
                redirect(("v", x), ("e", a))
                changed = True
                break
    return _pack(weights, ends, lengths), EdgeTrace(edge_cell, vertex_cell)


def subdivide(obj: GraphLike, e: str, offset=None, vertex_id: str | None = None,
              edge_id: str | None = None):
    """Insert a vertex on edge ``e``.

    ``e`` keeps its id and runs from its half-edge-0 end to the new vertex
    with length ``offset`` (default: half); the new edge runs on to the old
    half-edge-1 end.  Returns ``(result, new_vertex, new_edge)``.
    """
    g, lengths = _unpack(obj)
    if e not in g.ends:
        raise GraphError(f"no such edge: {e!r}")
    vertex_id = vertex_id or fresh_id(f"{e}.m", g.weights)
    edge_id = edge_id or fresh_id(f"{e}'", g.ends)
    if vertex_id in g.weights or edge_id in g.ends:
        raise GraphError("subdivision ids collide with existing ids")
    a, b = g.ends[e]
    weights = dict(g.weights)
    weights[vertex_id] = 0
    ends = dict(g.ends)
    ends[e] = (a, vertex_id)
    ends[edge_id] = (vertex_id, b)
    if lengths is not None:
        total = lengths[e]
        first = total / 2 if offset is None else _to_fraction(offset)
        if not 0 < first < total:
            raise GraphError(f"offset {first} outside the open edge (0, {total})")
        lengths[e] = first
        lengths[edge_id] = total - first
    return _pack(weights, ends, lengths), vertex_id, edge_id


def fresh_id(base: str, taken) -> str:
    if base not in taken:
        return base
    k = 1
    while f"{base}{k}" in taken:
        k += 1
    return f"{base}{k}"


def induced_subcurve(obj: GraphLike, edges: Iterable[str], keep_weights: bool = False):
    """Subgraph spanned by ``edges`` (vertex weights dropped unless asked)."""
    g, lengths = _unpack(obj)
    edges = [e for e in g.ends if e in set(edges)]
    verts = []
    for e in edges:
        for v in g.ends[e]:
            if v not in verts:
                verts.append(v)
    order = {v: i for i, v in enumerate(g.weights)}
    verts.sort(key=order.__getitem__)
    weights = {v: (g.weights[v] if keep_weights else 0) for v in verts}
    return _pack(weights, {e: g.ends[e] for e in edges}, lengths)


# ---------------------------------------------------------------- blocks

@dataclass(frozen=True)
class Block:
    """A weight-one vertex or a maximal 2-connected subgraph (bridges and loops included)."""

    kind: str  # "weight" or "subgraph"
    vertices: frozenset
    edges: frozenset

    @property
    def genus(self) -> int:
        if self.kind == "weight":
            return 1
        return len(self.edges) - len(self.vertices) + 1


def _biconnected_edge_sets(g: WeightedGraph) -> list[list[str]]:
    adj = defaultdict(list)
    for e, (a, b) in g.ends.items():
        if a != b:
            adj[a].append((e, b))
            adj[b].append((e, a))
    disc: dict[str, int] = {}
    low: dict[str, int] = {}
    comps: list[list[str]] = []
    stack: list[str] = []
    counter = [0]

    def dfs(v, parent_edge):
        disc[v] = low[v] = counter[0]
        counter[0] += 1
        for e, w in adj[v]:
            if e == parent_edge:
                continue
            if w not in disc:
                stack.append(e)
                dfs(w, e)
                low[v] = min(low[v], low[w])
                if low[w] >= disc[v]:
                    comp = []
                    while True:
                        f = stack.pop()
                        comp.append(f)
                        if f == e:
                            break
                    comps.append(comp)
            elif disc[w] < disc[v]:
                stack.append(e)
                low[v] = min(low[v], disc[w])

    for v in g.weights:
        if v not in disc:
            dfs(v, None)
    return comps


def blocks(obj: GraphLike) -> list[Block]:
    """Block decomposition; edge blocks in edge order, then weight units."""
    g = graph_of(obj)
    order = {e: i for i, e in enumerate(g.ends)}
    edge_sets = _biconnected_edge_sets(g) + [[e] for e in g.ends if g.is_loop(e)]
    edge_sets.sort(key=lambda s: min(order[e] for e in s))
    out = []
    for s in edge_sets:
        verts = frozenset(v for e in s for v in g.ends[e])
        out.append(Block("subgraph", verts, frozenset(s)))
    for v, w in g.weights.items():
        out.extend(Block("weight", frozenset([v]), frozenset()) for _ in range(w))
    return out


def is_two_connected(obj: GraphLike, ignore_weights: bool = False) -> bool:
    """Zero weights (unless ignored) and a single block holding every edge."""
    g = graph_of(obj)
    if not ignore_weights and g.total_weight:
        return False
    edge_blocks = [b for b in blocks(g) if b.kind == "subgraph"]
    return len(edge_blocks) == 1 and len(g.weights) == len(edge_blocks[0].vertices)


def bridges(obj: GraphLike) -> list[str]:
    """Edges whose removal disconnects the graph, in edge order."""
    g = graph_of(obj)
    out = []
    for e in g.ends:
        if g.is_loop(e):
            continue
        rest = {f: p for f, p in g.ends.items() if f != e}
        if not _is_connected(g.weights, rest):
            out.append(e)
    return out


# ---------------------------------------------------------------- isomorphism

def _nx_graph(obj: GraphLike, use_lengths: bool):
    import networkx as nx

    g, lengths = _unpack(obj)
    h = nx.Graph()
    for v, w in g.weights.items():
        h.add_node(v, weight=w)
    labels = defaultdict(list)
    for e, (a, b) in g.ends.items():
        labels[tuple(sorted((a, b)))].append(lengths[e] if (use_lengths and lengths) else 1)
    for (a, b), ls in labels.items():
        h.add_edge(a, b, label=tuple(sorted(ls)))
    return h


def invariant_key(obj: GraphLike, use_lengths: bool = False):
    """Cheap isomorphism invariant for bucketing."""
    g, lengths = _unpack(obj)
    profile = sorted((w, g.valence(v), len(g.loops_at(v))) for v, w in g.weights.items())
    lens = sorted(lengths.values()) if (use_lengths and lengths) else None
    return (len(g.weights), len(g.ends), tuple(profile), None if lens is None else tuple(lens))


def are_isomorphic(a: GraphLike, b: GraphLike, use_lengths: bool = False) -> bool:
    """Isomorphism of weighted multigraphs, optionally respecting lengths."""
    import networkx as nx
    from networkx.algorithms.isomorphism import categorical_node_match

    if invariant_key(a, use_lengths) != invariant_key(b, use_lengths):
        return False
    return nx.is_isomorphic(
        _nx_graph(a, use_lengths), _nx_graph(b, use_lengths),
        node_match=categorical_node_match("weight", 0),
        edge_match=lambda x, y: x["label"] == y["label"],
    )


def dedupe_isomorphic(items: Iterable[GraphLike], use_lengths: bool = False) -> list:
    """Keep the first representative of each isomorphism class, preserving order."""
    buckets: dict = defaultdict(list)
    out = []
    for item in items:
        key = invariant_key(item, use_lengths)
        if any(are_isomorphic(item, other, use_lengths) for other in buckets[key]):
            continue
        buckets[key].append(item)
        out.append(item)
    return out


# ---------------------------------------------------------------- generator

def random_stable_graph(seed, target_genus: int, max_edges: int, weighted: bool = True,
                        max_tries: int = 20000) -> TropicalCurve:
    """Deterministic random stable curve of the given genus with at most ``max_edges`` edges.

    Rejection sampling over a random spanning tree plus extra edges (loops
    and parallels allowed) plus a random weight distribution.  With
    ``weighted=False`` every vertex has weight 0.
    """
    if target_genus < 2:
        raise GraphError("target genus must be at least 2")
    if max_edges < 0:
        raise GraphError("max_edges must be nonnegative")
    g = target_genus
    rng = random.Random(seed)
    for _ in range(max_tries):
        total_w = rng.randint(1, g) if (weighted and rng.random() < 0.35) else 0
        b1 = g - total_w
        n = rng.randint(1, 2 * g - 2)
        m = n - 1 + b1
        if m > max_edges or (b1 == 0 and n > 1 and total_w == 0):
            continue
        names = [f"v{i}" for i in range(n)]
        pairs = [(names[rng.randrange(i)], names[i]) for i in range(1, n)]
        pairs += [(names[rng.randrange(n)], names[rng.randrange(n)]) for _ in range(b1)]
        rng.shuffle(pairs)
        weights = {v: 0 for v in names}
        for _ in range(total_w):
            weights[names[rng.randrange(n)]] += 1
        ends = {f"e{i}": p for i, p in enumerate(pairs)}
        graph = WeightedGraph(weights, ends)
        if not is_stable(graph):
            continue
        lengths = {e: Fraction(rng.randint(1, 6), rng.choice((1, 1, 2, 3))) for e in ends}
        return TropicalCurve(graph, lengths)
    raise GraphError(f"could not sample a stable genus-{g} graph with <= {max_edges} edges")
