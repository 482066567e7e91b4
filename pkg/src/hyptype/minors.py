"""Minor models for small patterns, series-parallel recognition, and minor moves."""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional

from .errors import DisconnectedError, GraphError, SizeGuardError
from .graph import (
    GraphLike,
    WeightedGraph,
    blocks,
    contract_edge,
    dedupe_isomorphic,
    delete_edge,
    graph_of,
    is_two_connected,
    lower_weight,
)

MAX_SEARCH_VERTICES = 11


@dataclass(frozen=True)
class Pattern:
    name: str
    graph: WeightedGraph

    @property
    def multiplicity(self) -> Counter:
        return Counter(frozenset(p) for p in self.graph.ends.values())

    @property
    def min_degree(self) -> int:
        return min(self.graph.valence(v) for v in self.graph.weights)


def K4() -> Pattern:
    verts = "0123"
    ends = {a + b: (a, b) for a, b in itertools.combinations(verts, 2)}
    return Pattern("K4", WeightedGraph({v: 0 for v in verts}, ends))


def L3() -> Pattern:
    """Triangle with every side doubled."""
    verts = "012"
    ends = {}
    for a, b in itertools.combinations(verts, 2):
        ends[a + b + "a"] = (a, b)
        ends[a + b + "b"] = (a, b)
    return Pattern("L3", WeightedGraph({v: 0 for v in verts}, ends))


def pattern_from_graph(name: str, g: GraphLike) -> Pattern:
    g = graph_of(g).unweighted()
    if any(g.is_loop(e) for e in g.ends):
        raise GraphError("patterns must be loopless")
    return Pattern(name, g)


PATTERNS = {"K4": K4, "L3": L3}


@dataclass(frozen=True)
class MinorModel:
    """Branch set per pattern vertex and a host edge per pattern edge."""

    pattern: str
    branch_sets: Mapping[str, frozenset]
    edge_map: Mapping[str, str]

    def to_json(self) -> dict:
        return {
            "pattern": self.pattern,
            "branch_sets": {p: sorted(s) for p, s in self.branch_sets.items()},
            "edge_map": dict(self.edge_map),
        }

    @classmethod
    def from_json(cls, data: dict) -> "MinorModel":
        return cls(data["pattern"], {p: frozenset(s) for p, s in data["branch_sets"].items()},
                   dict(data["edge_map"]))


def _connected_within(g: WeightedGraph, verts: frozenset) -> bool:
    if not verts:
        return False
    start = next(iter(verts))
    seen = {start}
    stack = [start]
    adj = g.adjacency()
    while stack:
        v = stack.pop()
        for _, w in adj[v]:
            if w in verts and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == set(verts)


def verify_minor_model(host: GraphLike, pattern: Pattern, model: MinorModel) -> bool:
    g = graph_of(host)
    p = pattern.graph
    bs = model.branch_sets
    if set(bs) != set(p.weights):
        return False
    seen = set()
    for s in bs.values():
        if not s or not s <= set(g.weights) or s & seen or not _connected_within(g, s):
            return False
        seen |= s
    em = model.edge_map
    if set(em) != set(p.ends) or len(set(em.values())) != len(em):
        return False
    for pe, he in em.items():
        if he not in g.ends or g.is_loop(he):
            return False
        x, y = p.ends[pe]
        a, b = g.ends[he]
        if not ((a in bs[x] and b in bs[y]) or (a in bs[y] and b in bs[x])):
            return False
    return True


# ------------------------------------------------------------- reduction

@dataclass
class _Chain:
    a: str
    b: str
    edges: list  # original edges from a to b
    interior: list  # original vertices strictly between


def _reduce(vertices, ends, cap: int):
    """Delete pendant vertices, suppress degree-2 vertices, cap multiplicities.

    Valid for patterns of minimum degree >= 3 whose multiplicities are <= cap.
    """
    verts = list(vertices)
    chains = {e: _Chain(a, b, [e], []) for e, (a, b) in ends.items() if a != b}
    counter = itertools.count()
    changed = True
    while changed:
        changed = False
        inc = defaultdict(list)
        for cid, ch in chains.items():
            inc[ch.a].append(cid)
            inc[ch.b].append(cid)
        groups = defaultdict(list)
        for cid, ch in chains.items():
            groups[frozenset((ch.a, ch.b))].append(cid)
        for cids in groups.values():
            for cid in cids[cap:]:
                del chains[cid]
                changed = True
        if changed:
            continue
        for v in verts:
            d = len(inc[v])
            if d <= 1 and len(verts) > 1:
                for cid in inc[v]:
                    del chains[cid]
                verts.remove(v)
                changed = True
                break
            if d == 2:
                c1, c2 = (chains[c] for c in inc[v])
                x1 = c1.b if c1.a == v else c1.a
                x2 = c2.b if c2.a == v else c2.a
                for cid in inc[v]:
                    del chains[cid]
                verts.remove(v)
                if x1 != x2:
                    left = c1 if c1.b == v else _Chain(c1.b, c1.a, c1.edges[::-1], c1.interior[::-1])
                    right = c2 if c2.a == v else _Chain(c2.b, c2.a, c2.edges[::-1], c2.interior[::-1])
                    chains[f"~{next(counter)}"] = _Chain(
                        left.a, right.b, left.edges + right.edges,
                        left.interior + [v] + right.interior)
                changed = True
                break
    return verts, chains


def _search(verts, chains, pattern: Pattern):
    """Exhaustive assignment of vertices to k blocks or 'unused'."""
    k = len(pattern.graph.weights)
    n = len(verts)
    if n < k:
        return None
    if n > MAX_SEARCH_VERTICES:
        raise SizeGuardError(f"minor search limited to {MAX_SEARCH_VERTICES} reduced vertices")
    adj = defaultdict(set)
    for ch in chains.values():
        adj[ch.a].add(ch.b)
        adj[ch.b].add(ch.a)
    # BFS order keeps blocks growing near each other
    order = []
    for root in verts:
        if root in order:
            continue
        queue = [root]
        order.append(root)
        while queue:
            v = queue.pop(0)
            for w in sorted(adj[v]):
                if w not in order:
                    order.append(w)
                    queue.append(w)
    pverts = list(pattern.graph.weights)
    need = pattern.multiplicity
    pdeg = sorted(pattern.graph.valence(v) for v in pverts)
    label = {}

    def connected(block):
        start = block[0]
        seen = {start}
        stack = [start]
        bset = set(block)
        while stack:
            for w in adj[stack.pop()]:
                if w in bset and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(block)

    def evaluate():
        bl = [[] for _ in range(k)]
        for v, i in label.items():
            if i >= 0:
                bl[i].append(v)
        if not all(connected(b) for b in bl):
            return None
        between = defaultdict(list)
        for cid, ch in chains.items():
            i, j = label[ch.a], label[ch.b]
            if i >= 0 and j >= 0 and i != j:
                between[frozenset((i, j))].append(cid)
        deg = sorted(sum(len(c) for key, c in between.items() if i in key) for i in range(k))
        if any(d < p for d, p in zip(deg, pdeg)):
            return None
        for perm in itertools.permutations(range(k)):
            place = dict(zip(pverts, perm))
            if all(len(between[frozenset((place[x], place[y]))]) >= m
                   for key, m in need.items() for x, y in [tuple(key)]):
                return bl, place, between
        return None

    def extend(pos, used):
        if k - used > n - pos:
            return None
        if pos == n:
            return evaluate() if used == k else None
        v = order[pos]
        for i in list(range(used)) + ([used] if used < k else []) + [-1]:
            label[v] = i
            found = extend(pos + 1, max(used, i + 1))
            if found:
                return found
        del label[v]
        return None

    return extend(0, 0)


def _model_in(g: WeightedGraph, pattern: Pattern, reduce: bool) -> Optional[MinorModel]:
    ends = {e: p for e, p in g.ends.items() if p[0] != p[1]}
    cap = max(pattern.multiplicity.values())
    if reduce and pattern.min_degree >= 3:
        verts, chains = _reduce(list(g.weights), ends, cap)
    else:
        verts = list(g.weights)
        chains = {e: _Chain(a, b, [e], []) for e, (a, b) in ends.items()}
    found = _search(verts, chains, pattern)
    if not found:
        return None
    bl, place, between = found
    branch = {p: set(bl[i]) for p, i in place.items()}
    owner = {v: p for p, s in branch.items() for v in s}
    edge_map = {}
    pool = {key: list(cids) for key, cids in between.items()}
    for pe, (x, y) in pattern.graph.ends.items():
        cid = pool[frozenset((place[x], place[y]))].pop(0)
        ch = chains[cid]
        # interior vertices join the branch set at the chain's start
        branch[owner[ch.a]].update(ch.interior)
        edge_map[pe] = ch.edges[-1]
    for ch in chains.values():
        if ch.a in owner and ch.b in owner and owner[ch.a] == owner[ch.b]:
            branch[owner[ch.a]].update(ch.interior)
    return MinorModel(pattern.name, {p: frozenset(s) for p, s in branch.items()}, edge_map)


def _two_connected_pattern(p: Pattern) -> bool:
    return len(p.graph.weights) >= 2 and is_two_connected(p.graph, ignore_weights=True)


def find_minor_model(host: GraphLike, pattern: Pattern, reduce: bool = True) -> Optional[MinorModel]:
    """A verified model of ``pattern`` in the underlying graph of ``host``, or ``None``.

    Host weights and loops are ignored.  For 2-connected patterns the search
    runs block by block; hosts are first reduced by deleting pendant
    vertices, suppressing degree-2 vertices, and capping edge multiplicities.
    """
    g = graph_of(host).unweighted()
    if any(pattern.graph.is_loop(e) for e in pattern.graph.ends):
        raise GraphError("patterns must be loopless")
    if _two_connected_pattern(pattern):
        parts = []
        for b in blocks(g):
            if b.kind != "subgraph" or len(b.vertices) < len(pattern.graph.weights):
                continue
            parts.append(WeightedGraph({v: 0 for v in g.weights if v in b.vertices},
                                       {e: g.ends[e] for e in g.ends if e in b.edges}))
    else:
        parts = [g]
    for part in parts:
        model = _model_in(part, pattern, reduce)
        if model is not None:
            if not verify_minor_model(g, pattern, model):
                raise GraphError("internal error: minor model failed verification")
            return model
    return None


def has_minor(host: GraphLike, pattern: Pattern) -> bool:
    return find_minor_model(host, pattern) is not None


# ------------------------------------------------------------- series-parallel

@dataclass(frozen=True)
class SPNode:
    """Two-terminal series-parallel tree; children run from ``s`` to ``t``."""

    kind: str  # "edge", "series", "parallel"
    s: str
    t: str
    edge: Optional[str] = None
    children: tuple = ()

    def reversed(self) -> "SPNode":
        if self.kind == "edge":
            return SPNode("edge", self.t, self.s, self.edge)
        kids = tuple(c.reversed() for c in self.children)
        if self.kind == "series":
            kids = kids[::-1]
        return SPNode(self.kind, self.t, self.s, None, kids)

    def edges(self) -> list[str]:
        if self.kind == "edge":
            return [self.edge]
        return [e for c in self.children for e in c.edges()]

    def sort_key(self):
        return (self.kind != "edge", min(self.edges()))


@dataclass
class SPResult:
    is_series_parallel: bool
    tree: Optional[SPNode]
    trace: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.is_series_parallel


def _oriented(node: SPNode, s: str) -> SPNode:
    return node if node.s == s else node.reversed()


def _make_parallel(a: SPNode, b: SPNode) -> SPNode:
    b = _oriented(b, a.s)
    kids = []
    for n in (a, b):
        kids.extend(n.children if n.kind == "parallel" else (n,))
    kids.sort(key=SPNode.sort_key)
    return SPNode("parallel", a.s, a.t, None, tuple(kids))


def _make_series(a: SPNode, b: SPNode, mid: str) -> SPNode:
    a = a if a.t == mid else a.reversed()
    b = b if b.s == mid else b.reversed()
    kids = []
    for n in (a, b):
        kids.extend(n.children if n.kind == "series" else (n,))
    return SPNode("series", a.s, b.t, None, tuple(kids))


def is_series_parallel(obj: GraphLike) -> SPResult:
    """Series/parallel reduction of a 2-connected loopless multigraph.

    The trace lists ``("parallel", e, f)`` and ``("series", vertex, e, f)``
    steps; the tree is returned when a single edge remains.
    """
    g = graph_of(obj)
    if any(g.is_loop(e) for e in g.ends):
        raise GraphError("series-parallel test needs a loopless graph")
    if not is_two_connected(g, ignore_weights=True):
        raise GraphError("series-parallel test needs a 2-connected graph")
    nodes = {e: SPNode("edge", a, b, e) for e, (a, b) in g.ends.items()}
    trace = []
    counter = itertools.count()
    while len(nodes) > 1:
        by_pair = {}
        merged = False
        for nid, n in nodes.items():
            key = frozenset((n.s, n.t))
            if key in by_pair:
                other = by_pair[key]
                new = _make_parallel(nodes[other], n)
                trace.append(("parallel", other, nid))
                del nodes[nid]
                nodes[other] = new
                merged = True
                break
            by_pair[key] = nid
        if merged:
            continue
        inc = defaultdict(list)
        for nid, n in nodes.items():
            inc[n.s].append(nid)
            inc[n.t].append(nid)
        # among degree-2 vertices, join the heaviest pair of subtrees first
        cands = [v for v in g.weights if len(inc[v]) == 2]
        cands.sort(key=lambda v: -sum(len(nodes[n].edges()) for n in inc[v]))
        if not cands:
            return SPResult(False, None, trace)
        v = cands[0]
        x, y = inc[v]
        nodes[f"sp{next(counter)}"] = _make_series(nodes[x], nodes[y], v)
        trace.append(("series", v, x, y))
        del nodes[x], nodes[y]
    (root,) = nodes.values()
    return SPResult(True, root, trace)


def blocks_series_parallel(obj: GraphLike) -> bool:
    """True iff every 2-connected block of the loopless underlying graph is series-parallel."""
    g = graph_of(obj).unweighted()
    for b in blocks(g):
        if b.kind != "subgraph" or len(b.edges) < 2:
            continue
        sub = WeightedGraph({v: 0 for v in g.weights if v in b.vertices},
                            {e: g.ends[e] for e in g.ends if e in b.edges})
        if not is_series_parallel(sub):
            return False
    return True


# ------------------------------------------------------------- minor moves

def minor_moves(obj: GraphLike) -> Iterator[GraphLike]:
    """Every single weight decrement, connected deletion, and contraction."""
    g = graph_of(obj)
    for v, w in g.weights.items():
        if w > 0:
            yield lower_weight(obj, v)
    for e in g.ends:
        try:
            yield delete_edge(obj, e)
        except DisconnectedError:
            pass
    for e in g.ends:
        yield contract_edge(obj, e)[0]


def connected_minors(obj: GraphLike, min_genus: int = 0) -> Iterator[WeightedGraph]:
    """Distinct (up to isomorphism) one-move minors of genus at least ``min_genus``."""
    g = graph_of(obj)
    candidates = (graph_of(m) for m in minor_moves(g))
    yield from dedupe_isomorphic(m for m in candidates if m.genus >= min_genus)
