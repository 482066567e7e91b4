"""Cycle matroids of weighted graphs and 2-isomorphism search."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Mapping

from .errors import SizeGuardError
from .graph import GraphLike, TropicalCurve, graph_of

MAX_CYCLE_RANK = 16


@dataclass(frozen=True)
class CycleMatroidView:
    """Circuits of the cycle matroid plus ``weight_loops`` extra loop elements.

    Weight-loop markers are the integers ``0 .. weight_loops - 1``; graph
    circuits are frozensets of edge ids.
    """

    edges: tuple[str, ...]
    weight_loops: int
    graph_circuits: frozenset

    @property
    def ground_set(self) -> tuple:
        return self.edges + tuple(range(self.weight_loops))

    @property
    def circuits(self) -> list[frozenset]:
        out = sorted(self.graph_circuits, key=lambda c: (len(c), sorted(c)))
        return out + [frozenset([i]) for i in range(self.weight_loops)]

    @property
    def loops(self) -> tuple:
        single = tuple(next(iter(c)) for c in self.graph_circuits if len(c) == 1)
        return single + tuple(range(self.weight_loops))


def _spanning_forest(g):
    adj = g.adjacency()
    tree_edges = set()
    parent: dict[str, tuple[str | None, str | None]] = {}
    for root in g.weights:
        if root in parent:
            continue
        parent[root] = (None, None)
        stack = [root]
        while stack:
            v = stack.pop()
            for e, w in adj[v]:
                if w not in parent:
                    parent[w] = (v, e)
                    tree_edges.add(e)
                    stack.append(w)
    return tree_edges, parent


def _tree_path(parent, a, b) -> set[str]:
    def chain(v):
        out = []
        while v is not None:
            out.append(v)
            v = parent[v][0]
        return out

    ca, cb = chain(a), chain(b)
    common = set(ca) & set(cb)
    edges = set()
    for c in (ca, cb):
        for v in c:
            if v in common:
                break
            edges.add(parent[v][1])
    return edges


def fundamental_cycles(g: GraphLike) -> list[set[str]]:
    """One cycle per non-tree edge of a fixed DFS spanning tree."""
    g = graph_of(g)
    tree, parent = _spanning_forest(g)
    out = []
    for e, (a, b) in g.ends.items():
        if e in tree:
            continue
        out.append({e} | _tree_path(parent, a, b))
    return out


def _is_circuit(g, edges) -> bool:
    deg = Counter()
    for e in edges:
        a, b = g.ends[e]
        deg[a] += 1
        deg[b] += 1
    if any(d != 2 for d in deg.values()):
        return False
    adj = defaultdict(list)
    for e in edges:
        a, b = g.ends[e]
        adj[a].append(b)
        adj[b].append(a)
    start = next(iter(deg))
    seen = {start}
    stack = [start]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(deg)


def circuits(obj: GraphLike) -> CycleMatroidView:
    """All circuits, by enumerating the cycle space over GF(2).

    Every nonzero element of the cycle space is an edge-disjoint union of
    circuits; the connected 2-regular ones are exactly the circuits.
    """
    g = graph_of(obj)
    basis = fundamental_cycles(g)
    if len(basis) > MAX_CYCLE_RANK:
        raise SizeGuardError(f"cycle rank {len(basis)} exceeds {MAX_CYCLE_RANK}")
    index = {e: i for i, e in enumerate(g.ends)}
    masks = [sum(1 << index[e] for e in cyc) for cyc in basis]
    names = list(g.ends)
    found = set()
    # Gray-code walk over all subsets of the basis
    mask = 0
    for k in range(1, 1 << len(masks)):
        bit = (k & -k).bit_length() - 1
        mask ^= masks[bit]
        edges = frozenset(names[i] for i in range(len(names)) if mask >> i & 1)
        if _is_circuit(g, edges):
            found.add(edges)
    return CycleMatroidView(tuple(g.ends), g.total_weight, frozenset(found))


@dataclass(frozen=True)
class TwoIsomorphism:
    """Edge bijection inducing a cycle-matroid isomorphism.

    Weight-loop markers are interchangeable and are matched implicitly; the
    two graphs must carry the same total weight.
    """

    mapping: Mapping[str, str]
    length_preserving: bool

    def inverse(self) -> "TwoIsomorphism":
        return TwoIsomorphism({b: a for a, b in self.mapping.items()}, self.length_preserving)

    def then(self, other: "TwoIsomorphism") -> "TwoIsomorphism":
        return TwoIsomorphism({a: other.mapping[b] for a, b in self.mapping.items()},
                              self.length_preserving and other.length_preserving)


def _lengths(obj):
    return obj.lengths if isinstance(obj, TropicalCurve) else {e: 1 for e in graph_of(obj).ends}


def verify_two_isomorphism(a: GraphLike, b: GraphLike, witness: TwoIsomorphism) -> bool:
    ga, gb = graph_of(a), graph_of(b)
    m = dict(witness.mapping)
    if set(m) != set(ga.ends) or sorted(m.values()) != sorted(gb.ends):
        return False
    if ga.total_weight != gb.total_weight:
        return False
    if witness.length_preserving:
        la, lb = _lengths(a), _lengths(b)
        if any(la[e] != lb[f] for e, f in m.items()):
            return False
    ca, cb = circuits(ga).graph_circuits, circuits(gb).graph_circuits
    return {frozenset(m[e] for e in c) for c in ca} == set(cb)


def find_two_isomorphism(a: GraphLike, b: GraphLike, length_preserving: bool = False):
    """Return a :class:`TwoIsomorphism` from ``a`` to ``b`` or ``None``.

    Exhaustive backtracking over edge bijections.  Each edge is matched only
    to edges with the same signature (sorted sizes of circuits through it,
    plus its length when ``length_preserving``); every circuit is checked as
    soon as all its edges are assigned.
    """
    ga, gb = graph_of(a), graph_of(b)
    if (len(ga.ends), ga.total_weight, ga.genus) != (len(gb.ends), gb.total_weight, gb.genus):
        return None
    va, vb = circuits(ga), circuits(gb)
    if len(va.graph_circuits) != len(vb.graph_circuits):
        return None
    la, lb = _lengths(a), _lengths(b)

    def signatures(g, view, lengths):
        sizes = defaultdict(list)
        for c in view.graph_circuits:
            for e in c:
                sizes[e].append(len(c))
        return {e: (tuple(sorted(sizes[e])), lengths[e] if length_preserving else None)
                for e in g.ends}

    sa, sb = signatures(ga, va, la), signatures(gb, vb, lb)
    if Counter(sa.values()) != Counter(sb.values()):
        return None
    order = sorted(ga.ends, key=lambda e: (repr(sa[e]), e))
    position = {e: i for i, e in enumerate(order)}
    by_sig = defaultdict(list)
    for f in gb.ends:
        by_sig[sb[f]].append(f)
    # circuits of a checked when their last edge (in search order) is placed
    due = defaultdict(list)
    for c in va.graph_circuits:
        due[max(position[e] for e in c)].append(c)
    target = vb.graph_circuits
    mapping: dict[str, str] = {}
    used: set[str] = set()

    def extend(k):
        if k == len(order):
            return True
        e = order[k]
        for f in by_sig[sa[e]]:
            if f in used:
                continue
            mapping[e] = f
            used.add(f)
            if all(frozenset(mapping[x] for x in c) in target for c in due[k]) and extend(k + 1):
                return True
            del mapping[e]
            used.discard(f)
        return False

    if not extend(0):
        return None
    return TwoIsomorphism({e: mapping[e] for e in ga.ends}, length_preserving)
