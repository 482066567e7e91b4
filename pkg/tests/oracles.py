"""Brute-force reference implementations used to derive expected values in tests.

Nothing here imports the algorithms under test; only the plain data types.
"""

from __future__ import annotations

import itertools
from collections import Counter
from fractions import Fraction

import networkx as nx

from hyptype.graph import as_curve, graph_of


def nx_multigraph(obj, edges=None):
    g = graph_of(obj)
    h = nx.MultiGraph()
    h.add_nodes_from(g.weights)
    for e, (a, b) in g.ends.items():
        if edges is None or e in edges:
            h.add_edge(a, b, key=e)
    return h


def connected_without(obj, removed) -> bool:
    g = graph_of(obj)
    keep = [e for e in g.ends if e not in set(removed)]
    return nx.is_connected(nx_multigraph(g, keep))


def brute_bridges(obj) -> set:
    g = graph_of(obj)
    return {e for e in g.ends if not connected_without(g, [e])}


def brute_c1_sets(obj) -> set:
    """Group nonseparating edges by pairwise deletion; returns a set of frozensets."""
    g = graph_of(obj)
    ns = [e for e in g.ends if e not in brute_bridges(g)]
    groups = {e: {e} for e in ns}
    for a, b in itertools.combinations(ns, 2):
        if not connected_without(g, [a, b]):
            groups[a].add(b)
            groups[b].add(a)
    return {frozenset(s) for s in groups.values()}


def is_circuit(obj, edges) -> bool:
    """Edge set forms a single cycle: connected and every touched vertex has degree 2."""
    g = graph_of(obj)
    edges = list(edges)
    if not edges:
        return False
    deg = Counter()
    for e in edges:
        a, b = g.ends[e]
        deg[a] += 1
        deg[b] += 1
    if any(d != 2 for d in deg.values()):
        return False
    h = nx_multigraph(g, edges).subgraph(deg)
    return nx.is_connected(h)


def brute_circuits(obj) -> set:
    g = graph_of(obj)
    ids = list(g.ends)
    out = set()
    for r in range(1, len(ids) + 1):
        for sub in itertools.combinations(ids, r):
            if is_circuit(g, sub):
                out.add(frozenset(sub))
    return out


def brute_two_isomorphic(a, b, length_preserving=False) -> bool:
    ca, cb = as_curve(a), as_curve(b)
    ga, gb = ca.graph, cb.graph
    if len(ga.ends) != len(gb.ends) or ga.total_weight != gb.total_weight:
        return False
    circ_a, circ_b = brute_circuits(ga), brute_circuits(gb)
    ea, eb = list(ga.ends), list(gb.ends)
    for perm in itertools.permutations(eb):
        m = dict(zip(ea, perm))
        if length_preserving and any(ca.lengths[e] != cb.lengths[m[e]] for e in ea):
            continue
        if {frozenset(m[e] for e in c) for c in circ_a} == circ_b:
            return True
    return False


def brute_minor(host, pattern_pairs: dict) -> bool:
    """Exhaustive branch-set labelling.

    ``pattern_pairs`` maps pattern vertex pairs (i, j) to the number of
    parallel pattern edges between them; pattern vertices are 0..k-1.
    """
    g = graph_of(host)
    verts = list(g.weights)
    k = 1 + max(max(p) for p in pattern_pairs)
    for labels in itertools.product(range(-1, k), repeat=len(verts)):
        lab = dict(zip(verts, labels))
        if set(labels) - {-1} != set(range(k)):
            continue
        ok = True
        for i in range(k):
            part = [v for v in verts if lab[v] == i]
            inner = [e for e, (a, b) in g.ends.items() if lab[a] == i and lab[b] == i]
            h = nx_multigraph(g, inner).subgraph(part)
            if not nx.is_connected(h):
                ok = False
                break
        if not ok:
            continue
        count = Counter()
        for a, b in g.ends.values():
            x, y = lab[a], lab[b]
            if x >= 0 and y >= 0 and x != y:
                count[frozenset((x, y))] += 1
        if all(count[frozenset(p)] >= m for p, m in pattern_pairs.items()):
            return True
    return False


K4_PAIRS = {p: 1 for p in itertools.combinations(range(4), 2)}
L3_PAIRS = {p: 2 for p in itertools.combinations(range(3), 2)}


def brute_involution_count(obj) -> int:
    """Count weight/length preserving half-edge involutions by permuting half-edges."""
    c = as_curve(obj)
    g = c.graph
    halves = [(e, s) for e in g.ends for s in (0, 1)]
    anchor = {(e, s): g.ends[e][s] for e, s in halves}
    count = 0
    for perm in itertools.permutations(halves):
        m = dict(zip(halves, perm))
        if any(m[m[h]] != h for h in halves):
            continue
        # edges go to edges
        if any(m[(e, 1)][0] != m[(e, 0)][0] or m[(e, 1)][1] == m[(e, 0)][1] for e in g.ends):
            continue
        if any(c.lengths[m[(e, 0)][0]] != c.lengths[e] for e in g.ends):
            continue
        vmap = {}
        good = True
        for h in halves:
            v, w = anchor[h], anchor[m[h]]
            if vmap.setdefault(v, w) != w:
                good = False
                break
        if not good:
            continue
        for v in g.weights:
            vmap.setdefault(v, v)
        if any(g.weights[v] != g.weights[vmap[v]] for v in g.weights):
            continue
        if len(set(vmap.values())) != len(vmap):
            continue
        count += 1
    return count


def matrix_det(rows) -> Fraction:
    """Leibniz expansion; fine for the tiny matrices used in tests."""
    n = len(rows)
    total = Fraction(0)
    for perm in itertools.permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        prod = Fraction(1)
        for i in range(n):
            prod *= rows[i][perm[i]]
        total += sign * prod
    return total
