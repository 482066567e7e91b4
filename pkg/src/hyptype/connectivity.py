"""Separating edges, C1-sets, move (C'), and 2-/3-edge connectivizations."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import GraphError
from .graph import (
    EdgeTrace,
    GraphLike,
    TropicalCurve,
    _is_connected,
    bridges,
    contract_edges,
    graph_of,
)
from .matroid import TwoIsomorphism, find_two_isomorphism


def separating_edges(obj: GraphLike) -> frozenset[str]:
    return frozenset(bridges(obj))


@dataclass(frozen=True)
class C1Partition:
    sets: tuple[frozenset, ...]

    def set_of(self, e: str) -> frozenset:
        for s in self.sets:
            if e in s:
                return s
        raise KeyError(e)

    @property
    def lookup(self) -> dict[str, frozenset]:
        return {e: s for s in self.sets for e in s}


def c1_sets(obj: GraphLike) -> C1Partition:
    """Group nonseparating edges that form separating pairs (pairwise deletion test)."""
    g = graph_of(obj)
    seps = separating_edges(g)
    ns = [e for e in g.ends if e not in seps]
    parent = {e: e for e in ns}

    def find(e):
        while parent[e] != e:
            e = parent[e]
        return e

    for i, e in enumerate(ns):
        if g.is_loop(e):
            continue
        for f in ns[i + 1:]:
            if g.is_loop(f) or find(e) == find(f):
                continue
            rest = {x: p for x, p in g.ends.items() if x != e and x != f}
            if not _is_connected(g.weights, rest):
                parent[find(f)] = find(e)
    groups: dict[str, list[str]] = {}
    for e in ns:
        groups.setdefault(find(e), []).append(e)
    return C1Partition(tuple(frozenset(v) for v in groups.values()))


def apply_move_c_prime(obj: GraphLike, s_prime: Iterable[str], e0: str):
    """Contract ``s_prime`` minus ``e0`` and give ``e0`` the summed length."""
    g = graph_of(obj)
    s_prime = set(s_prime)
    if e0 not in s_prime:
        raise GraphError("e0 must belong to S'")
    lookup = c1_sets(g).lookup
    if not s_prime <= set(lookup) or len({lookup[e] for e in s_prime}) != 1:
        raise GraphError("S' must lie inside a single C1-set")
    result, trace = contract_edges(obj, s_prime - {e0})
    if isinstance(obj, TropicalCurve):
        lengths = dict(result.lengths)
        lengths[e0] = sum((obj.lengths[e] for e in s_prime), Fraction(0))
        result = result.with_lengths(lengths)
    return result, trace


@dataclass(frozen=True)
class Connectivization:
    """Result of a 2- or 3-edge connectivization with provenance."""

    source: GraphLike
    result: GraphLike
    trace: EdgeTrace
    psi: Mapping[str, str]
    level: int


def two_edge_connectivization(obj: GraphLike) -> Connectivization:
    seps = bridges(obj)
    result, trace = contract_edges(obj, seps)
    psi = {e: e for e in graph_of(obj).ends if e not in set(seps)}
    return Connectivization(obj, result, trace, psi, 2)


def three_edge_connectivization(obj: GraphLike) -> Connectivization:
    """Contract bridges, then collapse each C1-set onto its first edge.

    The surviving edge of a C1-set is the earliest in edge order and carries
    the total length of the set.
    """
    two = two_edge_connectivization(obj)
    g2 = graph_of(two.result)
    order = {e: i for i, e in enumerate(g2.ends)}
    reps = {}
    drop = []
    for s in c1_sets(g2).sets:
        rep = min(s, key=order.__getitem__)
        for e in s:
            reps[e] = rep
            if e != rep:
                drop.append(e)
    result, trace = contract_edges(two.result, drop)
    if isinstance(two.result, TropicalCurve):
        lengths = {e: Fraction(0) for e in graph_of(result).ends}
        for e, rep in reps.items():
            lengths[rep] += two.result.lengths[e]
        result = result.with_lengths(lengths)
    return Connectivization(obj, result, two.trace.then(trace), reps, 3)


def three(obj: GraphLike) -> GraphLike:
    """Shorthand for the 3-edge connectivization's result."""
    return three_edge_connectivization(obj).result


def induced_c1_bijection(witness: TwoIsomorphism, conn: Connectivization,
                         conn_prime: Connectivization) -> dict[frozenset, frozenset]:
    """Map C1-sets of the primed source to C1-sets of the unprimed one.

    ``witness`` maps edges of ``conn.result`` to edges of ``conn_prime.result``.
    """
    if conn.level != 3 or conn_prime.level != 3:
        raise GraphError("induced bijection needs 3-edge connectivizations")
    back = witness.inverse().mapping
    if set(back) != set(graph_of(conn_prime.result).ends):
        raise GraphError("witness does not cover the 3-edge connectivization")
    sets_by_rep: dict[str, set] = {}
    for f, rep in conn.psi.items():
        sets_by_rep.setdefault(rep, set()).add(f)
    sets_by_rep_p: dict[str, set] = {}
    for f, rep in conn_prime.psi.items():
        sets_by_rep_p.setdefault(rep, set()).add(f)
    return {frozenset(s): frozenset(sets_by_rep[back[rep]]) for rep, s in sets_by_rep_p.items()}


def c1_equivalent(a: GraphLike, b: GraphLike):
    """Decide C1-equivalence through equality of 2-isomorphism classes of 3-edge connectivizations.

    Returns ``(verdict, witness)`` where the witness maps edges of a's 3-edge
    connectivization to b's.  For graphs (no lengths) the test is unweighted.
    """
    if graph_of(a).genus != graph_of(b).genus:
        return False, None
    lp = isinstance(a, TropicalCurve) and isinstance(b, TropicalCurve)
    w = find_two_isomorphism(three(a), three(b), length_preserving=lp)
    return w is not None, w


def transport_lengths(g_prime: GraphLike, trace_to_g: EdgeTrace,
                      curve: TropicalCurve) -> TropicalCurve:
    """Lengths on a graph that contracts onto ``curve`` so that the two are C1-equivalent.

    Each C1-set S' of ``g_prime`` receives the total length of the C1-set of
    ``curve`` hit by its surviving edges, shared equally among the edges of
    S'.  Separating edges keep their lengths.  Raises :class:`GraphError` if the C1 structures do not
    correspond.
    """
    gp = graph_of(g_prime)
    target = c1_sets(curve).lookup
    lengths: dict[str, Fraction] = {}
    covered = set()
    for s in c1_sets(gp).sets:
        images = {trace_to_g.edge_image(e) for e in s} - {None}
        if not images:
            raise GraphError(f"C1-set {sorted(s)} is entirely contracted")
        hit = {target.get(x) for x in images}
        if None in hit or len(hit) != 1:
            raise GraphError(f"C1-set {sorted(s)} does not map into a single C1-set")
        (t,) = hit
        if t in covered:
            raise GraphError(f"C1-set {sorted(t)} is hit twice")
        covered.add(t)
        share = curve.total_length(t) / len(s)
        for e in s:
            lengths[e] = share
    if covered != set(target.values()):
        raise GraphError("some C1-sets of the target curve are not hit")
    for e in separating_edges(gp):
        image = trace_to_g.edge_image(e)
        if image is None:
            raise GraphError(f"separating edge {e} is contracted by the trace")
        lengths[e] = curve.lengths[image]
    return TropicalCurve(gp, lengths)
