"""Named fixtures, exhaustive and random graph families, and the cross-validation record."""

from __future__ import annotations

import itertools
import random
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .errors import GraphError, HyptypeError
from .graph import (
    TropicalCurve,
    WeightedGraph,
    as_curve,
    contract_edges,
    dedupe_isomorphic,
    make_curve,
    make_graph,
    random_stable_graph,
)


# ------------------------------------------------------------- fixtures

def theta(a=1, b=1, c=1) -> TropicalCurve:
    return make_curve({"a": ("u", "v"), "b": ("u", "v"), "c": ("u", "v")},
                      {"a": a, "b": b, "c": c})


def k4() -> WeightedGraph:
    verts = "0123"
    return make_graph({a + b: (a, b) for a, b in itertools.combinations(verts, 2)})


def l3() -> WeightedGraph:
    ends = {}
    for a, b in itertools.combinations("012", 2):
        ends[a + b + "a"] = (a, b)
        ends[a + b + "b"] = (a, b)
    return make_graph(ends)


def fig1(e=1, f=3, lu=1, lv=1) -> TropicalCurve:
    """Two vertices joined by a separating pair e, f, with a loop at each vertex."""
    return make_curve({"e": ("u", "v"), "f": ("u", "v"), "lu": ("u", "u"), "lv": ("v", "v")},
                      {"e": e, "f": f, "lu": lu, "lv": lv})


def b2() -> WeightedGraph:
    """Triangle u, v, w with u-v and v-w doubled: hyperelliptic type but never hyperelliptic."""
    return make_graph({"a": ("u", "v"), "b": ("u", "v"), "c": ("v", "w"),
                       "d": ("v", "w"), "e": ("u", "w")})


def cycle(n: int, length=1) -> TropicalCurve:
    ends = {f"e{i}": (f"v{i}", f"v{(i + 1) % n}") for i in range(n)}
    return make_curve(ends, {e: length for e in ends})


def dumbbell(left=1, bar=1, right=1) -> TropicalCurve:
    return make_curve({"l": ("a", "a"), "bar": ("a", "b"), "r": ("b", "b")},
                      {"l": left, "bar": bar, "r": right})


def prism() -> WeightedGraph:
    return make_graph({"ab": ("a", "b"), "bc": ("b", "c"), "ca": ("c", "a"),
                       "xy": ("x", "y"), "yz": ("y", "z"), "zx": ("z", "x"),
                       "ax": ("a", "x"), "by": ("b", "y"), "cz": ("c", "z")})


FIXTURES = {
    "theta": theta,
    "k4": k4,
    "l3": l3,
    "fig1": fig1,
    "b2": b2,
    "cycle5": lambda: cycle(5),
    "dumbbell": dumbbell,
    "prism": prism,
}


# ------------------------------------------------------------- exhaustive families

def _matchings(items):
    if not items:
        yield []
        return
    first = items[0]
    for i in range(1, len(items)):
        rest = items[1:i] + items[i + 1:]
        for m in _matchings(rest):
            yield [(first, items[i])] + m


def trivalent_graphs(genus: int) -> list[WeightedGraph]:
    """Connected 3-regular multigraphs (loops allowed) of the given genus, up to isomorphism."""
    if genus < 2:
        raise GraphError("trivalent graphs exist for genus >= 2")
    n = 2 * genus - 2
    halves = [(v, k) for v in range(n) for k in range(3)]
    seen = set()
    found = []
    for m in _matchings(halves):
        key = tuple(sorted(tuple(sorted((a[0], b[0]))) for a, b in m))
        if key in seen:
            continue
        seen.add(key)
        ends = {f"e{i}": (f"v{a}", f"v{b}") for i, (a, b) in enumerate(key)}
        try:
            found.append(WeightedGraph({f"v{i}": 0 for i in range(n)}, ends))
        except GraphError:
            continue
    return dedupe_isomorphic(found)


def stable_graphs(genus: int, max_edges: Optional[int] = None) -> list[WeightedGraph]:
    """All stable weighted graphs of the given genus up to isomorphism.

    Every stable graph is a contraction of a trivalent one, so the family is
    the contraction closure of :func:`trivalent_graphs`.
    """
    frontier = trivalent_graphs(genus)
    out = list(frontier)
    while frontier:
        nxt = []
        for g in frontier:
            for e in g.ends:
                nxt.append(contract_edges(g, [e])[0])
        frontier = [h for h in dedupe_isomorphic(nxt)
                    if not any(_iso(h, o) for o in out)]
        out.extend(frontier)
    if max_edges is not None:
        out = [g for g in out if len(g.ends) <= max_edges]
    return out


def _iso(a, b) -> bool:
    from .graph import are_isomorphic

    return are_isomorphic(a, b)


def random_two_connected(seed, max_edges: int = 12, min_genus: int = 2) -> WeightedGraph:
    """Random loopless 2-connected multigraph grown by open ears."""
    rng = random.Random(seed)
    n0 = rng.randint(2, 4)
    verts = [f"v{i}" for i in range(n0)]
    pairs = [(verts[i], verts[(i + 1) % n0]) for i in range(n0)]
    target = rng.randint(min_genus, max(min_genus, max_edges // 2))
    genus = 1
    while genus < target:
        length = rng.choice((1, 1, 2, 2, 3))
        if len(pairs) + length > max_edges:
            length = max_edges - len(pairs)
            if length <= 0:
                break
        a, b = rng.sample(verts, 2)
        path = [a]
        for _ in range(length - 1):
            v = f"v{len(verts)}"
            verts.append(v)
            path.append(v)
        path.append(b)
        pairs.extend(zip(path, path[1:]))
        genus += 1
    return make_graph(pairs)


def random_curve(seed, genus_range=(2, 5), max_edges: int = 12, weighted: bool = True) -> TropicalCurve:
    rng = random.Random(seed)
    g = rng.randint(*genus_range)
    return random_stable_graph(rng.randrange(2**32), g, max_edges, weighted=weighted)


def with_random_lengths(obj, seed) -> TropicalCurve:
    rng = random.Random(seed)
    c = as_curve(obj)
    return c.with_lengths({e: Fraction(rng.randint(1, 9), rng.randint(1, 4)) for e in c.graph.ends})


# ------------------------------------------------------------- cross validation

@dataclass
class CrossCheck:
    """Agreement record for one curve: minor verdict, pipeline outcome, Torelli check."""

    name: str
    genus: int
    minor_verdict: bool
    pipeline_ok: bool
    torelli_ok: bool
    obstruction: Optional[str] = None
    error: Optional[str] = None

    @property
    def agree(self) -> bool:
        return self.minor_verdict == self.pipeline_ok == self.torelli_ok

    def to_json(self) -> dict:
        out = asdict(self)
        out["agree"] = self.agree
        return out


def cross_validate(obj, name: str = "", route: str = "blocks") -> CrossCheck:
    """Run the minor test and, independently, the constructive model builder."""
    from .decision import hyperelliptic_model, jacobians_isomorphic, obstruction
    from .hyperelliptic import is_hyperelliptic

    c = as_curve(obj)
    minor = obstruction(c)
    pipeline_ok = torelli_ok = False
    error = None
    try:
        m = hyperelliptic_model(c, route=route)
        pipeline_ok = is_hyperelliptic(m.model) is not None
        torelli_ok = jacobians_isomorphic(c, m.model)[0]
    except HyptypeError as exc:
        error = f"{type(exc).__name__}: {exc}"
    return CrossCheck(name, c.genus, minor is None, pipeline_ok, torelli_ok,
                      None if minor is None else minor.pattern, error)


def sweep_corpus(max_edges: int = 8, random_count: int = 500, seed: int = 0) -> Iterator[tuple[str, object]]:
    """Exhaustive genus 2 and 3 stable graphs, then random stable curves of genus <= 5."""
    for genus in (2, 3):
        for i, g in enumerate(stable_graphs(genus, max_edges)):
            yield f"stable-g{genus}-{i}", g
    rng = random.Random(seed)
    for i in range(random_count):
        yield f"random-{i}", random_curve(rng.randrange(2**32))
