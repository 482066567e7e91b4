"""Command line interface: JSON on stdout, summaries on stderr with --verbose."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import corpus
from .connectivity import c1_sets, separating_edges, three_edge_connectivization, two_edge_connectivization
from .decision import (
    gram_determinant_oracle,
    is_hyperelliptic_type,
    jacobian_gram,
    jacobians_isomorphic,
    verify_certificate,
)
from .ears import ensure_three_initial_ears, hedify, htedify, involution_from_hed, nested_ear_decomposition
from .errors import GraphError, HyptypeError, PipelineError, SizeGuardError
from .graph import blocks, d_invariant, is_stable, random_stable_graph, stable_model
from .hyperelliptic import enumerate_involutions, is_hyperelliptic, quotient
from .io import (
    certificate_to_json,
    involution_from_json,
    involution_to_json,
    load_curve,
    parse_document,
    serialize,
    witness_to_json,
)
from .minors import PATTERNS, find_minor_model, pattern_from_graph

log = logging.getLogger("hyptype")

EXIT_OK, EXIT_FALSE, EXIT_INPUT, EXIT_GUARD, EXIT_INTERNAL = 0, 1, 2, 3, 4
COMMANDS = ("analyze", "connectivize", "minor", "hyptype", "jacobian", "ears",
            "hyperelliptic", "quotient", "gen", "sweep")


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (set, frozenset)):
        return sorted(_jsonable(y) for y in x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(y) for y in x]
    return x


def _emit(obj) -> None:
    json.dump(_jsonable(obj), sys.stdout, indent=2)
    sys.stdout.write("\n")


def _default_seed() -> int:
    return int(os.environ.get("HYPTYPE_SEED", "0"))


# ------------------------------------------------------------- commands

def cmd_analyze(args) -> int:
    c = load_curve(args.file)
    g = c.graph
    out = {
        "genus": c.genus,
        "b1": g.b1,
        "total_weight": g.total_weight,
        "stable": is_stable(g),
        "d": d_invariant(g) if is_stable(g) else None,
        "blocks": [{"kind": b.kind, "vertices": b.vertices, "edges": b.edges, "genus": b.genus}
                   for b in blocks(g)],
        "separating_edges": separating_edges(g),
        "c1_sets": [sorted(s) for s in c1_sets(g).sets],
    }
    log.info("genus %d, %d vertices, %d edges", c.genus, len(g.weights), len(g.ends))
    _emit(out)
    return EXIT_OK


def cmd_connectivize(args) -> int:
    c = load_curve(args.file)
    conn = (two_edge_connectivization if args.level == 2 else three_edge_connectivization)(c)
    _emit({
        "level": args.level,
        "result": serialize(conn.result),
        "psi": dict(conn.psi),
        "trace": {"edges": dict(conn.trace.edges), "vertices": dict(conn.trace.vertices)},
    })
    return EXIT_OK


def cmd_minor(args) -> int:
    c = load_curve(args.file)
    key = args.pattern.upper()
    pattern = PATTERNS[key]() if key in PATTERNS else pattern_from_graph(args.pattern, load_curve(args.pattern))
    model = find_minor_model(c, pattern)
    log.info("pattern %s: %s", pattern.name, "found" if model else "absent")
    _emit({"pattern": pattern.name, "model": None if model is None else model.to_json()})
    return EXIT_FALSE if (args.check and model is not None) else EXIT_OK


def cmd_hyptype(args) -> int:
    c = load_curve(args.file)
    cert = is_hyperelliptic_type(c, certificate=not args.no_certificate)
    if not args.no_certificate and not verify_certificate(c, cert):
        raise PipelineError("emitted certificate failed re-verification")
    log.info("hyperelliptic type: %s", cert.verdict)
    _emit(certificate_to_json(cert))
    return EXIT_FALSE if (args.check and not cert.verdict) else EXIT_OK


def cmd_jacobian(args) -> int:
    c = load_curve(args.file)
    gram = jacobian_gram(c)
    out = {"genus": c.genus, "determinant": gram.cycle_determinant()}
    if c.graph.total_weight == 0:
        out["spanning_tree_sum"] = gram_determinant_oracle(c)
    if args.gram:
        out["gram"] = [list(r) for r in gram.matrix]
        out["cycles"] = [dict(v) for v in gram.cycles]
    if args.compare:
        other = load_curve(args.compare)
        verdict, witness = jacobians_isomorphic(c, other)
        out["isomorphic"] = verdict
        out["witness"] = None if witness is None else witness_to_json(witness)
        log.info("jacobians isomorphic: %s", verdict)
    _emit(out)
    return EXIT_OK


def cmd_ears(args) -> int:
    c = load_curve(args.file)
    s, _ = stable_model(c) if c.genus >= 2 else (c, None)
    d = nested_ear_decomposition(s.graph)
    if d is None:
        _emit({"stage": args.stage, "decomposition": None, "reason": "not series-parallel"})
        return EXIT_FALSE if args.check else EXIT_OK
    out = {"graph": serialize(s)}
    if args.stage in ("hted", "hed"):
        d = ensure_three_initial_ears(htedify(d))
    if args.stage == "hed":
        refined = hedify(s, d)
        d = refined.decomposition
        out["graph"] = serialize(refined.graph)
        out["added_edges"] = list(refined.added_edges)
        hed = involution_from_hed(d)
        out["involution"] = involution_to_json(hed.involution)
        # the refined lengths split edges; equalize paired edges so tau acts
        out["hyperelliptic_curve"] = serialize(
            hed.constrained_lengths(refined.graph, refined.graph.lengths))
        out["equal_length_pairs"] = [list(p) for p in hed.equal_length_pairs]
    out["decomposition"] = d.to_json()
    _emit(out)
    return EXIT_OK


def cmd_hyperelliptic(args) -> int:
    c = load_curve(args.file)
    s, _ = stable_model(c)
    out = {"stable_model": serialize(s)}
    if args.involutions:
        out["involutions"] = [involution_to_json(t) for t in enumerate_involutions(s)]
    tau = is_hyperelliptic(c)
    out["hyperelliptic"] = tau is not None
    out["involution"] = None if tau is None else involution_to_json(tau)
    _emit(out)
    return EXIT_FALSE if (args.check and tau is None) else EXIT_OK


def cmd_quotient(args) -> int:
    c = load_curve(args.file)
    with open(args.involution, encoding="utf-8") as fh:
        tau = involution_from_json(json.load(fh))
    q = quotient(c, tau)
    _emit({
        "quotient": serialize(q.quotient),
        "vertex_projection": dict(q.vertex_projection),
        "edge_projection": dict(q.edge_projection),
        "fixed_points": [list(p) for p in q.fixed_points],
        "is_tree": q.is_tree(),
    })
    return EXIT_OK


def cmd_gen(args) -> int:
    c = random_stable_graph(args.seed, args.genus, args.max_edges, weighted=not args.unweighted)
    _emit(serialize(c))
    return EXIT_OK


def _sweep_one(item):
    name, doc = item
    try:
        return corpus.cross_validate(parse_document(doc), name).to_json()
    except SizeGuardError as exc:
        return {"name": name, "agree": None, "error": f"SizeGuardError: {exc}"}


def cmd_sweep(args) -> int:
    if args.files:
        items = [(path, serialize(load_curve(path))) for path in args.files]
    else:
        items = [(name, serialize(g)) for name, g in
                 corpus.sweep_corpus(args.max_edges, args.random, args.seed)]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            records = list(pool.map(_sweep_one, items, chunksize=8))
    else:
        records = [_sweep_one(item) for item in items]
    agree = sum(1 for r in records if r.get("agree"))
    summary = {"total": len(records), "agree": agree,
               "hyperelliptic_type": sum(1 for r in records if r.get("minor_verdict"))}
    log.info("sweep: %d/%d agree", agree, len(records))
    _emit({"summary": summary, "records": records})
    return EXIT_OK if agree == len(records) else EXIT_FALSE


# ------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hyptype", description="Hyperelliptic type of tropical curves.")
    p.add_argument("--verbose", "-v", action="store_true", help="summaries on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="genus, stability, blocks, d, C1-sets")
    a.add_argument("file")
    a.set_defaults(func=cmd_analyze)

    a = sub.add_parser("connectivize", help="2- or 3-edge connectivization")
    a.add_argument("file")
    a.add_argument("--level", type=int, choices=(2, 3), default=3)
    a.set_defaults(func=cmd_connectivize)

    a = sub.add_parser("minor", help="K4/L3 (or file pattern) minor model")
    a.add_argument("file")
    a.add_argument("--pattern", default="k4", help="k4, l3, or a graph file")
    a.add_argument("--check", action="store_true", help="exit 1 when a model exists")
    a.set_defaults(func=cmd_minor)

    a = sub.add_parser("hyptype", help="decide hyperelliptic type with certificate")
    a.add_argument("file")
    a.add_argument("--check", action="store_true", help="exit 1 when not hyperelliptic type")
    a.add_argument("--no-certificate", action="store_true", help="skip the positive certificate")
    a.set_defaults(func=cmd_hyptype)

    a = sub.add_parser("jacobian", help="Gram matrix and Torelli comparison")
    a.add_argument("file")
    a.add_argument("--gram", action="store_true")
    a.add_argument("--compare", metavar="FILE")
    a.set_defaults(func=cmd_jacobian)

    a = sub.add_parser("ears", help="nested / HTED / HED ear decompositions")
    a.add_argument("file")
    a.add_argument("--stage", choices=("nested", "hted", "hed"), default="nested")
    a.add_argument("--check", action="store_true")
    a.set_defaults(func=cmd_ears)

    a = sub.add_parser("hyperelliptic", help="hyperelliptic involution of the stable model")
    a.add_argument("file")
    a.add_argument("--involutions", action="store_true", help="list every involution")
    a.add_argument("--check", action="store_true")
    a.set_defaults(func=cmd_hyperelliptic)

    a = sub.add_parser("quotient", help="quotient by an involution")
    a.add_argument("file")
    a.add_argument("--involution", required=True, metavar="FILE")
    a.set_defaults(func=cmd_quotient)

    a = sub.add_parser("gen", help="random stable curve")
    a.add_argument("--seed", type=int, default=None)
    a.add_argument("--genus", type=int, default=3)
    a.add_argument("--max-edges", type=int, default=12)
    a.add_argument("--unweighted", action="store_true")
    a.set_defaults(func=cmd_gen)

    a = sub.add_parser("sweep", help="cross-validate minor test, model builder, Torelli check")
    a.add_argument("files", nargs="*")
    a.add_argument("--random", type=int, default=500)
    a.add_argument("--max-edges", type=int, default=8)
    a.add_argument("--seed", type=int, default=None)
    a.add_argument("--workers", type=int, default=1)
    a.set_defaults(func=cmd_sweep)
    return p


def _configure_logging(verbose: bool):
    """Attach a stderr handler to the package logger; return an undo callback."""
    # own handler: basicConfig is a no-op when the host already configured root
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(message)s"))
    saved = (log.level, log.propagate)
    log.addHandler(handler)
    log.setLevel(logging.INFO if verbose else logging.WARNING)
    log.propagate = False

    def undo():
        log.removeHandler(handler)
        log.setLevel(saved[0])
        log.propagate = saved[1]
    return undo


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # bare file argument means the decision command
    if argv and not argv[0].startswith("-") and argv[0] not in COMMANDS:
        argv = ["hyptype"] + argv
    args = build_parser().parse_args(argv)
    if getattr(args, "seed", 0) is None:
        args.seed = _default_seed()
    restore = _configure_logging(args.verbose)
    try:
        return args.func(args)
    except SizeGuardError as exc:
        print(f"size guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except GraphError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except HyptypeError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    finally:
        restore()


if __name__ == "__main__":
    sys.exit(main())
