"""Command-line surface.

Subcommands: group, stabilize, identity, recurrents, add, representative,
check-hom, product, hypercube, snf.  Exit codes: 0 success, 1 input or
validation error, 2 verification FAIL.  Output is deterministic JSON by
default (sorted keys, big integers as decimal strings); --output text gives a
human-readable fallback, and SANDPILES_OUTPUT sets the default.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import cubes
from .dynamics import DEFAULT_ORBIT_GUARD, RecurrentConfig, sandpile_group, stabilize
from .errors import ClauseViolation, FormatError, NotSurjective, SandpileError
from .graphs import SinkedGraph
from .intlinalg import smith_normal_form
from .jsonio import (
    config_to_list,
    dumps,
    load_config,
    load_graph,
    load_hom,
    load_matrix,
    matrix_to_dict,
)
from .morphisms import verify_group_injection
from .products import BoxContext, box_config

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FAIL = 2


def _emit(payload: dict, fmt: str) -> None:
    if fmt == "json":
        print(dumps(payload))
        return
    for key in sorted(payload):
        print(f"{key}: {payload[key]}")


def _sinked(graph, sink_flag: str | None) -> SinkedGraph:
    if sink_flag is not None:
        base = graph.graph if isinstance(graph, SinkedGraph) else graph
        return SinkedGraph(base, sink_flag)
    if isinstance(graph, SinkedGraph):
        return graph
    raise FormatError("graph file has no sink; pass --sink LABEL")


def cmd_group(args, fmt: str) -> int:
    graph = _sinked(load_graph(args.graph), args.sink)
    structure = sandpile_group(graph).structure
    _emit(structure.to_dict(), fmt)
    return EXIT_OK


def cmd_stabilize(args, fmt: str) -> int:
    graph = _sinked(load_graph(args.graph), args.sink)
    values = load_config(args.config)
    if min(values, default=0) < 0 and not args.allow_negative:
        raise FormatError("negative entries need --allow-negative")
    stable, firings = stabilize(graph, values)
    _emit({"stable": config_to_list(stable), "firings": config_to_list(firings)}, fmt)
    return EXIT_OK


def cmd_identity(args, fmt: str) -> int:
    graph = _sinked(load_graph(args.graph), args.sink)
    rc = sandpile_group(graph, args.max_orbit).identity
    _emit({"identity": config_to_list(rc.values), "certificate": rc.certificate}, fmt)
    return EXIT_OK


def cmd_recurrents(args, fmt: str) -> int:
    graph = _sinked(load_graph(args.graph), args.sink)
    group = sandpile_group(graph, args.max_orbit)
    recs = sorted(group.recurrents())
    _emit(
        {"count": len(recs), "recurrents": [config_to_list(c) for c in recs]},
        fmt,
    )
    return EXIT_OK


def cmd_add(args, fmt: str) -> int:
    graph = _sinked(load_graph(args.graph), args.sink)
    group = sandpile_group(graph, args.max_orbit)
    c1, c2 = load_config(args.config1), load_config(args.config2)
    for c in (c1, c2):
        if not group.is_recurrent(c):
            raise FormatError(f"{list(c)} is not a recurrent configuration")
    result = group.add(
        RecurrentConfig(graph, c1, "input"), RecurrentConfig(graph, c2, "input")
    )
    _emit({"sum": config_to_list(result.values)}, fmt)
    return EXIT_OK


def cmd_representative(args, fmt: str) -> int:
    graph = _sinked(load_graph(args.graph), args.sink)
    rc = sandpile_group(graph, args.max_orbit).representative(load_config(args.config))
    _emit(
        {"representative": config_to_list(rc.values), "certificate": rc.certificate},
        fmt,
    )
    return EXIT_OK


def cmd_check_hom(args, fmt: str) -> int:
    source = load_graph(args.source)
    target = load_graph(args.target)
    try:
        hom = load_hom(args.hom, source, target)
    except (ClauseViolation, NotSurjective) as exc:
        payload = {"valid": False, "error": type(exc).__name__, "detail": str(exc)}
        if isinstance(exc, ClauseViolation):
            payload["clause"] = exc.clause
            payload["witness"] = list(exc.witness)
        _emit(payload, fmt)
        return EXIT_FAIL
    payload = {
        "valid": True,
        "kind": hom.kind,
        "degree": hom.degree,
        "surjective": hom.surjective,
    }
    code = EXIT_OK
    if args.verify_injection:
        report = verify_group_injection(hom)
        payload["injection"] = report.to_dict()
        if not report.passed:
            code = EXIT_FAIL
    _emit(payload, fmt)
    return code


def cmd_product(args, fmt: str) -> int:
    g = load_graph(args.graph_g)
    h = load_graph(args.graph_h)
    for name, graph in (("first", g), ("second", h)):
        if isinstance(graph, SinkedGraph) or not hasattr(graph, "edges"):
            raise FormatError(f"{name} graph must be an undirected multigraph without a sink")
    ctx = BoxContext(g, h, args.n)
    a = load_config(args.config_a)
    b = load_config(args.config_b)
    vec = box_config(ctx, a, b)
    payload = {"box": config_to_list(vec), "vertices": list(ctx.product.vertices)}
    if args.certify:
        group = sandpile_group(ctx.cone_product)
        recurrent = group.is_recurrent(vec) if not ctx.cone_product.directed else None
        payload["recurrent"] = recurrent
    _emit(payload, fmt)
    return EXIT_OK


def cmd_hypercube(args, fmt: str) -> int:
    reports = []
    mode = args.verify
    if mode in ("structure", "all"):
        reports.append(cubes.verify_structure(args.d, args.k, max_d=args.max_d))
    if mode in ("decomposition", "all"):
        reports.append(cubes.verify_decomposition(args.d, max_d=args.max_d))
    if mode in ("even-counterexample", "all"):
        reports.append(cubes.verify_even_cone_counterexample())
    if mode in ("if-count", "all"):
        reports.append(cubes.verify_invariant_factor_count(args.d))
    payload = {"reports": [r.to_dict() for r in reports]}
    passed = all(r.passed for r in reports)
    payload["passed"] = passed
    _emit(payload, fmt)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_snf(args, fmt: str) -> int:
    a = load_matrix(args.matrix)
    dec = smith_normal_form(a)
    payload = {"diagonal": [int(x) for x in dec.diagonal()]}
    if args.transforms:
        payload["u"] = matrix_to_dict(dec.u)
        payload["d"] = matrix_to_dict(dec.d)
        payload["v"] = matrix_to_dict(dec.v)
    _emit(payload, fmt)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sandpiles",
        description="Sandpile groups of multigraphs and digraphs: exact group "
        "structure, chip-firing dynamics, homomorphism checking, and cube-cone "
        "verification reports.",
    )
    parser.add_argument(
        "--output",
        choices=("json", "text"),
        default=os.environ.get("SANDPILES_OUTPUT", "json"),
        help="output format (env SANDPILES_OUTPUT sets the default)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, orbit=True):
        p.add_argument("--sink", default=None, help="override/declare the sink label")
        if orbit:
            p.add_argument("--max-orbit", type=int, default=DEFAULT_ORBIT_GUARD,
                           help="guard on enumerated recurrent sets")

    p = sub.add_parser("group", help="invariant factors, elementary divisors, order")
    p.add_argument("graph")
    common(p, orbit=False)
    p.set_defaults(fn=cmd_group)

    p = sub.add_parser("stabilize", help="topple a configuration to its stabilization")
    p.add_argument("graph")
    p.add_argument("config")
    p.add_argument("--allow-negative", action="store_true",
                   help="accept chip vectors with negative entries")
    common(p, orbit=False)
    p.set_defaults(fn=cmd_stabilize)

    p = sub.add_parser("identity", help="the group identity configuration")
    p.add_argument("graph")
    common(p)
    p.set_defaults(fn=cmd_identity)

    p = sub.add_parser("recurrents", help="enumerate the recurrent set")
    p.add_argument("graph")
    common(p)
    p.set_defaults(fn=cmd_recurrents)

    p = sub.add_parser("add", help="group law: stabilized sum of two recurrents")
    p.add_argument("graph")
    p.add_argument("config1")
    p.add_argument("config2")
    common(p)
    p.set_defaults(fn=cmd_add)

    p = sub.add_parser("representative",
                       help="the recurrent representative of a chip vector's class")
    p.add_argument("graph")
    p.add_argument("config")
    common(p)
    p.set_defaults(fn=cmd_representative)

    p = sub.add_parser("check-hom", help="validate a homomorphism file")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("hom")
    p.add_argument("--verify-injection", action="store_true",
                   help="also verify the induced group injection")
    p.set_defaults(fn=cmd_check_hom)

    p = sub.add_parser("product", help="box product of two cone configurations")
    p.add_argument("graph_g")
    p.add_argument("graph_h")
    p.add_argument("config_a")
    p.add_argument("config_b")
    p.add_argument("--n", type=int, default=1, help="cone multiplicity")
    p.add_argument("--certify", action="store_true",
                   help="attach a recurrence verdict for the box configuration")
    p.set_defaults(fn=cmd_product)

    p = sub.add_parser("hypercube", help="cube-cone verification reports")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--max-d", type=int, default=6, help="guard on the cube dimension")
    p.add_argument("--verify", required=True,
                   choices=("structure", "decomposition", "even-counterexample",
                            "if-count", "all"))
    p.set_defaults(fn=cmd_hypercube)

    p = sub.add_parser("snf", help="Smith normal form of an integer matrix file")
    p.add_argument("matrix")
    p.add_argument("--transforms", action="store_true",
                   help="include the unimodular transforms")
    p.set_defaults(fn=cmd_snf)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args, args.output)
    except (SandpileError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
