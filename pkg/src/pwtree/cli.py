"""Command-line front-end: generate instances, compute pathwidth, run embeddings.

Exit codes: 0 success, 1 usage/input error, 2 property violation.
Reports go to stdout (or --out); logs to stderr.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from . import graphs, harness, instances, pathwidth, pw2, pwk


class BadSpec(ValueError):
    pass


def _write_json(data, out_path):
    text = json.dumps(data, sort_keys=True, indent=2) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_graph(path):
    with open(path) as fh:
        return graphs.graph_from_json(json.load(fh))


def cmd_generate(args) -> int:
    seq = None
    if args.family == "phi":
        g = instances.phi(args.i)
    elif args.family == "psi":
        g = instances.psi(args.i, args.m)
    elif args.family == "psi-trunc":
        g = instances.psi_truncated(args.i, args.m, Fraction(args.branches))
    elif args.family == "cycle":
        g, seq = instances.cycle(args.n)
    elif args.family == "random-pw":
        rng = random.Random(args.seed)
        g, seq = instances.random_pathwidth_graph(
            args.k, args.n, instances.small_rational_lengths, rng
        )
    else:
        raise BadSpec(f"unknown generator {args.family!r}")
    _write_json(graphs.graph_to_json(g), args.out)
    if seq is not None:
        comp_path = args.composition_out or (
            (args.out or "composition") + ".composition.json"
        )
        pathwidth.dump_composition(seq, comp_path)
        print(f"composition written to {comp_path}", file=sys.stderr)
    return 0


def cmd_pathwidth(args) -> int:
    g = _load_graph(args.graph)
    if args.method == "exact":
        value = pathwidth.exact_pathwidth(g)
        _write_json({"method": "exact", "pathwidth": value}, args.out)
    elif args.method == "tree":
        value = pathwidth.tree_pathwidth(g)
        _write_json({"method": "tree", "pathwidth": value}, args.out)
    else:
        path, comps = pathwidth.peel_path(g)
        _write_json(
            {
                "method": "peel",
                "path": path,
                "components": [sorted(c.vertices) for c in comps],
                "component_pathwidths": [pathwidth.tree_pathwidth(c) for c in comps],
            },
            args.out,
        )
    return 0


def cmd_embed(args) -> int:
    g = _load_graph(args.graph)
    if args.composition:
        seq = pathwidth.load_composition(args.composition)
    else:
        # no witness supplied: only oracle-scale graphs may proceed
        try:
            pd = pathwidth.exact_path_decomposition(g)
        except pathwidth.TooLarge:
            print(
                "error: graph too large to analyze without a composition file; "
                "pass --composition",
                file=sys.stderr,
            )
            return 1
        seq = pathwidth.decomposition_to_composition(pd, g)
    if args.k is not None and args.k != seq.k:
        print(f"error: composition has width {seq.k}, not {args.k}", file=sys.stderr)
        return 1
    k = seq.k
    metric = pathwidth.composed_metric_graph(g, seq)
    tau = Fraction(args.tau) if args.tau else None

    if args.warmup:
        if k != 2:
            print("error: --warmup requires a width-2 composition", file=sys.stderr)
            return 1
        def embedder(rng):
            return pw2.embed_pathwidth2(seq, metric, rng, tau or pw2.DEFAULT_TAU)
    else:
        def embedder(rng):
            return pwk.embed_pathwidthk(seq, metric, rng, tau)

    report = harness.estimate_distortion(
        g, embedder, args.samples, args.seed, pairs=args.pairs
    )
    bound = Fraction((4 * k) ** k) ** (k * (k + 1) // 2 + 1) * (k + 1)
    payload = report.to_json()
    payload["bound"] = f"{bound.numerator}/{bound.denominator}"
    payload["bound_ok"] = (
        report.max_mean_stretch is None or report.max_mean_stretch <= bound
    )
    _write_json(payload, args.out)
    if not report.noncontraction_ok or not payload["bound_ok"]:
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pwtree",
        description="bounded-pathwidth metric graphs, random tree embeddings, "
                    "and distortion reports",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write an instance (and composition) as JSON")
    gen.add_argument("family", choices=["phi", "psi", "psi-trunc", "cycle", "random-pw"])
    gen.add_argument("--i", type=int, default=1, help="depth parameter")
    gen.add_argument("--m", type=int, default=9, help="size parameter")
    gen.add_argument("--branches", default="2", help="root branches kept (psi-trunc)")
    gen.add_argument("--n", type=int, default=8, help="vertex count (cycle, random-pw)")
    gen.add_argument("--k", type=int, default=2, help="width (random-pw)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", help="graph output path (default stdout)")
    gen.add_argument("--composition-out", help="composition output path")
    gen.set_defaults(func=cmd_generate)

    pw = sub.add_parser("pathwidth", help="compute pathwidth of a graph file")
    pw.add_argument("graph")
    pw.add_argument("--method", choices=["exact", "tree", "peel"], default="exact")
    pw.add_argument("--out")
    pw.set_defaults(func=cmd_pathwidth)

    emb = sub.add_parser("embed", help="sample random tree embeddings and report stretch")
    emb.add_argument("graph")
    emb.add_argument("--composition", help="composition JSON witnessing the width")
    emb.add_argument("--k", type=int, help="expected width (checked against the file)")
    emb.add_argument("--seed", type=int, default=0)
    emb.add_argument("--samples", type=int, default=1000)
    emb.add_argument("--tau", help="inflation factor override (rational)")
    emb.add_argument("--pairs", choices=["all", "edges"], default="all")
    emb.add_argument("--warmup", action="store_true",
                     help="use the width-2 spanning-tree construction")
    emb.add_argument("--out")
    emb.set_defaults(func=cmd_embed)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
