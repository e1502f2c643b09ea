"""Command-line entry point: generate, detect, verify, sweep, histogram.

Every run writes a JSON manifest next to its outputs with the full flag
set, rng seed, and artifact version, so outputs can be reproduced exactly.
All randomness flows from --rng-seed.

Exit codes: 0 success, 1 input parse error, 2 reachability failure,
3 solver non-convergence, 4 infeasible generation parameters,
5 verify-gap violation, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, bench, lfr, walker
from .detect import detect_multi, write_affinity_csv, write_crisp_csv
from .errors import ConvergenceError, GenerationError, ParseError, ReachabilityError
from .graph import load_edge_list, write_edge_list
from .lfr import LfrParams
from .markov import build_chain
from .seeds import load_seed_file

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_REACHABILITY = 2
EXIT_NO_CONVERGENCE = 3
EXIT_INFEASIBLE = 4
EXIT_GAP = 5
EXIT_USAGE = 64


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _write_manifest(path: Path, subcommand: str, args: argparse.Namespace, extra: dict | None = None) -> None:
    flags = {k: v for k, v in vars(args).items() if k != "func"}
    manifest = {
        "subcommand": subcommand,
        "flags": flags,
        "rng_seed": flags.get("rng_seed"),
        "artifact_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    if extra:
        manifest.update(extra)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def cmd_detect(args) -> int:
    try:
        g = load_edge_list(args.edges)
        seeds = load_seed_file(args.seeds, g)
    except (ParseError, OSError) as exc:
        return _fail(EXIT_PARSE, str(exc))
    try:
        aff = detect_multi(g, seeds, solver_mode=args.solver, tol=args.tol)
    except ReachabilityError as exc:
        labels = ", ".join(g.labels[v] for v in exc.unreachable[:20])
        return _fail(EXIT_REACHABILITY, f"nodes unreachable from the seed set: {labels}")
    except ConvergenceError as exc:
        return _fail(EXIT_NO_CONVERGENCE, str(exc))
    except ValueError as exc:
        return _fail(EXIT_USAGE, str(exc))

    prefix = str(args.out)
    affinity_path = Path(prefix + ".affinity.csv")
    crisp_path = Path(prefix + ".crisp.csv")
    with open(affinity_path, "w", encoding="utf-8") as fh:
        write_affinity_csv(aff, g, fh)
    with open(crisp_path, "w", encoding="utf-8") as fh:
        write_crisp_csv(aff, g, fh)
    extra = {"inputs": [str(args.edges), str(args.seeds)], "outputs": [str(affinity_path), str(crisp_path)]}
    if aff.reports is not None:
        extra["solver_iterations"] = [r.iterations for r in aff.reports]
        extra["solver_residuals"] = [r.relative_residual for r in aff.reports]
    _write_manifest(Path(prefix + ".manifest.json"), "detect", args, extra)
    if args.verbose:
        print(f"{g.n} nodes, {g.m} edges, {len(seeds)} seeds, {seeds.l} communities")
        if aff.reports is not None:
            for i, r in enumerate(aff.reports):
                print(f"community {i}: {r.iterations} iterations, residual {r.relative_residual:.3e}")
    return EXIT_OK


def cmd_generate(args) -> int:
    params = LfrParams(
        n=args.n,
        avg_k=args.avg_k,
        gamma=args.gamma,
        beta_exp=args.beta_exp,
        mu=args.mu,
        k_min=args.k_min,
        k_max=args.k_max,
        s_min=args.s_min,
        s_max=args.s_max,
        rng_seed=args.rng_seed,
    )
    try:
        pg = lfr.generate(params)
    except GenerationError as exc:
        return _fail(EXIT_INFEASIBLE, str(exc))
    prefix = str(args.out)
    edges_path = Path(prefix + ".edges")
    truth_path = Path(prefix + ".truth")
    with open(edges_path, "w", encoding="utf-8") as fh:
        write_edge_list(pg.graph, fh)
    with open(truth_path, "w", encoding="utf-8") as fh:
        lfr.write_truth(pg, fh)
    k_min, k_max, s_min, s_max = params.resolved_bounds()
    _write_manifest(
        Path(prefix + ".manifest.json"),
        "generate",
        args,
        {
            "outputs": [str(edges_path), str(truth_path)],
            "resolved_bounds": {"k_min": k_min, "k_max": k_max, "s_min": s_min, "s_max": s_max},
            "realized": {
                "n": pg.graph.n,
                "m": pg.graph.m,
                "communities": pg.n_communities,
                "mean_degree": 2 * pg.graph.m / pg.graph.n,
                "mixing": lfr.mixing_fraction(pg),
            },
        },
    )
    print(
        f"generated {pg.graph.n} nodes, {pg.graph.m} edges, {pg.n_communities} communities "
        f"(realized mixing {lfr.mixing_fraction(pg):.3f})"
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.walks < 1:
        return _fail(EXIT_USAGE, "--walks must be >= 1")
    try:
        g = load_edge_list(args.edges)
        seeds = load_seed_file(args.seeds, g)
    except (ParseError, OSError) as exc:
        return _fail(EXIT_PARSE, str(exc))
    try:
        node = g.id_of(args.node)
    except KeyError:
        return _fail(EXIT_USAGE, f"node {args.node!r} not in graph")
    if node in seeds:
        return _fail(EXIT_USAGE, f"node {args.node!r} is a seed; pick a non-seed node")
    try:
        chain = build_chain(g, seeds.ids)
        aff = detect_multi(g, seeds, solver_mode=args.solver, tol=args.tol)
    except ReachabilityError as exc:
        labels = ", ".join(g.labels[v] for v in exc.unreachable[:20])
        return _fail(EXIT_REACHABILITY, f"nodes unreachable from the seed set: {labels}")
    except ConvergenceError as exc:
        return _fail(EXIT_NO_CONVERGENCE, str(exc))
    except ValueError as exc:
        return _fail(EXIT_USAGE, str(exc))

    stats = walker.run_walks(chain, node, args.walks, args.rng_seed, step_cap=args.step_cap)
    solved = aff.row_for(node)
    threshold = 4.0 * math.sqrt(0.25 / args.walks) + 1e-6
    worst = 0.0
    print(f"node {args.node}: solver vs {args.walks} walks (threshold {threshold:.6f})")
    for i in range(seeds.l):
        est = walker.estimate_affinity(stats, seeds, i)
        gap = abs(solved[i] - est)
        worst = max(worst, gap)
        print(f"community {i}: solver {solved[i]:.6f}  walker {est:.6f}  gap {gap:.6f}")
    if worst > threshold:
        return _fail(EXIT_GAP, f"worst gap {worst:.6f} exceeds threshold {threshold:.6f}")
    return EXIT_OK


def _parse_float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip() != ""]


def cmd_sweep(args) -> int:
    if args.trials < 1:
        return _fail(EXIT_USAGE, "--trials must be >= 1")
    try:
        mus = _parse_float_list(args.mu)
        sigmas = _parse_float_list(args.sigma)
    except ValueError:
        return _fail(EXIT_USAGE, "--mu and --sigma take comma-separated numbers")
    if not mus or not sigmas:
        return _fail(EXIT_USAGE, "--mu and --sigma must be nonempty")
    if any(not 0 < s <= 1 for s in sigmas):
        return _fail(EXIT_USAGE, "every sigma must lie in (0, 1]")
    cells = []
    for mu in mus:
        params = LfrParams(
            n=args.n,
            avg_k=args.avg_k,
            gamma=args.gamma,
            beta_exp=args.beta_exp,
            mu=mu,
            k_min=args.k_min,
            k_max=args.k_max,
            s_min=args.s_min,
            s_max=args.s_max,
            rng_seed=args.rng_seed,
        )
        try:
            params.validate()
        except GenerationError as exc:
            return _fail(EXIT_INFEASIBLE, str(exc))
        for sigma in sigmas:
            cells.append((params, sigma))

    results, summaries = bench.run_sweep(
        cells, args.trials, args.rng_seed, jobs=args.jobs, solver_mode=args.solver
    )
    out = Path(args.out)
    with open(out, "w", encoding="utf-8") as fh:
        bench.write_results_csv(summaries, fh)
    _write_manifest(
        out.with_suffix(".manifest.json"),
        "sweep",
        args,
        {
            "outputs": [str(out)],
            "cells": [
                {
                    "mu": s.params.mu,
                    "sigma": s.sigma,
                    "trials": s.trials,
                    "failures": s.failures,
                    "seconds_mean": s.seconds_mean,
                }
                for s in summaries
            ],
        },
    )
    failed = sum(s.failures for s in summaries)
    if failed:
        print(f"warning: {failed} trial(s) failed; cells marked incomplete", file=sys.stderr)
    for s in summaries:
        print(f"mu={s.params.mu:g} sigma={s.sigma:g}: Q = {s.q_mean:.3f} +- {s.q_std:.3f} ({s.trials} trials)")
    return EXIT_OK


def cmd_histogram(args) -> int:
    if args.runs < 1:
        return _fail(EXIT_USAGE, "--runs must be >= 1")
    if args.bins < 1:
        return _fail(EXIT_USAGE, "--bins must be >= 1")
    if not 0 < args.sigma <= 1:
        return _fail(EXIT_USAGE, "--sigma must lie in (0, 1]")
    try:
        pg = lfr.load_planted(args.edges, args.truth)
    except (ParseError, OSError) as exc:
        return _fail(EXIT_PARSE, str(exc))
    qualities = bench.seed_resample_qualities(
        pg, args.sigma, args.runs, args.rng_seed, jobs=args.jobs, solver_mode=args.solver
    )
    bins = bench.histogram(qualities, args.bins)
    out = Path(args.out)
    with open(out, "w", encoding="utf-8") as fh:
        bench.write_histogram_csv(bins, fh)
    _write_manifest(
        out.with_suffix(".manifest.json"),
        "histogram",
        args,
        {"outputs": [str(out)], "q_mean": float(sum(qualities) / len(qualities))},
    )
    print(f"{args.runs} runs: mean Q {sum(qualities) / len(qualities):.3f}")
    return EXIT_OK


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--solver", choices=("auto", "direct", "iterative"), default="auto",
                   help="linear solver: dense factorization, preconditioned CG, or size-based choice")
    p.add_argument("--tol", type=float, default=1e-8, help="iterative relative-residual tolerance")


def _add_lfr_flags(p: argparse.ArgumentParser, mu_list: bool) -> None:
    p.add_argument("--n", type=int, required=True, help="number of nodes (N)")
    p.add_argument("--avg-k", type=float, required=True, help="target average degree")
    p.add_argument("--gamma", type=float, default=2.0, help="degree power-law exponent")
    p.add_argument("--beta-exp", type=float, default=2.0, help="community-size power-law exponent")
    if mu_list:
        p.add_argument("--mu", required=True, help="mixing parameter(s), comma separated")
    else:
        p.add_argument("--mu", type=float, required=True, help="mixing parameter in [0, 1]")
    p.add_argument("--k-min", type=int, default=None, help="min degree (default: calibrated)")
    p.add_argument("--k-max", type=int, default=None, help="max degree (default: min(3*avg_k, n/10))")
    p.add_argument("--s-min", type=int, default=None, help="min community size (default 10)")
    p.add_argument("--s-max", type=int, default=None, help="max community size (default n/5)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seedwalk",
        description="Seed-driven fuzzy community detection via absorbed random walks.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("detect", help="compute affinity vectors for all non-seed nodes")
    p.add_argument("edges", help="edge list: two whitespace-separated labels per line, '#' comments")
    p.add_argument("seeds", help="seed file: `node community affinity` per line")
    p.add_argument("--out", required=True, help="output prefix (writes .affinity.csv, .crisp.csv)")
    _add_solver_flags(p)
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("generate", help="generate an LFR-style benchmark graph")
    _add_lfr_flags(p, mu_list=False)
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output prefix (writes .edges, .truth)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", help="cross-check solver affinities against Monte Carlo walks")
    p.add_argument("edges")
    p.add_argument("seeds")
    p.add_argument("--node", required=True, help="non-seed node label to verify")
    p.add_argument("--walks", type=int, default=100_000)
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--step-cap", type=int, default=walker.DEFAULT_STEP_CAP)
    _add_solver_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="quality-vs-parameters grid of benchmark trials")
    _add_lfr_flags(p, mu_list=True)
    p.add_argument("--sigma", required=True, help="seed fraction(s), comma separated")
    p.add_argument("--trials", type=int, default=100, help="runs per grid cell")
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="parallel trial workers")
    p.add_argument("--out", required=True, help="results CSV path")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("histogram", help="Q distribution over seed re-samples on one graph")
    p.add_argument("edges")
    p.add_argument("truth", help="ground-truth file: `node community` per line")
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--runs", type=int, default=1000)
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--out", required=True, help="histogram CSV path")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_histogram)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
