"""Command-line entry point: run experiments, sweep bounds, serve the UI."""

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import io as pwll_io
from .config import load_run_spec, load_sweep_spec
from .continuum import (OPPOSITE, SAME, IntervalProblem, check_general_1d_bounds,
                        solve_bvp)
from .datasets import gen_blobs, gen_box, gen_embedding_mixture, relabel_mod_k
from .errors import ConfigError, PwllError
from .graphs import build_knn_graph
from .loop import ground_truth_oracle, run_experiment
from .service import serve

SWEEP_HEADER = ("mode,rho,R_s,beta,tau,delta,feasible,min_same,min_opp,"
                "upper_bound_same,lower_bound_opp,same_below_upper,"
                "opp_above_lower,explorative,ok")


def _output_dir(args):
    out = args.output_dir or os.environ.get("PWLL_OUTPUT_DIR") or "output"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load_dataset(name, seed=0, mod_k=0):
    if name == "blobs":
        dataset = gen_blobs(seed)
    elif name == "box":
        dataset = gen_box()
    elif Path(name).exists():
        dataset = pwll_io.read_dataset(name)
    else:
        raise PwllError(f"unknown dataset {name!r} (not blobs, box, or a file)")
    if mod_k:
        dataset = relabel_mod_k(dataset, mod_k)
    return dataset


def cmd_run(args):
    spec = load_run_spec(args.config, overrides=args.set or ())
    out = _output_dir(args)
    dataset = _load_dataset(spec.dataset, seed=spec.dataset_seed, mod_k=spec.mod_k)
    oracle = ground_truth_oracle(dataset)
    graph = build_knn_graph(dataset.features, spec.configs[0].k)

    manifest = {"config": str(args.config), "dataset": dataset.name, "runs": []}
    for preset, config in zip(spec.presets, spec.configs):
        for seed in config.seeds:
            snapshot_dir = None
            if spec.snapshots:
                snapshot_dir = out / f"snapshots_{preset}_seed{seed}"
                snapshot_dir.mkdir(exist_ok=True)
            log = run_experiment(dataset, config, oracle, seed, graph=graph,
                                 snapshot_dir=snapshot_dir)
            csv_path = out / f"{preset}_seed{seed}.csv"
            log.to_csv(csv_path)
            manifest["runs"].append({
                "acquisition": preset, "seed": seed, "csv": csv_path.name,
                "final_accuracy": log.final_accuracy(),
                "final_cluster_proportion": log.records[-1].cluster_proportion,
            })
            print(f"{preset} seed {seed}: accuracy {log.final_accuracy():.4f}, "
                  f"cluster proportion {log.records[-1].cluster_proportion:.3f}")
    with open(out / "manifest.json", "w", encoding="ascii") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    print(f"wrote {len(manifest['runs'])} logs to {out}")
    return 0


def cmd_continuum(args):
    spec = load_sweep_spec(args.sweep, overrides=args.set or ())
    out_path = Path(args.out) if args.out else _output_dir(args) / "sweep.csv"
    rows = []
    for rho in spec.rho:
        for R_s in spec.R_s:
            for beta in spec.beta:
                for tau in spec.tau:
                    rows.append(_sweep_cell(spec, rho, R_s, beta, tau))
    with open(out_path, "w", encoding="ascii") as f:
        f.write(SWEEP_HEADER + "\n")
        for row in rows:
            f.write(",".join(str(v) for v in row) + "\n")
    n_feasible = sum(1 for r in rows if r[6])
    n_bad = sum(1 for r in rows if not r[-1])
    print(f"{len(rows)} cells ({n_feasible} feasible), {n_bad} failed -> {out_path}")
    return 0 if n_bad == 0 else 1


def _sweep_cell(spec, rho, R_s, beta, tau):
    if spec.mode == "explore":
        report = check_general_1d_bounds(
            rho_opp=rho, R_s=R_s, beta=beta, tau=tau, rho_max=spec.rho_max,
            plateau_fraction=spec.plateau_fraction, delta=spec.delta_ratio * rho,
            m=spec.m)
        ok = (not report.feasible) or (report.explorative and
                                       report.same_below_upper and
                                       report.opp_above_lower)
        return (spec.mode, rho, R_s, beta, tau, report.delta, report.feasible,
                report.min_same, report.min_opp, report.upper_bound_same,
                report.lower_bound_opp, report.same_below_upper,
                report.opp_above_lower, report.explorative, ok)

    # exploitation default: constant density on both intervals
    same = solve_bvp(IntervalProblem(R=R_s, rho=np.full(spec.m + 1, rho),
                                     tau=tau, kind=SAME, m=spec.m))
    opp = solve_bvp(IntervalProblem(R=beta * R_s, rho=np.full(spec.m + 1, rho),
                                    tau=tau, kind=OPPOSITE, m=spec.m))
    feasible = tau <= 2.0 * rho / R_s ** 2
    exploitative = same.min_value > opp.min_value
    ok = (not feasible) or exploitative
    return (spec.mode, rho, R_s, beta, tau, spec.delta_ratio * rho, feasible,
            same.min_value, opp.min_value, math.nan, math.nan,
            False, False, not exploitative, ok)


def cmd_serve(args):
    spec = load_run_spec(args.config, overrides=args.set or ())
    dataset = _load_dataset(spec.dataset, seed=spec.dataset_seed, mod_k=spec.mod_k)
    static_dir = args.static_dir
    if static_dir is None:
        candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        static_dir = candidate if candidate.is_dir() else None
    serve(dataset, spec.configs[0], port=args.port, seed=args.seed,
          static_dir=static_dir)
    return 0


def cmd_gen_data(args):
    if args.dataset == "blobs":
        dataset = gen_blobs(args.seed)
    elif args.dataset == "box":
        dataset = gen_box()
    elif args.dataset == "embedding-mixture":
        dataset = gen_embedding_mixture(args.seed, n_points=args.n_points)
    else:
        raise PwllError(f"unknown dataset {args.dataset!r}")
    if args.mod_k:
        dataset = relabel_mod_k(dataset, args.mod_k)
    pwll_io.write_dataset(args.out, dataset, fmt=args.format, seed=args.seed)
    print(f"wrote {dataset.n_points} points ({dataset.n_classes} classes, "
          f"{dataset.n_clusters} clusters) to {args.out}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pwll",
        description="Graph-based sequential active learning experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run experiments from a config file")
    p_run.add_argument("config")
    p_run.add_argument("--output-dir", help="overrides $PWLL_OUTPUT_DIR")
    p_run.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config key (repeatable)")
    p_run.set_defaults(func=cmd_run)

    p_cont = sub.add_parser("continuum", help="run a 1d bound sweep")
    p_cont.add_argument("sweep")
    p_cont.add_argument("--out", help="report CSV path")
    p_cont.add_argument("--output-dir", help="overrides $PWLL_OUTPUT_DIR")
    p_cont.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a sweep key (repeatable)")
    p_cont.set_defaults(func=cmd_continuum)

    p_serve = sub.add_parser("serve", help="serve the labeling API and UI")
    p_serve.add_argument("config")
    p_serve.add_argument("--port", type=int, default=8008)
    p_serve.add_argument("--seed", type=int, default=0)
    p_serve.add_argument("--static-dir", help="built UI assets directory")
    p_serve.add_argument("--set", action="append", metavar="KEY=VALUE",
                         help="override a config key (repeatable)")
    p_serve.set_defaults(func=cmd_serve)

    p_gen = sub.add_parser("gen-data", help="generate a dataset file")
    p_gen.add_argument("dataset", choices=["blobs", "box", "embedding-mixture"])
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--format", choices=["csv", "binary"], default="csv")
    p_gen.add_argument("--mod-k", type=int, default=0)
    p_gen.add_argument("--n-points", type=int, default=1500)
    p_gen.set_defaults(func=cmd_gen_data)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except PwllError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
