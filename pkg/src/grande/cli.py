"""Command-line entry point: ``grande <command> [flags]``."""

import argparse
import dataclasses
import logging
import sys
import time

import numpy as np

from grande import io, kernels
from grande.degree import CENTRALITY, GRANDE
from grande.errors import GrandeError
from grande.graph import build_reciprocal_graph, compute_ranked_lists
from grande.harness import generate_blobs, run_experiment, sigma_sweep
from grande.models import APPNP, SGC, TrainConfig

log = logging.getLogger("grande")


def parse_grid(text):
    """``lo:hi:step`` -> inclusive list of sigmas, rounded to the step's precision."""
    try:
        lo, hi, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:step, got {text!r}") from None
    if not (lo > 0 and step > 0 and hi >= lo):
        raise argparse.ArgumentTypeError(f"invalid sigma grid {text!r}")
    decimals = max(len(t.split(".")[1]) if "." in t else 0 for t in text.split(":"))
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, decimals) for i in range(count)]


def _data_flags(p, labels=True):
    p.add_argument("--features", required=True)
    if labels:
        p.add_argument("--labels", required=True)
    p.add_argument("--k", type=int, default=40)
    p.add_argument("--out", required=True)


def _model_flags(p):
    p.add_argument("--model", choices=[SGC, APPNP], default=SGC)
    p.add_argument("--degree", choices=[CENTRALITY, GRANDE], default=GRANDE)
    p.add_argument("--sigma", type=float, default=0.2)
    p.add_argument("--K", type=int, default=None, dest="k_steps")
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--hidden", type=int, default=256)
    p.add_argument("--dropout", type=float, default=0.5)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--executions", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)


def build_parser():
    parser = argparse.ArgumentParser(prog="grande", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-graph", help="write the reciprocal kNN edge list")
    _data_flags(p, labels=False)

    for name, helptext in [
        ("train", "fold-based experiment with one degree rule"),
        ("evaluate", "centrality vs GRaNDe on identical folds"),
        ("sweep-sigma", "GRaNDe experiment for every sigma in a grid"),
    ]:
        p = sub.add_parser(name, help=helptext)
        _data_flags(p)
        _model_flags(p)
        if name == "sweep-sigma":
            p.add_argument("--sigma-grid", type=parse_grid, default=parse_grid("0.1:1.0:0.1"))

    p = sub.add_parser("gen-synthetic", help="write Gaussian-blob features and labels")
    p.add_argument("--features", required=True, help="output path; binary unless it ends in .csv")
    p.add_argument("--labels", required=True)
    p.add_argument("--classes", type=int, default=3)
    p.add_argument("--per-class", type=int, default=100)
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--separation", type=float, default=4.0)
    p.add_argument("--noise", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _config(args, **overrides):
    cfg = TrainConfig(
        model=args.model, epochs=args.epochs, lr=args.lr, degree_kind=args.degree,
        sigma=args.sigma, seed=args.seed, k_steps=args.k_steps, alpha=args.alpha,
        hidden=args.hidden, dropout=args.dropout,
    )
    return dataclasses.replace(cfg, **overrides) if overrides else cfg


def _load(args):
    t0 = time.perf_counter()
    x = io.load_features(args.features)
    labels = io.load_labels(args.labels)
    if len(labels) != x.shape[0]:
        raise GrandeError(f"{len(labels)} labels for {x.shape[0]} feature rows")
    graph = build_reciprocal_graph(compute_ranked_lists(x, args.k), args.k)
    return x, labels, graph, time.perf_counter() - t0


def _inputs(args):
    return {"features": args.features, "labels": args.labels, "k": args.k}


def cmd_build_graph(args):
    t0 = time.perf_counter()
    x = io.load_features(args.features)
    graph = build_reciprocal_graph(compute_ranked_lists(x, args.k), args.k)
    io.write_edge_list(args.out, graph)
    log.info("%d nodes, %d edges in %.3fs", graph.n, len(graph.edges), time.perf_counter() - t0)


def cmd_train(args):
    x, labels, graph, t_graph = _load(args)
    t0 = time.perf_counter()
    report = run_experiment(x, labels, graph, _config(args), args.executions, args.folds)
    doc = {
        "command": "train",
        "inputs": _inputs(args),
        **report.to_dict(),
        "timings": {"graph_s": t_graph, "experiment_s": time.perf_counter() - t0,
                    "backend": kernels.BACKEND},
    }
    io.write_result(args.out, doc)
    log.info("accuracy %.4f +- %.4f", report.mean, report.std)


def cmd_evaluate(args):
    x, labels, graph, t_graph = _load(args)
    out, timings = {}, {"graph_s": t_graph, "backend": kernels.BACKEND}
    for kind in (CENTRALITY, GRANDE):
        t0 = time.perf_counter()
        out[kind] = run_experiment(x, labels, graph, _config(args, degree_kind=kind),
                                   args.executions, args.folds)
        timings[f"{kind}_s"] = time.perf_counter() - t0
    doc = {
        "command": "evaluate",
        "inputs": _inputs(args),
        "results": {kind: r.to_dict() for kind, r in out.items()},
        "mean_gain": out[GRANDE].mean - out[CENTRALITY].mean,
        "timings": timings,
    }
    io.write_result(args.out, doc)
    log.info("centrality %.4f, grande %.4f", out[CENTRALITY].mean, out[GRANDE].mean)


def cmd_sweep(args):
    x, labels, graph, t_graph = _load(args)
    t0 = time.perf_counter()
    sweep = sigma_sweep(x, labels, graph, _config(args, degree_kind=GRANDE),
                        args.sigma_grid, args.executions, args.folds)
    doc = {
        "command": "sweep-sigma",
        "inputs": _inputs(args),
        **sweep.to_dict(),
        "timings": {"graph_s": t_graph, "sweep_s": time.perf_counter() - t0,
                    "backend": kernels.BACKEND},
    }
    io.write_result(args.out, doc)
    log.info("best sigma %g", sweep.best_sigma)


def cmd_gen_synthetic(args):
    x, labels = generate_blobs(args.classes, args.per_class, args.dim,
                               args.separation, args.noise, args.seed)
    if args.features.endswith(".csv"):
        io.write_features_csv(args.features, x)
    else:
        io.write_features_binary(args.features, x)
    io.write_labels(args.labels, labels)


COMMANDS = {
    "build-graph": cmd_build_graph,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "sweep-sigma": cmd_sweep,
    "gen-synthetic": cmd_gen_synthetic,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (GrandeError, ValueError, OSError) as exc:
        print(f"grande: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
