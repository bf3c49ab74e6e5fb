"""Command-line entry point for batch experimentation.

stdout carries exactly one JSON payload per invocation (schema "sgcn/1");
human-readable logging goes to stderr. Exit codes: 0 success / all checks
passed, 1 check failure, 2 usage or IO error. All randomness flows from
--seed through a counter-based generator.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import data_io, lemmalab, network, spectral
from .graphs import make_chained_cycles
from .operators import lazy_walk
from .scattering import parse_path, path_label, scatter_node

SCHEMA = "sgcn/1"

# published single-channel ablation reference accuracies on the cora
# benchmark (fraction correct); used as footer context in ablation reports
ABLATION_REFERENCE_CORA = {
    "full": 0.842,
    "A1": 0.820,
    "A2": 0.807,
    "A3": 0.809,
    "psi2": 0.837,
    "psi1": 0.827,
}


def log(message: str) -> None:
    print(message, file=sys.stderr)


def emit(payload: dict) -> None:
    payload = {"schema": SCHEMA, **payload}
    json.dump(payload, sys.stdout, sort_keys=True)
    sys.stdout.write("\n")


class UsageError(Exception):
    pass


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_verify_lemmas(args) -> int:
    reports = lemmalab.default_sweep(_rng(args.seed))
    if args.lengths:
        lengths = [int(v) for v in args.lengths.split(",")]
        reports.append(lemmalab.verify_hub_pass(lengths))
        if lengths == [6, 8]:
            reports.append(lemmalab.verify_fig3_table())
    if args.fig3_tolerance is not None:
        reports.append(lemmalab.verify_fig3_table(tolerance=args.fig3_tolerance))
    payload = {
        "kind": "lemma-report",
        "reports": [
            {
                "lemma": r.lemma_id,
                "parameters": r.parameters,
                "max_deviation": r.max_deviation,
                "tolerance": r.tolerance,
                "passed": r.passed,
                "failure": r.failure,
            }
            for r in reports
        ],
        "all_passed": all(r.passed for r in reports),
    }
    emit(payload)
    n_fail = sum(not r.passed for r in reports)
    log(f"{len(reports)} checks, {n_fail} failed")
    return 0 if n_fail == 0 else 1


def cmd_scatter(args) -> int:
    g = data_io.read_graph_txt(args.graph)
    x = data_io.read_features_txt(args.signal)
    path = parse_path(args.path)
    out = scatter_node(lazy_walk(g), path, x)
    data_io.write_features_txt(args.out, np.atleast_2d(out.T).T)
    emit({
        "kind": "scatter-result",
        "path": list(path),
        "label": path_label(path),
        "nodes": g.n,
        "columns": int(out.shape[1]) if out.ndim == 2 else 1,
        "out": str(args.out),
    })
    log(f"wrote cascade response for path {path} to {args.out}")
    return 0


def _load_run(args):
    if args.config in data_io.PRESET_NAMES:
        config = data_io.load_preset(args.config)
    else:
        config = data_io.load_config(args.config)
    if args.seed is not None:
        config.trainer.seed = args.seed
    data_dir = args.data_dir or config.data_dir
    if not data_dir:
        raise UsageError("no dataset directory: pass --data-dir or set data_dir in config")
    dataset = data_io.load_dataset(data_dir)
    spec = config.model_spec(input_dim=dataset.features.shape[1],
                             n_classes=dataset.n_classes)
    return config, dataset, spec


def cmd_train(args) -> int:
    config, dataset, spec = _load_run(args)
    params, report = network.train(spec, dataset, config.trainer)
    if args.out:
        network.save_checkpoint(args.out, spec, params)
        log(f"checkpoint written to {args.out}")
    emit({
        "kind": "train-result",
        "seed": config.trainer.seed,
        "metrics": report.to_dict(),
        "test_accuracy": report.test_acc,
        "checkpoint": args.out,
    })
    log(f"best val acc {report.best_val_acc:.4f} at epoch {report.best_epoch}; "
        f"test acc {report.test_acc:.4f}")
    return 0


def cmd_eval(args) -> int:
    spec, params = network.load_checkpoint(args.model)
    dataset = data_io.load_dataset(args.data_dir)
    acc = {split: network.evaluate(spec, params, dataset, split)
           for split in ("train", "val", "test") if dataset.masks[split].size}
    emit({"kind": "eval-result", "accuracy": acc})
    log(" ".join(f"{k}={v:.4f}" for k, v in acc.items()))
    return 0


def _resolve_drop(spec: network.ModelSpec, drop: str) -> int:
    labels = network.channel_labels(spec)
    if drop in labels:
        return labels.index(drop)
    try:
        idx = int(drop)
    except ValueError:
        raise UsageError(f"unknown channel {drop!r}; have {labels}") from None
    if not 0 <= idx < len(labels):
        raise UsageError(f"channel index {idx} out of range; have {len(labels)} channels")
    return idx


def cmd_ablate(args) -> int:
    config, dataset, spec = _load_run(args)
    seeds = [config.trainer.seed + i for i in range(args.num_seeds)]
    drops = (network.channel_labels(spec) if args.drop == "all"
             else [args.drop])

    def mean_test_acc(model_spec):
        accs = []
        for seed in seeds:
            trainer = data_io.TrainConfig(**{**config.trainer.__dict__, "seed": seed})
            _, report = network.train(model_spec, dataset, trainer)
            accs.append(report.test_acc)
        return accs

    full_accs = mean_test_acc(spec)
    rows = []
    for drop in drops:
        idx = _resolve_drop(spec, drop)
        ablated = network.ablate_channel(spec, idx)
        accs = mean_test_acc(ablated)
        rows.append({
            "dropped": network.channel_labels(spec)[idx],
            "mean_test_accuracy": float(np.mean(accs)),
            "per_seed": accs,
        })

    payload = {
        "kind": "ablation-report",
        "seeds": seeds,
        "full_model": {"mean_test_accuracy": float(np.mean(full_accs)),
                       "per_seed": full_accs},
        "ablations": rows,
        "published_reference": ABLATION_REFERENCE_CORA,
    }
    emit(payload)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["dropped", "mean_test_accuracy"])
            writer.writerow(["none", f"{np.mean(full_accs):.4f}"])
            for row in rows:
                writer.writerow([row["dropped"], f"{row['mean_test_accuracy']:.4f}"])
        log(f"ablation CSV written to {args.out}")
    return 0


def cmd_spectrum(args) -> int:
    g = data_io.read_graph_txt(args.graph)
    dec = spectral.decompose(g)  # dense guard raises on oversized graphs
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["index", "eigenvalue"])
    for i, v in enumerate(dec.eigenvalues):
        writer.writerow([i, repr(float(v))])
    text = buf.getvalue()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    emit({
        "kind": "spectrum-result",
        "nodes": g.n,
        "eigenvalue_min": float(dec.eigenvalues[0]),
        "eigenvalue_max": float(dec.eigenvalues[-1]),
        "out": args.out,
        "csv": None if args.out else text,
    })
    log(f"{g.n} eigenvalues in [{dec.eigenvalues[0]:.6f}, {dec.eigenvalues[-1]:.6f}]")
    return 0


def cmd_make_demo_graph(args) -> int:
    # small helper so the scatter/spectrum commands have ready-made inputs
    lengths = [int(v) for v in args.lengths.split(",")]
    g = make_chained_cycles(lengths)
    data_io.write_graph_txt(args.out, g)
    emit({"kind": "graph-file", "nodes": g.n,
          "edges": g.num_undirected_edges(count_self_loops=False), "out": args.out})
    return 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sgcn",
        description="scattering / graph-convolution toolkit",
    )
    parser.add_argument("--seed", type=int, default=None,
                        help="seed for all randomness (counter-based generator)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-lemmas", help="run the analytic response checks")
    p.add_argument("--lengths", help="extra chained-cycle sweep, e.g. 6,8")
    p.add_argument("--fig3-tolerance", type=float, default=None,
                   help="override the response-table tolerance (negative testing)")
    p.set_defaults(func=cmd_verify_lemmas, needs_seed=True)

    p = sub.add_parser("scatter", help="emit a scattering cascade response")
    p.add_argument("--graph", required=True)
    p.add_argument("--signal", required=True, help="features.txt-format input")
    p.add_argument("--path", required=True, help="comma list, innermost scale first")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("train", help="train a model on a dataset directory")
    p.add_argument("--data-dir")
    p.add_argument("--config", required=True,
                   help="run-config JSON path or preset name "
                        f"({', '.join(data_io.PRESET_NAMES)})")
    p.add_argument("--out", help="checkpoint JSON output path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on a dataset")
    p.add_argument("--data-dir", required=True)
    p.add_argument("--model", required=True, help="checkpoint JSON path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ablate", help="drop channels and compare accuracies")
    p.add_argument("--data-dir")
    p.add_argument("--config", required=True)
    p.add_argument("--drop", required=True,
                   help="channel label (A2, psi1, ...), index, or 'all'")
    p.add_argument("--num-seeds", type=int, default=1)
    p.add_argument("--out", help="CSV output path")
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("spectrum", help="emit normalized-Laplacian eigenvalues as CSV")
    p.add_argument("--graph", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("make-demo-graph", help="write a chained-cycle graph file")
    p.add_argument("--lengths", default="6,8")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_make_demo_graph)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    if args.seed is None:
        args.seed = 0
    try:
        return args.func(args)
    except (UsageError, data_io.FormatError, OSError, ValueError,
            json.JSONDecodeError) as exc:
        log(f"error: {exc}")
        emit({"kind": "error", "message": str(exc)})
        return 2
    except network.TrainingDiverged as exc:
        log(f"training diverged: {exc}")
        emit({"kind": "error", "message": f"training diverged: {exc}",
              "epoch": exc.epoch})
        return 1


if __name__ == "__main__":
    sys.exit(main())
