"""Command line interface.

Subcommands: train, benchmark, rank, analyze, gradcheck, demo. Exit codes:
0 on success, 1 on a domain or computation failure, 2 on usage or config
errors (argparse handles the usage side itself).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import analysis, experiment
from .activations import KINDS, ActivationSpec
from .data import dataset_from_json, split_dataset
from .network import NetworkConfig, TrainConfig, train_model
from .numerics import RandomStream, derive_seed


class ConfigError(Exception):
    """A config file is malformed; reported with file/field diagnostics."""


def _load_json(path) -> dict:
    try:
        with open(path) as f:
            return json.load(f)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise ConfigError(f"{where}: missing field {key!r}")
    return obj[key]


def _build_train_setup(cfg: dict, where: str):
    """Shared between train and benchmark: dataset plus optional eval split."""
    dataset = dataset_from_json(_require(cfg, "dataset", where))
    eval_dataset = None
    if "eval_fraction" in cfg:
        seed = int(cfg.get("seed", cfg.get("base_seed", 0)))
        split_rng = RandomStream(derive_seed(seed, "eval-split"))
        dataset, eval_dataset = split_dataset(
            dataset, float(cfg["eval_fraction"]), split_rng
        )
    return dataset, eval_dataset


def cmd_train(args) -> int:
    cfg = _load_json(args.config)
    try:
        dataset, eval_dataset = _build_train_setup(cfg, args.config)
        seed = int(cfg.get("seed", 0))
        train_cfg = TrainConfig.from_json(cfg.get("train", {}), seed=seed)
        net_obj = _require(cfg, "network", args.config)
        activation = ActivationSpec.from_json(_require(net_obj, "activation", "network"))
        if "layers" in net_obj:
            net_config = NetworkConfig(
                name=net_obj.get("name", "custom"),
                input_dim=int(net_obj.get("input_dim", dataset.num_features)),
                layer_widths=tuple(int(w) for w in net_obj["layers"]),
                activation=activation,
                dropout_rate=float(net_obj.get("dropout", train_cfg.dropout_rate)),
            )
        else:
            net_config = experiment.resolve_network_config(
                _require(net_obj, "name", "network"),
                activation,
                input_dim=dataset.num_features,
                num_classes=dataset.num_classes,
                dropout_rate=float(net_obj.get("dropout", train_cfg.dropout_rate)),
            )
    except ValueError as exc:
        raise ConfigError(f"{args.config}: {exc}") from exc

    def progress(epoch: int, loss: float) -> None:
        print(f"epoch {epoch + 1}/{train_cfg.epochs} loss {loss:.6f}")

    result = train_model(net_config, dataset, train_cfg, eval_dataset, progress)
    print(f"accuracy {result.accuracy:.4f}")
    return 0


def cmd_benchmark(args) -> int:
    cfg = _load_json(args.config)
    try:
        dataset, eval_dataset = _build_train_setup(cfg, args.config)
        config_names = list(_require(cfg, "configs", args.config))
        kinds = list(_require(cfg, "activations", args.config))
        runs = int(cfg.get("runs", 1))
        train_cfg = TrainConfig.from_json(cfg.get("train", {}))
        base_seed = int(cfg.get("base_seed", 0))
        baseline = cfg.get("baseline", "relu")
        if baseline not in kinds:
            raise ConfigError(
                f"{args.config}: baseline {baseline!r} is not among the activations"
            )
        specs = experiment.make_trials(
            dataset, config_names, kinds, runs, train_cfg, base_seed, eval_dataset
        )
    except ValueError as exc:
        raise ConfigError(f"{args.config}: {exc}") from exc

    table = experiment.run_matrix(specs, max_workers=args.threads)
    report = experiment.build_rank_report(
        table.mean_grid(), table.configs, table.activations, baseline
    )
    paths = experiment.emit_report(table, report, args.out)
    best = report.best_activation()
    print(f"{len(specs)} trials done")
    print(
        f"best mean rank: {best} "
        f"({experiment.round_display(report.mean_ranks[best]):.2f})"
    )
    for name in ("runs", "summary", "report"):
        print(f"wrote {paths[name]}")
    return 0


def cmd_rank(args) -> int:
    try:
        means = experiment.load_summary_csv(args.input)
    except OSError as exc:
        raise ConfigError(f"cannot read {args.input}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    report = experiment.build_rank_report(means, baseline=args.baseline)
    for act in sorted(report.activations, key=lambda a: report.mean_ranks[a]):
        score = report.scores[act]
        print(
            f"{act:9s} mean_rank {experiment.round_display(report.mean_ranks[act]):5.2f}"
            f"  score {'-' if score is None else score}"
        )
    best = report.best_activation()
    print(
        f"best mean rank: {best} "
        f"({experiment.round_display(report.mean_ranks[best]):.2f})"
    )
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        path = out / "report.md"
        with open(path, "w", newline="\n") as f:
            f.write("\n".join(experiment.rank_markdown_lines(report)))
        print(f"wrote {path}")
    return 0


def cmd_analyze(args) -> int:
    kinds = (args.fn,) if args.fn else KINDS
    rows = analysis.mean_activation_rows(kinds, samples=args.samples, seed=args.seed)
    for row in rows:
        print(
            f"{row['activation']:9s} param={row['param']:g} samples={row['samples']} "
            f"seed={row['seed']} mean={row['mean']:.6f}"
        )
        if row["activation"] == "relu":
            print(
                f"  note: analytic relu mean is {analysis.RELU_NORMAL_MEAN:.6f}; "
                f"the sometimes-quoted {analysis.RELU_QUOTED_MEAN} does not match it"
            )
    if args.out:
        with open(args.out, "w", newline="\n") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["activation", "param", "samples", "seed", "mean"])
            for row in rows:
                w.writerow(
                    [
                        row["activation"],
                        f"{row['param']:g}",
                        row["samples"],
                        row["seed"],
                        f"{row['mean']:.6f}",
                    ]
                )
        print(f"wrote {args.out}")
    return 0


def cmd_gradcheck(args) -> int:
    kinds = (args.fn,) if args.fn else KINDS
    all_passed = True
    for kind in kinds:
        report = analysis.grad_check_activation(kind, eps=args.eps, tolerance=args.tol)
        if args.verbose:
            print("\n".join(report.lines()))
        else:
            verdict = "PASS" if report.passed else "FAIL"
            print(f"{kind:9s} max rel_err {report.max_rel_error:.3e} {verdict}")
        all_passed = all_passed and report.passed
    return 0 if all_passed else 1


def cmd_demo(args) -> int:
    hidden = tuple(int(w) for w in args.hidden.split("-"))
    result = analysis.fit_1d_demo(
        args.target,
        args.fn,
        hidden=hidden,
        epochs=args.epochs,
        seed=args.seed,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"fit1d_{result.target}_{result.kind}.csv"
    with open(path, "w", newline="\n") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["x", "target", "prediction"])
        for x, t, p in zip(result.xs, result.targets, result.predictions):
            w.writerow([f"{x:.6f}", f"{t:.6f}", f"{p:.6f}"])
    print(f"fit1d {result.target} {result.kind} final_mse {result.final_mse:.6f}")
    print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="afbench",
        description="Train dense networks and benchmark activation functions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train one network from a JSON config")
    p.add_argument("--config", required=True, help="path to the train config JSON")
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("benchmark", help="run a configs x activations matrix")
    p.add_argument("--config", required=True, help="path to the benchmark config JSON")
    p.add_argument("--out", required=True, help="directory for runs/summary/report files")
    p.add_argument("--threads", type=int, default=None, help="trial thread pool size")
    p.set_defaults(handler=cmd_benchmark)

    p = sub.add_parser("rank", help="rank a summary.csv of mean accuracies")
    p.add_argument("--input", required=True, help="summary.csv path")
    p.add_argument("--baseline", default="relu", help="baseline activation (default relu)")
    p.add_argument("--out", default=None, help="directory for report.md")
    p.set_defaults(handler=cmd_rank)

    p = sub.add_parser("analyze", help="numerical analyses")
    what = p.add_subparsers(dest="analysis", required=True)
    ma = what.add_parser("mean-activation", help="Monte-Carlo mean under N(0,1) input")
    ma.add_argument("--fn", choices=KINDS, default=None, help="one activation (default all)")
    ma.add_argument("--samples", type=int, default=1_000_000)
    ma.add_argument("--seed", type=int, default=0)
    ma.add_argument("--out", default=None, help="optional CSV output path")
    ma.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("gradcheck", help="finite-difference derivative checks")
    p.add_argument("--fn", choices=KINDS, default=None, help="one activation (default all)")
    p.add_argument("--eps", type=float, default=1e-5)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--verbose", action="store_true", help="print per-point detail")
    p.set_defaults(handler=cmd_gradcheck)

    p = sub.add_parser("demo", help="demonstrations")
    what = p.add_subparsers(dest="demo", required=True)
    fit = what.add_parser("fit1d", help="fit a small network to a 1-D curve")
    fit.add_argument("--target", required=True, help="constant, cubic, quartic or sine")
    fit.add_argument("--fn", choices=KINDS, required=True)
    fit.add_argument("--epochs", type=int, default=200)
    fit.add_argument("--seed", type=int, default=0)
    fit.add_argument("--hidden", default="16-16", help="hidden widths, e.g. 16-16")
    fit.add_argument("--out", default=".", help="directory for the curve CSV")
    fit.set_defaults(handler=cmd_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
