"""Benchmark matrices: run configs x activations x repeats, rank the results.

The statistics mirror the usual comparison protocol for activation studies:

* fractional ranking per config (rank 1 is the highest accuracy, tied
  values share the mean of the positions they span),
* mean rank per activation across configs,
* a baseline score counting the configs where an activation's mean accuracy
  strictly exceeds the baseline's,
* relative improvement (acc - base) / base * 100.

Internally everything is full float64 precision; only display values are
rounded, and rounding is decimal half-up (7.125 prints as 7.13, not the
banker's 7.12 that round() would give).
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

from .activations import KINDS, ActivationSpec
from .data import Dataset
from .network import (
    PRESET_WIDTHS,
    NetworkConfig,
    TrainConfig,
    train_model,
)
from .numerics import derive_seed

THREADS_ENV_VAR = "AFBENCH_THREADS"


def round_display(value: float, places: int = 2) -> float:
    """Half-up decimal rounding for report output."""
    q = Decimal(1).scaleb(-places)
    return float(Decimal(repr(float(value))).quantize(q, rounding=ROUND_HALF_UP))


def resolve_network_config(
    name: str,
    activation: ActivationSpec,
    input_dim: int,
    num_classes: int,
    dropout_rate: float,
) -> NetworkConfig:
    """Turn a config name into a full NetworkConfig.

    Preset names map to the standard topologies (whose output width must
    match the dataset's class count); any other name is parsed as
    dash-separated hidden widths, e.g. "64-32", with the class count
    appended as the output layer.
    """
    if name in PRESET_WIDTHS:
        widths = PRESET_WIDTHS[name]
        if widths[-1] != num_classes:
            raise ValueError(
                f"preset {name} outputs {widths[-1]} classes but the dataset has {num_classes}"
            )
    else:
        try:
            hidden = tuple(int(part) for part in name.split("-"))
        except ValueError:
            raise ValueError(
                f"config name {name!r} is neither a preset ({tuple(PRESET_WIDTHS)}) "
                "nor dash-separated hidden widths like '64-32'"
            ) from None
        if not hidden or any(w < 1 for w in hidden):
            raise ValueError(f"config name {name!r} must list positive hidden widths")
        widths = hidden + (num_classes,)
    return NetworkConfig(
        name=name,
        input_dim=input_dim,
        layer_widths=widths,
        activation=activation,
        dropout_rate=dropout_rate,
    )


@dataclass(frozen=True, eq=False)
class TrialSpec:
    """One training run: a config name, an activation, a repeat index, and
    the seed that makes it reproducible."""

    config_name: str
    activation: str
    run_index: int
    seed: int
    train: TrainConfig
    dataset: Dataset = field(repr=False)
    eval_dataset: Dataset | None = field(default=None, repr=False)


def trial_seed(base_seed: int, config_name: str, activation: str, run_index: int) -> int:
    """Seed for one trial, derived from names rather than positions so the
    grid can grow without reseeding existing cells."""
    return derive_seed(base_seed, config_name, activation, run_index)


def make_trials(
    dataset: Dataset,
    config_names: list[str],
    activation_kinds: list[str],
    runs: int,
    train: TrainConfig,
    base_seed: int,
    eval_dataset: Dataset | None = None,
) -> list[TrialSpec]:
    """The full cross product of configs x activations x run indices."""
    if runs < 1:
        raise ValueError(f"runs must be >= 1, got {runs}")
    if not config_names or not activation_kinds:
        raise ValueError("need at least one config and one activation")
    for kind in activation_kinds:
        if kind not in KINDS:
            raise ValueError(f"unknown activation kind {kind!r}")
    specs = []
    for cfg_name in config_names:
        for kind in activation_kinds:
            for run in range(runs):
                specs.append(
                    TrialSpec(
                        config_name=cfg_name,
                        activation=kind,
                        run_index=run,
                        seed=trial_seed(base_seed, cfg_name, kind, run),
                        train=train,
                        dataset=dataset,
                        eval_dataset=eval_dataset,
                    )
                )
    return specs


def run_trial(spec: TrialSpec) -> float:
    """Train one network from scratch and return accuracy as a percentage."""
    net_config = resolve_network_config(
        spec.config_name,
        ActivationSpec(spec.activation),
        input_dim=spec.dataset.num_features,
        num_classes=spec.dataset.num_classes,
        dropout_rate=spec.train.dropout_rate,
    )
    train_cfg = TrainConfig(
        learning_rate=spec.train.learning_rate,
        dropout_rate=spec.train.dropout_rate,
        batch_size=spec.train.batch_size,
        epochs=spec.train.epochs,
        seed=spec.seed,
    )
    result = train_model(net_config, spec.dataset, train_cfg, spec.eval_dataset)
    return result.accuracy * 100.0


@dataclass
class TrialResult:
    run_index: int
    seed: int
    accuracy: float


@dataclass
class ResultTable:
    """Per-run accuracies for every (config, activation) cell."""

    configs: tuple[str, ...]
    activations: tuple[str, ...]
    runs: int
    cells: dict[tuple[str, str], list[TrialResult]]

    def __post_init__(self):
        for cfg in self.configs:
            for act in self.activations:
                cell = self.cells.get((cfg, act))
                if cell is None or len(cell) != self.runs:
                    have = 0 if cell is None else len(cell)
                    raise ValueError(
                        f"cell ({cfg}, {act}) has {have} results, expected {self.runs}"
                    )

    def mean(self, config: str, activation: str) -> float:
        cell = self.cells[(config, activation)]
        return sum(r.accuracy for r in cell) / len(cell)

    def mean_grid(self) -> dict[str, dict[str, float]]:
        """means[config][activation]"""
        return {
            cfg: {act: self.mean(cfg, act) for act in self.activations}
            for cfg in self.configs
        }


def _canonical_configs(names) -> tuple[str, ...]:
    """Standard topologies in their table order, then custom names in
    first-appearance order."""
    seen = list(dict.fromkeys(names))
    presets = [n for n in PRESET_WIDTHS if n in seen]
    customs = [n for n in seen if n not in PRESET_WIDTHS]
    return tuple(presets + customs)


def _canonical_activations(kinds) -> tuple[str, ...]:
    present = set(kinds)
    return tuple(k for k in KINDS if k in present)


def run_matrix(specs: list[TrialSpec], max_workers: int | None = None) -> ResultTable:
    """Run every trial (thread pool, sized by AFBENCH_THREADS when set) and
    collect the results into a canonically ordered table.

    All specs must share one dataset and one repeat count. The first failing
    trial aborts the matrix with an error naming that trial.
    """
    if not specs:
        raise ValueError("no trials to run")
    first = specs[0]
    if any(s.dataset is not first.dataset for s in specs):
        raise ValueError("all trials in a matrix must share the same dataset")
    configs = _canonical_configs(s.config_name for s in specs)
    activations = _canonical_activations(s.activation for s in specs)
    run_indices = {s.run_index for s in specs}
    runs = len(run_indices)
    if run_indices != set(range(runs)):
        raise ValueError(f"run indices must be 0..{runs - 1}, got {sorted(run_indices)}")

    if max_workers is None:
        env = os.environ.get(THREADS_ENV_VAR)
        max_workers = int(env) if env else (os.cpu_count() or 1)
    if max_workers < 1:
        raise ValueError(f"thread count must be >= 1, got {max_workers}")

    cells: dict[tuple[str, str], list[TrialResult]] = {
        (cfg, act): [None] * runs for cfg in configs for act in activations
    }
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        futures = [(spec, pool.submit(run_trial, spec)) for spec in specs]
        for spec, future in futures:
            try:
                acc = future.result()
            except Exception as exc:
                raise RuntimeError(
                    f"trial failed (config={spec.config_name}, "
                    f"activation={spec.activation}, run={spec.run_index}): {exc}"
                ) from exc
            cells[(spec.config_name, spec.activation)][spec.run_index] = TrialResult(
                run_index=spec.run_index, seed=spec.seed, accuracy=acc
            )
    for key, cell in cells.items():
        if any(r is None for r in cell):
            raise ValueError(f"cell {key} is missing runs; specs did not cover the grid")
    return ResultTable(configs=configs, activations=activations, runs=runs, cells=cells)


def fractional_rank(values: list[float]) -> list[float]:
    """Ranks with 1 for the largest value; ties get the mean of the
    positions they would occupy. Sum of ranks is always n(n+1)/2."""
    if not values:
        raise ValueError("cannot rank an empty list")
    order = sorted(range(len(values)), key=lambda i: -values[i])
    ranks = [0.0] * len(values)
    pos = 0
    while pos < len(order):
        end = pos
        while end + 1 < len(order) and values[order[end + 1]] == values[order[pos]]:
            end += 1
        shared = (pos + 1 + end + 1) / 2.0
        for k in range(pos, end + 1):
            ranks[order[k]] = shared
        pos = end + 1
    return ranks


def mean_rank(ranks: list[float]) -> float:
    """Mean of an activation's per-config ranks (full precision)."""
    if not ranks:
        raise ValueError("cannot average an empty rank list")
    return sum(ranks) / len(ranks)


def baseline_score(
    means: dict[str, dict[str, float]], activation: str, baseline: str
) -> int:
    """Number of configs where activation's mean accuracy strictly exceeds
    the baseline's. means is indexed [config][activation]."""
    score = 0
    for cfg, row in means.items():
        if activation not in row or baseline not in row:
            raise ValueError(f"config {cfg!r} lacks {activation!r} or {baseline!r}")
        if row[activation] > row[baseline]:
            score += 1
    return score


def relative_improvement(accuracy: float, baseline_accuracy: float) -> float:
    """(accuracy - baseline) / baseline * 100, half-up rounded to 2 decimals
    (this is a display statistic)."""
    if baseline_accuracy <= 0:
        raise ValueError(f"baseline accuracy must be > 0, got {baseline_accuracy}")
    return round_display((accuracy - baseline_accuracy) / baseline_accuracy * 100.0)


@dataclass
class RankReport:
    """Ranking statistics derived from a grid of mean accuracies."""

    configs: tuple[str, ...]
    activations: tuple[str, ...]
    means: dict[str, dict[str, float]]  # [config][activation]
    ranks: dict[str, dict[str, float]]  # [config][activation]
    mean_ranks: dict[str, float]  # [activation], full precision
    scores: dict[str, int | None]  # [activation], None for the baseline
    baseline: str

    def best_activation(self) -> str:
        """Activation with the lowest mean rank (ties to table order)."""
        return min(self.activations, key=lambda a: self.mean_ranks[a])


def build_rank_report(
    means: dict[str, dict[str, float]],
    configs: tuple[str, ...] | None = None,
    activations: tuple[str, ...] | None = None,
    baseline: str = "relu",
) -> RankReport:
    """Rank a [config][activation] grid of mean accuracies."""
    if not means:
        raise ValueError("empty accuracy grid")
    if configs is None:
        configs = _canonical_configs(means.keys())
    if activations is None:
        first = means[configs[0]]
        activations = _canonical_activations(first.keys())
    if baseline not in activations:
        raise ValueError(f"baseline {baseline!r} is not in the grid")
    ranks: dict[str, dict[str, float]] = {}
    for cfg in configs:
        row = means[cfg]
        cfg_ranks = fractional_rank([row[a] for a in activations])
        ranks[cfg] = dict(zip(activations, cfg_ranks))
    mean_ranks = {
        a: mean_rank([ranks[cfg][a] for cfg in configs]) for a in activations
    }
    scores: dict[str, int | None] = {
        a: (None if a == baseline else baseline_score(means, a, baseline))
        for a in activations
    }
    return RankReport(
        configs=configs,
        activations=activations,
        means=means,
        ranks=ranks,
        mean_ranks=mean_ranks,
        scores=scores,
        baseline=baseline,
    )


def _fmt(value: float, places: int = 2) -> str:
    return f"{round_display(value, places):.{places}f}"


def rank_markdown_lines(report: RankReport, runs: int | None = None) -> list[str]:
    """Markdown report for a ranking (shared by benchmark output and the
    standalone rank command)."""
    lines = ["# Activation benchmark", ""]
    per_cell = "" if runs is None else f", {runs} run(s) per cell"
    lines.append(
        f"{len(report.configs)} config(s) x {len(report.activations)} "
        f"activation(s){per_cell}. Baseline: {report.baseline}."
    )
    lines.append("")
    lines.append("## Mean accuracy (%)")
    lines.append("")
    header = ["Activation", *report.configs, "Score"]
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + "---|" * len(header))
    for act in report.activations:
        score = report.scores[act]
        cells = [_fmt(report.means[cfg][act]) for cfg in report.configs]
        lines.append(
            "| " + " | ".join([act, *cells, "-" if score is None else str(score)]) + " |"
        )
    lines.append("")
    lines.append(
        f"Score: configs where the mean accuracy strictly beats {report.baseline}."
    )
    lines.append("")
    lines.append("## Fractional ranks (1 = best)")
    lines.append("")
    header = ["Activation", *report.configs, "Mean rank"]
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + "---|" * len(header))
    for act in report.activations:
        cells = [_fmt(report.ranks[cfg][act]) for cfg in report.configs]
        lines.append(
            "| " + " | ".join([act, *cells, _fmt(report.mean_ranks[act])]) + " |"
        )
    lines.append("")
    best = report.best_activation()
    lines.append(f"Best mean rank: {best} ({_fmt(report.mean_ranks[best])}).")
    if best != report.baseline:
        lines.append("")
        lines.append(f"## Improvement of {best} over {report.baseline} (%)")
        lines.append("")
        lines.append("| Config | Improvement |")
        lines.append("|---|---|")
        for cfg in report.configs:
            imp = relative_improvement(
                report.means[cfg][best], report.means[cfg][report.baseline]
            )
            lines.append(f"| {cfg} | {imp:.2f} |")
    lines.append("")
    return lines


def emit_report(
    table: ResultTable, report: RankReport, out_dir
) -> dict[str, Path]:
    """Write runs.csv, summary.csv and report.md under out_dir.

    Output is byte-identical across runs of the same matrix: rows are
    canonically ordered, floats use fixed formats, no timestamps.
    """
    if not table.configs or not table.activations or table.runs < 1:
        raise ValueError("cannot report an empty result table")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "runs": out / "runs.csv",
        "summary": out / "summary.csv",
        "report": out / "report.md",
    }

    with open(paths["runs"], "w", newline="\n") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["config", "activation", "run", "seed", "accuracy"])
        for cfg in table.configs:
            for act in table.activations:
                for r in table.cells[(cfg, act)]:
                    w.writerow([cfg, act, r.run_index, r.seed, f"{r.accuracy:.6f}"])

    with open(paths["summary"], "w", newline="\n") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["activation", *table.configs])
        for act in table.activations:
            w.writerow(
                [act, *(f"{table.mean(cfg, act):.6f}" for cfg in table.configs)]
            )

    with open(paths["report"], "w", newline="\n") as f:
        f.write("\n".join(rank_markdown_lines(report, runs=table.runs)))
    return paths


def load_summary_csv(path) -> dict[str, dict[str, float]]:
    """Read a summary.csv (activation rows, config columns) back into a
    [config][activation] mean grid."""
    with open(path, newline="") as f:
        reader = csv.reader(f)
        rows = list(reader)
    if not rows or not rows[0] or rows[0][0] != "activation":
        raise ValueError(f"{path}: expected header starting with 'activation'")
    configs = rows[0][1:]
    if not configs:
        raise ValueError(f"{path}: no config columns")
    means: dict[str, dict[str, float]] = {cfg: {} for cfg in configs}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(configs) + 1:
            raise ValueError(f"{path}:{lineno}: expected {len(configs) + 1} fields")
        act = row[0]
        for cfg, cell in zip(configs, row[1:]):
            try:
                means[cfg][act] = float(cell)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: bad number {cell!r}") from None
    return means
