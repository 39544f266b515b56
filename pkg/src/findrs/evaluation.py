"""Metrics and the repeated-split benchmark protocol.

An experiment resolves a dataset manifest, then for each of ``repeats`` runs
splits the data with seed ``base_seed + r``, trains the chosen algorithm on
the training half, and scores the test half. Ensemble shuffle seeds derive
from (base seed, run, t), so reports are reproducible end to end.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import dataset as D
from . import ensemble as E
from . import learner as L

ALGORITHMS = ("findrs", "bo", "bp")


def accuracy(predictions, labels) -> float:
    predictions = np.asarray(predictions).ravel()
    labels = np.asarray(labels).ravel()
    if len(predictions) == 0 or len(predictions) != len(labels):
        raise ValueError(
            f"need equal-length non-empty inputs, got {len(predictions)} and {len(labels)}"
        )
    return float(np.mean(predictions == labels))


def f1(predictions, labels) -> float:
    """F1 on the +1 class; vacuously 1.0 when neither side has positives."""
    predictions = np.asarray(predictions).ravel()
    labels = np.asarray(labels).ravel()
    if len(predictions) == 0 or len(predictions) != len(labels):
        raise ValueError(
            f"need equal-length non-empty inputs, got {len(predictions)} and {len(labels)}"
        )
    tp = int(np.sum((predictions == 1) & (labels == 1)))
    fp = int(np.sum((predictions == 1) & (labels != 1)))
    fn = int(np.sum((predictions != 1) & (labels == 1)))
    if tp + fp == 0 and tp + fn == 0:
        return 1.0
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def version_space_oracle(ruleset: Sequence[np.ndarray], X: np.ndarray, y) -> bool:
    """True iff the rule set classifies every given instance correctly."""
    preds = L.predict_rows(ruleset, np.asarray(X))
    y = np.asarray(y).ravel()
    if len(y) != len(preds):
        raise ValueError(f"arity mismatch: {len(preds)} predictions, {len(y)} labels")
    return bool(np.all(preds == y))


# ---------------------------------------------------------------------------
# experiment protocol
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    """One benchmark cell: dataset manifest + algorithm + protocol knobs.

    ``tau``, ``T`` and ``repeats`` default to the manifest values (falling
    back to 0, 100 and 10). ``encoding`` must be concrete here ("av" or
    "oh"); expanding a manifest's "both" into two configs is the caller's
    job.
    """

    manifest: dict
    algorithm: str
    encoding: str
    tau: int | None = None
    T: int | None = None
    repeats: int | None = None
    train_fraction: float = 0.5
    base_seed: int = 0
    threshold: float = 0.99
    discretize_fit: str = "full"

    def resolved(self) -> dict:
        if self.algorithm not in ALGORITHMS:
            raise D.DataError(f"unknown algorithm {self.algorithm!r}")
        if self.encoding not in ("av", "oh"):
            raise D.DataError(f"encoding must be 'av' or 'oh', got {self.encoding!r}")
        out = {
            "tau": self.tau if self.tau is not None else int(self.manifest.get("tau", 0)),
            "T": self.T if self.T is not None else int(self.manifest.get("T", 100)),
            "repeats": self.repeats
            if self.repeats is not None
            else int(self.manifest.get("repeats", 10)),
        }
        if out["repeats"] < 1 or out["T"] < 1:
            raise D.DataError("repeats and T must both be >= 1")
        return out


@dataclass
class RunResult:
    seed: int
    accuracy: float
    f1: float
    train_accuracy: float
    rules_before_prune: int | None = None
    rules_after_prune: int | None = None
    g_size: int | None = None
    selected_k: int | None = None
    wall_clock: float = 0.0  # excluded from serialized reports

    def to_dict(self) -> dict:
        out = {
            "seed": self.seed,
            "accuracy": self.accuracy,
            "f1": self.f1,
            "train_accuracy": self.train_accuracy,
        }
        for key in ("rules_before_prune", "rules_after_prune", "g_size", "selected_k"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        return out


@dataclass
class Report:
    """Per-run metrics plus their mean and population standard deviation."""

    dataset: str
    algorithm: str
    encoding: str
    tau: int
    T: int
    repeats: int
    train_fraction: float
    base_seed: int
    runs: list[RunResult] = field(default_factory=list)

    def __post_init__(self):
        if len(self.runs) != self.repeats:
            raise ValueError(
                f"report has {len(self.runs)} runs but repeats={self.repeats}"
            )

    def _series(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.runs], dtype=float)

    @property
    def f1_mean(self) -> float:
        return float(self._series("f1").mean())

    @property
    def f1_std(self) -> float:
        return float(self._series("f1").std())

    @property
    def accuracy_mean(self) -> float:
        return float(self._series("accuracy").mean())

    @property
    def accuracy_std(self) -> float:
        return float(self._series("accuracy").std())

    @property
    def total_wall_clock(self) -> float:
        return float(sum(r.wall_clock for r in self.runs))

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "algorithm": self.algorithm,
            "encoding": self.encoding,
            "tau": self.tau,
            "T": self.T,
            "repeats": self.repeats,
            "train_fraction": self.train_fraction,
            "base_seed": self.base_seed,
            "f1_mean": self.f1_mean,
            "f1_std": self.f1_std,
            "accuracy_mean": self.accuracy_mean,
            "accuracy_std": self.accuracy_std,
            "runs": [r.to_dict() for r in self.runs],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def ensemble_master_seed(base_seed: int, run: int) -> int:
    """Master seed for run r, mixed so (base seed, r, t) drives shuffle t."""
    return int(
        np.random.SeedSequence(entropy=(int(base_seed), int(run))).generate_state(1)[0]
    )


def run_experiment(cfg: ExperimentConfig) -> Report:
    """Execute the repeated-split protocol for one (dataset, algorithm) cell."""
    manifest = cfg.manifest
    knobs = cfg.resolved()
    tau, T, repeats = knobs["tau"], knobs["T"], knobs["repeats"]

    raw = D.table_from_manifest({**manifest, "discretize": []})
    disc_cols = manifest.get("discretize", [])
    if disc_cols == "auto":
        disc_cols = sorted(raw.numeric - {raw.label})
    bins = int(manifest.get("bins", 10))

    full_ds = None
    if cfg.discretize_fit == "full" or not disc_cols:
        table = (
            D.apply_discretization(raw, disc_cols, bins) if disc_cols else raw
        )
        full_ds = D.dataset_from_table(table, manifest, encoding=cfg.encoding)
    elif cfg.discretize_fit != "train":
        raise D.DataError(f"discretize_fit must be 'full' or 'train', got {cfg.discretize_fit!r}")

    runs = []
    for r in range(repeats):
        seed = cfg.base_seed + r
        started = time.perf_counter()
        if full_ds is not None:
            train, test = D.split(full_ds, D.SplitSpec(cfg.train_fraction, seed))
        else:
            tr_idx, te_idx = D.split_indices(raw.n_rows, D.SplitSpec(cfg.train_fraction, seed))
            table = D.apply_discretization(raw, disc_cols, bins, fit_rows=tr_idx)
            ds = D.dataset_from_table(table, manifest, encoding=cfg.encoding)
            train, test = ds.take(tr_idx), ds.take(te_idx)
        result = _run_once(cfg.algorithm, train, test, tau, T,
                           ensemble_master_seed(cfg.base_seed, r), cfg.threshold)
        result.seed = seed
        result.wall_clock = time.perf_counter() - started
        runs.append(result)

    return Report(
        dataset=manifest.get("name", "dataset"),
        algorithm=cfg.algorithm,
        encoding=cfg.encoding,
        tau=tau,
        T=T,
        repeats=repeats,
        train_fraction=cfg.train_fraction,
        base_seed=cfg.base_seed,
        runs=runs,
    )


def _run_once(algorithm, train, test, tau, T, master_seed, threshold) -> RunResult:
    P, N = train.positives, train.negatives
    if algorithm == "findrs":
        state = L.fit_rules(P, N, tau=tau)
        before = state.report.rules_before_prune
        state = L.prune(state)
        test_pred = L.predict_rows(state.ruleset, test.X)
        train_pred = L.predict_rows(state.ruleset, train.X)
        return RunResult(
            seed=0,
            accuracy=accuracy(test_pred, test.y),
            f1=f1(test_pred, test.y),
            train_accuracy=accuracy(train_pred, train.y),
            rules_before_prune=before,
            rules_after_prune=len(state.ruleset),
        )
    ens = E.fit_ensemble(P, N, T=T, tau=tau, master_seed=master_seed)
    if algorithm == "bo":
        test_pred = E.predict_bo(ens, test.X)
        train_pred = E.predict_bo(ens, train.X)
        return RunResult(
            seed=0,
            accuracy=accuracy(test_pred, test.y),
            f1=f1(test_pred, test.y),
            train_accuracy=accuracy(train_pred, train.y),
            rules_after_prune=sum(len(s.ruleset) for s in ens.states),
        )
    w = E.aggregate_bp(ens)
    test_pred = E.predict_bp(w, test.X)
    train_pred = E.predict_bp(w, train.X)
    return RunResult(
        seed=0,
        accuracy=accuracy(test_pred, test.y),
        f1=f1(test_pred, test.y),
        train_accuracy=accuracy(train_pred, train.y),
        g_size=len(w),
        selected_k=E.select_k_by_training_accuracy(w, train.X, train.y, threshold)
        if len(w)
        else None,
    )


def best_encoding_reports(cfg_av: ExperimentConfig, cfg_oh: ExperimentConfig) -> Report:
    """Run both encodings and keep the better mean F1 (ties prefer AV)."""
    report_av = run_experiment(cfg_av)
    report_oh = run_experiment(cfg_oh)
    return report_av if report_av.f1_mean >= report_oh.f1_mean else report_oh


# ---------------------------------------------------------------------------
# prune curve
# ---------------------------------------------------------------------------

def prune_curve(
    w: E.WeightedRuleSet,
    X_train: np.ndarray,
    y_train,
    X_test: np.ndarray,
    y_test,
    threshold: float = 0.99,
) -> tuple[list[tuple[int, float, float]], int]:
    """(K, train accuracy, test accuracy) for K = 1..|G|, plus the selected K.

    Rules are taken in decreasing weight order; the last point reproduces the
    unpruned decision exactly.
    """
    if len(w) == 0:
        raise ValueError("empty rule set")
    train_accs = E.accuracy_by_k(w, X_train, y_train)
    test_accs = E.accuracy_by_k(w, X_test, y_test)
    selected = int(np.flatnonzero(train_accs >= threshold * train_accs[-1])[0]) + 1
    points = [
        (k + 1, float(train_accs[k]), float(test_accs[k])) for k in range(len(w))
    ]
    return points, selected


def prune_curve_tsv(points: Sequence[tuple[int, float, float]]) -> str:
    lines = ["K\ttrain_acc\ttest_acc"]
    for k, tr, te in points:
        lines.append(f"{k}\t{tr:.6f}\t{te:.6f}")
    return "\n".join(lines) + "\n"


def format_report_table(reports: Sequence[Report]) -> str:
    """Aligned mean-and-std table, one row per report."""
    header = ("dataset", "algorithm", "encoding", "tau", "T",
              "f1", "accuracy", "repeats")
    rows = [header]
    for rep in reports:
        rows.append(
            (
                rep.dataset,
                rep.algorithm,
                rep.encoding,
                str(rep.tau),
                str(rep.T),
                f"{rep.f1_mean:.3f} ± {rep.f1_std:.2f}",
                f"{rep.accuracy_mean:.3f} ± {rep.accuracy_std:.2f}",
                str(rep.repeats),
            )
        )
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    return "\n".join(
        "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
        for row in rows
    ) + "\n"
