"""Command line surface: fit, predict, benchmark, prune-curve, inspect, space-size.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal invariant
violation. All randomness flows from --seed (default 0, never wall clock).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import dataset as D
from . import ensemble as E
from . import evaluation as V
from . import learner as L
from . import rules as R
from .dataset import DataError
from .learner import InternalInvariantError

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the contract reserves 2 for data
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="findrs", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="train a model from a dataset manifest")
    fit.add_argument("--manifest", required=True)
    fit.add_argument("--algo", choices=("findrs", "bo", "bp"), default="findrs")
    fit.add_argument("--tau", type=int, default=None)
    fit.add_argument("--ensemble-size", type=int, default=None, metavar="T")
    fit.add_argument("--seed", type=int, default=0)
    fit.add_argument("--encoding", choices=("av", "oh"), default=None)
    fit.add_argument("--threshold", type=float, default=0.99)
    fit.add_argument("--out", required=True)
    fit.set_defaults(func=cmd_fit)

    predict = sub.add_parser("predict", help="label a CSV of instances with a saved model")
    predict.add_argument("--model", required=True)
    predict.add_argument("--input", required=True)
    predict.add_argument("--no-header", action="store_true")
    predict.add_argument("--labels", choices=("pm", "class"), default="pm")
    predict.add_argument("--format", choices=("text", "json"), default="text")
    predict.add_argument("--out", default=None)
    predict.set_defaults(func=cmd_predict)

    bench = sub.add_parser("benchmark", help="run the repeated-split protocol")
    bench.add_argument("--manifest", required=True,
                       help="a manifest path, or 'all' for every manifest in --manifest-dir")
    bench.add_argument("--manifest-dir", default="manifests")
    bench.add_argument("--algo", choices=("findrs", "bo", "bp"), default="findrs")
    bench.add_argument("--tau", type=int, default=None)
    bench.add_argument("--ensemble-size", type=int, default=None, metavar="T")
    bench.add_argument("--repeats", type=int, default=None)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--train-fraction", type=float, default=0.5)
    bench.add_argument("--encoding", choices=("av", "oh", "both"), default=None)
    bench.add_argument("--threshold", type=float, default=0.99)
    bench.add_argument("--format", choices=("text", "json", "tsv"), default="text")
    bench.add_argument("--out", default=None)
    bench.set_defaults(func=cmd_benchmark)

    curve = sub.add_parser("prune-curve", help="accuracy vs rules kept for a weighted rule set")
    curve.add_argument("--manifest", required=True)
    curve.add_argument("--tau", type=int, default=None)
    curve.add_argument("--ensemble-size", type=int, default=None, metavar="T")
    curve.add_argument("--seed", type=int, default=0)
    curve.add_argument("--train-fraction", type=float, default=0.5)
    curve.add_argument("--encoding", choices=("av", "oh"), default=None)
    curve.add_argument("--threshold", type=float, default=0.99)
    curve.add_argument("--out", default=None)
    curve.set_defaults(func=cmd_prune_curve)

    inspect = sub.add_parser("inspect", help="print a saved model's rules")
    inspect.add_argument("--model", required=True)
    inspect.add_argument("--format", choices=("text", "json"), default="text")
    inspect.set_defaults(func=cmd_inspect)

    space = sub.add_parser("space-size", help="hypothesis-space size for a dataset")
    space.add_argument("--manifest", required=True)
    space.add_argument("--encoding", choices=("av", "oh", "both"), default="both")
    space.add_argument("--format", choices=("text", "json"), default="text")
    space.set_defaults(func=cmd_space_size)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InternalInvariantError as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _concrete_encoding(args, manifest) -> str:
    encoding = args.encoding or manifest.get("encoding", "av")
    if encoding == "both":
        print("note: manifest encoding is 'both'; using av (pass --encoding to override)",
              file=sys.stderr)
        encoding = "av"
    return encoding


# ---------------------------------------------------------------------------
# fit / predict
# ---------------------------------------------------------------------------

def cmd_fit(args) -> int:
    manifest = D.load_manifest(args.manifest)
    encoding = _concrete_encoding(args, manifest)
    ds = D.dataset_from_manifest(manifest, encoding=encoding)
    order = np.random.default_rng(args.seed).permutation(ds.n)
    ds = ds.take(order)
    tau = args.tau if args.tau is not None else int(manifest.get("tau", 0))
    T = args.ensemble_size if args.ensemble_size is not None else int(manifest.get("T", 100))
    P, N = ds.positives, ds.negatives

    if args.algo == "findrs":
        state = L.prune(L.fit_rules(P, N, tau=tau))
        model = L.model_to_dict(state, ds.attributes, encoding,
                                ds.origin_attributes, ds.positive_class)
        print(state.report.summary())
    elif args.algo == "bo":
        ens = E.fit_ensemble(P, N, T=T, tau=tau, master_seed=args.seed)
        model = E.vote_ensemble_to_dict(ens, ds.attributes, encoding,
                                        ds.origin_attributes, ds.positive_class)
        sizes = [len(s.ruleset) for s in ens.states]
        print(f"{T} rule sets fitted; sizes min/median/max = "
              f"{min(sizes)}/{int(np.median(sizes))}/{max(sizes)}")
    else:
        ens = E.fit_ensemble(P, N, T=T, tau=tau, master_seed=args.seed)
        w = E.aggregate_bp(ens)
        if len(w):
            k = E.select_k_by_training_accuracy(w, ds.X, ds.y, args.threshold)
            w = E.prune_top_k(w, k)
        model = E.weighted_rules_to_dict(w, ds.attributes, encoding,
                                         ds.origin_attributes, ds.positive_class)
        print(f"{len(w)} unique rules from {T} runs; "
              f"selected K={w.k} (threshold {args.threshold}), gamma_K={w.gamma:.4f}")

    model["tau"] = tau
    Path(args.out).write_text(json.dumps(model, indent=2, sort_keys=True), encoding="utf-8")
    print(f"model written to {args.out}")
    return EXIT_OK


def _read_prediction_rows(path, attributes, no_header: bool):
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8-sig") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise DataError(f"{path}: file is empty")
    names = [a.name for a in attributes]
    if no_header:
        body = rows
        if any(len(r) != len(names) for r in body):
            raise DataError(f"{path}: rows must have {len(names)} fields (headerless input)")
        return [[cell.strip() for cell in r] for r in body]
    header = [c.strip() for c in rows[0]]
    missing = [n for n in names if n not in header]
    if missing:
        raise DataError(f"{path}: header is missing model attributes {missing}")
    take = [header.index(n) for n in names]
    out = []
    for i, r in enumerate(rows[1:], start=2):
        if len(r) != len(header):
            raise DataError(f"{path}: ragged row {i}: {len(r)} fields, expected {len(header)}")
        out.append([r[j].strip() for j in take])
    return out


def cmd_predict(args) -> int:
    path = Path(args.model)
    if not path.exists():
        raise DataError(f"no such model file: {path}")
    try:
        model = json.loads(path.read_text(encoding="utf-8"))
        kind = model["model"]
        attrs, origin, positive = L.attribute_map_from_dict(model["attribute_map"])
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise DataError(f"{path}: corrupt model file ({exc})") from exc

    raw_attrs = origin if origin is not None else attrs
    raw_rows = _read_prediction_rows(args.input, raw_attrs, args.no_header)
    codes = D.intern_rows(raw_rows, raw_attrs)
    if origin is not None:
        codes = D.oh_expand(codes, origin)

    if kind == "findrs":
        ruleset = [R.rule_from_values(v, attrs) for v in model["rules"]]
        pm = L.predict_rows(ruleset, codes)
    elif kind == "bo":
        rulesets = [[R.rule_from_values(v, attrs) for v in rs] for rs in model["rulesets"]]
        votes = np.zeros(codes.shape[0], dtype=np.int64)
        for rs in rulesets:
            votes += L.predict_rows(rs, codes)
        pm = np.where(votes > 0, 1, -1)
    elif kind == "bp":
        w, attrs, origin, positive = E.weighted_rules_from_dict(model)
        pm = E.predict_bp(w, codes)
    else:
        raise DataError(f"{path}: unknown model kind {kind!r}")

    if args.labels == "class" and positive is not None:
        rendered = [str(positive) if v == 1 else f"not-{positive}" for v in pm]
    else:
        rendered = ["+" if v == 1 else "-" for v in pm]
    if args.format == "json":
        _emit(json.dumps(rendered) + "\n", args.out)
    else:
        _emit("".join(f"{v}\n" for v in rendered), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# benchmark / prune-curve
# ---------------------------------------------------------------------------

def _benchmark_one(manifest, args) -> V.Report:
    common = dict(
        manifest=manifest,
        algorithm=args.algo,
        tau=args.tau,
        T=args.ensemble_size,
        repeats=args.repeats,
        train_fraction=args.train_fraction,
        base_seed=args.seed,
        threshold=args.threshold,
        discretize_fit=manifest.get("discretize_fit", "full"),
    )
    encoding = args.encoding or manifest.get("encoding", "av")
    if encoding == "both":
        return V.best_encoding_reports(
            V.ExperimentConfig(encoding="av", **common),
            V.ExperimentConfig(encoding="oh", **common),
        )
    return V.run_experiment(V.ExperimentConfig(encoding=encoding, **common))


def cmd_benchmark(args) -> int:
    if args.manifest == "all":
        manifest_dir = Path(args.manifest_dir)
        paths = sorted(manifest_dir.glob("*.json"))
        if not paths:
            raise DataError(f"no manifests found in {manifest_dir}")
    else:
        paths = [Path(args.manifest)]

    reports: list[V.Report] = []
    failures = []
    for p in paths:
        try:
            manifest = D.load_manifest(p)
            report = _benchmark_one(manifest, args)
            reports.append(report)
            print(f"done: {report.dataset} [{report.algorithm}/{report.encoding}] "
                  f"in {report.total_wall_clock:.1f}s", file=sys.stderr)
        except DataError as exc:
            failures.append((p, str(exc)))
            print(f"failed: {p}: {exc}", file=sys.stderr)

    if reports:
        if args.format == "json":
            payload = [r.to_dict() for r in reports]
            _emit(json.dumps(payload[0] if len(payload) == 1 else payload,
                             indent=2, sort_keys=True) + "\n", args.out)
        elif args.format == "tsv":
            lines = ["dataset\talgorithm\tencoding\ttau\tT\tf1_mean\tf1_std\tacc_mean\tacc_std"]
            for r in reports:
                lines.append(
                    f"{r.dataset}\t{r.algorithm}\t{r.encoding}\t{r.tau}\t{r.T}"
                    f"\t{r.f1_mean:.6f}\t{r.f1_std:.6f}"
                    f"\t{r.accuracy_mean:.6f}\t{r.accuracy_std:.6f}"
                )
            _emit("\n".join(lines) + "\n", args.out)
        else:
            _emit(V.format_report_table(reports), args.out)
    if failures:
        return EXIT_DATA
    return EXIT_OK


def cmd_prune_curve(args) -> int:
    manifest = D.load_manifest(args.manifest)
    encoding = _concrete_encoding(args, manifest)
    ds = D.dataset_from_manifest(manifest, encoding=encoding)
    train, test = D.split(ds, D.SplitSpec(args.train_fraction, args.seed))
    tau = args.tau if args.tau is not None else int(manifest.get("tau", 0))
    T = args.ensemble_size if args.ensemble_size is not None else int(manifest.get("T", 100))
    ens = E.fit_ensemble(train.positives, train.negatives, T=T, tau=tau,
                         master_seed=args.seed)
    w = E.aggregate_bp(ens)
    if not len(w):
        raise DataError("the ensemble discovered no rules (no positives?)")
    points, selected = V.prune_curve(w, train.X, train.y, test.X, test.y, args.threshold)
    _emit(V.prune_curve_tsv(points), args.out)
    print(f"selected K={selected} of {len(w)} at threshold {args.threshold} "
          f"(train acc {points[selected - 1][1]:.4f}, test acc {points[selected - 1][2]:.4f})",
          file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# inspect / space-size
# ---------------------------------------------------------------------------

def cmd_inspect(args) -> int:
    path = Path(args.model)
    if not path.exists():
        raise DataError(f"no such model file: {path}")
    try:
        model = json.loads(path.read_text(encoding="utf-8"))
        kind = model["model"]
        attrs, _origin, _positive = L.attribute_map_from_dict(model["attribute_map"])
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise DataError(f"{path}: corrupt model file ({exc})") from exc

    if args.format == "json":
        print(json.dumps(model, indent=2, sort_keys=True))
        return EXIT_OK

    if kind == "findrs":
        rules = [R.rule_from_values(v, attrs) for v in model["rules"]]
        if not rules:
            print("0 rules (always predicts negative)")
            return EXIT_OK
        print(f"{len(rules)} rules (tau={model.get('tau', 0)}):")
        for rule in rules:
            print(R.rule_to_text(rule, attrs))
    elif kind == "bp":
        w, attrs, _o, _p = E.weighted_rules_from_dict(model)
        if not len(w):
            print("0 rules (always predicts negative)")
            return EXIT_OK
        print(f"{len(w)} unique rules from T={w.T} runs; "
              f"active K={w.k}, gamma_K={w.gamma:.4f}:")
        for pos, idx in enumerate(w.ranking):
            marker = " " if pos < w.k else "x"
            print(f"{marker} [α={int(w.alphas[idx])}] {R.rule_to_text(w.rules[idx], attrs)}")
        if w.k < len(w):
            print(f"(rules marked 'x' are pruned at K={w.k})")
    elif kind == "bo":
        rulesets = model["rulesets"]
        if not rulesets:
            print("0 rule sets (always predicts negative)")
            return EXIT_OK
        print(f"vote of {len(rulesets)} rule sets:")
        for t, rs in enumerate(rulesets):
            print(f"hypothesis {t} ({len(rs)} rules):")
            for v in rs:
                print("  " + R.rule_to_text(R.rule_from_values(v, attrs), attrs))
    else:
        raise DataError(f"{path}: unknown model kind {kind!r}")
    return EXIT_OK


def cmd_space_size(args) -> int:
    manifest = D.load_manifest(args.manifest)
    ds = D.dataset_from_manifest(manifest, encoding="av")
    sizes = ds.domain_sizes()
    encodings = ("av", "oh") if args.encoding == "both" else (args.encoding,)
    payload = {}
    for enc in encodings:
        terms, total = R.hypothesis_space_size(sizes, enc)
        payload[enc] = {"per_attribute": terms, "total_rules": total}
    if args.format == "json":
        print(json.dumps({"attributes": [a.name for a in ds.attributes],
                          "domain_sizes": sizes, **payload}, indent=2, sort_keys=True))
        return EXIT_OK
    print(f"{len(sizes)} attributes, domain sizes {sizes}")
    for enc, info in payload.items():
        print(f"{enc}: per-attribute terms {info['per_attribute']}")
        print(f"{enc}: total conjunctive rules = {info['total_rules']}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
