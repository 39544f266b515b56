"""Greedy bottom-up induction of monotone-DNF rule sets.

The learner keeps an ordered rule list and, per rule, the bucket of positive
instances it was generalized from; each rule is always the most specific
conjunction covering its bucket. A positive example is offered to the rules in
creation order and accepted by the first whose least generalization stays
within the negative-coverage tolerance; otherwise the example seeds a new
maximally specific rule. A post-fit prune drops rules whose whole bucket is
re-covered by the remaining rules.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError

from . import rules as R
from . import dataset as D
from ._validation import check_instances, check_matching_arity, resolve_classes


class InternalInvariantError(AssertionError):
    """A learner invariant failed; indicates a bug, not bad input."""


@dataclass
class FitReport:
    """Counters describing one fit: sizes before/after pruning plus anomalies."""

    rules_before_prune: int
    rules_after_prune: int | None
    iterations: int
    contradictions: int
    bucket_sizes: tuple[int, ...]
    negative_coverage: tuple[int, ...]

    def summary(self) -> str:
        after = self.rules_after_prune
        lines = [
            f"rules: {self.rules_before_prune} before prune"
            + (f", {after} after" if after is not None else " (not pruned)"),
            f"positives processed: {self.iterations}",
            f"bucket sizes: {list(self.bucket_sizes)}",
            f"negatives covered per rule: {list(self.negative_coverage)}",
        ]
        if self.contradictions:
            lines.append(
                f"warning: {self.contradictions} positive(s) formed rules whose "
                f"negative coverage exceeds tau (contradictory duplicates)"
            )
        return "\n".join(lines)


@dataclass
class LearnerState:
    """Rule list plus per-rule buckets and negative-coverage counts.

    ``buckets[i]`` holds indices into ``P`` (presentation order) of the
    positives that built ``ruleset[i]``. Treat instances of this class as
    immutable once returned by :func:`fit_rules` or :func:`prune`.
    """

    ruleset: list[np.ndarray]
    buckets: list[list[int]]
    neg_counts: list[int]
    P: np.ndarray
    N: np.ndarray
    tau: int
    report: FitReport

    @property
    def m(self) -> int:
        return self.P.shape[1]

    def bucket_rows(self, i: int) -> np.ndarray:
        return self.P[np.asarray(self.buckets[i], dtype=np.intp)]


class _NegativeMatcher:
    """Bit-packed equality masks against the negative set for fast coverage counts."""

    def __init__(self, N: np.ndarray):
        self.N = N
        self.n = N.shape[0]

    def counts_for(self, p: np.ndarray):
        """Pack per-column agreement of every negative with instance ``p``.

        Returns a closure mapping a constrained-column index array to the
        number of negatives matching ``p`` on all those columns.
        """
        if self.n == 0:
            return lambda idx: 0
        packed = np.packbits(self.N == p, axis=0)  # (words, m)

        def count(idx: np.ndarray) -> int:
            if idx.size == 0:
                return self.n
            words = np.bitwise_and.reduce(packed[:, idx], axis=1)
            # packbits pads the tail with zero bits, so no mask-off is needed
            return int(np.bitwise_count(words).sum())

        return count


def fit_rules(
    P: np.ndarray,
    N: np.ndarray,
    tau: int = 0,
    check_every_step: bool = False,
) -> LearnerState:
    """Run the greedy bottom-up pass over positives in their given order.

    Each positive is offered to the rules in creation order; the first rule
    whose least generalization to cover it leaves at most ``tau`` covered
    negatives absorbs it. Otherwise the positive becomes a new singleton rule
    (always added; if even the singleton covers more than ``tau`` negatives,
    which takes contradictory duplicates, the event is counted in the report).

    With ``tau=0`` and no contradictory examples the returned rule set
    classifies every training instance correctly.
    """
    P = check_instances(P, "P")
    N = check_instances(N, "N", n_cols=P.shape[1] if P.size else None)
    if tau < 0:
        raise ValueError(f"tau must be non-negative, got {tau}")
    matcher = _NegativeMatcher(N)

    ruleset: list[np.ndarray] = []
    buckets: list[list[int]] = []
    neg_counts: list[int] = []
    contradictions = 0

    for t in range(P.shape[0]):
        p = P[t]
        count_matching = matcher.counts_for(p)
        placed = False
        for i, rule in enumerate(ruleset):
            keep = (rule != R.ANY) & (rule == p)
            if np.array_equal(keep, rule != R.ANY):
                # rule already covers p; coverage count is unchanged
                if neg_counts[i] <= tau:
                    buckets[i].append(t)
                    placed = True
                    break
                continue
            covered = count_matching(np.flatnonzero(keep))
            if covered <= tau:
                new_rule = np.where(keep, rule, R.ANY).astype(rule.dtype)
                ruleset[i] = new_rule
                neg_counts[i] = covered
                buckets[i].append(t)
                placed = True
                break
        if not placed:
            singleton = p.astype(R._RULE_DTYPE).copy()
            covered = count_matching(np.arange(P.shape[1]))
            if covered > tau:
                contradictions += 1
            ruleset.append(singleton)
            buckets.append([t])
            neg_counts.append(covered)
        if check_every_step:
            partial = LearnerState(
                ruleset, buckets, neg_counts, P, N, tau,
                _make_report(ruleset, buckets, neg_counts, t + 1, contradictions),
            )
            if not check_prop1(partial):
                raise InternalInvariantError(
                    f"backward-incompatibility invariant broken after positive {t}"
                )

    report = _make_report(ruleset, buckets, neg_counts, P.shape[0], contradictions)
    return LearnerState(ruleset, buckets, neg_counts, P, N, tau, report)


def _make_report(ruleset, buckets, neg_counts, iterations, contradictions,
                 after=None) -> FitReport:
    return FitReport(
        rules_before_prune=len(ruleset) if after is None else after[0],
        rules_after_prune=None if after is None else len(ruleset),
        iterations=iterations,
        contradictions=contradictions,
        bucket_sizes=tuple(len(b) for b in buckets),
        negative_coverage=tuple(neg_counts),
    )


def prune(state: LearnerState) -> LearnerState:
    """Drop rules whose entire bucket is covered by the other remaining rules.

    Scans in creation order and iterates to a fixpoint. An absorbed bucket's
    instances are appended to the bucket of the first remaining rule covering
    them, which cannot change that rule (it already covers them) nor its
    negative-coverage count. The result still covers every positive.
    """
    ruleset = [r.copy() for r in state.ruleset]
    buckets = [list(b) for b in state.buckets]
    neg_counts = list(state.neg_counts)
    before = state.report.rules_before_prune

    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(ruleset):
            bucket_rows = state.P[np.asarray(buckets[i], dtype=np.intp)]
            covered_by = np.zeros((bucket_rows.shape[0], len(ruleset)), dtype=bool)
            for j, other in enumerate(ruleset):
                if j != i:
                    covered_by[:, j] = R.covers_rows(other, bucket_rows)
            if covered_by.any(axis=1).all() and len(ruleset) > 1:
                targets = covered_by.argmax(axis=1)  # first covering rule, in order
                for row, j in zip(buckets[i], targets):
                    buckets[j].append(row)
                del ruleset[i], buckets[i], neg_counts[i]
                changed = True
            else:
                i += 1

    report = _make_report(
        ruleset, buckets, neg_counts,
        state.report.iterations, state.report.contradictions, after=(before,),
    )
    return LearnerState(ruleset, buckets, neg_counts, state.P, state.N, state.tau, report)


def check_prop1(state: LearnerState) -> bool:
    """True iff no earlier rule covers any instance of a later rule's bucket."""
    for i in range(1, len(state.ruleset)):
        rows = state.bucket_rows(i)
        for j in range(i):
            if R.covers_rows(state.ruleset[j], rows).any():
                return False
    return True


def check_bucket_coherence(state: LearnerState) -> bool:
    """True iff every rule equals the least generalization of its bucket."""
    return all(
        np.array_equal(rule, R.least_generalization(state.bucket_rows(i)))
        for i, rule in enumerate(state.ruleset)
    )


def predict_rows(ruleset: Sequence[np.ndarray], X: np.ndarray) -> np.ndarray:
    """Labels in {-1, +1}: +1 iff some rule covers the row."""
    return np.where(R.ruleset_covers_rows(ruleset, X), 1, -1).astype(np.int8)


# ---------------------------------------------------------------------------
# model serialization
# ---------------------------------------------------------------------------

def attribute_map_to_dict(attributes, origin_attributes=None, positive_class=None) -> dict:
    def one(a):
        d = {"name": a.name, "values": list(a.values)}
        if a.oh_origin is not None:
            d["oh_origin"] = list(a.oh_origin)
        return d

    out = {"attributes": [one(a) for a in attributes]}
    if origin_attributes is not None:
        out["origin"] = [one(a) for a in origin_attributes]
    if positive_class is not None:
        out["positive_class"] = positive_class
    return out


def attribute_map_from_dict(d) -> tuple[tuple, tuple | None, object]:
    def one(a):
        return D.Attribute(
            name=a["name"],
            values=tuple(a["values"]),
            oh_origin=tuple(a["oh_origin"]) if a.get("oh_origin") else None,
        )

    attrs = tuple(one(a) for a in d["attributes"])
    origin = tuple(one(a) for a in d["origin"]) if d.get("origin") else None
    return attrs, origin, d.get("positive_class")


def model_to_dict(state: LearnerState, attributes, encoding: str,
                  origin_attributes=None, positive_class=None) -> dict:
    return {
        "model": "findrs",
        "encoding": encoding,
        "attribute_map": attribute_map_to_dict(attributes, origin_attributes, positive_class),
        "rules": [R.rule_to_values(r, attributes) for r in state.ruleset],
        "tau": state.tau,
        "bucket_sizes": list(state.report.bucket_sizes),
    }


def ruleset_from_dict(d: dict) -> tuple[list[np.ndarray], tuple, tuple | None, object]:
    attrs, origin, positive = attribute_map_from_dict(d["attribute_map"])
    ruleset = [R.rule_from_values(v, attrs) for v in d["rules"]]
    return ruleset, attrs, origin, positive


# ---------------------------------------------------------------------------
# estimator
# ---------------------------------------------------------------------------

def prepare_training_data(X, y, encoding: str):
    """Intern raw categorical X/y for the core learner.

    Returns (attributes, origin_attributes, X_codes, y_pm, classes) where
    ``attributes`` describe the (possibly one-hot) learning space and
    ``origin_attributes`` the raw columns when one-hot encoding is applied.
    """
    X = np.asarray(X, dtype=object)
    if X.ndim != 2:
        raise ValueError("X must be a 2d array of categorical values")
    y = np.asarray(y).ravel()
    if len(y) != X.shape[0]:
        raise ValueError(f"X has {X.shape[0]} rows but y has {len(y)}")
    classes, y_pm = resolve_classes(y)
    attrs = tuple(
        D.Attribute(name=f"x{j}", values=tuple(sorted(set(X[:, j].tolist()), key=repr)))
        for j in range(X.shape[1])
    )
    codes = D.intern_rows(X.tolist(), attrs)
    ds = D.Dataset(attributes=attrs, X=codes, y=y_pm, encoding="av")
    encoding = encoding.lower()
    if encoding not in ("av", "oh"):
        raise ValueError(f"unknown encoding {encoding!r}")
    if encoding == "oh":
        ds = D.encode(ds, "oh")
        return ds.attributes, attrs, ds.X, y_pm, classes
    return attrs, None, ds.X, y_pm, classes


def encode_prediction_rows(X, attributes, origin_attributes):
    """Intern (and one-hot expand, if fitted that way) rows for prediction."""
    X = np.asarray(X, dtype=object)
    if X.ndim != 2:
        raise ValueError("X must be a 2d array of categorical values")
    raw_attrs = origin_attributes if origin_attributes is not None else attributes
    codes = D.intern_rows(X.tolist(), raw_attrs)
    if origin_attributes is not None:
        codes = D.oh_expand(codes, origin_attributes)
    return codes


class FindRSClassifier(ClassifierMixin, BaseEstimator):
    """Bottom-up monotone-DNF rule-set classifier for categorical features.

    Learns an ordered disjunction of conjunctive rules that covers the
    positive class. Positives are consumed in row order, so shuffle the
    training set beforehand if the source ordering is meaningful.

    Parameters
    ----------
    tau : int, default 0
        Maximum number of training negatives any single rule may cover.
    encoding : {"av", "oh"}, default "av"
        Learn over raw attribute values, or over their one-hot expansion
        (which admits negated conditions in the learned rules).
    prune : bool, default True
        Drop rules re-covered by the rest of the set after fitting.

    Attributes
    ----------
    classes_ : ndarray of shape (2,). ``classes_[1]`` is the positive class.
    rules_ : list of learned rule vectors (wildcard slots hold -1).
    state_ : the full learner state (rules, buckets, coverage counts).
    report_ : FitReport for the fit.
    """

    def __init__(self, tau: int = 0, encoding: str = "av", prune: bool = True):
        self.tau = tau
        self.encoding = encoding
        self.prune = prune

    def fit(self, X, y):
        attrs, origin, codes, y_pm, classes = prepare_training_data(X, y, self.encoding)
        self.classes_ = classes
        self.attributes_ = attrs
        self.origin_attributes_ = origin
        self.n_features_in_ = len(origin) if origin is not None else len(attrs)
        P = codes[y_pm == 1]
        N = codes[y_pm == -1]
        state = fit_rules(P, N, tau=self.tau)
        if self.prune:
            state = prune(state)
        self.state_ = state
        self.rules_ = state.ruleset
        self.report_ = state.report
        return self

    def predict(self, X):
        self._check_fitted()
        codes = encode_prediction_rows(X, self.attributes_, self.origin_attributes_)
        check_matching_arity(codes, len(self.attributes_))
        labels = predict_rows(self.rules_, codes)
        return np.where(labels == 1, self.classes_[1], self.classes_[0])

    def rule_strings(self) -> list[str]:
        self._check_fitted()
        return [R.rule_to_text(r, self.attributes_) for r in self.rules_]

    def _check_fitted(self):
        if not hasattr(self, "state_"):
            raise NotFittedError("this FindRSClassifier instance is not fitted yet")
