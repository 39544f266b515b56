"""Aggregation of repeated learner runs.

Two aggregates are built from T runs over shuffled presentations of the same
training set: a majority vote over the T rule sets, and a single weighted
rule set in which each unique rule carries the number of runs that discovered
it. The weighted form stays interpretable and supports dropping low-weight
rules, with the decision threshold rescaled by the retained weight fraction.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError

from . import rules as R
from .learner import (
    LearnerState,
    encode_prediction_rows,
    fit_rules,
    predict_rows,
    prepare_training_data,
    prune,
)
from ._validation import check_instances, check_matching_arity


def shuffle_seed(master_seed: int, t: int) -> int:
    """Deterministic per-run shuffle seed mixed from (master seed, run index)."""
    return int(np.random.SeedSequence(entropy=(int(master_seed), int(t))).generate_state(1)[0])


@dataclass
class VoteEnsemble:
    """T pruned learner states plus the shuffle seeds that produced them."""

    states: list[LearnerState]
    seeds: tuple[int, ...]
    tau: int
    m: int

    @property
    def T(self) -> int:
        return len(self.states)


def fit_ensemble(
    P: np.ndarray,
    N: np.ndarray,
    T: int,
    tau: int = 0,
    master_seed: int = 0,
) -> VoteEnsemble:
    """Fit T rule sets, run t seeing the positives in a seeded shuffled order.

    The negative set is order-irrelevant and passed through unshuffled. Each
    run is pruned. Fully reproducible given the master seed.
    """
    if T < 1:
        raise ValueError(f"ensemble size must be >= 1, got {T}")
    P = check_instances(P, "P")
    N = check_instances(N, "N", n_cols=P.shape[1] if P.size else None)
    states = []
    seeds = []
    for t in range(T):
        seed = shuffle_seed(master_seed, t)
        order = np.random.default_rng(seed).permutation(P.shape[0])
        states.append(prune(fit_rules(P[order], N, tau=tau)))
        seeds.append(seed)
    return VoteEnsemble(states=states, seeds=tuple(seeds), tau=tau, m=P.shape[1])


def predict_bo(ensemble: VoteEnsemble, X: np.ndarray) -> np.ndarray:
    """Majority vote of the T rule sets; a tied vote resolves to -1."""
    X = check_instances(X, "X", n_cols=ensemble.m)
    votes = np.zeros(X.shape[0], dtype=np.int64)
    for state in ensemble.states:
        votes += predict_rows(state.ruleset, X)
    return np.where(votes > 0, 1, -1).astype(np.int8)


@dataclass
class WeightedRuleSet:
    """Unique rules with discovery counts and an active top-K prefix.

    ``rules``/``alphas`` are in first-discovery order; ``ranking`` sorts them
    by weight (descending, discovery order breaking ties). ``k`` rules of that
    ranking are active; an instance is positive iff the total weight of active
    rules covering it strictly exceeds ``gamma * T / 2`` where ``gamma`` is
    the fraction of total weight the active rules retain. With ``k`` equal to
    the full size this is exactly the "more than T/2 of all discovered rules"
    vote.
    """

    rules: tuple[np.ndarray, ...]
    alphas: np.ndarray
    T: int
    k: int
    m: int

    def __post_init__(self):
        if self.k > len(self.rules) or (self.rules and self.k < 1):
            raise ValueError(f"k must be in [1, {len(self.rules)}], got {self.k}")

    @property
    def ranking(self) -> np.ndarray:
        return np.argsort(-self.alphas, kind="stable")

    @property
    def gamma(self) -> float:
        total = int(self.alphas.sum())
        if total == 0:
            return 1.0
        active = int(self.alphas[self.ranking[: self.k]].sum())
        return active / total

    def __len__(self) -> int:
        return len(self.rules)


def aggregate_bp(ensemble: VoteEnsemble) -> WeightedRuleSet:
    """Pool the T rule sets into unique rules weighted by discovery count."""
    seen: dict[bytes, int] = {}
    rules: list[np.ndarray] = []
    alphas: list[int] = []
    for state in ensemble.states:
        for rule in state.ruleset:
            key = rule.tobytes()
            idx = seen.get(key)
            if idx is None:
                seen[key] = len(rules)
                rules.append(rule.copy())
                alphas.append(1)
            else:
                alphas[idx] += 1
    return WeightedRuleSet(
        rules=tuple(rules),
        alphas=np.asarray(alphas, dtype=np.int64),
        T=ensemble.T,
        k=len(rules),
        m=ensemble.m,
    )


def prune_top_k(w: WeightedRuleSet, k: int) -> WeightedRuleSet:
    """Keep the k highest-weight rules active; reversible (rules are retained)."""
    if not 1 <= k <= len(w):
        raise ValueError(f"k must be in [1, {len(w)}], got {k}")
    return replace(w, k=k)


def coverage_matrix(w: WeightedRuleSet, X: np.ndarray) -> np.ndarray:
    """(n, |G|) coverage booleans with columns in ranking order."""
    X = check_instances(X, "X", n_cols=w.m)
    C = np.zeros((X.shape[0], len(w)), dtype=bool)
    for pos, idx in enumerate(w.ranking):
        C[:, pos] = R.covers_rows(w.rules[idx], X)
    return C


def predict_bp(w: WeightedRuleSet, X: np.ndarray) -> np.ndarray:
    """Weighted-coverage vote over the active rules; ties resolve to -1."""
    X = check_instances(X, "X", n_cols=w.m)
    if len(w) == 0:
        return np.full(X.shape[0], -1, dtype=np.int8)
    active = w.ranking[: w.k]
    scores = np.zeros(X.shape[0], dtype=np.int64)
    for idx in active:
        scores += w.alphas[idx] * R.covers_rows(w.rules[idx], X)
    return np.where(scores > w.gamma * w.T / 2.0, 1, -1).astype(np.int8)


def accuracy_by_k(w: WeightedRuleSet, X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Accuracy of the top-K decision for every K in 1..|G|, in one pass.

    Rule coverage is evaluated once per instance; running score sums and
    per-K thresholds come from prefix sums over the ranking.
    """
    if len(w) == 0:
        raise ValueError("empty rule set")
    C = coverage_matrix(w, X)
    ranked_alphas = w.alphas[w.ranking].astype(np.int64)
    cum_scores = np.cumsum(C * ranked_alphas, axis=1)
    gamma_k = np.cumsum(ranked_alphas) / ranked_alphas.sum()
    preds = cum_scores > gamma_k * (w.T / 2.0)
    actual = np.asarray(y).ravel() == 1
    return (preds == actual[:, None]).mean(axis=0)


def select_k_by_training_accuracy(
    w: WeightedRuleSet, X: np.ndarray, y: np.ndarray, threshold: float = 0.99
) -> int:
    """Smallest K whose training accuracy reaches threshold * full accuracy.

    Training accuracy is not monotone in K, so every K is scanned in order.
    """
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    accs = accuracy_by_k(w, X, y)
    full = accs[-1]
    return int(np.flatnonzero(accs >= threshold * full)[0]) + 1


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def weighted_rules_to_dict(w: WeightedRuleSet, attributes, encoding: str,
                           origin_attributes=None, positive_class=None) -> dict:
    from .learner import attribute_map_to_dict

    return {
        "model": "bp",
        "encoding": encoding,
        "attribute_map": attribute_map_to_dict(attributes, origin_attributes, positive_class),
        "rules": [R.rule_to_values(r, attributes) for r in w.rules],
        "alphas": [int(a) for a in w.alphas],
        "T": w.T,
        "K": w.k,
        "gamma_K": w.gamma,
    }


def weighted_rules_from_dict(d: dict) -> tuple[WeightedRuleSet, tuple, tuple | None, object]:
    from .learner import attribute_map_from_dict

    attrs, origin, positive = attribute_map_from_dict(d["attribute_map"])
    rules = tuple(R.rule_from_values(v, attrs) for v in d["rules"])
    w = WeightedRuleSet(
        rules=rules,
        alphas=np.asarray(d["alphas"], dtype=np.int64),
        T=int(d["T"]),
        k=int(d["K"]),
        m=len(attrs),
    )
    return w, attrs, origin, positive


def vote_ensemble_to_dict(ensemble: VoteEnsemble, attributes, encoding: str,
                          origin_attributes=None, positive_class=None) -> dict:
    from .learner import attribute_map_to_dict

    return {
        "model": "bo",
        "encoding": encoding,
        "attribute_map": attribute_map_to_dict(attributes, origin_attributes, positive_class),
        "tau": ensemble.tau,
        "T": ensemble.T,
        "seeds": list(ensemble.seeds),
        "rulesets": [
            [R.rule_to_values(r, attributes) for r in state.ruleset]
            for state in ensemble.states
        ],
    }


# ---------------------------------------------------------------------------
# estimators
# ---------------------------------------------------------------------------

class _EnsembleBase(ClassifierMixin, BaseEstimator):
    def _fit_ensemble(self, X, y):
        attrs, origin, codes, y_pm, classes = prepare_training_data(X, y, self.encoding)
        self.classes_ = classes
        self.attributes_ = attrs
        self.origin_attributes_ = origin
        self.n_features_in_ = len(origin) if origin is not None else len(attrs)
        seed = 0 if self.random_state is None else int(self.random_state)
        ensemble = fit_ensemble(
            codes[y_pm == 1], codes[y_pm == -1],
            T=self.T, tau=self.tau, master_seed=seed,
        )
        self.ensemble_ = ensemble
        self._train_codes = codes
        self._train_y = y_pm
        return ensemble

    def _codes(self, X):
        self._check_fitted()
        codes = encode_prediction_rows(X, self.attributes_, self.origin_attributes_)
        check_matching_arity(codes, len(self.attributes_))
        return codes

    def _labels(self, pm: np.ndarray):
        return np.where(pm == 1, self.classes_[1], self.classes_[0])

    def _check_fitted(self):
        if not hasattr(self, "ensemble_"):
            raise NotFittedError(f"this {type(self).__name__} instance is not fitted yet")


class FindRSVoteClassifier(_EnsembleBase):
    """Majority vote over T bottom-up rule-set learners.

    Each of the T runs sees the positives in a different seeded shuffle;
    prediction is the sign of the vote sum (a tie predicts the negative
    class). More accurate than a single run but no longer a single readable
    rule set; see :class:`FindRSBayesPointClassifier` for the interpretable
    aggregate.
    """

    def __init__(self, T: int = 100, tau: int = 0, encoding: str = "av",
                 random_state: int | None = 0):
        self.T = T
        self.tau = tau
        self.encoding = encoding
        self.random_state = random_state

    def fit(self, X, y):
        self._fit_ensemble(X, y)
        return self

    def predict(self, X):
        codes = self._codes(X)
        return self._labels(predict_bo(self.ensemble_, codes))


class FindRSBayesPointClassifier(_EnsembleBase):
    """Weighted rule set pooled from T bottom-up rule-set learners.

    Unique rules across the T runs are weighted by how many runs discovered
    them; an instance is positive when the covering weight exceeds half the
    (retained) total. The weights order rules by importance, so the set can
    be pruned to its top K rules.

    Parameters
    ----------
    T, tau, encoding, random_state : as in :class:`FindRSVoteClassifier`.
    select_threshold : float or None, default None
        When set (e.g. 0.99), after fitting keep the smallest top-K prefix
        whose training accuracy is at least ``select_threshold`` times the
        unpruned training accuracy.
    """

    def __init__(self, T: int = 100, tau: int = 0, encoding: str = "av",
                 select_threshold: float | None = None,
                 random_state: int | None = 0):
        self.T = T
        self.tau = tau
        self.encoding = encoding
        self.select_threshold = select_threshold
        self.random_state = random_state

    def fit(self, X, y):
        ensemble = self._fit_ensemble(X, y)
        w = aggregate_bp(ensemble)
        if self.select_threshold is not None and len(w):
            k = select_k_by_training_accuracy(
                w, self._train_codes, self._train_y, self.select_threshold
            )
            w = prune_top_k(w, k)
        self.weighted_rules_ = w
        self.selected_k_ = w.k
        return self

    def predict(self, X):
        codes = self._codes(X)
        return self._labels(predict_bp(self.weighted_rules_, codes))

    def set_active_rules(self, k: int) -> "FindRSBayesPointClassifier":
        """Re-prune to the top k rules; reversible, no refit needed."""
        self._check_fitted()
        self.weighted_rules_ = prune_top_k(self.weighted_rules_, k)
        self.selected_k_ = k
        return self

    def rule_strings(self) -> list[str]:
        """Rules in weight order, annotated with their vote counts."""
        self._check_fitted()
        w = self.weighted_rules_
        return [
            f"[α={int(w.alphas[idx])}] {R.rule_to_text(w.rules[idx], self.attributes_)}"
            for idx in w.ranking
        ]
