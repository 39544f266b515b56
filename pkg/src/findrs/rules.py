"""Conjunctive rules over categorical attribute vectors.

A rule is a dense integer vector with one slot per attribute: slot j holds an
interned value code (>= 0) that instance values must equal, or ``ANY`` (-1)
meaning the attribute is unconstrained. A rule set is an ordered list of such
vectors and is read as a disjunction (monotone DNF): it covers an instance iff
at least one rule does.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

ANY = -1

_RULE_DTYPE = np.int32


def as_rule(values: Iterable[int]) -> np.ndarray:
    """Build a rule vector from value codes, with ``None`` or ANY as wildcards."""
    out = np.asarray([ANY if v is None else v for v in values], dtype=_RULE_DTYPE)
    if out.ndim != 1:
        raise ValueError("a rule must be a flat vector of constraints")
    return out


def _check_lengths(a, b) -> None:
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")


def covers(rule: np.ndarray, x: Sequence[int]) -> bool:
    """True iff every constrained slot of ``rule`` equals the instance value."""
    rule = np.asarray(rule)
    x = np.asarray(x)
    _check_lengths(rule, x)
    return bool(np.all((rule == ANY) | (rule == x)))


def covers_set(rules: Sequence[np.ndarray], x: Sequence[int]) -> bool:
    """Disjunction of :func:`covers` over the rule set; empty set covers nothing."""
    return any(covers(r, x) for r in rules)


def covers_rows(rule: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Vectorized coverage of one rule over an (n, m) instance matrix."""
    rule = np.asarray(rule)
    if X.shape[1] != rule.shape[0]:
        raise ValueError(f"length mismatch: {rule.shape[0]} vs {X.shape[1]}")
    idx = np.flatnonzero(rule != ANY)
    if idx.size == 0:
        return np.ones(X.shape[0], dtype=bool)
    return (X[:, idx] == rule[idx]).all(axis=1)


def ruleset_covers_rows(rules: Sequence[np.ndarray], X: np.ndarray) -> np.ndarray:
    """Per-row coverage of an ordered rule set (OR over rules)."""
    out = np.zeros(X.shape[0], dtype=bool)
    for r in rules:
        out |= covers_rows(r, X)
    return out


def generalize(rule: np.ndarray, x: Sequence[int]) -> np.ndarray:
    """Least generalization of ``rule`` that covers ``x``.

    Slots whose constraint disagrees with ``x`` become ANY; everything else is
    kept. The result always covers ``x``, and equals ``rule`` when ``rule``
    already covers ``x``.
    """
    rule = np.asarray(rule, dtype=_RULE_DTYPE)
    x = np.asarray(x)
    _check_lengths(rule, x)
    out = rule.copy()
    out[(rule != ANY) & (rule != x)] = ANY
    return out


def more_general(r1: np.ndarray, r2: np.ndarray) -> bool:
    """True iff r1 covers everything r2 covers (syntactic test).

    Holds iff at every slot r1 is ANY, or r2 is constrained to the same value.
    For satisfiable conjunctions over a shared attribute basis this syntactic
    test coincides with the semantic (all-instances) definition, except on
    degenerate single-value domains where a constrained slot and a wildcard
    cover the same instances.
    """
    r1 = np.asarray(r1)
    r2 = np.asarray(r2)
    _check_lengths(r1, r2)
    return bool(np.all((r1 == ANY) | ((r2 != ANY) & (r1 == r2))))


def least_generalization(instances: np.ndarray) -> np.ndarray:
    """Most specific rule covering every row: slot j constrained iff all rows agree."""
    instances = np.asarray(instances, dtype=_RULE_DTYPE)
    if instances.ndim != 2 or instances.shape[0] == 0:
        raise ValueError("need a non-empty (n, m) instance matrix")
    rule = instances[0].copy()
    disagree = (instances != rule).any(axis=0)
    rule[disagree] = ANY
    return rule


def hypothesis_space_size(domain_sizes: Sequence[int], encoding: str) -> tuple[list[int], int]:
    """Per-attribute rule-term counts and the total number of conjunctive rules.

    For an attribute with k values the attribute-value encoding admits k + 1
    terms (each value, or unconstrained) while the one-hot encoding admits
    2**k - 1 satisfiable terms (any non-empty subset of allowed values).
    Totals are exact big integers (products over attributes).
    """
    sizes = list(domain_sizes)
    if not sizes or any(k < 1 for k in sizes):
        raise ValueError("domain sizes must be positive integers")
    encoding = encoding.lower()
    if encoding == "av":
        terms = [k + 1 for k in sizes]
    elif encoding == "oh":
        terms = [2**k - 1 for k in sizes]
    else:
        raise ValueError(f"unknown encoding {encoding!r}")
    total = 1
    for t in terms:
        total *= t
    return terms, total


def find_oh_conflicts(rule: np.ndarray, oh_map: Sequence[tuple[int, int]]) -> list[int]:
    """Original-attribute indices that a one-hot rule constrains to 1 twice.

    Such rules are unsatisfiable under the one-hot invariant (exactly one 1
    per source attribute). The learner never produces them because it only
    generalizes from real instances; this validator exists for hand-built or
    deserialized rules.
    """
    rule = np.asarray(rule)
    ones_per_attr: dict[int, int] = {}
    for col, (attr, _val) in enumerate(oh_map):
        if rule[col] == 1:
            ones_per_attr[attr] = ones_per_attr.get(attr, 0) + 1
    return sorted(a for a, c in ones_per_attr.items() if c > 1)


# ---------------------------------------------------------------------------
# display and serialization
# ---------------------------------------------------------------------------

def rule_to_text(rule: np.ndarray, attributes: Sequence) -> str:
    """Render a rule as ``IF a=v AND b!=w THEN positive`` (ANY slots elided).

    One-hot columns are mapped back to the source attribute through their
    ``oh_origin``: constrained-to-1 renders as equality, constrained-to-0 as
    inequality.
    """
    rule = np.asarray(rule)
    terms = []
    for j, c in enumerate(rule):
        if c == ANY:
            continue
        attr = attributes[j]
        origin = getattr(attr, "oh_origin", None)
        if origin is not None:
            name, value = origin
            op = "=" if c == 1 else "≠"
            terms.append(f"{name}{op}{value}")
        else:
            terms.append(f"{attr.name}={attr.values[c]}")
    body = " AND ".join(terms) if terms else "TRUE"
    return f"IF {body} THEN positive"


def rule_to_values(rule: np.ndarray, attributes: Sequence) -> list:
    """JSON form: one entry per attribute, ``None`` for ANY else the original value."""
    return [
        None if c == ANY else attributes[j].values[c]
        for j, c in enumerate(np.asarray(rule))
    ]


def rule_from_values(values: Sequence, attributes: Sequence) -> np.ndarray:
    codes = []
    for j, v in enumerate(values):
        if v is None:
            codes.append(ANY)
        else:
            try:
                codes.append(attributes[j].values.index(v))
            except ValueError:
                raise ValueError(
                    f"value {v!r} not in the domain of attribute {attributes[j].name!r}"
                ) from None
    return as_rule(codes)
