from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from findrs import rules as R
from findrs.dataset import Attribute


def rule(*values):
    return R.as_rule(values)


# ---------------------------------------------------------------------------
# coverage
# ---------------------------------------------------------------------------

def test_all_wildcard_rule_covers_everything():
    r = rule(None, None, None)
    for x in ([0, 1, 2], [5, 5, 5]):
        assert R.covers(r, x)


def test_covers_matches_constrained_positions():
    r = rule(1, None, 3)
    assert R.covers(r, [1, 5, 3])
    assert not R.covers(r, [2, 5, 3])


def test_instance_as_fully_constrained_rule_covers_itself():
    x = [2, 0, 1, 3]
    assert R.covers(rule(*x), x)


def test_covers_length_mismatch_raises():
    with pytest.raises(ValueError, match="length mismatch"):
        R.covers(rule(1, 2), [1, 2, 3])


def test_covers_set_empty_is_false():
    assert not R.covers_set([], [1, 2])


def test_covers_set_is_disjunction():
    rules = [rule(1, None), rule(None, 2)]
    assert R.covers_set(rules, [3, 2])
    assert R.covers_set(rules, [1, 9])
    assert not R.covers_set(rules, [2, 3])


def test_covers_rows_agrees_with_scalar_covers():
    rng = np.random.default_rng(0)
    X = rng.integers(0, 3, size=(50, 4)).astype(np.int32)
    r = rule(1, None, 2, None)
    rows = R.covers_rows(r, X)
    assert rows.tolist() == [R.covers(r, x) for x in X]


def test_ruleset_covers_rows_equals_or_of_each_rule():
    rng = np.random.default_rng(1)
    X = rng.integers(0, 3, size=(80, 3)).astype(np.int32)
    rules = [rule(0, None, None), rule(None, 1, 2), rule(2, 2, None)]
    combined = R.ruleset_covers_rows(rules, X)
    naive = np.array([R.covers_set(rules, x) for x in X])
    assert np.array_equal(combined, naive)


# ---------------------------------------------------------------------------
# generalization
# ---------------------------------------------------------------------------

def test_generalize_drops_disagreeing_constraints():
    assert R.generalize(rule(1, 2, 3), [1, 5, 3]).tolist() == [1, R.ANY, 3]


def test_generalize_is_identity_when_already_covering():
    r = rule(None, 2)
    assert R.generalize(r, [1, 2]).tolist() == r.tolist()


def test_generalize_result_covers_instance():
    rng = np.random.default_rng(2)
    for _ in range(200):
        m = rng.integers(1, 6)
        r = rng.integers(-1, 3, size=m).astype(np.int32)
        x = rng.integers(0, 3, size=m)
        assert R.covers(R.generalize(r, x), x)


def test_generalize_idempotent():
    rng = np.random.default_rng(3)
    for _ in range(100):
        m = rng.integers(1, 6)
        r = rng.integers(-1, 3, size=m).astype(np.int32)
        x = rng.integers(0, 3, size=m)
        once = R.generalize(r, x)
        assert np.array_equal(R.generalize(once, x), once)


# ---------------------------------------------------------------------------
# generality order
# ---------------------------------------------------------------------------

def test_more_general_wildcards_dominate():
    assert R.more_general(rule(None, None), rule(1, 2))


def test_incomparable_rules():
    assert not R.more_general(rule(1, None), rule(None, 2))
    assert not R.more_general(rule(None, 2), rule(1, None))


@st.composite
def _rule_pairs(draw):
    m = draw(st.integers(min_value=1, max_value=5))
    slot = st.integers(min_value=-1, max_value=2)
    r1 = draw(st.lists(slot, min_size=m, max_size=m))
    r2 = draw(st.lists(slot, min_size=m, max_size=m))
    x = draw(st.lists(st.integers(min_value=0, max_value=2), min_size=m, max_size=m))
    return np.array(r1, np.int32), np.array(r2, np.int32), np.array(x, np.int32)


@given(_rule_pairs())
def test_more_general_is_partial_order(triple):
    r1, r2, _ = triple
    assert R.more_general(r1, r1)
    if R.more_general(r1, r2) and R.more_general(r2, r1):
        assert np.array_equal(r1, r2)


@given(_rule_pairs(), _rule_pairs())
def test_more_general_transitive(a, b):
    r1, r2, _ = a
    r3 = b[0][: len(r1)]
    if len(r3) == len(r1) and R.more_general(r1, r2) and R.more_general(r2, r3):
        assert R.more_general(r1, r3)


@given(_rule_pairs())
def test_generalize_result_is_more_general(triple):
    r, _, x = triple
    assert R.more_general(R.generalize(r, x), r)


def test_more_general_agrees_with_semantic_definition_small_domains():
    # brute force over every instance of the product space
    # single-value domains are excluded: there a constrained slot equals a
    # wildcard semantically but not syntactically
    rng = np.random.default_rng(4)
    for _ in range(60):
        m = int(rng.integers(1, 4))
        sizes = rng.integers(2, 5, size=m)
        space = list(product(*[range(k) for k in sizes]))
        assert len(space) <= 4096
        r1 = np.array([rng.integers(-1, k) for k in sizes], np.int32)
        r2 = np.array([rng.integers(-1, k) for k in sizes], np.int32)
        semantic = all(
            R.covers(r1, x) for x in space if R.covers(r2, x)
        )
        assert R.more_general(r1, r2) == semantic


# ---------------------------------------------------------------------------
# hypothesis-space size
# ---------------------------------------------------------------------------

def test_terms_for_three_valued_attribute():
    av_terms, _ = R.hypothesis_space_size([3], "av")
    oh_terms, _ = R.hypothesis_space_size([3], "oh")
    assert av_terms == [4]
    assert oh_terms == [7]


def test_single_value_domain():
    assert R.hypothesis_space_size([1], "av") == ([2], 2)
    assert R.hypothesis_space_size([1], "oh") == ([1], 1)


def test_totals_match_enumeration_for_3x3():
    # independent oracle: enumerate syntactic AV rules, and distinct
    # satisfiable OH coverage sets, over two 3-valued attributes
    sizes = [3, 3]
    av_rules = list(product(*[list(range(k)) + [None] for k in sizes]))
    assert R.hypothesis_space_size(sizes, "av")[1] == len(av_rules) == 16

    instances = list(product(range(3), repeat=2))

    def oh_vector(x):
        out = []
        for j, v in enumerate(x):
            out.extend(1 if v == i else 0 for i in range(sizes[j]))
        return tuple(out)

    oh_instances = [oh_vector(x) for x in instances]
    coverages = set()
    for pattern in product((0, 1, None), repeat=sum(sizes)):
        cov = frozenset(
            i for i, inst in enumerate(oh_instances)
            if all(p is None or p == v for p, v in zip(pattern, inst))
        )
        if cov:
            coverages.add(cov)
    assert R.hypothesis_space_size(sizes, "oh")[1] == len(coverages) == 49


def test_totals_are_exact_big_integers():
    _, total = R.hypothesis_space_size([20] * 42, "oh")
    assert total == (2**20 - 1) ** 42


def test_invalid_domain_sizes_rejected():
    with pytest.raises(ValueError):
        R.hypothesis_space_size([3, 0], "av")
    with pytest.raises(ValueError):
        R.hypothesis_space_size([3], "binary")


# ---------------------------------------------------------------------------
# display and serialization
# ---------------------------------------------------------------------------

def _attrs():
    return (
        Attribute("color", ("blue", "red")),
        Attribute("size", ("big", "small")),
    )


def test_rule_text_elides_wildcards():
    text = R.rule_to_text(rule(1, None), _attrs())
    assert text == "IF color=red THEN positive"


def test_rule_text_all_wildcards():
    assert R.rule_to_text(rule(None, None), _attrs()) == "IF TRUE THEN positive"


def test_oh_rule_text_uses_inequality_for_zeros():
    attrs = (
        Attribute("color=blue", (0, 1), oh_origin=("color", "blue")),
        Attribute("color=red", (0, 1), oh_origin=("color", "red")),
    )
    text = R.rule_to_text(rule(0, 1), attrs)
    assert text == "IF color≠blue AND color=red THEN positive"


def test_rule_values_round_trip():
    attrs = _attrs()
    r = rule(0, None)
    values = R.rule_to_values(r, attrs)
    assert values == ["blue", None]
    back = R.rule_from_values(values, attrs)
    assert np.array_equal(back, r)


def test_rule_from_values_rejects_unknown_value():
    with pytest.raises(ValueError, match="not in the domain"):
        R.rule_from_values(["green", None], _attrs())


def test_oh_conflict_validator():
    oh_map = [(0, 0), (0, 1), (1, 0)]
    assert R.find_oh_conflicts(rule(1, 1, None), oh_map) == [0]
    assert R.find_oh_conflicts(rule(1, 0, 1), oh_map) == []
