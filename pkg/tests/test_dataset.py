import json
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from findrs import dataset as D


@pytest.fixture
def csv_file(tmp_path):
    def write(text, name="data.csv"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write


# ---------------------------------------------------------------------------
# load_csv
# ---------------------------------------------------------------------------

def test_load_small_csv(csv_file):
    path = csv_file("a,b,label\n1,x,yes\n2,y,no\n3,x,yes\n4,z,no\n")
    table = D.load_csv(path, label="label")
    assert table.n_rows == 4
    assert len(table.names) == 3
    assert table.label == "label"
    assert table.numeric == {"a"}


def test_load_missing_file(tmp_path):
    with pytest.raises(D.DataError, match="no such file"):
        D.load_csv(tmp_path / "absent.csv", label="y")


def test_ragged_row_reported_with_position(csv_file):
    path = csv_file("a,b,label\n1,x,yes\n2,y\n")
    with pytest.raises(D.DataError, match="ragged row 3"):
        D.load_csv(path, label="label")


def test_unknown_label_column(csv_file):
    path = csv_file("a,b\n1,2\n")
    with pytest.raises(D.DataError, match="label column 'y' not found"):
        D.load_csv(path, label="y")


def test_missing_cell_rejected(csv_file):
    path = csv_file("a,b,label\n1,,yes\n")
    with pytest.raises(D.DataError, match="missing value at row 2, column 'b'"):
        D.load_csv(path, label="label")


def test_headerless_load(csv_file):
    path = csv_file("1,x,yes\n2,y,no\n")
    table = D.load_csv(path, label="c2", has_header=False)
    assert table.names == ("c0", "c1", "c2")
    assert table.n_rows == 2


def test_duplicate_header_rejected(csv_file):
    path = csv_file("a,a,label\n1,2,yes\n")
    with pytest.raises(D.DataError, match="duplicate column names"):
        D.load_csv(path, label="label")


# ---------------------------------------------------------------------------
# discretize
# ---------------------------------------------------------------------------

def test_uniform_identity_binning():
    codes, _ = D.discretize(list(range(10)), 10, strategy="uniform")
    assert codes.tolist() == list(range(10))


def test_quantile_equal_frequency():
    codes, _ = D.discretize([1, 1, 1, 2, 2, 2], 2, strategy="quantile")
    assert codes.tolist() == [0, 0, 0, 1, 1, 1]


def test_quantile_matches_sort_and_cut_oracle():
    # independent oracle: sort the column and cut it into equal-count chunks;
    # each bin's population must match within one at tied boundaries
    rng = np.random.default_rng(7)
    values = rng.normal(size=500)
    n_bins = 10
    codes, _ = D.discretize(values, n_bins, strategy="quantile")
    counts = np.bincount(codes, minlength=n_bins)
    assert counts.sum() == 500
    assert counts.max() - counts.min() <= 2  # continuous draws, no heavy ties
    # oracle on the sorted order: element ranks determine the bin
    order = np.argsort(values, kind="stable")
    oracle_bins = np.empty(500, dtype=int)
    oracle_bins[order] = np.minimum(np.arange(500) // 50, n_bins - 1)
    # identical values must get identical bins; compare via bin boundaries
    disagree = np.abs(oracle_bins - codes)
    assert disagree.max() <= 1
    assert (disagree != 0).mean() < 0.05


@given(st.lists(st.floats(min_value=-1e6, max_value=1e6), min_size=2, max_size=60),
       st.integers(min_value=2, max_value=8),
       st.sampled_from(["quantile", "uniform"]))
def test_discretize_monotone(values, n_bins, strategy):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        codes, _ = D.discretize(values, n_bins, strategy=strategy)
    order = np.argsort(values, kind="stable")
    assert (np.diff(codes[order]) >= 0).all()


def test_constant_column_single_bin_with_warning():
    with pytest.warns(UserWarning, match="collapsed"):
        codes, _ = D.discretize([5.0, 5.0, 5.0], 4)
    assert set(codes.tolist()) == {0}


def test_empty_column_rejected():
    with pytest.raises(D.DataError, match="empty"):
        D.discretize([], 4)


def test_apply_discretization_respects_fit_rows(csv_file):
    path = csv_file("v,label\n" + "".join(f"{i},{'yes' if i % 2 else 'no'}\n" for i in range(20)))
    table = D.load_csv(path, label="label")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        full = D.apply_discretization(table, ["v"], 4)
        head = D.apply_discretization(table, ["v"], 4, fit_rows=np.arange(5))
    # fitting on rows 0..4 pushes all later values into the top bin
    assert max(head.column("v")) == max(full.column("v"))
    assert head.column("v")[-1] == max(head.column("v"))
    assert head.column("v") != full.column("v")


def test_discretize_label_column_refused(csv_file):
    path = csv_file("v,label\n1,0\n2,1\n")
    table = D.load_csv(path, label="label")
    with pytest.raises(D.DataError, match="label column"):
        D.apply_discretization(table, ["label"], 2)


# ---------------------------------------------------------------------------
# binarize_labels
# ---------------------------------------------------------------------------

def _table(rows, names=("a", "b", "label")):
    columns = tuple(tuple(r[j] for r in rows) for j in range(len(names)))
    return D.RawTable(names=tuple(names), columns=columns, label=names[-1])


def test_binarize_maps_positive_class():
    table = _table([("1", "x", "yes"), ("2", "y", "no"), ("1", "y", "yes")])
    ds = D.binarize_labels(table, "yes")
    assert ds.y.tolist() == [1, -1, 1]
    assert ds.n == 3 and ds.m == 2
    assert set(ds.y.tolist()) <= {-1, 1}


def test_binarize_all_positive():
    table = _table([("1", "x", "yes"), ("2", "y", "yes")])
    ds = D.binarize_labels(table, "yes")
    assert ds.y.tolist() == [1, 1]


def test_binarize_unknown_class_lists_observed():
    table = _table([("1", "x", "yes"), ("2", "y", "no")])
    with pytest.raises(D.DataError, match="observed classes: \\['no', 'yes'\\]"):
        D.binarize_labels(table, "maybe")


def test_binarize_preserves_row_count(monk_tables):
    table = monk_tables["monk-1"]
    ds = D.binarize_labels(table, "1")
    assert ds.n == table.n_rows == 432


def test_most_frequent_class_tie_breaks_lexicographically():
    table = _table([("1", "x", "b"), ("2", "y", "a"), ("3", "z", "b"), ("4", "w", "a")])
    assert D.most_frequent_class(table) == "a"


def test_domains_are_sorted_observed_values():
    table = _table([("2", "x", "yes"), ("1", "y", "no"), ("2", "y", "yes")])
    ds = D.binarize_labels(table, "yes")
    assert ds.attributes[0].values == ("1", "2")
    assert ds.attributes[1].values == ("x", "y")
    assert ds.X[:, 0].tolist() == [1, 0, 1]


def test_count_contradictions():
    table = _table([("1", "x", "yes"), ("1", "x", "no"), ("2", "y", "no")])
    ds = D.binarize_labels(table, "yes")
    assert D.count_contradictions(ds) == 2


# ---------------------------------------------------------------------------
# encodings
# ---------------------------------------------------------------------------

def test_one_hot_of_three_valued_attribute():
    table = _table([("1", "x", "yes"), ("2", "x", "no"), ("3", "x", "yes")])
    ds = D.encode(D.binarize_labels(table, "yes"), "oh")
    # attribute a has values 1,2,3; value 2 becomes (0,1,0)
    assert ds.X[1, :3].tolist() == [0, 1, 0]
    assert all(a.values == (0, 1) for a in ds.attributes)


def test_single_value_domain_becomes_constant_one_column():
    table = _table([("1", "x", "yes"), ("1", "y", "no")])
    ds = D.encode(D.binarize_labels(table, "yes"), "oh")
    assert ds.X[:, 0].tolist() == [1, 1]


def test_oh_width_is_sum_of_domain_sizes(monk_av, monk_oh):
    av = monk_av["monk-1"]
    oh = monk_oh["monk-1"]
    assert oh.m == sum(av.domain_sizes()) == 17


def test_oh_exactly_one_hot_per_source_attribute(monk_oh):
    oh = monk_oh["monk-2"]
    groups = {}
    for col, (j, _v) in enumerate(oh.oh_map):
        groups.setdefault(j, []).append(col)
    for cols in groups.values():
        assert (oh.X[:, cols].sum(axis=1) == 1).all()


def test_oh_round_trip_recovers_av_instances(monk_av, monk_oh):
    av = monk_av["monk-3"]
    oh = monk_oh["monk-3"]
    for i in range(av.n):
        assert np.array_equal(D.decode_oh_row(oh, oh.X[i]), av.X[i])


def test_av_encode_is_identity(monk_av):
    ds = monk_av["monk-1"]
    assert D.encode(ds, "av") is ds


def test_double_encode_rejected(monk_oh):
    with pytest.raises(D.DataError, match="attribute-value"):
        D.encode(monk_oh["monk-1"], "oh")


# ---------------------------------------------------------------------------
# split
# ---------------------------------------------------------------------------

def test_split_partitions_exactly():
    table = _table([(str(i), "x", "yes" if i % 2 else "no") for i in range(10)])
    ds = D.binarize_labels(table, "yes")
    train, test = D.split(ds, D.SplitSpec(0.5, seed=3))
    assert train.n == 5 and test.n == 5
    seen = sorted(train.X[:, 0].tolist() + test.X[:, 0].tolist())
    assert seen == sorted(ds.X[:, 0].tolist())


def test_split_deterministic():
    table = _table([(str(i), "x", "yes" if i % 2 else "no") for i in range(12)])
    ds = D.binarize_labels(table, "yes")
    a = D.split(ds, D.SplitSpec(0.5, seed=9))
    b = D.split(ds, D.SplitSpec(0.5, seed=9))
    assert np.array_equal(a[0].X, b[0].X) and np.array_equal(a[1].X, b[1].X)


def test_ten_seeds_give_ten_distinct_splits(monk_av):
    ds = monk_av["monk-1"]
    seen = set()
    for seed in range(10):
        train_idx, _ = D.split_indices(ds.n, D.SplitSpec(0.5, seed))
        seen.add(tuple(sorted(train_idx.tolist())))
    assert len(seen) == 10


def test_split_requires_both_sides_nonempty():
    table = _table([("1", "x", "yes"), ("2", "y", "no")])
    ds = D.binarize_labels(table, "yes")
    with pytest.raises(D.DataError, match="empty side"):
        D.split(ds, D.SplitSpec(0.2, seed=0))


def test_split_fraction_validated():
    with pytest.raises(D.DataError, match="train fraction"):
        D.SplitSpec(1.5, seed=0)


# ---------------------------------------------------------------------------
# manifests
# ---------------------------------------------------------------------------

def test_manifest_round_trip(tmp_path, csv_file):
    data = csv_file("a,b,label\n1,x,yes\n2,y,no\n1,y,yes\n2,x,no\n")
    manifest_path = tmp_path / "toy.json"
    manifest_path.write_text(json.dumps({
        "path": data.name,
        "label": "label",
        "positive_class": "yes",
        "discretize": [],
        "bins": 10,
        "encoding": "av",
    }))
    manifest = D.load_manifest(manifest_path)
    ds = D.dataset_from_manifest(manifest)
    assert ds.n == 4
    assert ds.positive_class == "yes"


def test_manifest_unknown_field_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"path": "x.csv", "label": "y", "positiv": "oops"}')
    with pytest.raises(D.DataError, match="unknown manifest fields"):
        D.load_manifest(path)


def test_manifest_requires_path_and_label(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"label": "y"}')
    with pytest.raises(D.DataError, match="missing 'path'"):
        D.load_manifest(path)


def test_manifest_missing_file_error(tmp_path):
    path = tmp_path / "toy.json"
    path.write_text('{"path": "absent.csv", "label": "y"}')
    manifest = D.load_manifest(path)
    with pytest.raises(D.DataError, match="no such file"):
        D.dataset_from_manifest(manifest)


def test_manifest_most_frequent_resolution(tmp_path, csv_file):
    data = csv_file("a,label\n1,no\n2,no\n3,yes\n")
    manifest_path = tmp_path / "toy.json"
    manifest_path.write_text(json.dumps({
        "path": data.name, "label": "label", "positive_class": "most-frequent",
    }))
    ds = D.dataset_from_manifest(D.load_manifest(manifest_path))
    assert ds.positive_class == "no"
    assert ds.y.tolist() == [1, 1, -1]


def test_dataset_arrays_are_frozen(monk_av):
    ds = monk_av["monk-1"]
    with pytest.raises(ValueError):
        ds.X[0, 0] = 5
