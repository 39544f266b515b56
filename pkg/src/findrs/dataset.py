"""Tabular ingestion for the rule learners.

Pipeline: a delimiter-separated file is loaded into a :class:`RawTable`,
numeric columns are optionally discretized into bins, labels are binarized
against a positive class, attribute values are interned to small integer
codes, and the result is a :class:`Dataset` that can be re-encoded one-hot
and split deterministically.
"""

from __future__ import annotations

import csv
import json
import logging
import warnings
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

log = logging.getLogger(__name__)

CODE_DTYPE = np.int32
UNSEEN = -2  # code for test-time values outside the interned domain


class DataError(ValueError):
    """Raised for malformed input files, manifests, or label problems."""


@dataclass(frozen=True)
class Attribute:
    """One categorical attribute: display name plus its interned value domain.

    ``values[code]`` is the original value for interned code ``code``. For
    one-hot columns ``oh_origin`` holds (source attribute name, source value).
    """

    name: str
    values: tuple
    oh_origin: tuple | None = None


@dataclass(frozen=True)
class RawTable:
    """Columnar view of a parsed file; cells are strings (or ints after binning)."""

    names: tuple[str, ...]
    columns: tuple[tuple, ...]
    label: str
    numeric: frozenset[str] = frozenset()

    @property
    def n_rows(self) -> int:
        return len(self.columns[0]) if self.columns else 0

    def column(self, name: str) -> tuple:
        return self.columns[self.names.index(name)]


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float
    seed: int

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise DataError(f"train fraction must be in (0,1), got {self.train_fraction}")


@dataclass(frozen=True)
class Dataset:
    """Interned, binary-labeled categorical data.

    ``X`` holds value codes (row i, attribute j in ``range(len(attributes[j].values))``,
    or UNSEEN for out-of-domain values introduced at prediction time), ``y``
    holds labels in {-1, +1}. Arrays are frozen after construction.
    """

    attributes: tuple[Attribute, ...]
    X: np.ndarray
    y: np.ndarray
    encoding: str = "av"
    positive_class: object = None
    oh_map: tuple[tuple[int, int], ...] | None = None
    origin_attributes: tuple[Attribute, ...] | None = None

    def __post_init__(self):
        if self.X.shape != (len(self.y), len(self.attributes)):
            raise DataError(
                f"shape mismatch: X {self.X.shape}, y {len(self.y)}, "
                f"attributes {len(self.attributes)}"
            )
        self.X.setflags(write=False)
        self.y.setflags(write=False)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def m(self) -> int:
        return self.X.shape[1]

    @property
    def positives(self) -> np.ndarray:
        return self.X[self.y == 1]

    @property
    def negatives(self) -> np.ndarray:
        return self.X[self.y == -1]

    def domain_sizes(self) -> list[int]:
        return [len(a.values) for a in self.attributes]

    def take(self, idx: np.ndarray) -> "Dataset":
        return replace(self, X=self.X[idx].copy(), y=self.y[idx].copy())


# ---------------------------------------------------------------------------
# loading
# ---------------------------------------------------------------------------

def load_csv(path, label: str, has_header: bool = True, delimiter: str = ",") -> RawTable:
    """Parse a delimiter-separated file into a RawTable.

    Errors carry row/column positions: missing file, ragged rows, empty cells,
    and an unknown label column are all rejected. Numeric columns are
    auto-detected (every cell parses as a decimal number).
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        rows = [row for row in reader if row]
    if not rows:
        raise DataError(f"{path}: file is empty")
    if has_header:
        names = [c.strip() for c in rows[0]]
        body = rows[1:]
        first_data_row = 2
    else:
        names = [f"c{i}" for i in range(len(rows[0]))]
        body = rows
        first_data_row = 1
    if len(set(names)) != len(names):
        raise DataError(f"{path}: duplicate column names in header")
    if label not in names:
        raise DataError(f"{path}: label column {label!r} not found (have {names})")
    if not body:
        raise DataError(f"{path}: no data rows")
    n_cols = len(names)
    for i, row in enumerate(body):
        if len(row) != n_cols:
            raise DataError(
                f"{path}: ragged row {first_data_row + i}: "
                f"{len(row)} fields, expected {n_cols}"
            )
        for j, cell in enumerate(row):
            if cell.strip() == "":
                raise DataError(
                    f"{path}: missing value at row {first_data_row + i}, "
                    f"column {names[j]!r}"
                )
    columns = tuple(tuple(row[j].strip() for row in body) for j in range(n_cols))
    numeric = frozenset(
        name for name, col in zip(names, columns) if _all_numeric(col)
    )
    return RawTable(names=tuple(names), columns=columns, label=label, numeric=numeric)


def _all_numeric(col) -> bool:
    for cell in col:
        try:
            float(cell)
        except (TypeError, ValueError):
            return False
    return True


# ---------------------------------------------------------------------------
# discretization
# ---------------------------------------------------------------------------

def discretize(
    column: Sequence,
    n_bins: int,
    strategy: str = "quantile",
    edges: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Map a numeric column to bin indices; returns (codes, edges).

    ``quantile`` places ~equal counts per bin, ``uniform`` uses equal-width
    bins over [min, max]. Precomputed ``edges`` may be passed to apply a
    binning fitted elsewhere (e.g. on a training split). Tied quantile edges
    collapse bins; a constant column collapses to a single bin with a warning.
    """
    values = np.asarray([float(v) for v in column], dtype=float)
    if values.size == 0:
        raise DataError("cannot discretize an empty column")
    if edges is None:
        if n_bins < 2:
            raise DataError(f"need at least 2 bins, got {n_bins}")
        if strategy == "quantile":
            edges = np.quantile(values, np.linspace(0.0, 1.0, n_bins + 1))
        elif strategy == "uniform":
            edges = np.linspace(values.min(), values.max(), n_bins + 1)
        else:
            raise DataError(f"unknown discretization strategy {strategy!r}")
        edges = np.unique(edges)
        if len(edges) - 1 < n_bins:
            warnings.warn(
                f"discretization collapsed to {max(len(edges) - 1, 1)} bins "
                f"(requested {n_bins}): tied or constant values",
                stacklevel=2,
            )
    codes = np.searchsorted(edges[1:-1], values, side="right").astype(CODE_DTYPE)
    return codes, edges


def apply_discretization(
    table: RawTable,
    columns: Sequence[str],
    n_bins: int,
    strategy: str = "quantile",
    fit_rows: np.ndarray | None = None,
) -> RawTable:
    """Replace the named numeric columns by their bin indices.

    ``fit_rows`` restricts edge fitting to a row subset (train-only fitting);
    the mapping is still applied to every row.
    """
    new_cols = list(table.columns)
    for name in columns:
        if name == table.label:
            raise DataError("refusing to discretize the label column")
        if name not in table.names:
            raise DataError(f"unknown column {name!r}")
        if name not in table.numeric:
            raise DataError(f"column {name!r} is not numeric")
        j = table.names.index(name)
        col = table.columns[j]
        if fit_rows is not None:
            _, edges = discretize([col[i] for i in fit_rows], n_bins, strategy)
            codes, _ = discretize(col, n_bins, strategy, edges=edges)
        else:
            codes, _ = discretize(col, n_bins, strategy)
        new_cols[j] = tuple(int(c) for c in codes)
    return replace(table, columns=tuple(new_cols), numeric=table.numeric - set(columns))


# ---------------------------------------------------------------------------
# labels and interning
# ---------------------------------------------------------------------------

def most_frequent_class(table: RawTable):
    """The modal label value; ties broken lexicographically by class name."""
    labels = table.column(table.label)
    counts: dict = {}
    for v in labels:
        counts[v] = counts.get(v, 0) + 1
    best = min(counts.items(), key=lambda kv: (-kv[1], str(kv[0])))
    if sum(1 for c in counts.values() if c == best[1]) > 1:
        log.info("most-frequent class tie broken lexicographically: %r", best[0])
    log.info("resolved positive class: %r (%d rows)", best[0], best[1])
    return best[0]


def binarize_labels(table: RawTable, positive_class) -> Dataset:
    """Binarize labels against ``positive_class`` and intern attribute values.

    Label cells equal to the positive class map to +1 and everything else to
    -1. Attribute domains are the sorted sets of observed values per column,
    computed over all rows (so later splits share domains).
    """
    labels = table.column(table.label)
    matches = np.array([_values_equal(v, positive_class) for v in labels])
    if not matches.any():
        observed = sorted({str(v) for v in labels})
        raise DataError(
            f"positive class {positive_class!r} not present; observed classes: {observed}"
        )
    y = np.where(matches, 1, -1).astype(np.int8)
    attrs = []
    codes = []
    for name, col in zip(table.names, table.columns):
        if name == table.label:
            continue
        values = tuple(sorted(set(col)))
        index = {v: i for i, v in enumerate(values)}
        attrs.append(Attribute(name=name, values=values))
        codes.append(np.array([index[v] for v in col], dtype=CODE_DTYPE))
    X = np.column_stack(codes) if codes else np.empty((len(y), 0), dtype=CODE_DTYPE)
    return Dataset(
        attributes=tuple(attrs), X=X, y=y, encoding="av", positive_class=positive_class
    )


def _values_equal(cell, target) -> bool:
    if cell == target:
        return True
    return str(cell) == str(target)


def count_contradictions(dataset: Dataset) -> int:
    """Number of rows whose instance vector also occurs with the opposite label."""
    if dataset.n == 0:
        return 0
    rows, inverse = np.unique(dataset.X, axis=0, return_inverse=True)
    count = 0
    for g in range(len(rows)):
        labels = dataset.y[inverse == g]
        if labels.max() != labels.min():
            count += len(labels)
    return count


# ---------------------------------------------------------------------------
# encodings
# ---------------------------------------------------------------------------

def oh_expand(X: np.ndarray, attributes: Sequence[Attribute]) -> np.ndarray:
    """One-hot expand a code matrix; out-of-domain codes become all-zero blocks."""
    blocks = []
    for j, attr in enumerate(attributes):
        k = len(attr.values)
        block = np.zeros((X.shape[0], k), dtype=CODE_DTYPE)
        valid = X[:, j] >= 0
        block[np.flatnonzero(valid), X[valid, j]] = 1
        blocks.append(block)
    return np.hstack(blocks) if blocks else np.empty((X.shape[0], 0), dtype=CODE_DTYPE)


def encode(dataset: Dataset, target: str) -> Dataset:
    """Re-encode a dataset; ``av`` is the identity, ``oh`` expands to one-hot.

    One-hot expansion replaces attribute j by one binary column per domain
    value, exactly one of which is 1 per instance. The column-to-source map is
    retained for display and round-tripping.
    """
    target = target.lower()
    if dataset.encoding != "av":
        raise DataError("can only re-encode an attribute-value dataset")
    if target == "av":
        return dataset
    if target != "oh":
        raise DataError(f"unknown encoding {target!r}")
    attrs = []
    oh_map = []
    for j, attr in enumerate(dataset.attributes):
        for v, value in enumerate(attr.values):
            attrs.append(
                Attribute(
                    name=f"{attr.name}={value}",
                    values=(0, 1),
                    oh_origin=(attr.name, value),
                )
            )
            oh_map.append((j, v))
    return Dataset(
        attributes=tuple(attrs),
        X=oh_expand(dataset.X, dataset.attributes),
        y=dataset.y.copy(),
        encoding="oh",
        positive_class=dataset.positive_class,
        oh_map=tuple(oh_map),
        origin_attributes=dataset.attributes,
    )


def decode_oh_row(dataset: Dataset, row: np.ndarray) -> np.ndarray:
    """Invert one-hot encoding for a single instance using the retained map."""
    if dataset.oh_map is None or dataset.origin_attributes is None:
        raise DataError("dataset carries no one-hot map")
    out = np.full(len(dataset.origin_attributes), UNSEEN, dtype=CODE_DTYPE)
    for col, (j, v) in enumerate(dataset.oh_map):
        if row[col] == 1:
            out[j] = v
    return out


def intern_rows(rows, attributes: Sequence[Attribute]) -> np.ndarray:
    """Map raw value rows to codes under existing domains; unseen values get UNSEEN."""
    rows = [list(r) for r in rows]
    indexes = [{v: i for i, v in enumerate(a.values)} for a in attributes]
    out = np.full((len(rows), len(attributes)), UNSEEN, dtype=CODE_DTYPE)
    for i, r in enumerate(rows):
        if len(r) != len(attributes):
            raise DataError(f"row {i} has {len(r)} values, expected {len(attributes)}")
        for j, v in enumerate(r):
            code = indexes[j].get(v)
            if code is None:
                code = indexes[j].get(str(v), UNSEEN)
            out[i, j] = code
    return out


# ---------------------------------------------------------------------------
# splitting
# ---------------------------------------------------------------------------

def split_indices(n: int, spec: SplitSpec) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic shuffled partition of range(n); both parts non-empty."""
    n_train = int(n * spec.train_fraction)
    if n_train < 1 or n_train >= n:
        raise DataError(
            f"train fraction {spec.train_fraction} leaves an empty side for n={n}"
        )
    perm = np.random.default_rng(spec.seed).permutation(n)
    return perm[:n_train], perm[n_train:]


def split(dataset: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Seeded 2-way split; row order within each part is the shuffled order."""
    train_idx, test_idx = split_indices(dataset.n, spec)
    return dataset.take(train_idx), dataset.take(test_idx)


# ---------------------------------------------------------------------------
# manifests
# ---------------------------------------------------------------------------

MANIFEST_FIELDS = {
    "path", "label", "positive_class", "discretize", "bins", "encoding",
    "name", "has_header", "delimiter", "tau", "T", "repeats", "slow",
    "discretize_fit",
}


def load_manifest(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise DataError(f"manifest not found: {path}")
    try:
        manifest = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(manifest, dict):
        raise DataError(f"{path}: manifest must be a JSON object")
    unknown = set(manifest) - MANIFEST_FIELDS
    if unknown:
        raise DataError(f"{path}: unknown manifest fields {sorted(unknown)}")
    for required in ("path", "label"):
        if required not in manifest:
            raise DataError(f"{path}: manifest is missing {required!r}")
    manifest.setdefault("name", Path(manifest["path"]).stem)
    manifest["_dir"] = str(path.parent)
    return manifest


def table_from_manifest(manifest: dict, fit_rows: np.ndarray | None = None) -> RawTable:
    """Load and (optionally) discretize the file a manifest points at."""
    base = Path(manifest.get("_dir", "."))
    path = Path(manifest["path"])
    if not path.is_absolute():
        path = base / path
    table = load_csv(
        path,
        label=manifest["label"],
        has_header=manifest.get("has_header", True),
        delimiter=manifest.get("delimiter", ","),
    )
    cols = manifest.get("discretize", [])
    if cols == "auto":
        cols = sorted(table.numeric - {table.label})
    if cols:
        table = apply_discretization(
            table, cols, n_bins=manifest.get("bins", 10), fit_rows=fit_rows
        )
    return table


def dataset_from_manifest(manifest: dict, encoding: str | None = None) -> Dataset:
    """Full pipeline: load, discretize, binarize, encode per the manifest."""
    table = table_from_manifest(manifest)
    return dataset_from_table(table, manifest, encoding=encoding)


def dataset_from_table(table: RawTable, manifest: dict, encoding: str | None = None) -> Dataset:
    positive = manifest.get("positive_class", "most-frequent")
    if positive == "most-frequent":
        positive = most_frequent_class(table)
    ds = binarize_labels(table, positive)
    contradictions = count_contradictions(ds)
    if contradictions:
        log.warning(
            "%s: %d rows take part in contradictory duplicates",
            manifest.get("name", "dataset"), contradictions,
        )
    encoding = (encoding or manifest.get("encoding", "av")).lower()
    if encoding == "both":
        raise DataError("encoding 'both' must be expanded by the caller")
    return encode(ds, encoding)
