"""Built-in benchmark datasets and their manifests.

The three monk problems and tic-tac-toe are complete enumerable spaces, so
they are generated in-process, row for row equal (as sets) to the UCI files;
wine is re-exported from scikit-learn's bundled copy. The remaining
benchmarks are recorded data that must be fetched (see scripts/fetch_data.py)
before their manifests resolve.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import Callable

from .dataset import DataError, RawTable

MONK_DOMAINS = ((1, 2, 3), (1, 2, 3), (1, 2), (1, 2, 3), (1, 2, 3, 4), (1, 2))

_MONK_TARGETS = {
    "monk-1": lambda a: a[0] == a[1] or a[4] == 1,
    "monk-2": lambda a: sum(v == 1 for v in a) == 2,
    "monk-3": lambda a: (a[4] == 3 and a[3] == 1) or (a[4] != 4 and a[1] != 3),
}

TTT_CELLS = ("TL", "TM", "TR", "ML", "MM", "MR", "BL", "BM", "BR")
_TTT_LINES = ((0, 1, 2), (3, 4, 5), (6, 7, 8),
              (0, 3, 6), (1, 4, 7), (2, 5, 8),
              (0, 4, 8), (2, 4, 6))


def generate_monk(name: str) -> RawTable:
    """Full truth table (432 rows) of one monk problem, labels from its rule."""
    try:
        target = _MONK_TARGETS[name]
    except KeyError:
        raise DataError(f"unknown monk problem {name!r}") from None
    rows = []
    for values in product(*MONK_DOMAINS):
        rows.append([str(v) for v in values] + ["1" if target(values) else "0"])
    names = tuple(f"a{i}" for i in range(1, 7)) + ("class",)
    columns = tuple(tuple(row[j] for row in rows) for j in range(7))
    return RawTable(names=names, columns=columns, label="class")


def _line_for(board, player) -> bool:
    return any(all(board[i] == player for i in line) for line in _TTT_LINES)


def generate_tictactoe() -> RawTable:
    """All 958 terminal boards of tic-tac-toe with x moving first.

    A board is terminal iff one side has completed a line consistent with the
    move counts, or the board is full. The positive class is "x wins" (626
    rows); the rest are o wins (316) and draws (16).
    """
    rows = []
    for board in product("xob", repeat=9):
        nx, no = board.count("x"), board.count("o")
        wx, wo = _line_for(board, "x"), _line_for(board, "o")
        if wx and wo:
            continue
        if wx and nx == no + 1:
            label = "positive"
        elif wo and nx == no:
            label = "negative"
        elif not wx and not wo and nx == 5 and no == 4:
            label = "negative"
        else:
            continue
        rows.append(list(board) + [label])
    names = TTT_CELLS + ("class",)
    columns = tuple(tuple(row[j] for row in rows) for j in range(10))
    return RawTable(names=names, columns=columns, label="class")


def generate_wine() -> RawTable:
    """The 178-row wine data bundled with scikit-learn, classes renamed 1/2/3."""
    from sklearn.datasets import load_wine

    data = load_wine()
    names = tuple(str(n).replace(",", "_") for n in data.feature_names) + ("class",)
    rows = [
        [repr(float(v)) for v in x] + [str(int(t) + 1)]
        for x, t in zip(data.data, data.target)
    ]
    columns = tuple(tuple(row[j] for row in rows) for j in range(len(names)))
    return RawTable(names=names, columns=columns, label="class")


@dataclass(frozen=True)
class BenchmarkSpec:
    """How one benchmark is obtained and which protocol knobs it uses."""

    name: str
    positive_class: str
    tau: int = 0
    discretize: object = ()           # "auto" or a list of column names
    generator: Callable[[], RawTable] | None = None
    urls: tuple[str, ...] = ()
    n_columns: int | None = None      # attribute count of the fetched file
    label_first: bool = False         # fetched file has the class in column 0
    T: int = 100
    repeats: int = 10
    slow: bool = False


BENCHMARKS: dict[str, BenchmarkSpec] = {
    # Upstream reports describe monk-2, monk-3 and vote as run with one
    # tolerated negative per rule, but their published numbers match strict
    # consistency (cap 0 under this library's "covered <= tau" contract);
    # the manifests pin the effective value. See README, "Benchmark notes".
    "monk-1": BenchmarkSpec("monk-1", "1", generator=lambda: generate_monk("monk-1")),
    "monk-2": BenchmarkSpec("monk-2", "1", tau=0, generator=lambda: generate_monk("monk-2")),
    "monk-3": BenchmarkSpec("monk-3", "1", tau=0, generator=lambda: generate_monk("monk-3")),
    "tic-tac-toe": BenchmarkSpec("tic-tac-toe", "positive", generator=generate_tictactoe),
    "wine": BenchmarkSpec("wine", "2", discretize="auto", generator=generate_wine),
    "banknote": BenchmarkSpec(
        "banknote", "1", discretize="auto",
        urls=(
            "https://archive.ics.uci.edu/ml/machine-learning-databases/00267/data_banknote_authentication.txt",
            "https://archive.ics.uci.edu/static/public/267/banknote+authentication.zip",
        ),
        n_columns=4,
    ),
    "car": BenchmarkSpec(
        "car", "unacc",
        urls=(
            "https://archive.ics.uci.edu/ml/machine-learning-databases/car/car.data",
            "https://archive.ics.uci.edu/static/public/19/car+evaluation.zip",
        ),
        n_columns=6,
    ),
    "kr-vs-kp": BenchmarkSpec(
        "kr-vs-kp", "won",
        urls=(
            "https://archive.ics.uci.edu/ml/machine-learning-databases/chess/king-rook-vs-king-pawn/kr-vs-kp.data",
            "https://archive.ics.uci.edu/static/public/22/chess+king+rook+vs+king+pawn.zip",
        ),
        n_columns=36,
    ),
    "mushrooms": BenchmarkSpec(
        "mushrooms", "e",
        urls=(
            "https://archive.ics.uci.edu/ml/machine-learning-databases/mushroom/agaricus-lepiota.data",
            "https://archive.ics.uci.edu/static/public/73/mushroom.zip",
        ),
        n_columns=22,
        label_first=True,
    ),
    "vote": BenchmarkSpec(
        "vote", "republican", tau=0,
        urls=(
            "https://archive.ics.uci.edu/ml/machine-learning-databases/voting-records/house-votes-84.data",
            "https://archive.ics.uci.edu/static/public/105/congressional+voting+records.zip",
        ),
        n_columns=16,
        label_first=True,
    ),
    "connect-4": BenchmarkSpec(
        "connect-4", "win",
        urls=(
            "https://archive.ics.uci.edu/static/public/26/connect+4.zip",
        ),
        n_columns=42,
        T=20,
        repeats=1,
        slow=True,
    ),
}


def write_table_csv(table: RawTable, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(table.names)
        for i in range(table.n_rows):
            writer.writerow([col[i] for col in table.columns])
    return path


def ensure_dataset(name: str, data_dir) -> Path:
    """Materialize a benchmark CSV, generating it when the source permits."""
    spec = BENCHMARKS.get(name)
    if spec is None:
        raise DataError(f"unknown benchmark {name!r} (have {sorted(BENCHMARKS)})")
    path = Path(data_dir) / f"{name}.csv"
    if path.exists():
        return path
    if spec.generator is None:
        raise DataError(
            f"{name} is recorded data and is not bundled; "
            f"fetch it with scripts/fetch_data.py (needs network), expected at {path}"
        )
    return write_table_csv(spec.generator(), path)


def make_manifest(name: str, data_dir=".", relative_to=None) -> dict:
    """Manifest dict for a benchmark, with protocol defaults filled in."""
    spec = BENCHMARKS.get(name)
    if spec is None:
        raise DataError(f"unknown benchmark {name!r} (have {sorted(BENCHMARKS)})")
    path = Path(data_dir) / f"{name}.csv"
    if relative_to is not None:
        import os

        path = Path(os.path.relpath(path, relative_to))
    manifest = {
        "name": spec.name,
        "path": str(path),
        "label": "class",
        "positive_class": spec.positive_class,
        "discretize": list(spec.discretize) if isinstance(spec.discretize, tuple) else spec.discretize,
        "bins": 10,
        "encoding": "both",
        "tau": spec.tau,
        "T": spec.T,
        "repeats": spec.repeats,
    }
    if spec.slow:
        manifest["slow"] = True
    return manifest
