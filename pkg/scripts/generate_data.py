#!/usr/bin/env python3
"""Materialize the locally generatable benchmark datasets into data/.

The three monk problems and tic-tac-toe are complete enumerable spaces and
are produced in-process; wine is exported from scikit-learn's bundled copy.
The remaining benchmarks are recorded data: fetch them with fetch_data.py.
"""

import argparse
import sys
from pathlib import Path

from findrs import benchmarks as B

GENERATABLE = [name for name, spec in B.BENCHMARKS.items() if spec.generator]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data-dir", default=Path(__file__).resolve().parents[1] / "data")
    parser.add_argument("--force", action="store_true", help="rewrite existing files")
    args = parser.parse_args(argv)

    data_dir = Path(args.data_dir)
    for name in GENERATABLE:
        path = data_dir / f"{name}.csv"
        if path.exists() and not args.force:
            print(f"kept      {path}")
            continue
        if path.exists():
            path.unlink()
        B.ensure_dataset(name, data_dir)
        table = B.BENCHMARKS[name].generator()
        print(f"generated {path} ({table.n_rows} rows)")
    missing = sorted(set(B.BENCHMARKS) - set(GENERATABLE))
    print(f"not generatable (fetch with fetch_data.py): {', '.join(missing)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
