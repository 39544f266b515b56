#!/usr/bin/env python3
"""Fetch the recorded benchmark datasets from the UCI archive (needs network).

Each dataset is normalized to a headered CSV with the class column last and
written to data/<name>.csv, matching the shipped manifests. Downloads are
validated by row count and by the presence of the expected positive class.

URLs point at the UCI archive's legacy file tree with the newer zip bundles
as fallback; both require outbound network access.
"""

import argparse
import csv
import io
import sys
import urllib.request
import zipfile
from pathlib import Path

from findrs import benchmarks as B

EXPECTED_ROWS = {
    "banknote": 1372,
    "car": 1728,
    "kr-vs-kp": 3196,
    "mushrooms": 8124,
    "vote": 435,
    "connect-4": 67557,
}

COLUMN_NAMES = {
    # documented attribute order; datasets without a well-known header get
    # generic names a01..aNN
    "car": ["buying", "maint", "doors", "persons", "lug_boot", "safety"],
}


def unlzw(data: bytes) -> bytes:
    """Decompress .Z (compress(1), LZW with 9..16 bit codes, block mode).

    Codes are packed LSB-first and read in groups of eight per bit width:
    the stream pads to a group boundary whenever the width changes or the
    table is cleared, mirroring the reference implementation's buffering.
    """
    if data[:2] != b"\x1f\x9d":
        raise ValueError("not an LZW .Z stream")
    flags = data[2]
    max_bits = flags & 0x1F
    block_mode = bool(flags & 0x80)
    if not 9 <= max_bits <= 16:
        raise ValueError(f"bad max bits {max_bits}")

    payload = data[3:]
    total_bits = len(payload) * 8
    table: dict[int, bytes] = {i: bytes([i]) for i in range(256)}
    next_code = 257 if block_mode else 256
    n_bits = 9
    bitpos = 0
    codes_since_pad = 0
    prev: bytes | None = None
    out = bytearray()

    def skip_group_padding():
        nonlocal bitpos, codes_since_pad
        rem = codes_since_pad % 8
        if rem:
            bitpos += (8 - rem) * n_bits
        codes_since_pad = 0

    while True:
        if next_code > (1 << n_bits) - 1 and n_bits < max_bits:
            skip_group_padding()
            n_bits += 1
        if bitpos + n_bits > total_bits:
            break
        byte0 = bitpos >> 3
        chunk = int.from_bytes(payload[byte0:byte0 + 3], "little")
        code = (chunk >> (bitpos & 7)) & ((1 << n_bits) - 1)
        bitpos += n_bits
        codes_since_pad += 1

        if block_mode and code == 256:
            skip_group_padding()
            table = {i: bytes([i]) for i in range(256)}
            next_code = 257
            n_bits = 9
            prev = None
            continue
        if code in table:
            entry = table[code]
        elif code == next_code and prev is not None:
            entry = prev + prev[:1]
        else:
            raise ValueError(f"corrupt LZW stream (code {code} of {next_code})")
        out += entry
        if prev is not None and next_code < (1 << max_bits):
            table[next_code] = prev + entry[:1]
            next_code += 1
        prev = entry
    return bytes(out)


def download(url: str) -> bytes:
    print(f"  fetching {url}")
    with urllib.request.urlopen(url, timeout=120) as response:
        return response.read()


def raw_rows(name: str, payload: bytes, url: str) -> list[list[str]]:
    if url.endswith(".zip"):
        with zipfile.ZipFile(io.BytesIO(payload)) as zf:
            members = [m for m in zf.namelist()
                       if m.endswith((".data", ".data.Z", ".txt")) and "names" not in m]
            if not members:
                raise ValueError(f"no data member in {url}: {zf.namelist()}")
            payload = zf.read(sorted(members)[0])
            if members[0].endswith(".Z"):
                payload = unlzw(payload)
    text = payload.decode("utf-8", errors="strict")
    return [row for row in csv.reader(io.StringIO(text)) if row]


def normalize(name: str, rows: list[list[str]]) -> list[list[str]]:
    spec = B.BENCHMARKS[name]
    fixed = []
    for row in rows:
        cells = [c.strip() for c in row]
        if spec.label_first:
            cells = cells[1:] + cells[:1]
        if len(cells) != spec.n_columns + 1:
            raise ValueError(f"{name}: row with {len(cells)} fields, "
                             f"expected {spec.n_columns + 1}")
        fixed.append(cells)
    return fixed


def write_csv(name: str, rows: list[list[str]], data_dir: Path) -> Path:
    spec = B.BENCHMARKS[name]
    names = COLUMN_NAMES.get(name) or [f"a{i:02d}" for i in range(1, spec.n_columns + 1)]
    path = data_dir / f"{name}.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(names + ["class"])
        writer.writerows(rows)
    return path


def fetch(name: str, data_dir: Path) -> None:
    spec = B.BENCHMARKS[name]
    print(f"{name}:")
    last_error = None
    for url in spec.urls:
        try:
            rows = normalize(name, raw_rows(name, download(url), url))
            break
        except Exception as exc:  # try the next mirror
            last_error = exc
            print(f"  failed: {exc}")
    else:
        raise SystemExit(f"{name}: all sources failed ({last_error})")
    expected = EXPECTED_ROWS[name]
    if len(rows) != expected:
        raise SystemExit(f"{name}: got {len(rows)} rows, expected {expected}")
    positives = sum(1 for r in rows if r[-1] == spec.positive_class)
    if positives == 0:
        raise SystemExit(f"{name}: positive class {spec.positive_class!r} absent")
    path = write_csv(name, rows, data_dir)
    print(f"  wrote {path} ({len(rows)} rows, {positives} positive)")


def main(argv=None) -> int:
    fetchable = sorted(n for n, s in B.BENCHMARKS.items() if not s.generator)
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("names", nargs="*", default=fetchable,
                        help=f"datasets to fetch (default: {' '.join(fetchable)})")
    parser.add_argument("--data-dir", default=Path(__file__).resolve().parents[1] / "data")
    args = parser.parse_args(argv)
    for name in args.names or fetchable:
        if name not in fetchable:
            raise SystemExit(f"unknown or generatable dataset {name!r}; "
                             f"fetchable: {fetchable}")
        fetch(name, Path(args.data_dir))
    return 0


if __name__ == "__main__":
    sys.exit(main())
