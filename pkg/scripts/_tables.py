"""Shared helpers: run a subcommand through the CLI and pivot its CSV."""
from __future__ import annotations

import argparse
import sys
from collections import defaultdict
from pathlib import Path

from chirplab.cli import parse_and_dispatch
from chirplab.csvio import read_csv

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(sub: str, default_config: str, description: str) -> tuple[list[str], list[dict]]:
    ap = argparse.ArgumentParser(description=description)
    ap.add_argument("--config", default=str(CONFIGS / default_config))
    ap.add_argument("--out", default=f"results/{sub}")
    ap.add_argument("--threads", default="1")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    args = ap.parse_args()
    argv = [sub, "--config", args.config, "--out", args.out, "--threads", args.threads]
    for s in args.set:
        argv += ["--set", s]
    rc = parse_and_dispatch(argv)
    if rc:
        sys.exit(rc)
    header, rows = read_csv(Path(args.out) / f"{sub}.csv")
    print(f"wrote {args.out}/{sub}.csv")
    return header, [dict(zip(header, r)) for r in rows]


def pivot(rows: list[dict], group: str, row_key: str, col_key: str, value: str,
          fmt: str = "{:>7.2f}") -> None:
    """Print one table per ``group`` with ``row_key`` down and ``col_key`` across."""
    tables: dict = defaultdict(dict)
    for r in rows:
        tables[r[group]][(float(r[row_key]), float(r[col_key]))] = float(r[value])
    for name, cells in tables.items():
        rk = sorted({a for a, _ in cells})
        ck = sorted({b for _, b in cells})
        print(f"\n{name}: {value} ({row_key} down, {col_key} across)")
        print(f"{'':>7}" + "".join(f"{c:>7g}" for c in ck))
        for a in rk:
            print(f"{a:>7g}" + "".join(fmt.format(cells[(a, b)]) if (a, b) in cells
                                       else f"{'':>7}" for b in ck))
