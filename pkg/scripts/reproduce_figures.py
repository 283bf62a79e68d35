#!/usr/bin/env python3
"""Write the Table 1 comparison and the data behind Figures 1-4 as CSV files.

    python3 scripts/reproduce_figures.py [--out results/]

Each file is exactly what ``salpeter-bounds table1`` / ``figure --id N``
prints.  A short summary of each table goes to stdout.
"""
import argparse
import csv
import io
import sys
import time
from pathlib import Path

from salpeter_bounds.cli import FIGURES, main


def _rows(path: Path):
    lines = path.read_text().splitlines()
    return list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


def _summarize(name: str, rows) -> str:
    if name == "table1":
        cells = [f"q={r['q']}: E2={r['E2_computed']} E1={r['E1_computed'] or '-'}" for r in rows]
        return "; ".join(cells)
    first, last = rows[0], rows[-1]
    keys = [k for k in ("lower", "oracle", "upper") if k in first]
    span = " ".join(f"{k}={first[k]}..{last[k]}" for k in keys)
    return f"m={first['m']}..{last['m']} ({len(rows)} rows) {span}"


def run(out: Path) -> int:
    out.mkdir(parents=True, exist_ok=True)
    jobs = [("table1", ["table1"])] + [(f"figure{k}", ["figure", "--id", str(k)]) for k in sorted(FIGURES)]
    status = 0
    for name, argv in jobs:
        target = out / f"{name}.csv"
        start = time.perf_counter()
        code = main(argv + ["--output", str(target)])
        took = time.perf_counter() - start
        if code != 0:
            print(f"{name}: exit {code}", file=sys.stderr)
            status = code
            continue
        print(f"{name:8s} {took:6.1f} s  {_summarize(name, _rows(target))}")
    return status


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("results"))
    sys.exit(run(parser.parse_args().out))
