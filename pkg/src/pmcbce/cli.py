"""Command-line front end and benchmark harness."""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .counter import BceMode, CountTimeout, Counter
from .formula import DimacsError, parse_dimacs
from .oracle import MAX_ENUMERATION, brute_force_projected_count

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_MISMATCH = 3
EXIT_TIMEOUT = 124

CSV_HEADER = ["instance", "mode", "status", "count", "wall_s", "decisions",
              "blocked_removed", "blocked_per_decision", "cache_hits"]


@dataclass
class RunConfig:
    input_path: str
    mode: BceMode = BceMode.DYN
    stats: bool = False
    oracle_check: bool = False
    cache_cap: int | None = None
    timeout: float | None = None


def _deadline(timeout):
    return None if timeout is None else time.monotonic() + timeout


def run(config: RunConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        text = Path(config.input_path).read_bytes()
        formula = parse_dimacs(text)
    except OSError as e:
        print(f"error: cannot read {config.input_path}: {e.strerror or e}", file=err)
        return EXIT_ERROR
    except (DimacsError, UnicodeDecodeError) as e:
        print(f"error: {config.input_path}: {e}", file=err)
        return EXIT_ERROR

    counter = Counter(formula, config.mode, cache_cap=config.cache_cap, deadline=_deadline(config.timeout))
    try:
        result = counter.count()
    except CountTimeout:
        print("c s timeout", file=out)
        print(f"error: timeout after {config.timeout}s", file=err)
        return EXIT_TIMEOUT

    print("c s type pmc", file=out)
    print(f"c s exact arb int {result.count}", file=out)
    if config.stats:
        s = result.stats
        print(f"c stat decisions {s.decisions}", file=out)
        print(f"c stat blocked_removed {s.blocked_removed}", file=out)
        print(f"c stat cache_hits {s.cache_hits}", file=out)
        print(f"c stat max_depth {s.max_depth}", file=out)
    if config.oracle_check:
        n_shown = len(formula.counted_variables)
        if n_shown > MAX_ENUMERATION or len(formula.projection) > MAX_ENUMERATION:
            print("c oracle skipped (instance exceeds enumeration bound)", file=out)
        else:
            expected = brute_force_projected_count(formula)
            if expected != result.count:
                print(f"error: ORACLE MISMATCH: counter {result.count}, brute force {expected}", file=err)
                return EXIT_MISMATCH
            print("c oracle ok", file=out)
    return EXIT_OK


def _bench_one(path: str, mode: BceMode, timeout: float | None, cache_cap: int | None) -> list:
    name = os.path.basename(path)
    start = time.perf_counter()
    try:
        formula = parse_dimacs(Path(path).read_bytes())
        result = Counter(formula, mode, cache_cap=cache_cap, deadline=_deadline(timeout)).count()
    except CountTimeout:
        return [name, mode.value, "TIMEOUT", "", f"{time.perf_counter() - start:.3f}", "", "", "", ""]
    except (OSError, DimacsError, UnicodeDecodeError, RecursionError):
        return [name, mode.value, "ERROR", "", f"{time.perf_counter() - start:.3f}", "", "", "", ""]
    wall = time.perf_counter() - start
    s = result.stats
    ratio = s.blocked_removed / s.decisions if s.decisions else 0.0
    return [name, mode.value, "OK", str(result.count), f"{wall:.3f}", s.decisions,
            s.blocked_removed, f"{ratio:.3f}", s.cache_hits]


def benchmark(directory: str, modes: Sequence[BceMode], out=None, timeout: float | None = None,
              cache_cap: int | None = None, jobs: int = 1) -> int:
    """One CSV row per (instance, mode), instances in name order."""
    out = out or sys.stdout
    files = sorted(str(p) for p in Path(directory).iterdir() if p.is_file())
    tasks = [(f, m, timeout, cache_cap) for f in files for m in modes]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_bench_one, *zip(*tasks)))
    else:
        rows = [_bench_one(*t) for t in tasks]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(rows)
    out.write(buf.getvalue())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pmcbce", description="Projected model counter with blocked clause elimination.")
    p.add_argument("input", nargs="?", help="DIMACS CNF file ('c p show ... 0' lines select counted variables)")
    p.add_argument("--bce", choices=[m.value for m in BceMode], default=BceMode.DYN.value,
                   help="blocked clause elimination: off, pre (root only) or dyn (every node); default dyn")
    p.add_argument("--stats", action="store_true", help="print search statistics as comment lines")
    p.add_argument("--oracle-check", action="store_true", help="cross-check against brute-force enumeration")
    p.add_argument("--cache-cap", type=int, metavar="N", help="clear the component cache beyond N entries")
    p.add_argument("--timeout", type=float, metavar="S", help="give up after S seconds")
    p.add_argument("--bench", metavar="DIR", help="benchmark every file of DIR and print CSV")
    p.add_argument("--modes", default="off,pre,dyn", help="comma-separated modes for --bench")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers for --bench")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 100000))
    if args.bench:
        try:
            modes = [BceMode(m.strip()) for m in args.modes.split(",") if m.strip()]
        except ValueError:
            print(f"error: bad --modes {args.modes!r}", file=sys.stderr)
            return EXIT_ERROR
        if not os.path.isdir(args.bench):
            print(f"error: {args.bench} is not a directory", file=sys.stderr)
            return EXIT_ERROR
        return benchmark(args.bench, modes, timeout=args.timeout, cache_cap=args.cache_cap, jobs=args.jobs)
    if args.input is None:
        print("error: an input file or --bench DIR is required", file=sys.stderr)
        return EXIT_ERROR
    config = RunConfig(args.input, BceMode(args.bce), args.stats, args.oracle_check, args.cache_cap, args.timeout)
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
