"""Command line: ``verify``, ``schema`` and ``dims``."""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

from .report import schema_text
from .suites import SUITE_NAMES, run_job
from .symtensor import Frame
from .tower import dimension_table

DEFAULTS = {"n": 2, "m": 1, "k": 1, "l": 1, "seed": 0, "samples": 20, "suite": "all", "grid": None}
THREADS_ENV = "PROLONGATION_LAB_THREADS"


class UsageError(Exception):
    pass


def parse_grid(text: str) -> list[tuple[int, int, int, int]]:
    """``nmax=3,mmax=2,kmax=2`` -> every ``(n, m, k, l)`` with ``2 <= n``, ``1 <= l < n``."""
    limits = {"nmax": 3, "mmax": 1, "kmax": 1}
    for part in filter(None, text.split(",")):
        name, _, value = part.partition("=")
        name = name.strip()
        if name not in limits or not value.strip().isdigit():
            raise UsageError(f"bad grid entry {part!r}; expected nmax=, mmax=, kmax=")
        limits[name] = int(value)
    if limits["nmax"] < 2 or limits["mmax"] < 1 or limits["kmax"] < 1:
        raise UsageError("grid needs nmax >= 2, mmax >= 1, kmax >= 1")
    return [(n, m, k, l) for n in range(2, limits["nmax"] + 1) for m in range(1, limits["mmax"] + 1)
            for k in range(1, limits["kmax"] + 1) for l in range(1, n)]


def validate(n: int, m: int, k: int, l: int) -> None:
    if not 1 <= l < n:
        raise UsageError(f"need 1 <= l < n, got l={l}, n={n}")
    if k < 1 or m < 1:
        raise UsageError(f"need k >= 1 and m >= 1, got k={k}, m={m}")


def resolve(args: argparse.Namespace) -> dict:
    """Merge flags over the config file over the defaults."""
    config = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        unknown = set(config) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
    out = {}
    for key, default in DEFAULTS.items():
        flag = getattr(args, key, None)
        out[key] = flag if flag is not None else config.get(key, default)
    return out


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    cap = os.cpu_count() or 1
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError as exc:
        raise UsageError(f"{THREADS_ENV} must be an integer") from exc
    return max(1, min(value, cap))


def run(config: dict) -> tuple[int, dict]:
    """Execute the configured suites; returns ``(exit code, run report)``."""
    if config["grid"]:
        tuples = parse_grid(config["grid"])
    else:
        tuples = [tuple(int(config[key]) for key in ("n", "m", "k", "l"))]
        validate(*tuples[0])
    suites = SUITE_NAMES if config["suite"] == "all" else tuple(s.strip() for s in config["suite"].split(","))
    for s in suites:
        if s not in SUITE_NAMES:
            raise UsageError(f"unknown suite {s!r}; choose from {', '.join(SUITE_NAMES)} or all")
    seed, samples = int(config["seed"]), int(config["samples"])
    if seed < 0 or samples < 0:
        raise UsageError("seed and samples must be non-negative")
    jobs = [(s, t, seed, samples) for t in tuples for s in suites]
    workers = _threads()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(run_job, jobs))
    else:
        reports = [run_job(job) for job in jobs]
    failures = sum(len(r["failures"]) for r in reports)
    result = {
        "seed": seed,
        "samples": samples,
        "status": "pass" if failures == 0 else "fail",
        "failures": failures,
        "reports": reports,
    }
    return (0 if failures == 0 else 1), result


def _summary_line(r: dict) -> str:
    params = ",".join(f"{k}={v}" for k, v in r["parameters"].items())
    status = "PASS" if not r["failures"] else "FAIL"
    return f"{status} {r['claim']} [{params}] checks={r['checks']} failures={len(r['failures'])}"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prolongation-lab", description="Exact checks on the prolongation tower.")
    parser.add_argument("--format", dest="top_format", choices=("json", "text"), default=None,
                        help="schema format when no subcommand is given")
    sub = parser.add_subparsers(dest="command")

    verify = sub.add_parser("verify", help="run verification suites")
    for name in ("n", "m", "k", "l", "seed", "samples"):
        verify.add_argument(f"--{name}", type=int, default=None)
    verify.add_argument("--suite", default=None, help=f"comma list of {', '.join(SUITE_NAMES)}, or all")
    verify.add_argument("--grid", default=None, help="nmax=..,mmax=..,kmax=.. sweep instead of one tuple")
    verify.add_argument("--json", default=None, metavar="PATH", help="write the run report (- for stdout)")
    verify.add_argument("--format", choices=("text", "json"), default="text")
    verify.add_argument("--config", default=None, help="JSON file with defaults for the flags")

    schema = sub.add_parser("schema", help="print the report schema")
    schema.add_argument("--format", choices=("json", "text"), default="json")

    dims = sub.add_parser("dims", help="closed-form dimensions of the tower")
    for name in ("n", "m", "k", "l"):
        dims.add_argument(f"--{name}", type=int, default=None)
    dims.add_argument("--format", choices=("text", "json"), default="text")
    dims.add_argument("--config", default=None)
    return parser


def _dims(config: dict, fmt: str) -> str:
    n, m, k, l = (int(config[key]) for key in ("n", "m", "k", "l"))
    validate(n, m, k, l)
    table = dimension_table(Frame(n=n, m=m, k=k, l=l))
    if fmt == "json":
        return json.dumps(table, indent=2, sort_keys=True)
    lines = [f"n={n} m={m} k={k} l={l} d={n - l}", "  q    dim M^q   fiber"]
    for row in table["levels"]:
        lines.append(f"{row['q']:>3} {row['dim']:>10} {row['fiber']:>7}")
    lines.append(f"Grassmannian          {table['grassmannian']}")
    lines.append(f"top jet fiber         {table['top_jet_fiber']}")
    lines.append(f"integral elements     {table['integral_elements']}")
    lines.append(f"flag distribution     {table['flag_distribution']}")
    return "\n".join(lines)


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command is None:
            print(schema_text(args.top_format or "json"))
            return 0
        if args.command == "schema":
            print(schema_text(args.format))
            return 0
        config = resolve(args)
        if args.command == "dims":
            print(_dims(config, args.format))
            return 0
        code, result = run(config)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(result, indent=2, sort_keys=True)
    if args.json == "-":
        print(text)
    elif args.json:
        with open(args.json, "w") as fh:
            fh.write(text + "\n")
    if args.json != "-":
        if args.format == "json":
            print(text)
        else:
            for r in result["reports"]:
                print(_summary_line(r))
            print(f"{result['status'].upper()} failures={result['failures']} jobs={len(result['reports'])}")
    return code


if __name__ == "__main__":
    sys.exit(main())
