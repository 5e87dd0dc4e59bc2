#!/usr/bin/env python3
"""
krkit command-line front end

Subcommands:
    build   Build B^{r,s} and write its graph artifact (JSON or DOT)
    check   Run one check and print its verdict JSON
    matrix  Run every entry of a matrix config on a worker pool
    cache   Inspect or clear the build cache

Usage:
    python scripts/krkit.py build C1:2 1 2 --format json
    python scripts/krkit.py check simple C1:2 1 2
    python scripts/krkit.py check tensor A1:3 1,1 2,1
    python scripts/krkit.py matrix --config assets/desk_matrix.txt --workers 4
    python scripts/krkit.py cache --stats

Exit codes: 0 pass, 1 check failure, 2 budget exceeded, 3 I/O error, 4 usage error.
"""

import argparse
import asyncio
import json
import logging
import os
import pathlib
import sys
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from dotenv import load_dotenv

import config
from analysis import (Verdict, check_connected, check_decomposition, check_regular, check_sigma,
                      check_simple, check_tensor_connected, check_witness, map_verdict)
from artifact_cache import cache_enabled, get_cache, print_cache_stats
from cartan import Partition, parse_type
from errors import BudgetExceeded, KRKitError, KRSpecError
from graph_io import graph_from_dict, graph_to_dict, graph_to_dot, write_atomic
from kr import (KRSpec, VARIATIONS, build_kr, similarity_map, variation_map,
                variation_target)
from pm_diagrams import branching_check

logging.basicConfig(
    level=logging.INFO,
    format="[%(levelname)s] %(message)s",
    handlers=[
        logging.StreamHandler(sys.stdout)
    ]
)
log = logging.getLogger(__name__)

ROOT = pathlib.Path(__file__).resolve().parent.parent

CHECK_KINDS = ("decomp", "simple", "connected", "tensor", "similarity", "variation",
               "branching", "witness", "regular", "sigma")


def print_step_header(title: str, description: str = ""):
    log.info(f"\n{'='*60}")
    log.info(title)
    log.info(f"{'='*60}")
    if description:
        log.info(f"📝 {description}")


def print_summary(start_time: float, counts: Dict[str, int]):
    duration = time.time() - start_time
    log.info(f"\n{'='*60}")
    log.info("MATRIX SUMMARY")
    log.info(f"{'='*60}")
    log.info(f"⏱️  Total time: {duration:.2f} seconds")
    log.info(f"✅ Passed: {counts.get('pass', 0)}")
    log.info(f"❌ Failed: {counts.get('fail', 0)}")
    log.info(f"⚠️ Over budget: {counts.get('budget', 0)}")
    log.info(f"➖ Not applicable: {counts.get('skipped', 0)}")


def resolve_workers(workers: Optional[int] = None) -> int:
    """Pool size: CLI flag, then KRKIT_WORKERS, then config."""
    if workers:
        return max(1, workers)
    env_value = os.getenv(config.WORKERS_ENV_VAR)
    if env_value and env_value.isdigit():
        return max(1, int(env_value))
    return config.MATRIX_WORKERS


def artifact_path(spec: KRSpec, fmt: str) -> pathlib.Path:
    return ROOT / config.DATA_DIR / f"{spec.family}_{spec.n}_B{spec.r}_{spec.s}.{fmt}"


# ---------------------------------------------------------------------------
# build
# ---------------------------------------------------------------------------

def cmd_build(type_string: str, r: int, s: int, out: Optional[str] = None, fmt: str = "json",
              budget: Optional[int] = None) -> pathlib.Path:
    """Write the graph artifact of B^{r,s}; cached artifacts skip regeneration."""
    spec = KRSpec.parse(type_string, r, s)
    use_cache = cache_enabled()
    artifact = get_cache().get(spec.to_dict()) if use_cache else None
    if artifact is not None:
        log.info(f"✅ Cache hit for {spec}")
    else:
        artifact = graph_to_dict(build_kr(spec, budget).graph, spec.to_dict())
        if use_cache:
            get_cache().set(spec.to_dict(), artifact)
    if fmt == "json":
        text = json.dumps(artifact, indent=2, ensure_ascii=False) + "\n"
    elif fmt == "dot":
        text = graph_to_dot(graph_from_dict(artifact))
    else:
        raise KRSpecError(f"unknown format {fmt!r}")
    path = write_atomic(pathlib.Path(out) if out else artifact_path(spec, fmt), text)
    log.info(f"📁 Wrote {len(artifact['nodes'])} elements to {path}")
    return path


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------

def _pair(text: str) -> Tuple[int, int]:
    r, sep, s = text.partition(",")
    if not sep or not r.strip().isdigit() or not s.strip().isdigit():
        raise KRSpecError(f"expected r,s but got {text!r}")
    return int(r), int(s)


def _shape(text: str) -> Partition:
    try:
        return Partition(tuple(int(p) for p in text.split(",") if p.strip()))
    except ValueError as e:
        raise KRSpecError(f"bad shape {text!r}: {e}") from e


def _branching_verdict(spec_dict: Dict, ct, outer: Partition) -> Verdict:
    start = time.time()
    report = branching_check(ct, outer)
    detail = {"shape": str(outer), "components": len(report.from_crystal)}
    verdict = Verdict("branching", dict(spec_dict, shape=str(outer)), report.ok, detail)
    if not report.ok:
        verdict.counterexample = {"missing": [str(x) for x in report.missing],
                                  "extra": [str(x) for x in report.extra]}
    verdict.seconds = time.time() - start
    return verdict


def applicable_variations(spec: KRSpec) -> List[str]:
    kinds = []
    for kind, var in VARIATIONS.items():
        if var.source != spec.family or (var.r_not_n and spec.r == spec.n):
            continue
        kinds.append(kind)
    return kinds


def run_check(kind: str, type_string: str, args: Sequence[str], m: Optional[int] = None,
              kind_id: Optional[str] = None, shape: Optional[str] = None,
              budget: Optional[int] = None) -> List[Verdict]:
    """Run one check kind and return its verdicts.

    Raises:
        KRSpecError: bad arguments
        BudgetExceeded: a crystal did not fit the budget
    """
    if kind not in CHECK_KINDS:
        raise KRSpecError(f"unknown check {kind!r}; known: {', '.join(CHECK_KINDS)}")
    if kind == "tensor":
        if not args:
            raise KRSpecError("tensor needs at least one r,s pair")
        specs = [KRSpec.parse(type_string, *_pair(a)) for a in args]
        return [check_tensor_connected(specs, budget)]
    if kind == "branching":
        affine = parse_type(type_string)
        if shape:
            outer = _shape(shape)
        elif len(args) == 2 and all(a.isdigit() for a in args):
            r, s = int(args[0]), int(args[1])
            outer = Partition((s,) * r)
        else:
            raise KRSpecError("branching needs r s or --shape")
        return [_branching_verdict({"family": affine.family, "n": affine.n},
                                   affine.classical, outer)]
    if len(args) != 2 or not all(a.isdigit() for a in args):
        raise KRSpecError(f"{kind} expects r s, got {' '.join(args)!r}")
    spec = KRSpec.parse(type_string, int(args[0]), int(args[1]))
    if kind == "decomp":
        return [check_decomposition(build_kr(spec, budget))]
    if kind == "simple":
        return [check_simple(build_kr(spec, budget).graph, spec)]
    if kind == "connected":
        return [check_connected(build_kr(spec, budget))]
    if kind == "regular":
        return [check_regular(build_kr(spec, budget).graph, spec)]
    if kind == "sigma":
        return [check_sigma(build_kr(spec, budget), budget)]
    if kind == "witness":
        return [check_witness(spec, budget)]
    if kind == "similarity":
        verdicts = []
        for mult in ([m] if m else config.SIMILARITY_MULTIPLIERS):
            start = time.time()
            verdicts.append(map_verdict(similarity_map(spec, mult, budget), spec,
                                        "similarity", start))
        return verdicts
    kinds = [kind_id] if kind_id else applicable_variations(spec)
    if not kinds:
        raise KRSpecError(f"no variation starts from {spec}")
    verdicts = []
    for variation in kinds:
        start = time.time()
        cmap = variation_map(variation, spec, budget)
        verdict = map_verdict(cmap, spec, "variation", start)
        verdict.detail["targets"] = [str(t) for t in variation_target(variation, spec)]
        verdicts.append(verdict)
    return verdicts


def cmd_check(kind: str, type_string: str, args: Sequence[str], m: Optional[int] = None,
              kind_id: Optional[str] = None, shape: Optional[str] = None,
              budget: Optional[int] = None, out: Optional[str] = None) -> int:
    verdicts = run_check(kind, type_string, args, m, kind_id, shape, budget)
    payload = verdicts[0].to_json() if len(verdicts) == 1 else [v.to_json() for v in verdicts]
    text = json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
    if out:
        write_atomic(out, text)
        log.info(f"📁 Wrote verdict to {out}")
    else:
        sys.stdout.write(text)
    for verdict in verdicts:
        status = "✅" if verdict.passed else "❌"
        log.info(f"{status} {verdict.check} {verdict.spec}: {verdict.to_json()['verdict']}")
    return config.EXIT_PASS if all(v.passed for v in verdicts) else config.EXIT_FAIL


# ---------------------------------------------------------------------------
# matrix
# ---------------------------------------------------------------------------

@dataclass
class MatrixEntry:
    """One config line: `<type> <r> <s> [check,check,...]`."""

    type_string: str
    r: int
    s: int
    checks: Tuple[str, ...] = config.DEFAULT_CHECKS
    line: int = 0

    @property
    def label(self) -> str:
        return f"{self.type_string} {self.r} {self.s}"

    @property
    def file_stem(self) -> str:
        return f"{self.type_string.replace(':', '_')}_B{self.r}_{self.s}"


@dataclass
class EntryResult:
    entry: MatrixEntry
    results: List[Dict] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def statuses(self) -> List[str]:
        return [r["verdict"] for r in self.results]


def _is_factor(text: str) -> bool:
    r, dot, s = text.partition(".")
    return bool(dot) and r.isdigit() and s.isdigit()


def load_matrix(path: pathlib.Path) -> List[MatrixEntry]:
    """Parse a matrix config; blank lines and # comments are ignored.

    Raises:
        KRSpecError: a line is malformed or names an invalid spec or check
    """
    entries = []
    for number, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) not in (3, 4) or not fields[1].isdigit() or not fields[2].isdigit():
            raise KRSpecError(f"{path}:{number}: expected '<type> <r> <s> [checks]'")
        checks = tuple(fields[3].split(",")) if len(fields) == 4 else config.DEFAULT_CHECKS
        for check in checks:
            name, _, arg = check.partition(":")
            if name not in CHECK_KINDS:
                raise KRSpecError(f"{path}:{number}: unknown check {check!r}")
            if name == "variation" and arg and arg not in config.VARIATION_KINDS:
                raise KRSpecError(f"{path}:{number}: unknown variation {arg!r}")
            if name == "tensor" and arg and not all(_is_factor(p) for p in arg.split("+")):
                raise KRSpecError(f"{path}:{number}: tensor factors must read r.s+r.s, got {arg!r}")
        KRSpec.parse(fields[0], int(fields[1]), int(fields[2]))
        entries.append(MatrixEntry(fields[0], int(fields[1]), int(fields[2]), checks, number))
    return entries


def _entry_check(entry: MatrixEntry, check: str, budget: Optional[int]) -> List[Dict]:
    """Run one check of a matrix entry, mapping errors to verdict records.

    `similarity:3` pins m, `variation:1-i` pins the kind, and `tensor` pairs
    the entry with B^{1,1} of the same type; `tensor:2.1+1.2` lists the other
    factors instead.
    """
    name, _, arg = check.partition(":")
    args = [str(entry.r), str(entry.s)]
    spec_dict = {"type": entry.type_string, "r": entry.r, "s": entry.s}
    m = int(arg) if name == "similarity" and arg.isdigit() else None
    kind_id = arg if name == "variation" and arg else None
    if name == "tensor":
        extra = arg.split("+") if arg else ["1.1"]
        args = [f"{entry.r},{entry.s}"] + [p.replace(".", ",") for p in extra]
    try:
        verdicts = run_check(name, entry.type_string, args, m=m, kind_id=kind_id, budget=budget)
        return [v.to_json() for v in verdicts]
    except BudgetExceeded as e:
        return [{"check": check, "spec": spec_dict, "verdict": "budget", "detail": str(e)}]
    except KRSpecError as e:
        return [{"check": check, "spec": spec_dict, "verdict": "skipped", "detail": str(e)}]
    except KRKitError as e:
        log.error(f"❌ {entry.label} {check}: {e}")
        return [{"check": check, "spec": spec_dict, "verdict": "fail",
                 "detail": f"{type(e).__name__}: {e}"}]


def run_entry(entry: MatrixEntry, budget: Optional[int], out_dir: pathlib.Path) -> EntryResult:
    start = time.time()
    result = EntryResult(entry)
    for check in entry.checks:
        result.results.extend(_entry_check(entry, check, budget))
    result.seconds = time.time() - start
    record = {"entry": {"type": entry.type_string, "r": entry.r, "s": entry.s,
                        "checks": list(entry.checks)},
              "results": result.results,
              "timings": {"seconds": round(result.seconds, 3)}}
    write_atomic(out_dir / f"{entry.file_stem}.json",
                 json.dumps(record, indent=2, ensure_ascii=False) + "\n")
    bad = [s for s in result.statuses if s in ("fail", "budget")]
    status = "❌" if bad else "✅"
    log.info(f"{status} {entry.label}: {', '.join(result.statuses)} ({result.seconds:.2f}s)")
    return result


async def run_matrix_async(entries: List[MatrixEntry], budget: Optional[int],
                           out_dir: pathlib.Path, workers: int) -> List[EntryResult]:
    sem = asyncio.Semaphore(workers)

    async def guarded(entry: MatrixEntry) -> EntryResult:
        async with sem:
            return await asyncio.to_thread(run_entry, entry, budget, out_dir)

    return await asyncio.gather(*(guarded(e) for e in entries))


def cmd_matrix(config_path: Optional[str] = None, budget: Optional[int] = None,
               workers: Optional[int] = None, out_dir: Optional[str] = None) -> int:
    """Run a matrix config and write per-entry verdicts plus an aggregate report.

    Returns:
        exit code: 1 if any check failed, else 2 if any entry ran over budget, else 0
    """
    start_time = time.time()
    path = pathlib.Path(config_path) if config_path else (
        ROOT / config.ASSETS_DIR / config.DESK_MATRIX_FILE)
    entries = load_matrix(path)
    reports = pathlib.Path(out_dir) if out_dir else ROOT / config.REPORTS_DIR
    pool = resolve_workers(workers)
    print_step_header("KR MATRIX", f"{len(entries)} entries from {path} on {pool} workers")
    log.info("🚀 Starting matrix run")
    results = asyncio.run(run_matrix_async(entries, budget, reports, pool)) if entries else []

    counts: Dict[str, int] = {}
    for result in results:
        for status in result.statuses:
            counts[status] = counts.get(status, 0) + 1
    table = [{"entry": r.entry.label, "checks": len(r.results),
              "statuses": r.statuses, "seconds": round(r.seconds, 3)} for r in results]
    report = {"schema_version": config.SCHEMA_VERSION, "config": str(path),
              "summary": counts, "entries": table}
    write_atomic(reports / config.MATRIX_REPORT_FILE,
                 json.dumps(report, indent=2, ensure_ascii=False) + "\n")
    log.info(f"📁 Report saved to {reports / config.MATRIX_REPORT_FILE}")
    print_summary(start_time, counts)

    if counts.get("fail"):
        return config.EXIT_FAIL
    if counts.get("budget"):
        return config.EXIT_RESOURCE
    return config.EXIT_PASS


# ---------------------------------------------------------------------------
# cache
# ---------------------------------------------------------------------------

def cmd_cache(stats: bool = False, list_entries: bool = False, clear: bool = False,
              clean_expired: bool = False) -> int:
    cache = get_cache()
    if clear:
        cache.clear_all()
    if clean_expired:
        cleared = cache.clear_expired()
        if not cleared:
            log.info("🧹 No expired cache entries")
    if list_entries:
        rows = cache.list_entries(status="all")
        log.info(f"📊 {len(rows)} cache entries")
        for row in rows:
            log.info(f"  [{row['status']}] {row['summary']} ({row['artifact_size']} bytes)")
    if stats or not (clear or clean_expired or list_entries):
        print_cache_stats(cache)
    return config.EXIT_PASS


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Build and check affine Kirillov-Reshetikhin crystals",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Type strings are <family>:<n> with family one of
A1 B1 C1 D1 (untwisted), A2e A2o D2 (twisted A_{2n}, A_{2n-1}, D_{n+1}).

Examples:
  python scripts/krkit.py build A1:3 1 1 --format dot
  python scripts/krkit.py check simple C1:2 1 2
  python scripts/krkit.py check similarity A1:3 1 1 --m 2
  python scripts/krkit.py check variation C1:2 1 1 --kind-id 1-ii
  python scripts/krkit.py check branching B1:3 --shape 2,1
  python scripts/krkit.py matrix --workers 2
  python scripts/krkit.py cache --stats
        """
    )
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level")
    parser.add_argument("--budget", type=int, default=None,
                        help=f"Element budget (default: ${config.BUDGET_ENV_VAR} or "
                             f"{config.ELEMENT_BUDGET})")
    sub = parser.add_subparsers(dest="command", required=True)

    build = sub.add_parser("build", help="Build B^{r,s} and write its graph artifact")
    build.add_argument("type", help="Affine type, e.g. C1:3")
    build.add_argument("r", type=int)
    build.add_argument("s", type=int)
    build.add_argument("--out", help="Output file (default: data/<family>_<n>_B<r>_<s>.<fmt>)")
    build.add_argument("--format", choices=("json", "dot"), default="json")

    check = sub.add_parser("check", help="Run one check and print its verdict")
    check.add_argument("kind", choices=CHECK_KINDS)
    check.add_argument("type", help="Affine type, e.g. C1:3")
    check.add_argument("args", nargs="*", help="r s, or r,s pairs for tensor")
    check.add_argument("--m", type=int, help="Similarity multiplier (default: 2 and 3)")
    check.add_argument("--kind-id", choices=sorted(VARIATIONS),
                       help="Variation kind (default: every kind starting from this type)")
    check.add_argument("--shape", help="Branching shape as comma-separated parts")
    check.add_argument("--out", help="Write the verdict JSON here instead of stdout")

    matrix = sub.add_parser("matrix", help="Run a matrix config on a worker pool")
    matrix.add_argument("--config", help=f"Matrix file (default: "
                                         f"{config.ASSETS_DIR}/{config.DESK_MATRIX_FILE})")
    matrix.add_argument("--workers", type=int, help=f"Pool size (default: "
                                                    f"${config.WORKERS_ENV_VAR} or "
                                                    f"{config.MATRIX_WORKERS})")
    matrix.add_argument("--out-dir", help=f"Report directory (default: {config.REPORTS_DIR})")

    cache = sub.add_parser("cache", help="Inspect or clear the build cache")
    cache.add_argument("--stats", action="store_true", help="Show cache statistics")
    cache.add_argument("--list", action="store_true", help="List cache entries")
    cache.add_argument("--clear", action="store_true", help="Remove every entry")
    cache.add_argument("--clean-expired", action="store_true", help="Remove expired entries")
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv, dispatch, and map errors onto exit codes."""
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return config.EXIT_PASS if e.code == 0 else config.EXIT_USAGE
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    try:
        if args.command == "build":
            cmd_build(args.type, args.r, args.s, args.out, args.format, args.budget)
            return config.EXIT_PASS
        if args.command == "check":
            return cmd_check(args.kind, args.type, args.args, args.m, args.kind_id,
                             args.shape, args.budget, args.out)
        if args.command == "matrix":
            return cmd_matrix(args.config, args.budget, args.workers, args.out_dir)
        return cmd_cache(args.stats, args.list, args.clear, args.clean_expired)
    except KRSpecError as e:
        log.error(f"❌ {e}")
        return config.EXIT_USAGE
    except BudgetExceeded as e:
        log.error(f"❌ {e}")
        return config.EXIT_RESOURCE
    except OSError as e:
        log.error(f"❌ I/O error: {e}")
        return config.EXIT_IO
    except KRKitError as e:
        log.error(f"❌ {type(e).__name__}: {e}")
        return config.EXIT_FAIL


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
