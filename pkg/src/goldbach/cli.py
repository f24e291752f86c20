"""``goldbach [OPTIONS] LIMIT``: verify every even integer in ``[start, LIMIT]``.

Exit codes: 0 range verified, 1 usage/resource/internal error, 2 counterexample.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field

import psutil

from .errors import GoldbachError, ParameterError, ResourceError, UsageError
from .oddbits import U64_MAX
from .pool import SharedTables, WorkPool, run_workers, safe_log
from .sieve import DEFAULT_ODDS_PER_TILE, TileSpec
from .verifier import DEFAULT_BATCH_SIZE, DEFAULT_P_SMALL, DEFAULT_PHASE2_LIMIT

DEFAULT_SEG_SIZE = 200_000_000
MAX_SEG_SIZE = (1 << 32) - 1

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_COUNTEREXAMPLE = 2


@dataclass(frozen=True)
class Config:
    limit: int
    start: int = 4
    workers: int = 1
    seg_size: int = DEFAULT_SEG_SIZE
    p_small: int = DEFAULT_P_SMALL
    batch_size: int = DEFAULT_BATCH_SIZE
    phase2_limit: int = DEFAULT_PHASE2_LIMIT
    progress: bool = False
    json: bool = False
    mem_cap: int | None = None
    odds_per_tile: int = DEFAULT_ODDS_PER_TILE
    progress_interval: float = 1.0

    @property
    def worker_count(self) -> int:
        """``workers`` with -1 resolved to the number of logical cores."""
        return (os.cpu_count() or 1) if self.workers == -1 else self.workers

    @property
    def total_evens(self) -> int:
        return (self.limit - self.start) // 2 + 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _u64(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {text}")
    return v


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="goldbach", description="Verify Goldbach's conjecture for every even "
                "integer in [--start, LIMIT].", allow_abbrev=False)
    p.add_argument("limit", type=_u64, metavar="LIMIT", help="inclusive upper end of the range")
    p.add_argument("--start", type=_u64, default=4, help="first even integer to verify (default 4)")
    p.add_argument("--workers", "--gpus", dest="workers", type=_int, default=1,
                   help="worker threads; -1 uses every logical core (--gpus is an alias)")
    p.add_argument("--seg-size", type=_u64, default=DEFAULT_SEG_SIZE,
                   help="even integers per segment")
    p.add_argument("--p-small", type=_u64, default=DEFAULT_P_SMALL,
                   help="largest prime tried by Phase 1")
    p.add_argument("--batch-size", type=_u64, default=DEFAULT_BATCH_SIZE,
                   help="small primes per Phase 1 batch")
    p.add_argument("--phase2-limit", type=_u64, default=DEFAULT_PHASE2_LIMIT,
                   help="size of the Phase 2 prime table; 0 disables it")
    p.add_argument("--progress", action="store_true", help="print throughput and ETA to stderr")
    p.add_argument("--json", action="store_true", help="print the summary as one JSON object")
    p.add_argument("--mem-cap", type=_u64, default=None, metavar="BYTES",
                   help="refuse to run if the estimated footprint exceeds BYTES")
    return p


def parse_args(argv=None, stderr=None) -> Config:
    """Parse and validate a command line. Raises :class:`UsageError`."""
    ns = build_parser().parse_args(argv)
    limit, start = ns.limit, ns.start
    if limit > U64_MAX:
        raise UsageError(f"LIMIT={limit} is beyond the 64-bit ceiling {U64_MAX}")
    if limit % 2:
        limit -= 1
        safe_log(f"warning: odd LIMIT rounded down to {limit}", stderr)
    if start % 2:
        start += 1
        safe_log(f"warning: odd --start rounded up to {start}", stderr)
    if start < 4:
        raise UsageError(f"--start={start} must be at least 4")
    if start > limit:
        raise UsageError(f"--start={start} exceeds LIMIT={limit}")
    if ns.workers == 0 or ns.workers < -1:
        raise UsageError("--workers must be a positive count or -1")
    if not 1 <= ns.seg_size <= MAX_SEG_SIZE:
        raise UsageError(f"--seg-size must be in [1, {MAX_SEG_SIZE}] "
                         "so the unverified count fits 32 bits")
    if ns.p_small < 3:
        raise UsageError("--p-small must be at least 3")
    if ns.p_small >= 1 << 32:
        raise UsageError("--p-small must be below 2**32")
    if ns.batch_size < 1:
        raise UsageError("--batch-size must be at least 1")
    if ns.phase2_limit >= 1 << 32:
        raise UsageError("--phase2-limit must be below 2**32")
    return Config(limit=limit, start=start, workers=ns.workers, seg_size=ns.seg_size,
                  p_small=ns.p_small, batch_size=ns.batch_size, phase2_limit=ns.phase2_limit,
                  progress=ns.progress, json=ns.json, mem_cap=ns.mem_cap)


def _prime_table_bytes(x: int) -> int:
    """Upper bound on bytes for a uint32 table of the primes <= x, plus sieve scratch."""
    if x < 17:
        return 64
    return int(1.25506 * x / math.log(x)) * 4 + x // 2


@dataclass(frozen=True)
class MemoryEstimate:
    qbits_bytes: int
    verified_bytes: int
    tile_bytes: int
    shared_bytes: int
    workers: int

    @property
    def per_worker(self) -> int:
        return self.qbits_bytes + self.verified_bytes + self.tile_bytes

    @property
    def total(self) -> int:
        return self.shared_bytes + self.workers * self.per_worker

    def format(self) -> str:
        mb = 1e6
        return (f"memory: {self.per_worker / mb:.1f} MB/worker x {self.workers} "
                f"+ {self.shared_bytes / mb:.1f} MB shared = {self.total / mb:.1f} MB")


def estimate_memory(config: Config) -> MemoryEstimate:
    seg = min(config.seg_size, config.total_evens)
    span = 2 * seg
    segments = -(-config.total_evens // seg)
    shared = (_prime_table_bytes(config.p_small) + _prime_table_bytes(config.phase2_limit)
              + _prime_table_bytes(math.isqrt(config.limit)))
    return MemoryEstimate(qbits_bytes=(span + config.p_small) // 16, verified_bytes=seg // 8,
                          tile_bytes=config.odds_per_tile // 8, shared_bytes=shared,
                          workers=min(config.worker_count, segments))


def validate_resources(config: Config, available: int | None = None) -> MemoryEstimate:
    """Raise :class:`ResourceError` unless the run fits in ``mem_cap`` and in
    available memory; called before any table is built or worker started."""
    est = estimate_memory(config)
    if config.mem_cap is not None and est.total > config.mem_cap:
        raise ResourceError(f"estimated footprint {est.total} bytes exceeds --mem-cap="
                            f"{config.mem_cap}; lower --seg-size or --workers")
    available = psutil.virtual_memory().available if available is None else available
    if est.total > available:
        raise ResourceError(f"estimated footprint {est.total} bytes exceeds available "
                            f"memory ({available} bytes)")
    return est


@dataclass
class RunSummary:
    start: int
    limit: int
    total_evens: int
    unverified_total: int
    phase2_total: int
    counterexamples: list[int] = field(default_factory=list)
    max_min_prime: int = 0
    max_min_prime_n: int = 0
    wall_time: float = 0.0
    workers_used: int = 1

    @property
    def verified(self) -> bool:
        return not self.counterexamples

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    def format(self) -> str:
        lines = [
            f"range: [{self.start}, {self.limit}]",
            f"total_evens: {self.total_evens}",
            f"unverified_after_phase1: {self.unverified_total}",
            f"phase2_resolved: {self.phase2_total}",
            f"max_min_prime: {self.max_min_prime} (n = {self.max_min_prime_n})",
            f"wall_time: {self.wall_time:.3f} s",
            f"workers (--workers): {self.workers_used}",
        ]
        if self.counterexamples:
            lines.append("COUNTEREXAMPLE: " + ", ".join(map(str, self.counterexamples)))
        else:
            lines.append("result: verified")
        return "\n".join(lines)


def execute(config: Config, claim_log: list | None = None, log_stream=None,
            inject_counterexamples=frozenset()) -> RunSummary:
    """Build the shared tables, run the pool and summarise. Raises on error."""
    t0 = time.perf_counter()
    workers = min(config.worker_count, -(-config.total_evens // config.seg_size))
    tables = SharedTables.build(config.limit, config.p_small, config.phase2_limit,
                                TileSpec(config.odds_per_tile))
    pool = WorkPool(config.start, config.limit, config.seg_size, claim_log)
    res = run_workers(workers, pool, tables, config.batch_size, config.progress,
                      config.progress_interval, log_stream, inject_counterexamples)
    agg = res.aggregate
    return RunSummary(config.start, config.limit, agg.evens_checked, agg.unverified_after_phase1,
                      agg.phase2_resolved, agg.counterexamples, agg.max_min_prime, agg.max_min_n,
                      time.perf_counter() - t0, workers)


def run(config: Config, stdout=None, stderr=None, claim_log: list | None = None,
        inject_counterexamples=frozenset()) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    try:
        est = validate_resources(config)
        safe_log(est.format(), stderr)
        summary = execute(config, claim_log, stderr, inject_counterexamples)
    except GoldbachError as exc:
        safe_log(f"error: {exc}", stderr)
        return EXIT_ERROR
    print(summary.to_json() if config.json else summary.format(), file=stdout, flush=True)
    return EXIT_OK if summary.verified else EXIT_COUNTEREXAMPLE


def efficiency(t1: float, k: int, tk: float) -> float:
    """Parallel efficiency ``t1 / (k * tk)``."""
    if k < 1:
        raise ParameterError("k must be at least 1")
    if tk <= 0:
        raise ParameterError("tk must be positive")
    return t1 / (k * tk)


@dataclass(frozen=True)
class BenchReport:
    t1: float
    k: int
    tk: float

    @property
    def efficiency(self) -> float:
        return efficiency(self.t1, self.k, self.tk)


def bench(config: Config, k: int) -> BenchReport:
    """Time the pool alone (tables prebuilt) with one worker and with ``k``."""
    tables = SharedTables.build(config.limit, config.p_small, config.phase2_limit,
                                TileSpec(config.odds_per_tile))
    times = []
    for workers in (1, k):
        pool = WorkPool(config.start, config.limit, config.seg_size)
        times.append(run_workers(workers, pool, tables, config.batch_size).wall_time)
    return BenchReport(times[0], k, times[1])


def main(argv=None) -> int:
    try:
        config = parse_args(argv)
    except UsageError as exc:
        safe_log(f"goldbach: error: {exc}")
        safe_log(build_parser().format_usage().rstrip())
        return EXIT_ERROR
    return run(config)
