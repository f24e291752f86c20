"""Dynamic work distribution over worker threads.

Workers share one counter holding the first even integer of the next
unclaimed segment. A claim is a fetch-and-add of the segment span; a worker
that fetches a start past the limit exits. The compute kernels release the
GIL, so threads overlap on multicore machines.
"""
from __future__ import annotations

import sys
import threading
import time
from dataclasses import dataclass, field

from .errors import ParameterError, WorkerError
from .sieve import BasePrimes, TileSpec
from .verifier import (DEFAULT_BATCH_SIZE, Phase2Table, SegmentJob, SegmentReport,
                       SmallPrimeTable, verify_segment)

_log_lock = threading.Lock()


def safe_log(message: str = "", stream=None) -> None:
    """Write ``message`` plus a newline as one indivisible unit."""
    stream = stream if stream is not None else sys.stderr
    with _log_lock:
        stream.write(f"{message}\n")
        stream.flush()


class WorkPool:
    """Shared segment counter over the even integers ``[start, limit]``.

    ``claim_log``, if given, is a list that receives ``(worker, A)`` for every
    successful claim.
    """

    def __init__(self, start: int, limit: int, seg_size: int, claim_log: list | None = None):
        if start % 2 or limit % 2 or not 4 <= start <= limit:
            raise ParameterError(f"invalid range [{start}, {limit}]")
        if seg_size < 1:
            raise ParameterError("seg_size must be at least 1")
        self.start = start
        self.limit = limit
        self.seg_span = 2 * seg_size
        self.claim_log = claim_log
        self._next = start
        # stands in for a hardware atomic; held only for the add itself
        self._lock = threading.Lock()

    @property
    def total_evens(self) -> int:
        return (self.limit - self.start) // 2 + 1

    @property
    def num_segments(self) -> int:
        return -(-self.total_evens * 2 // self.seg_span)

    def fetch_add(self) -> int:
        with self._lock:
            a = self._next
            self._next = a + self.seg_span
        return a

    def claim_next(self, worker: int = 0) -> SegmentJob | None:
        """Next segment, or ``None`` once the range is exhausted."""
        a = self.fetch_add()
        if a > self.limit:
            return None
        if self.claim_log is not None:
            self.claim_log.append((worker, a))
        b = min(a + self.seg_span - 2, self.limit)
        return SegmentJob(a, b, (a - self.start) // self.seg_span)


@dataclass(frozen=True, eq=False)
class SharedTables:
    base: BasePrimes
    small: SmallPrimeTable
    phase2: Phase2Table
    tiles: TileSpec = field(default_factory=TileSpec)

    @classmethod
    def build(cls, limit: int, p_small: int, phase2_limit: int,
              tiles: TileSpec | None = None) -> SharedTables:
        return cls(BasePrimes.for_bound(limit), SmallPrimeTable.build(p_small),
                   Phase2Table.build(phase2_limit), tiles or TileSpec())


@dataclass(frozen=True)
class ProgressSnapshot:
    evens_done: int
    throughput: float
    eta: float | None  # seconds; None until a rate has been observed
    per_worker_segments: tuple[int, ...]

    def format(self) -> str:
        eta = "--:--" if self.eta is None else _hms(self.eta)
        return f"progress: {self.evens_done} evens, {self.throughput:.0f}/s, eta {eta}"


def _hms(seconds: float) -> str:
    s = int(round(seconds))
    return f"{s // 3600:02d}:{s % 3600 // 60:02d}:{s % 60:02d}"


class ProgressTracker:
    """Per-worker counters; each slot is written only by its own worker."""

    def __init__(self, workers: int, total_evens: int):
        self.total_evens = total_evens
        self.evens = [0] * workers
        self.segments = [0] * workers
        self.started = time.monotonic()

    def record(self, worker: int, report: SegmentReport) -> None:
        self.evens[worker] += report.evens_checked
        self.segments[worker] += 1


def progress_snapshot(tracker: ProgressTracker, now: float | None = None) -> ProgressSnapshot:
    now = time.monotonic() if now is None else now
    done = sum(tracker.evens)
    elapsed = now - tracker.started
    rate = done / elapsed if done and elapsed > 0 else 0.0
    eta = (tracker.total_evens - done) / rate if rate else None
    return ProgressSnapshot(done, rate, eta, tuple(tracker.segments))


class ProgressMonitor(threading.Thread):
    """Prints a snapshot every ``interval`` seconds until stopped."""

    def __init__(self, tracker: ProgressTracker, interval: float = 1.0, stream=None):
        super().__init__(name="progress-monitor", daemon=True)
        self.tracker = tracker
        self.interval = interval
        self.stream = stream
        self.snapshots: list[ProgressSnapshot] = []
        self._stop_event = threading.Event()

    def run(self):
        while not self._stop_event.wait(self.interval):
            snap = progress_snapshot(self.tracker)
            self.snapshots.append(snap)
            safe_log(snap.format(), self.stream)

    def stop(self):
        self._stop_event.set()
        self.join()


@dataclass
class PoolResult:
    aggregate: SegmentReport
    reports: list[SegmentReport]
    wall_time: float
    workers: int
    snapshots: list[ProgressSnapshot] = field(default_factory=list)


def run_workers(k: int, pool: WorkPool, tables: SharedTables, batch_size: int = DEFAULT_BATCH_SIZE,
                progress: bool = False, interval: float = 1.0, log_stream=None,
                inject_counterexamples=frozenset()) -> PoolResult:
    """Run ``k`` workers until the pool is exhausted.

    A counterexample makes every worker stop after its current segment. If a
    worker raises, the others drain the same way and :class:`WorkerError` is
    raised once all have exited.
    """
    if k < 1:
        raise ParameterError("need at least one worker")
    stop = threading.Event()
    tracker = ProgressTracker(k, pool.total_evens)
    per_worker: list[list[SegmentReport]] = [[] for _ in range(k)]
    failures: list[tuple[int, BaseException]] = []

    def work(w: int) -> None:
        try:
            while not stop.is_set():
                job = pool.claim_next(w)
                if job is None:
                    return
                rep = verify_segment(job, tables.base, tables.small, tables.phase2, tables.tiles,
                                     batch_size, inject_counterexamples)
                per_worker[w].append(rep)
                tracker.record(w, rep)
                if rep.counterexamples:
                    safe_log(f"worker {w}: counterexample in [{job.a}, {job.b}]: "
                             f"{rep.counterexamples}", log_stream)
                    stop.set()
        except BaseException as exc:  # reported after join
            failures.append((w, exc))
            safe_log(f"worker {w} failed: {exc!r}", log_stream)
            stop.set()

    t0 = time.perf_counter()
    monitor = ProgressMonitor(tracker, interval, log_stream) if progress else None
    if monitor:
        monitor.start()
    threads = [threading.Thread(target=work, args=(w,), name=f"worker-{w}") for w in range(k)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    wall = time.perf_counter() - t0
    if monitor:
        monitor.stop()
        final = progress_snapshot(tracker)
        monitor.snapshots.append(final)
        safe_log(final.format(), log_stream)
    if failures:
        w, exc = failures[0]
        raise WorkerError(f"worker {w} failed: {exc}") from exc
    reports = [r for rs in per_worker for r in rs]
    return PoolResult(SegmentReport.merge(reports), sorted(reports, key=lambda r: r.a), wall, k,
                      monitor.snapshots if monitor else [])
