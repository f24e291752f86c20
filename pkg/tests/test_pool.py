import io
import statistics
import threading
import time

import pytest

from goldbach import (ParameterError, SegmentJob, SharedTables, WorkPool, WorkerError,
                      progress_snapshot, run_workers, safe_log)
from goldbach.pool import ProgressTracker


def test_claims_single_thread():
    pool = WorkPool(4, 40, 10)
    assert pool.claim_next() == SegmentJob(4, 22, 0)
    assert pool.claim_next() == SegmentJob(24, 40, 1)
    assert pool.claim_next() is None
    assert pool.claim_next() is None


def test_single_even():
    pool = WorkPool(4, 4, 10)
    assert pool.claim_next() == SegmentJob(4, 4, 0)
    assert pool.claim_next() is None


def test_short_final_segment():
    pool = WorkPool(100, 1000, 7)
    jobs = list(iter(pool.claim_next, None))
    assert jobs[-1].b == 1000
    assert pool.total_evens == 451 and pool.num_segments == len(jobs) == 65
    assert sum(j.count for j in jobs) == 451 and jobs[-1].count == 451 - 64 * 7


@pytest.mark.parametrize("args", [(3, 10, 1), (4, 2, 1), (2, 10, 1), (4, 10, 0)])
def test_pool_validation(args):
    with pytest.raises(ParameterError):
        WorkPool(*args)


def claim_stress(threads=8, segments=1000, seg_size=3):
    log = []
    pool = WorkPool(4, 4 + 2 * seg_size * segments - 2, seg_size, claim_log=log)
    barrier = threading.Barrier(threads)

    def claimer(w):
        barrier.wait()
        while pool.claim_next(w) is not None:
            pass

    ts = [threading.Thread(target=claimer, args=(w,)) for w in range(threads)]
    for t in ts:
        t.start()
    for t in ts:
        t.join()
    return pool, log


def test_concurrent_claims_exactly_once():
    pool, log = claim_stress()
    starts = sorted(a for _, a in log)
    assert starts == list(range(4, pool.limit + 1, pool.seg_span))


def test_safe_log_basic():
    buf = io.StringIO()
    safe_log("hello", buf)
    safe_log("", buf)
    assert buf.getvalue() == "hello\n\n"


def test_safe_log_concurrent_lines_intact():
    buf = io.StringIO()

    def writer(w):
        for i in range(1000):
            safe_log(f"worker={w} msg={i} " + "x" * (i % 50), buf)

    ts = [threading.Thread(target=writer, args=(w,)) for w in range(8)]
    for t in ts:
        t.start()
    for t in ts:
        t.join()
    lines = buf.getvalue().splitlines()
    assert len(lines) == 8000
    seen = set()
    for line in lines:
        head, tail = line.rsplit(" ", 1) if line.count(" ") == 2 else (line.rstrip(), "")
        w, i = (int(x.split("=")[1]) for x in head.split(" ")[:2])
        assert tail == "x" * (i % 50)
        seen.add((w, i))
    assert len(seen) == 8000


def test_progress_snapshot_states():
    tr = ProgressTracker(2, 1000)
    snap = progress_snapshot(tr)
    assert snap.evens_done == 0 and snap.throughput == 0 and snap.eta is None
    assert snap.format() == "progress: 0 evens, 0/s, eta --:--"
    tr.evens[0] = 400
    tr.evens[1] = 100
    snap = progress_snapshot(tr, now=tr.started + 10)
    assert snap.throughput == 50 and snap.eta == 10
    assert snap.format() == "progress: 500 evens, 50/s, eta 00:00:10"


@pytest.fixture(scope="module")
def tables_1e7():
    return SharedTables.build(10**7, 10**6, 0)


@pytest.fixture(scope="module")
def reference_1e7(tables_1e7):
    return run_workers(1, WorkPool(4, 10**7, 250_000), tables_1e7)


@pytest.mark.parametrize("k", [2, 4])
def test_worker_count_invariance(k, tables_1e7, reference_1e7):
    res = run_workers(k, WorkPool(4, 10**7, 250_000), tables_1e7)
    ref = reference_1e7.aggregate
    agg = res.aggregate
    assert agg.evens_checked == ref.evens_checked == 5 * 10**6 - 1
    assert (agg.unverified_after_phase1, agg.counterexamples) == (0, []) == (
        ref.unverified_after_phase1, ref.counterexamples)
    assert (agg.max_min_prime, agg.max_min_n) == (ref.max_min_prime, ref.max_min_n)
    assert [(r.a, r.b) for r in res.reports] == [(r.a, r.b) for r in reference_1e7.reports]


def test_progress_monitor_live(tables_1e7):
    buf = io.StringIO()
    res = run_workers(2, WorkPool(4, 10**7, 10_000), tables_1e7, progress=True,
                      interval=0.002, log_stream=buf)
    done = [s.evens_done for s in res.snapshots]
    assert len(done) >= 10
    assert done == sorted(done)
    assert done[-1] == 5 * 10**6 - 1
    assert buf.getvalue().splitlines()[-1].startswith(f"progress: {5 * 10**6 - 1} evens")
    assert sum(res.snapshots[-1].per_worker_segments) == 500


def test_counterexample_stops_workers(tables_1e7):
    log = []
    res = run_workers(2, WorkPool(4, 10**7, 10_000, claim_log=log), tables_1e7,
                      inject_counterexamples={100_000}, log_stream=io.StringIO())
    assert res.aggregate.counterexamples == [100_000]
    assert len(log) < 100  # drained long before the 500 segments


def test_worker_error_propagates(tables_1e7, monkeypatch):
    import goldbach.pool as pool_mod
    real = pool_mod.verify_segment

    def flaky(job, *args):
        if job.index == 3:
            raise MemoryError("simulated")
        return real(job, *args)

    monkeypatch.setattr(pool_mod, "verify_segment", flaky)
    log = []
    with pytest.raises(WorkerError, match="simulated"):
        run_workers(3, WorkPool(4, 10**7, 10_000, claim_log=log), tables_1e7,
                    log_stream=io.StringIO())
    assert len(log) < 500


@pytest.mark.slow
def test_monitor_does_not_slow_workers():
    tables = SharedTables.build(10**8, 10**6, 0)

    def timed(progress):
        t = time.perf_counter()
        run_workers(1, WorkPool(4, 10**8, 10**7), tables, progress=progress,
                    log_stream=io.StringIO())
        return time.perf_counter() - t

    timed(False)
    offs, ons = [], []
    for i in range(6):
        for progress in ((False, True) if i % 2 else (True, False)):
            (ons if progress else offs).append(timed(progress))
    noise = statistics.stdev(offs) / statistics.mean(offs)
    if noise > 0.01:
        pytest.skip(f"baseline run-to-run spread {noise:.1%} cannot resolve a 2% difference")
    off, on = statistics.median(offs), statistics.median(ons)
    assert abs(on - off) / off < 0.02
