"""Two-phase Goldbach verification of one segment of even integers.

Phase 1 tries every odd prime ``p <= p_small`` in ascending order and looks
``q = n - p`` up in the segment's sieved bitset, stopping at the first hit, so
the ``p`` it stops at is the minimal Goldbach prime of ``n``. Anything Phase 1
leaves unverified goes to Phase 2, which scans all primes up to ``n / 2``
using a precomputed prime table and Miller-Rabin.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numba as nb
import numpy as np

from .errors import InternalError, ParameterError
from .oddbits import OddBitset, U64_MAX, bits_to_bool
from .primality import _is_prime
from .sieve import BasePrimes, TileSpec, simple_sieve, tiled_sieve_segment

DEFAULT_P_SMALL = 1_000_000
DEFAULT_BATCH_SIZE = 2_000_000
DEFAULT_PHASE2_LIMIT = 100_000_000

_Z = np.uint64(0)
_ONE = np.uint64(1)
_TWO = np.uint64(2)
_THREE = np.uint64(3)
_FOUR = np.uint64(4)


@dataclass(frozen=True)
class SegmentJob:
    """Even integers ``a, a+2, ..., b`` claimed as one unit of work."""

    a: int
    b: int
    index: int = 0

    def __post_init__(self):
        if self.a % 2 or self.b % 2 or not 4 <= self.a <= self.b or self.b > U64_MAX:
            raise ParameterError(f"invalid segment [{self.a}, {self.b}]")

    @property
    def count(self) -> int:
        return (self.b - self.a) // 2 + 1


@dataclass(frozen=True, eq=False)
class SmallPrimeTable:
    primes: np.ndarray  # uint32, ascending, starts with 2
    p_small: int

    @classmethod
    def build(cls, p_small: int = DEFAULT_P_SMALL) -> SmallPrimeTable:
        if p_small < 3:
            raise ParameterError("p_small must be at least 3")
        return cls(simple_sieve(p_small).astype(np.uint32), int(p_small))

    @property
    def odd(self) -> np.ndarray:
        return self.primes[1:]

    def __len__(self) -> int:
        return len(self.primes)


@dataclass(frozen=True, eq=False)
class Phase2Table:
    primes: np.ndarray  # uint32, ascending; empty when disabled
    limit: int

    @classmethod
    def build(cls, limit: int = DEFAULT_PHASE2_LIMIT) -> Phase2Table:
        """``limit=0`` disables the table; Phase 2 then relies on Miller-Rabin."""
        if limit < 2:
            return cls(np.empty(0, dtype=np.uint32), 0)
        return cls(simple_sieve(limit).astype(np.uint32), int(limit))

    def __contains__(self, q: int) -> bool:
        if q > self.limit:
            raise ParameterError(f"{q} exceeds the table limit {self.limit}")
        i = np.searchsorted(self.primes, q)
        return bool(i < len(self.primes) and self.primes[i] == q)

    def __len__(self) -> int:
        return len(self.primes)


@dataclass
class VerifiedBits:
    """One bit per even integer of ``[a, b]``; bit ``i`` stands for ``a + 2*i``."""

    a: int
    b: int
    words: np.ndarray

    @classmethod
    def empty(cls, a: int, b: int) -> VerifiedBits:
        n = (b - a) // 2 + 1
        return cls(a, b, np.zeros((n + 63) // 64, dtype=np.uint64))

    @property
    def nbits(self) -> int:
        return (self.b - self.a) // 2 + 1

    def _index(self, n: int) -> int:
        if n % 2 or not self.a <= n <= self.b:
            raise ParameterError(f"{n} is not an even integer in [{self.a}, {self.b}]")
        return (n - self.a) // 2

    def test(self, n: int) -> bool:
        i = self._index(n)
        return bool((int(self.words[i >> 6]) >> (i & 63)) & 1)

    def set(self, n: int) -> None:
        i = self._index(n)
        self.words[i >> 6] |= np.uint64(1 << (i & 63))

    def clear(self, n: int) -> None:
        i = self._index(n)
        self.words[i >> 6] &= np.uint64(U64_MAX ^ (1 << (i & 63)))


@dataclass
class Phase1Result:
    verified: VerifiedBits
    max_min_prime: int
    max_min_n: int
    pmin: np.ndarray | None = None  # p_min per even, 0 where unverified


@dataclass
class SegmentReport:
    index: int
    a: int
    b: int
    evens_checked: int = 0
    unverified_after_phase1: int = 0
    phase2_resolved: int = 0
    counterexamples: list[int] = field(default_factory=list)
    max_min_prime: int = 0
    max_min_n: int = 0
    elapsed: float = 0.0

    @classmethod
    def merge(cls, reports) -> SegmentReport:
        """Aggregate of several reports; ``elapsed`` is the summed worker time."""
        reports = sorted(reports, key=lambda r: r.a)
        if not reports:
            return cls(index=-1, a=0, b=0)
        out = cls(index=-1, a=reports[0].a, b=reports[-1].b)
        for r in reports:
            out.evens_checked += r.evens_checked
            out.unverified_after_phase1 += r.unverified_after_phase1
            out.phase2_resolved += r.phase2_resolved
            out.counterexamples.extend(r.counterexamples)
            out.elapsed += r.elapsed
        out.max_min_prime, out.max_min_n = min_prime_stats(reports)
        out.counterexamples.sort()
        return out


def sieve_range_for(job: SegmentJob, p_small: int) -> tuple[int, int]:
    """Smallest odd interval holding every ``q = n - p`` for ``n`` in the job
    and odd ``p <= p_small`` with ``q >= 3``."""
    lo = max(3, job.a - p_small)
    lo += 1 - lo % 2
    hi = max(3, job.b - 3)
    return lo, hi


@nb.njit(nogil=True, cache=True)
def _phase1(a, nevens, odd_primes, batch, qwords, qlo, vwords, pmin):
    want = pmin.size > 0
    max_p = _Z
    max_n = _Z
    if a == _FOUR:
        vwords[0] |= _ONE
        max_p = _TWO
        max_n = _FOUR
        if want:
            pmin[0] = 2
    nprimes = odd_primes.size
    for b0 in range(0, nprimes, batch):
        b1 = min(b0 + batch, nprimes)
        for i in range(nevens):
            if (vwords[i >> 6] >> np.uint64(i & 63)) & _ONE:
                continue
            n = a + _TWO * np.uint64(i)
            for j in range(b0, b1):
                p = np.uint64(odd_primes[j])
                if p + _THREE > n:
                    break
                k = (n - p - qlo) >> _ONE
                if (qwords[k >> np.uint64(6)] >> (k & np.uint64(63))) & _ONE:
                    vwords[i >> 6] |= _ONE << np.uint64(i & 63)
                    if want:
                        pmin[i] = odd_primes[j]
                    if p > max_p:
                        max_p = p
                        max_n = n
                    break
    return max_p, max_n


def phase1_verify(job: SegmentJob, small: SmallPrimeTable, qbits: OddBitset,
                  batch_size: int = DEFAULT_BATCH_SIZE, want_pmin: bool = False) -> Phase1Result:
    """Mark every even ``n`` of the job that has a partition ``p + q`` with
    ``p <= p_small`` and ``q`` found prime in ``qbits`` (plus ``4 = 2 + 2``)."""
    if batch_size < 1:
        raise ParameterError("batch_size must be at least 1")
    lo, hi = sieve_range_for(job, small.p_small)
    if qbits.lo > lo or qbits.hi < hi:
        raise InternalError(
            f"q-bitset [{qbits.lo}, {qbits.hi}] does not cover [{lo}, {hi}] for job [{job.a}, {job.b}]")
    verified = VerifiedBits.empty(job.a, job.b)
    pmin = np.zeros(job.count if want_pmin else 0, dtype=np.uint32)
    max_p, max_n = _phase1(np.uint64(job.a), job.count, small.odd, int(batch_size),
                           qbits.words, np.uint64(qbits.lo), verified.words, pmin)
    return Phase1Result(verified, int(max_p), int(max_n), pmin if want_pmin else None)


def count_unverified(verified: VerifiedBits) -> tuple[int, list[int]]:
    """Number of unset bits and the corresponding even integers, ascending."""
    missing = verified.nbits - int(np.bitwise_count(verified.words).sum(dtype=np.uint64))
    if missing == 0:
        return 0, []
    idx = np.flatnonzero(~bits_to_bool(verified.words, verified.nbits))
    return missing, [verified.a + 2 * int(i) for i in idx]


@nb.njit(nogil=True, cache=True)
def _q_is_prime(q, p2, p2_limit):
    if q <= p2_limit:
        i = np.searchsorted(p2, q)
        return i < p2.size and np.uint64(p2[i]) == q
    return _is_prime(q)


@nb.njit(nogil=True, cache=True)
def _phase2(n, small, p2, p2_limit):
    half = n >> _ONE
    p = _Z
    for j in range(small.size):
        p = np.uint64(small[j])
        if p > half:
            return _Z
        if _q_is_prime(n - p, p2, p2_limit):
            return p
    p += _TWO
    while p <= half:
        if _q_is_prime(p, p2, p2_limit) and _q_is_prime(n - p, p2, p2_limit):
            return p
        p += _TWO
    return _Z


def phase2_resolve(n: int, small: SmallPrimeTable, p2: Phase2Table) -> tuple[int, int] | None:
    """Minimal partition ``(p, n - p)`` of ``n``, or ``None`` for a counterexample."""
    n = int(n)
    if n < 4 or n % 2 or n > U64_MAX:
        raise ParameterError(f"{n} is not an even integer >= 4")
    p = int(_phase2(np.uint64(n), small.primes, p2.primes, np.uint64(p2.limit)))
    return (p, n - p) if p else None


def min_prime_stats(reports) -> tuple[int, int]:
    """Largest ``max_min_prime`` across reports and its ``n`` (smallest on ties)."""
    best = (0, 0)
    for r in reports:
        if r.max_min_prime > best[0] or (r.max_min_prime == best[0] and 0 < r.max_min_n < best[1]):
            best = (r.max_min_prime, r.max_min_n)
    return best


def verify_segment(job: SegmentJob, base: BasePrimes, small: SmallPrimeTable, p2: Phase2Table,
                   tiles: TileSpec | None = None, batch_size: int = DEFAULT_BATCH_SIZE,
                   inject_counterexamples=frozenset()) -> SegmentReport:
    """Sieve, Phase 1, reduce, and Phase 2 when needed, for one segment.

    ``inject_counterexamples`` is a test hook: listed integers are treated as
    failing both phases.
    """
    t0 = time.perf_counter()
    lo, hi = sieve_range_for(job, small.p_small)
    qbits = tiled_sieve_segment(lo, hi, base, tiles)
    res = phase1_verify(job, small, qbits, batch_size)
    forced = [n for n in inject_counterexamples if job.a <= n <= job.b and n % 2 == 0]
    for n in forced:
        res.verified.clear(n)
    count, pending = count_unverified(res.verified)
    report = SegmentReport(job.index, job.a, job.b, evens_checked=job.count,
                           unverified_after_phase1=count,
                           max_min_prime=res.max_min_prime, max_min_n=res.max_min_n)
    for n in pending:
        found = None if n in forced else phase2_resolve(n, small, p2)
        if found is None:
            report.counterexamples.append(n)
            continue
        report.phase2_resolved += 1
        if found[0] > report.max_min_prime:
            report.max_min_prime, report.max_min_n = found[0], n
    report.elapsed = time.perf_counter() - t0
    return report
