"""Prime generation: a plain odd-only sieve for bootstrap tables and a tiled
segmented sieve whose tiles are sized for a CPU L1 data cache.

All index arithmetic near the top of the 64-bit range goes through
division-bounded comparisons; no product of two values is formed unless a
prior ``k <= bound // p`` check proves it fits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba as nb
import numpy as np

from .errors import ParameterError, ResourceError
from .oddbits import DEFAULT_MAX_BITS, OddBitset, U64_MAX

#: Odd integers per tile; 32,768 bits make a 4 KB tile.
DEFAULT_ODDS_PER_TILE = 32_768

#: Largest byte array :func:`simple_sieve` will allocate (one byte per odd).
SIMPLE_SIEVE_MAX_BYTES = 1 << 30

# Above this bound base primes are produced by the segmented sieve itself.
_SIMPLE_BASE_LIMIT = 1 << 27
_BASE_CHUNK_ODDS = 1 << 26

_Z = np.uint64(0)
_ONE = np.uint64(1)
_TWO = np.uint64(2)
_ALL = np.uint64(U64_MAX)


@dataclass(frozen=True)
class TileSpec:
    odds_per_tile: int = DEFAULT_ODDS_PER_TILE

    def __post_init__(self):
        n = self.odds_per_tile
        if n < 64 or n & (n - 1):
            raise ParameterError(f"odds_per_tile={n} must be a power of two >= 64")

    @property
    def tile_bytes(self) -> int:
        return self.odds_per_tile // 8


def simple_sieve(limit: int, max_bytes: int = SIMPLE_SIEVE_MAX_BYTES) -> np.ndarray:
    """All primes ``<= limit`` (2 included), ascending.

    Returned as ``uint32`` when every prime fits, ``uint64`` otherwise.
    """
    limit = int(limit)
    if limit < 2:
        raise ParameterError(f"limit={limit} must be at least 2")
    size = (limit - 1) // 2  # odd candidates 3, 5, ..., <= limit
    if size > max_bytes:
        raise ResourceError(f"simple_sieve({limit}) needs {size} bytes, cap is {max_bytes}")
    dtype = np.uint32 if limit < 1 << 32 else np.uint64
    is_p = np.ones(size, dtype=bool)
    for i in range((math.isqrt(limit) - 1) // 2):
        if is_p[i]:
            p = 2 * i + 3
            is_p[(p * p - 3) // 2 :: p] = False
    primes = np.empty(size + 1, dtype=dtype)
    primes[0] = 2
    odd = np.flatnonzero(is_p)
    primes[1 : odd.size + 1] = 2 * odd + 3
    return primes[: odd.size + 1].copy()


@nb.njit(nogil=True, cache=True)
def _first_tile_index(p, tile_lo, seg_hi):
    # smallest odd cofactor k with k >= p and k * p >= tile_lo
    k = tile_lo // p
    if tile_lo % p != _Z:
        k += _ONE
    if k < p:
        k = p
    if (k & _ONE) == _Z:
        k += _ONE
    if k > seg_hi // p:
        return -1
    return np.int64((k * p - tile_lo) >> _ONE)


def first_tile_index(p: int, tile_lo: int, seg_hi: int) -> int | None:
    """Bit index inside the tile starting at ``tile_lo`` of the first odd
    multiple of ``p`` that is ``>= max(p*p, tile_lo)``; ``None`` when that
    multiple lies beyond ``seg_hi``."""
    p, tile_lo, seg_hi = int(p), int(tile_lo), int(seg_hi)
    if p < 3 or p % 2 == 0 or tile_lo % 2 == 0:
        raise ParameterError("p must be an odd prime and tile_lo odd")
    for v in (p, tile_lo, seg_hi):
        if not 0 <= v <= U64_MAX:
            raise ParameterError(f"{v} is outside the unsigned 64-bit range")
    i = _first_tile_index(np.uint64(p), np.uint64(tile_lo), np.uint64(seg_hi))
    return None if i < 0 else int(i)


@nb.njit(nogil=True, cache=True)
def _tiled_sieve(words, lo, nbits, primes, odds_per_tile):
    buf = np.empty(odds_per_tile >> 6, dtype=np.uint64)
    for t0 in range(0, nbits, odds_per_tile):
        span = min(odds_per_tile, nbits - t0)
        tile_lo = lo + _TWO * np.uint64(t0)
        tile_hi = tile_lo + _TWO * np.uint64(span - 1)
        nw = (span + 63) >> 6
        for w in range(nw):
            buf[w] = _ALL
        for j in range(primes.size):
            p = np.uint64(primes[j])
            if p > tile_hi // p:
                break
            i = _first_tile_index(p, tile_lo, tile_hi)
            if i < 0:
                continue
            step = np.int64(p)
            while i < span:
                buf[i >> 6] &= ~(_ONE << np.uint64(i & 63))
                i += step
        w0 = t0 >> 6
        for w in range(nw):
            words[w0 + w] &= buf[w]


@dataclass(frozen=True, eq=False)
class BasePrimes:
    """Odd primes up to ``sqrt_bound``, stored as 4-byte values."""

    primes: np.ndarray
    sqrt_bound: int

    @classmethod
    def for_bound(cls, hi: int) -> BasePrimes:
        """Base primes sufficient to sieve any segment whose top is ``<= hi``."""
        hi = int(hi)
        if not 0 <= hi <= U64_MAX:
            raise ParameterError(f"{hi} is outside the unsigned 64-bit range")
        return cls.up_to(math.isqrt(hi))

    @classmethod
    def up_to(cls, sqrt_bound: int) -> BasePrimes:
        sqrt_bound = int(sqrt_bound)
        if sqrt_bound >= 1 << 32:
            raise ParameterError("base primes are limited to 32 bits")
        if sqrt_bound < 3:
            return cls(np.empty(0, dtype=np.uint32), sqrt_bound)
        if sqrt_bound <= _SIMPLE_BASE_LIMIT:
            primes = simple_sieve(sqrt_bound)[1:].astype(np.uint32)
            return cls(primes, sqrt_bound)
        boot = cls.up_to(math.isqrt(sqrt_bound))
        top = sqrt_bound if sqrt_bound % 2 else sqrt_bound - 1
        chunks = [boot.primes]
        lo = boot.sqrt_bound + 1 if boot.sqrt_bound % 2 == 0 else boot.sqrt_bound + 2
        while lo <= top:
            hi = min(lo + 2 * (_BASE_CHUNK_ODDS - 1), top)
            seg = tiled_sieve_segment(lo, hi, boot)
            chunks.append(seg.values().astype(np.uint32))
            lo = hi + 2
        return cls(np.concatenate(chunks), sqrt_bound)

    def __len__(self) -> int:
        return len(self.primes)


def tiled_sieve_segment(lo: int, hi: int, base: BasePrimes, tiles: TileSpec | None = None,
                        max_bits: int = DEFAULT_MAX_BITS) -> OddBitset:
    """Bitset whose set bits are exactly the odd primes in ``[lo, hi]``.

    The range is sieved one tile at a time into a private buffer of
    ``tiles.odds_per_tile`` bits, which is flushed before the next tile starts.
    """
    tiles = tiles or TileSpec()
    bs = OddBitset.new_filled(lo, hi, max_bits=max_bits)
    if math.isqrt(bs.hi) > base.sqrt_bound:
        raise ParameterError(
            f"base primes up to {base.sqrt_bound} cannot sieve up to {bs.hi}")
    _tiled_sieve(bs.words, np.uint64(bs.lo), bs.nbits, base.primes, tiles.odds_per_tile)
    if bs.lo == 1:
        bs.clear(1)
    return bs
