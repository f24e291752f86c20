"""Packed bitset over the odd integers of a closed interval.

Bit ``i`` represents ``lo + 2*i``. Words are little-endian ``uint64`` so the
numba kernels in :mod:`goldbach.sieve` and :mod:`goldbach.verifier` can index
them directly (``words[i >> 6] >> (i & 63)``).
"""
from __future__ import annotations

import numpy as np

from .errors import ParameterError, ResourceError

U64_MAX = (1 << 64) - 1

#: Default ceiling on a single bitset: 2**35 bits (4 GiB).
DEFAULT_MAX_BITS = 1 << 35


def _check_odd_u64(name: str, v: int) -> int:
    v = int(v)
    if not 0 <= v <= U64_MAX:
        raise ParameterError(f"{name}={v} is outside the unsigned 64-bit range")
    if v % 2 == 0:
        raise ParameterError(f"{name}={v} must be odd")
    return v


def bits_to_bool(words: np.ndarray, nbits: int) -> np.ndarray:
    """Unpack ``nbits`` bits of little-endian uint64 words into a bool array."""
    raw = np.ascontiguousarray(words, dtype="<u8").view(np.uint8)
    return np.unpackbits(raw, bitorder="little")[:nbits].astype(bool)


class OddBitset:
    """One bit per odd integer in ``[lo, hi]``; trailing slack bits stay zero."""

    __slots__ = ("lo", "hi", "nbits", "words")

    def __init__(self, lo: int, hi: int, words: np.ndarray):
        self.lo = _check_odd_u64("lo", lo)
        self.hi = _check_odd_u64("hi", hi)
        if self.lo > self.hi:
            raise ParameterError(f"lo={lo} exceeds hi={hi}")
        self.nbits = (self.hi - self.lo) // 2 + 1
        if words.dtype != np.uint64 or words.ndim != 1 or len(words) != (self.nbits + 63) // 64:
            raise ParameterError("word array does not match the interval")
        self.words = words

    @classmethod
    def new_filled(cls, lo: int, hi: int, max_bits: int = DEFAULT_MAX_BITS) -> OddBitset:
        lo = _check_odd_u64("lo", lo)
        hi = _check_odd_u64("hi", hi)
        if lo > hi:
            raise ParameterError(f"lo={lo} exceeds hi={hi}")
        nbits = (hi - lo) // 2 + 1
        if nbits > max_bits:
            raise ResourceError(f"bitset of {nbits} bits exceeds the cap of {max_bits} bits")
        words = np.full((nbits + 63) // 64, np.uint64(U64_MAX), dtype=np.uint64)
        tail = nbits % 64
        if tail:
            words[-1] = np.uint64((1 << tail) - 1)
        return cls(lo, hi, words)

    def _index(self, v: int) -> int:
        v = int(v)
        if v % 2 == 0 or not self.lo <= v <= self.hi:
            raise ParameterError(f"{v} is not an odd integer in [{self.lo}, {self.hi}]")
        return (v - self.lo) // 2

    def test(self, v: int) -> bool:
        i = self._index(v)
        return bool((int(self.words[i >> 6]) >> (i & 63)) & 1)

    def clear(self, v: int) -> None:
        i = self._index(v)
        self.words[i >> 6] &= np.uint64(U64_MAX ^ (1 << (i & 63)))

    def popcount(self) -> int:
        return int(np.bitwise_count(self.words).sum(dtype=np.uint64))

    def __len__(self) -> int:
        return self.nbits

    def __contains__(self, v: int) -> bool:
        return self.test(v)

    def to_bool(self) -> np.ndarray:
        """Bool array of length ``nbits``; element ``i`` is the bit for ``lo + 2*i``."""
        return bits_to_bool(self.words, self.nbits)

    def values(self) -> np.ndarray:
        """The set members, ascending, as ``uint64``."""
        idx = np.flatnonzero(self.to_bool()).astype(np.uint64)
        return np.uint64(self.lo) + np.uint64(2) * idx

    def __repr__(self) -> str:
        return f"OddBitset(lo={self.lo}, hi={self.hi}, set={self.popcount()})"
