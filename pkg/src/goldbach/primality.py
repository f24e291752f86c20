"""Deterministic primality for unsigned 64-bit integers.

Numba has no 128-bit integer type, so the double-width product needed by
``(a * b) mod m`` is assembled from four 32x32-bit partial products and then
reduced by binary long division. Every kernel here is ``nogil`` and may be
called from the verifier kernels and from worker threads concurrently.
"""
from __future__ import annotations

import numba as nb
import numpy as np

from .errors import ParameterError
from .oddbits import U64_MAX

#: Miller-Rabin bases; deterministic for every n < 2**64.
WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_W = np.array(WITNESSES, dtype=np.uint64)
_Z = np.uint64(0)
_ONE = np.uint64(1)
_SH32 = np.uint64(32)
_SH63 = np.uint64(63)
_LO32 = np.uint64(0xFFFFFFFF)
_FORTY_ONE = np.uint64(41)
# bit k set iff k is prime, for k < 41
_SMALL_PRIME_MASK = np.uint64(sum(1 << p for p in WITNESSES))


@nb.njit(nogil=True, cache=True)
def mul_wide(a, b):
    """Full product of two uint64 values as ``(hi, lo)`` words."""
    a0 = a & _LO32
    a1 = a >> _SH32
    b0 = b & _LO32
    b1 = b >> _SH32
    p00 = a0 * b0
    p01 = a0 * b1
    p10 = a1 * b0
    p11 = a1 * b1
    mid = (p00 >> _SH32) + (p01 & _LO32) + (p10 & _LO32)
    lo = (p00 & _LO32) | (mid << _SH32)
    hi = p11 + (p01 >> _SH32) + (p10 >> _SH32) + (mid >> _SH32)
    return hi, lo


@nb.njit(nogil=True, cache=True)
def reduce_wide(hi, lo, m):
    """``(hi * 2**64 + lo) mod m`` for ``m >= 1``."""
    if hi == _Z:
        return lo % m
    r = hi % m
    for k in range(63, -1, -1):
        carry = r >> _SH63
        r = (r << _ONE) | ((lo >> np.uint64(k)) & _ONE)
        # true value is < 2m, so one wrapping subtraction restores r < m
        if carry != _Z or r >= m:
            r -= m
    return r


@nb.njit(nogil=True, cache=True)
def _modmul(a, b, m):
    hi, lo = mul_wide(a, b)
    return reduce_wide(hi, lo, m)


@nb.njit(nogil=True, cache=True)
def _modpow(a, e, m):
    result = _ONE % m
    base = a % m
    while e != _Z:
        if e & _ONE:
            result = _modmul(result, base, m)
        e >>= _ONE
        if e != _Z:
            base = _modmul(base, base, m)
    return result


@nb.njit(nogil=True, cache=True)
def _is_prime(n):
    if n < _FORTY_ONE:
        return ((_SMALL_PRIME_MASK >> n) & _ONE) != _Z
    for i in range(_W.size):
        if n % _W[i] == _Z:
            return False
    d = n - _ONE
    s = 0
    while (d & _ONE) == _Z:
        d >>= _ONE
        s += 1
    nm1 = n - _ONE
    for i in range(_W.size):
        a = _W[i]
        if a % n == _Z:
            continue
        x = _modpow(a, d, n)
        if x == _ONE or x == nm1:
            continue
        witness = True
        for _ in range(s - 1):
            x = _modmul(x, x, n)
            if x == nm1:
                witness = False
                break
        if witness:
            return False
    return True


@nb.njit(nogil=True, cache=True)
def _is_prime_many(values, out):
    for i in range(values.size):
        out[i] = _is_prime(values[i])


def _u64(name: str, v: int) -> np.uint64:
    v = int(v)
    if not 0 <= v <= U64_MAX:
        raise ParameterError(f"{name}={v} is outside the unsigned 64-bit range")
    return np.uint64(v)


def modmul(a: int, b: int, m: int) -> int:
    """``(a * b) mod m`` through a 128-bit intermediate."""
    if int(m) == 0:
        raise ParameterError("modulus must be at least 1")
    return int(_modmul(_u64("a", a), _u64("b", b), _u64("m", m)))


def modpow(a: int, e: int, m: int) -> int:
    """``a**e mod m`` by square-and-multiply over :func:`modmul`."""
    if int(m) == 0:
        raise ParameterError("modulus must be at least 1")
    return int(_modpow(_u64("a", a), _u64("e", e), _u64("m", m)))


def is_prime_u64(n: int) -> bool:
    """Exact primality for any ``0 <= n < 2**64``."""
    return bool(_is_prime(_u64("n", n)))


def is_prime_array(values) -> np.ndarray:
    """Vectorised :func:`is_prime_u64` over an array of unsigned 64-bit values."""
    vals = np.ascontiguousarray(values, dtype=np.uint64)
    out = np.empty(vals.shape, dtype=np.bool_)
    _is_prime_many(vals.ravel(), out.ravel())
    return out
