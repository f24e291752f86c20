# %% [markdown]
# # Sieving and primality below 2**64
#
# The verifier needs two prime oracles: a packed sieve for dense ranges and a
# Miller-Rabin test for isolated values. This walk-through builds both and
# checks them against each other, including right at the top of the 64-bit range.

# %%
import time

import numpy as np

from goldbach import (BasePrimes, TileSpec, is_prime_array, is_prime_u64, modmul,
                      simple_sieve, tiled_sieve_segment)

# %% [markdown]
# ## A plain sieve for bootstrap tables

# %%
primes = simple_sieve(10**6)
print(len(primes), primes[:10], primes[-3:])

# %% [markdown]
# ## Tiled segments
#
# A segment is sieved 32,768 odd numbers (4 KB) at a time. Base primes only
# need to reach the square root of the segment's top.

# %%
base = BasePrimes.for_bound(10**9)
t = time.perf_counter()
seg = tiled_sieve_segment(10**9 - 10**7 + 1, 10**9 - 1, base)
print(f"{seg.popcount()} primes in the last 1e7 below 1e9 ({time.perf_counter() - t:.2f} s)")

# tile size changes nothing but speed
for odds in (64, 4096, 32768):
    t = time.perf_counter()
    other = tiled_sieve_segment(seg.lo, seg.hi, base, TileSpec(odds))
    print(odds, np.array_equal(other.words, seg.words), f"{time.perf_counter() - t:.2f} s")

# %% [markdown]
# ## Double-width modular multiplication

# %%
a, b, m = 2**64 - 1, 2**64 - 3, 2**64 - 59
print(modmul(a, b, m), a * b % m)

# %% [markdown]
# ## Sieve vs Miller-Rabin near the ceiling
#
# Base primes up to 2**32 are needed here (about 200 million of them; this
# cell takes tens of seconds and ~2 GB of memory).

# %%
RUN_CEILING = False
if RUN_CEILING:
    top = BasePrimes.for_bound(2**64 - 1)
    lo = 2**64 - 2 * 10**5 + 1
    window = tiled_sieve_segment(lo, 2**64 - 1, top)
    mr = is_prime_array(np.arange(lo, 2**64, 2, dtype=np.uint64))
    print(window.popcount(), np.array_equal(window.to_bool(), mr))
else:
    print(is_prime_u64(2**64 - 59), is_prime_u64(2**64 - 1))
