# %% [markdown]
# # Verifying one segment
#
# Phase 1 looks for the smallest odd prime p <= p_small with n - p prime,
# using a sieved bitset for the q side. Numbers Phase 1 cannot settle go to
# Phase 2. With p_small = 1e6 Phase 2 never fires in practice, so we shrink
# p_small to watch it work.

# %%
import numpy as np

from goldbach import (BasePrimes, Phase2Table, SegmentJob, SmallPrimeTable, count_unverified,
                      phase1_verify, phase2_resolve, sieve_range_for, tiled_sieve_segment,
                      verify_segment)

base = BasePrimes.for_bound(10**9)
small = SmallPrimeTable.build(10**6)
p2 = Phase2Table.build(10**7)

# %%
job = SegmentJob(4, 40)
lo, hi = sieve_range_for(job, small.p_small)
res = phase1_verify(job, small, tiled_sieve_segment(lo, hi, base), want_pmin=True)
for n, p in zip(range(job.a, job.b + 1, 2), res.pmin):
    print(f"{n} = {p} + {n - p}")

# %% [markdown]
# The q-bitset has to reach below the segment start by p_small:

# %%
print(sieve_range_for(SegmentJob(4 * 10**6, 6 * 10**6), 10**6))

# %% [markdown]
# ## Forcing Phase 2

# %%
tiny = SmallPrimeTable.build(31)
job = SegmentJob(10**6, 10**6 + 20_000)
lo, hi = sieve_range_for(job, tiny.p_small)
res = phase1_verify(job, tiny, tiled_sieve_segment(lo, hi, base))
count, pending = count_unverified(res.verified)
print(count, "left after phase 1:", pending[:8])
print([phase2_resolve(n, tiny, p2) for n in pending[:5]])

# %%
report = verify_segment(job, base, tiny, p2)
print(report)

# %% [markdown]
# ## The record-holding n below 1e9
#
# The largest minimal prime in one 2e8-even segment, with the default p_small.

# %%
report = verify_segment(SegmentJob(4 * 10**8 + 4, 8 * 10**8 + 2), base, small, p2)
print(report.max_min_prime, report.max_min_n, report.elapsed)
