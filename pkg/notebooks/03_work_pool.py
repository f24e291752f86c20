# %% [markdown]
# # The work pool
#
# Workers claim segments from one shared counter. This notebook shows the
# claim sequence, worker-count invariance, live progress, parallel
# efficiency, and the command line.

# %%
import io
import os

from goldbach import SharedTables, WorkPool, efficiency, run_workers
from goldbach.cli import Config, bench, main

pool = WorkPool(4, 40, 10)
print(list(iter(pool.claim_next, None)))

# %%
tables = SharedTables.build(10**8, 10**6, 10**8)
for k in (1, 2, 4):
    res = run_workers(k, WorkPool(4, 10**8, 2_500_000), tables)
    a = res.aggregate
    print(k, a.evens_checked, a.unverified_after_phase1, a.max_min_prime, a.max_min_n,
          f"{res.wall_time:.2f} s")

# %% [markdown]
# ## Live progress

# %%
buf = io.StringIO()
run_workers(2, WorkPool(4, 2 * 10**7, 10**6), tables, progress=True, interval=0.5, log_stream=buf)
print(buf.getvalue())

# %% [markdown]
# ## Efficiency
#
# On the multi-GPU hardware: 80.865 s on one device, 40.545 s on two, 20.506 s on four.

# %%
print(efficiency(80.865, 2, 40.545), efficiency(80.865, 4, 20.506))
rep = bench(Config(limit=10**8, seg_size=2_500_000), min(4, os.cpu_count() or 1))
print(rep, rep.efficiency)

# %% [markdown]
# ## Command line

# %%
main(["10000000", "--workers=-1", "--json"])
