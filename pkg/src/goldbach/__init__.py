"""Exhaustive multi-threaded verification of Goldbach's conjecture below 2**64."""
from .errors import (GoldbachError, InternalError, ParameterError, ResourceError, UsageError,
                     WorkerError)
from .oddbits import OddBitset
from .primality import WITNESSES, is_prime_array, is_prime_u64, modmul, modpow
from .sieve import BasePrimes, TileSpec, first_tile_index, simple_sieve, tiled_sieve_segment
from .verifier import (Phase2Table, SegmentJob, SegmentReport, SmallPrimeTable, VerifiedBits,
                       count_unverified, min_prime_stats, phase1_verify, phase2_resolve,
                       sieve_range_for, verify_segment)
from .pool import (ProgressSnapshot, SharedTables, WorkPool, progress_snapshot, run_workers,
                   safe_log)
from .cli import Config, RunSummary, efficiency, parse_args, run, validate_resources

__all__ = [
    "GoldbachError", "InternalError", "ParameterError", "ResourceError", "UsageError",
    "WorkerError", "OddBitset", "WITNESSES", "is_prime_array", "is_prime_u64", "modmul",
    "modpow", "BasePrimes", "TileSpec", "first_tile_index", "simple_sieve",
    "tiled_sieve_segment", "Phase2Table", "SegmentJob", "SegmentReport", "SmallPrimeTable",
    "VerifiedBits", "count_unverified", "min_prime_stats", "phase1_verify", "phase2_resolve",
    "sieve_range_for", "verify_segment", "ProgressSnapshot", "SharedTables", "WorkPool",
    "progress_snapshot", "run_workers", "safe_log", "Config", "RunSummary", "efficiency",
    "parse_args", "run", "validate_resources",
]
