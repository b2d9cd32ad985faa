"""cjump: accelerated Collatz dynamics.

Jump orbits, falling times and their Syracuse and h-fold variants,
persistent residue classes mod 2^k, deterministic record scans, and
probes for Mersenne-form and very large starts.  All orbit arithmetic is
exact; dense range scans run on uint64 kernels (numba by default, pure
numpy fallback, selected with CJUMP_BACKEND) that are bit-identical to
the big-integer path.
"""

from . import kernels, probes, records_data, scan
from .core import (
    BudgetedResult,
    StepTable,
    bitlen,
    glide,
    iterate_t,
    preimages_t,
    step_c,
    step_syr,
    step_t,
    stopping_time,
    total_stopping_time,
)
from .jumps import (
    FallingTimeResult,
    JumpTrace,
    falling_time,
    falling_time_h,
    jump,
    jump_h,
    jump_orbit,
    syr_falling_time,
    syr_falling_time_h,
    syr_jump,
    syr_jump_h,
)
from .residues import (
    ParityProfile,
    ValuationClass,
    count_persistent,
    enumerate_persistent,
    is_persistent,
    parity_profile,
    persistent_mask,
    syracuse_valuations,
    two_adic_class,
    valuation_class,
    valuation_classes,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetedResult",
    "FallingTimeResult",
    "JumpTrace",
    "ParityProfile",
    "StepTable",
    "ValuationClass",
    "bitlen",
    "kernels",
    "probes",
    "records_data",
    "scan",
    "count_persistent",
    "enumerate_persistent",
    "falling_time",
    "falling_time_h",
    "glide",
    "is_persistent",
    "iterate_t",
    "jump",
    "jump_h",
    "jump_orbit",
    "parity_profile",
    "persistent_mask",
    "preimages_t",
    "step_c",
    "step_syr",
    "step_t",
    "stopping_time",
    "syr_falling_time",
    "syr_falling_time_h",
    "syr_jump",
    "syr_jump_h",
    "syracuse_valuations",
    "total_stopping_time",
    "two_adic_class",
    "valuation_class",
    "valuation_classes",
    "__version__",
]
