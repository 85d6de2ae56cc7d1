"""JIT plumbing: numba kernels with a pure-Python/numpy fallback.

Set BOOTPERC_NO_NUMBA=1 to disable compilation.  Hot loops then run either
through vectorized numpy fallbacks (where a module provides one) or as
interpreted Python, which is slow but bit-identical.  benchmarks/bench_kernels.py
compares the two modes.
"""

import os

NUMBA_DISABLED = os.environ.get("BOOTPERC_NO_NUMBA", "").strip() not in ("", "0")

if not NUMBA_DISABLED:
    try:
        import numba
    except ImportError:  # pragma: no cover
        numba = None
        NUMBA_DISABLED = True
else:
    numba = None

JIT_ENABLED = not NUMBA_DISABLED


def njit_maybe(**kwargs):
    """Return numba.njit(**kwargs) when enabled, identity decorator otherwise."""
    if JIT_ENABLED:
        kwargs.setdefault("cache", True)
        kwargs.setdefault("nogil", True)
        return numba.njit(**kwargs)

    def passthrough(func):
        return func

    return passthrough


def default_threads() -> int:
    raw = os.environ.get("BOOTPERC_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1
