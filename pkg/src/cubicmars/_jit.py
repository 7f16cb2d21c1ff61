"""JIT switch.

Hot kernels are written in the numba-compatible subset of numpy. Setting
``CUBICMARS_DISABLE_JIT=1`` before import turns ``njit`` into the identity
decorator so the same code runs in the interpreter (slow, but easy to debug
and free of compilation).
"""

from __future__ import annotations

import os

JIT_ENABLED = os.environ.get("CUBICMARS_DISABLE_JIT", "0").strip().lower() not in ("1", "true", "yes")



def _identity_njit(func=None, **kwargs):
    if func is not None:
        return func

    def wrapper(f):
        return f

    return wrapper


njit = _identity_njit
if JIT_ENABLED:
    try:
        import numba

        njit = numba.njit
    except ImportError:  # pragma: no cover
        JIT_ENABLED = False


__all__ = ["JIT_ENABLED", "njit"]
