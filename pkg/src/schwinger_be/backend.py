"""Statevector kernels: numba-jitted hot loops with a pure-numpy fallback.

The fallback is selected by setting the environment variable
``SCHWINGER_BE_NO_NUMBA=1`` before import, or automatically when numba is
unavailable.  Both paths are exercised in CI via the benchmark script and the
norm-preservation property tests; results are bit-identical because both
evaluate the same complex arithmetic in the same order per amplitude.
"""
from __future__ import annotations

import os

import numpy as np

USE_NUMBA = os.environ.get("SCHWINGER_BE_NO_NUMBA", "0") != "1"

if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False

if USE_NUMBA:

    @njit(cache=True)
    def _apply_1q_ctrl_jit(state, a, b, c, d, tbit, cmask, cval):
        n = state.shape[0]
        for i in range(n):
            if (i & tbit) == 0 and (i & cmask) == cval:
                j = i | tbit
                x0 = state[i]
                x1 = state[j]
                state[i] = a * x0 + b * x1
                state[j] = c * x0 + d * x1

    @njit(cache=True)
    def _apply_phase_pattern_jit(state, mask, val, phase):
        n = state.shape[0]
        for i in range(n):
            if (i & mask) == val:
                state[i] = state[i] * phase

    def apply_1q_ctrl(state, mat, tbit, cmask=0, cval=0):
        _apply_1q_ctrl_jit(state, mat[0, 0], mat[0, 1], mat[1, 0], mat[1, 1],
                           tbit, cmask, cval)

    def apply_phase_pattern(state, mask, val, phase):
        _apply_phase_pattern_jit(state, mask, val, phase)

else:

    def apply_1q_ctrl(state, mat, tbit, cmask=0, cval=0):
        idx = np.arange(state.shape[0])
        sel = ((idx & tbit) == 0) & ((idx & cmask) == cval)
        i0 = idx[sel]
        i1 = i0 | tbit
        x0 = state[i0]
        x1 = state[i1]
        state[i0] = mat[0, 0] * x0 + mat[0, 1] * x1
        state[i1] = mat[1, 0] * x0 + mat[1, 1] * x1

    def apply_phase_pattern(state, mask, val, phase):
        idx = np.arange(state.shape[0])
        sel = (idx & mask) == val
        state[sel] *= phase


def apply_permutation(state, perm):
    """In-place |i> -> |perm[i]| basis relabeling (perm must be a bijection)."""
    out = np.empty_like(state)
    out[perm] = state
    state[:] = out


def permute_indices(indices, perm):
    return perm[indices]
