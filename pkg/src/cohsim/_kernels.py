"""Inner loops for gate application and dephasing.

Every kernel has two implementations: an explicit loop compiled with numba
and a vectorised numpy version.  The ``COHSIM_BACKEND`` environment variable
(``numba`` or ``numpy``) picks one at import time.  If numba cannot be
imported the numpy path is used regardless.  :func:`set_backend` switches at
runtime, which the benchmark and the cross-backend tests rely on.

All kernels work in place on C-contiguous complex128 arrays.  Qubit 0 is the
most significant bit of a basis index.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False


# ---------------------------------------------------------------------------
# numpy path


def _apply_1q_np(vec, u, q, n):
    v = vec.reshape(1 << q, 2, -1)
    v[...] = np.einsum("ab,ibj->iaj", u, v)


def _apply_2q_np(vec, u, q0, q1, n):
    t = vec.reshape((2,) * n)
    moved = np.tensordot(u.reshape(2, 2, 2, 2), t, axes=([2, 3], [q0, q1]))
    t[...] = np.moveaxis(moved, (0, 1), (q0, q1))


def _scale_offdiag_np(rho, mask, factor):
    idx = np.arange(rho.shape[0])
    hit = ((idx[:, None] ^ idx[None, :]) & mask) != 0
    rho[hit] *= factor


# ---------------------------------------------------------------------------
# numba path

if HAVE_NUMBA:

    @njit(cache=True, nogil=True)
    def _apply_1q_nb(vec, u, q, n):
        shift = n - 1 - q
        stride = 1 << shift
        low = stride - 1
        u00 = u[0, 0]
        u01 = u[0, 1]
        u10 = u[1, 0]
        u11 = u[1, 1]
        for k in range(vec.shape[0] >> 1):
            i0 = ((k >> shift) << (shift + 1)) | (k & low)
            i1 = i0 | stride
            a = vec[i0]
            b = vec[i1]
            vec[i0] = u00 * a + u01 * b
            vec[i1] = u10 * a + u11 * b

    @njit(cache=True, nogil=True)
    def _apply_2q_nb(vec, u, q0, q1, n):
        p0 = n - 1 - q0
        p1 = n - 1 - q1
        lo = min(p0, p1)
        hi = max(p0, p1)
        s0 = 1 << p0
        s1 = 1 << p1
        amp = np.empty(4, dtype=np.complex128)
        idx = np.empty(4, dtype=np.int64)
        for k in range(vec.shape[0] >> 2):
            i = ((k >> lo) << (lo + 1)) | (k & ((1 << lo) - 1))
            i = ((i >> hi) << (hi + 1)) | (i & ((1 << hi) - 1))
            idx[0] = i
            idx[1] = i | s1
            idx[2] = i | s0
            idx[3] = i | s0 | s1
            for r in range(4):
                amp[r] = vec[idx[r]]
            for r in range(4):
                acc = 0j
                for c in range(4):
                    acc += u[r, c] * amp[c]
                vec[idx[r]] = acc

    @njit(cache=True, nogil=True)
    def _scale_offdiag_nb(rho, mask, factor):
        dim = rho.shape[0]
        for i in range(dim):
            for j in range(dim):
                if (i ^ j) & mask:
                    rho[i, j] *= factor


# ---------------------------------------------------------------------------
# dispatch

_BACKENDS = {"numpy": (_apply_1q_np, _apply_2q_np, _scale_offdiag_np)}
if HAVE_NUMBA:
    _BACKENDS["numba"] = (_apply_1q_nb, _apply_2q_nb, _scale_offdiag_nb)

AVAILABLE = tuple(_BACKENDS)
_active: tuple = _BACKENDS["numpy"]
_active_name = "numpy"


def set_backend(name: str) -> str:
    """Select the kernel implementation; returns the previous backend name."""
    global _active, _active_name
    name = name.lower()
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise ValueError("numba backend requested but numba is not importable")
    previous = _active_name
    _active, _active_name = _BACKENDS[name], name
    return previous


def backend() -> str:
    return _active_name


set_backend(os.environ.get("COHSIM_BACKEND", "numba" if HAVE_NUMBA else "numpy"))


def apply_1q(vec: np.ndarray, u: np.ndarray, q: int, n: int) -> None:
    """Apply the 2x2 matrix ``u`` to qubit ``q`` of an ``n``-qubit vector."""
    _active[0](vec, np.ascontiguousarray(u, dtype=np.complex128), q, n)


def apply_2q(vec: np.ndarray, u: np.ndarray, q0: int, q1: int, n: int) -> None:
    """Apply the 4x4 matrix ``u`` to qubits ``(q0, q1)``; ``q0`` is the high bit."""
    _active[1](vec, np.ascontiguousarray(u, dtype=np.complex128), q0, q1, n)


def scale_offdiag(rho: np.ndarray, mask: int, factor: float) -> None:
    """Multiply every ``rho[i, j]`` whose indices differ on a ``mask`` bit by ``factor``."""
    _active[2](rho, int(mask), complex(factor))


def qubit_mask(targets, n: int) -> int:
    mask = 0
    for q in targets:
        mask |= 1 << (n - 1 - q)
    return mask
