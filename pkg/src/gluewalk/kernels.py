"""Density-matrix step kernels.

One fused operation does all the per-step work on an ``N x N`` density
matrix: coin on rows and columns, the shift permutation on both sides, and
an elementwise coin mask (the dephasing factors, or all ones)::

    out[perm[i], perm[j]] = (C rho C^dag)[i, j] * mask[perm[i] % k, perm[j] % k]

Two implementations exist. The numba one makes a single pass and writes each
output element exactly once, so results do not depend on the thread count.
The numpy one is the reference and the fallback.

Set ``GLUEWALK_BACKEND=numpy`` to force the fallback. ``GLUEWALK_THREADS``
caps numba's worker threads.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
    from numba import njit, prange
except ImportError:  # pragma: no cover
    numba = None
else:
    # The bundled TBB is often too old; probing it only produces a warning.
    if "NUMBA_THREADING_LAYER" not in os.environ:
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

__all__ = ["BACKEND", "available_backends", "dephased_step", "set_threads"]


def _numpy_dephased_step(rho, coin, perm, mask, out):
    k = coin.shape[0]
    N = rho.shape[0]
    V = N // k
    rows = np.matmul(coin, rho.reshape(V, k, N)).reshape(N, V, k)
    both = np.matmul(rows, coin.conj().T).reshape(N, N)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(N)
    np.take(np.take(both, inv, axis=0), inv, axis=1, out=out)
    out.reshape(V, k, V, k)[...] *= mask[None, :, None, :]
    return out


if numba is not None:

    @njit(parallel=True, cache=True)
    def _numba_dephased_step(rho, coin, perm, mask, out):
        N = rho.shape[0]
        k = coin.shape[0]
        V = N // k
        coin_conj = np.conj(coin)
        for v in prange(V):
            tmp = np.empty((k, N), dtype=np.complex128)
            for a in range(k):
                for j in range(N):
                    s = 0j
                    for b in range(k):
                        s += coin[a, b] * rho[v * k + b, j]
                    tmp[a, j] = s
            for a in range(k):
                i = perm[v * k + a]
                li = i % k
                for w in range(V):
                    for c in range(k):
                        s = 0j
                        for d in range(k):
                            s += tmp[a, w * k + d] * coin_conj[c, d]
                        j = perm[w * k + c]
                        out[i, j] = s * mask[li, j % k]
        return out

else:  # pragma: no cover
    _numba_dephased_step = None


_KERNELS = {"numpy": _numpy_dephased_step}
if _numba_dephased_step is not None:
    _KERNELS["numba"] = _numba_dephased_step


def available_backends() -> list[str]:
    return sorted(_KERNELS)


def _default_backend() -> str:
    requested = os.environ.get("GLUEWALK_BACKEND", "").strip().lower()
    if requested:
        if requested not in _KERNELS:
            raise RuntimeError(
                f"GLUEWALK_BACKEND={requested!r} unavailable; choose from {available_backends()}"
            )
        return requested
    return "numba" if "numba" in _KERNELS else "numpy"


BACKEND = _default_backend()


def set_threads(n: int | None = None) -> int:
    """Cap numba worker threads; ``None`` reads ``GLUEWALK_THREADS``.

    Returns the thread count in effect (1 for the numpy backend).
    """
    if numba is None:
        return 1
    if n is None:
        env = os.environ.get("GLUEWALK_THREADS")
        if not env:
            return numba.get_num_threads()
        n = int(env)
    n = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)
    return n


def dephased_step(rho, coin, perm, mask, out=None, backend=None):
    """Apply one coin-shift step and a coin mask to ``rho``.

    ``out`` must not alias ``rho``. Returns ``out``.
    """
    fn = _KERNELS[backend or BACKEND]
    rho = np.ascontiguousarray(rho, dtype=np.complex128)
    if out is None:
        out = np.empty_like(rho)
    elif out is rho:
        raise ValueError("out must not alias rho")
    coin = np.ascontiguousarray(coin, dtype=np.complex128)
    mask = np.ascontiguousarray(mask, dtype=np.float64)
    perm = np.ascontiguousarray(perm, dtype=np.int64)
    return fn(rho, coin, perm, mask, out)


if os.environ.get("GLUEWALK_THREADS"):
    set_threads()
