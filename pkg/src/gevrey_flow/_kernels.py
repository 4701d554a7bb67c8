"""Hot kernels: direct truncated convolution and the fused bilinear sum.

Both kernels are written twice: once as numba ``@njit`` loops and once as
vectorised numpy.  The two agree to rounding; the numpy path exists as a
dependency-light fallback and as the comparison target for the benchmark in
``benchmarks/bench_kernels.py``.

Conventions shared by both implementations:

* fields are flat complex128 arrays over the mode box ``max|k| <= K`` in
  row-major order, so the flat index of mode k is
  ``sum_a (k_a + K) * (2K+1)**(d-1-a)``;
* ``modes`` is the matching ``(n, d)`` int64 array;
* the convolution computes ``out[k] = scale * sum_j f[k-j] g[j]`` with both
  ``j`` and ``k-j`` restricted to the box;
* the bilinear sum computes

      out[k] = -scale * sum_j (k . M j) ghat[j]
               * exp(tau * (ks[k-j] + ks[j] - ks[k])) * f[k-j] * g[j]

  with ``ks = |k|^s`` per mode.  The three exponentials are fused per term
  so the exponent is sign-definite in tau (``|k|^s <= |k-j|^s + |j|^s`` for
  s <= 1), which keeps intermediates bounded.
"""

import functools

import numpy as np

from ._backend import USE_NUMBA

if USE_NUMBA:
    from numba import njit
else:  # pragma: no cover - exercised under GEVREY_FLOW_BACKEND=numpy
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


@njit(cache=True)
def _conv_direct_loop(fc, gc, modes, K, scale, out):
    n, d = modes.shape
    width = 2 * K + 1
    for i in range(n):
        acc = 0.0 + 0.0j
        for j in range(n):
            ok = True
            idx = 0
            for a in range(d):
                r = modes[i, a] - modes[j, a]
                if r < -K or r > K:
                    ok = False
                    break
                idx = idx * width + (r + K)
            if ok:
                acc += fc[idx] * gc[j]
        out[i] = scale * acc
    return out


@njit(cache=True)
def _bilinear_direct_loop(fc, gc, modes, ks, ghat, mat, tau, K, scale, out):
    n, d = modes.shape
    width = 2 * K + 1
    for i in range(n):
        acc = 0.0 + 0.0j
        for j in range(n):
            ok = True
            idx = 0
            for a in range(d):
                r = modes[i, a] - modes[j, a]
                if r < -K or r > K:
                    ok = False
                    break
                idx = idx * width + (r + K)
            if not ok:
                continue
            kmj = 0.0
            for a in range(d):
                row = 0.0
                for b in range(d):
                    row += mat[a, b] * modes[j, b]
                kmj += modes[i, a] * row
            if kmj == 0.0:
                continue
            w = np.exp(tau * (ks[idx] + ks[j] - ks[i]))
            acc += kmj * ghat[j] * w * fc[idx] * gc[j]
        out[i] = -scale * acc
    return out


@functools.lru_cache(maxsize=8)
def _pair_table(d, K):
    """Flat index of ``k_i - k_j`` and its on-box mask, cached per lattice."""
    width = 2 * K + 1
    ax = np.arange(-K, K + 1, dtype=np.int64)
    if d == 1:
        modes = ax[:, None]
    else:
        grids = np.meshgrid(*([ax] * d), indexing="ij")
        modes = np.stack(grids, axis=-1).reshape(-1, d)
    diff = modes[:, None, :] - modes[None, :, :]
    ok = np.all(np.abs(diff) <= K, axis=2)
    idx = np.zeros(diff.shape[:2], dtype=np.int64)
    for a in range(d):
        idx = idx * width + (diff[..., a] + K)
    idx[~ok] = 0
    idx.setflags(write=False)
    ok.setflags(write=False)
    return idx, ok


def _conv_direct_numpy(fc, gc, modes, K, scale, out):
    n, d = modes.shape
    idx, ok = _pair_table(d, K)
    block = max(1, min(n, 8_000_000 // max(n, 1)))
    for lo in range(0, n, block):
        hi = min(n, lo + block)
        terms = fc[idx[lo:hi]] * gc[None, :]
        terms[~ok[lo:hi]] = 0.0
        out[lo:hi] = scale * terms.sum(axis=1)
    return out


def _bilinear_direct_numpy(fc, gc, modes, ks, ghat, mat, tau, K, scale, out):
    n, d = modes.shape
    idx, ok = _pair_table(d, K)
    kmj_full = np.einsum("ia,ab,jb->ij", modes.astype(float), mat, modes.astype(float))
    gj = ghat * gc
    block = max(1, min(n, 4_000_000 // max(n, 1)))
    for lo in range(0, n, block):
        hi = min(n, lo + block)
        w = np.exp(tau * (ks[idx[lo:hi]] + ks[None, :] - ks[lo:hi, None]))
        terms = kmj_full[lo:hi] * w * fc[idx[lo:hi]] * gj[None, :]
        terms[~ok[lo:hi]] = 0.0
        out[lo:hi] = -scale * terms.sum(axis=1)
    return out


def conv_direct(fc, gc, modes, K, scale, use_numba=None):
    """Direct truncated convolution (the semantic reference path)."""
    out = np.empty(fc.shape[0], dtype=np.complex128)
    if use_numba is None:
        use_numba = USE_NUMBA
    if use_numba:
        return _conv_direct_loop(fc, gc, modes, np.int64(K), scale, out)
    return _conv_direct_numpy(fc, gc, modes, K, scale, out)


def bilinear_direct(fc, gc, modes, ks, ghat, mat, tau, K, scale, use_numba=None):
    """Fused-exponential bilinear sum (the semantic reference path)."""
    out = np.empty(fc.shape[0], dtype=np.complex128)
    if use_numba is None:
        use_numba = USE_NUMBA
    if use_numba:
        return _bilinear_direct_loop(
            fc, gc, modes, ks, ghat, mat, float(tau), np.int64(K), scale, out
        )
    return _bilinear_direct_numpy(fc, gc, modes, ks, ghat, mat, float(tau), K, scale, out)
