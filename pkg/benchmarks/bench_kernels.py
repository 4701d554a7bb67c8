"""Benchmark the compiled kernels against the pure-numpy fallback.

Times the two hot loops (direct truncated convolution and the fused bilinear
sum) on a grid of lattice sizes, plus the padded-FFT product for context.

Run:
    python3 benchmarks/bench_kernels.py [--repeats N]

The numba path is also what GEVREY_FLOW_BACKEND=numba (the default when
numba imports) selects at runtime; GEVREY_FLOW_BACKEND=numpy selects the
fallback timed here.
"""

import argparse
import time

import numpy as np

from gevrey_flow import (
    InteractionMatrix,
    Lattice,
    ModelConfig,
    PowerLawKernel,
    random_hermitian_field,
)
from gevrey_flow._kernels import bilinear_direct, conv_direct
from gevrey_flow.spectral import _conv_fft


def _time(fn, repeats):
    fn()  # warm-up (JIT compile / cache load)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    cases = [Lattice(1, 16), Lattice(1, 32), Lattice(1, 64), Lattice(2, 8), Lattice(2, 16)]
    print(f"{'lattice':>12} {'modes':>6} | {'conv numba':>11} {'conv numpy':>11} "
          f"{'conv fft':>11} | {'bilin numba':>11} {'bilin numpy':>11}")
    for lat in cases:
        cfg = ModelConfig(
            d=lat.d, s=1.0, nu=1.0, alpha=0.1, beta=0.1, epsilon=0.0,
            matrix=InteractionMatrix.rotation() if lat.d == 2
            else InteractionMatrix.scalar(-1.0),
            kernel=PowerLawKernel(2.0),
        )
        f = random_hermitian_field(lat, 1)
        g = random_hermitian_field(lat, 2)
        ks = lat.mode_norms_pow(cfg.s)
        ghat = cfg.kernel.ghat(lat.modes, lat.mode_norms)
        scale = 1.0 / (2.0 * np.pi) ** lat.d

        t_conv_nb = _time(
            lambda: conv_direct(f.coeffs, g.coeffs, lat.modes, lat.K, scale, use_numba=True),
            args.repeats,
        )
        t_conv_np = _time(
            lambda: conv_direct(f.coeffs, g.coeffs, lat.modes, lat.K, scale, use_numba=False),
            args.repeats,
        )
        t_conv_fft = _time(lambda: _conv_fft(f.coeffs, g.coeffs, lat), args.repeats)
        t_bil_nb = _time(
            lambda: bilinear_direct(
                f.coeffs, g.coeffs, lat.modes, ks, ghat, cfg.matrix.entries,
                0.3, lat.K, scale, use_numba=True,
            ),
            args.repeats,
        )
        t_bil_np = _time(
            lambda: bilinear_direct(
                f.coeffs, g.coeffs, lat.modes, ks, ghat, cfg.matrix.entries,
                0.3, lat.K, scale, use_numba=False,
            ),
            args.repeats,
        )
        name = f"d={lat.d} K={lat.K}"
        print(
            f"{name:>12} {lat.n_modes:>6} | {t_conv_nb*1e3:>9.3f}ms {t_conv_np*1e3:>9.3f}ms "
            f"{t_conv_fft*1e3:>9.3f}ms | {t_bil_nb*1e3:>9.3f}ms {t_bil_np*1e3:>9.3f}ms"
        )


if __name__ == "__main__":
    main()
