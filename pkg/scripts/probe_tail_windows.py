"""Probe: log-log slope of the (1+D^alpha)^(-1) kernel on periodic boxes.

The solitary-wave tail is asymptotically proportional to this kernel, so
the slope the tail fit would report for a given (n, L, window) can be
previewed here without running the solver.
"""

import numpy as np


def kernel(n, L, alpha):
    dx = 2 * L / n
    xi = 2 * np.pi * np.fft.rfftfreq(n, d=dx)
    sym = 1.0 / (1.0 + np.abs(xi) ** alpha)
    # inverse transform of a symbol: kernel samples on [0, 2L)
    g = np.fft.irfft(sym) / dx
    xs = dx * np.arange(n)
    return xs[: n // 2], g[: n // 2]


def fit(xs, ys, lo, hi):
    m = (xs > lo) & (xs < hi) & (ys > 0)
    lx, ly = np.log(xs[m]), np.log(ys[m])
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, res, *_ = np.linalg.lstsq(A, ly, rcond=None)
    ss_tot = np.sum((ly - ly.mean()) ** 2)
    ss_res = np.sum((ly - A @ coef) ** 2)
    r2 = 1 - ss_res / ss_tot
    return -coef[0], r2, m.sum()


if __name__ == "__main__":
    cases = [
        # alpha, n, L, windows to try
        (0.5, 8192, 200.0, [(30, 120)]),
        (0.5, 2**16, 6400.0, [(100, 400), (200, 1000), (100, 960)]),
        (0.5, 2**17, 12800.0, [(100, 960), (200, 1920)]),
        (0.75, 8192, 200.0, [(30, 120)]),
        (0.75, 2**14, 800.0, [(30, 120), (40, 160)]),
        (0.75, 2**15, 1600.0, [(40, 160), (60, 240)]),
        (0.25, 2**20, 131072.0, [(2000, 8000), (1000, 4000)]),
        (0.25, 2**22, 524288.0, [(2000, 8000), (4000, 16000), (1000, 8000)]),
    ]
    for alpha, n, L, windows in cases:
        xs, g = kernel(n, L, alpha)
        for lo, hi in windows:
            p, r2, cnt = fit(xs, g, lo, hi)
            print(
                f"alpha={alpha:<5} n=2^{int(np.log2(n)):<3} L={L:<9} "
                f"window=({lo},{hi}): p={p:.4f} (target {1+alpha}) "
                f"R2={r2:.6f} pts={cnt}"
            )
