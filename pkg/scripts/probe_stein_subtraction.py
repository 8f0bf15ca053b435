"""Probe: small-eta exponent of the pointwise-difference derivative.

Checks which plateau-subtraction form recovers the alpha-theta power for
D^theta(|xi|^alpha psi)(eta) as eta -> 0: subtracting the plateau from the
value itself, or from its square (the energy integral).
"""

import numpy as np


def smooth_step(t):
    # C-infinity partition ramp: 0 for t<=0, 1 for t>=1
    t = np.clip(t, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.maximum(1 - t, 1e-300)), 0.0)
    return a / (a + b)


def psi(x):
    # 1 on [-1,1], 0 outside [-2,2]
    return smooth_step(2.0 - np.abs(x))


def g(x, alpha):
    return np.abs(x) ** alpha * psi(x)


def stein_pointwise(eta, alpha, theta, pts_per_decade=200):
    Y0 = 2.0
    # log-graded nodes around the singular point eta and around 0
    def cluster(center, span):
        t = np.logspace(-13, np.log10(span), int(pts_per_decade * (13 + np.log10(span))))
        return np.concatenate([center - t[::-1], [center], center + t])

    ys = np.concatenate([cluster(eta, Y0 + abs(eta) + 1), cluster(0.0, Y0 + 1)])
    ys = np.unique(ys)
    ys = ys[(ys > -Y0) & (ys < Y0)]
    vals = (g(eta, alpha) - g(ys, alpha)) ** 2 / np.abs(eta - ys) ** (1 + 2 * theta)
    keep = np.abs(ys - eta) > 1e-12
    integral = np.trapz(vals[keep], ys[keep])
    tail = g(eta, alpha) ** 2 * ((Y0 - eta) ** (-2 * theta) + (Y0 + eta) ** (-2 * theta)) / (2 * theta)
    return np.sqrt(integral + tail)


def fit_slope(xs, ys):
    lx, ly = np.log(xs), np.log(ys)
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    return coef[0]


if __name__ == "__main__":
    for alpha, theta in [(0.5, 0.25), (0.75, 0.5), (0.25, 0.125)]:
        eta0 = 1e-6
        c1 = stein_pointwise(eta0, alpha, theta)
        etas = np.logspace(-3, -1, 17)
        V = np.array([stein_pointwise(e, alpha, theta) for e in etas])
        direct = fit_slope(etas, np.abs(V - c1))
        squared = fit_slope(etas, np.sqrt(np.abs(V**2 - c1**2)))
        print(
            f"alpha={alpha} theta={theta}: c1={c1:.6f} "
            f"slope(V-c1)={direct:+.4f} slope(sqrt|V^2-c1^2|)={squared:+.4f} "
            f"target={alpha-theta:+.4f}"
        )
