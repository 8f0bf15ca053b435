"""Randomized stress tests for the operator inequalities behind the solver.

Three commutator families, the polynomially weighted growth of the free
group, and the two-time mass identity that obstructs critical spatial
decay.  The inequalities carry implicit constants, so each family is
tested as ratio stability: draw a reproducible corpus of band-limited
fields and smooth weights, evaluate left side over right side per
instance, and require the corpus maximum to be finite and stable under
grid refinement.

Corpus fields live in the lower third of the spectrum and weights in a
handful of low modes, so every pointwise product stays strictly below
the Nyquist frequency: the discrete operators then agree with their
continuum symbols to roundoff, and refining the grid re-evaluates the
exact same functions.  Refinement factors consequently sit at 1 + O(eps)
rather than merely inside the [1/2, 2] stability band.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import ceil

import numpy as np

from .evolution import Trajectory
from .spectral import (
    Field,
    SpectralGrid,
    deriv,
    field_l2,
    field_linf,
    frac_deriv,
    group_propagate,
    hilbert,
    make_grid,
    op_a,
)
from .weighted import weighted_norm

__all__ = [
    "TestCorpus",
    "RatioReport",
    "GrowthReport",
    "QuadratureInconsistencyError",
    "BoundaryContaminationError",
    "make_corpus",
    "resample_corpus",
    "commutator_a_ratio",
    "hilbert_commutator_ratio",
    "frac_commutator_ratio",
    "corpus_ratios",
    "ratio_report",
    "group_weighted_growth",
    "ucp_residual",
    "RATIO_FAMILIES",
]

# A commutator against a constant weight vanishes identically; anything
# above this (relative to ||f||_2) means the discretization broke.
CONSTANT_COMMUTATOR_TOL = 1e-11

# Weights use a fixed low band so the same smooth function is
# reproduced exactly on every resolution of interest.
WEIGHT_BAND = 6

RATIO_FAMILIES = ("generator", "hilbert", "fractional")


class QuadratureInconsistencyError(RuntimeError):
    """Constant weight but a commutator numerator above roundoff."""


class BoundaryContaminationError(RuntimeError):
    """A propagated field carried measurable mass to the box edge."""


# ----------------------------------------------------------------- corpus


def _synthesize(coeffs: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    """Evaluate a trigonometric polynomial from its series coefficients.

    coeffs[k] multiplies the k-th positive-frequency mode (coeffs[0] the
    mean), independently of n, so the same continuum function comes back
    on any grid that resolves the band.
    """
    half = grid.n // 2 + 1
    if coeffs.shape[-1] > half:
        raise ValueError("band exceeds grid resolution")
    buf = np.zeros(half, dtype=complex)
    buf[: coeffs.shape[-1]] = coeffs
    return np.fft.irfft(buf * grid.n, grid.n)


@dataclass(frozen=True)
class TestCorpus:
    """Reproducible batch of band-limited fields and smooth weights.

    fields are unit L2; weight_grad_sup records ||g'||_inf per weight.
    The series coefficients are kept so the corpus can be re-sampled on
    a finer grid as the same continuum functions.
    """

    seed: int
    size: int
    grid: SpectralGrid
    field_coeffs: np.ndarray
    weight_coeffs: np.ndarray
    fields: np.ndarray
    weights: np.ndarray
    weight_grad_sup: np.ndarray


def _grad_sup(values: np.ndarray, grid: SpectralGrid) -> float:
    return field_linf(deriv(Field(grid, values)))


def _build(seed, size, grid, field_coeffs, weight_coeffs) -> TestCorpus:
    fields = np.empty((size, grid.n))
    weights = np.empty((size, grid.n))
    grad = np.empty(size)
    for i in range(size):
        fields[i] = _synthesize(field_coeffs[i], grid)
        weights[i] = _synthesize(weight_coeffs[i], grid)
        grad[i] = _grad_sup(weights[i], grid)
    return TestCorpus(
        seed=seed,
        size=size,
        grid=grid,
        field_coeffs=field_coeffs,
        weight_coeffs=weight_coeffs,
        fields=fields,
        weights=weights,
        weight_grad_sup=grad,
    )


def make_corpus(
    n: int, L: float, size: int, seed: int, field_band: int | None = None
) -> TestCorpus:
    """Draw `size` random (field, weight) pairs on an n-point box.

    Fields get standard-normal coefficients on modes 0..field_band
    (default n//6) and are normalized to unit L2.  Weights use
    1/(1+k)-damped coefficients on modes 0..WEIGHT_BAND.  Regeneration
    from the same seed is bit-identical.
    """
    grid = make_grid(n, L)
    band = n // 6 if field_band is None else int(field_band)
    if not 1 <= band <= n // 6:
        raise ValueError(f"field band must lie in [1, n//6], got {band}")
    if size < 1:
        raise ValueError(f"corpus size must be >= 1, got {size}")
    rng = np.random.default_rng(seed)
    fc = rng.standard_normal((size, band + 1)) + 1j * rng.standard_normal(
        (size, band + 1)
    )
    fc[:, 0] = fc[:, 0].real
    wc = rng.standard_normal((size, WEIGHT_BAND + 1)) + 1j * rng.standard_normal(
        (size, WEIGHT_BAND + 1)
    )
    wc[:, 0] = wc[:, 0].real
    wc /= 1.0 + np.arange(WEIGHT_BAND + 1)
    # normalize fields through the synthesized values; quadrature is exact
    # for band-limited data so the norm carries to any finer grid
    for i in range(size):
        nrm = field_l2(Field(grid, _synthesize(fc[i], grid)))
        fc[i] /= nrm
    return _build(seed, size, grid, fc, wc)


def resample_corpus(corpus: TestCorpus, n: int) -> TestCorpus:
    """Same continuum corpus on an n-point grid (band must still fit)."""
    if n // 6 < corpus.field_coeffs.shape[-1] - 1:
        raise ValueError("target grid does not resolve the corpus band")
    grid = make_grid(n, corpus.grid.L)
    return _build(
        corpus.seed, corpus.size, grid, corpus.field_coeffs, corpus.weight_coeffs
    )


# ------------------------------------------------------------ ratio kernels


def _nonzero_l2(f: Field) -> float:
    nrm = field_l2(f)
    if nrm == 0.0:
        raise ValueError("ratio undefined for the zero field")
    return nrm


def _ratio(num: float, den_sup: float, den_scale: float, fnorm: float) -> float:
    """Shared constant-weight policy for all commutator families.

    den_sup is the sup of the relevant weight derivative; a value at
    roundoff level (relative to den_scale) means the weight is constant
    for this family, the commutator must vanish, and the ratio is 0 by
    convention.  A non-vanishing numerator there is a quadrature bug.
    """
    if den_sup <= 1e-13 * max(1.0, den_scale):
        if num > CONSTANT_COMMUTATOR_TOL * fnorm:
            raise QuadratureInconsistencyError(
                f"constant weight but commutator norm {num:.3e} "
                f"exceeds {CONSTANT_COMMUTATOR_TOL:.0e} * ||f||"
            )
        return 0.0
    return num / (den_sup * fnorm)


def commutator_a_ratio(weight: Field, f: Field, alpha: float) -> float:
    """||[A, g] f||_2 / (||g'||_inf ||f||_2), A the free-flow generator.

    The bound states the left side is controlled by the right with a
    constant independent of f and g; the ratio is that constant's
    per-instance lower estimate.
    """
    if weight.grid != f.grid:
        raise ValueError("weight and field live on different grids")
    fnorm = _nonzero_l2(f)
    gf = Field(f.grid, np.asarray(weight.values) * np.asarray(f.values))
    comm = op_a(gf, alpha).values - np.asarray(weight.values) * op_a(f, alpha).values
    num = field_l2(Field(f.grid, comm))
    gsup = _grad_sup(np.asarray(weight.values), f.grid)
    return _ratio(num, gsup, field_linf(weight), fnorm)


def hilbert_commutator_ratio(psi: Field, f: Field, l: int, m: int) -> float:
    """||d^l (H(psi d^m f) - psi H(d^m f))||_2 / (||psi^(l+m)||_inf ||f||_2).

    Calderon-type smoothing: the commutator with the Hilbert transform
    absorbs l+m derivatives into the weight, one order per slot.
    """
    if l < 0 or m < 0 or l + m > 2:
        raise ValueError(f"orders must satisfy l, m >= 0 and l + m <= 2, got {(l, m)}")
    if psi.grid != f.grid:
        raise ValueError("weight and field live on different grids")
    fnorm = _nonzero_l2(f)
    v = deriv(f, m) if m else f
    pv = Field(f.grid, np.asarray(psi.values) * np.asarray(v.values))
    inner = Field(
        f.grid, hilbert(pv).values - np.asarray(psi.values) * hilbert(v).values
    )
    lhs = deriv(inner, l) if l else inner
    dsup = (
        field_linf(deriv(psi, l + m)) if l + m else field_linf(psi)
    )
    return _ratio(field_l2(lhs), dsup, field_linf(psi), fnorm)


def frac_commutator_ratio(psi: Field, f: Field, alpha: float, beta: float) -> float:
    """||D^a [D^b; psi] D^(1-a-b) f||_2 / (||psi'||_inf ||f||_2).

    The three fractional orders sum to one, matching the single
    derivative the weight gives up.  Requires a in [0,1), b in (0,1),
    a + b <= 1.
    """
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    if alpha + beta > 1.0 + 1e-12:
        raise ValueError(f"alpha + beta must be <= 1, got {alpha + beta}")
    if psi.grid != f.grid:
        raise ValueError("weight and field live on different grids")
    fnorm = _nonzero_l2(f)
    v = frac_deriv(f, 1.0 - alpha - beta)
    pv = Field(f.grid, np.asarray(psi.values) * np.asarray(v.values))
    inner = Field(
        f.grid,
        frac_deriv(pv, beta).values
        - np.asarray(psi.values) * frac_deriv(v, beta).values,
    )
    lhs = frac_deriv(inner, alpha) if alpha > 0 else inner
    psup = _grad_sup(np.asarray(psi.values), f.grid)
    return _ratio(field_l2(lhs), psup, field_linf(psi), fnorm)


# ------------------------------------------------------------- corpus sweep


def _family_eval(family: str, params: dict):
    if family == "generator":
        alpha = params["alpha"]
        return lambda g, f: commutator_a_ratio(g, f, alpha)
    if family == "hilbert":
        l, m = params["l"], params["m"]
        return lambda g, f: hilbert_commutator_ratio(g, f, l, m)
    if family == "fractional":
        alpha, beta = params["alpha"], params["beta"]
        return lambda g, f: frac_commutator_ratio(g, f, alpha, beta)
    raise ValueError(f"unknown ratio family {family!r}; know {RATIO_FAMILIES}")


_FAMILY_PARAMS = {
    "generator": ("alpha",),
    "hilbert": ("l", "m"),
    "fractional": ("alpha", "beta"),
}


def corpus_ratios(
    corpus: TestCorpus, family: str, threads: int = 1, **params
) -> np.ndarray:
    """Per-instance ratios over the corpus, merged in corpus order.

    Instances are independent; threads > 1 farms them out and the
    ordered merge keeps the result identical to the sequential run.
    """
    want = _FAMILY_PARAMS.get(family)
    if want is None:
        raise ValueError(f"unknown ratio family {family!r}; know {RATIO_FAMILIES}")
    if set(params) != set(want):
        raise ValueError(f"family {family!r} takes parameters {want}, got {tuple(params)}")
    ev = _family_eval(family, params)
    grid = corpus.grid

    def one(i: int) -> float:
        return ev(Field(grid, corpus.weights[i]), Field(grid, corpus.fields[i]))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return np.fromiter(pool.map(one, range(corpus.size)), dtype=float)
    return np.fromiter(map(one, range(corpus.size)), dtype=float)


@dataclass(frozen=True)
class RatioReport:
    """Corpus-max ratio for one inequality family plus its refinement check.

    refinement_factor is the corpus max on the doubled grid over the
    base corpus max; a passing family keeps it inside [1/2, 2].
    """

    family: str
    seed: int
    size: int
    n: int
    L: float
    params: dict
    ratios: tuple
    corpus_max: float
    refined_max: float
    refinement_factor: float

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "seed": self.seed,
            "size": self.size,
            "n": self.n,
            "L": self.L,
            "params": dict(self.params),
            "ratios": list(self.ratios),
            "corpus_max": self.corpus_max,
            "refined_max": self.refined_max,
            "refinement_factor": self.refinement_factor,
        }


def ratio_report(
    family: str,
    n: int,
    L: float,
    size: int,
    seed: int,
    threads: int = 1,
    **params,
) -> RatioReport:
    """Evaluate one family over a fresh corpus at n and at 2n."""
    corpus = make_corpus(n, L, size, seed)
    ratios = corpus_ratios(corpus, family, threads=threads, **params)
    fine = corpus_ratios(resample_corpus(corpus, 2 * n), family, threads=threads, **params)
    base_max = float(np.max(ratios))
    fine_max = float(np.max(fine))
    factor = fine_max / base_max if base_max > 0 else 1.0
    return RatioReport(
        family=family,
        seed=seed,
        size=size,
        n=n,
        L=L,
        params=dict(params),
        ratios=tuple(float(r) for r in ratios),
        corpus_max=base_max,
        refined_max=fine_max,
        refinement_factor=factor,
    )


# -------------------------------------------------------- weighted growth


@dataclass(frozen=True)
class GrowthReport:
    """Fitted polynomial growth of ||<x>^r exp(tA) phi||_2.

    slope is the least-squares slope of log norm against log t over the
    positive sample times; the expected ceiling is ceil(r), padded by
    0.2 to absorb fit noise.
    """

    alpha: float
    r: float
    times: tuple
    norms: tuple
    base_norm: float
    slope: float
    bound: float
    within_bound: bool

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "r": self.r,
            "times": list(self.times),
            "norms": list(self.norms),
            "base_norm": self.base_norm,
            "slope": self.slope,
            "bound": self.bound,
            "within_bound": self.within_bound,
        }


def group_weighted_growth(
    phi: Field,
    alpha: float,
    r: float,
    times,
    edge_fraction: float = 0.8,
    tail_tol: float = 1e-8,
) -> GrowthReport:
    """Propagate phi with the free group and fit the weighted-norm growth.

    The group is dispersive, not weight-unitary: mass migrates outward
    and the r-weighted norm grows polynomially.  On a periodic box the
    outward flux eventually wraps around, which would masquerade as
    extra growth, so any sample time whose L2 mass fraction beyond
    edge_fraction * L exceeds tail_tol aborts the fit.
    """
    if r < 0:
        raise ValueError(f"decay order r must be >= 0, got {r}")
    ts = np.asarray(times, dtype=float)
    if ts.size == 0 or np.any(ts < 0) or np.any(np.diff(ts) <= 0):
        raise ValueError("times must be nonempty, nonnegative, strictly increasing")
    grid = phi.grid
    edge = np.abs(grid.xs) > edge_fraction * grid.L
    base = weighted_norm(phi, r)
    norms = np.empty(ts.size)
    for j, t in enumerate(ts):
        u = group_propagate(phi, float(t), alpha)
        vals = np.asarray(u.values)
        total = float(np.sum(vals**2))
        leaked = float(np.sum(vals[edge] ** 2))
        if total > 0 and leaked > tail_tol * total:
            raise BoundaryContaminationError(
                f"t={t:g}: mass fraction {leaked / total:.2e} beyond "
                f"{edge_fraction:g} L exceeds {tail_tol:.0e}"
            )
        norms[j] = weighted_norm(u, r)
    pos = ts > 0
    if np.count_nonzero(pos) >= 2:
        slope = float(np.polyfit(np.log(ts[pos]), np.log(norms[pos]), 1)[0])
    else:
        slope = 0.0
    bound = ceil(r) + 0.2
    return GrowthReport(
        alpha=alpha,
        r=r,
        times=tuple(float(t) for t in ts),
        norms=tuple(float(v) for v in norms),
        base_norm=float(base),
        slope=slope,
        bound=bound,
        within_bound=slope <= bound,
    )


# ------------------------------------------------------------ mass identity


def _snap_index(times: np.ndarray, t: float, name: str) -> int:
    idx = int(np.argmin(np.abs(times - t)))
    if abs(times[idx] - t) > 1e-9 * max(1.0, abs(t)):
        raise ValueError(
            f"{name}={t:g} does not coincide with a recorded snapshot "
            f"(nearest is {times[idx]:g})"
        )
    return idx


def ucp_residual(traj: Trajectory, t1: float, t2: float, k: int | None = None) -> float:
    """Two-time mass identity residual over a recorded trajectory.

    R = u-hat(0, t1) + (1/(t2 - t1)) int_{t1}^{t2} int u^k dx dtau,
    with the time integral by trapezoid over the recorded snapshots.
    A solution with critical spatial decay at both ends would force
    R = 0; for even k and nonnegative initial mean both terms are
    nonnegative, so R = 0 pins the zero solution.  For odd k the sign
    carries no such obstruction and R is reported as-is.
    """
    if t1 < 0 or t2 <= t1:
        raise ValueError(f"need 0 <= t1 < t2, got t1={t1}, t2={t2}")
    kk = traj.config.power if k is None else int(k)
    if kk < 2:
        raise ValueError(f"nonlinearity power must be >= 2, got {kk}")
    times = np.asarray(traj.times)
    i1 = _snap_index(times, t1, "t1")
    i2 = _snap_index(times, t2, "t2")
    if i2 <= i1:
        raise ValueError("t1 and t2 snap to the same snapshot; refine the stride")
    dx = traj.grid.dx
    block = np.asarray(traj.states[i1 : i2 + 1])
    mass1 = dx * float(np.sum(block[0]))
    inner = dx * np.sum(block**kk, axis=1)
    integral = float(np.trapezoid(inner, times[i1 : i2 + 1]))
    return mass1 + integral / (times[i2] - times[i1])
