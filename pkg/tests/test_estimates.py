"""Estimates lab: corpus reproducibility, commutator ratio families,
weighted group growth, and the two-time mass identity.

Pinned corpus maxima come from seed 7001 on (n=2048, L=50, size=50);
the refinement factors sit at 1 + O(eps) because resampling re-evaluates
the same continuum functions on the finer grid.
"""

import numpy as np
import pytest

from fbbmlab.estimates import (
    BoundaryContaminationError,
    QuadratureInconsistencyError,
    RATIO_FAMILIES,
    _ratio,
    commutator_a_ratio,
    corpus_ratios,
    frac_commutator_ratio,
    group_weighted_growth,
    hilbert_commutator_ratio,
    make_corpus,
    ratio_report,
    resample_corpus,
    ucp_residual,
)
from fbbmlab.evolution import EvolveConfig, evolve, mass
from fbbmlab.spectral import Field, deriv, field_l2, field_linf, make_grid

SEED = 7001


@pytest.fixture(scope="module")
def corpus():
    return make_corpus(2048, 50.0, 12, seed=SEED)


@pytest.fixture(scope="module")
def mean_half_traj():
    # initial integral exactly 0.5
    g = make_grid(1024, 50.0)
    phi = Field(g, (0.5 / np.sqrt(np.pi)) * np.exp(-g.xs**2))
    return evolve(phi, EvolveConfig(alpha=0.5, dt=0.01, t_final=5.0, snapshot_stride=1))


# ------------------------------------------------------------------- corpus


def test_corpus_reproducible(corpus):
    again = make_corpus(2048, 50.0, 12, seed=SEED)
    assert np.array_equal(corpus.fields, again.fields)
    assert np.array_equal(corpus.weights, again.weights)
    other = make_corpus(2048, 50.0, 12, seed=SEED + 1)
    assert not np.array_equal(corpus.fields, other.fields)


def test_corpus_fields_unit_norm(corpus):
    for row in corpus.fields:
        assert field_l2(Field(corpus.grid, row)) == pytest.approx(1.0, rel=1e-12)


def test_corpus_records_weight_gradients(corpus):
    assert np.all(np.isfinite(corpus.weight_grad_sup))
    assert np.all(corpus.weight_grad_sup > 0)
    w0 = Field(corpus.grid, corpus.weights[0])
    assert corpus.weight_grad_sup[0] == pytest.approx(field_linf(deriv(w0)), rel=1e-12)


def test_corpus_validation():
    with pytest.raises(ValueError, match="size"):
        make_corpus(2048, 50.0, 0, seed=1)
    with pytest.raises(ValueError, match="band"):
        make_corpus(2048, 50.0, 4, seed=1, field_band=400)


def test_resample_is_same_function(corpus):
    fine = resample_corpus(corpus, 4096)
    # coarse points interleave the fine grid
    assert np.allclose(fine.fields[:, ::2], corpus.fields, atol=1e-12)
    assert np.allclose(fine.weights[:, ::2], corpus.weights, atol=1e-12)
    with pytest.raises(ValueError, match="resolve"):
        resample_corpus(corpus, 512)


# ------------------------------------------------------------ ratio kernels


def test_constant_weight_gives_zero(corpus):
    g = corpus.grid
    const = Field(g, np.full(g.n, 1.7))
    f = Field(g, corpus.fields[0])
    assert commutator_a_ratio(const, f, 0.5) == 0.0
    # l+m = 0 divides by ||psi||_inf, not a derivative sup, so the
    # constant-weight convention does not kick in; roundoff remains
    assert hilbert_commutator_ratio(const, f, 0, 0) < 1e-11
    assert hilbert_commutator_ratio(const, f, 0, 1) == 0.0
    assert hilbert_commutator_ratio(const, f, 1, 1) == 0.0
    assert frac_commutator_ratio(const, f, 0.25, 0.5) == 0.0


def test_constant_weight_nonzero_numerator_flags():
    with pytest.raises(QuadratureInconsistencyError):
        _ratio(num=1.0, den_sup=0.0, den_scale=1.0, fnorm=1.0)


def test_generator_ratio_unit_slope_weight():
    # g = 8 sin(x/8) has ||g'||_inf = 1; box chosen so x/8 is periodic
    L = 8 * np.pi
    vals = {}
    for n in (1024, 2048):
        grid = make_grid(n, L)
        g = Field(grid, 8.0 * np.sin(grid.xs / 8.0))
        f = Field(grid, resample_corpus(make_corpus(1024, L, 1, seed=3), n).fields[0])
        vals[n] = commutator_a_ratio(g, f, 0.5)
    assert 0 < vals[2048] < 10
    assert 0.5 <= vals[2048] / vals[1024] <= 2.0


def test_order_validation(corpus):
    g = corpus.grid
    psi = Field(g, corpus.weights[0])
    f = Field(g, corpus.fields[0])
    for l, m in [(2, 1), (-1, 0), (0, 3)]:
        with pytest.raises(ValueError, match="orders"):
            hilbert_commutator_ratio(psi, f, l, m)
    with pytest.raises(ValueError, match="alpha"):
        frac_commutator_ratio(psi, f, 1.0, 0.3)
    with pytest.raises(ValueError, match="beta"):
        frac_commutator_ratio(psi, f, 0.2, 0.0)
    with pytest.raises(ValueError, match="<= 1"):
        frac_commutator_ratio(psi, f, 0.7, 0.7)


def test_grid_mismatch_and_zero_field(corpus):
    g = corpus.grid
    psi = Field(g, corpus.weights[0])
    with pytest.raises(ValueError, match="grids"):
        commutator_a_ratio(psi, Field(make_grid(1024, 50.0), np.zeros(1024)), 0.5)
    with pytest.raises(ValueError, match="zero field"):
        commutator_a_ratio(psi, Field(g, np.zeros(g.n)), 0.5)


def test_corpus_ratio_parameter_validation(corpus):
    with pytest.raises(ValueError, match="unknown ratio family"):
        corpus_ratios(corpus, "laplace", alpha=0.5)
    with pytest.raises(ValueError, match="takes parameters"):
        corpus_ratios(corpus, "generator", beta=0.5)
    assert set(RATIO_FAMILIES) == {"generator", "hilbert", "fractional"}


def test_threads_merge_in_order(corpus):
    seq = corpus_ratios(corpus, "fractional", alpha=0.25, beta=0.5)
    par = corpus_ratios(corpus, "fractional", alpha=0.25, beta=0.5, threads=3)
    assert np.array_equal(seq, par)


# ------------------------------------------------------------ corpus sweeps


@pytest.mark.parametrize(
    "family, params, pinned_max",
    [
        ("generator", dict(alpha=0.5), 0.129175),
        ("hilbert", dict(l=0, m=1), 0.073834),
        ("hilbert", dict(l=1, m=1), 0.025474),
        ("fractional", dict(alpha=0.25, beta=0.5), 0.299156),
        ("fractional", dict(alpha=0.0, beta=0.5), 0.299570),
    ],
)
def test_ratio_report_pinned(family, params, pinned_max):
    rep = ratio_report(family, 2048, 50.0, 50, seed=SEED, **params)
    assert rep.corpus_max == pytest.approx(pinned_max, abs=2e-6)
    assert 0.5 <= rep.refinement_factor <= 2.0
    # same continuum corpus on both grids: factor is 1 up to roundoff
    assert rep.refinement_factor == pytest.approx(1.0, abs=1e-3)
    assert rep.seed == SEED and len(rep.ratios) == 50
    d = rep.to_dict()
    assert d["family"] == family and d["params"] == params


def test_corpus_size_doubling_stable():
    r50 = corpus_ratios(make_corpus(2048, 50.0, 50, seed=SEED), "generator", alpha=0.5)
    r100 = corpus_ratios(make_corpus(2048, 50.0, 100, seed=SEED), "generator", alpha=0.5)
    assert 0.5 <= r100.max() / r50.max() <= 2.0


def test_hilbert_step_weight_stable():
    # smooth periodic step: transition layers instead of a hard jump
    vals = {}
    for n in (1024, 2048):
        grid = make_grid(n, 50.0)
        psi = Field(grid, np.tanh(4.0 * np.sin(np.pi * grid.xs / 50.0)))
        f = Field(grid, resample_corpus(make_corpus(1024, 50.0, 1, seed=5), n).fields[0])
        vals[n] = hilbert_commutator_ratio(psi, f, 0, 1)
    assert 0 < vals[2048] < 10
    assert 0.5 <= vals[2048] / vals[1024] <= 2.0


# --------------------------------------------------------- weighted growth


@pytest.mark.parametrize(
    "alpha, r, L, pinned_slope",
    [
        (0.5, 0.7, 1000.0, 0.5962),
        (0.5, 1.2, 1000.0, 1.0242),
        (0.75, 1.8, 1500.0, 1.5397),
    ],
)
def test_growth_slope_within_ceiling(alpha, r, L, pinned_slope):
    g = make_grid(2**14, L)
    phi = Field(g, np.exp(-g.xs**2))
    rep = group_weighted_growth(phi, alpha, r, np.arange(1.0, 41.0))
    assert rep.within_bound and rep.slope <= np.ceil(r) + 0.2
    assert rep.slope == pytest.approx(pinned_slope, abs=0.02)


def test_growth_unweighted_is_unitary():
    g = make_grid(2**12, 400.0)
    phi = Field(g, np.exp(-g.xs**2))
    rep = group_weighted_growth(phi, 0.5, 0.0, np.arange(1.0, 21.0))
    assert abs(rep.slope) < 1e-12
    assert np.allclose(rep.norms, rep.base_norm, rtol=1e-12)


def test_growth_time_zero_ratio_one():
    g = make_grid(2**12, 400.0)
    phi = Field(g, np.exp(-g.xs**2))
    rep = group_weighted_growth(phi, 0.5, 1.2, [0.0, 1.0, 2.0])
    assert rep.norms[0] == pytest.approx(rep.base_norm, rel=1e-12)


def test_growth_boundary_contamination_aborts():
    g = make_grid(1024, 30.0)
    phi = Field(g, np.exp(-g.xs**2))
    with pytest.raises(BoundaryContaminationError, match="mass fraction"):
        group_weighted_growth(phi, 0.5, 1.0, [1.0, 40.0])


def test_growth_validation():
    g = make_grid(256, 100.0)
    phi = Field(g, np.exp(-g.xs**2))
    with pytest.raises(ValueError, match="r must be"):
        group_weighted_growth(phi, 0.5, -0.5, [1.0])
    for bad in ([], [2.0, 1.0], [-1.0, 2.0]):
        with pytest.raises(ValueError, match="times"):
            group_weighted_growth(phi, 0.5, 1.0, bad)


# ----------------------------------------------------------- mass identity


def test_ucp_zero_solution():
    g = make_grid(256, 50.0)
    traj = evolve(Field(g, np.zeros(g.n)), EvolveConfig(alpha=0.5, dt=0.01, t_final=1.0))
    assert ucp_residual(traj, 0.0, 1.0) == 0.0


def test_ucp_positive_mean(mean_half_traj):
    R = ucp_residual(mean_half_traj, 0.0, 5.0)
    assert R == pytest.approx(0.6000492460, rel=1e-6)
    # both terms nonnegative for even power, so R dominates the mass
    assert R >= mass(mean_half_traj.field_at(0)) >= 0.5


def test_ucp_mass_constant_along_trajectory(mean_half_traj):
    masses = [
        mean_half_traj.grid.dx * np.sum(s) for s in mean_half_traj.states
    ]
    assert np.max(np.abs(np.array(masses) - masses[0])) <= 1e-8


def test_ucp_quadrature_stride_halving():
    g = make_grid(1024, 50.0)
    phi = Field(g, (0.5 / np.sqrt(np.pi)) * np.exp(-g.xs**2))
    R = []
    for stride in (2, 1):
        traj = evolve(
            phi, EvolveConfig(alpha=0.5, dt=0.01, t_final=5.0, snapshot_stride=stride)
        )
        R.append(ucp_residual(traj, 0.0, 5.0))
    assert abs(R[1] - R[0]) / abs(R[1]) < 1e-6


def test_ucp_odd_data_strictly_positive():
    g = make_grid(1024, 50.0)
    phi = Field(g, g.xs * np.exp(-g.xs**2))
    assert abs(mass(phi)) < 1e-14
    traj = evolve(phi, EvolveConfig(alpha=0.5, dt=0.01, t_final=5.0, snapshot_stride=1))
    R = ucp_residual(traj, 0.0, 5.0)
    assert R == pytest.approx(0.3275461976, rel=1e-6)
    assert R > 0


def test_ucp_linear_flow_reindexes(mean_half_traj):
    g = make_grid(1024, 50.0)
    phi = Field(g, (0.5 / np.sqrt(np.pi)) * np.exp(-g.xs**2))
    traj = evolve(
        phi,
        EvolveConfig(
            alpha=0.5, dt=0.01, t_final=8.0, snapshot_stride=1, linear_only=True
        ),
    )
    Ra = ucp_residual(traj, 0.0, 5.0)
    Rb = ucp_residual(traj, 2.0, 7.0)
    assert abs(Ra - Rb) / abs(Ra) < 1e-9


def test_ucp_odd_power_reports_without_sign():
    g = make_grid(1024, 50.0)
    phi = Field(g, (0.5 / np.sqrt(np.pi)) * np.exp(-g.xs**2))
    traj = evolve(
        phi, EvolveConfig(alpha=0.5, dt=0.01, t_final=5.0, power=3, snapshot_stride=1)
    )
    assert np.isfinite(ucp_residual(traj, 0.0, 5.0))


def test_ucp_validation(mean_half_traj):
    with pytest.raises(ValueError, match="t1 < t2"):
        ucp_residual(mean_half_traj, 2.0, 1.0)
    with pytest.raises(ValueError, match="t1 < t2"):
        ucp_residual(mean_half_traj, -1.0, 1.0)
    with pytest.raises(ValueError, match="snapshot"):
        ucp_residual(mean_half_traj, 0.005, 5.0)
    with pytest.raises(ValueError, match="snapshot"):
        ucp_residual(mean_half_traj, 0.0, 5.7)
    with pytest.raises(ValueError, match="power"):
        ucp_residual(mean_half_traj, 0.0, 5.0, k=1)
