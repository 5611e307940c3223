"""Phase-space layer tests.

The numeric transform is validated against two independent routes:
a brute-force displaced-parity evaluation (matrix exponentials, small dims)
and closed-form expressions for coherent and cat states.  Frozen constants
were computed once from the closed forms alone.
"""

import numpy as np
import pytest
from scipy.linalg import expm

from catsim.fock import (
    CatSpec,
    DensityMatrix,
    FockSpace,
    cat_state,
    coherent_state,
    parity_expectation,
)
from catsim.dynamics import evolve
from catsim.models import build_toy_model
from catsim.wigner import (
    DecoherenceSpec,
    WminModel,
    default_axis,
    fit_C_k,
    negativity,
    wigner_approx_re,
    wigner_cat_analytic,
    wigner_decohered,
    wigner_mixture,
    wigner_numeric,
    wmin_model,
)

W_EVEN_CAT_2_MIN = -0.47585703706634286  # 1-D minimum of the beta=2 even-cat form
W_ODD_ORIGIN = -2.0 / np.pi


def _wigner_brute(rho, xs, ps, pad=56):
    """Displaced-parity Wigner evaluation, O(d^3) per point. Test oracle only.

    The state is zero-padded before exponentiating the displacement
    generator: the truncated expm is a poor stand-in for the true
    displacement unless the dimension well exceeds |2 alpha|^2.
    """
    d = rho.shape[0]
    big = np.zeros((pad, pad), dtype=complex)
    big[:d, :d] = rho
    b = np.diag(np.sqrt(np.arange(1, pad)), 1)
    par = np.diag((-1.0) ** np.arange(pad)).astype(complex)
    out = np.empty((len(xs), len(ps)))
    for i, x in enumerate(xs):
        for j, p in enumerate(ps):
            alpha = x + 1j * p
            disp = expm(alpha * b.conj().T - np.conj(alpha) * b)
            out[i, j] = (2.0 / np.pi) * np.trace(big @ disp @ par @ disp.conj().T).real
    return out


def test_numeric_vacuum_peak():
    rho = DensityMatrix.from_pure(coherent_state(12, 0.0))
    grid = wigner_numeric(rho, x_axis=np.array([0.0]), p_axis=np.array([0.0]))
    assert abs(grid.values[0, 0] - 2.0 / np.pi) < 1e-9


def test_numeric_matches_brute_force_mixed_state():
    rng = np.random.default_rng(11)
    d = 14
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho_m = m @ m.conj().T
    rho_m /= np.trace(rho_m).real
    rho = DensityMatrix(FockSpace((d,), ("mech",)), rho_m)
    xs = np.linspace(-1.8, 1.8, 5)
    ps = np.linspace(-1.6, 1.6, 5)
    grid = wigner_numeric(rho, x_axis=xs, p_axis=ps)
    ref = _wigner_brute(rho_m, xs, ps)
    assert np.max(np.abs(grid.values - ref)) < 1e-8


def test_numeric_coherent_closed_form():
    beta_c = 1.3 + 0.4j
    rho = DensityMatrix.from_pure(coherent_state(30, beta_c))
    xs = np.linspace(-0.5, 2.5, 7)
    ps = np.linspace(-1.0, 1.5, 7)
    grid = wigner_numeric(rho, x_axis=xs, p_axis=ps)
    al = xs[:, None] + 1j * ps[None, :]
    ref = (2.0 / np.pi) * np.exp(-2.0 * np.abs(al - beta_c) ** 2)
    assert np.max(np.abs(grid.values - ref)) < 1e-8


def test_numeric_odd_cat_minimum():
    rho = DensityMatrix.from_pure(cat_state(40, CatSpec(2.0, "odd")))
    grid = wigner_numeric(rho)
    wmin, loc = negativity(grid)
    assert abs(wmin - W_ODD_ORIGIN) < 1e-6
    assert abs(loc[0]) < 0.05 and abs(loc[1]) < 0.05


def test_numeric_even_cat_minimum_frozen():
    rho = DensityMatrix.from_pure(cat_state(40, CatSpec(2.0, "even")))
    wmin, loc = negativity(wigner_numeric(rho))
    assert abs(wmin - W_EVEN_CAT_2_MIN) < 1e-3
    assert abs(loc[0]) < 0.05  # minimum sits on the x = 0 line


def test_analytic_vacuum_gaussian():
    ax = np.linspace(-2, 2, 41)
    grid = wigner_cat_analytic(CatSpec(0.0, "even"), x_axis=ax, p_axis=ax)
    ref = (2.0 / np.pi) * np.exp(-2.0 * (ax[:, None] ** 2 + ax[None, :] ** 2))
    assert np.max(np.abs(grid.values - ref)) < 1e-12


def test_analytic_matches_numeric_beta2():
    spec = CatSpec(2.0, "even")
    rho = DensityMatrix.from_pure(cat_state(40, spec))
    num = wigner_numeric(rho)
    ana = wigner_cat_analytic(spec, x_axis=num.x_axis, p_axis=num.p_axis)
    assert np.max(np.abs(num.values - ana.values)) < 1e-6


def test_analytic_odd_origin_exact():
    grid = wigner_cat_analytic(CatSpec(3.0, "odd"), x_axis=np.array([0.0]), p_axis=np.array([0.0]))
    assert abs(grid.values[0, 0] - W_ODD_ORIGIN) < 1e-12


def test_negativity_vacuum_nonnegative():
    rho = DensityMatrix.from_pure(coherent_state(12, 0.0))
    wmin, _ = negativity(wigner_numeric(rho))
    assert wmin >= 0.0


def test_negativity_refinement_beats_grid():
    ax = default_axis(2.0, n=201)
    grid = wigner_cat_analytic(CatSpec(2.0, "even"), x_axis=ax, p_axis=ax)
    wmin, (x0, p0) = negativity(grid)
    # the parabola fit must land well inside the raw grid-sample error;
    # its own accuracy is limited by the fringe curvature at this spacing
    grid_err = abs(float(grid.values.min()) - W_EVEN_CAT_2_MIN)
    assert abs(wmin - W_EVEN_CAT_2_MIN) < grid_err
    assert abs(wmin - W_EVEN_CAT_2_MIN) < 2e-3
    assert abs(x0) < 0.03
    assert abs(abs(p0) - 0.3698493410326367) < 0.02


def test_negativity_line_grid():
    # single-column grids (line scans) refine along the free axis only
    ps = np.linspace(-1.5, 1.5, 301)
    grid = wigner_cat_analytic(CatSpec(2.0, "even"), x_axis=np.array([0.0]), p_axis=ps)
    wmin, (x0, _) = negativity(grid)
    assert x0 == 0.0
    assert abs(wmin - W_EVEN_CAT_2_MIN) < 1e-5


def test_decohered_t0_is_pure_cat():
    ax = default_axis(2.0, n=101)
    for parity in ("even", "odd"):
        spec = DecoherenceSpec(2.0, parity, Gamma1=1.0, nth=0.0)
        dec = wigner_decohered(spec, 0.0, x_axis=ax, p_axis=ax)
        pure = wigner_cat_analytic(CatSpec(2.0, parity), x_axis=ax, p_axis=ax)
        assert np.max(np.abs(dec.values - pure.values)) < 1e-12


def test_decohered_long_time_thermal():
    ax = default_axis(2.0, n=101)
    spec = DecoherenceSpec(2.0, "even", Gamma1=1.0, nth=0.0)
    dec = wigner_decohered(spec, 20.0, x_axis=ax, p_axis=ax)
    assert np.min(dec.values) > -1e-12
    # all the energy is gone: peak back at the vacuum value
    i0 = len(ax) // 2
    assert abs(dec.values[i0, i0] - 2.0 / np.pi) < 1e-3


def test_decohered_xi_profile():
    spec = DecoherenceSpec(2.0, "even", Gamma1=0.7, nth=1.5)
    assert spec.xi(0.0) == 1.0
    ts = np.linspace(0, 5, 50)
    xis = np.array([spec.xi(t) for t in ts])
    assert np.all(np.diff(xis) >= 0)
    assert abs(xis[-1] - (2 * 1.5 + 1)) < 0.15


@pytest.mark.parametrize("nth", [0.0, 1.0])
def test_decohered_matches_master_equation(nth):
    """Closed-form decohering cat against direct integration of the damping model."""
    beta = 2.0
    dim = 32
    model = build_toy_model(Gamma1=1.0, Gamma2=0.0, eps2=0.0, nth=nth, dim=dim)
    rho0 = DensityMatrix.from_pure(cat_state(dim, CatSpec(beta, "even")))
    ax = np.linspace(-4.5, 4.5, 81)
    spec = DecoherenceSpec(beta, "even", Gamma1=1.0, nth=nth)
    rec = evolve(model, rho0, t_end=1.0, sample_times=[0.1, 0.5, 1.0], snapshot_times=[0.1, 0.5, 1.0])
    for t, rho_t in rec.snapshots:
        num = wigner_numeric(rho_t, x_axis=ax, p_axis=ax)
        ref = wigner_decohered(spec, t, x_axis=ax, p_axis=ax)
        assert np.max(np.abs(num.values - ref.values)) < 1e-3


def test_mixture_equals_two_gaussians():
    beta = 2.0
    ax = default_axis(beta, n=121)
    grid = wigner_mixture(beta, x_axis=ax, p_axis=ax)
    x = ax[:, None]
    p = ax[None, :]
    ref = (1.0 / np.pi) * (
        np.exp(-2 * ((x - beta) ** 2 + p**2)) + np.exp(-2 * ((x + beta) ** 2 + p**2))
    )
    assert np.max(np.abs(grid.values - ref)) < 1e-12
    assert np.min(grid.values) >= 0.0


def test_mixture_matches_numeric_kernel():
    beta = 1.5
    dim = 24
    c1 = coherent_state(dim, beta).amplitudes
    c2 = coherent_state(dim, -beta).amplitudes
    rho_m = 0.5 * (np.outer(c1, c1.conj()) + np.outer(c2, c2.conj()))
    rho = DensityMatrix(FockSpace((dim,), ("mech",)), rho_m)
    ax = default_axis(beta, n=101)
    num = wigner_numeric(rho, x_axis=ax, p_axis=ax)
    ref = wigner_mixture(beta, x_axis=ax, p_axis=ax)
    assert np.max(np.abs(num.values - ref.values)) < 1e-8


def test_toy_model_long_time_detailed_balance():
    """Weak single-phonon loss inside the stabilized manifold.

    The lobes survive, but the parity sectors do not equilibrate 50/50:
    odd cats hold more phonons (beta^2 coth vs beta^2 tanh), so they decay
    into the even sector faster than the reverse. The stationary state is
    the detailed-balance blend of the two cats, not the bare lobe mixture.
    """
    beta = 1.0
    dim = 16
    model = build_toy_model(Gamma1=0.006, Gamma2=1.0, eps2=0.5j, nth=0.0, dim=dim)
    vac = DensityMatrix.from_pure(coherent_state(dim, 0.0))
    rec = evolve(model, vac, t_end=800.0, sample_times=[800.0], snapshot_times=[800.0])
    _, rho_end = rec.snapshots[0]
    ax = default_axis(beta, n=101)
    num = wigner_numeric(rho_end, x_axis=ax, p_axis=ax)
    th = np.tanh(beta**2)
    ch = 1.0 / th
    p_even, p_odd = ch / (th + ch), th / (th + ch)
    ref = (
        p_even * wigner_cat_analytic(CatSpec(beta, "even"), x_axis=ax, p_axis=ax).values
        + p_odd * wigner_cat_analytic(CatSpec(beta, "odd"), x_axis=ax, p_axis=ax).values
    )
    assert np.max(np.abs(num.values - ref)) < 5e-3
    # the naive 50/50 mixture misses the surviving fringe by a wide margin
    mix = wigner_mixture(beta, x_axis=ax, p_axis=ax)
    assert np.max(np.abs(num.values - mix.values)) > 0.05
    assert abs(parity_expectation(rho_end, "mech") - (p_even - p_odd)) < 5e-3


def test_approx_re_boundary_cases():
    ax = default_axis(2.0, n=101)
    start = wigner_approx_re(2.0, Gamma1=0.1, Gamma2=1.0, t=0.0, x_axis=ax, p_axis=ax)
    ref0 = (2.0 / np.pi) * np.exp(-2.0 * (ax[:, None] ** 2 + ax[None, :] ** 2))
    assert np.max(np.abs(start.values - ref0)) < 1e-12

    late = wigner_approx_re(2.0, Gamma1=0.0, Gamma2=1.0, t=20.0, x_axis=ax, p_axis=ax)
    cat = wigner_cat_analytic(CatSpec(2.0, "even"), x_axis=ax, p_axis=ax)
    assert np.max(np.abs(late.values - cat.values)) < 1e-9


def test_approx_re_negativity_curve_dips():
    ax = np.linspace(-4.0, 4.0, 161)
    mins = []
    for t in np.linspace(0, 6, 25):
        grid = wigner_approx_re(2.0, Gamma1=0.1, Gamma2=1.0, t=t, x_axis=ax, p_axis=ax)
        mins.append(negativity(grid)[0])
    mins = np.array(mins)
    assert mins[0] >= 0.0
    assert np.min(mins) < -0.2
    assert mins[-1] > np.min(mins)


def test_wmin_model_frozen_plugins():
    model = WminModel(C=1.0 / 3.0, k=-0.25, beta=2.0, W_ideal=W_EVEN_CAT_2_MIN)
    ratio = wmin_model(model, 0.5) / model.W_ideal
    assert abs(ratio - 0.06948345122280154) < 1e-12
    # characteristic time at rate ratio 400
    assert abs(model.t_min(Gamma1=1.0, Gamma2=400.0) * 400.0 - 1.4907119849998598) < 1e-12


def test_wmin_model_ideal_limit():
    model = WminModel(C=1.0 / 3.0, k=-0.25, beta=2.0, W_ideal=W_EVEN_CAT_2_MIN)
    assert abs(wmin_model(model, 1e6) - model.W_ideal) < 1e-9


def test_fit_roundtrip_exact():
    model = WminModel(C=1.0 / 3.0, k=-0.25, beta=2.0, W_ideal=-0.476)
    g0k = np.geomspace(0.4, 8.0, 9)
    pts = [(g, wmin_model(model, g)) for g in g0k]
    C, k, resid = fit_C_k(pts, beta=2.0, W_ideal=-0.476)
    assert abs(C - 1.0 / 3.0) < 1e-10
    assert abs(k + 0.25) < 1e-10
    assert resid < 1e-10


def test_fit_excludes_saturated_points():
    model = WminModel(C=1.0 / 3.0, k=-0.25, beta=2.0, W_ideal=-0.476)
    pts = [(g, wmin_model(model, g)) for g in np.geomspace(0.4, 8.0, 8)]
    pts.append((1e9, -0.476 * 0.99999))  # ratio too close to 1, must be dropped
    C, k, _ = fit_C_k(pts, beta=2.0, W_ideal=-0.476)
    assert abs(C - 1.0 / 3.0) < 1e-8
    assert abs(k + 0.25) < 1e-8


def test_fit_degenerate_input_errors():
    pts = [(1.0, -0.1), (1.0, -0.2), (1.0, -0.3), (1.0, -0.15)]
    with pytest.raises(ValueError):
        fit_C_k(pts, beta=2.0, W_ideal=-0.476)


def test_grid_invariants_bound_symmetry_norm():
    ax = default_axis(2.0, n=201)
    rho = DensityMatrix.from_pure(cat_state(40, CatSpec(2.0, "even")))
    forms = [
        wigner_numeric(rho, x_axis=ax, p_axis=ax),
        wigner_cat_analytic(CatSpec(2.0, "even"), x_axis=ax, p_axis=ax),
        wigner_cat_analytic(CatSpec(2.0, "odd"), x_axis=ax, p_axis=ax),
        wigner_decohered(DecoherenceSpec(2.0, "even", 1.0, 0.5), 0.3, x_axis=ax, p_axis=ax),
        wigner_mixture(2.0, x_axis=ax, p_axis=ax),
        wigner_approx_re(2.0, 0.1, 1.0, 2.0, x_axis=ax, p_axis=ax),
    ]
    for grid in forms:
        v = grid.values
        assert np.max(np.abs(v)) <= 2.0 / np.pi + 1e-6
        assert np.max(np.abs(v - v[::-1, ::-1])) < 1e-10  # (x,p) -> (-x,-p)
        assert abs(grid.integral() - 1.0) < 2e-3
