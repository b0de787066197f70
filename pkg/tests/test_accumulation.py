from __future__ import annotations

import numpy as np
import pytest

from qha import (
    BadDelta,
    Ball,
    MismatchedState,
    PhaseLattice,
    accumulate,
    analyze,
    cohen_distribution,
    full_domain,
    fun_fun_conv,
    gaussian_state,
    gaussian_window,
    l1_error,
    levelset_measure,
    mstar_norm_sq,
    op_op_conv,
    parity_conjugate,
    parity_operator,
    rasterize,
    reconstruction_identity_check,
    reflect_grid,
    smoothed_state,
    s_tilde,
    state_decomposition,
    stft,
    thermal_state,
)


def _normalized(rng, n):
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def _disk(lat, steps):
    return rasterize(Ball(radius=lat.unit), float(steps), lat)


def test_cohen_distribution_is_a_weighted_spectrogram(rng):
    lat = PhaseLattice(16)
    s = thermal_state(lat, 0.5, 4)
    psi = _normalized(rng, 16)
    grid = cohen_distribution(s, psi)
    dec = state_decomposition(s)
    want = np.zeros((16, 16))
    for val, k in zip(dec.eigenvalues, range(16)):
        if val > 1e-13:
            want += val * np.abs(stft(psi, dec.eigenvectors[:, k])) ** 2
    assert np.allclose(grid, want, atol=1e-10)


def test_cohen_distribution_as_operator_convolution(rng):
    # Q_S(psi) = check(S) * (psi x psi) evaluated on the grid
    lat = PhaseLattice(12)
    s = gaussian_state(lat)
    psi = _normalized(rng, 12)
    grid = cohen_distribution(s, psi)
    conv = op_op_conv(np.outer(psi, psi.conj()), parity_conjugate(s.matrix))
    assert np.allclose(grid, conv.real, atol=1e-10)


def test_cohen_distribution_positive_unit_mass_for_states(rng):
    lat = PhaseLattice(16)
    states = [gaussian_state(lat), thermal_state(lat, 0.7, 6),
              smoothed_state(np.full((16, 16), 1.0 / 16), gaussian_state(lat))]
    for s in states:
        for _ in range(5):
            psi = _normalized(rng, 16)
            grid = cohen_distribution(s, psi)
            assert grid.min() > -1e-10
            assert abs(grid.sum() / 16 - 1.0) < 1e-9


def test_parity_distribution_goes_negative(rng):
    lat = PhaseLattice(16)
    p = parity_operator(lat)
    found = min(cohen_distribution(p, _normalized(rng, 16)).min() for _ in range(10))
    assert found < -1e-3


def test_accumulate_mass_equals_truncation_index(rng):
    lat = PhaseLattice(16)
    s = gaussian_state(lat)
    for steps in (3, 5, 7):
        res = analyze(_disk(lat, steps), s)
        rho = accumulate(res, s)
        assert abs(rho.mass() - res.a_omega) < 1e-8
        assert rho.grid.max() <= 1 + 1e-10
        assert rho.grid.min() >= -1e-10
        assert rho.a_omega == res.a_omega


def test_accumulate_full_domain_is_flat_one():
    lat = PhaseLattice(10)
    s = gaussian_state(lat)
    res = analyze(full_domain(lat), s)
    rho = accumulate(res, s)
    assert np.allclose(rho.grid, 1.0, atol=1e-10)
    assert l1_error(rho) < 1e-9


def test_accumulate_rejects_mismatched_state():
    lat = PhaseLattice(8)
    res = analyze(_disk(lat, 3), gaussian_state(lat))
    with pytest.raises(MismatchedState):
        accumulate(res, thermal_state(lat, 0.5, 3))
    with pytest.raises(MismatchedState):
        accumulate(res, gaussian_state(PhaseLattice(16)))


def test_l1_error_and_levelsets(rng):
    lat = PhaseLattice(16)
    s = gaussian_state(lat)
    dom = _disk(lat, 5)
    rho = accumulate(analyze(dom, s), s)
    diff = np.abs(rho.grid - dom.indicator())
    assert abs(l1_error(rho) - diff.sum() / 16) < 1e-12
    for delta in (0.1, 0.5, 1.0, 1.9):
        want = np.count_nonzero(diff > delta) / 16
        assert abs(levelset_measure(rho, delta) - want) < 1e-12
    assert levelset_measure(rho, 2.5) == 0.0  # |rho - chi| never exceeds 2
    vals = [levelset_measure(rho, d) for d in (0.1, 0.3, 0.5, 0.7)]
    assert vals == sorted(vals, reverse=True)
    with pytest.raises(BadDelta):
        levelset_measure(rho, 0.0)
    with pytest.raises(BadDelta):
        levelset_measure(rho, -1.0)


def test_l1_error_lower_bound(rng):
    # ||rho - chi||_1 >= tr L - tr L^2 for every domain and state
    lat = PhaseLattice(16)
    for state in (gaussian_state(lat), thermal_state(lat, 0.5, 5)):
        for steps in (4, 6):
            dom = _disk(lat, steps)
            res = analyze(dom, state)
            rho = accumulate(res, state)
            spread = float(res.eig.eigenvalues.sum() - (res.eig.eigenvalues ** 2).sum())
            assert l1_error(rho) >= spread - 1e-8


def test_reconstruction_identity(rng):
    lat = PhaseLattice(12)
    for state in (gaussian_state(lat), thermal_state(lat, 0.4, 4)):
        dev = reconstruction_identity_check(_disk(lat, 4), state)
        assert dev < 1e-10


def test_smoothing_commutes_with_distribution(rng):
    # Q over the smoothed state equals the smoothed Q: Q_{f(*)S} = f (*) Q_S
    lat = PhaseLattice(16)
    s = gaussian_state(lat)
    f = np.zeros((16, 16))
    f[np.ix_((0, 1), (0, 1))] = 4.0
    sm = smoothed_state(reflect_grid(f), s)
    psi = _normalized(rng, 16)
    left = cohen_distribution(sm, psi)
    right = fun_fun_conv(f, cohen_distribution(s, psi))
    assert np.allclose(left, right, atol=1e-9)


def test_smoothing_spreads_the_first_moment(lattice16):
    # moment of the smoothed state is at most the state moment plus the
    # smoother moment (triangle inequality on the torus metric)
    s = gaussian_state(lattice16)
    f = np.zeros((16, 16))
    f[np.ix_((-1, 0, 1), (-1, 0, 1))] = 1.0
    f *= 16 / f.sum()
    sm = smoothed_state(f, s)
    f_moment = float(np.sum(f * lattice16.distance_grid()) / 16)
    assert mstar_norm_sq(sm) <= mstar_norm_sq(s) + 2 * f_moment + 1e-9


def test_accumulation_error_bounds_hold(rng):
    # ||rho - chi||_1 <= 1 + 2 E |Omega| with E the deficiency, and
    # E <= 2 ||S||_{M*} sqrt(|dOmega| / |Omega|)
    lat = PhaseLattice(16)
    s = thermal_state(lat, 0.5, 5)
    msq = mstar_norm_sq(s)
    for steps in (4, 6):
        dom = _disk(lat, steps)
        res = analyze(dom, s)
        rho = accumulate(res, s)
        deficit = 1.0 - res.top_sum / res.measure
        assert l1_error(rho) <= 1.0 + 2.0 * deficit * res.measure + 1e-8
        assert deficit <= 2.0 * np.sqrt(msq * dom.perimeter() / res.measure) + 1e-8
