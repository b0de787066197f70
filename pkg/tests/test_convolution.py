from __future__ import annotations

import numpy as np
import pytest

from _oracles import (
    naive_fun_fun,
    naive_fun_op,
    naive_op_op,
    naive_stft,
    random_density,
    random_hermitian,
)
from qha import (
    PhaseLattice,
    fun_fun_conv,
    fun_op_conv,
    gaussian_window,
    op_op_conv,
    parity_conjugate,
    rank_one_state,
    reflect_grid,
    s_tilde,
    stft,
    translate_op,
)


def _random_grid(rng, n, complex_valued=False):
    g = rng.standard_normal((n, n))
    if complex_valued:
        g = g + 1j * rng.standard_normal((n, n))
    return g


def test_op_op_conv_matches_trace_formula(rng):
    for n in (5, 8):
        s = random_hermitian(rng, n)
        t = random_hermitian(rng, n)
        assert np.allclose(op_op_conv(s, t), naive_op_op(s, t), atol=1e-10)


def test_op_op_conv_is_commutative(rng):
    s = random_hermitian(rng, 9)
    t = random_hermitian(rng, 9)
    assert np.allclose(op_op_conv(s, t), op_op_conv(t, s), atol=1e-10)


def test_fun_op_conv_matches_weighted_shift_sum(rng):
    for n in (5, 8):
        s = random_hermitian(rng, n)
        f = _random_grid(rng, n)
        assert np.allclose(fun_op_conv(f, s), naive_fun_op(f, s), atol=1e-10)
    # complex-valued grids are allowed
    fc = _random_grid(rng, 8, complex_valued=True)
    assert np.allclose(fun_op_conv(fc, s), naive_fun_op(fc, s), atol=1e-10)


def test_fun_fun_conv_matches_double_loop(rng):
    n = 6
    f = _random_grid(rng, n, complex_valued=True)
    g = _random_grid(rng, n)
    assert np.allclose(fun_fun_conv(f, g), naive_fun_fun(f, g), atol=1e-10)


def test_constant_one_convolves_to_identity_times_trace(rng):
    n = 8
    s = random_hermitian(rng, n)
    out = fun_op_conv(np.ones((n, n)), s)
    assert np.allclose(out, np.trace(s) * np.eye(n), atol=1e-10)


def test_total_mass_of_operator_convolution(rng):
    # (1/N) sum_z (S * T)(z) = tr(S) tr(T)
    n = 10
    s = random_hermitian(rng, n)
    t = random_hermitian(rng, n)
    total = np.sum(op_op_conv(s, t)) / n
    want = np.trace(s) * np.trace(t)
    assert abs(total - want) < 1e-9


def test_mixed_associativity(rng):
    # (f * S) * T = f * (S * T) with the matching grid convolution
    n = 8
    f = _random_grid(rng, n)
    s = random_hermitian(rng, n)
    t = random_hermitian(rng, n)
    left = op_op_conv(fun_op_conv(f, s), t)
    right = fun_fun_conv(f, op_op_conv(s, t))
    assert np.allclose(left, right, atol=1e-9)


def test_covariance_under_phase_space_translation(rng):
    n = 8
    s = random_hermitian(rng, n)
    t = random_hermitian(rng, n)
    z = (3, 5)
    shifted = op_op_conv(translate_op(s, z), t)
    rolled = np.roll(op_op_conv(s, t), z, axis=(0, 1))
    assert np.allclose(shifted, rolled, atol=1e-10)


def test_s_tilde_is_real_even_and_unit_mass(rng):
    n = 12
    s = random_density(rng, n)
    st = s_tilde(s)
    assert st.dtype == np.float64
    assert np.allclose(st, reflect_grid(st), atol=1e-12)
    assert abs(np.sum(st) / n - 1.0) < 1e-10
    assert np.all(st > -1e-12)


def test_s_tilde_invariant_under_translation(rng):
    n = 8
    s = random_density(rng, n)
    assert np.allclose(s_tilde(translate_op(s, (2, 7))), s_tilde(s), atol=1e-10)


def test_s_tilde_of_delta_projector_is_column_indicator():
    # the projector onto the t=0 point mass spreads over all frequencies
    n = 8
    e0 = np.zeros(n)
    e0[0] = 1.0
    st = s_tilde(rank_one_state(e0).matrix)
    want = np.zeros((n, n))
    want[0, :] = 1.0
    assert np.allclose(st, want, atol=1e-12)


def test_s_tilde_of_maximally_mixed_is_flat():
    n = 8
    st = s_tilde(np.eye(n) / n)
    assert np.allclose(st, np.full((n, n), 1.0 / n), atol=1e-12)


def test_rank_one_convolution_is_a_spectrogram(rng):
    # (psi x psi) * check(phi x phi) = |V_phi psi|^2
    n = 16
    lat = PhaseLattice(n)
    psi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    psi /= np.linalg.norm(psi)
    window = gaussian_window(lat)
    grid = op_op_conv(np.outer(psi, psi.conj()), parity_conjugate(np.outer(window, window.conj())))
    spec = np.abs(stft(psi, window)) ** 2
    assert np.allclose(grid.real, spec, atol=1e-10)
    assert np.max(np.abs(grid.imag)) < 1e-10


def test_two_window_rank_one_convolution(rng):
    # with distinct windows the product pairs two different transforms
    n = 12
    psi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    phi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    r1 = np.outer(psi, phi.conj())
    grid = op_op_conv(r1, parity_conjugate(r1))
    v = naive_stft(psi, phi)
    w = naive_stft(phi, psi)
    assert np.allclose(grid, w.conj() * v, atol=1e-9)


def test_reflect_grid_definition_and_involution(rng):
    n = 7
    f = _random_grid(rng, n, complex_valued=True)
    rf = reflect_grid(f)
    for m in range(n):
        for k in range(n):
            assert rf[m, k] == f[(-m) % n, (-k) % n]
    assert np.array_equal(reflect_grid(rf), f)


def test_grid_shape_validation(rng):
    with pytest.raises(ValueError):
        fun_op_conv(np.ones((4, 5)), np.eye(4))
    with pytest.raises(ValueError):
        op_op_conv(np.eye(4), np.eye(5))
    with pytest.raises(ValueError):
        fun_fun_conv(np.ones((3, 3)), np.ones((4, 4)))
