from __future__ import annotations

import numpy as np
import pytest

from _oracles import (
    conjugate_by_shift,
    naive_stft,
    parity_matrix,
    random_hermitian,
    shift_matrix,
)
from qha import (
    EigenDecomposition,
    NotHermitian,
    PhaseLattice,
    adjoint,
    apply,
    eigh,
    matmul,
    parity_conjugate,
    stft,
    tf_shift,
    trace,
    translate_op,
)


def test_tf_shift_matches_entrywise_construction():
    for n in (4, 5):
        lat = PhaseLattice(n)
        for m in range(n):
            for k in range(n):
                assert np.allclose(tf_shift(lat, m, k), shift_matrix(n, m, k), atol=1e-14)


def test_tf_shift_action_on_a_vector(rng, lattice8):
    psi = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    m, k = 3, 5
    got = tf_shift(lattice8, m, k) @ psi
    t = np.arange(8)
    want = np.exp(2j * np.pi * k * t / 8) * psi[(t - m) % 8]
    assert np.allclose(got, want, atol=1e-14)


def test_tf_shift_is_unitary(lattice8):
    for m, k in [(0, 0), (1, 0), (0, 1), (3, 5), (7, 7)]:
        u = tf_shift(lattice8, m, k)
        assert np.allclose(u @ u.conj().T, np.eye(8), atol=1e-13)


def test_composition_phase_for_all_small_quadruples():
    # pi(m,k) pi(m',k') = exp(-2 pi i m k' / N) pi(m+m', k+k')
    for n in (4, 5):
        lat = PhaseLattice(n)
        for m in range(n):
            for k in range(n):
                for mp in range(n):
                    for kp in range(n):
                        left = tf_shift(lat, m, k) @ tf_shift(lat, mp, kp)
                        phase = np.exp(-2j * np.pi * m * kp / n)
                        right = phase * tf_shift(lat, m + mp, k + kp)
                        assert np.allclose(left, right, atol=1e-12)


def test_parity_conjugate_matches_matrix_conjugation(rng):
    s = random_hermitian(rng, 6)
    p = parity_matrix(6)
    assert np.allclose(parity_conjugate(s), p @ s @ p, atol=1e-14)
    assert np.allclose(parity_conjugate(parity_conjugate(s)), s, atol=0)


def test_translate_op_matches_shift_conjugation(rng):
    s = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    for z in [(0, 0), (1, 0), (0, 1), (5, 3), (-2, 11)]:
        got = translate_op(s, z)
        want = conjugate_by_shift(s, z[0] % 8, z[1] % 8)
        assert np.allclose(got, want, atol=1e-12)


def test_translate_op_is_a_group_action(rng):
    s = random_hermitian(rng, 8)
    a = translate_op(translate_op(s, (2, 3)), (5, 6))
    b = translate_op(s, (7, 9))
    assert np.allclose(a, b, atol=1e-12)
    assert np.allclose(trace(translate_op(s, (3, 1))), trace(s), atol=1e-12)


def test_stft_matches_inner_product_definition(rng):
    for n in (5, 8):
        psi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        phi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        assert np.allclose(stft(psi, phi), naive_stft(psi, phi), atol=1e-12)


def test_stft_orthogonality_relation(rng):
    # (1/N) sum_z |V_phi psi(z)|^2 = |psi|^2 |phi|^2
    n = 16
    psi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    phi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v = stft(psi, phi)
    total = np.sum(np.abs(v) ** 2) / n
    want = np.linalg.norm(psi) ** 2 * np.linalg.norm(phi) ** 2
    assert abs(total - want) < 1e-9 * want


def test_stft_rejects_length_mismatch(rng):
    with pytest.raises(ValueError):
        stft(np.ones(4), np.ones(5))


def test_eigh_orders_descending_and_reconstructs(rng):
    h = random_hermitian(rng, 12)
    dec = eigh(h)
    assert dec.size == 12
    assert np.all(np.diff(dec.eigenvalues) <= 1e-12)
    assert np.allclose(dec.reconstruct(), h, atol=1e-10)
    gram = dec.eigenvectors.conj().T @ dec.eigenvectors
    assert np.allclose(gram, np.eye(12), atol=1e-10)


def test_eigh_is_deterministic(rng):
    h = random_hermitian(rng, 10)
    a = eigh(h)
    b = eigh(h.copy())
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.eigenvectors, b.eigenvectors)


def test_eigh_rejects_non_hermitian(rng):
    a = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    with pytest.raises(NotHermitian):
        eigh(a)
    # loosening the tolerance lets a mild perturbation through
    h = random_hermitian(rng, 6)
    h[0, 1] += 1e-6
    with pytest.raises(NotHermitian):
        eigh(h)
    assert isinstance(eigh(h, hermitian_tol=1e-3), EigenDecomposition)


def test_matrix_helpers(rng):
    a = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    b = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    v = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    assert np.allclose(adjoint(a), a.conj().T, atol=0)
    assert np.allclose(matmul(a, b), a @ b, atol=0)
    assert np.allclose(apply(a, v), a @ v, atol=0)
    assert abs(trace(a) - np.trace(a)) < 1e-14
    with pytest.raises(ValueError):
        matmul(a, np.eye(4))
