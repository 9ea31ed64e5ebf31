"""Tests for the closed-form 2x2 algebra."""

from pathlib import Path
import sys

import numpy as np
import pytest


PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.append(str(PROJECT_ROOT))


from lindblad_contact.qmat import (  # noqa: E402
    Herm2, IDENTITY, SIGMA_X, dagger, eig_max, eig_min, from_pauli, hs_inner, hs_inner_mat,
    mat2_expm, stack_herm, su2_exp_x, superop_apply, superop_of, superop_transpose,
    to_pauli, unitarity_defect,
)


def _random_herm(rng, size=None):
    return Herm2(rng.normal(size=size), rng.normal(size=size),
                 rng.normal(size=size) + 1j * rng.normal(size=size))


def test_from_matrix_keeps_hermitian_part():
    m = np.array([[1.0, 2.0 + 1j], [0.0, -3.0]])

    h = Herm2.from_matrix(m)

    assert h.a00 == 1.0
    assert h.a11 == -3.0
    assert h.a01 == pytest.approx(1.0 + 0.5j)
    np.testing.assert_allclose(h.matrix, 0.5 * (m + m.conj().T))


def test_hs_inner_matches_trace_formula():
    rng = np.random.default_rng(1)
    for _ in range(20):
        a, b = _random_herm(rng), _random_herm(rng)
        expected = np.real(np.trace(a.matrix.conj().T @ b.matrix))
        assert hs_inner(a, b) == pytest.approx(expected, abs=1e-13)
        assert hs_inner_mat(a, b.matrix) == pytest.approx(expected, abs=1e-13)


def test_eigenvalues_match_numpy():
    rng = np.random.default_rng(2)
    h = _random_herm(rng, size=200)

    expected = np.linalg.eigvalsh(h.matrix)

    np.testing.assert_allclose(eig_min(h), expected[:, 0], atol=1e-12)
    np.testing.assert_allclose(eig_max(h), expected[:, 1], atol=1e-12)


def test_eig_min_of_indefinite_diagonal():
    assert eig_min(Herm2.diag(1.2, -0.2)) == pytest.approx(-0.2, abs=1e-15)
    assert eig_min(Herm2.maximally_mixed()) == pytest.approx(0.5, abs=1e-16)


def test_su2_exp_x_is_unitary_and_matches_expm():
    u = np.linspace(-6.0, 6.0, 13)

    unitary = su2_exp_x(u, 0.37)

    assert unitary.shape == (13, 2, 2)
    assert unitarity_defect(unitary) < 1e-15
    np.testing.assert_allclose(unitary, mat2_expm(-0.5j * 0.37 * u[:, None, None] * SIGMA_X),
                               atol=1e-14)


def test_mat2_expm_matches_spectral_formula():
    rng = np.random.default_rng(3)
    h = _random_herm(rng).matrix

    values, vectors = np.linalg.eigh(h)
    expected = vectors @ np.diag(np.exp(values)) @ vectors.conj().T

    np.testing.assert_allclose(mat2_expm(h), expected, rtol=1e-12, atol=1e-12)


def test_mat2_expm_small_and_nilpotent_inputs():
    np.testing.assert_array_equal(mat2_expm(np.zeros((2, 2))), IDENTITY)
    nilpotent = np.array([[0.0, 1.0], [0.0, 0.0]])
    np.testing.assert_allclose(mat2_expm(nilpotent), IDENTITY + nilpotent, atol=1e-15)


def test_pauli_coordinates_are_orthonormal():
    rng = np.random.default_rng(4)
    a, b = _random_herm(rng, size=50), _random_herm(rng, size=50)

    np.testing.assert_allclose(np.sum(to_pauli(a) * to_pauli(b), axis=-1), hs_inner(a, b),
                               atol=1e-13)


def test_pauli_coordinates_of_basis_states():
    np.testing.assert_allclose(to_pauli(Herm2.excited()),
                               [1 / np.sqrt(2), 0.0, 0.0, -1 / np.sqrt(2)], atol=1e-16)

    rng = np.random.default_rng(6)
    h = _random_herm(rng, size=20)
    back = from_pauli(to_pauli(h))
    np.testing.assert_allclose(back.matrix, h.matrix, atol=1e-15)


def test_superop_of_identity_and_transpose_duality():
    np.testing.assert_allclose(superop_of(lambda x: x), np.eye(4), atol=1e-15)

    rng = np.random.default_rng(5)
    s = rng.normal(size=(4, 4))
    a, b = _random_herm(rng), _random_herm(rng)

    lhs = hs_inner(superop_apply(superop_transpose(s), a), b)
    rhs = hs_inner(a, superop_apply(s, b))
    assert lhs == pytest.approx(rhs, abs=1e-13)


def test_batched_herm_helpers():
    items = [Herm2.ground(), Herm2.excited(), Herm2.maximally_mixed()]

    batch = stack_herm(items)

    np.testing.assert_array_equal(batch.trace(), [1.0, 1.0, 1.0])
    assert batch.take(1).a11 == 1.0
    assert batch.expand(-1).matrix.shape == (3, 1, 2, 2)
    assert dagger(batch.matrix).shape == (3, 2, 2)
    assert not Herm2(np.inf, 0.0).is_finite()
