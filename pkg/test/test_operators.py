# SPDX-License-Identifier: GPL-3.0-or-later
# SPDX-FileCopyrightText: 2026 tclfit contributors
from __future__ import annotations

from itertools import product
from unittest import TestCase
from unittest import main as unittest_main

import numpy as np
from numpy.testing import assert_allclose

from tclfit.exceptions import (
    DimensionError,
    NonHermitianError,
    UnrecoverableStateError,
    UnsupportedDimensionError,
)
from tclfit.operators import (
    HILBERT_SCHMIDT_NORM,
    PAULI_MATRICES,
    BasisKind,
    basis_state,
    bloch_compose,
    bloch_decompose,
    coordinate_matrix,
    devectorize,
    hilbert_schmidt,
    is_density_matrix,
    make_basis,
    spectral_filter,
    state_coordinates,
    trace_distance,
    vectorize,
)


def random_state(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def random_matrix(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    return rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))


class TestVectorization(TestCase):
    def setUp(self) -> None:
        self.rng = np.random.default_rng(7)

    def test_identity_column_stacking(self) -> None:
        assert_allclose(vectorize(np.eye(2) / 2), [0.5, 0, 0, 0.5])
        assert_allclose(vectorize([[1, 2], [3, 4]]), [1, 3, 2, 4])

    def test_round_trip(self) -> None:
        for dim in (2, 3, 4):
            with self.subTest(dim=dim):
                rho = random_state(self.rng, dim)
                assert_allclose(devectorize(vectorize(rho)), rho, atol=0.0)

    def test_sandwich_identity(self) -> None:
        for _ in range(100):
            a, rho, b = (random_matrix(self.rng) for _ in range(3))
            assert_allclose(
                vectorize(a @ rho @ b),
                np.kron(b.T, a) @ vectorize(rho),
                atol=1e-13,
            )

    def test_batched(self) -> None:
        states = np.stack([random_state(self.rng) for _ in range(5)])
        vectors = vectorize(states)
        self.assertEqual(vectors.shape, (5, 4))
        assert_allclose(devectorize(vectors), states)

    def test_non_square_length(self) -> None:
        with self.assertRaises(DimensionError):
            devectorize(np.zeros(5))


class TestBases(TestCase):
    def test_counts(self) -> None:
        for dim, kind in product((2, 3, 4), BasisKind):
            if kind == BasisKind.PAULI_QUBIT and dim != 2:
                continue

            with self.subTest(dim=dim, kind=kind):
                self.assertEqual(len(make_basis(dim, kind)), dim * dim - 1)

    def test_pauli(self) -> None:
        basis = make_basis(2, BasisKind.PAULI_QUBIT)
        assert_allclose(basis.stacked, PAULI_MATRICES)
        for i, j in product(range(3), repeat=2):
            self.assertAlmostEqual(
                np.trace(basis.operators[i] @ basis.operators[j]).real,
                2.0 if i == j else 0.0,
            )

    def test_gell_mann_qubit_is_pauli(self) -> None:
        assert_allclose(make_basis(2, BasisKind.GELL_MANN).stacked, PAULI_MATRICES)

    def test_gell_mann_orthogonality(self) -> None:
        for dim in (3, 4):
            basis = make_basis(dim, BasisKind.GELL_MANN)
            for i, j in product(range(len(basis)), repeat=2):
                with self.subTest(dim=dim, i=i, j=j):
                    expected = HILBERT_SCHMIDT_NORM if i == j else 0.0
                    self.assertAlmostEqual(
                        abs(hilbert_schmidt(basis.operators[i], basis.operators[j])),
                        expected,
                        delta=1e-13,
                    )
                    self.assertAlmostEqual(
                        abs(np.trace(basis.operators[i])), 0.0, delta=1e-13
                    )

    def test_upper_triangular(self) -> None:
        basis = make_basis(2, BasisKind.UPPER_TRIANGULAR_GELL_MANN)
        assert_allclose(basis.operators[0], [[0, 1], [0, 0]])
        assert_allclose(basis.operators[1], [[0, -1j], [0, 0]])
        assert_allclose(basis.operators[2], [[1, 0], [0, -1]])
        self.assertFalse(basis.is_hermitian)
        for operator in make_basis(3, BasisKind.UPPER_TRIANGULAR_GELL_MANN).operators:
            assert_allclose(np.tril(operator, k=-1), 0.0)

    def test_invalid(self) -> None:
        with self.assertRaises(DimensionError):
            make_basis(1)

        with self.assertRaises(UnsupportedDimensionError):
            make_basis(3, BasisKind.PAULI_QUBIT)


class TestStates(TestCase):
    def setUp(self) -> None:
        self.rng = np.random.default_rng(11)

    def test_bloch_examples(self) -> None:
        plus = np.full((2, 2), 0.5)
        for rho, expected in (
            (basis_state(2, 0), (0, 0, 1)),
            (np.eye(2) / 2, (0, 0, 0)),
            (plus, (1, 0, 0)),
        ):
            with self.subTest(expected=expected):
                assert_allclose(bloch_decompose(rho), expected, atol=1e-15)

    def test_bloch_round_trip(self) -> None:
        for _ in range(20):
            rho = random_state(self.rng)
            assert_allclose(bloch_compose(bloch_decompose(rho)), rho, atol=1e-12)
            self.assertLessEqual(np.linalg.norm(bloch_decompose(rho)), 1 + 1e-9)

    def test_bloch_needs_qubit(self) -> None:
        with self.assertRaises(UnsupportedDimensionError):
            bloch_decompose(np.eye(3) / 3)

    def test_state_coordinates(self) -> None:
        rho = random_state(self.rng)
        coordinates = state_coordinates(rho)
        self.assertAlmostEqual(coordinates[0], 1.0)
        assert_allclose(coordinates[1:], bloch_decompose(rho), atol=1e-14)
        for dim in (2, 3):
            rho = random_state(self.rng, dim)
            assert_allclose(
                (coordinate_matrix(dim) @ vectorize(rho)).real,
                state_coordinates(rho),
                atol=1e-14,
            )

    def test_trace_distance_examples(self) -> None:
        self.assertAlmostEqual(
            float(trace_distance(basis_state(2, 0), basis_state(2, 1))), 1.0
        )
        rho = random_state(self.rng, 3)
        self.assertAlmostEqual(float(trace_distance(rho, rho)), 0.0, delta=1e-15)

    def test_trace_distance_bloch(self) -> None:
        for _ in range(20):
            a = random_state(self.rng)
            b = random_state(self.rng)
            self.assertAlmostEqual(
                float(trace_distance(a, b)),
                np.linalg.norm(bloch_decompose(a) - bloch_decompose(b)) / 2,
                delta=1e-12,
            )
            self.assertAlmostEqual(
                float(trace_distance(a, b)), float(trace_distance(b, a)), delta=1e-15
            )

    def test_triangle_inequality(self) -> None:
        for _ in range(50):
            a, b, c = (random_state(self.rng, 3) for _ in range(3))
            self.assertLessEqual(
                float(trace_distance(a, c)),
                float(trace_distance(a, b)) + float(trace_distance(b, c)) + 1e-10,
            )

    def test_trace_distance_dimension_mismatch(self) -> None:
        with self.assertRaises(DimensionError):
            trace_distance(np.eye(2) / 2, np.eye(3) / 3)


class TestSpectralFilter(TestCase):
    def setUp(self) -> None:
        self.rng = np.random.default_rng(3)

    def test_valid_unchanged(self) -> None:
        rho = np.diag([0.7, 0.3]).astype(complex)
        assert_allclose(spectral_filter(rho), rho, atol=1e-12)
        rho = random_state(self.rng, 3)
        assert_allclose(spectral_filter(rho), rho, atol=1e-12)

    def test_negative_eigenvalue_qubit(self) -> None:
        angle = 0.3
        u = np.array(
            [[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]]
        )
        raw = u @ np.diag([1.2, -0.2]) @ u.T
        assert_allclose(spectral_filter(raw), u @ np.diag([1.0, 0.0]) @ u.T, atol=1e-12)

    def test_negative_eigenvalue_qutrit(self) -> None:
        filtered = spectral_filter(np.diag([0.6, 0.5, -0.1]))
        assert_allclose(
            np.sort(np.linalg.eigvalsh(filtered))[::-1],
            [6 / 11, 5 / 11, 0.0],
            atol=1e-12,
        )

    def test_idempotent(self) -> None:
        checked = 0
        while checked < 1000:
            dim = 2 + checked % 2
            shape = (dim, dim)
            g = self.rng.normal(size=shape) + 1j * self.rng.normal(size=shape)
            rho = g @ g.conj().T
            rho /= np.trace(rho).real
            h = self.rng.normal(size=shape) + 1j * self.rng.normal(size=shape)
            h = (h + h.conj().T) / 2
            h -= np.trace(h).real / dim * np.eye(dim)
            raw = rho + 0.5 * h
            if np.min(np.linalg.eigvalsh(raw)) >= 0.0:
                continue

            checked += 1
            once = spectral_filter(raw)
            self.assertTrue(is_density_matrix(once))
            assert_allclose(spectral_filter(once), once, atol=1e-12)

    def test_batched(self) -> None:
        raw = np.stack([np.diag([1.2, -0.2]), np.diag([0.5, 0.5])])
        assert_allclose(
            spectral_filter(raw),
            [np.diag([1.0, 0.0]), np.diag([0.5, 0.5])],
            atol=1e-12,
        )

    def test_errors(self) -> None:
        with self.assertRaises(UnrecoverableStateError):
            spectral_filter(np.diag([-0.5, -0.5]))

        with self.assertRaises(NonHermitianError):
            spectral_filter([[0.5, 0.1], [0.0, 0.5]])

    def test_small_asymmetry_symmetrized(self) -> None:
        raw = np.array([[0.5, 1e-10], [0.0, 0.5]])
        filtered = spectral_filter(raw)
        assert_allclose(filtered, filtered.conj().T, atol=0.0)


if __name__ == "__main__":
    unittest_main()
