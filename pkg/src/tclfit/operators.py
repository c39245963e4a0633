# SPDX-License-Identifier: GPL-3.0-or-later
# SPDX-FileCopyrightText: 2026 tclfit contributors
"""Density matrices, operator bases and the qubit Bloch representation.

Vectorization is column stacking everywhere in the package:

    vec([[a, b],
         [c, d]]) = (a, c, b, d)

so that vec(A @ rho @ B) == kron(B.T, A) @ vec(rho).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import StrEnum
from functools import cache, cached_property
from itertools import combinations
from math import isqrt, sqrt
from typing import TYPE_CHECKING

import numpy as np

from .exceptions import (
    DimensionError,
    NonHermitianError,
    UnrecoverableStateError,
    UnsupportedDimensionError,
)
from .tclfit_utils import (
    HERMITIAN_TOLERANCE,
    PSD_TOLERANCE,
    RAW_HERMITIAN_TOLERANCE,
    TRACE_TOLERANCE,
)

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

    ComplexArray = NDArray[np.complex128]
    RealArray = NDArray[np.float64]


class BasisKind(StrEnum):
    GELL_MANN = "gell-mann"
    UPPER_TRIANGULAR_GELL_MANN = "upper-triangular-gell-mann"
    PAULI_QUBIT = "pauli-qubit"


# Tr(L_i L_j^dagger) = HILBERT_SCHMIDT_NORM * delta_ij for Hermitian kinds
HILBERT_SCHMIDT_NORM = 2.0

PAULI_MATRICES: ComplexArray = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=np.complex128,
)
PAULI_MATRICES.flags.writeable = False


def read_only(array: ComplexArray) -> ComplexArray:
    array.flags.writeable = False
    return array


def as_square(matrix: ArrayLike) -> ComplexArray:
    array = np.asarray(matrix, dtype=np.complex128)
    if array.ndim < 2 or array.shape[-1] != array.shape[-2]:
        raise DimensionError(f"Expected square matrices, got shape {array.shape}")

    return array


def dagger(matrix: ArrayLike) -> ComplexArray:
    return np.swapaxes(np.asarray(matrix, dtype=np.complex128), -1, -2).conj()


# region Vectorization


def vectorize(rho: ArrayLike) -> ComplexArray:
    """Column-stack the trailing two axes."""
    array = as_square(rho)
    dim = array.shape[-1]
    return np.ascontiguousarray(np.swapaxes(array, -1, -2)).reshape(
        array.shape[:-2] + (dim * dim,)
    )


def devectorize(vector: ArrayLike) -> ComplexArray:
    array = np.asarray(vector, dtype=np.complex128)
    length = array.shape[-1]
    dim = isqrt(length)
    if dim * dim != length or dim == 0:
        raise DimensionError(
            f"Vector length {length} is not the square of a dimension"
        )

    return np.ascontiguousarray(
        np.swapaxes(array.reshape(array.shape[:-1] + (dim, dim)), -1, -2)
    )


# endregion Vectorization

# region Bases


def gell_mann_matrices(dim: int) -> list[ComplexArray]:
    """Generalized Gell-Mann matrices with Tr(G_i G_j) = 2 delta_ij.

    Order: for every pair j < k the symmetric then the antisymmetric
    matrix, then the diagonal matrices. For dim 2 this is (X, Y, Z).
    """
    matrices: list[ComplexArray] = []
    for j, k in combinations(range(dim), 2):
        symmetric = np.zeros((dim, dim), dtype=np.complex128)
        symmetric[j, k] = symmetric[k, j] = 1.0
        antisymmetric = np.zeros((dim, dim), dtype=np.complex128)
        antisymmetric[j, k] = -1j
        antisymmetric[k, j] = 1j
        matrices.append(symmetric)
        matrices.append(antisymmetric)

    for level in range(1, dim):
        diagonal = np.zeros(dim, dtype=np.complex128)
        diagonal[:level] = 1.0
        diagonal[level] = -level
        matrices.append(np.diag(diagonal * sqrt(2.0 / (level * (level + 1)))))

    return matrices


@dataclass(frozen=True, eq=False)
class OperatorBasis:
    dim: int
    kind: BasisKind
    operators: tuple[ComplexArray, ...] = field(repr=False)

    def __len__(self) -> int:
        return len(self.operators)

    @cached_property
    def stacked(self) -> ComplexArray:
        return read_only(np.stack(self.operators))

    @cached_property
    def hermitian_parts(self) -> ComplexArray:
        """(L + L^dagger) / 2 for every operator; L itself when Hermitian."""
        stacked = self.stacked
        return read_only((stacked + dagger(stacked)) / 2.0)

    @property
    def is_hermitian(self) -> bool:
        return self.kind != BasisKind.UPPER_TRIANGULAR_GELL_MANN


@cache
def make_basis(dim: int, kind: BasisKind = BasisKind.GELL_MANN) -> OperatorBasis:
    if dim < 2:
        raise DimensionError(f"Basis dimension must be at least 2, got {dim}")

    match BasisKind(kind):
        case BasisKind.PAULI_QUBIT:
            if dim != 2:
                raise UnsupportedDimensionError(
                    f"Pauli basis is only defined for dim 2, got {dim}"
                )
            operators = [matrix.copy() for matrix in PAULI_MATRICES]
        case BasisKind.GELL_MANN:
            operators = gell_mann_matrices(dim)
        case BasisKind.UPPER_TRIANGULAR_GELL_MANN:
            operators = [np.triu(matrix) for matrix in gell_mann_matrices(dim)]

    return OperatorBasis(
        dim=dim,
        kind=BasisKind(kind),
        operators=tuple(read_only(x) for x in operators),
    )


def hilbert_schmidt(a: ArrayLike, b: ArrayLike) -> complex:
    """Tr(a b^dagger)"""
    return complex(np.vdot(np.asarray(b), np.asarray(a)))


# endregion Bases

# region States


def basis_state(dim: int, level: int) -> ComplexArray:
    rho = np.zeros((dim, dim), dtype=np.complex128)
    rho[level, level] = 1.0
    return rho


def hermiticity_defect(rho: ArrayLike) -> float:
    array = as_square(rho)
    return float(np.max(np.abs(array - dagger(array)), initial=0.0))


def is_density_matrix(
    rho: ArrayLike,
    hermitian_tolerance: float = HERMITIAN_TOLERANCE,
    trace_tolerance: float = TRACE_TOLERANCE,
    psd_tolerance: float | None = PSD_TOLERANCE,
) -> bool:
    array = as_square(rho)
    if hermiticity_defect(array) > hermitian_tolerance:
        return False

    if np.max(np.abs(np.trace(array, axis1=-2, axis2=-1) - 1.0)) > trace_tolerance:
        return False

    if psd_tolerance is not None:
        hermitian = (array + dagger(array)) / 2.0
        if np.min(np.linalg.eigvalsh(hermitian)) < -psd_tolerance:
            return False

    return True


def trace_distance(a: ArrayLike, b: ArrayLike) -> RealArray:
    """Half the sum of absolute eigenvalues of a - b.

    Works on single matrices and on stacks of matrices.
    """
    first = as_square(a)
    second = as_square(b)
    if first.shape[-2:] != second.shape[-2:]:
        raise DimensionError(
            f"Cannot compare {first.shape[-2:]} and {second.shape[-2:]} states"
        )

    difference = first - second
    difference = (difference + dagger(difference)) / 2.0
    return np.sum(np.abs(np.linalg.eigvalsh(difference)), axis=-1) / 2.0


def spectral_filter(rho_raw: ArrayLike) -> ComplexArray:
    """Project a tomography estimate onto the valid states.

    Negative eigenvalues are zeroed and the remaining spectrum is
    renormalized to unit trace. Positive semi-definite inputs keep their
    eigenvectors and relative weights exactly.
    """
    array = as_square(rho_raw)
    defect = hermiticity_defect(array)
    if defect > RAW_HERMITIAN_TOLERANCE:
        raise NonHermitianError(
            f"Hermiticity defect {defect:.3g} exceeds {RAW_HERMITIAN_TOLERANCE:g}"
        )

    hermitian = (array + dagger(array)) / 2.0
    eigenvalues, eigenvectors = np.linalg.eigh(hermitian)

    kept = np.where(eigenvalues > 0.0, eigenvalues, 0.0)
    kept_total = kept.sum(axis=-1)
    if np.any(kept_total <= 0.0):
        raise UnrecoverableStateError("State has no positive eigenvalue")

    weights = kept / kept_total[..., np.newaxis]
    rebuilt = (eigenvectors * weights[..., np.newaxis, :]) @ dagger(eigenvectors)
    rebuilt = (rebuilt + dagger(rebuilt)) / 2.0

    already_valid = np.all(eigenvalues >= 0.0, axis=-1)
    trace = np.trace(hermitian, axis1=-2, axis2=-1).real
    rescaled = hermitian / trace[..., np.newaxis, np.newaxis]

    return np.where(already_valid[..., np.newaxis, np.newaxis], rescaled, rebuilt)


@cache
def _coordinate_operators(dim: int) -> ComplexArray:
    return read_only(
        np.stack([np.eye(dim, dtype=np.complex128), *gell_mann_matrices(dim)])
    )


def state_coordinates(rho: ArrayLike) -> RealArray:
    """Real coefficients Re Tr(rho G_k), G_0 = I followed by Gell-Mann.

    For a qubit this is (1, a_x, a_y, a_z).
    """
    array = as_square(rho)
    operators = _coordinate_operators(array.shape[-1])
    return np.einsum("...ij,kji->...k", array, operators).real


def coordinate_matrix(dim: int) -> ComplexArray:
    """C with state_coordinates(rho) == Re(C @ vectorize(rho))."""
    operators = _coordinate_operators(dim)
    return vectorize(np.swapaxes(operators, -1, -2))


# endregion States

# region Bloch


def require_qubit(array: ComplexArray) -> None:
    if array.shape[-2:] != (2, 2):
        raise UnsupportedDimensionError(
            f"Bloch representation needs 2x2 matrices, got {array.shape[-2:]}"
        )


def bloch_decompose(rho: ArrayLike) -> RealArray:
    """a_i = Tr(rho sigma_i); the imaginary residue is discarded."""
    array = as_square(rho)
    require_qubit(array)
    return np.einsum("...ij,kji->...k", array, PAULI_MATRICES).real


def bloch_compose(bloch: ArrayLike) -> ComplexArray:
    """rho = (I + sum_i a_i sigma_i) / 2"""
    vector = np.asarray(bloch, dtype=np.float64)
    if vector.shape[-1] != 3:
        raise UnsupportedDimensionError(
            f"Bloch vectors have 3 components, got {vector.shape[-1]}"
        )

    return (
        np.eye(2, dtype=np.complex128)
        + np.einsum("...k,kij->...ij", vector, PAULI_MATRICES)
    ) / 2.0


# endregion Bloch
