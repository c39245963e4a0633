# SPDX-License-Identifier: GPL-3.0-or-later
# SPDX-FileCopyrightText: 2026 tclfit contributors
"""Control Hamiltonian and master-equation generators.

Every superoperator acts on column-stacked density matrices, see
:mod:`tclfit.operators`. Internal units are microseconds for time and
rad/us for frequencies and drive amplitudes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import StrEnum
from functools import cached_property
from math import pi
from typing import TYPE_CHECKING

import numpy as np
from scipy.special import expit

from .exceptions import InvalidConfigError, ParameterLengthError
from .operators import (
    BasisKind,
    OperatorBasis,
    as_square,
    basis_state,
    dagger,
    make_basis,
    read_only,
    require_qubit,
)
from .tclfit_utils import GHZ_TO_ANGULAR, SettingFieldMetadata

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

    from .operators import ComplexArray, RealArray

    FloatArray = NDArray[np.float64]


class GeneratorMode(StrEnum):
    DIAGONAL = "diagonal"
    GENERAL_GAMMA = "general-gamma"


class DriveConvention(StrEnum):
    """How drive amplitudes in MHz are read from records."""

    CYCLIC = "cyclic"
    ANGULAR = "angular"

    def to_angular(self, value_mhz: ArrayLike) -> FloatArray:
        values = np.asarray(value_mhz, dtype=np.float64)
        match self:
            case DriveConvention.CYCLIC:
                return values * 2.0 * pi
            case DriveConvention.ANGULAR:
                return values

    def from_angular(self, value: ArrayLike) -> FloatArray:
        values = np.asarray(value, dtype=np.float64)
        match self:
            case DriveConvention.CYCLIC:
                return values / (2.0 * pi)
            case DriveConvention.ANGULAR:
                return values


def lowering_operator(dim: int) -> ComplexArray:
    """a = sum_n sqrt(n) |n-1><n|"""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=np.float64)), k=1).astype(
        np.complex128
    )


# region Configuration


@dataclass(frozen=True)
class ControlPulse:
    """Piecewise-constant drive on [0, duration].

    Levels are in rad/us. Segment k covers
    [segment_edges[k], segment_edges[k + 1]); the final instant belongs
    to the last segment.
    """

    duration: float = field(
        metadata=SettingFieldMetadata(
            pretty_name="Pulse duration",
            description="Length of the drive window in microseconds.",
        ),
    )
    p_levels: tuple[float, ...] = field(
        default=(0.0,),
        metadata=SettingFieldMetadata(
            pretty_name="In-phase amplitude",
            description="Amplitude of the a + a^dagger quadrature (rad/us).",
        ),
    )
    q_levels: tuple[float, ...] = field(
        default=(0.0,),
        metadata=SettingFieldMetadata(
            pretty_name="Quadrature amplitude",
            description="Amplitude of the i(a - a^dagger) quadrature (rad/us).",
        ),
    )
    rot_frequency: float = field(
        default=0.0,
        metadata=SettingFieldMetadata(
            pretty_name="Rotating frame frequency",
            description="Frequency of the rotating frame in GHz.",
        ),
    )
    segment_edges: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if not self.duration > 0.0:
            raise InvalidConfigError(
                f"Pulse duration must be positive, got {self.duration}"
            )

        if len(self.p_levels) != len(self.q_levels) or not self.p_levels:
            raise InvalidConfigError(
                "Pulse needs the same non-zero number of p and q levels"
            )

        if self.segment_edges is not None:
            edges = np.asarray(self.segment_edges)
            if (
                len(edges) != len(self.p_levels) + 1
                or edges[0] != 0.0
                or edges[-1] != self.duration
                or np.any(np.diff(edges) <= 0.0)
            ):
                raise InvalidConfigError(
                    "Segment edges must increase from 0 to the pulse duration "
                    "with one more entry than the levels"
                )

    @classmethod
    def square(
        cls,
        duration: float,
        amplitude: float,
        rot_frequency: float,
        q_amplitude: float = 0.0,
    ) -> ControlPulse:
        return cls(
            duration=duration,
            p_levels=(amplitude,),
            q_levels=(q_amplitude,),
            rot_frequency=rot_frequency,
        )

    @cached_property
    def edges(self) -> FloatArray:
        if self.segment_edges is None:
            return np.linspace(0.0, self.duration, len(self.p_levels) + 1)

        return np.asarray(self.segment_edges, dtype=np.float64)

    def envelopes(self, times: ArrayLike) -> tuple[FloatArray, FloatArray]:
        instants = np.asarray(times, dtype=np.float64)
        inside = (instants >= 0.0) & (instants <= self.duration)
        segment = np.clip(
            np.searchsorted(self.edges, instants, side="right") - 1,
            0,
            len(self.p_levels) - 1,
        )
        p = np.where(inside, np.asarray(self.p_levels)[segment], 0.0)
        q = np.where(inside, np.asarray(self.q_levels)[segment], 0.0)
        return p, q


@dataclass(frozen=True)
class SystemConfig:
    dim: int = field(
        default=2,
        metadata=SettingFieldMetadata(
            pretty_name="Dimension",
            description="Number of levels of the characterized system.",
        ),
    )
    omega: float = field(
        default=3.448,
        metadata=SettingFieldMetadata(
            pretty_name="Transition frequency",
            description="Transition frequency in GHz.",
        ),
    )
    t1: float = field(
        default=214.0,
        metadata=SettingFieldMetadata(
            pretty_name="T1",
            description="Energy relaxation time in microseconds.",
        ),
    )
    t2: float = field(
        default=32.0,
        metadata=SettingFieldMetadata(
            pretty_name="T2",
            description="Dephasing time in microseconds.",
        ),
    )
    basis_kind: BasisKind = field(
        default=BasisKind.UPPER_TRIANGULAR_GELL_MANN,
        metadata=SettingFieldMetadata(
            pretty_name="Operator basis",
            description="Operators the learned generator is expanded in.",
        ),
    )

    def __post_init__(self) -> None:
        if self.dim < 2:
            raise InvalidConfigError(f"Dimension must be at least 2, got {self.dim}")

        if not (self.t1 > 0.0 and self.t2 > 0.0):
            raise InvalidConfigError(
                f"T1 and T2 must be positive, got {self.t1} and {self.t2}"
            )

        if not np.isfinite(self.omega):
            raise InvalidConfigError("Transition frequency must be finite")

        object.__setattr__(self, "basis_kind", BasisKind(self.basis_kind))

    @property
    def basis(self) -> OperatorBasis:
        return make_basis(self.dim, self.basis_kind)


# endregion Configuration

# region Superoperators


def sandwich_superoperator(left: ArrayLike, right: ArrayLike) -> ComplexArray:
    """S with S @ vec(rho) == vec(left @ rho @ right), batched."""
    a = as_square(left)
    b = as_square(right)
    dim = a.shape[-1]
    product = np.einsum("...db,...ac->...badc", b, a)
    return product.reshape(product.shape[:-4] + (dim * dim, dim * dim))


def commutator_superoperator(hamiltonian: ArrayLike) -> ComplexArray:
    h = as_square(hamiltonian)
    identity = np.broadcast_to(np.eye(h.shape[-1], dtype=np.complex128), h.shape)
    return sandwich_superoperator(h, identity) - sandwich_superoperator(identity, h)


def hamiltonian_superoperator(hamiltonian: ArrayLike) -> ComplexArray:
    """Superoperator of rho -> -i[H, rho]."""
    return -1j * commutator_superoperator(hamiltonian)


def dissipator_superoperator(first: ArrayLike, second: ArrayLike) -> ComplexArray:
    """Superoperator of rho -> L_i rho L_j^dagger - {L_j^dagger L_i, rho} / 2."""
    li = as_square(first)
    lj = as_square(second)
    identity = np.broadcast_to(np.eye(li.shape[-1], dtype=np.complex128), li.shape)
    product = dagger(lj) @ li
    return sandwich_superoperator(li, dagger(lj)) - 0.5 * (
        sandwich_superoperator(product, identity)
        + sandwich_superoperator(identity, product)
    )


def trace_functional(dim: int) -> ComplexArray:
    """Row vector t with t @ vec(rho) == Tr(rho)."""
    return np.eye(dim, dtype=np.complex128).reshape(dim * dim)


# endregion Superoperators

# region Coefficient vectors


def softplus(values: ArrayLike) -> FloatArray:
    return np.logaddexp(0.0, np.asarray(values, dtype=np.float64))


def inverse_softplus(values: ArrayLike, floor: float = 1e-12) -> FloatArray:
    clamped = np.maximum(np.asarray(values, dtype=np.float64), floor)
    return clamped + np.log(-np.expm1(-clamped))


def q_entry_count(n_operators: int) -> int:
    return n_operators * (n_operators + 1) // 2


@dataclass(frozen=True)
class CoefficientVector:
    """Frequencies and rates of one instant.

    In general-gamma mode the rates are the packed upper-triangular
    entries of Q, row-major.
    """

    omegas: FloatArray
    rates: FloatArray
    mode: GeneratorMode = GeneratorMode.DIAGONAL

    @classmethod
    def from_flat(
        cls,
        flat: ArrayLike,
        n_operators: int,
        mode: GeneratorMode = GeneratorMode.DIAGONAL,
    ) -> CoefficientVector:
        values = np.asarray(flat, dtype=np.float64)
        expected = n_operators + (
            n_operators
            if mode == GeneratorMode.DIAGONAL
            else q_entry_count(n_operators)
        )
        if values.shape != (expected,):
            raise ParameterLengthError(
                f"Expected {expected} coefficients for {n_operators} operators "
                f"in {mode} mode, got shape {values.shape}"
            )

        return cls(
            omegas=values[:n_operators].copy(),
            rates=values[n_operators:].copy(),
            mode=GeneratorMode(mode),
        )

    @property
    def flat(self) -> FloatArray:
        return np.concatenate([self.omegas, self.rates])


@dataclass(frozen=True, eq=False)
class GeneratorForm:
    """Linear map from coefficient vectors to Liouvillians.

    A coefficient vector theta is first turned into generator
    coordinates g (omegas, then gammas or the row-major entries of
    Q Q^T); the Liouvillian is sum_k g_k B_k over the fixed
    superoperators B_k.
    """

    basis: OperatorBasis
    mode: GeneratorMode = GeneratorMode.DIAGONAL
    positive_rates: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", GeneratorMode(self.mode))
        if self.positive_rates and self.mode == GeneratorMode.GENERAL_GAMMA:
            raise InvalidConfigError(
                "Positive rates apply to the diagonal mode only; "
                "general-gamma rates are positive semi-definite already"
            )

    @property
    def n_operators(self) -> int:
        return len(self.basis)

    @property
    def theta_dim(self) -> int:
        n = self.n_operators
        match self.mode:
            case GeneratorMode.DIAGONAL:
                return 2 * n
            case GeneratorMode.GENERAL_GAMMA:
                return n + q_entry_count(n)

    @property
    def coordinate_dim(self) -> int:
        n = self.n_operators
        match self.mode:
            case GeneratorMode.DIAGONAL:
                return 2 * n
            case GeneratorMode.GENERAL_GAMMA:
                return n + n * n

    @cached_property
    def superoperators(self) -> ComplexArray:
        operators = self.basis.stacked
        hamiltonian_part = hamiltonian_superoperator(self.basis.hermitian_parts)
        match self.mode:
            case GeneratorMode.DIAGONAL:
                dissipative_part = dissipator_superoperator(operators, operators)
            case GeneratorMode.GENERAL_GAMMA:
                n = self.n_operators
                first = np.repeat(operators, n, axis=0)
                second = np.tile(operators, (n, 1, 1))
                dissipative_part = dissipator_superoperator(first, second)

        return read_only(np.concatenate([hamiltonian_part, dissipative_part]))

    def _check(self, theta: ArrayLike) -> FloatArray:
        values = np.asarray(theta, dtype=np.float64)
        if values.ndim == 0 or values.shape[-1] != self.theta_dim:
            raise ParameterLengthError(
                f"Expected {self.theta_dim} coefficients, got shape {values.shape}"
            )
        return values

    def _q_matrix(self, packed: FloatArray) -> FloatArray:
        n = self.n_operators
        q = np.zeros(packed.shape[:-1] + (n, n))
        rows, cols = np.triu_indices(n)
        q[..., rows, cols] = packed
        return q

    def rate_matrix(self, theta: ArrayLike) -> FloatArray:
        """Gamma of theta; diagonal in diagonal mode."""
        values = self._check(theta)
        n = self.n_operators
        match self.mode:
            case GeneratorMode.DIAGONAL:
                rates = values[..., n:]
                if self.positive_rates:
                    rates = softplus(rates)
                return rates[..., np.newaxis] * np.eye(n)
            case GeneratorMode.GENERAL_GAMMA:
                q = self._q_matrix(values[..., n:])
                return q @ np.swapaxes(q, -1, -2)

    def coordinates(self, theta: ArrayLike) -> FloatArray:
        values = self._check(theta)
        n = self.n_operators
        match self.mode:
            case GeneratorMode.DIAGONAL:
                if not self.positive_rates:
                    return values
                return np.concatenate(
                    [values[..., :n], softplus(values[..., n:])], axis=-1
                )
            case GeneratorMode.GENERAL_GAMMA:
                gamma = self.rate_matrix(values)
                return np.concatenate(
                    [values[..., :n], gamma.reshape(gamma.shape[:-2] + (n * n,))],
                    axis=-1,
                )

    def coordinates_jacobian(self, theta: ArrayLike) -> FloatArray:
        """dg/dtheta with shape (..., coordinate_dim, theta_dim)."""
        values = self._check(theta)
        n = self.n_operators
        batch = values.shape[:-1]
        jacobian = np.zeros(batch + (self.coordinate_dim, self.theta_dim))
        jacobian[..., :n, :n] = np.eye(n)
        match self.mode:
            case GeneratorMode.DIAGONAL:
                slopes = (
                    expit(values[..., n:])
                    if self.positive_rates
                    else np.ones(batch + (n,))
                )
                jacobian[..., n:, n:] = slopes[..., np.newaxis] * np.eye(n)
            case GeneratorMode.GENERAL_GAMMA:
                q = self._q_matrix(values[..., n:])
                identity = np.eye(n)
                # d(Q Q^T)_ij / dQ_kl = delta_ik Q_jl + delta_jk Q_il
                full = np.einsum("ik,...jl->...ijkl", identity, q) + np.einsum(
                    "jk,...il->...ijkl", identity, q
                )
                rows, cols = np.triu_indices(n)
                packed = full[..., rows, cols]
                jacobian[..., n:, n:] = packed.reshape(batch + (n * n, len(rows)))

        return jacobian

    def theta_from_rates(self, omegas: ArrayLike, gammas: ArrayLike) -> FloatArray:
        """Coefficient vector with per-operator rates gammas.

        Negative rates are clipped to zero where the form cannot
        represent them.
        """
        n = self.n_operators
        frequencies = np.asarray(omegas, dtype=np.float64).reshape(n)
        rates = np.asarray(gammas, dtype=np.float64).reshape(n)
        match self.mode:
            case GeneratorMode.DIAGONAL:
                if self.positive_rates:
                    rates = inverse_softplus(rates)
                return np.concatenate([frequencies, rates])
            case GeneratorMode.GENERAL_GAMMA:
                q = np.diag(np.sqrt(np.maximum(rates, 0.0)))
                return np.concatenate([frequencies, q[np.triu_indices(n)]])

    def liouvillian_from_coordinates(self, coordinates: ArrayLike) -> ComplexArray:
        return np.einsum(
            "...g,gij->...ij",
            np.asarray(coordinates, dtype=np.float64),
            self.superoperators,
        )

    def liouvillian(self, theta: ArrayLike) -> ComplexArray:
        return self.liouvillian_from_coordinates(self.coordinates(theta))


def _theta_values(
    theta: CoefficientVector | ArrayLike,
    mode: GeneratorMode,
) -> ArrayLike:
    if isinstance(theta, CoefficientVector):
        if theta.mode != mode:
            raise ParameterLengthError(
                f"Coefficient vector is in {theta.mode} mode, expected {mode}"
            )
        return theta.flat

    return theta


def tcl_liouvillian(
    theta: CoefficientVector | ArrayLike,
    basis: OperatorBasis,
) -> ComplexArray:
    form = GeneratorForm(basis, GeneratorMode.DIAGONAL)
    return form.liouvillian(_theta_values(theta, GeneratorMode.DIAGONAL))


def tcl_liouvillian_general(
    theta: CoefficientVector | ArrayLike,
    basis: OperatorBasis,
) -> ComplexArray:
    form = GeneratorForm(basis, GeneratorMode.GENERAL_GAMMA)
    return form.liouvillian(_theta_values(theta, GeneratorMode.GENERAL_GAMMA))


# endregion Coefficient vectors

# region Physical system


def control_hamiltonians(
    times: ArrayLike,
    pulse: ControlPulse,
    cfg: SystemConfig,
) -> ComplexArray:
    """H_c at every instant, shape (len(times), dim, dim)."""
    instants = np.atleast_1d(np.asarray(times, dtype=np.float64))
    lowering = lowering_operator(cfg.dim)
    raising = dagger(lowering)
    detuning = (cfg.omega - pulse.rot_frequency) * GHZ_TO_ANGULAR
    p, q = pulse.envelopes(instants)

    static = detuning * (raising @ lowering)
    in_phase = lowering + raising
    quadrature = 1j * (lowering - raising)
    return (
        static
        + p[:, np.newaxis, np.newaxis] * in_phase
        + q[:, np.newaxis, np.newaxis] * quadrature
    )


def control_hamiltonian(
    t: float,
    pulse: ControlPulse,
    cfg: SystemConfig,
) -> ComplexArray:
    return control_hamiltonians([t], pulse, cfg)[0]


def _qubit_jump_operators() -> tuple[ComplexArray, ComplexArray]:
    decay = np.zeros((2, 2), dtype=np.complex128)
    decay[0, 1] = 1.0
    return decay, basis_state(2, 1)


def lindblad_rhs(
    rho: ArrayLike,
    t: float,
    pulse: ControlPulse,
    cfg: SystemConfig,
) -> ComplexArray:
    """d rho / dt of the device model with decay and dephasing."""
    state = as_square(rho)
    require_qubit(state)
    if cfg.dim != 2:
        raise InvalidConfigError(
            f"The device model describes a qubit, got dim {cfg.dim}"
        )

    hamiltonian = control_hamiltonian(t, pulse, cfg)
    derivative = -1j * (hamiltonian @ state - state @ hamiltonian)
    for operator, rate in zip(_qubit_jump_operators(), (1 / cfg.t1, 1 / cfg.t2)):
        anti = dagger(operator) @ operator
        derivative = derivative + rate * (
            operator @ state @ dagger(operator) - 0.5 * (anti @ state + state @ anti)
        )

    return derivative


def lindblad_superoperator(cfg: SystemConfig) -> ComplexArray:
    """Undriven device generator in the rotating frame of the transition."""
    if cfg.dim != 2:
        raise InvalidConfigError(
            f"The device model describes a qubit, got dim {cfg.dim}"
        )

    decay, dephasing = _qubit_jump_operators()
    return dissipator_superoperator(decay, decay) / cfg.t1 + (
        dissipator_superoperator(dephasing, dephasing) / cfg.t2
    )


def device_coefficients(cfg: SystemConfig) -> RealArray:
    """Diagonal-mode coefficients reproducing the device generator.

    Needs the upper-triangular qubit basis (|0><1|, -i|0><1|, Z):
    D[|1><1|] equals D[Z] / 4.
    """
    if cfg.dim != 2 or cfg.basis_kind != BasisKind.UPPER_TRIANGULAR_GELL_MANN:
        raise InvalidConfigError(
            "Device coefficients exist for the upper-triangular qubit basis only"
        )

    return np.array([0.0, 0.0, 0.0, 1.0 / cfg.t1, 0.0, 1.0 / (4.0 * cfg.t2)])


# endregion Physical system
