# SPDX-License-Identifier: GPL-3.0-or-later
# SPDX-FileCopyrightText: 2026 tclfit contributors
"""Fixed-step RK4 time evolution of vectorized density matrices.

The equation of motion for one experiment is

    d vec(rho) / dt = (-i[H_c(t), .] + L(theta(t))) vec(rho)

with H_c the known control Hamiltonian and theta the output of a
coefficient model. Models that do not read the state give a linear
equation whose RK4 steps are linear maps; those are built for all steps
at once and applied in sequence.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import reduce
from typing import TYPE_CHECKING

import numpy as np
from scipy.linalg import expm

from .exceptions import (
    DatasetValidationError,
    DimensionError,
    InvalidConfigError,
    PropagationDivergenceError,
    UnsupportedModelError,
)
from .generator import control_hamiltonians, hamiltonian_superoperator
from .operators import (
    coordinate_matrix,
    dagger,
    devectorize,
    hermiticity_defect,
    read_only,
    vectorize,
)
from .tclfit_utils import RENORMALIZATION_THRESHOLD, SettingFieldMetadata

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.typing import ArrayLike, NDArray

    from .coefficients import CoefficientModel
    from .generator import ControlPulse, SystemConfig
    from .operators import ComplexArray

    FloatArray = NDArray[np.float64]


LOGGER = logging.getLogger(__name__)

DEFAULT_DT = 0.004
SLIVER_FRACTION = 1e-6


@dataclass(frozen=True)
class TimeGrid:
    t_end: float = field(
        metadata=SettingFieldMetadata(
            pretty_name="End time",
            description="Last integration instant in microseconds.",
        ),
    )
    dt: float = field(
        default=DEFAULT_DT,
        metadata=SettingFieldMetadata(
            pretty_name="Step",
            description="RK4 step in microseconds.",
        ),
    )
    t0: float = 0.0
    sample_stride: int = field(
        default=1,
        metadata=SettingFieldMetadata(
            pretty_name="Sample stride",
            description="Keep every k-th integration step.",
        ),
    )
    # Explicit step boundaries and sampled boundary indices of an uneven
    # grid; dt and sample_stride are ignored when they are set.
    boundaries: tuple[float, ...] | None = None
    sampled: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if not self.dt > 0.0:
            raise InvalidConfigError(f"Step must be positive, got {self.dt}")

        if self.sample_stride < 1:
            raise InvalidConfigError(
                f"Sample stride must be at least 1, got {self.sample_stride}"
            )

        if self.boundaries is not None:
            self._check_boundaries()
            return

        span = (self.t_end - self.t0) / self.dt
        if span < -1e-9 or abs(span - round(span)) > 1e-9 * max(1.0, span):
            raise InvalidConfigError(
                f"Window [{self.t0}, {self.t_end}] is not a whole number "
                f"of {self.dt} steps"
            )

    def _check_boundaries(self) -> None:
        assert self.boundaries is not None
        nodes = np.asarray(self.boundaries)
        if len(nodes) == 0 or np.any(np.diff(nodes) <= 0.0):
            raise InvalidConfigError("Step boundaries must be strictly increasing")

        if nodes[0] != self.t0 or nodes[-1] != self.t_end:
            raise InvalidConfigError(
                f"Step boundaries span [{nodes[0]}, {nodes[-1]}], "
                f"window is [{self.t0}, {self.t_end}]"
            )

        sampled = np.asarray(self.sampled if self.sampled is not None else [0])
        if (
            sampled[0] != 0
            or np.any(np.diff(sampled) <= 0)
            or sampled[-1] >= len(nodes)
        ):
            raise InvalidConfigError(
                "Sampled steps must increase from 0 within the boundaries"
            )

    @classmethod
    def for_samples(
        cls,
        sample_times: ArrayLike,
        dt: float | None = None,
    ) -> TimeGrid:
        """Grid whose samples are exactly sample_times.

        Uniform samples get a uniform grid whose step is the largest value
        not exceeding dt that divides the spacing. Uneven samples get the
        union of the sample times and the steps of dt from the first
        sample, or the sample times alone without dt.
        """
        times = np.asarray(sample_times, dtype=np.float64)
        if times.ndim != 1 or len(times) == 0:
            raise DatasetValidationError("Sample times must be a non-empty vector")

        if len(times) == 1:
            return cls(t_end=times[0], t0=times[0], dt=dt or DEFAULT_DT)

        gaps = np.diff(times)
        if np.any(gaps <= 0.0):
            raise DatasetValidationError("Sample times must be strictly increasing")

        spacing = float(gaps[0])
        if not np.allclose(gaps, spacing, rtol=0.0, atol=1e-9 * spacing):
            return cls._merged(times, dt)

        stride = 1 if dt is None else max(1, int(np.ceil(spacing / dt - 1e-9)))
        return cls(
            t_end=float(times[0] + spacing * (len(times) - 1)),
            t0=float(times[0]),
            dt=spacing / stride,
            sample_stride=stride,
        )

    @classmethod
    def _merged(cls, times: FloatArray, dt: float | None) -> TimeGrid:
        nodes = times
        if dt is not None:
            count = int(np.ceil((times[-1] - times[0]) / dt - 1e-9))
            regular = times[0] + dt * np.arange(count)
            # Drop regular instants that would leave a sliver step
            nearest = np.min(np.abs(np.subtract.outer(regular, times)), axis=1)
            nodes = np.union1d(regular[nearest > SLIVER_FRACTION * dt], times)

        LOGGER.debug(
            "Uneven samples merged into %d steps between %g and %g",
            len(nodes) - 1,
            times[0],
            times[-1],
        )
        return cls(
            t_end=float(times[-1]),
            t0=float(times[0]),
            dt=float(np.max(np.diff(nodes))),
            boundaries=tuple(float(x) for x in nodes),
            sampled=tuple(int(x) for x in np.searchsorted(nodes, times)),
        )

    @property
    def n_steps(self) -> int:
        if self.boundaries is not None:
            return len(self.boundaries) - 1
        return int(round((self.t_end - self.t0) / self.dt))

    @property
    def step_times(self) -> FloatArray:
        if self.boundaries is not None:
            return np.array(self.boundaries)
        return self.t0 + self.dt * np.arange(self.n_steps + 1)

    @property
    def step_sizes(self) -> FloatArray:
        if self.boundaries is not None:
            return np.diff(self.boundaries)
        return np.full(self.n_steps, self.dt)

    @property
    def stage_times(self) -> FloatArray:
        """Grid points and midpoints, t0, t0 + dt/2, t0 + dt, ..."""
        if self.boundaries is None:
            return self.t0 + 0.5 * self.dt * np.arange(2 * self.n_steps + 1)

        nodes = self.step_times
        stages = np.empty(2 * self.n_steps + 1)
        stages[0::2] = nodes
        stages[1::2] = nodes[:-1] + 0.5 * np.diff(nodes)
        return stages

    @property
    def sample_indices(self) -> NDArray[np.int64]:
        if self.boundaries is not None:
            sampled = self.sampled if self.sampled is not None else (0,)
            return np.array(sampled, dtype=np.int64)
        return np.arange(0, self.n_steps + 1, self.sample_stride)

    @property
    def sample_mask(self) -> NDArray[np.bool_]:
        """True at every sampled step boundary."""
        mask = np.zeros(self.n_steps + 1, dtype=bool)
        mask[self.sample_indices] = True
        return mask

    @property
    def sample_times(self) -> FloatArray:
        return self.step_times[self.sample_indices]


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: FloatArray
    states: ComplexArray
    experiment_id: str = ""

    def __post_init__(self) -> None:
        if len(self.times) != len(self.states):
            raise DimensionError(
                f"{len(self.times)} times but {len(self.states)} states"
            )

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True, eq=False)
class SensitivityResult:
    """Vectorized samples of a batch and their parameter derivatives.

    states has shape (experiments, samples, dim^2) and sensitivities
    (experiments, samples, dim^2, parameters).
    """

    sample_times: FloatArray
    states: ComplexArray
    sensitivities: ComplexArray


# region Generators


def _check_model(model: CoefficientModel, cfg: SystemConfig) -> None:
    if model.form.basis.dim != cfg.dim:
        raise DimensionError(
            f"Model acts on dim {model.form.basis.dim}, system has dim {cfg.dim}"
        )


def _control_superoperators(
    pulses: Sequence[ControlPulse],
    cfg: SystemConfig,
    times: FloatArray,
) -> ComplexArray:
    """(experiments, times, dim^2, dim^2)"""
    return np.stack(
        [
            hamiltonian_superoperator(control_hamiltonians(times, pulse, cfg))
            for pulse in pulses
        ]
    )


def _rk4_step_maps(generators: ComplexArray, dt: ArrayLike) -> ComplexArray:
    """RK4 step maps from generators at the stage times of every step.

    generators has shape (..., 2 n + 1, m, m) on the stage times of
    TimeGrid and dt is one step or n of them; the result has shape
    (..., n, m, m).
    """
    h = np.asarray(dt, dtype=np.float64)[..., np.newaxis, np.newaxis]
    start = generators[..., 0:-1:2, :, :]
    middle = generators[..., 1::2, :, :]
    end = generators[..., 2::2, :, :]
    identity = np.eye(generators.shape[-1])

    k1 = start
    k2 = middle @ (identity + 0.5 * h * k1)
    k3 = middle @ (identity + 0.5 * h * k2)
    k4 = end @ (identity + h * k3)
    return identity + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _model_generators(model: CoefficientModel, times: FloatArray) -> ComplexArray:
    if model.state_dependent:
        raise UnsupportedModelError(
            f"{model.pretty_name} model reads the state, its steps are not linear maps"
        )

    return model.form.liouvillian(model.coefficients(times))


# endregion Generators

# region Step maps


def step_maps(
    model: CoefficientModel,
    pulse: ControlPulse,
    cfg: SystemConfig,
    grid: TimeGrid,
) -> ComplexArray:
    """RK4 step maps of every step of grid, shape (n_steps, dim^2, dim^2)."""
    _check_model(model, cfg)
    times = grid.stage_times
    generators = _model_generators(model, times) + _control_superoperators(
        [pulse], cfg, times
    )[0]
    return _rk4_step_maps(generators, grid.step_sizes)


def step_map(
    model: CoefficientModel,
    pulse: ControlPulse,
    cfg: SystemConfig,
    t: float,
    dt: float,
) -> ComplexArray:
    return step_maps(model, pulse, cfg, TimeGrid(t0=t, t_end=t + dt, dt=dt))[0]


def compose_step_maps(maps: ArrayLike, dim: int | None = None) -> ComplexArray:
    """Product maps[-1] @ ... @ maps[0]; the identity for no maps."""
    stack = np.asarray(maps, dtype=np.complex128)
    if len(stack) == 0:
        if stack.ndim == 3:
            return np.eye(stack.shape[-1], dtype=np.complex128)
        if dim is None:
            raise DimensionError("Composing no maps needs the dimension")
        return np.eye(dim * dim, dtype=np.complex128)

    return reduce(lambda total, step: step @ total, stack[1:], stack[0].copy())


def exponential_propagator(liouvillian: ArrayLike, t: float) -> ComplexArray:
    return expm(t * np.asarray(liouvillian, dtype=np.complex128))


def choi_matrix(superoperator: ArrayLike) -> ComplexArray:
    """J = sum_cd E_cd (x) Phi(E_cd) for a column-stacking superoperator."""
    matrix = np.asarray(superoperator, dtype=np.complex128)
    dim = round(np.sqrt(matrix.shape[0]))
    if matrix.shape != (dim * dim, dim * dim):
        raise DimensionError(f"Not a superoperator shape: {matrix.shape}")

    return (
        matrix.reshape((dim,) * 4).transpose(3, 1, 2, 0).reshape(dim * dim, dim * dim)
    )


def is_completely_positive(superoperator: ArrayLike, tolerance: float = 1e-8) -> bool:
    choi = choi_matrix(superoperator)
    hermitian = (choi + dagger(choi)) / 2.0
    return bool(np.min(np.linalg.eigvalsh(hermitian)) >= -tolerance)


# endregion Step maps

# region Propagation


def _initial_vectors(rho0s: Sequence[ArrayLike], dim: int) -> ComplexArray:
    vectors = vectorize(np.stack([np.asarray(rho) for rho in rho0s]))
    if vectors.shape[-1] != dim * dim:
        raise DimensionError(
            f"Initial states of size {vectors.shape[-1]} do not match dim {dim}"
        )
    return vectors


def _raise_divergence(vectors: ComplexArray, step: int, grid: TimeGrid) -> None:
    if not np.all(np.isfinite(vectors)):
        raise PropagationDivergenceError(step, float(grid.step_times[step]))


def _sample_states(vectors: ComplexArray) -> ComplexArray:
    """Sampled matrices, re-Hermitized and normalized where they drifted."""
    states = devectorize(vectors)
    hermitian = (states + dagger(states)) / 2.0
    trace = np.trace(hermitian, axis1=-2, axis2=-1).real
    drift = np.maximum(
        np.max(np.abs(states - hermitian), axis=(-2, -1)),
        np.abs(trace - 1.0),
    )
    drifted = drift > RENORMALIZATION_THRESHOLD
    if np.any(drifted):
        LOGGER.warning(
            "Renormalized %d sampled states, largest drift %.3g",
            int(np.count_nonzero(drifted)),
            float(np.max(drift)),
        )
        fixed = hermitian / trace[..., np.newaxis, np.newaxis]
        states = np.where(drifted[..., np.newaxis, np.newaxis], fixed, states)

    return states


def _integrate_linear(
    model: CoefficientModel,
    pulses: Sequence[ControlPulse],
    cfg: SystemConfig,
    vectors: ComplexArray,
    grid: TimeGrid,
) -> ComplexArray:
    times = grid.stage_times
    generators = _model_generators(model, times) + _control_superoperators(
        pulses, cfg, times
    )
    maps = _rk4_step_maps(generators, grid.step_sizes)
    sampled = grid.sample_mask

    samples = [vectors]
    current = vectors
    for step in range(grid.n_steps):
        current = np.einsum("eij,ej->ei", maps[:, step], current)
        _raise_divergence(current, step + 1, grid)
        if sampled[step + 1]:
            samples.append(current)

    return np.stack(samples, axis=1)


class _StageEvaluator:
    """Right-hand side and its parameter tangent at one stage."""

    def __init__(
        self,
        model: CoefficientModel,
        pulses: Sequence[ControlPulse],
        cfg: SystemConfig,
        grid: TimeGrid,
        with_tangent: bool,
    ):
        self.model = model
        self.form = model.form
        self.grid = grid
        self.with_tangent = with_tangent
        self.n_experiments = len(pulses)
        self.coordinates = coordinate_matrix(cfg.dim)

        times = grid.stage_times
        self.stage_times = times
        self.control = _control_superoperators(pulses, cfg, times)
        if not model.state_dependent:
            theta = model.coefficients(times)
            self.generators = self.form.liouvillian(theta)
            if with_tangent:
                self.generator_tangents = np.einsum(
                    "tgq,tqp->tgp",
                    self.form.coordinates_jacobian(theta),
                    model.parameter_jacobian(times),
                )

    def __call__(
        self,
        stage: int,
        vectors: ComplexArray,
        tangents: ComplexArray | None,
    ) -> tuple[ComplexArray, ComplexArray | None]:
        """d/dt of vectors (experiments, m) and tangents (experiments, m, P)."""
        t = self.stage_times[stage]
        if self.model.state_dependent:
            inputs = np.einsum("kj,ej->ek", self.coordinates, vectors).real
            times = np.full(self.n_experiments, t)
            theta = self.model.coefficients(times, inputs)
            generators = self.form.liouvillian(theta) + self.control[:, stage]
        else:
            generators = self.generators[stage] + self.control[:, stage]

        derivative = np.einsum("eij,ej->ei", generators, vectors)
        if not self.with_tangent or tangents is None:
            return derivative, None

        if self.model.state_dependent:
            coordinates_jacobian = self.form.coordinates_jacobian(theta)
            input_sensitivity = np.einsum(
                "kj,ejp->ekp", self.coordinates, tangents
            ).real
            theta_sensitivity = self.model.parameter_jacobian(
                times, inputs
            ) + np.einsum(
                "eqk,ekp->eqp",
                self.model.input_jacobian(times, inputs),
                input_sensitivity,
            )
            generator_tangents = np.einsum(
                "egq,eqp->egp", coordinates_jacobian, theta_sensitivity
            )
        else:
            generator_tangents = np.broadcast_to(
                self.generator_tangents[stage],
                (self.n_experiments,) + self.generator_tangents.shape[1:],
            )

        basis_action = np.einsum(
            "gij,ej->egi", self.form.superoperators, vectors
        )
        tangent_derivative = np.einsum(
            "eij,ejp->eip", generators, tangents
        ) + np.einsum("egi,egp->eip", basis_action, generator_tangents)
        return derivative, tangent_derivative


def _integrate_stages(
    evaluate: _StageEvaluator,
    vectors: ComplexArray,
    grid: TimeGrid,
    tangents: ComplexArray | None = None,
) -> tuple[ComplexArray, ComplexArray | None]:
    """Classic RK4 stage by stage, optionally with the tangent system."""
    step_sizes = grid.step_sizes
    sampled = grid.sample_mask
    samples = [vectors]
    tangent_samples = [tangents] if tangents is not None else []
    current = vectors
    current_tangent = tangents

    for step in range(grid.n_steps):
        dt = step_sizes[step]
        first = 2 * step
        stages = []
        stage_tangents = []
        for stage, fraction, previous in (
            (first, 0.0, -1),
            (first + 1, 0.5, 0),
            (first + 1, 0.5, 1),
            (first + 2, 1.0, 2),
        ):
            if previous < 0:
                state, tangent = current, current_tangent
            else:
                state = current + fraction * dt * stages[previous]
                tangent = (
                    current_tangent + fraction * dt * stage_tangents[previous]
                    if current_tangent is not None
                    else None
                )
            derivative, tangent_derivative = evaluate(stage, state, tangent)
            stages.append(derivative)
            stage_tangents.append(tangent_derivative)

        current = current + dt / 6.0 * (
            stages[0] + 2.0 * stages[1] + 2.0 * stages[2] + stages[3]
        )
        _raise_divergence(current, step + 1, grid)
        if current_tangent is not None:
            current_tangent = current_tangent + dt / 6.0 * (
                stage_tangents[0]
                + 2.0 * stage_tangents[1]
                + 2.0 * stage_tangents[2]
                + stage_tangents[3]
            )

        if sampled[step + 1]:
            samples.append(current)
            if current_tangent is not None:
                tangent_samples.append(current_tangent)

    stacked_tangents = (
        np.stack(tangent_samples, axis=1) if tangent_samples else None
    )
    return np.stack(samples, axis=1), stacked_tangents


def propagate_vectors(
    model: CoefficientModel,
    pulses: Sequence[ControlPulse],
    cfg: SystemConfig,
    rho0s: Sequence[ArrayLike],
    grid: TimeGrid,
) -> ComplexArray:
    """Raw vectorized samples with shape (experiments, samples, dim^2)."""
    _check_model(model, cfg)
    if len(pulses) != len(rho0s):
        raise DimensionError(f"{len(pulses)} pulses for {len(rho0s)} initial states")

    vectors = _initial_vectors(rho0s, cfg.dim)
    if not model.state_dependent:
        return _integrate_linear(model, pulses, cfg, vectors, grid)

    evaluate = _StageEvaluator(model, pulses, cfg, grid, with_tangent=False)
    return _integrate_stages(evaluate, vectors, grid)[0]


def propagate_batch(
    model: CoefficientModel,
    pulses: Sequence[ControlPulse],
    cfg: SystemConfig,
    rho0s: Sequence[ArrayLike],
    grid: TimeGrid,
    experiment_ids: Sequence[str] | None = None,
) -> list[Trajectory]:
    vectors = propagate_vectors(model, pulses, cfg, rho0s, grid)
    states = _sample_states(vectors)
    ids = experiment_ids if experiment_ids is not None else [""] * len(pulses)
    times = read_only(grid.sample_times)
    return [
        Trajectory(times=times, states=read_only(experiment), experiment_id=name)
        for experiment, name in zip(states, ids)
    ]


def propagate(
    model: CoefficientModel,
    pulse: ControlPulse,
    cfg: SystemConfig,
    rho0: ArrayLike,
    grid: TimeGrid,
) -> Trajectory:
    return propagate_batch(model, [pulse], cfg, [rho0], grid)[0]


def propagate_with_sensitivities(
    model: CoefficientModel,
    pulses: Sequence[ControlPulse],
    cfg: SystemConfig,
    rho0s: Sequence[ArrayLike],
    grid: TimeGrid,
) -> SensitivityResult:
    """Samples and their exact derivatives with respect to model.params.

    The tangent system is integrated with the same RK4 stages, so the
    derivatives are those of the discrete scheme.
    """
    _check_model(model, cfg)
    vectors = _initial_vectors(rho0s, cfg.dim)
    tangents = np.zeros(
        vectors.shape + (model.parameter_count,), dtype=np.complex128
    )
    evaluate = _StageEvaluator(model, pulses, cfg, grid, with_tangent=True)
    states, sensitivities = _integrate_stages(evaluate, vectors, grid, tangents)
    assert sensitivities is not None
    return SensitivityResult(
        sample_times=grid.sample_times,
        states=states,
        sensitivities=sensitivities,
    )


def max_structure_drift(trajectory_vectors: ComplexArray) -> tuple[float, float]:
    """Largest trace error and Hermiticity defect of raw samples."""
    states = devectorize(trajectory_vectors)
    trace = np.trace(states, axis1=-2, axis2=-1)
    return float(np.max(np.abs(trace - 1.0))), hermiticity_defect(states)


# endregion Propagation
