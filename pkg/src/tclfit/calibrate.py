# SPDX-License-Identifier: GPL-3.0-or-later
# SPDX-FileCopyrightText: 2026 tclfit contributors
from __future__ import annotations

import logging
from collections import OrderedDict
from dataclasses import dataclass, field, replace
from enum import StrEnum
from typing import TYPE_CHECKING

import numpy as np
from scipy.optimize import minimize

from .coefficients import (
    ConstantModel,
    make_settings,
    model_class,
    model_from_document,
    model_to_document,
)
from .dataset import read_document, write_document
from .exceptions import (
    FitConfigError,
    FitInitializationError,
    GradientError,
    HorizonError,
    InvalidConfigError,
    PropagationDivergenceError,
    UnsupportedDimensionError,
)
from .generator import GeneratorForm, GeneratorMode, device_coefficients
from .operators import (
    BasisKind,
    devectorize,
    make_basis,
    spectral_filter,
    trace_distance,
    vectorize,
)
from .propagate import (
    TimeGrid,
    propagate_vectors,
    propagate_with_sensitivities,
)
from .tclfit_utils import SettingFieldMetadata, chunked_map

if TYPE_CHECKING:
    from collections.abc import Sequence
    from pathlib import Path
    from typing import Any

    from numpy.typing import ArrayLike, NDArray

    from .coefficients import CoefficientModel
    from .dataset import Dataset, ExperimentRecord
    from .generator import SystemConfig
    from .operators import ComplexArray

    FloatArray = NDArray[np.float64]


LOGGER = logging.getLogger(__name__)

HISTOGRAM_BIN_WIDTH = 0.005
HISTOGRAM_RANGE = 0.3


class GradientMethod(StrEnum):
    FINITE_DIFFERENCE = "finite-difference"
    FORWARD_SENSITIVITY = "forward-sensitivity"


# region Configuration


@dataclass(frozen=True)
class Stage1Config:
    max_iters: int = field(
        default=500,
        metadata=SettingFieldMetadata(
            pretty_name="Adam iterations",
            description="Iterations of the adaptive-moment stage.",
        ),
    )
    step_size: float = field(
        default=1e-2,
        metadata=SettingFieldMetadata(
            pretty_name="Adam step size",
            description="Learning rate of the adaptive-moment stage.",
        ),
    )
    batch: int | None = field(
        default=None,
        metadata=SettingFieldMetadata(
            pretty_name="Batch",
            description="Experiments per step; all when unset.",
        ),
    )
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8


@dataclass(frozen=True)
class Stage2Config:
    max_iters: int = field(
        default=1000,
        metadata=SettingFieldMetadata(
            pretty_name="L-BFGS iterations",
            description="Iterations of the quasi-Newton stage.",
        ),
    )
    memory: int = field(
        default=10,
        metadata=SettingFieldMetadata(
            pretty_name="L-BFGS memory",
            description="Stored correction pairs.",
        ),
    )
    tolerance: float = field(
        default=1e-8,
        metadata=SettingFieldMetadata(
            pretty_name="Gradient tolerance",
            description="Projected gradient norm that stops the quasi-Newton stage.",
        ),
    )


@dataclass(frozen=True)
class ModelSpec:
    """What to fit: variant name, its settings and the generator form."""

    variant: str = "constant"
    settings: dict[str, Any] = field(default_factory=dict)
    mode: GeneratorMode = GeneratorMode.DIAGONAL
    positive_rates: bool = False

    def build(self, system: SystemConfig, t_train: float) -> CoefficientModel:
        model_type = model_class(self.variant)
        form = GeneratorForm(
            system.basis, GeneratorMode(self.mode), self.positive_rates
        )

        options = dict(self.settings)
        known = {x.name for x in model_type.iter_settings_fields()}
        for window_field in ("time_scale", "t_train"):
            if window_field in known:
                options.setdefault(window_field, t_train)

        return model_type.create(
            form,
            make_settings(model_type, options),
            initial_coefficients(form, system),
        )


@dataclass(frozen=True)
class FitConfig:
    model: ModelSpec = field(default_factory=ModelSpec)
    stage1: Stage1Config = field(default_factory=Stage1Config)
    stage2: Stage2Config = field(default_factory=Stage2Config)
    gradient_method: GradientMethod = field(
        default=GradientMethod.FORWARD_SENSITIVITY,
        metadata=SettingFieldMetadata(
            pretty_name="Gradient method",
            description="forward-sensitivity or finite-difference.",
        ),
    )
    l1_weight: float = field(
        default=0.0,
        metadata=SettingFieldMetadata(
            pretty_name="L1 weight",
            description="Weight of the parameter L1 norm in the loss.",
        ),
    )
    seed: int = 0
    dt: float | None = field(
        default=None,
        metadata=SettingFieldMetadata(
            pretty_name="Integration step",
            description="RK4 step in microseconds; the sampling interval if unset.",
        ),
    )
    threads: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "gradient_method", GradientMethod(self.gradient_method)
        )
        if self.l1_weight < 0.0:
            raise InvalidConfigError("L1 weight must be non-negative")

        if self.stage1.max_iters < 0 or self.stage2.max_iters < 0:
            raise InvalidConfigError("Iteration counts must be non-negative")

        if self.stage1.batch is not None and self.stage1.batch < 1:
            raise InvalidConfigError("Batch must hold at least one experiment")

        if not (self.stage1.step_size > 0.0 and self.stage2.tolerance > 0.0):
            raise InvalidConfigError("Step size and tolerance must be positive")

        if self.stage2.memory < 1:
            raise InvalidConfigError("L-BFGS memory must be at least 1")


def initial_coefficients(form: GeneratorForm, system: SystemConfig) -> FloatArray:
    """Start from the device T1/T2 rates where the basis can express them."""
    n = form.n_operators
    if system.dim == 2 and form.basis.kind == BasisKind.UPPER_TRIANGULAR_GELL_MANN:
        device = device_coefficients(system)
        return form.theta_from_rates(device[:n], device[n:])

    return form.theta_from_rates(np.zeros(n), np.full(n, 1.0 / (system.t2 * n)))


def baseline_model(cfg: SystemConfig) -> CoefficientModel:
    """Constant model of the device T1/T2 generator, no fitting."""
    if cfg.dim != 2:
        raise UnsupportedDimensionError(
            f"The device baseline describes a qubit, got dim {cfg.dim}"
        )

    qubit = replace(cfg, basis_kind=BasisKind.UPPER_TRIANGULAR_GELL_MANN)
    form = GeneratorForm(make_basis(2, BasisKind.UPPER_TRIANGULAR_GELL_MANN))
    return ConstantModel(form, params=device_coefficients(qubit))


# endregion Configuration

# region Loss


def _is_interpolation(times: FloatArray, t_train: float) -> NDArray[np.bool_]:
    return times <= t_train + 1e-9 * max(1.0, abs(t_train))


@dataclass(frozen=True, eq=False)
class _ExperimentGroup:
    """Training experiments sharing sample times, cut at t_train."""

    indices: tuple[int, ...]
    experiments: tuple[ExperimentRecord, ...]
    grid: TimeGrid
    measured: ComplexArray


class Objective:
    """Loss and gradient of a parameterized model over a dataset."""

    def __init__(
        self,
        template: CoefficientModel,
        dataset: Dataset,
        config: FitConfig,
    ):
        self.template = template
        self.dataset = dataset
        self.config = config
        self.experiments = dataset.training_experiments
        if not self.experiments:
            raise InvalidConfigError("No training experiments in the dataset")

        self.groups = self._make_groups()
        self.evaluations = 0
        self._values: OrderedDict[bytes, float] = OrderedDict()

    def _make_groups(self) -> list[_ExperimentGroup]:
        by_times: dict[bytes, list[int]] = {}
        for index, experiment in enumerate(self.experiments):
            mask = _is_interpolation(experiment.times, self.dataset.t_train)
            by_times.setdefault(experiment.times[mask].tobytes(), []).append(index)

        groups = []
        for indices in by_times.values():
            members = tuple(self.experiments[x] for x in indices)
            first = members[0]
            mask = _is_interpolation(first.times, self.dataset.t_train)
            groups.append(
                _ExperimentGroup(
                    indices=tuple(indices),
                    experiments=members,
                    grid=TimeGrid.for_samples(first.times[mask], self.config.dt),
                    measured=np.stack([vectorize(x.states[mask]) for x in members]),
                )
            )
        return groups

    def _selected(
        self,
        indices: Sequence[int] | None,
    ) -> list[tuple[_ExperimentGroup, list[int]]]:
        wanted = None if indices is None else set(indices)
        selection = []
        for group in self.groups:
            positions = [
                position
                for position, index in enumerate(group.indices)
                if wanted is None or index in wanted
            ]
            if positions:
                selection.append((group, positions))
        return selection

    def _model(self, params: ArrayLike) -> CoefficientModel:
        return self.template.with_params(params)

    def _penalty(self, params: FloatArray) -> float:
        return self.config.l1_weight * float(np.sum(np.abs(params)))

    def _remember(self, params: FloatArray, value: float) -> None:
        self._values[params.tobytes()] = value
        while len(self._values) > 64:
            self._values.popitem(last=False)

    def recalled(self, params: ArrayLike) -> float | None:
        return self._values.get(np.asarray(params, dtype=np.float64).tobytes())

    def _residual_sums(
        self,
        model: CoefficientModel,
        group: _ExperimentGroup,
        positions: list[int],
    ) -> list[float]:
        def run(chunk: Sequence[int]) -> list[float]:
            chunk_experiments = [group.experiments[x] for x in chunk]
            predicted = propagate_vectors(
                model,
                self.dataset.pulses(chunk_experiments),
                self.dataset.system,
                [x.initial_state for x in chunk_experiments],
                group.grid,
            )
            residual = predicted - group.measured[list(chunk)]
            return [float(x) for x in np.sum(np.abs(residual) ** 2, axis=(1, 2))]

        return chunked_map(run, positions, self.config.threads)

    def loss(self, params: ArrayLike, indices: Sequence[int] | None = None) -> float:
        """Squared Frobenius residuals over training samples plus L1.

        Diverging propagation gives +inf.
        """
        values = np.asarray(params, dtype=np.float64)
        self.evaluations += 1
        model = self._model(values)
        total = 0.0
        try:
            for group, positions in self._selected(indices):
                total += sum(self._residual_sums(model, group, positions))
        except PropagationDivergenceError as e:
            LOGGER.debug("Loss evaluation diverged: %s", e)
            return float("inf")

        value = total + self._penalty(values)
        if not np.isfinite(value):
            return float("inf")

        if indices is None:
            self._remember(values, value)
        return value

    def _sensitivity_terms(
        self,
        model: CoefficientModel,
        group: _ExperimentGroup,
        positions: list[int],
    ) -> list[tuple[float, FloatArray]]:
        def run(chunk: Sequence[int]) -> list[tuple[float, FloatArray]]:
            chunk_experiments = [group.experiments[x] for x in chunk]
            result = propagate_with_sensitivities(
                model,
                self.dataset.pulses(chunk_experiments),
                self.dataset.system,
                [x.initial_state for x in chunk_experiments],
                group.grid,
            )
            residual = result.states - group.measured[list(chunk)]
            values = np.sum(np.abs(residual) ** 2, axis=(1, 2))
            gradients = 2.0 * np.einsum(
                "esi,esip->ep", residual.conj(), result.sensitivities
            ).real
            return [(float(v), g) for v, g in zip(values, gradients)]

        return chunked_map(run, positions, self.config.threads)

    def value_and_gradient(
        self,
        params: ArrayLike,
        indices: Sequence[int] | None = None,
    ) -> tuple[float, FloatArray]:
        values = np.asarray(params, dtype=np.float64)
        match self.config.gradient_method:
            case GradientMethod.FINITE_DIFFERENCE:
                value = self.loss(values, indices)
                if not np.isfinite(value):
                    return value, np.zeros_like(values)
                return value, self.finite_difference_gradient(values, indices)
            case GradientMethod.FORWARD_SENSITIVITY:
                return self._forward_value_and_gradient(values, indices)

    def _forward_value_and_gradient(
        self,
        values: FloatArray,
        indices: Sequence[int] | None,
    ) -> tuple[float, FloatArray]:
        self.evaluations += 1
        model = self._model(values)
        total = 0.0
        gradient = np.zeros_like(values)
        try:
            for group, positions in self._selected(indices):
                for value, experiment_gradient in self._sensitivity_terms(
                    model, group, positions
                ):
                    total += value
                    gradient += experiment_gradient
        except PropagationDivergenceError as e:
            LOGGER.debug("Gradient evaluation diverged: %s", e)
            return float("inf"), np.zeros_like(values)

        value = total + self._penalty(values)
        if not np.isfinite(value):
            return float("inf"), np.zeros_like(values)

        gradient += self.config.l1_weight * np.sign(values)
        self._check_gradient(gradient)
        if indices is None:
            self._remember(values, value)
        return value, gradient

    def finite_difference_gradient(
        self,
        params: ArrayLike,
        indices: Sequence[int] | None = None,
    ) -> FloatArray:
        """Central differences with step max(1e-6, 1e-6 |theta_k|)."""
        values = np.asarray(params, dtype=np.float64)
        gradient = np.zeros_like(values)
        for index in range(len(values)):
            step = max(1e-6, 1e-6 * abs(values[index]))
            forward = values.copy()
            forward[index] += step
            backward = values.copy()
            backward[index] -= step
            gradient[index] = (
                self.loss(forward, indices) - self.loss(backward, indices)
            ) / (2.0 * step)

        self._check_gradient(gradient)
        return gradient

    def gradient(
        self,
        params: ArrayLike,
        indices: Sequence[int] | None = None,
    ) -> FloatArray:
        value, gradient = self.value_and_gradient(params, indices)
        if not np.isfinite(value):
            raise FitConfigError("Gradient requested where the loss is not finite")
        return gradient

    @staticmethod
    def _check_gradient(gradient: FloatArray) -> None:
        bad = np.flatnonzero(~np.isfinite(gradient))
        if len(bad):
            raise GradientError(int(bad[0]))


def loss(params: ArrayLike, dataset: Dataset, cfg: FitConfig) -> float:
    template = cfg.model.build(dataset.system, dataset.t_train)
    return Objective(template, dataset, cfg).loss(params)


def gradient(params: ArrayLike, dataset: Dataset, cfg: FitConfig) -> FloatArray:
    template = cfg.model.build(dataset.system, dataset.t_train)
    return Objective(template, dataset, cfg).gradient(params)


# endregion Loss

# region Evaluation


@dataclass(frozen=True, eq=False)
class ExperimentSeries:
    experiment_id: str
    times: FloatArray
    distances: FloatArray
    measured: ComplexArray
    predicted: ComplexArray


@dataclass(frozen=True)
class Metrics:
    interp_mean: float
    interp_std: float
    extrap_mean: float
    extrap_std: float

    def as_dict(self) -> dict[str, float]:
        return {
            "interpolation_mean": self.interp_mean,
            "interpolation_std": self.interp_std,
            "extrapolation_mean": self.extrap_mean,
            "extrapolation_std": self.extrap_std,
        }

    @classmethod
    def from_dict(cls, values: dict[str, Any]) -> Metrics:
        return cls(
            interp_mean=float(values["interpolation_mean"]),
            interp_std=float(values["interpolation_std"]),
            extrap_mean=float(values["extrapolation_mean"]),
            extrap_std=float(values["extrapolation_std"]),
        )


@dataclass(frozen=True, eq=False)
class Evaluation:
    metrics: Metrics
    t_train: float
    series: tuple[ExperimentSeries, ...]
    bin_edges: FloatArray
    interp_histogram: NDArray[np.int64]
    extrap_histogram: NDArray[np.int64]


def histogram_edges() -> FloatArray:
    count = int(round(HISTOGRAM_RANGE / HISTOGRAM_BIN_WIDTH))
    return np.linspace(0.0, HISTOGRAM_RANGE, count + 1)


def distance_histogram(distances: ArrayLike) -> NDArray[np.int64]:
    """Counts in bins of 0.005 on [0, 0.3]; larger values land in the last bin."""
    values = np.clip(np.asarray(distances, dtype=np.float64), 0.0, HISTOGRAM_RANGE)
    counts, _ = np.histogram(values, bins=histogram_edges())
    return counts


def _partition_stats(values: FloatArray) -> tuple[float, float]:
    if len(values) == 0:
        return float("nan"), float("nan")
    return float(np.mean(values)), float(np.std(values))


def evaluate_model(
    model: CoefficientModel,
    dataset: Dataset,
    t_train: float | None = None,
    dt: float | None = None,
) -> Evaluation:
    """Trace distances of filtered predictions against filtered data.

    Samples with t <= t_train are interpolation, later ones extrapolation.
    """
    horizon = dataset.t_train if t_train is None else t_train
    if horizon > dataset.horizon:
        raise HorizonError(
            f"Training horizon {horizon} us exceeds the data ({dataset.horizon} us)"
        )

    series = []
    for experiment in dataset.experiments:
        grid = TimeGrid.for_samples(experiment.times, dt)
        predicted_vectors = propagate_vectors(
            model,
            dataset.pulses([experiment]),
            dataset.system,
            [experiment.initial_state],
            grid,
        )[0]
        predicted = spectral_filter(_hermitian(devectorize(predicted_vectors)))
        series.append(
            ExperimentSeries(
                experiment_id=experiment.experiment_id,
                times=experiment.times,
                distances=np.asarray(trace_distance(predicted, experiment.states)),
                measured=experiment.states,
                predicted=predicted,
            )
        )

    interp = np.concatenate(
        [x.distances[_is_interpolation(x.times, horizon)] for x in series]
    )
    extrap = np.concatenate(
        [x.distances[~_is_interpolation(x.times, horizon)] for x in series]
    )
    interp_mean, interp_std = _partition_stats(interp)
    extrap_mean, extrap_std = _partition_stats(extrap)
    return Evaluation(
        metrics=Metrics(interp_mean, interp_std, extrap_mean, extrap_std),
        t_train=horizon,
        series=tuple(series),
        bin_edges=histogram_edges(),
        interp_histogram=distance_histogram(interp),
        extrap_histogram=distance_histogram(extrap),
    )


def _hermitian(states: ComplexArray) -> ComplexArray:
    return (states + np.swapaxes(states, -1, -2).conj()) / 2.0


# endregion Evaluation

# region Fitting


@dataclass(frozen=True, eq=False)
class FitResult:
    model: CoefficientModel
    loss_history: tuple[float, ...]
    # Index into loss_history where the quasi-Newton stage starts
    stage_boundary: int
    label: str = ""
    evaluation: Evaluation | None = None
    metrics: Metrics | None = None

    @property
    def theta_star(self) -> FloatArray:
        return self.model.params

    @property
    def parameterization(self) -> str:
        return self.label or self.model.pretty_name

    def with_evaluation(self, evaluation: Evaluation) -> FitResult:
        return replace(self, evaluation=evaluation, metrics=evaluation.metrics)


class _Best:
    def __init__(self, params: FloatArray, value: float):
        self.params = params.copy()
        self.value = value

    def offer(self, params: ArrayLike, value: float | None) -> None:
        if value is not None and np.isfinite(value) and value < self.value:
            self.params = np.array(params, dtype=np.float64)
            self.value = value


@dataclass(frozen=True)
class _AdamMoments:
    first: FloatArray
    second: FloatArray
    steps: int = 0

    @classmethod
    def zeros(cls, size: int) -> _AdamMoments:
        return cls(first=np.zeros(size), second=np.zeros(size))

    def updated(self, gradient: FloatArray, config: Stage1Config) -> _AdamMoments:
        return _AdamMoments(
            first=config.beta1 * self.first + (1 - config.beta1) * gradient,
            second=config.beta2 * self.second + (1 - config.beta2) * gradient**2,
            steps=self.steps + 1,
        )

    def direction(self, config: Stage1Config) -> FloatArray:
        corrected_first = self.first / (1 - config.beta1**self.steps)
        corrected_second = self.second / (1 - config.beta2**self.steps)
        return corrected_first / (np.sqrt(corrected_second) + config.epsilon)


def _run_adam(
    objective: Objective,
    start: FloatArray,
    config: Stage1Config,
    rng: np.random.Generator,
    best: _Best,
    history: list[float],
) -> FloatArray:
    n_experiments = len(objective.experiments)
    batch = config.batch if config.batch is not None else n_experiments
    batch = min(batch, n_experiments)

    params = start.copy()
    moments = _AdamMoments.zeros(len(params))
    # Point, gradient and moments the last update started from
    restore: tuple[FloatArray, FloatArray, _AdamMoments] | None = None
    step_size = config.step_size
    accepted = 0

    for iteration in range(config.max_iters):
        indices = (
            None
            if batch == n_experiments
            else sorted(int(x) for x in rng.choice(n_experiments, batch, replace=False))
        )
        value, gradient = objective.value_and_gradient(params, indices)
        if not np.isfinite(value):
            step_size /= 2.0
            LOGGER.warning(
                "Rejected Adam step %d, step size now %.3g", iteration, step_size
            )
            if restore is not None:
                previous, previous_gradient, previous_moments = restore
                moments = previous_moments.updated(previous_gradient, config)
                params = previous - step_size * moments.direction(config)
            continue

        accepted += 1
        history.append(value)
        if indices is None:
            best.offer(params, value)
        LOGGER.debug("Adam iteration %d loss %.6g", iteration, value)

        restore = (params, gradient, moments)
        moments = moments.updated(gradient, config)
        params = params - step_size * moments.direction(config)

    if config.max_iters > 0 and accepted == 0:
        raise FitInitializationError(
            f"All {config.max_iters} Adam steps were rejected"
        )

    best.offer(params, objective.loss(params))
    return best.params


def _run_lbfgs(
    objective: Objective,
    start: FloatArray,
    config: Stage2Config,
    best: _Best,
    history: list[float],
) -> None:
    if config.max_iters == 0:
        return

    def record(params: FloatArray) -> None:
        value = objective.recalled(params)
        if value is None:
            value = objective.loss(params)
        history.append(value)
        best.offer(params, value)
        LOGGER.debug("L-BFGS iteration loss %.6g", value)

    result = minimize(
        objective.value_and_gradient,
        start,
        jac=True,
        method="L-BFGS-B",
        callback=record,
        options={
            "maxiter": config.max_iters,
            "maxcor": config.memory,
            "gtol": config.tolerance,
        },
    )
    best.offer(result.x, objective.recalled(result.x))
    LOGGER.info("L-BFGS finished after %d iterations: %s", result.nit, result.message)


def fit(
    dataset: Dataset,
    cfg: FitConfig,
    template: CoefficientModel | None = None,
    label: str = "",
) -> FitResult:
    """Adam followed by L-BFGS on the training experiments.

    Returns the lowest-loss parameters seen and their evaluation.
    """
    model = template or cfg.model.build(dataset.system, dataset.t_train)
    objective = Objective(model, dataset, cfg)
    start = np.array(model.params)

    initial_value = objective.loss(start)
    if not np.isfinite(initial_value):
        raise FitConfigError(
            "Loss is not finite at the initial parameters; "
            "check the model settings and the integration step"
        )

    history = [initial_value]
    best = _Best(start, initial_value)
    rng = np.random.default_rng(cfg.seed)

    LOGGER.info(
        "Fitting %s model with %d parameters on %d experiments",
        model.pretty_name,
        model.parameter_count,
        len(objective.experiments),
    )
    stage1_end = _run_adam(objective, start, cfg.stage1, rng, best, history)
    boundary = len(history)
    LOGGER.info("Adam stage done, best loss %.6g", best.value)

    _run_lbfgs(objective, stage1_end, cfg.stage2, best, history)
    LOGGER.info(
        "Fit done after %d loss evaluations, best loss %.6g",
        objective.evaluations,
        best.value,
    )

    fitted = model.with_params(best.params)
    result = FitResult(
        model=fitted,
        loss_history=tuple(history),
        stage_boundary=boundary,
        label=label,
    )
    return result.with_evaluation(evaluate_model(fitted, dataset, dt=cfg.dt))


def evaluate(
    result: FitResult | CoefficientModel,
    dataset: Dataset,
    t_train: float | None = None,
    dt: float | None = None,
) -> Evaluation:
    model = result.model if isinstance(result, FitResult) else result
    return evaluate_model(model, dataset, t_train, dt)


# endregion Fitting

# region Documents


def result_to_document(result: FitResult) -> dict[str, Any]:
    document = model_to_document(result.model)
    document["tclfit"]["kind"] = "result"
    document["result"] = {
        "label": result.parameterization,
        "master_equation": result.model.master_equation,
        "stage_boundary": result.stage_boundary,
        "loss_history": [float(x) for x in result.loss_history],
    }
    if result.metrics is not None:
        document["result"]["metrics"] = result.metrics.as_dict()
    if result.evaluation is not None:
        document["result"]["t_train_us"] = result.evaluation.t_train
    return document


def result_from_document(document: dict[str, Any]) -> FitResult:
    model = model_from_document(document)
    section = document.get("result", {})
    try:
        metrics = (
            Metrics.from_dict(section["metrics"]) if "metrics" in section else None
        )
        return FitResult(
            model=model,
            loss_history=tuple(float(x) for x in section.get("loss_history", ())),
            stage_boundary=int(section.get("stage_boundary", 0)),
            label=str(section.get("label", "")),
            metrics=metrics,
        )
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidConfigError(f"Invalid result document: {e}") from e


def save_result(result: FitResult, path: Path | str) -> None:
    write_document(result_to_document(result), path)


def load_result(path: Path | str) -> FitResult:
    """Result document, or a bare model document as a result without history."""
    return result_from_document(read_document(path, ("model", "result")))


def load_model(path: Path | str) -> CoefficientModel:
    """Model from a model document or the model embedded in a result."""
    return model_from_document(read_document(path, ("model", "result")))


def save_model(model: CoefficientModel, path: Path | str) -> None:
    write_document(model_to_document(model), path)


# endregion Documents
