# SPDX-License-Identifier: GPL-3.0-or-later
# SPDX-FileCopyrightText: 2026 tclfit contributors
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from tomllib import TOMLDecodeError
from tomllib import load as toml_load
from typing import TYPE_CHECKING

import numpy as np
from tomli_w import dump as toml_dump

from .exceptions import (
    DatasetParseError,
    DatasetValidationError,
    DatasetVersionError,
    HorizonError,
    InvalidConfigError,
    TclfitDataError,
)
from .generator import ControlPulse, DriveConvention, SystemConfig
from .operators import (
    BasisKind,
    basis_state,
    bloch_compose,
    bloch_decompose,
    spectral_filter,
)
from .propagate import TimeGrid, propagate_batch
from .tclfit_utils import SCHEMA_VERSION, SettingFieldMetadata, chunked_map

if TYPE_CHECKING:
    from collections.abc import Sequence
    from typing import Any

    from numpy.typing import ArrayLike, NDArray

    from .coefficients import CoefficientModel
    from .operators import ComplexArray

    FloatArray = NDArray[np.float64]
    Document = dict[str, Any]


LOGGER = logging.getLogger(__name__)


def linear_inversion(expectations: ArrayLike) -> ComplexArray:
    """rho = (I + a . sigma) / 2; may be non-positive for noisy a."""
    return bloch_compose(expectations)


# region Records


@dataclass(frozen=True)
class PulseRecord:
    """Square or piecewise-constant pulse as written in records.

    Amplitudes are in MHz under the dataset's drive convention.
    """

    amplitude_mhz: tuple[float, ...]
    q_amplitude_mhz: tuple[float, ...]
    duration_us: float
    rot_frequency_ghz: float
    segment_edges_us: tuple[float, ...] | None = None

    def control_pulse(self, convention: DriveConvention) -> ControlPulse:
        return ControlPulse(
            duration=self.duration_us,
            p_levels=tuple(float(x) for x in convention.to_angular(self.amplitude_mhz)),
            q_levels=tuple(
                float(x) for x in convention.to_angular(self.q_amplitude_mhz)
            ),
            rot_frequency=self.rot_frequency_ghz,
            segment_edges=self.segment_edges_us,
        )


@dataclass(frozen=True, eq=False)
class ExperimentRecord:
    """One pulse and its tomography samples.

    Either Bloch expectations (qubits) or raw density matrices are kept
    as recorded; states are rebuilt from them and spectrally filtered.
    """

    experiment_id: str
    pulse: PulseRecord
    times: FloatArray
    initial_state: ComplexArray
    expectations: FloatArray | None = None
    raw_states: ComplexArray | None = None
    shots: int | None = None
    validation: bool = False

    def __post_init__(self) -> None:
        if (self.expectations is None) == (self.raw_states is None):
            raise DatasetValidationError(
                f"Experiment {self.experiment_id!r} needs either expectations "
                "or density matrices"
            )

        if len(self.times) == 0 or np.any(np.diff(self.times) <= 0.0):
            raise DatasetValidationError(
                f"Experiment {self.experiment_id!r} sample times must be "
                "non-empty and strictly increasing"
            )

        if abs(self.times[0]) > 1e-12:
            raise DatasetValidationError(
                f"Experiment {self.experiment_id!r} must be sampled from t = 0, "
                f"first sample at {self.times[0]}"
            )

        if self.expectations is not None and np.any(np.abs(self.expectations) > 1.0):
            raise DatasetValidationError(
                f"Experiment {self.experiment_id!r} has expectations outside [-1, 1]"
            )

        n_samples = len(
            self.expectations if self.expectations is not None else self.raw_states
        )
        if n_samples != len(self.times):
            raise DatasetValidationError(
                f"Experiment {self.experiment_id!r} has {len(self.times)} times "
                f"and {n_samples} samples"
            )

    @property
    def dim(self) -> int:
        return int(self.initial_state.shape[-1])

    @property
    def end_time(self) -> float:
        return float(self.times[-1])

    @cached_property
    def states(self) -> ComplexArray:
        if self.expectations is not None:
            raw = linear_inversion(self.expectations)
        else:
            assert self.raw_states is not None
            raw = self.raw_states

        states = spectral_filter(raw)
        states.flags.writeable = False
        return states


@dataclass(frozen=True, eq=False)
class Dataset:
    system: SystemConfig
    experiments: tuple[ExperimentRecord, ...]
    t_train: float
    drive_convention: DriveConvention = DriveConvention.ANGULAR
    description: str = ""

    def __post_init__(self) -> None:
        if not self.experiments:
            raise DatasetValidationError("Dataset has no experiments")

        for experiment in self.experiments:
            if experiment.dim != self.system.dim:
                raise DatasetValidationError(
                    f"Experiment {experiment.experiment_id!r} has dim "
                    f"{experiment.dim}, system has {self.system.dim}"
                )

        if not self.t_train > 0.0:
            raise DatasetValidationError(
                f"Training horizon must be positive, got {self.t_train}"
            )

        if self.t_train > self.horizon:
            raise HorizonError(
                f"Training horizon {self.t_train} us exceeds the shortest "
                f"experiment ({self.horizon} us)"
            )

    @property
    def horizon(self) -> float:
        return min(experiment.end_time for experiment in self.experiments)

    @property
    def training_experiments(self) -> tuple[ExperimentRecord, ...]:
        return tuple(x for x in self.experiments if not x.validation)

    @property
    def validation_experiments(self) -> tuple[ExperimentRecord, ...]:
        return tuple(x for x in self.experiments if x.validation)

    def pulses(
        self,
        experiments: Sequence[ExperimentRecord] | None = None,
    ) -> list[ControlPulse]:
        selected = self.experiments if experiments is None else experiments
        return [x.pulse.control_pulse(self.drive_convention) for x in selected]

    def with_t_train(self, t_train: float) -> Dataset:
        return Dataset(
            system=self.system,
            experiments=self.experiments,
            t_train=t_train,
            drive_convention=self.drive_convention,
            description=self.description,
        )

    def subset(self, experiment_ids: Sequence[str]) -> Dataset:
        wanted = set(experiment_ids)
        return Dataset(
            system=self.system,
            experiments=tuple(
                x for x in self.experiments if x.experiment_id in wanted
            ),
            t_train=self.t_train,
            drive_convention=self.drive_convention,
            description=self.description,
        )


# endregion Records

# region Synthetic data


@dataclass(frozen=True)
class SyntheticProtocol:
    n_experiments: int = field(
        default=8,
        metadata=SettingFieldMetadata(
            pretty_name="Experiments",
            description="Number of pulses to simulate.",
        ),
    )
    p_max_mhz: float = field(
        default=3.47,
        metadata=SettingFieldMetadata(
            pretty_name="Maximum amplitude",
            description="Pulse amplitudes are drawn uniformly below this (MHz).",
        ),
    )
    duration_us: float = field(
        default=50.0,
        metadata=SettingFieldMetadata(
            pretty_name="Duration",
            description="Pulse and measurement window in microseconds.",
        ),
    )
    sample_dt_us: float = field(
        default=0.004,
        metadata=SettingFieldMetadata(
            pretty_name="Sampling interval",
            description="Time between tomography samples in microseconds.",
        ),
    )
    shots: int | None = field(
        default=None,
        metadata=SettingFieldMetadata(
            pretty_name="Shots",
            description="Measurements per Pauli axis; unset for exact states.",
        ),
    )
    seed: int = field(
        default=0,
        metadata=SettingFieldMetadata(
            pretty_name="Seed",
            description="Seed of amplitudes and shot noise.",
        ),
    )
    integration_dt_us: float | None = field(
        default=None,
        metadata=SettingFieldMetadata(
            pretty_name="Integration step",
            description="RK4 step; defaults to the sampling interval.",
        ),
    )
    t_train_us: float | None = field(
        default=None,
        metadata=SettingFieldMetadata(
            pretty_name="Training horizon",
            description="Defaults to half the duration.",
        ),
    )
    n_validation: int = field(
        default=0,
        metadata=SettingFieldMetadata(
            pretty_name="Validation experiments",
            description="Trailing experiments flagged for validation only.",
        ),
    )
    drive_convention: DriveConvention = field(
        default=DriveConvention.ANGULAR,
        metadata=SettingFieldMetadata(
            pretty_name="Drive convention",
            description="Whether MHz amplitudes are cyclic or angular.",
        ),
    )

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "drive_convention", DriveConvention(self.drive_convention)
        )
        if self.n_experiments < 1:
            raise InvalidConfigError("Protocol needs at least one experiment")

        if not 0 <= self.n_validation < self.n_experiments:
            raise InvalidConfigError(
                "Validation experiments must leave at least one for training"
            )

        if not (self.p_max_mhz > 0.0 and self.duration_us > 0.0):
            raise InvalidConfigError("Amplitude bound and duration must be positive")

        if not 0.0 < self.sample_dt_us <= self.duration_us:
            raise InvalidConfigError(
                "Sampling interval must be positive and within the duration"
            )

        if self.shots is not None and self.shots < 1:
            raise InvalidConfigError(f"Shots must be positive, got {self.shots}")

    @property
    def sample_times(self) -> FloatArray:
        count = int(np.floor(self.duration_us / self.sample_dt_us + 1e-9))
        return self.sample_dt_us * np.arange(count + 1)

    @property
    def t_train(self) -> float:
        if self.t_train_us is not None:
            return self.t_train_us
        return float(self.sample_times[len(self.sample_times) // 2])


def sample_expectations(
    exact: ArrayLike,
    shots: int,
    rng: np.random.Generator,
) -> FloatArray:
    """Expectation estimates from shots projective measurements per axis."""
    probabilities = np.clip((1.0 + np.asarray(exact)) / 2.0, 0.0, 1.0)
    counts = rng.binomial(shots, probabilities)
    return 2.0 * counts / shots - 1.0


def generate_synthetic(
    truth: CoefficientModel,
    cfg: SystemConfig,
    protocol: SyntheticProtocol,
    threads: int = 1,
) -> Dataset:
    if protocol.shots is not None and cfg.dim != 2:
        raise InvalidConfigError("Shot noise is simulated for qubits only")

    rng = np.random.default_rng(protocol.seed)
    amplitudes = rng.uniform(0.0, protocol.p_max_mhz, size=protocol.n_experiments)
    records = [
        PulseRecord(
            amplitude_mhz=(float(amplitude),),
            q_amplitude_mhz=(0.0,),
            duration_us=protocol.duration_us,
            rot_frequency_ghz=cfg.omega,
        )
        for amplitude in amplitudes
    ]
    grid = TimeGrid.for_samples(protocol.sample_times, protocol.integration_dt_us)
    ground = basis_state(cfg.dim, 0)

    def simulate(chunk: Sequence[PulseRecord]) -> list[ComplexArray]:
        pulses = [x.control_pulse(protocol.drive_convention) for x in chunk]
        trajectories = propagate_batch(truth, pulses, cfg, [ground] * len(chunk), grid)
        return [trajectory.states for trajectory in trajectories]

    LOGGER.info(
        "Simulating %d experiments over %d steps",
        protocol.n_experiments,
        grid.n_steps,
    )
    all_states = chunked_map(simulate, records, threads)

    experiments = []
    first_validation = protocol.n_experiments - protocol.n_validation
    for index, (record, states) in enumerate(zip(records, all_states)):
        expectations = None
        raw_states = None
        if cfg.dim == 2:
            exact = np.clip(bloch_decompose(states), -1.0, 1.0)
            expectations = (
                sample_expectations(exact, protocol.shots, rng)
                if protocol.shots is not None
                else exact
            )
        else:
            raw_states = np.array(states)

        experiments.append(
            ExperimentRecord(
                experiment_id=f"exp-{index:03d}",
                pulse=record,
                times=grid.sample_times,
                initial_state=ground,
                expectations=expectations,
                raw_states=raw_states,
                shots=protocol.shots,
                validation=index >= first_validation,
            )
        )

    return Dataset(
        system=cfg,
        experiments=tuple(experiments),
        t_train=protocol.t_train,
        drive_convention=protocol.drive_convention,
        description=f"synthetic from {truth.name} model, seed {protocol.seed}",
    )


# endregion Synthetic data

# region Documents

_MISSING = object()


class _TableReader:
    """Typed access to a TOML table, naming fields by dotted path."""

    def __init__(self, table: Any, path: str):
        if not isinstance(table, dict):
            raise DatasetValidationError(f"{path or 'document'} must be a table")

        self.table: dict[str, Any] = table
        self.path = path
        self.seen: set[str] = set()

    def field_path(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def get(self, key: str, default: Any = _MISSING) -> Any:
        self.seen.add(key)
        try:
            return self.table[key]
        except KeyError:
            if default is _MISSING:
                raise DatasetValidationError(
                    f"Missing required field {self.field_path(key)}"
                ) from None
            return default

    def number(self, key: str, default: Any = _MISSING) -> float:
        value = self.get(key, default)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise DatasetValidationError(f"{self.field_path(key)} must be a number")
        return float(value)

    def integer(self, key: str, default: Any = _MISSING) -> Any:
        value = self.get(key, default)
        if value is None:
            return None
        if isinstance(value, bool) or not isinstance(value, int):
            raise DatasetValidationError(f"{self.field_path(key)} must be an integer")
        return value

    def boolean(self, key: str, default: Any = _MISSING) -> bool:
        value = self.get(key, default)
        if not isinstance(value, bool):
            raise DatasetValidationError(f"{self.field_path(key)} must be a boolean")
        return value

    def string(self, key: str, default: Any = _MISSING) -> str:
        value = self.get(key, default)
        if not isinstance(value, str):
            raise DatasetValidationError(f"{self.field_path(key)} must be a string")
        return value

    def array(self, key: str, shape_tail: tuple[int, ...] = ()) -> FloatArray:
        value = self.get(key)
        try:
            array = np.array(value, dtype=np.float64)
        except (TypeError, ValueError):
            raise DatasetValidationError(
                f"{self.field_path(key)} must be a numeric array"
            ) from None

        if (
            array.ndim != 1 + len(shape_tail)
            or array.shape[1:] != shape_tail
            or not np.all(np.isfinite(array))
        ):
            raise DatasetValidationError(
                f"{self.field_path(key)} must be a finite array of rows "
                f"shaped {shape_tail}"
            )
        return array

    def levels(self, key: str) -> tuple[float, ...]:
        value = self.get(key)
        values = value if isinstance(value, list) else [value]
        if not values or any(
            isinstance(x, bool) or not isinstance(x, (int, float)) for x in values
        ):
            raise DatasetValidationError(
                f"{self.field_path(key)} must be a number or a list of numbers"
            )
        return tuple(float(x) for x in values)

    def table_reader(self, key: str) -> _TableReader:
        return _TableReader(self.get(key), self.field_path(key))

    def finish(self) -> None:
        if unknown := sorted(set(self.table) - self.seen):
            raise DatasetValidationError(
                "Unknown fields: "
                + ", ".join(self.field_path(key) for key in unknown)
            )


def read_document(path: Path | str, kind: str | tuple[str, ...]) -> Document:
    """Load a versioned TOML document and check its header."""
    kinds = (kind,) if isinstance(kind, str) else kind
    try:
        with open(path, mode="rb") as f:
            document = toml_load(f)
    except TOMLDecodeError as e:
        raise DatasetParseError(f"{path}: {e}") from e
    except OSError as e:
        raise DatasetParseError(f"Cannot read {path}: {e.strerror}") from e

    header = _TableReader(document.get("tclfit"), "tclfit")
    version = header.integer("schema_version")
    if version != SCHEMA_VERSION:
        raise DatasetVersionError(
            f"{path} has schema version {version}, "
            f"this version reads {SCHEMA_VERSION}"
        )

    document_kind = header.string("kind")
    if document_kind not in kinds:
        raise DatasetValidationError(
            f"{path} holds a {document_kind!r} document, "
            f"expected {' or '.join(kinds)}"
        )
    header.finish()

    return document


def write_document(document: Document, path: Path | str) -> None:
    with open(path, mode="wb") as f:
        toml_dump(document, f)


def _matrix_rows(states: ComplexArray) -> tuple[list[list[float]], list[list[float]]]:
    flat = states.reshape(len(states), -1)
    return flat.real.tolist(), flat.imag.tolist()


def dataset_to_document(dataset: Dataset) -> Document:
    experiments: list[Document] = []
    for record in dataset.experiments:
        pulse: Document = {
            "amplitude_mhz": _levels_value(record.pulse.amplitude_mhz),
            "q_amplitude_mhz": _levels_value(record.pulse.q_amplitude_mhz),
            "duration_us": record.pulse.duration_us,
            "rot_frequency_ghz": record.pulse.rot_frequency_ghz,
        }
        if record.pulse.segment_edges_us is not None:
            pulse["segment_edges_us"] = list(record.pulse.segment_edges_us)

        samples: Document = {"t_us": record.times.tolist()}
        if record.expectations is not None:
            samples["expectations"] = record.expectations.tolist()
        else:
            assert record.raw_states is not None
            samples["rho_real"], samples["rho_imag"] = _matrix_rows(record.raw_states)

        initial_real, initial_imag = _matrix_rows(record.initial_state[np.newaxis])
        experiment: Document = {
            "id": record.experiment_id,
            "validation": record.validation,
        }
        if record.shots is not None:
            experiment["shots"] = record.shots
        experiment["pulse"] = pulse
        experiment["initial_state"] = {
            "rho_real": initial_real[0],
            "rho_imag": initial_imag[0],
        }
        experiment["samples"] = samples
        experiments.append(experiment)

    return {
        "tclfit": {"schema_version": SCHEMA_VERSION, "kind": "dataset"},
        "system": {
            "dim": dataset.system.dim,
            "omega_ghz": dataset.system.omega,
            "t1_us": dataset.system.t1,
            "t2_us": dataset.system.t2,
            "basis": str(dataset.system.basis_kind),
        },
        "dataset": {
            "t_train_us": dataset.t_train,
            "drive_convention": str(dataset.drive_convention),
            "description": dataset.description,
        },
        "experiments": experiments,
    }


def _levels_value(levels: tuple[float, ...]) -> float | list[float]:
    return levels[0] if len(levels) == 1 else list(levels)


def _read_matrices(reader: _TableReader, dim: int) -> ComplexArray:
    real = reader.array("rho_real", (dim * dim,))
    imag = reader.array("rho_imag", (dim * dim,))
    if real.shape != imag.shape:
        raise DatasetValidationError(
            f"{reader.field_path('rho_real')} and rho_imag differ in length"
        )
    return (real + 1j * imag).reshape(-1, dim, dim)


def _read_experiment(reader: _TableReader, dim: int) -> ExperimentRecord:
    experiment_id = reader.string("id")
    validation = reader.boolean("validation", False)
    shots = reader.integer("shots", None)

    pulse_reader = reader.table_reader("pulse")
    edges = pulse_reader.get("segment_edges_us", None)
    pulse = PulseRecord(
        amplitude_mhz=pulse_reader.levels("amplitude_mhz"),
        q_amplitude_mhz=(
            pulse_reader.levels("q_amplitude_mhz")
            if "q_amplitude_mhz" in pulse_reader.table
            else (0.0,)
        ),
        duration_us=pulse_reader.number("duration_us"),
        rot_frequency_ghz=pulse_reader.number("rot_frequency_ghz"),
        segment_edges_us=(
            tuple(float(x) for x in pulse_reader.array("segment_edges_us"))
            if edges is not None
            else None
        ),
    )
    pulse_reader.finish()
    if len(pulse.q_amplitude_mhz) != len(pulse.amplitude_mhz):
        q_levels = pulse.q_amplitude_mhz * len(pulse.amplitude_mhz)
        if len(pulse.q_amplitude_mhz) != 1:
            raise DatasetValidationError(
                f"{pulse_reader.path}.q_amplitude_mhz must match amplitude_mhz"
            )
        pulse = PulseRecord(
            amplitude_mhz=pulse.amplitude_mhz,
            q_amplitude_mhz=q_levels,
            duration_us=pulse.duration_us,
            rot_frequency_ghz=pulse.rot_frequency_ghz,
            segment_edges_us=pulse.segment_edges_us,
        )

    try:
        pulse.control_pulse(DriveConvention.ANGULAR)
    except InvalidConfigError as e:
        raise DatasetValidationError(f"{pulse_reader.path}: {e}") from e

    if "initial_state" in reader.table:
        initial_reader = reader.table_reader("initial_state")
        real = initial_reader.array("rho_real")
        imag = initial_reader.array("rho_imag")
        initial_reader.finish()
        if real.shape != (dim * dim,) or imag.shape != (dim * dim,):
            raise DatasetValidationError(
                f"{initial_reader.path} needs {dim * dim} entries per part"
            )
        initial_state = spectral_filter((real + 1j * imag).reshape(dim, dim))
    else:
        initial_state = basis_state(dim, 0)

    samples_reader = reader.table_reader("samples")
    times = samples_reader.array("t_us")
    expectations = None
    raw_states = None
    if "expectations" in samples_reader.table:
        if dim != 2:
            raise DatasetValidationError(
                f"{samples_reader.path}.expectations need a qubit system"
            )
        expectations = samples_reader.array("expectations", (3,))
        if np.any(np.abs(expectations) > 1.0):
            raise DatasetValidationError(
                f"{samples_reader.path}.expectations must lie in [-1, 1]"
            )
    else:
        raw_states = _read_matrices(samples_reader, dim)
    samples_reader.finish()
    reader.finish()

    return ExperimentRecord(
        experiment_id=experiment_id,
        pulse=pulse,
        times=times,
        initial_state=initial_state,
        expectations=expectations,
        raw_states=raw_states,
        shots=shots,
        validation=validation,
    )


def dataset_from_document(document: Document) -> Dataset:
    root = _TableReader(document, "")
    root.get("tclfit")

    system_reader = root.table_reader("system")
    try:
        system = SystemConfig(
            dim=system_reader.integer("dim"),
            omega=system_reader.number("omega_ghz"),
            t1=system_reader.number("t1_us"),
            t2=system_reader.number("t2_us"),
            basis_kind=BasisKind(
                system_reader.string(
                    "basis", str(BasisKind.UPPER_TRIANGULAR_GELL_MANN)
                )
            ),
        )
    except (InvalidConfigError, ValueError) as e:
        raise DatasetValidationError(f"system: {e}") from e
    system_reader.finish()

    dataset_reader = root.table_reader("dataset")
    t_train = dataset_reader.number("t_train_us")
    try:
        convention = DriveConvention(
            dataset_reader.string("drive_convention", str(DriveConvention.ANGULAR))
        )
    except ValueError as e:
        raise DatasetValidationError(f"dataset.drive_convention: {e}") from e
    description = dataset_reader.string("description", "")
    dataset_reader.finish()

    raw_experiments = root.get("experiments")
    if not isinstance(raw_experiments, list):
        raise DatasetValidationError("experiments must be an array of tables")

    experiments = []
    for index, table in enumerate(raw_experiments):
        reader = _TableReader(table, f"experiments[{index}]")
        try:
            experiments.append(_read_experiment(reader, system.dim))
        except DatasetValidationError:
            raise
        except TclfitDataError as e:
            raise DatasetValidationError(f"experiments[{index}]: {e}") from e
    root.finish()

    return Dataset(
        system=system,
        experiments=tuple(experiments),
        t_train=t_train,
        drive_convention=convention,
        description=description,
    )


def load_dataset(path: Path | str) -> Dataset:
    return dataset_from_document(read_document(path, "dataset"))


def save_dataset(dataset: Dataset, path: Path | str) -> None:
    write_document(dataset_to_document(dataset), path)


# endregion Documents
