# SPDX-License-Identifier: GPL-3.0-or-later
# SPDX-FileCopyrightText: 2026 tclfit contributors
from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields, is_dataclass, make_dataclass
from math import pi, sqrt
from typing import TYPE_CHECKING

import numpy as np

from .exceptions import (
    DimensionError,
    InvalidConfigError,
    ParameterLengthError,
    TclfitUsageError,
)
from .generator import CoefficientVector, GeneratorForm, GeneratorMode
from .karhunen_loeve import KernelKind, KLConfig, scaled_eigenfunctions
from .operators import BasisKind, make_basis, state_coordinates
from .tclfit_utils import SCHEMA_VERSION, SettingFieldMetadata

if TYPE_CHECKING:
    from collections.abc import Iterator
    from dataclasses import Field
    from typing import Any, ClassVar, Type

    from _typeshed import DataclassInstance
    from numpy.typing import ArrayLike, NDArray

    FloatArray = NDArray[np.float64]
    ModelDocument = dict[str, Any]


MODEL_UNITS = "time=us rates=1/us frequencies=rad/us"


def _read_only(array: FloatArray) -> FloatArray:
    array.flags.writeable = False
    return array


def _feature_jacobian(features: FloatArray, n_outputs: int) -> FloatArray:
    """d theta_p / d P_qk = delta_pq F_k for theta = F @ P.T, P row-major."""
    n_times, n_features = features.shape
    return np.einsum("pq,tk->tpqk", np.eye(n_outputs), features).reshape(
        n_times, n_outputs, n_outputs * n_features
    )


# region Base


class CoefficientModel:
    """Map from time (and optionally the state) to coefficient vectors.

    Parameters are one flat real vector. Outputs have the width of the
    generator form's coefficient vectors for every input.
    """

    Settings: Type[DataclassInstance] = make_dataclass(
        "EmptySettings", (), frozen=True
    )

    name: ClassVar[str]
    pretty_name: ClassVar[str]
    description: ClassVar[str]
    supports_state: ClassVar[bool] = False

    def __init__(
        self,
        form: GeneratorForm,
        settings: Any = None,
        params: ArrayLike | None = None,
    ):
        self.form = form
        self.settings = settings if settings is not None else self.Settings()
        self.check_settings()

        if params is None:
            values = np.zeros(self.parameter_count)
        else:
            values = np.array(params, dtype=np.float64)

        if values.shape != (self.parameter_count,):
            raise ParameterLengthError(
                f"{self.pretty_name} model needs {self.parameter_count} "
                f"parameters, got shape {values.shape}"
            )

        self.params = _read_only(values)

    @classmethod
    def has_settings(cls) -> bool:
        return bool(fields(cls.Settings)) if is_dataclass(cls.Settings) else False

    @classmethod
    def iter_settings_fields(cls) -> Iterator[Field[Any]]:
        try:
            yield from fields(cls.Settings)
        except TypeError:
            yield from ()

    @classmethod
    def create(
        cls,
        form: GeneratorForm,
        settings: Any = None,
        initial: ArrayLike | None = None,
    ) -> CoefficientModel:
        """Model started at the coefficient vector initial; networks ignore it."""
        model = cls(form, settings)
        if initial is None:
            start = np.zeros(form.theta_dim)
        else:
            start = np.asarray(initial, dtype=np.float64)
            if start.shape != (form.theta_dim,):
                raise ParameterLengthError(
                    f"Initial coefficients need {form.theta_dim} entries, "
                    f"got shape {start.shape}"
                )

        return model.with_params(model.initial_params(start))

    def check_settings(self) -> None: ...

    def initial_params(self, start: FloatArray) -> FloatArray:
        raise NotImplementedError

    @property
    def state_dependent(self) -> bool:
        return bool(getattr(self.settings, "state_dependent", False))

    @property
    def master_equation(self) -> str:
        return "Nonlinear TCL" if self.state_dependent else "Linear TCL"

    @property
    def output_dim(self) -> int:
        return self.form.theta_dim

    @property
    def state_width(self) -> int:
        dim = self.form.basis.dim
        return dim * dim

    @property
    def parameter_count(self) -> int:
        return sum(int(np.prod(shape)) for shape in self.parameter_shapes().values())

    def parameter_shapes(self) -> dict[str, tuple[int, ...]]:
        raise NotImplementedError

    def with_params(self, params: ArrayLike) -> CoefficientModel:
        return type(self)(self.form, self.settings, params)

    # region Packing

    def unpack(self, params: ArrayLike | None = None) -> dict[str, FloatArray]:
        values = self.params if params is None else np.asarray(params, dtype=float)
        if values.shape != (self.parameter_count,):
            raise ParameterLengthError(
                f"Cannot unpack {values.shape} into {self.parameter_count} parameters"
            )

        blocks: dict[str, FloatArray] = {}
        offset = 0
        for key, shape in self.parameter_shapes().items():
            size = int(np.prod(shape))
            blocks[key] = values[offset : offset + size].reshape(shape)
            offset += size

        return blocks

    def pack(self, blocks: dict[str, ArrayLike]) -> FloatArray:
        shapes = self.parameter_shapes()
        if set(blocks) != set(shapes):
            raise ParameterLengthError(
                f"Expected parameter blocks {sorted(shapes)}, got {sorted(blocks)}"
            )

        flat = []
        for key, shape in shapes.items():
            block = np.asarray(blocks[key], dtype=np.float64)
            if block.shape != shape:
                raise ParameterLengthError(
                    f"Block {key!r} needs shape {shape}, got {block.shape}"
                )
            flat.append(block.reshape(-1))

        return np.concatenate(flat) if flat else np.zeros(0)

    # endregion Packing

    # region Evaluation

    def _state_inputs(self, n_times: int, inputs: ArrayLike | None) -> FloatArray:
        if inputs is None:
            raise DimensionError(f"{self.pretty_name} model needs state inputs")

        array = np.asarray(inputs, dtype=np.float64)
        if array.shape != (n_times, self.state_width):
            raise DimensionError(
                f"Expected state inputs of shape {(n_times, self.state_width)}, "
                f"got {array.shape}"
            )
        return array

    def coefficients(
        self,
        times: ArrayLike,
        inputs: ArrayLike | None = None,
    ) -> FloatArray:
        """Coefficient vectors with shape (len(times), output_dim).

        inputs holds state_coordinates of the state at every instant and
        is only read by state-dependent models.
        """
        raise NotImplementedError

    def parameter_jacobian(
        self,
        times: ArrayLike,
        inputs: ArrayLike | None = None,
    ) -> FloatArray:
        """Shape (len(times), output_dim, parameter_count)."""
        raise NotImplementedError

    def input_jacobian(
        self,
        times: ArrayLike,
        inputs: ArrayLike | None = None,
    ) -> FloatArray:
        """Shape (len(times), output_dim, state_width); zero unless
        the model reads the state."""
        n_times = len(np.atleast_1d(times))
        return np.zeros((n_times, self.output_dim, self.state_width))

    def evaluate(self, t: float, state: ArrayLike | None = None) -> CoefficientVector:
        inputs = None
        if self.state_dependent:
            if state is None:
                raise DimensionError(f"{self.pretty_name} model needs a state")
            inputs = state_coordinates(state)[np.newaxis]

        return CoefficientVector.from_flat(
            self.coefficients([t], inputs)[0],
            self.form.n_operators,
            self.form.mode,
        )

    # endregion Evaluation

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}(basis={self.form.basis.kind}, "
            f"mode={self.form.mode}, parameters={self.parameter_count})"
        )


# endregion Base

# region Variants


class ConstantModel(CoefficientModel):
    name = "constant"
    pretty_name = "Lindblad"
    description = "Time-independent coefficients, the Markovian Lindblad equation."

    @property
    def master_equation(self) -> str:
        return "Lindblad"

    def parameter_shapes(self) -> dict[str, tuple[int, ...]]:
        return {"theta": (self.output_dim,)}

    def initial_params(self, start: FloatArray) -> FloatArray:
        return start.copy()

    def coefficients(
        self,
        times: ArrayLike,
        inputs: ArrayLike | None = None,
    ) -> FloatArray:
        n_times = len(np.atleast_1d(times))
        return np.broadcast_to(self.params, (n_times, self.output_dim)).copy()

    def parameter_jacobian(
        self,
        times: ArrayLike,
        inputs: ArrayLike | None = None,
    ) -> FloatArray:
        n_times = len(np.atleast_1d(times))
        return np.broadcast_to(
            np.eye(self.output_dim), (n_times, self.output_dim, self.output_dim)
        ).copy()


class _TimeFeatureMixin(CoefficientModel):
    """Models reading x = [state coordinates; t / time_scale]."""

    supports_state = True

    @property
    def input_width(self) -> int:
        return (self.state_width if self.state_dependent else 0) + 1

    def check_settings(self) -> None:
        if not self.settings.time_scale > 0.0:
            raise InvalidConfigError(
                f"Time scale must be positive, got {self.settings.time_scale}"
            )

    def design(self, times: ArrayLike, inputs: ArrayLike | None) -> FloatArray:
        instants = np.atleast_1d(np.asarray(times, dtype=np.float64))
        scaled = (instants / self.settings.time_scale)[:, np.newaxis]
        if not self.state_dependent:
            return scaled

        return np.hstack([self._state_inputs(len(instants), inputs), scaled])


class AffineModel(_TimeFeatureMixin):
    name = "affine"
    pretty_name = "Affine"
    description = "theta = W x + b with x the (optional) state and time."

    @dataclass(frozen=True)
    class Settings:
        state_dependent: bool = field(
            default=False,
            metadata=SettingFieldMetadata(
                pretty_name="State dependent",
                description="Feed the state coordinates into the model.",
            ),
        )
        time_scale: float = field(
            default=1.0,
            metadata=SettingFieldMetadata(
                pretty_name="Time scale",
                description="Time in microseconds mapped to unit input.",
            ),
        )

    def parameter_shapes(self) -> dict[str, tuple[int, ...]]:
        return {
            "weights": (self.output_dim, self.input_width),
            "bias": (self.output_dim,),
        }

    def initial_params(self, start: FloatArray) -> FloatArray:
        return self.pack(
            {
                "weights": np.zeros((self.output_dim, self.input_width)),
                "bias": start,
            }
        )

    def coefficients(
        self,
        times: ArrayLike,
        inputs: ArrayLike | None = None,
    ) -> FloatArray:
        blocks = self.unpack()
        return self.design(times, inputs) @ blocks["weights"].T + blocks["bias"]

    def parameter_jacobian(
        self,
        times: ArrayLike,
        inputs: ArrayLike | None = None,
    ) -> FloatArray:
        features = self.design(times, inputs)
        weights_part = _feature_jacobian(features, self.output_dim)
        bias_part = np.broadcast_to(
            np.eye(self.output_dim),
            (len(features), self.output_dim, self.output_dim),
        )
        return np.concatenate([weights_part, bias_part], axis=-1)

    def input_jacobian(
        self,
        times: ArrayLike,
        inputs: ArrayLike | None = None,
    ) -> FloatArray:
        if not self.state_dependent:
            return super().input_jacobian(times, inputs)

        n_times = len(np.atleast_1d(times))
        weights = self.unpack()["weights"][:, : self.state_width]
        return np.broadcast_to(weights, (n_times,) + weights.shape).copy()


class Activation:
    TANH = "tanh"
    IDENTITY = "identity"

    ALL = (TANH, IDENTITY)


class MLPModel(_TimeFeatureMixin):
    name = "mlp"
    pretty_name = "Neural Network"
    description = "Feed-forward network with tanh hidden layers."

    @dataclass(frozen=True)
    class Settings:
        state_dependent: bool = field(
            default=False,
            metadata=SettingFieldMetadata(
                pretty_name="State dependent",
                description="Feed the state coordinates into the network.",
            ),
        )
        hidden_widths: tuple[int, ...] = field(
            default=(16,),
            metadata=SettingFieldMetadata(
                pretty_name="Hidden widths",
                description="Width of every hidden layer.",
            ),
        )
        activation: str = field(
            default=Activation.TANH,
            metadata=SettingFieldMetadata(
                pretty_name="Activation",
                description="Hidden layer activation: tanh or identity.",
            ),
        )
        time_scale: float = field(
            default=1.0,
            metadata=SettingFieldMetadata(
                pretty_name="Time scale",
                description="Time in microseconds mapped to unit input.",
            ),
        )
        seed: int = field(
            default=0,
            metadata=SettingFieldMetadata(
                pretty_name="Seed",
                description="Seed of the weight initialization.",
            ),
        )

    @classmethod
    def from_layer_widths(
        cls,
        form: GeneratorForm,
        layer_widths: list[int] | tuple[int, ...],
        **settings: Any,
    ) -> MLPModel:
        """Network with explicit input, hidden and output widths."""
        widths = tuple(int(width) for width in layer_widths)
        if len(widths) < 2:
            raise DimensionError("A network needs at least input and output widths")

        model = cls(form, cls.Settings(hidden_widths=widths[1:-1], **settings))
        if widths[0] != model.input_width or widths[-1] != model.output_dim:
            raise DimensionError(
                f"Layer widths {widths} do not match input width "
                f"{model.input_width} and output width {model.output_dim}"
            )
        return model

    def check_settings(self) -> None:
        super().check_settings()
        if any(width <= 0 for width in self.settings.hidden_widths):
            raise InvalidConfigError(
                f"Hidden widths must be positive, got {self.settings.hidden_widths}"
            )

        if self.settings.activation not in Activation.ALL:
            raise InvalidConfigError(
                f"Unknown activation {self.settings.activation!r}, "
                f"expected one of {', '.join(Activation.ALL)}"
            )

    @property
    def layer_widths(self) -> tuple[int, ...]:
        return (self.input_width, *self.settings.hidden_widths, self.output_dim)

    def parameter_shapes(self) -> dict[str, tuple[int, ...]]:
        widths = self.layer_widths
        shapes: dict[str, tuple[int, ...]] = {}
        for index, (fan_in, fan_out) in enumerate(zip(widths, widths[1:])):
            shapes[f"layer{index}.weights"] = (fan_out, fan_in)
            shapes[f"layer{index}.bias"] = (fan_out,)
        return shapes

    def initial_params(self, start: FloatArray) -> FloatArray:
        # Weights uniform in +-1/sqrt(fan_in), every bias zero, start unused
        rng = np.random.default_rng(self.settings.seed)
        blocks: dict[str, ArrayLike] = {}
        for key, shape in self.parameter_shapes().items():
            if key.endswith(".weights"):
                bound = 1 / sqrt(shape[1])
                blocks[key] = rng.uniform(-bound, bound, size=shape)
            else:
                blocks[key] = np.zeros(shape)
        return self.pack(blocks)

    def _layers(self) -> list[tuple[FloatArray, FloatArray]]:
        blocks = self.unpack()
        return [
            (blocks[f"layer{index}.weights"], blocks[f"layer{index}.bias"])
            for index in range(len(self.layer_widths) - 1)
        ]

    def _activate(self, values: FloatArray) -> tuple[FloatArray, FloatArray]:
        if self.settings.activation == Activation.TANH:
            activated = np.tanh(values)
            return activated, 1.0 - activated**2

        return values, np.ones_like(values)

    def _forward(
        self,
        times: ArrayLike,
        inputs: ArrayLike | None,
    ) -> tuple[list[FloatArray], list[FloatArray], FloatArray]:
        """Layer inputs, activation slopes and the output."""
        hidden = self.design(times, inputs)
        layer_inputs: list[FloatArray] = []
        slopes: list[FloatArray] = []
        layers = self._layers()
        for index, (weights, bias) in enumerate(layers):
            layer_inputs.append(hidden)
            hidden = hidden @ weights.T + bias
            if index < len(layers) - 1:
                hidden, slope = self._activate(hidden)
                slopes.append(slope)

        return layer_inputs, slopes, hidden

    def _backward(
        self,
        times: ArrayLike,
        inputs: ArrayLike | None,
    ) -> tuple[FloatArray, FloatArray]:
        layer_inputs, slopes, output = self._forward(times, inputs)
        layers = self._layers()
        n_times = output.shape[0]

        # d output / d (pre-activation of the current layer)
        upstream = np.broadcast_to(
            np.eye(self.output_dim), (n_times, self.output_dim, self.output_dim)
        )
        parts: list[FloatArray] = []
        for index in reversed(range(len(layers))):
            weights, _ = layers[index]
            weight_part = np.einsum("tpi,tj->tpij", upstream, layer_inputs[index])
            parts.append(upstream)
            parts.append(weight_part.reshape(n_times, self.output_dim, -1))
            upstream = upstream @ weights
            if index > 0:
                upstream = upstream * slopes[index - 1][:, np.newaxis, :]

        return np.concatenate(parts[::-1], axis=-1), upstream

    def coefficients(
        self,
        times: ArrayLike,
        inputs: ArrayLike | None = None,
    ) -> FloatArray:
        return self._forward(times, inputs)[2]

    def parameter_jacobian(
        self,
        times: ArrayLike,
        inputs: ArrayLike | None = None,
    ) -> FloatArray:
        return self._backward(times, inputs)[0]

    def input_jacobian(
        self,
        times: ArrayLike,
        inputs: ArrayLike | None = None,
    ) -> FloatArray:
        if not self.state_dependent:
            return super().input_jacobian(times, inputs)

        return self._backward(times, inputs)[1][..., : self.state_width]


MLPConfig = MLPModel.Settings


class KLModel(CoefficientModel):
    """Every coefficient is a mean plus a truncated KL expansion.

    Mode amplitudes are scaled by sqrt(lambda_i), so unit parameters are
    one standard deviation of the prior process.
    """

    kernel: ClassVar[KernelKind]

    @dataclass(frozen=True)
    class Settings:
        sigma: float = field(
            default=1.0,
            metadata=SettingFieldMetadata(
                pretty_name="Sigma",
                description=(
                    "Kernel amplitude (exponential) or width of the "
                    "weighting measure (squared exponential)."
                ),
            ),
        )
        kappa: float = field(
            default=1.0,
            metadata=SettingFieldMetadata(
                pretty_name="Kappa",
                description="Correlation length in units of the training window.",
            ),
        )
        order: int = field(
            default=4,
            metadata=SettingFieldMetadata(
                pretty_name="Order",
                description="Number of expansion terms per coefficient.",
            ),
        )
        t_train: float = field(
            default=1.0,
            metadata=SettingFieldMetadata(
                pretty_name="Training window",
                description="Microseconds mapped to normalized time 1.",
            ),
        )

    def check_settings(self) -> None:
        self.kl_config = KLConfig(
            kernel=self.kernel,
            sigma=self.settings.sigma,
            kappa=self.settings.kappa,
            order=self.settings.order,
            t_train=self.settings.t_train,
        )

    def parameter_shapes(self) -> dict[str, tuple[int, ...]]:
        return {"expansion": (self.output_dim, 1 + self.settings.order)}

    def initial_params(self, start: FloatArray) -> FloatArray:
        expansion = np.zeros((self.output_dim, 1 + self.settings.order))
        expansion[:, 0] = start
        return expansion.reshape(-1)

    def features(self, times: ArrayLike) -> FloatArray:
        instants = np.atleast_1d(np.asarray(times, dtype=np.float64))
        modes = scaled_eigenfunctions(self.kl_config, instants)
        return np.hstack([np.ones((len(instants), 1)), modes])

    def coefficients(
        self,
        times: ArrayLike,
        inputs: ArrayLike | None = None,
    ) -> FloatArray:
        return self.features(times) @ self.unpack()["expansion"].T

    def parameter_jacobian(
        self,
        times: ArrayLike,
        inputs: ArrayLike | None = None,
    ) -> FloatArray:
        return _feature_jacobian(self.features(times), self.output_dim)


class KLExponentialModel(KLModel):
    name = "kl-exp"
    pretty_name = "KL-Exp."
    description = "Karhunen-Loeve expansion of the exponential kernel."
    kernel = KernelKind.EXPONENTIAL


class KLSquaredExponentialModel(KLModel):
    name = "kl-sqexp"
    pretty_name = "KL-Sq. Exp."
    description = "Karhunen-Loeve expansion of the squared-exponential kernel."
    kernel = KernelKind.SQUARED_EXPONENTIAL


class ModulatedModel(CoefficientModel):
    """Constant frequencies and sinusoidally modulated rates.

    Used as the ground truth of non-Markovian synthetic data.
    """

    name = "modulated"
    pretty_name = "Modulated"
    description = "Rates gamma (1 + depth sin(2 pi t / period))."

    @dataclass(frozen=True)
    class Settings:
        period: float = field(
            default=10.0,
            metadata=SettingFieldMetadata(
                pretty_name="Period",
                description="Modulation period in microseconds.",
            ),
        )
        depth: float = field(
            default=0.5,
            metadata=SettingFieldMetadata(
                pretty_name="Depth",
                description="Relative modulation amplitude of the rates.",
            ),
        )

    @property
    def master_equation(self) -> str:
        return "Linear TCL"

    def check_settings(self) -> None:
        if self.form.mode != GeneratorMode.DIAGONAL or self.form.positive_rates:
            raise InvalidConfigError(
                "Modulated rates need the diagonal mode without positive rates"
            )

        if not self.settings.period > 0.0:
            raise InvalidConfigError(
                f"Modulation period must be positive, got {self.settings.period}"
            )

    def parameter_shapes(self) -> dict[str, tuple[int, ...]]:
        return {"theta": (self.output_dim,)}

    def initial_params(self, start: FloatArray) -> FloatArray:
        return start.copy()

    def _factors(self, times: ArrayLike) -> FloatArray:
        instants = np.atleast_1d(np.asarray(times, dtype=np.float64))
        n = self.form.n_operators
        modulation = 1.0 + self.settings.depth * np.sin(
            2 * pi * instants / self.settings.period
        )
        return np.hstack(
            [
                np.ones((len(instants), n)),
                np.repeat(modulation[:, np.newaxis], n, axis=1),
            ]
        )

    def coefficients(
        self,
        times: ArrayLike,
        inputs: ArrayLike | None = None,
    ) -> FloatArray:
        return self._factors(times) * self.params

    def parameter_jacobian(
        self,
        times: ArrayLike,
        inputs: ArrayLike | None = None,
    ) -> FloatArray:
        factors = self._factors(times)
        return factors[:, :, np.newaxis] * np.eye(self.output_dim)


# endregion Variants

MODEL_CLASSES: tuple[Type[CoefficientModel], ...] = (
    ConstantModel,
    AffineModel,
    MLPModel,
    KLExponentialModel,
    KLSquaredExponentialModel,
    ModulatedModel,
)

MODEL_MAP: dict[str, Type[CoefficientModel]] = {
    model.name: model for model in MODEL_CLASSES
}


def model_class(name: str) -> Type[CoefficientModel]:
    try:
        return MODEL_MAP[name]
    except KeyError:
        raise TclfitUsageError(
            f"Unknown model {name!r}, expected one of {', '.join(MODEL_MAP)}"
        ) from None


def make_settings(
    model_type: Type[CoefficientModel],
    options: dict[str, Any],
) -> Any:
    """Settings of model_type from a TOML-like table."""
    known = {x.name for x in model_type.iter_settings_fields()}
    if unknown := set(options) - known:
        raise InvalidConfigError(
            f"Unknown {model_type.name} settings: {', '.join(sorted(unknown))}"
        )

    values = dict(options)
    if "hidden_widths" in values:
        values["hidden_widths"] = tuple(int(width) for width in values["hidden_widths"])

    try:
        return model_type.Settings(**values)
    except TypeError as e:
        raise InvalidConfigError(str(e)) from e


# region Single-instant evaluation


def model_dimension(model: CoefficientModel) -> int:
    return model.parameter_count


def kl_evaluate(model: CoefficientModel, t: float) -> CoefficientVector:
    if not isinstance(model, KLModel):
        raise TclfitUsageError(f"Expected a KL model, got {model.name}")
    return model.evaluate(t)


def affine_evaluate(
    model: CoefficientModel,
    state: ArrayLike | None,
    t: float,
) -> CoefficientVector:
    if not isinstance(model, AffineModel):
        raise TclfitUsageError(f"Expected an affine model, got {model.name}")
    return model.evaluate(t, state)


def mlp_evaluate(
    model: CoefficientModel,
    state: ArrayLike | None,
    t: float,
) -> CoefficientVector:
    if not isinstance(model, MLPModel):
        raise TclfitUsageError(f"Expected a network model, got {model.name}")
    return model.evaluate(t, state)


# endregion Single-instant evaluation

# region Documents


def model_to_document(model: CoefficientModel) -> ModelDocument:
    settings = asdict(model.settings) if model.has_settings() else {}
    if "hidden_widths" in settings:
        settings["hidden_widths"] = list(settings["hidden_widths"])

    return {
        "tclfit": {"schema_version": SCHEMA_VERSION, "kind": "model"},
        "model": {
            "variant": model.name,
            "dim": model.form.basis.dim,
            "basis": str(model.form.basis.kind),
            "mode": str(model.form.mode),
            "positive_rates": model.form.positive_rates,
            "state_dependent": model.state_dependent,
            "units": MODEL_UNITS,
            "params": [float(value) for value in model.params],
        },
        "settings": settings,
    }


def model_from_document(document: ModelDocument) -> CoefficientModel:
    try:
        header = document["model"]
        model_type = model_class(header["variant"])
        form = GeneratorForm(
            make_basis(int(header["dim"]), BasisKind(header["basis"])),
            GeneratorMode(header["mode"]),
            bool(header["positive_rates"]),
        )
        params = header["params"]
    except KeyError as e:
        raise InvalidConfigError(f"Model document misses field {e}") from None
    except ValueError as e:
        raise InvalidConfigError(f"Invalid model document: {e}") from e

    settings = make_settings(model_type, document.get("settings", {}))
    model = model_type(form, settings, params)
    if header.get("state_dependent", model.state_dependent) != model.state_dependent:
        raise InvalidConfigError("Model document disagrees on state dependence")

    return model


# endregion Documents
