# SPDX-License-Identifier: GPL-3.0-or-later
# SPDX-FileCopyrightText: 2026 tclfit contributors
from __future__ import annotations


class TclfitException(Exception): ...


# region Usage


class TclfitUsageError(TclfitException): ...


# endregion Usage

# region Data


class TclfitDataError(TclfitException): ...


class DimensionError(TclfitDataError): ...


class UnsupportedDimensionError(DimensionError): ...


class UnrecoverableStateError(TclfitDataError): ...


class NonHermitianError(TclfitDataError): ...


class InvalidConfigError(TclfitDataError): ...


class ParameterLengthError(TclfitDataError): ...


class DatasetError(TclfitDataError): ...


class DatasetParseError(DatasetError): ...


class DatasetValidationError(DatasetError): ...


class DatasetVersionError(DatasetError): ...


class HorizonError(TclfitDataError): ...


# endregion Data

# region Numerical


class TclfitNumericalError(TclfitException): ...


class RootBracketError(TclfitNumericalError): ...


class PropagationDivergenceError(TclfitNumericalError):
    def __init__(self, step: int, time: float):
        super().__init__(
            f"State diverged at step {step} (t = {time:.6g} us)",
        )
        self.step = step
        self.time = time


class UnsupportedModelError(TclfitNumericalError): ...


class GradientError(TclfitNumericalError):
    def __init__(self, parameter_index: int):
        super().__init__(
            f"Non-finite gradient entry for parameter {parameter_index}",
        )
        self.parameter_index = parameter_index


class FitInitializationError(TclfitNumericalError): ...


class FitConfigError(TclfitNumericalError): ...


# endregion Numerical
