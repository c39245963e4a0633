# SPDX-License-Identifier: GPL-3.0-or-later
# SPDX-FileCopyrightText: 2026 tclfit contributors
from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from typing import Any, TypedDict

    class CmdMetaDataDict(TypedDict):
        add_argument: dict[str, dict[str, Any]]
        argument: str
        description: "str"


FIT_MODEL_CHOICES = ("baseline", "lindblad", "affine", "mlp", "kl-exp", "kl-sqexp")
BASIS_CHOICES = ("gell-mann", "upper-triangular-gell-mann", "pauli-qubit")
MODE_CHOICES = ("diagonal", "general-gamma")
CONVENTION_CHOICES = ("angular", "cyclic")


def _system_arguments() -> dict[str, dict[str, Any]]:
    return {
        "--dim": {
            "type": int,
            "default": 2,
            "help": "Hilbert space dimension.",
            "metavar": "N",
        },
        "--omega": {
            "type": float,
            "default": 3.448,
            "help": "Transition frequency in GHz.",
            "metavar": "ghz",
        },
        "--t1": {
            "type": float,
            "default": 214.0,
            "help": "Relaxation time T1 in microseconds.",
            "metavar": "us",
        },
        "--t2": {
            "type": float,
            "default": 32.0,
            "help": "Dephasing time T2 in microseconds.",
            "metavar": "us",
        },
        "--basis": {
            "choices": BASIS_CHOICES,
            "default": "upper-triangular-gell-mann",
            "help": "Operator basis of the generator.",
        },
    }


def _common_arguments() -> dict[str, dict[str, Any]]:
    return {
        "--dt": {
            "type": float,
            "help": (
                "RK4 step in microseconds. "
                "Defaults to the sampling interval of the data."
            ),
            "metavar": "us",
        },
        "--threads": {
            "type": int,
            "help": "Worker threads propagating experiments. "
            "Defaults to TCLFIT_THREADS or 1.",
            "metavar": "count",
        },
    }


TCLFIT_CMD: dict[str, CmdMetaDataDict] = {
    "synth": {
        "add_argument": {
            "--profile": {
                "help": "Protocol profile providing defaults.",
                "metavar": "profile",
            },
            "--truth": {
                "choices": ("lindblad", "modulated"),
                "default": "lindblad",
                "help": (
                    "Generating model: the device Lindblad equation or "
                    "sinusoidally modulated rates."
                ),
            },
            "--period": {
                "type": float,
                "default": 10.0,
                "help": "Modulation period in microseconds.",
                "metavar": "us",
            },
            "--depth": {
                "type": float,
                "default": 0.5,
                "help": "Relative modulation depth.",
                "metavar": "fraction",
            },
            "--n-experiments": {
                "type": int,
                "default": 8,
                "help": "Number of random pulses.",
                "metavar": "count",
            },
            "--n-validation": {
                "type": int,
                "default": 0,
                "help": "How many of the experiments are validation only.",
                "metavar": "count",
            },
            "--p-max": {
                "type": float,
                "default": 3.47,
                "help": "Largest drive amplitude in MHz.",
                "metavar": "mhz",
            },
            "--duration": {
                "type": float,
                "default": 50.0,
                "help": "Pulse duration and record length in microseconds.",
                "metavar": "us",
            },
            "--sample-dt": {
                "type": float,
                "default": 0.004,
                "help": "Sampling interval in microseconds.",
                "metavar": "us",
            },
            "--shots": {
                "type": int,
                "help": "Shots per expectation value. Exact data if omitted.",
                "metavar": "count",
            },
            "--seed": {
                "type": int,
                "default": 0,
                "help": "Seed of pulse and shot sampling.",
                "metavar": "seed",
            },
            "--t-train": {
                "type": float,
                "help": "Training horizon recorded in the dataset.",
                "metavar": "us",
            },
            "--drive-convention": {
                "choices": CONVENTION_CHOICES,
                "default": "angular",
                "help": "How pulse amplitudes are recorded.",
            },
            **_system_arguments(),
            **_common_arguments(),
            "--output": {
                "type": Path,
                "required": True,
                "help": "Dataset file to write.",
                "metavar": "dataset_path",
            },
        },
        "argument": "any",
        "description": "Generate a synthetic tomography dataset.",
    },
    "fit": {
        "add_argument": {
            "--profile": {
                "help": "Protocol profile providing defaults.",
                "metavar": "profile",
            },
            "--model": {
                "choices": FIT_MODEL_CHOICES,
                "default": "lindblad",
                "help": "Coefficient model to fit.",
            },
            "--nonlinear": {
                "action": "store_true",
                "help": "Feed the state into the coefficient model.",
            },
            "--t-train": {
                "type": float,
                "help": "Training horizon. Defaults to the dataset value.",
                "metavar": "us",
            },
            "--mode": {
                "choices": MODE_CHOICES,
                "default": "diagonal",
                "help": "Diagonal rates or a full rate matrix.",
            },
            "--positive-rates": {
                "action": "store_true",
                "help": "Keep diagonal rates positive with a softplus map.",
            },
            "--M": {
                "dest": "order",
                "type": int,
                "default": 4,
                "help": "Truncation order of the KL expansion.",
                "metavar": "order",
            },
            "--sigma": {
                "type": float,
                "default": 1.0,
                "help": "Kernel amplitude of the KL expansion.",
                "metavar": "sigma",
            },
            "--kappa": {
                "type": float,
                "default": 1.0,
                "help": "Kernel correlation length in normalized time.",
                "metavar": "kappa",
            },
            "--hidden": {
                "type": int,
                "nargs": "+",
                "default": [16],
                "help": "Hidden layer widths of the network.",
                "metavar": "width",
            },
            "--adam-iters": {
                "type": int,
                "default": 500,
                "help": "Iterations of the Adam stage.",
                "metavar": "count",
            },
            "--adam-step": {
                "type": float,
                "default": 1e-2,
                "help": "Adam learning rate.",
                "metavar": "rate",
            },
            "--batch": {
                "type": int,
                "help": "Experiments per Adam step. All if omitted.",
                "metavar": "count",
            },
            "--lbfgs-iters": {
                "type": int,
                "default": 1000,
                "help": "Iterations of the L-BFGS stage.",
                "metavar": "count",
            },
            "--lbfgs-memory": {
                "type": int,
                "default": 10,
                "help": "L-BFGS correction pairs.",
                "metavar": "count",
            },
            "--tolerance": {
                "type": float,
                "default": 1e-8,
                "help": "L-BFGS gradient tolerance.",
                "metavar": "tol",
            },
            "--gradient": {
                "choices": ("forward-sensitivity", "finite-difference"),
                "default": "forward-sensitivity",
                "help": "How loss gradients are computed.",
            },
            "--l1": {
                "type": float,
                "default": 0.0,
                "help": "Weight of the L1 penalty on the parameters.",
                "metavar": "weight",
            },
            "--seed": {
                "type": int,
                "default": 0,
                "help": "Seed of minibatches and network initialization.",
                "metavar": "seed",
            },
            "--label": {
                "help": "Parameterization label used in reports.",
                "metavar": "label",
            },
            **_common_arguments(),
            "--output": {
                "type": Path,
                "required": True,
                "help": "Result file to write.",
                "metavar": "result_path",
            },
            "dataset": {
                "type": Path,
                "help": "Dataset to fit.",
            },
        },
        "argument": "dataset",
        "description": "Fit a coefficient model to a dataset.",
    },
    "simulate": {
        "add_argument": {
            "--amplitude": {
                "type": float,
                "nargs": "+",
                "default": [0.0],
                "help": "In-phase amplitude per pulse segment in MHz.",
                "metavar": "mhz",
            },
            "--q-amplitude": {
                "type": float,
                "nargs": "+",
                "default": [0.0],
                "help": "Quadrature amplitude per pulse segment in MHz.",
                "metavar": "mhz",
            },
            "--duration": {
                "type": float,
                "default": 50.0,
                "help": "Pulse duration in microseconds.",
                "metavar": "us",
            },
            "--rot-frequency": {
                "type": float,
                "help": "Rotating frame frequency in GHz. Defaults to --omega.",
                "metavar": "ghz",
            },
            "--drive-convention": {
                "choices": CONVENTION_CHOICES,
                "default": "angular",
                "help": "How amplitudes are given.",
            },
            "--initial-level": {
                "type": int,
                "default": 0,
                "help": "Start from this basis state.",
                "metavar": "level",
            },
            "--sample-dt": {
                "type": float,
                "default": 0.04,
                "help": "Sampling interval in microseconds.",
                "metavar": "us",
            },
            "--omega": _system_arguments()["--omega"],
            "--t1": _system_arguments()["--t1"],
            "--t2": _system_arguments()["--t2"],
            "--dt": _common_arguments()["--dt"],
            "--output": {
                "type": Path,
                "required": True,
                "help": "Dataset file receiving the trajectory.",
                "metavar": "dataset_path",
            },
            "model": {
                "type": Path,
                "help": "Model or result file.",
            },
        },
        "argument": "model",
        "description": "Propagate a saved model under a pulse.",
    },
    "evaluate": {
        "add_argument": {
            "--t-train": {
                "type": float,
                "help": "Interpolation horizon. Defaults to the dataset value.",
                "metavar": "us",
            },
            "--label": {
                "help": "Parameterization label of the result.",
                "metavar": "label",
            },
            "--dt": _common_arguments()["--dt"],
            "--output": {
                "type": Path,
                "required": True,
                "help": "Result file receiving the metrics.",
                "metavar": "result_path",
            },
            "model": {
                "type": Path,
                "help": "Model or result file.",
            },
            "dataset": {
                "type": Path,
                "help": "Dataset to score against.",
            },
        },
        "argument": "model",
        "description": "Score a model against a dataset.",
    },
    "report": {
        "add_argument": {
            "--dataset": {
                "type": Path,
                "required": True,
                "help": "Dataset the results are scored on.",
                "metavar": "dataset_path",
            },
            "--t-train": {
                "type": float,
                "help": "Interpolation horizon. Defaults to the dataset value.",
                "metavar": "us",
            },
            "--no-baseline": {
                "action": "store_true",
                "help": "Do not add the device baseline row.",
            },
            "--dt": _common_arguments()["--dt"],
            "--output-dir": {
                "type": Path,
                "required": True,
                "help": "Directory receiving the report tables.",
                "metavar": "directory",
            },
            "results": {
                "type": Path,
                "nargs": "+",
                "help": "Result files to tabulate.",
            },
        },
        "argument": "results",
        "description": "Write metrics, Bloch series and histogram tables.",
    },
    "list": {
        "add_argument": {
            "list_what": {
                "nargs": "?",
                "choices": (
                    "models",
                    "profiles",
                    "subcommands",
                ),
                "default": "models",
                "help": "Type of entity to list.",
            },
        },
        "argument": "any",
        "description": "List models, profiles or subcommands.",
    },
}
