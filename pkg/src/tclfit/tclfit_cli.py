# SPDX-License-Identifier: GPL-3.0-or-later
# SPDX-FileCopyrightText: 2026 tclfit contributors
from __future__ import annotations

import logging
from argparse import ArgumentParser
from pathlib import Path
from sys import argv, stderr, stdout
from typing import TYPE_CHECKING, NoReturn

import numpy as np

from .calibrate import (
    FitConfig,
    FitResult,
    ModelSpec,
    Stage1Config,
    Stage2Config,
    baseline_model,
    evaluate_model,
    fit,
    initial_coefficients,
    load_model,
    load_result,
    save_result,
)
from .coefficients import ConstantModel, ModulatedModel
from .dataset import (
    Dataset,
    ExperimentRecord,
    PulseRecord,
    SyntheticProtocol,
    generate_synthetic,
    load_dataset,
    save_dataset,
)
from .exceptions import (
    TclfitDataError,
    TclfitNumericalError,
    TclfitUsageError,
)
from .generator import DriveConvention, GeneratorForm, SystemConfig
from .operators import BasisKind, basis_state
from .propagate import TimeGrid, propagate
from .report import BASELINE_LABEL, emit_report
from .tclfit_cli_metadata import FIT_MODEL_CHOICES, TCLFIT_CMD
from .tclfit_directories import TclfitDirectories
from .tclfit_utils import TclfitSettings, default_thread_count

if TYPE_CHECKING:
    from collections.abc import Callable, Generator, Iterable, Iterator
    from typing import Any

    from .calibrate import Evaluation
    from .coefficients import CoefficientModel

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3

# CLI model name to library variant
FIT_VARIANTS = {
    "lindblad": "constant",
    "affine": "affine",
    "mlp": "mlp",
    "kl-exp": "kl-exp",
    "kl-sqexp": "kl-sqexp",
}
NONLINEAR_MODELS = {"affine", "mlp"}


class TclfitArgumentParser(ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(stderr)
        raise TclfitUsageError(message)


def iter_subcommands() -> Generator[str, None, None]:
    yield from TCLFIT_CMD.keys()


def iter_subcommand_options(
    subcommand_text: str,
) -> Generator[str, None, None]:
    yield from (
        x for x in TCLFIT_CMD[subcommand_text]["add_argument"] if x.startswith("--")
    )


def iter_list_choices() -> Iterable[str]:
    yield from TCLFIT_CMD["list"]["add_argument"]["list_what"]["choices"]


def iter_model_names() -> Iterable[str]:
    yield from FIT_MODEL_CHOICES


def argument_dest(arg_name: str, arg_options: dict[str, Any]) -> str:
    return str(arg_options.get("dest", arg_name.lstrip("-").replace("-", "_")))


def subcommand_defaults(subcommand: str) -> dict[str, Any]:
    defaults = {}
    for arg_name, arg_options in TCLFIT_CMD[subcommand]["add_argument"].items():
        match arg_options.get("action"):
            case "store_true":
                default = False
            case _:
                default = arg_options.get("default")

        defaults[argument_dest(arg_name, arg_options)] = default

    return defaults


def resolve_options(
    subcommand: str,
    explicit: dict[str, Any],
    config: dict[str, Any],
) -> dict[str, Any]:
    """Flags over profile over config.toml over built-in defaults."""
    resolved = subcommand_defaults(subcommand)
    profile_name = explicit.pop("profile", None)

    config_table = config.get(subcommand, {})
    if not isinstance(config_table, dict):
        raise TclfitUsageError(f"config.toml: [{subcommand}] must be a table")

    sources = [("config.toml", config_table)]
    if profile_name is None and "profile" in resolved:
        profile_name = config_table.get("profile")
    if profile_name is not None:
        profile = TclfitDirectories.profile_get(profile_name)
        sources.append((f"profile {profile_name}", profile.options_for(subcommand)))

    for source_name, table in sources:
        options = {key.replace("-", "_"): value for key, value in table.items()}
        if unknown := set(options) - set(resolved):
            raise TclfitUsageError(
                f"{source_name} sets unknown {subcommand} options: "
                f"{', '.join(sorted(unknown))}"
            )
        resolved.update(options)

    resolved.update({k: v for k, v in explicit.items() if v is not None})
    resolved.pop("profile", None)
    return resolved


def _require_file(flag: str, path: Path) -> None:
    if not path.is_file():
        raise TclfitUsageError(f"{flag}: file {path} does not exist")


def _metrics_line(evaluation: Evaluation) -> str:
    metrics = evaluation.metrics
    return (
        f"interpolation {metrics.interp_mean:.4g} ({metrics.interp_std:.4g}), "
        f"extrapolation {metrics.extrap_mean:.4g} ({metrics.extrap_std:.4g})"
    )


def tclfit_synth(
    truth: str,
    period: float,
    depth: float,
    n_experiments: int,
    n_validation: int,
    p_max: float,
    duration: float,
    sample_dt: float,
    shots: int | None,
    seed: int,
    t_train: float | None,
    drive_convention: str,
    dim: int,
    omega: float,
    t1: float,
    t2: float,
    basis: str,
    dt: float | None,
    threads: int | None,
    output: Path,
) -> None:
    cfg = SystemConfig(dim=dim, omega=omega, t1=t1, t2=t2, basis_kind=BasisKind(basis))
    form = GeneratorForm(cfg.basis)
    start = initial_coefficients(form, cfg)

    truth_model: CoefficientModel
    match truth:
        case "lindblad":
            truth_model = ConstantModel(form, params=start)
        case "modulated":
            truth_model = ModulatedModel(
                form, ModulatedModel.Settings(period=period, depth=depth), start
            )
        case _:
            raise TclfitUsageError(f"--truth: unknown model {truth!r}")

    protocol = SyntheticProtocol(
        n_experiments=n_experiments,
        p_max_mhz=p_max,
        duration_us=duration,
        sample_dt_us=sample_dt,
        shots=shots,
        seed=seed,
        integration_dt_us=dt,
        t_train_us=t_train,
        n_validation=n_validation,
        drive_convention=DriveConvention(drive_convention),
    )
    print(
        f"Simulating {n_experiments} experiments of {duration} us "
        f"from the {truth} model",
        file=stderr,
    )
    dataset = generate_synthetic(
        truth_model, cfg, protocol, threads=threads or default_thread_count()
    )
    save_dataset(dataset, output)
    print(f"Wrote {output}", file=stderr)


def _fit_spec(
    model: str,
    nonlinear: bool,
    mode: str,
    positive_rates: bool,
    order: int,
    sigma: float,
    kappa: float,
    hidden: list[int],
    seed: int,
) -> ModelSpec:
    if nonlinear and model not in NONLINEAR_MODELS:
        raise TclfitUsageError(
            f"--nonlinear: applies to {' and '.join(sorted(NONLINEAR_MODELS))}, "
            f"not {model}"
        )

    settings: dict[str, Any]
    match model:
        case "lindblad":
            settings = {}
        case "affine":
            settings = {"state_dependent": nonlinear}
        case "mlp":
            settings = {
                "state_dependent": nonlinear,
                "hidden_widths": tuple(hidden),
                "seed": seed,
            }
        case "kl-exp" | "kl-sqexp":
            settings = {"sigma": sigma, "kappa": kappa, "order": order}
        case _:
            raise TclfitUsageError(
                f"--model: unknown model {model!r}, expected one of "
                f"{', '.join(FIT_MODEL_CHOICES)}"
            )

    return ModelSpec(
        variant=FIT_VARIANTS[model],
        settings=settings,
        mode=mode,
        positive_rates=positive_rates,
    )


def tclfit_fit(
    model: str,
    nonlinear: bool,
    t_train: float | None,
    mode: str,
    positive_rates: bool,
    order: int,
    sigma: float,
    kappa: float,
    hidden: list[int],
    adam_iters: int,
    adam_step: float,
    batch: int | None,
    lbfgs_iters: int,
    lbfgs_memory: int,
    tolerance: float,
    gradient: str,
    l1: float,
    seed: int,
    label: str | None,
    dt: float | None,
    threads: int | None,
    output: Path,
    dataset: Path,
) -> None:
    _require_file("dataset", dataset)
    data = load_dataset(dataset)
    if t_train is not None:
        data = data.with_t_train(t_train)

    result: FitResult
    if model == "baseline":
        baseline = baseline_model(data.system)
        result = FitResult(baseline, (), 0, label=BASELINE_LABEL).with_evaluation(
            evaluate_model(baseline, data, dt=dt)
        )
    else:
        spec = _fit_spec(
            model, nonlinear, mode, positive_rates, order, sigma, kappa, hidden, seed
        )
        cfg = FitConfig(
            model=spec,
            stage1=Stage1Config(max_iters=adam_iters, step_size=adam_step, batch=batch),
            stage2=Stage2Config(
                max_iters=lbfgs_iters, memory=lbfgs_memory, tolerance=tolerance
            ),
            gradient_method=gradient,
            l1_weight=l1,
            seed=seed,
            dt=dt,
            threads=threads or default_thread_count(),
        )
        print(
            f"Fitting {model} model on {len(data.training_experiments)} "
            f"experiments up to {data.t_train} us",
            file=stderr,
        )
        result = fit(data, cfg, label=label or "")

    save_result(result, output)
    assert result.evaluation is not None
    print(f"{result.parameterization}: {_metrics_line(result.evaluation)}", file=stderr)
    print(f"Wrote {output}", file=stderr)


def tclfit_simulate(
    amplitude: list[float],
    q_amplitude: list[float],
    duration: float,
    rot_frequency: float | None,
    drive_convention: str,
    initial_level: int,
    sample_dt: float,
    omega: float,
    t1: float,
    t2: float,
    dt: float | None,
    output: Path,
    model: Path,
) -> None:
    _require_file("model", model)
    coefficient_model = load_model(model)
    dim = coefficient_model.form.basis.dim
    if not 0 <= initial_level < dim:
        raise TclfitUsageError(
            f"--initial-level: {initial_level} is not a level of a dim {dim} system"
        )

    cfg = SystemConfig(
        dim=dim,
        omega=omega,
        t1=t1,
        t2=t2,
        basis_kind=coefficient_model.form.basis.kind,
    )
    record = PulseRecord(
        amplitude_mhz=tuple(amplitude),
        q_amplitude_mhz=tuple(q_amplitude),
        duration_us=duration,
        rot_frequency_ghz=omega if rot_frequency is None else rot_frequency,
    )
    convention = DriveConvention(drive_convention)
    times = sample_dt * np.arange(int(np.floor(duration / sample_dt + 1e-9)) + 1)
    initial_state = basis_state(dim, initial_level)
    trajectory = propagate(
        coefficient_model,
        record.control_pulse(convention),
        cfg,
        initial_state,
        TimeGrid.for_samples(times, dt),
    )
    experiment = ExperimentRecord(
        experiment_id="sim-000",
        pulse=record,
        times=trajectory.times,
        initial_state=initial_state,
        raw_states=np.array(trajectory.states),
    )
    save_dataset(
        Dataset(
            system=cfg,
            experiments=(experiment,),
            t_train=float(trajectory.times[-1]),
            drive_convention=convention,
            description=f"simulated {coefficient_model.name} model",
        ),
        output,
    )
    print(f"Wrote {len(times)} states to {output}", file=stderr)


def tclfit_evaluate(
    t_train: float | None,
    label: str | None,
    dt: float | None,
    output: Path,
    model: Path,
    dataset: Path,
) -> None:
    _require_file("model", model)
    _require_file("dataset", dataset)
    result = load_result(model)
    if label is not None:
        result = FitResult(
            result.model, result.loss_history, result.stage_boundary, label=label
        )

    evaluation = evaluate_model(result.model, load_dataset(dataset), t_train, dt)
    save_result(result.with_evaluation(evaluation), output)
    print(f"{result.parameterization}: {_metrics_line(evaluation)}", file=stderr)


def tclfit_report(
    dataset: Path,
    t_train: float | None,
    no_baseline: bool,
    dt: float | None,
    output_dir: Path,
    results: list[Path],
) -> None:
    _require_file("--dataset", dataset)
    for result_path in results:
        _require_file("results", result_path)

    bundle = emit_report(
        [load_result(x) for x in results],
        load_dataset(dataset),
        output_dir,
        include_baseline=not no_baseline,
        t_train=t_train,
        dt=dt,
    )
    print(
        f"Wrote {bundle.metrics}, {len(bundle.series)} series "
        f"and {len(bundle.histograms)} histograms",
        file=stderr,
    )


def tclfit_list(list_what: str) -> None:
    str_iterator: Iterator[str]

    match list_what:
        case "models":
            str_iterator = iter(iter_model_names())
        case "profiles":
            str_iterator = TclfitDirectories.iter_profile_names()
        case "subcommands":
            str_iterator = iter_subcommands()
        case _:
            raise TclfitUsageError(f"Cannot list {list_what!r}")

    for string in str_iterator:
        print(string, file=stdout)


COMMANDS_FUNCS: dict[str, Callable[..., None]] = {
    "synth": tclfit_synth,
    "fit": tclfit_fit,
    "simulate": tclfit_simulate,
    "evaluate": tclfit_evaluate,
    "report": tclfit_report,
    "list": tclfit_list,
}


def create_arg_parser() -> ArgumentParser:
    parser = TclfitArgumentParser(
        prog="tclfit",
        description=(
            "Fit time-convolutionless master equations to tomography data."
        ),
    )
    parser.add_argument(
        "--version",
        action="version",
        version=TclfitSettings.VERSION,
    )
    parser.add_argument(
        "--verbose",
        action="store_true",
        help="Log per-iteration diagnostics.",
    )
    parser.add_argument(
        "--config",
        type=Path,
        help="Configuration file with subcommand defaults.",
        metavar="config_path",
    )
    subparsers = parser.add_subparsers(
        dest="subcommand",
        required=True,
        description="Available subcommands.",
    )
    for subcommand_name, subcommand_data in TCLFIT_CMD.items():
        description = subcommand_data["description"]
        subcommand_add_argument = subcommand_data["add_argument"]
        subparser = subparsers.add_parser(
            subcommand_name,
            description=description,
            help=description,
        )
        for arg_name, arg_options in subcommand_add_argument.items():
            options = dict(arg_options)
            default = options.pop("default", None)
            if default is not None:
                options["help"] = f"{options['help']} Default: {default}."

            subparser.add_argument(
                arg_name,
                default=None,
                **options,
            )

    return parser


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        stream=stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def run(arg_list: list[str]) -> int:
    try:
        parser = create_arg_parser()
        args_dict = vars(parser.parse_args(arg_list))
        configure_logging(bool(args_dict.pop("verbose")))
        config = TclfitDirectories.config_get(args_dict.pop("config"))
        subcommand = args_dict.pop("subcommand")
        COMMANDS_FUNCS[subcommand](**resolve_options(subcommand, args_dict, config))
    except TclfitUsageError as e:
        print(f"tclfit: error: {e}", file=stderr)
        return EXIT_USAGE
    except TclfitDataError as e:
        print(f"tclfit: data error: {e}", file=stderr)
        return EXIT_DATA
    except TclfitNumericalError as e:
        print(f"tclfit: numerical failure: {e}", file=stderr)
        return EXIT_NUMERICAL

    return 0


def tclfit_main(arg_list: list[str] | None = None) -> None:
    arguments = argv[1:] if arg_list is None else arg_list
    # Short circuit to auto-complete
    if arguments and arguments[0] == "auto-complete":
        from .tclfit_cli_autocomplete import run_autocomplete

        run_autocomplete(arguments)
        return

    raise SystemExit(run(arguments))
