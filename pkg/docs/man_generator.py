#!/usr/bin/python3 -B
# SPDX-License-Identifier: GPL-3.0-or-later
# SPDX-FileCopyrightText: 2026 tclfit contributors
from __future__ import annotations

from argparse import ArgumentParser
from pathlib import Path
from textwrap import indent
from typing import TYPE_CHECKING

from jinja2 import Environment, FileSystemLoader, StrictUndefined

from tclfit.tclfit_cli_metadata import FIT_MODEL_CHOICES, TCLFIT_CMD

if TYPE_CHECKING:
    from collections.abc import Iterator


def scdoc_paragraph(s: Iterator[str]) -> str:
    return "\n\n".join(x for x in s if x)


def scdoc_indent(s: str, indent_level: int = 1) -> str:
    return indent(s, "\t" * indent_level)


MODEL_HELP = {
    "baseline": "Lindblad generator built from T1 and T2. No fitting is done.",
    "lindblad": "Constant generator fitted to the data.",
    "affine": "Generator affine in the control amplitudes.",
    "mlp": "Small tanh network mapping the controls to the generator.",
    "kl-exp": "Karhunen-Loeve expansion of an exponential kernel.",
    "kl-sqexp": "Karhunen-Loeve expansion of a squared exponential kernel.",
}

SUBCOMMAND_HELP = {
    "synth": """The dataset is generated by propagating the *--truth* model
under random piecewise constant pulses and sampling the Bloch vector.

With *--shots* the samples are drawn as binomial outcomes in each
Pauli basis and reconstructed with linear inversion.
""",
    "fit": """Fitting runs a stochastic Adam stage followed by
L-BFGS-B polishing. Only samples up to *--t-train* contribute to the loss.

The result file stores the fitted model, the loss history and the
interpolation and extrapolation trace distance metrics.

Available models:

"""
    + "\n".join(f"- *{x}*: {MODEL_HELP[x]}" for x in FIT_MODEL_CHOICES),
    "simulate": """The trajectory is written as a single experiment
dataset that can be scored or plotted like measured data.
""",
    "report": """Writes _metrics.csv_ with one row per result,
one Bloch series table per result and experiment and one trace distance
histogram per result.
""",
    "list": "\n".join(
        f"- *{x}*"
        for x in TCLFIT_CMD["list"]["add_argument"]["list_what"]["choices"]
    ),
}

OPTION_HELP = {
    "fit": {
        "--nonlinear": """Only valid for the *affine* and *mlp*
models. The generator then also depends on the current state.
""",
        "--positive-rates": """Rates are squared before use so
that the dissipator stays completely positive.
""",
    },
    "synth": {
        "--t-train": """Stored in the dataset and used as the default
interpolation horizon of later *fit*, *evaluate* and *report* runs.
""",
    },
}


def format_option(subcommand: str, option: str) -> Iterator[str]:
    option_data = TCLFIT_CMD[subcommand]["add_argument"][option]

    yield f"*{option}*"

    match option_data.get("action"):
        case "store_true" | "store_false":
            return

    match option_data.get("metavar"), option_data.get("choices"):
        case str() as metavar, _:
            yield f"<{metavar}>"
        case None, tuple() as choices:
            yield "<" + "|".join(choices) + ">"
        case None, None:
            yield "<value>"
        case _:
            raise TypeError

    if option_data.get("nargs") == "+":
        yield "..."


def get_option_description(subcommand: str, option: str) -> tuple[str, ...]:
    option_data = TCLFIT_CMD[subcommand]["add_argument"][option]
    option_help = option_data["help"]
    default = option_data.get("default")
    if default is not None and option_data.get("action") is None:
        option_help += f" Default: _{default}_."

    return option_help, OPTION_HELP.get(subcommand, {}).get(option, "")


def get_options(subcommand: str) -> tuple[str, ...]:
    return tuple(
        x for x in TCLFIT_CMD[subcommand]["add_argument"] if x.startswith("-")
    )


def format_arg_names(subcommand: str) -> Iterator[str]:
    if get_options(subcommand):
        yield "[options...]"

    for add_argument, options in TCLFIT_CMD[subcommand]["add_argument"].items():
        if add_argument.startswith("-"):
            continue

        if options.get("nargs") == "+":
            yield f"<{add_argument}...>"
        elif options.get("nargs") == "?":
            yield f"[{add_argument}]"
        else:
            yield f"<{add_argument}>"


def get_subcommand_description(subcommand: str) -> tuple[str, ...]:
    return (
        TCLFIT_CMD[subcommand]["description"],
        SUBCOMMAND_HELP.get(subcommand, ""),
    )


def render_cmd_man(template_dir: Path) -> str:
    env = Environment(
        loader=FileSystemLoader(template_dir),
        undefined=StrictUndefined,
    )
    env.filters["scdoc_indent"] = scdoc_indent
    env.filters["scdoc_paragraph"] = scdoc_paragraph

    template = env.get_template("tclfit.1.scd.jinja2")

    return template.render(
        subcommands=TCLFIT_CMD.keys(),
        get_subcommand_description=get_subcommand_description,
        get_options=get_options,
        format_arg_names=format_arg_names,
        get_option_description=get_option_description,
        format_option=format_option,
    )


def generate_cmd_man(template_dir: Path) -> None:
    print(render_cmd_man(template_dir))


GENERATORS = {
    "cmd": generate_cmd_man,
}


def main() -> None:
    arg_parse = ArgumentParser()
    arg_parse.add_argument(
        "--template-dir",
        required=True,
        type=Path,
    )
    arg_parse.add_argument(
        "generator",
        choices=GENERATORS.keys(),
    )
    args = vars(arg_parse.parse_args())

    generator_func_name = args.pop("generator")

    GENERATORS[generator_func_name](**args)


if __name__ == "__main__":
    main()
