# SPDX-License-Identifier: GPL-3.0-or-later
# SPDX-FileCopyrightText: 2026 tclfit contributors
from __future__ import annotations

from argparse import ArgumentParser
from shlex import split as shlex_split
from typing import TYPE_CHECKING

from .tclfit_cli import (
    iter_list_choices,
    iter_model_names,
    iter_subcommand_options,
    iter_subcommands,
)
from .tclfit_cli_metadata import BASIS_CHOICES, CONVENTION_CHOICES, MODE_CHOICES
from .tclfit_directories import TclfitDirectories

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable

# Options whose value can be completed
OPTION_VALUES: dict[str, Callable[[], Iterable[str]]] = {
    "--profile": TclfitDirectories.iter_profile_names,
    "--model": iter_model_names,
    "--basis": lambda: BASIS_CHOICES,
    "--mode": lambda: MODE_CHOICES,
    "--drive-convention": lambda: CONVENTION_CHOICES,
    "--truth": lambda: ("lindblad", "modulated"),
    "--gradient": lambda: ("forward-sensitivity", "finite-difference"),
}

GLOBAL_OPTIONS = ("--help", "--version", "--verbose", "--config")
# Global options followed by a value
GLOBAL_VALUE_OPTIONS = ("--config",)


def _option_values(option: str) -> Iterable[str]:
    try:
        return OPTION_VALUES[option]()
    except KeyError:
        # Paths and numbers
        return ()


class AutoCompleteParser:
    """Completion candidates for a partially typed tclfit command line.

    Candidates are not filtered by the typed prefix, the shell does that.
    """

    def __init__(self) -> None:
        self.last_auto_complete: Iterable[str] = []

    def _split(self, current_cmd: str) -> list[str]:
        words = shlex_split(current_cmd)
        if current_cmd[-1:].isspace():
            words.append("")
        # Drop the program name
        return words[1:]

    def _complete_global(self, words: list[str]) -> int | None:
        """Index of the subcommand word or None while still typing it."""
        for index, token in enumerate(words):
            previous = words[index - 1] if index else ""
            is_last = index == len(words) - 1
            if token.startswith("-"):
                self.last_auto_complete = GLOBAL_OPTIONS
            elif previous in GLOBAL_VALUE_OPTIONS:
                self.last_auto_complete = ()
            elif is_last:
                self.last_auto_complete = iter_subcommands()
            else:
                return index

        return None

    def _complete_subcommand(self, subcommand: str, words: list[str]) -> None:
        try:
            options = tuple(iter_subcommand_options(subcommand))
        except KeyError:
            self.last_auto_complete = ()
            return

        if subcommand == "list":
            # Only one positional choice
            self.last_auto_complete = iter_list_choices() if len(words) == 1 else ()
            if words[-1].startswith("-"):
                self.last_auto_complete = options
            return

        token = words[-1]
        previous = words[-2] if len(words) > 1 else ""
        if token.startswith("-"):
            self.last_auto_complete = options
        else:
            self.last_auto_complete = _option_values(previous)

    def auto_complete_parser(self, current_cmd: str) -> None:
        words = self._split(current_cmd)
        self.last_auto_complete = iter_subcommands()
        if not words:
            return

        subcommand_index = self._complete_global(words)
        if subcommand_index is None:
            return

        self._complete_subcommand(
            words[subcommand_index], words[subcommand_index + 1 :]
        )

    def auto_complete(self, current_cmd: str) -> Iterable[str]:
        self.auto_complete_parser(current_cmd)
        yield from self.last_auto_complete


def run_autocomplete(arg_list: list[str] | None = None) -> None:
    parser = ArgumentParser()
    parser.add_argument("auto_complete")
    parser.add_argument("current_cmd")
    args = parser.parse_args(arg_list)

    for x in AutoCompleteParser().auto_complete(args.current_cmd):
        print(x)
