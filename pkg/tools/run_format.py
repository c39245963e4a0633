# SPDX-License-Identifier: GPL-3.0-or-later
# SPDX-FileCopyrightText: 2026 tclfit contributors
from __future__ import annotations

from subprocess import run

from .base import PROJECT_ROOT_PATH, PYTHON_SOURCES


def _run_formatter(tool_args: list[str], check: bool) -> None:
    if check:
        tool_args = [*tool_args, "--check", "--diff"]

    run(
        args=[*tool_args, *map(str, PYTHON_SOURCES)],
        cwd=PROJECT_ROOT_PATH,
        check=check,
    )


def format_with_black(check: bool = False) -> None:
    _run_formatter(["black"], check)


def format_with_isort(check: bool = False) -> None:
    _run_formatter(["isort", "--profile", "black"], check)


if __name__ == "__main__":
    format_with_isort()
    format_with_black()
