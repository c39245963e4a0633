# SPDX-License-Identifier: GPL-3.0-or-later
# SPDX-FileCopyrightText: 2026 tclfit contributors
from __future__ import annotations

from os import environ
from pathlib import Path
from subprocess import CalledProcessError, run
from sys import executable, stderr
from typing import TYPE_CHECKING

from .base import BUILD_DIR, PROJECT_ROOT_PATH, PYTHON_SOURCES, SOURCE_DIR, TEST_DIR
from .run_format import format_with_black, format_with_isort

if TYPE_CHECKING:
    from collections.abc import Callable

IGNORE_CODESPELL_WORDS = ("assertIn", "ket", "kets")


def run_linter(args: list[str | Path], env: dict[str, str] | None = None) -> bool:
    print("Running:", args[0], file=stderr)
    try:
        run(
            args=args,
            cwd=PROJECT_ROOT_PATH,
            check=True,
            env=env,
        )
    except CalledProcessError:
        return True

    return False


def run_checker(name: str, checker: Callable[[], None]) -> bool:
    print("Running:", name, file=stderr)
    try:
        checker()
    except CalledProcessError:
        return True

    return False


def run_pyflakes() -> bool:
    return run_linter(["pyflakes", *PYTHON_SOURCES])


def run_mypy() -> bool:
    return run_linter(
        [
            "mypy",
            "--pretty",
            "--strict",
            "--cache-dir",
            BUILD_DIR / "mypy_cache",
            "--ignore-missing-imports",
            *PYTHON_SOURCES,
        ]
    )


def run_codespell() -> bool:
    return run_linter(
        [
            "codespell",
            "--check-filenames",
            "--context",
            "3",
            "--ignore-words-list",
            ",".join(IGNORE_CODESPELL_WORDS),
            SOURCE_DIR,
            TEST_DIR,
            PROJECT_ROOT_PATH / "docs",
            PROJECT_ROOT_PATH / "README.md",
        ]
    )


def run_unit_tests() -> bool:
    test_env = environ.copy()
    test_env["PYTHONPATH"] = str(SOURCE_DIR)
    return run_linter(
        [executable, "-m", "unittest", "discover", "--start-directory", TEST_DIR],
        env=test_env,
    )


def main() -> None:
    BUILD_DIR.mkdir(exist_ok=True)

    has_failed = False

    has_failed |= run_pyflakes()
    has_failed |= run_mypy()
    has_failed |= run_checker("black", lambda: format_with_black(check=True))
    has_failed |= run_checker("isort", lambda: format_with_isort(check=True))
    has_failed |= run_codespell()
    has_failed |= run_unit_tests()

    if has_failed:
        raise SystemExit(1)


if __name__ == "__main__":
    main()
