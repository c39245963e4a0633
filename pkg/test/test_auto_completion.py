# SPDX-License-Identifier: GPL-3.0-or-later
# SPDX-FileCopyrightText: 2026 tclfit contributors
from __future__ import annotations

from unittest import TestCase, main

from tclfit.tclfit_cli import iter_list_choices
from tclfit.tclfit_cli_autocomplete import AutoCompleteParser
from tclfit.tclfit_cli_metadata import FIT_MODEL_CHOICES, TCLFIT_CMD


class TestAutocomplete(TestCase):
    def setUp(self) -> None:
        self.parser = AutoCompleteParser()

    def test_second_arg(self) -> None:
        self.assertEqual(
            tuple(self.parser.auto_complete("tclfit ")),
            tuple(TCLFIT_CMD.keys()),
        )

        self.assertEqual(
            tuple(self.parser.auto_complete("tclfit fi")),
            tuple(TCLFIT_CMD.keys()),
        )

        self.assertEqual(
            tuple(self.parser.auto_complete("tclfit asd ")),
            tuple(),
        )

    def test_global_options(self) -> None:
        self.assertEqual(
            tuple(self.parser.auto_complete("tclfit --config ")),
            tuple(),
        )
        self.assertEqual(
            tuple(self.parser.auto_complete("tclfit --config conf.toml ")),
            tuple(TCLFIT_CMD.keys()),
        )
        self.assertIn("--verbose", tuple(self.parser.auto_complete("tclfit --v")))

    def test_subcommand(self) -> None:
        self.assertEqual(
            tuple(self.parser.auto_complete("tclfit list ")),
            tuple(iter_list_choices()),
        )

    def test_options(self) -> None:
        options = tuple(self.parser.auto_complete("tclfit fit --"))
        self.assertIn("--model", options)
        self.assertIn("--nonlinear", options)
        self.assertNotIn("dataset", options)

    def test_option_values(self) -> None:
        self.assertEqual(
            tuple(self.parser.auto_complete("tclfit fit --model ")),
            FIT_MODEL_CHOICES,
        )
        self.assertEqual(
            tuple(self.parser.auto_complete("tclfit fit --t-train ")),
            tuple(),
        )


if __name__ == "__main__":
    main()
