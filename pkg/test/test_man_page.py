# SPDX-License-Identifier: GPL-3.0-or-later
# SPDX-FileCopyrightText: 2026 tclfit contributors
from __future__ import annotations

from importlib.util import find_spec, module_from_spec, spec_from_file_location
from pathlib import Path
from unittest import TestCase, skipIf
from unittest import main as unittest_main

from tclfit.tclfit_cli_metadata import FIT_MODEL_CHOICES, TCLFIT_CMD

DOCS_PATH = Path(__file__).parent.parent / "docs"


@skipIf(find_spec("jinja2") is None, "jinja2 is not installed")
class TestManPage(TestCase):
    def setUp(self) -> None:
        module_spec = spec_from_file_location(
            "man_generator", DOCS_PATH / "man_generator.py"
        )
        assert module_spec is not None and module_spec.loader is not None
        self.man_generator = module_from_spec(module_spec)
        module_spec.loader.exec_module(self.man_generator)

    def test_render(self) -> None:
        page = self.man_generator.render_cmd_man(DOCS_PATH)

        self.assertTrue(page.startswith("tclfit(1)"))
        for subcommand in TCLFIT_CMD:
            with self.subTest(subcommand=subcommand):
                self.assertIn(f"## {subcommand}", page)
        for model in FIT_MODEL_CHOICES:
            self.assertIn(f"- *{model}*", page)

        self.assertIn("*--model* <baseline|lindblad|", page)
        self.assertIn("*--hidden* <width> ...", page)
        self.assertIn("*tclfit report* [options...] <results...>", page)

    def test_flags_have_no_value(self) -> None:
        self.assertEqual(
            tuple(self.man_generator.format_option("fit", "--nonlinear")),
            ("*--nonlinear*",),
        )


if __name__ == "__main__":
    unittest_main()
