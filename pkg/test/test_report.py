# SPDX-License-Identifier: GPL-3.0-or-later
# SPDX-FileCopyrightText: 2026 tclfit contributors
from __future__ import annotations

from csv import reader as csv_reader
from pathlib import Path
from tempfile import TemporaryDirectory
from unittest import TestCase
from unittest import main as unittest_main

import numpy as np

from tclfit.calibrate import FitResult, baseline_model, evaluate_model
from tclfit.coefficients import AffineModel, ConstantModel
from tclfit.dataset import SyntheticProtocol, generate_synthetic
from tclfit.exceptions import TclfitUsageError
from tclfit.generator import SystemConfig
from tclfit.report import coordinate_names, emit_report

CFG = SystemConfig()


def read_rows(path: Path) -> list[list[str]]:
    with open(path, newline="") as f:
        return list(csv_reader(f))


class TestReport(TestCase):
    @classmethod
    def setUpClass(cls) -> None:
        protocol = SyntheticProtocol(
            n_experiments=2,
            duration_us=0.2,
            sample_dt_us=0.04,
            t_train_us=0.12,
            seed=9,
        )
        cls.dataset = generate_synthetic(baseline_model(CFG), CFG, protocol)
        baseline = baseline_model(CFG)
        cls.lindblad = FitResult(
            model=ConstantModel(baseline.form, params=np.array(baseline.params) * 2),
            loss_history=(),
            stage_boundary=0,
        )
        cls.affine = FitResult(
            model=AffineModel.create(baseline.form, initial=baseline.params),
            loss_history=(),
            stage_boundary=0,
        )

    def setUp(self) -> None:
        self.temp_dir = TemporaryDirectory()
        self.addCleanup(self.temp_dir.cleanup)
        self.temp_dir_path = Path(self.temp_dir.name)

    def test_metrics_table(self) -> None:
        bundle = emit_report(
            [self.affine, self.lindblad], self.dataset, self.temp_dir_path
        )
        rows = read_rows(bundle.metrics)
        self.assertEqual(
            rows[0],
            [
                "master_equation",
                "parameterization",
                "interpolation_mean",
                "interpolation_std",
                "extrapolation_mean",
                "extrapolation_std",
            ],
        )
        self.assertEqual(
            [row[:2] for row in rows[1:]],
            [["Baseline", "-"], ["Lindblad", "-"], ["Linear TCL", "Affine"]],
        )
        for row in rows[1:]:
            for cell in row[2:]:
                self.assertGreaterEqual(float(cell), 0.0)
        # The data was generated by the baseline
        self.assertLess(float(rows[1][2]), 1e-6)

    def test_series(self) -> None:
        bundle = emit_report([self.lindblad], self.dataset, self.temp_dir_path)
        self.assertEqual(len(bundle.series), 2 * len(self.dataset.experiments))
        for path in bundle.series:
            rows = read_rows(path)
            self.assertEqual(
                rows[0],
                [
                    "t_us",
                    "measured_x",
                    "measured_y",
                    "measured_z",
                    "predicted_x",
                    "predicted_y",
                    "predicted_z",
                    "trace_distance",
                ],
            )
            self.assertEqual(len(rows), 1 + 6)
            first = [float(x) for x in rows[1]]
            np.testing.assert_allclose(first[:7], [0, 0, 0, 1, 0, 0, 1], atol=1e-9)

    def test_histogram_counts(self) -> None:
        bundle = emit_report([self.lindblad], self.dataset, self.temp_dir_path)
        n_samples = sum(len(x.times) for x in self.dataset.experiments)
        for path in bundle.histograms:
            rows = read_rows(path)
            self.assertEqual(len(rows), 1 + 60)
            interp = sum(int(row[2]) for row in rows[1:])
            extrap = sum(int(row[3]) for row in rows[1:])
            self.assertEqual(interp + extrap, n_samples)
            self.assertEqual(interp, 2 * 4)

    def test_without_baseline(self) -> None:
        bundle = emit_report(
            [self.lindblad, self.lindblad],
            self.dataset,
            self.temp_dir_path,
            include_baseline=False,
        )
        self.assertEqual(len(read_rows(bundle.metrics)), 3)
        self.assertEqual(len(set(bundle.histograms)), 2)

    def test_labelled_baseline_not_repeated(self) -> None:
        result = FitResult(
            model=baseline_model(CFG),
            loss_history=(),
            stage_boundary=0,
            label="Baseline",
        )
        bundle = emit_report([result, self.affine], self.dataset, self.temp_dir_path)
        rows = read_rows(bundle.metrics)
        self.assertEqual([row[0] for row in rows[1:]], ["Baseline", "Linear TCL"])

    def test_stored_evaluation_reused(self) -> None:
        evaluation = evaluate_model(self.lindblad.model, self.dataset)
        result = self.lindblad.with_evaluation(evaluation)
        bundle = emit_report(
            [result], self.dataset, self.temp_dir_path, include_baseline=False
        )
        rows = read_rows(bundle.metrics)
        self.assertAlmostEqual(
            float(rows[1][2]), evaluation.metrics.interp_mean, places=5
        )

    def test_no_results(self) -> None:
        with self.assertRaises(TclfitUsageError):
            emit_report([], self.dataset, self.temp_dir_path)

    def test_coordinate_names(self) -> None:
        self.assertEqual(coordinate_names(2), ["x", "y", "z"])
        self.assertEqual(len(coordinate_names(3)), 8)


if __name__ == "__main__":
    unittest_main()
