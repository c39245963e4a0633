# SPDX-License-Identifier: GPL-3.0-or-later
# SPDX-FileCopyrightText: 2026 tclfit contributors
from __future__ import annotations

from dataclasses import replace
from math import exp
from pathlib import Path
from tempfile import TemporaryDirectory
from unittest import TestCase
from unittest import main as unittest_main
from unittest.mock import patch

import numpy as np
from numpy.testing import assert_allclose

from tclfit.calibrate import (
    FitConfig,
    FitResult,
    GradientMethod,
    Metrics,
    ModelSpec,
    Objective,
    Stage1Config,
    Stage2Config,
    baseline_model,
    distance_histogram,
    evaluate,
    evaluate_model,
    fit,
    gradient,
    histogram_edges,
    load_model,
    load_result,
    loss,
    result_from_document,
    result_to_document,
    save_result,
)
from tclfit.coefficients import ConstantModel
from tclfit.dataset import (
    Dataset,
    ExperimentRecord,
    PulseRecord,
    SyntheticProtocol,
    generate_synthetic,
)
from tclfit.exceptions import (
    FitConfigError,
    FitInitializationError,
    HorizonError,
    InvalidConfigError,
    UnsupportedDimensionError,
)
from tclfit.generator import (
    ControlPulse,
    GeneratorForm,
    SystemConfig,
    device_coefficients,
)
from tclfit.operators import BasisKind, basis_state, bloch_compose
from tclfit.propagate import TimeGrid, propagate

MIXED = np.eye(2, dtype=complex) / 2
GROUND = basis_state(2, 0)

# Short T1/T2 so dissipation is visible within a couple of microseconds
FAST_SYSTEM = SystemConfig(t1=2.0, t2=1.0)
FAST_PROTOCOL = SyntheticProtocol(
    n_experiments=3,
    p_max_mhz=1.0,
    duration_us=2.0,
    sample_dt_us=0.05,
    integration_dt_us=0.01,
    seed=5,
)


def idle_record(duration: float) -> PulseRecord:
    return PulseRecord(
        amplitude_mhz=(0.0,),
        q_amplitude_mhz=(0.0,),
        duration_us=duration,
        rot_frequency_ghz=SystemConfig().omega,
    )


def raw_dataset(
    times: list[float],
    states: list[np.ndarray],
    t_train: float,
    initial_state: np.ndarray = MIXED,
    system: SystemConfig | None = None,
) -> Dataset:
    record = ExperimentRecord(
        experiment_id="single",
        pulse=idle_record(times[-1]),
        times=np.array(times),
        initial_state=initial_state,
        raw_states=np.stack(states),
    )
    return Dataset(
        system=system or SystemConfig(),
        experiments=(record,),
        t_train=t_train,
    )


class FastSystemCase(TestCase):
    @classmethod
    def setUpClass(cls) -> None:
        cls.truth = baseline_model(FAST_SYSTEM)
        cls.dataset = generate_synthetic(cls.truth, FAST_SYSTEM, FAST_PROTOCOL)
        cls.config = FitConfig(dt=0.01)


class TestLoss(FastSystemCase):
    def test_single_sample(self) -> None:
        dataset = raw_dataset([0.0, 0.1], [MIXED, GROUND], t_train=0.1)
        value = loss(np.zeros(6), dataset, FitConfig())
        self.assertAlmostEqual(value, 0.5, places=12)

    def test_samples_after_training_horizon_ignored(self) -> None:
        excited = basis_state(2, 1)
        dataset = raw_dataset([0.0, 0.1, 0.2], [MIXED, GROUND, excited], t_train=0.1)
        self.assertAlmostEqual(loss(np.zeros(6), dataset, FitConfig()), 0.5, places=12)

    def test_l1_penalty(self) -> None:
        params = np.array(self.truth.params) * 1.5
        plain = loss(params, self.dataset, self.config)
        penalized = loss(params, self.dataset, replace(self.config, l1_weight=0.1))
        self.assertAlmostEqual(
            penalized - plain, 0.1 * np.sum(np.abs(params)), delta=1e-12
        )

    def test_self_consistent(self) -> None:
        self.assertLess(loss(self.truth.params, self.dataset, self.config), 1e-16)

    def test_additive_over_experiments(self) -> None:
        params = np.array(self.truth.params) * 1.3
        ids = [x.experiment_id for x in self.dataset.experiments]
        whole = loss(params, self.dataset, self.config)
        first = loss(params, self.dataset.subset(ids[:1]), self.config)
        rest = loss(params, self.dataset.subset(ids[1:]), self.config)
        self.assertGreater(whole, 0.0)
        self.assertAlmostEqual(whole, first + rest, delta=1e-12 * max(1.0, whole))

    def test_threads_do_not_change_loss(self) -> None:
        params = np.array(self.truth.params) * 0.7
        serial = loss(params, self.dataset, self.config)
        threaded = loss(params, self.dataset, replace(self.config, threads=2))
        self.assertAlmostEqual(serial, threaded, delta=1e-12 * serial)

    def test_divergence_gives_infinity(self) -> None:
        params = np.array([0.0, 0.0, 0.0, -1e200, 0.0, 0.0])
        with np.errstate(all="ignore"):
            value = loss(params, self.dataset, self.config)
        self.assertEqual(value, float("inf"))

    def test_no_training_experiments(self) -> None:
        dataset = replace(
            self.dataset,
            experiments=tuple(
                replace(x, validation=True) for x in self.dataset.experiments
            ),
        )
        with self.assertRaises(InvalidConfigError):
            Objective(self.truth, dataset, self.config)


class TestGradient(FastSystemCase):
    def test_vanishes_at_exact_fit(self) -> None:
        values = gradient(self.truth.params, self.dataset, self.config)
        self.assertLessEqual(np.max(np.abs(values)), 1e-7)

    def test_dephasing_closed_form(self) -> None:
        system = SystemConfig(basis_kind=BasisKind.PAULI_QUBIT)
        t, m, gamma = 1.0, 0.4, 0.3
        plus = bloch_compose([1.0, 0.0, 0.0])
        dataset = raw_dataset(
            [0.0, t],
            [plus, bloch_compose([m, 0.0, 0.0])],
            t_train=t,
            initial_state=plus,
            system=system,
        )
        params = np.array([0.0, 0.0, 0.0, 0.0, 0.0, gamma])
        decay = exp(-2 * gamma * t)
        for method in GradientMethod:
            cfg = FitConfig(dt=0.01, gradient_method=method)
            with self.subTest(method=method):
                self.assertAlmostEqual(
                    loss(params, dataset, cfg), 0.5 * (decay - m) ** 2, delta=1e-9
                )
                values = gradient(params, dataset, cfg)
                expected = -2 * t * decay * (decay - m)
                assert_allclose(values[:4], 0.0, atol=1e-6)
                # sigma_y dissipation shrinks the x component like sigma_z
                self.assertAlmostEqual(values[4], expected, delta=1e-6)
                self.assertAlmostEqual(values[5], expected, delta=1e-6)

    def test_forward_matches_finite_difference(self) -> None:
        rng = np.random.default_rng(11)
        specs = (
            ModelSpec(),
            ModelSpec(variant="affine"),
            ModelSpec(variant="affine", settings={"state_dependent": True}),
        )
        for instance in range(50):
            spec = specs[instance % len(specs)]
            forward_cfg = replace(self.config, model=spec)
            template = spec.build(self.dataset.system, self.dataset.t_train)
            params = np.array(template.params) + 0.05 * rng.normal(
                size=template.parameter_count
            )
            objective = Objective(template, self.dataset, forward_cfg)
            finite = Objective(
                template,
                self.dataset,
                replace(forward_cfg, gradient_method=GradientMethod.FINITE_DIFFERENCE),
            )
            forward_gradient = objective.gradient(params)
            finite_gradient = finite.gradient(params)
            with self.subTest(instance=instance, variant=spec.variant):
                self.assertGreater(np.linalg.norm(forward_gradient), 0.0)
                self.assertLessEqual(
                    np.linalg.norm(forward_gradient - finite_gradient),
                    1e-4 * np.linalg.norm(forward_gradient),
                )

    def test_gradient_at_divergence(self) -> None:
        params = np.array([0.0, 0.0, 0.0, -1e200, 0.0, 0.0])
        with np.errstate(all="ignore"), self.assertRaises(FitConfigError):
            gradient(params, self.dataset, self.config)


class TestBaseline(TestCase):
    def test_excited_state_decay(self) -> None:
        cfg = SystemConfig()
        model = baseline_model(cfg)
        grid = TimeGrid(t_end=50.0, dt=0.5, sample_stride=10)
        pulse = ControlPulse.square(50.0, 0.0, cfg.omega)
        trajectory = propagate(model, pulse, cfg, basis_state(2, 1), grid)
        assert_allclose(
            trajectory.states[:, 1, 1].real,
            np.exp(-trajectory.times / 214.0),
            rtol=1e-8,
        )

    def test_constant_model(self) -> None:
        cfg = SystemConfig()
        model = baseline_model(cfg)
        self.assertIsInstance(model, ConstantModel)
        self.assertEqual(model.master_equation, "Lindblad")
        assert_allclose(model.params, [0, 0, 0, 1 / 214, 0, 1 / (4 * 32)])
        values = model.coefficients([0.0, 10.0, 49.0])
        assert_allclose(values, np.broadcast_to(model.params, values.shape))

    def test_non_qubit(self) -> None:
        with self.assertRaises(UnsupportedDimensionError):
            baseline_model(SystemConfig(dim=3, basis_kind=BasisKind.GELL_MANN))


class TestEvaluation(FastSystemCase):
    def test_histogram_edges(self) -> None:
        edges = histogram_edges()
        self.assertEqual(len(edges), 61)
        self.assertAlmostEqual(edges[1] - edges[0], 0.005)
        self.assertAlmostEqual(edges[-1], 0.3)

    def test_histogram_counts(self) -> None:
        values = [0.0, 0.0049, 0.0051, 0.299, 0.3, 0.7]
        counts = distance_histogram(values)
        self.assertEqual(counts.sum(), len(values))
        self.assertEqual(counts[0], 2)
        self.assertEqual(counts[1], 1)
        self.assertEqual(counts[-1], 3)

    def test_perfect_predictions(self) -> None:
        evaluation = evaluate(self.truth, self.dataset, dt=0.01)
        metrics = evaluation.metrics
        for value in (
            metrics.interp_mean,
            metrics.interp_std,
            metrics.extrap_mean,
            metrics.extrap_std,
        ):
            self.assertLess(value, 1e-7)

    def test_partition_at_training_horizon(self) -> None:
        evaluation = evaluate_model(self.truth, self.dataset, dt=0.01)
        times = self.dataset.experiments[0].times
        n_interp = int(np.count_nonzero(times <= self.dataset.t_train))
        self.assertIn(self.dataset.t_train, times)
        n_experiments = len(self.dataset.experiments)
        self.assertEqual(evaluation.interp_histogram.sum(), n_experiments * n_interp)
        self.assertEqual(
            evaluation.extrap_histogram.sum(),
            n_experiments * (len(times) - n_interp),
        )
        self.assertEqual(len(evaluation.series), n_experiments)

    def test_distances_in_range(self) -> None:
        wrong = ConstantModel(self.truth.form, params=np.array(self.truth.params) * 3)
        evaluation = evaluate_model(wrong, self.dataset, dt=0.01)
        self.assertGreater(evaluation.metrics.extrap_mean, 0.0)
        for series in evaluation.series:
            self.assertTrue(np.all(series.distances >= 0.0))
            self.assertTrue(np.all(series.distances <= 1.0))

    def test_empty_extrapolation(self) -> None:
        evaluation = evaluate_model(
            self.truth, self.dataset, t_train=self.dataset.horizon, dt=0.01
        )
        self.assertTrue(np.isnan(evaluation.metrics.extrap_mean))
        self.assertEqual(evaluation.extrap_histogram.sum(), 0)

    def test_uneven_sample_times(self) -> None:
        experiment = self.dataset.experiments[0]
        keep = [0, 1, 2, 5, 9, 17, 30, len(experiment.times) - 1]
        record = ExperimentRecord(
            experiment_id="uneven",
            pulse=experiment.pulse,
            times=experiment.times[keep],
            initial_state=experiment.initial_state,
            raw_states=experiment.states[keep],
        )
        dataset = Dataset(
            system=FAST_SYSTEM,
            experiments=(record,),
            t_train=self.dataset.t_train,
            drive_convention=self.dataset.drive_convention,
        )
        self.assertLess(loss(self.truth.params, dataset, self.config), 1e-16)
        metrics = evaluate_model(self.truth, dataset, dt=0.01).metrics
        self.assertLess(metrics.interp_mean, 1e-7)
        self.assertLess(metrics.extrap_mean, 1e-7)

    def test_horizon_beyond_data(self) -> None:
        with self.assertRaises(HorizonError):
            evaluate_model(self.truth, self.dataset, t_train=self.dataset.horizon + 1)


class TestFitConfig(TestCase):
    def test_defaults(self) -> None:
        cfg = FitConfig()
        self.assertEqual(cfg.stage1.max_iters, 500)
        self.assertEqual(cfg.stage1.step_size, 1e-2)
        self.assertEqual(cfg.stage2.memory, 10)
        self.assertEqual(cfg.stage2.tolerance, 1e-8)
        self.assertEqual(cfg.stage2.max_iters, 1000)

    def test_invalid(self) -> None:
        for kwargs in (
            {"l1_weight": -1.0},
            {"stage1": Stage1Config(max_iters=-1)},
            {"stage1": Stage1Config(batch=0)},
            {"stage1": Stage1Config(step_size=0.0)},
            {"stage2": Stage2Config(tolerance=0.0)},
            {"stage2": Stage2Config(memory=0)},
            {"gradient_method": "backprop"},
        ):
            with self.subTest(kwargs=kwargs):
                with self.assertRaises((InvalidConfigError, ValueError)):
                    FitConfig(**kwargs)


class TestFit(FastSystemCase):
    def start_model(self) -> ConstantModel:
        form = GeneratorForm(FAST_SYSTEM.basis)
        start = device_coefficients(SystemConfig(t1=4.0, t2=3.0))
        return ConstantModel(form, params=start)

    def test_recovers_generator(self) -> None:
        cfg = FitConfig(
            stage1=Stage1Config(max_iters=20, step_size=1e-3),
            stage2=Stage2Config(max_iters=500, tolerance=1e-12),
            dt=0.01,
        )
        template = self.start_model()
        result = fit(self.dataset, cfg, template=template)

        form = template.form
        expected = form.liouvillian(self.truth.params)
        fitted = form.liouvillian(result.theta_star)
        self.assertLess(
            np.linalg.norm(fitted - expected), 1e-2 * np.linalg.norm(expected)
        )
        self.assertLess(result.loss_history[-1], result.loss_history[0])
        self.assertIsNotNone(result.metrics)
        assert result.metrics is not None
        self.assertLess(result.metrics.interp_mean, 1e-2)

    def test_quasi_newton_stage_descends(self) -> None:
        cfg = FitConfig(
            stage1=Stage1Config(max_iters=3, step_size=1e-3),
            stage2=Stage2Config(max_iters=15),
            dt=0.01,
        )
        result = fit(self.dataset, cfg, template=self.start_model())
        stage2 = np.array(result.loss_history[result.stage_boundary :])
        self.assertGreater(len(stage2), 0)
        self.assertTrue(np.all(np.diff(stage2) <= 1e-12 * stage2[0]))
        self.assertEqual(result.stage_boundary, 4)

    def test_deterministic(self) -> None:
        cfg = FitConfig(
            stage1=Stage1Config(max_iters=5, step_size=1e-2, batch=2),
            stage2=Stage2Config(max_iters=5),
            dt=0.01,
            seed=3,
        )
        first = fit(self.dataset, cfg, template=self.start_model())
        second = fit(self.dataset, cfg, template=self.start_model())
        self.assertEqual(len(first.loss_history), len(second.loss_history))
        assert_allclose(first.theta_star, second.theta_star, rtol=0, atol=1e-12)

    def test_best_parameters_returned(self) -> None:
        cfg = FitConfig(
            stage1=Stage1Config(max_iters=10, step_size=0.1),
            stage2=Stage2Config(max_iters=0),
            dt=0.01,
        )
        result = fit(self.dataset, cfg, template=self.start_model())
        value = loss(result.theta_star, self.dataset, cfg)
        self.assertLessEqual(value, min(result.loss_history) * (1 + 1e-12))
        self.assertEqual(result.stage_boundary, len(result.loss_history))

    def test_non_finite_initial_loss(self) -> None:
        template = ConstantModel(
            GeneratorForm(FAST_SYSTEM.basis),
            params=[0.0, 0.0, 0.0, -1e200, 0.0, 0.0],
        )
        with np.errstate(all="ignore"), self.assertRaises(FitConfigError):
            fit(self.dataset, self.config, template=template)

    def test_all_steps_rejected(self) -> None:
        cfg = FitConfig(stage1=Stage1Config(max_iters=4), dt=0.01)
        with patch.object(
            Objective,
            "value_and_gradient",
            return_value=(float("inf"), np.zeros(6)),
        ):
            with self.assertRaises(FitInitializationError):
                fit(self.dataset, cfg, template=self.start_model())

    def test_rejected_step_restores_moments(self) -> None:
        cfg = FitConfig(
            stage1=Stage1Config(max_iters=3, step_size=0.1),
            stage2=Stage2Config(max_iters=0),
            dt=0.01,
        )
        start = np.array(self.start_model().params)
        slope = np.array([1.0, -2.0, 0.5, -0.25, -1.0, -3.0])
        visited: list[np.ndarray] = []

        def value_and_gradient(
            params: np.ndarray, indices: object = None
        ) -> tuple[float, np.ndarray]:
            visited.append(np.array(params))
            return (float("inf") if len(visited) == 2 else 1.0), slope

        with patch.object(
            Objective, "value_and_gradient", side_effect=value_and_gradient
        ):
            fit(self.dataset, cfg, template=self.start_model())

        # One Adam step from fresh moments moves by the sign of the slope
        direction = slope / (np.abs(slope) + cfg.stage1.epsilon)
        self.assertEqual(len(visited), 3)
        assert_allclose(visited[0], start, atol=0.0)
        assert_allclose(visited[1], start - 0.1 * direction, atol=1e-15)
        assert_allclose(visited[2], start - 0.05 * direction, atol=1e-15)


class TestDeviceScaleRecovery(TestCase):
    system: SystemConfig
    dataset: Dataset

    @classmethod
    def setUpClass(cls) -> None:
        cls.system = SystemConfig(t1=214.0, t2=32.0)
        protocol = SyntheticProtocol(
            n_experiments=8,
            duration_us=50.0,
            sample_dt_us=0.04,
            integration_dt_us=0.04,
            t_train_us=25.0,
            seed=21,
        )
        truth = baseline_model(cls.system)
        cls.dataset = generate_synthetic(truth, cls.system, protocol)

    def test_recovers_device_rates(self) -> None:
        cfg = FitConfig(
            stage1=Stage1Config(max_iters=0),
            stage2=Stage2Config(max_iters=1000, tolerance=1e-12),
            dt=0.04,
        )
        start = device_coefficients(SystemConfig(t1=250.0, t2=40.0))
        template = ConstantModel(GeneratorForm(self.system.basis), params=start)
        result = fit(self.dataset, cfg, template=template)

        self.assertEqual(self.dataset.t_train, 25.0)
        self.assertEqual(len(self.dataset.experiments), 8)
        self.assertAlmostEqual(result.theta_star[3], 1 / 214.0, delta=0.01 / 214.0)
        self.assertAlmostEqual(4 * result.theta_star[5], 1 / 32.0, delta=0.01 / 32.0)


# Rates of the modulated truth complete one period over the training window
MODULATED_PROTOCOL = SyntheticProtocol(
    n_experiments=4,
    p_max_mhz=1.0,
    duration_us=4.0,
    sample_dt_us=0.1,
    integration_dt_us=0.02,
    t_train_us=2.0,
    seed=9,
)


def window_fit_config(spec: ModelSpec) -> FitConfig:
    return FitConfig(
        model=spec,
        stage1=Stage1Config(max_iters=0),
        stage2=Stage2Config(max_iters=300, tolerance=1e-10),
        dt=0.02,
    )


class TestNonMarkovianOrdering(TestCase):
    dataset: Dataset
    baseline: Metrics
    fitted: dict[str, Metrics]

    @classmethod
    def setUpClass(cls) -> None:
        modulation = {"period": 2.0, "depth": 0.5}
        truth_spec = ModelSpec(variant="modulated", settings=modulation)
        truth = truth_spec.build(FAST_SYSTEM, MODULATED_PROTOCOL.t_train)
        cls.dataset = generate_synthetic(truth, FAST_SYSTEM, MODULATED_PROTOCOL)
        cls.baseline = evaluate_model(
            baseline_model(FAST_SYSTEM), cls.dataset, dt=0.02
        ).metrics
        cls.fitted = {}
        for variant, settings in (
            ("constant", {}),
            ("affine", {}),
            ("kl-exp", {"order": 4}),
            ("kl-sqexp", {"order": 4}),
        ):
            spec = ModelSpec(variant=variant, settings=settings)
            result = fit(cls.dataset, window_fit_config(spec))
            assert result.metrics is not None
            cls.fitted[variant] = result.metrics

    def test_kl_halves_lindblad_error(self) -> None:
        self.assertLessEqual(
            self.fitted["kl-sqexp"].interp_mean,
            0.5 * self.fitted["constant"].interp_mean,
        )

    def test_tcl_variants_beat_baseline(self) -> None:
        self.assertGreater(self.baseline.interp_mean, 0.0)
        for variant in ("affine", "kl-exp", "kl-sqexp"):
            with self.subTest(variant=variant):
                self.assertLess(
                    self.fitted[variant].interp_mean, self.baseline.interp_mean
                )


class TestKarhunenLoeveRecovery(TestCase):
    def test_recovers_coefficient_trajectory(self) -> None:
        protocol = replace(MODULATED_PROTOCOL, duration_us=2.0)
        spec = ModelSpec(variant="kl-sqexp", settings={"order": 2, "kappa": 0.5})
        template = spec.build(FAST_SYSTEM, protocol.t_train)
        expansion = template.unpack()["expansion"].copy()
        expansion[3, 1] = 0.15
        expansion[5, 2] = 0.1
        truth = template.with_params(template.pack({"expansion": expansion}))
        dataset = generate_synthetic(truth, FAST_SYSTEM, protocol)

        cfg = window_fit_config(spec)
        cfg = replace(cfg, stage2=replace(cfg.stage2, max_iters=1000))
        result = fit(dataset, cfg)

        times = np.linspace(0.0, protocol.t_train, 41)
        expected = truth.coefficients(times)
        recovered = result.model.coefficients(times)
        self.assertLessEqual(
            np.max(np.abs(recovered - expected)), 0.05 * np.max(np.abs(expected))
        )


class TestL1Sweep(FastSystemCase):
    def test_weight_sweep_shrinks_parameters(self) -> None:
        norms = []
        active = []
        for weight in (0.0, 1e-2, 1e-1):
            cfg = FitConfig(
                model=ModelSpec(variant="affine"),
                stage1=Stage1Config(max_iters=0),
                stage2=Stage2Config(max_iters=200, tolerance=1e-10),
                dt=0.01,
                l1_weight=weight,
            )
            theta = fit(self.dataset, cfg).theta_star
            norms.append(float(np.sum(np.abs(theta))))
            active.append(int(np.count_nonzero(np.abs(theta) > 1e-3)))

        self.assertTrue(np.all(np.diff(norms) <= 1e-6), norms)
        self.assertTrue(np.all(np.diff(active) <= 0), active)


class TestResultDocuments(TestCase):
    def setUp(self) -> None:
        self.temp_dir = TemporaryDirectory()
        self.addCleanup(self.temp_dir.cleanup)
        self.temp_dir_path = Path(self.temp_dir.name)

        self.result = FitResult(
            model=baseline_model(SystemConfig()),
            loss_history=(1.0, 0.5, 0.25),
            stage_boundary=2,
            label="Baseline",
            metrics=Metrics(0.09, 0.0423, 0.13, 0.037),
        )

    def test_document(self) -> None:
        document = result_to_document(self.result)
        self.assertEqual(document["tclfit"]["kind"], "result")
        self.assertEqual(document["result"]["master_equation"], "Lindblad")

        loaded = result_from_document(document)
        assert_allclose(loaded.theta_star, self.result.theta_star)
        self.assertEqual(loaded.loss_history, self.result.loss_history)
        self.assertEqual(loaded.stage_boundary, 2)
        self.assertEqual(loaded.label, "Baseline")
        self.assertEqual(loaded.metrics, self.result.metrics)

    def test_files(self) -> None:
        path = self.temp_dir_path / "result.toml"
        save_result(self.result, path)

        loaded = load_result(path)
        self.assertEqual(loaded.metrics, self.result.metrics)
        assert_allclose(loaded.theta_star, self.result.theta_star)

        model = load_model(path)
        self.assertIsInstance(model, ConstantModel)
        assert_allclose(model.params, self.result.theta_star)

    def test_invalid_metrics(self) -> None:
        document = result_to_document(self.result)
        document["result"]["metrics"] = {"interpolation_mean": 0.1}
        with self.assertRaises(InvalidConfigError):
            result_from_document(document)


if __name__ == "__main__":
    unittest_main()
