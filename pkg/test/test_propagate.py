# SPDX-License-Identifier: GPL-3.0-or-later
# SPDX-FileCopyrightText: 2026 tclfit contributors
from __future__ import annotations

from unittest import TestCase
from unittest import main as unittest_main

import numpy as np
from numpy.testing import assert_allclose

from tclfit.coefficients import AffineModel, ConstantModel
from tclfit.exceptions import (
    DatasetValidationError,
    DimensionError,
    InvalidConfigError,
    PropagationDivergenceError,
    UnsupportedModelError,
)
from tclfit.generator import (
    ControlPulse,
    GeneratorForm,
    GeneratorMode,
    SystemConfig,
    control_hamiltonian,
    hamiltonian_superoperator,
)
from tclfit.operators import BasisKind, basis_state, devectorize, make_basis, vectorize
from tclfit.propagate import (
    TimeGrid,
    Trajectory,
    choi_matrix,
    compose_step_maps,
    exponential_propagator,
    is_completely_positive,
    max_structure_drift,
    propagate,
    propagate_batch,
    propagate_vectors,
    propagate_with_sensitivities,
    step_map,
    step_maps,
)

CFG = SystemConfig()
PAULI_FORM = GeneratorForm(make_basis(2, BasisKind.PAULI_QUBIT))
PLUS = np.full((2, 2), 0.5, dtype=complex)


def idle_pulse(duration: float = 100.0, amplitude: float = 0.0) -> ControlPulse:
    return ControlPulse.square(duration, amplitude, CFG.omega)


def random_state(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


class TestTimeGrid(TestCase):
    def test_sample_times(self) -> None:
        grid = TimeGrid(t_end=1.0, dt=0.1, sample_stride=5)
        self.assertEqual(grid.n_steps, 10)
        assert_allclose(grid.sample_times, [0.0, 0.5, 1.0])
        self.assertEqual(len(grid.stage_times), 21)

    def test_for_samples(self) -> None:
        times = np.arange(11) * 0.04
        grid = TimeGrid.for_samples(times, dt=0.004)
        self.assertEqual(grid.sample_stride, 10)
        self.assertAlmostEqual(grid.dt, 0.004)
        assert_allclose(grid.sample_times, times, atol=1e-12)

        coarse = TimeGrid.for_samples(times)
        self.assertEqual(coarse.sample_stride, 1)
        self.assertAlmostEqual(coarse.dt, 0.04)

    def test_uneven_samples(self) -> None:
        times = np.array([0.0, 0.1, 0.25, 0.3, 0.7])
        grid = TimeGrid.for_samples(times, dt=0.1)
        assert_allclose(grid.sample_times, times, atol=0.0)
        assert_allclose(
            grid.step_times, [0.0, 0.1, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.7]
        )
        self.assertEqual(grid.n_steps, 8)
        self.assertLessEqual(np.max(grid.step_sizes), 0.1 + 1e-12)
        assert_allclose(
            grid.stage_times[1::2], grid.step_times[:-1] + grid.step_sizes / 2
        )
        self.assertEqual(int(np.count_nonzero(grid.sample_mask)), 5)

        bare = TimeGrid.for_samples(times)
        assert_allclose(bare.step_times, times, atol=0.0)
        assert_allclose(bare.sample_indices, np.arange(5))

    def test_invalid(self) -> None:
        with self.assertRaises(InvalidConfigError):
            TimeGrid(t_end=1.0, dt=0.0)

        with self.assertRaises(InvalidConfigError):
            TimeGrid(t_end=1.0, dt=0.3)

        with self.assertRaises(InvalidConfigError):
            TimeGrid(t_end=1.0, dt=0.1, sample_stride=0)

        with self.assertRaises(DatasetValidationError):
            TimeGrid.for_samples([0.0, 0.2, 0.1])

        with self.assertRaises(InvalidConfigError):
            TimeGrid(t_end=1.0, boundaries=(0.0, 0.6, 0.5, 1.0), sampled=(0, 3))

        with self.assertRaises(InvalidConfigError):
            TimeGrid(t_end=1.0, boundaries=(0.0, 0.5, 1.0), sampled=(1, 2))

    def test_trajectory_lengths(self) -> None:
        with self.assertRaises(DimensionError):
            Trajectory(times=np.zeros(3), states=np.zeros((2, 2, 2)))


class TestPropagation(TestCase):
    def setUp(self) -> None:
        self.rng = np.random.default_rng(12)

    def test_zero_generator(self) -> None:
        rho = random_state(self.rng)
        trajectory = propagate(
            ConstantModel(PAULI_FORM), idle_pulse(), CFG, rho, TimeGrid(t_end=1.0)
        )
        self.assertEqual(len(trajectory), 251)
        for state in trajectory.states:
            assert_allclose(state, rho, atol=1e-14)

    def test_pure_dephasing(self) -> None:
        gamma = 2.0
        model = ConstantModel(PAULI_FORM, params=[0, 0, 0, 0, 0, gamma])
        grid = TimeGrid(t_end=1.0, dt=1e-3 / gamma, sample_stride=50)
        trajectory = propagate(model, idle_pulse(), CFG, PLUS, grid)
        assert_allclose(
            np.abs(trajectory.states[:, 0, 1]),
            0.5 * np.exp(-2 * gamma * trajectory.times),
            atol=1e-8,
        )
        assert_allclose(trajectory.states[:, 0, 0], 0.5, atol=1e-12)

    def test_matches_matrix_exponential(self) -> None:
        model = ConstantModel(PAULI_FORM, params=[0.4, -0.3, 0.8, 0.3, 0.2, 0.5])
        pulse = idle_pulse(amplitude=0.6)
        generator = model.form.liouvillian(model.params) + hamiltonian_superoperator(
            control_hamiltonian(0.0, pulse, CFG)
        )
        rho = random_state(self.rng)
        exact = exponential_propagator(generator, 2.0) @ vectorize(rho)

        steps = (0.1, 0.05, 0.025, 0.0125)
        errors = []
        for dt in steps:
            vectors = propagate_vectors(
                model, [pulse], CFG, [rho], TimeGrid(t_end=2.0, dt=dt)
            )
            errors.append(np.max(np.abs(vectors[0, -1] - exact)))

        slope = np.polyfit(np.log(steps), np.log(errors), 1)[0]
        self.assertAlmostEqual(slope, 4.0, delta=0.3)
        self.assertLess(errors[-1], 1e-7)

    def test_uneven_samples_match_matrix_exponential(self) -> None:
        model = ConstantModel(PAULI_FORM, params=[0.4, -0.3, 0.8, 0.3, 0.2, 0.5])
        pulse = idle_pulse(amplitude=0.6)
        generator = model.form.liouvillian(model.params) + hamiltonian_superoperator(
            control_hamiltonian(0.0, pulse, CFG)
        )
        rho = random_state(self.rng)
        times = np.array([0.0, 0.13, 0.4, 0.45, 1.1])
        grid = TimeGrid.for_samples(times, dt=0.01)

        vectors = propagate_vectors(model, [pulse], CFG, [rho], grid)[0]
        self.assertEqual(len(vectors), len(times))
        for t, vector in zip(times, vectors):
            exact = exponential_propagator(generator, t) @ vectorize(rho)
            with self.subTest(t=t):
                assert_allclose(vector, exact, atol=1e-6)

        staged = propagate_with_sensitivities(model, [pulse], CFG, [rho], grid)
        assert_allclose(staged.states[0], vectors, atol=1e-12)
        assert_allclose(staged.sample_times, times, atol=0.0)

    def test_structure_preserved(self) -> None:
        model = ConstantModel.create(
            GeneratorForm(CFG.basis),
            initial=[0.0, 0.0, 0.0, 1 / 214.0, 0.0, 1 / 128.0],
        )
        pulse = ControlPulse(
            duration=50.0,
            p_levels=(20.0, -15.0),
            q_levels=(5.0, 0.0),
            rot_frequency=CFG.omega,
        )
        grid = TimeGrid(t_end=50.0, sample_stride=25)
        self.assertGreaterEqual(grid.n_steps, 10_000)
        vectors = propagate_vectors(model, [pulse], CFG, [basis_state(2, 0)], grid)
        trace_error, hermiticity = max_structure_drift(vectors)
        self.assertLessEqual(trace_error, 1e-9)
        self.assertLessEqual(hermiticity, 1e-10)

    def test_linearity(self) -> None:
        form = GeneratorForm(make_basis(2))
        model = ConstantModel(form, params=self.rng.normal(size=6) * 0.3)
        first = random_state(self.rng)
        second = random_state(self.rng)
        grid = TimeGrid(t_end=0.5, dt=0.01)
        pulse = idle_pulse(amplitude=1.0)
        combined, a, b = (
            propagate_vectors(model, [pulse], CFG, [rho], grid)[0]
            for rho in (0.3 * first - 1.7 * second, first, second)
        )
        assert_allclose(combined, 0.3 * a - 1.7 * b, atol=1e-10)

    def test_batch_matches_single(self) -> None:
        model = ConstantModel(PAULI_FORM, params=[0.1, 0.0, 0.2, 0.05, 0.05, 0.1])
        pulses = [idle_pulse(amplitude=a) for a in (0.0, 1.0, 2.5)]
        states = [random_state(self.rng) for _ in pulses]
        grid = TimeGrid(t_end=0.4, dt=0.02, sample_stride=4)
        batch = propagate_batch(model, pulses, CFG, states, grid, ["a", "b", "c"])
        self.assertEqual([t.experiment_id for t in batch], ["a", "b", "c"])
        for trajectory, pulse, rho in zip(batch, pulses, states):
            single = propagate(model, pulse, CFG, rho, grid)
            assert_allclose(trajectory.states, single.states, atol=1e-14)
            assert_allclose(trajectory.times, [0.0, 0.08, 0.16, 0.24, 0.32, 0.4])

    def test_state_dependent_matches_linear_path(self) -> None:
        form = GeneratorForm(make_basis(2))
        linear = AffineModel(form, AffineModel.Settings(time_scale=0.5))
        linear = linear.with_params(self.rng.normal(size=12) * 0.2)
        nonlinear = AffineModel(
            form, AffineModel.Settings(state_dependent=True, time_scale=0.5)
        )
        blocks = linear.unpack()
        weights = np.zeros((6, 5))
        weights[:, 4] = blocks["weights"][:, 0]
        nonlinear = nonlinear.with_params(
            nonlinear.pack({"weights": weights, "bias": blocks["bias"]})
        )
        rho = random_state(self.rng)
        grid = TimeGrid(t_end=0.5, dt=0.01)
        pulse = idle_pulse(amplitude=0.7)
        assert_allclose(
            propagate_vectors(nonlinear, [pulse], CFG, [rho], grid),
            propagate_vectors(linear, [pulse], CFG, [rho], grid),
            atol=1e-12,
        )

    def test_divergence(self) -> None:
        model = ConstantModel(PAULI_FORM, params=[0, 0, 0, 0, 0, -1e200])
        with np.errstate(all="ignore"):
            with self.assertRaises(PropagationDivergenceError) as context:
                propagate_vectors(
                    model, [idle_pulse()], CFG, [PLUS], TimeGrid(t_end=0.1, dt=0.01)
                )
        self.assertEqual(context.exception.step, 1)

    def test_renormalization_logged(self) -> None:
        model = ConstantModel(PAULI_FORM)
        with self.assertLogs("tclfit.propagate", "WARNING"):
            trajectory = propagate(
                model, idle_pulse(), CFG, 2 * basis_state(2, 0), TimeGrid(t_end=0.1)
            )
        assert_allclose(trajectory.states[0], basis_state(2, 0))

    def test_dimension_checks(self) -> None:
        model = ConstantModel(GeneratorForm(make_basis(3)))
        with self.assertRaises(DimensionError):
            propagate(model, idle_pulse(), CFG, PLUS, TimeGrid(t_end=0.1))

        with self.assertRaises(DimensionError):
            propagate_vectors(
                ConstantModel(PAULI_FORM),
                [idle_pulse(), idle_pulse()],
                CFG,
                [PLUS],
                TimeGrid(t_end=0.1),
            )


class TestStepMaps(TestCase):
    def setUp(self) -> None:
        self.model = ConstantModel(
            GeneratorForm(make_basis(2), GeneratorMode.GENERAL_GAMMA),
            params=[0.3, -0.2, 0.5, 0.4, 0.1, -0.2, 0.3, 0.05, 0.6],
        )
        self.pulse = idle_pulse(amplitude=1.2)

    def test_first_order_limit(self) -> None:
        dt = 1e-6
        generator = self.model.form.liouvillian(
            self.model.params
        ) + hamiltonian_superoperator(control_hamiltonian(0.3, self.pulse, CFG))
        assert_allclose(
            step_map(self.model, self.pulse, CFG, 0.3, dt),
            np.eye(4) + dt * generator,
            atol=1e-9,
        )

    def test_identity(self) -> None:
        maps = step_maps(self.model, self.pulse, CFG, TimeGrid(t_end=0.0))
        self.assertEqual(maps.shape, (0, 4, 4))
        assert_allclose(compose_step_maps(maps), np.eye(4))
        assert_allclose(compose_step_maps([], dim=2), np.eye(4))

    def test_semigroup(self) -> None:
        maps = step_maps(self.model, self.pulse, CFG, TimeGrid(t_end=0.2, dt=0.01))
        assert_allclose(
            compose_step_maps(maps),
            compose_step_maps(maps[7:]) @ compose_step_maps(maps[:7]),
            atol=1e-12,
        )

    def test_composed_maps_propagate(self) -> None:
        grid = TimeGrid(t_end=0.2, dt=0.01)
        rho = random_state(np.random.default_rng(6))
        composed = compose_step_maps(step_maps(self.model, self.pulse, CFG, grid))
        vectors = propagate_vectors(self.model, [self.pulse], CFG, [rho], grid)
        assert_allclose(composed @ vectorize(rho), vectors[0, -1], atol=1e-13)

    def test_completely_positive(self) -> None:
        rng = np.random.default_rng(30)
        form = GeneratorForm(make_basis(2), GeneratorMode.GENERAL_GAMMA)
        for _ in range(20):
            model = ConstantModel(form, params=rng.normal(size=9))
            horizon = 0.005 * int(rng.integers(40, 300))
            grid = TimeGrid(t_end=horizon, dt=0.005)
            maps = step_maps(model, self.pulse, CFG, grid)
            with self.subTest(horizon=horizon):
                self.assertTrue(is_completely_positive(compose_step_maps(maps)))

    def test_choi(self) -> None:
        identity_choi = choi_matrix(np.eye(4))
        assert_allclose(np.linalg.eigvalsh(identity_choi), [0, 0, 0, 2], atol=1e-14)

        transpose = np.zeros((4, 4))
        for i in range(2):
            for j in range(2):
                transpose[i + 2 * j, j + 2 * i] = 1.0
        rho = random_state(np.random.default_rng(1))
        assert_allclose(devectorize(transpose @ vectorize(rho)), rho.T)
        self.assertFalse(is_completely_positive(transpose))

    def test_state_dependent_unsupported(self) -> None:
        model = AffineModel(
            GeneratorForm(make_basis(2)), AffineModel.Settings(state_dependent=True)
        )
        with self.assertRaises(UnsupportedModelError):
            step_map(model, self.pulse, CFG, 0.0, 0.01)


class TestSensitivities(TestCase):
    def setUp(self) -> None:
        self.rng = np.random.default_rng(77)
        self.pulses = [idle_pulse(amplitude=0.8), idle_pulse(amplitude=-0.4)]
        self.states = [random_state(self.rng), basis_state(2, 0)]
        self.grid = TimeGrid(t_end=0.3, dt=0.02, sample_stride=3)

    def _check(self, model: ConstantModel | AffineModel) -> None:
        result = propagate_with_sensitivities(
            model, self.pulses, CFG, self.states, self.grid
        )
        assert_allclose(
            result.states,
            propagate_vectors(model, self.pulses, CFG, self.states, self.grid),
            atol=1e-13,
        )
        step = 1e-6
        for index in range(model.parameter_count):
            shift = np.zeros(model.parameter_count)
            shift[index] = step
            upper, lower = (
                propagate_vectors(
                    model.with_params(model.params + sign * shift),
                    self.pulses,
                    CFG,
                    self.states,
                    self.grid,
                )
                for sign in (1.0, -1.0)
            )
            with self.subTest(parameter=index):
                assert_allclose(
                    result.sensitivities[..., index],
                    (upper - lower) / (2 * step),
                    atol=1e-7,
                )

    def test_constant(self) -> None:
        form = GeneratorForm(make_basis(2), GeneratorMode.GENERAL_GAMMA)
        self._check(ConstantModel(form, params=self.rng.normal(size=9) * 0.5))

    def test_positive_rates(self) -> None:
        form = GeneratorForm(make_basis(2), positive_rates=True)
        self._check(ConstantModel(form, params=self.rng.normal(size=6)))

    def test_state_dependent(self) -> None:
        model = AffineModel(
            GeneratorForm(make_basis(2)),
            AffineModel.Settings(state_dependent=True, time_scale=0.3),
        )
        self._check(model.with_params(self.rng.normal(size=36) * 0.5))


if __name__ == "__main__":
    unittest_main()
