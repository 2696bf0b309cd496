import math
import sys
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

PROJECT_ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(PROJECT_ROOT / "src"))

import numpy as np

from common.errors import DivergenceError, ParameterError, SimulationFailure, StateError, StepSizeError
from domains.boussinesq.checkpoint import load_checkpoint, save_checkpoint
from domains.boussinesq.params import SimParams, auto_resolution, auto_time_step
from domains.boussinesq.run import advance, instantaneous_nusselt, run
from domains.boussinesq.solver import conduction_state, courant_number, init_state, state_from_physical, step
from domains.boussinesq.stability import critical_rayleigh, linear_growth_rate
from domains.spectral.transforms import to_physical


def small_params(**overrides: object) -> SimParams:
    values: dict = {"Ra": 1e3, "Pr": 1.0, "Nx": 16, "Nz": 9, "dt": 1e-3, "t_end": 0.02, "sample_every": 2}
    values.update(overrides)
    return SimParams(**values)


class SimParamsTests(unittest.TestCase):
    def test_rayleigh_must_be_positive_and_finite(self) -> None:
        with self.assertRaises(ParameterError):
            small_params(Ra=0.0)
        with self.assertRaises(ParameterError):
            small_params(Ra=math.inf)

    def test_infinite_prandtl_is_allowed(self) -> None:
        params = small_params(Pr=math.inf)

        self.assertTrue(params.infinite_prandtl)
        self.assertEqual(params.inverse_pr, 0.0)

    def test_step_counts(self) -> None:
        params = small_params(t_end=0.1, transient_fraction=0.3)

        self.assertEqual(params.n_steps, 100)
        self.assertEqual(params.transient_steps, 30)

    def test_auto_resolution_has_a_floor(self) -> None:
        self.assertEqual(auto_resolution(1e4), (64, 33))
        nx, nz = auto_resolution(1e9)
        self.assertGreater(nx, 64)
        self.assertEqual(nx % 2, 0)
        self.assertEqual(nz, nx // 2 + 1)

    def test_auto_time_step_shrinks_with_rayleigh(self) -> None:
        self.assertLess(auto_time_step(1e8, 1.0, 2.0, 64, 33), auto_time_step(1e5, 1.0, 2.0, 64, 33))

    def test_auto_time_step_charges_the_vertical_spacing(self) -> None:
        horizontal_only = 0.35 * (2.0 / 128) / (0.5 * math.sqrt(1e5))
        dt = auto_time_step(1e5, 1.0, 2.0, 128, 65)

        self.assertLess(dt, 0.7 * horizontal_only)
        self.assertLess(auto_time_step(1e5, 1.0, 2.0, 128, 129), dt)


class SolverTests(unittest.TestCase):
    def test_conduction_is_a_steady_state(self) -> None:
        params = small_params()
        state = conduction_state(params)
        advanced = step(step(state, params), params)

        np.testing.assert_allclose(advanced.T.coefficients, state.T.coefficients, atol=1e-12)
        np.testing.assert_allclose(advanced.psi.coefficients, 0.0, atol=1e-12)
        self.assertAlmostEqual(advanced.t, 2e-3)
        self.assertEqual(advanced.step_index, 2)

    def test_conduction_state_has_unit_nusselt(self) -> None:
        self.assertAlmostEqual(instantaneous_nusselt(conduction_state(small_params())), 1.0, places=10)

    def test_grid_mismatch_is_a_state_error(self) -> None:
        state = conduction_state(small_params())
        with self.assertRaises(StateError):
            step(state, small_params(Nx=32))

    def test_step_above_cfl_limit_is_rejected(self) -> None:
        params = small_params(dt=1e-2)
        grid = params.grid
        x = grid.x_nodes[:, np.newaxis]
        z = grid.z_nodes[np.newaxis, :]
        T = np.ones((grid.Nx, grid.Nz)) * (1.0 - z)
        psi = 1e4 * np.sin(2.0 * np.pi * x / grid.L) * (z * (1.0 - z)) ** 2
        state = state_from_physical(T, psi, grid)

        self.assertGreater(courant_number(state, params.dt), params.cfl_limit)
        with self.assertRaises(StepSizeError):
            step(state, params)

    def test_initial_state_is_bounded_and_seeded(self) -> None:
        params = small_params()
        first = init_state(params, seed=7, amplitude=0.1)
        again = init_state(params, seed=7, amplitude=0.1)
        other = init_state(params, seed=8, amplitude=0.1)
        T = to_physical(first.T.coefficients, first.grid)

        self.assertGreaterEqual(T.min(), -1e-12)
        self.assertLessEqual(T.max(), 1.0 + 1e-12)
        np.testing.assert_array_equal(first.T.coefficients, again.T.coefficients)
        self.assertFalse(np.allclose(first.T.coefficients, other.T.coefficients))

    def test_zero_amplitude_is_conduction(self) -> None:
        params = small_params()
        np.testing.assert_array_equal(
            init_state(params, seed=3, amplitude=0.0).T.coefficients, conduction_state(params).T.coefficients
        )

    def test_perturbation_decays_below_onset(self) -> None:
        for Pr in (1.0, math.inf):
            params = small_params(Ra=100.0, Pr=Pr, Nz=17)
            state = init_state(params, seed=1, amplitude=0.05)
            initial = np.max(np.abs(to_physical(state.theta, state.grid)))
            for _ in range(200):
                state = step(state, params)
            final = np.max(np.abs(to_physical(state.theta, state.grid)))

            self.assertLess(final, 0.5 * initial, msg=f"Pr={Pr}")


class RunTests(unittest.TestCase):
    def test_samples_are_taken_after_the_transient(self) -> None:
        trajectory = run(small_params(), seed=0, amplitude=1e-2)

        self.assertEqual(len(trajectory.times), 7)
        self.assertEqual(trajectory.averages.count, 7)
        self.assertAlmostEqual(float(trajectory.times[-1]), 0.02)
        self.assertTrue(np.all(np.abs(trajectory.nu_series - 1.0) < 0.1))

    def test_step_failure_becomes_a_simulation_failure(self) -> None:
        with patch("domains.boussinesq.run.step", side_effect=DivergenceError(message="non-finite temperature")):
            with self.assertRaises(SimulationFailure) as context:
                run(small_params(), seed=0, amplitude=1e-2)

        self.assertAlmostEqual(context.exception.time, 1e-3)
        self.assertIn("non-finite", context.exception.cause or "")

    def test_fast_flow_is_advanced_in_substeps(self) -> None:
        grid = small_params().grid
        x = grid.x_nodes[:, np.newaxis]
        z = grid.z_nodes[np.newaxis, :]
        psi = 10.0 * np.sin(2.0 * np.pi * x / grid.L) * (z * (1.0 - z)) ** 2
        state = state_from_physical(np.ones((grid.Nx, grid.Nz)) * (1.0 - z), psi, grid)
        params = small_params(dt=3.0 * 0.5 / courant_number(state, 1.0))

        with self.assertRaises(StepSizeError):
            step(state, params)
        advanced = advance(state, params)

        self.assertEqual(advanced.step_index, 1)
        self.assertAlmostEqual(advanced.t, params.dt)
        self.assertIsNone(advanced.history)
        self.assertTrue(np.all(np.isfinite(advanced.psi.coefficients)))

    def test_slow_flow_takes_a_single_step(self) -> None:
        params = small_params()
        state = conduction_state(params)

        np.testing.assert_array_equal(advance(state, params).T.coefficients, step(state, params).T.coefficients)

    def test_temperature_extrema_cover_every_step(self) -> None:
        clean: dict[int, object] = {}

        def overshooting(state, params):
            state = clean.pop(state.step_index, state)
            advanced = step(state, params)
            if advanced.step_index != 2:
                return advanced
            clean[2] = advanced
            spike = advanced.T.coefficients.copy()
            spike[0] += 0.5
            return advanced.model_copy(update={"T": advanced.T.with_coefficients(spike)})

        params = small_params()
        with patch("domains.boussinesq.run.step", side_effect=overshooting):
            trajectory = run(params, seed=0, amplitude=1e-2)

        self.assertLess(2, params.transient_steps)
        self.assertGreater(trajectory.T_max, 1.4)
        self.assertLess(trajectory.T_min, 1e-2)

    def test_initial_state_counts_towards_extrema(self) -> None:
        params = small_params()
        initial = conduction_state(params)
        spike = initial.T.coefficients.copy()
        spike[0] -= 0.25
        start = initial.model_copy(update={"T": initial.T.with_coefficients(spike)})
        trajectory = run(params, seed=0, amplitude=0.0, initial=start)

        self.assertLess(trajectory.T_min, -0.2)

    def test_checkpoints_are_written_periodically(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            run(small_params(checkpoint_every=5), seed=0, amplitude=1e-2, checkpoint_dir=Path(tmp))
            written = sorted(path.name for path in Path(tmp).iterdir())

        self.assertEqual(written, [f"step_{n:08d}.npz" for n in (5, 10, 15, 20)])


class CheckpointTests(unittest.TestCase):
    def test_saved_state_loads_back(self) -> None:
        params = small_params(Pr=math.inf)
        state = step(init_state(params, seed=2, amplitude=0.05), params)
        with tempfile.TemporaryDirectory() as tmp:
            path = save_checkpoint(Path(tmp) / "state.npz", state, params)
            loaded, loaded_params = load_checkpoint(path).unwrap()

        self.assertTrue(loaded_params.infinite_prandtl)
        self.assertEqual((loaded_params.Nx, loaded_params.Nz, loaded_params.dt), (16, 9, 1e-3))
        self.assertEqual(loaded.step_index, 1)
        np.testing.assert_array_equal(loaded.T.coefficients, state.T.coefficients)
        self.assertIsNotNone(loaded.history)

    def test_missing_checkpoint_is_an_input_error(self) -> None:
        self.assertTrue(load_checkpoint(Path("/nonexistent/state.npz")).is_err)


class StabilityTests(unittest.TestCase):
    def test_growth_rate_changes_sign_across_onset(self) -> None:
        params = SimParams(Ra=1600.0, Pr=1.0, Nz=33)

        self.assertLess(linear_growth_rate(params, 3.117), 0.0)
        self.assertGreater(linear_growth_rate(params.model_copy(update={"Ra": 1800.0}), 3.117), 0.0)

    def test_wavenumber_must_be_positive(self) -> None:
        with self.assertRaises(ParameterError):
            linear_growth_rate(SimParams(Ra=1700.0, Pr=1.0), 0.0)

    def test_critical_rayleigh_of_no_slip_layer(self) -> None:
        critical = critical_rayleigh(SimParams(Ra=1690.0, Pr=1.0, Nz=33))

        self.assertTrue(1700.0 < critical.Ra < 1715.0)
        self.assertAlmostEqual(critical.k, 3.117, delta=0.02)


if __name__ == "__main__":
    unittest.main()
