import math
import sys
import unittest
from pathlib import Path

PROJECT_ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(PROJECT_ROOT / "src"))

import numpy as np

from common.errors import InputError, ParameterError, StateError
from domains.boussinesq.params import SimParams
from domains.boussinesq.solver import conduction_state, state_from_physical
from domains.diagnostics.averages import TimeAverages, averages_of, plateau_reached
from domains.diagnostics.bounds import (
    bound_check,
    bound_shape,
    boundary_layer_bound,
    branch_of,
    delta_bruteforce,
    delta_choice,
)
from domains.diagnostics.hardy import dissipation_integral, hardy_nonlinearity_ratio
from domains.diagnostics.norms import sup_norm, weighted_interpolation_norm, weighted_norm
from domains.diagnostics.nusselt import nusselt_plane, nusselt_report, nusselt_volume
from domains.diagnostics.quadrature import singular_integral, singular_weights
from domains.spectral.grid import Grid


def brute_force_k(profile: np.ndarray, z: np.ndarray, kind: str, samples: int = 20001) -> float:
    weights = singular_weights(z, kind)  # type: ignore[arg-type]
    finite = np.isfinite(weights)
    floor = float(np.max(profile[~finite], initial=0.0))
    thresholds = np.linspace(floor, float(np.max(profile)), samples)
    excess = np.maximum(profile[finite][np.newaxis, :] - thresholds[:, np.newaxis], 0.0)
    return float(np.min(thresholds + excess @ weights[finite]))


class QuadratureTests(unittest.TestCase):
    def setUp(self) -> None:
        self.z = Grid(L=2.0, Nx=8, Nz=17).z_nodes

    def test_linear_integrands_are_exact(self) -> None:
        self.assertAlmostEqual(singular_integral(self.z, self.z, "upper"), 1.0, places=12)
        self.assertAlmostEqual(singular_integral(1.0 - self.z, self.z, "lower"), 1.0, places=12)

    def test_nonvanishing_integrand_at_pole_is_infinite(self) -> None:
        self.assertTrue(math.isinf(singular_integral(np.ones_like(self.z), self.z, "upper")))
        self.assertTrue(math.isinf(singular_integral(self.z, self.z, "strip")))

    def test_strip_weight_of_wall_vanishing_profile(self) -> None:
        fine = np.linspace(0.0, 1.0, 2001)
        self.assertAlmostEqual(singular_integral(fine * (1.0 - fine), fine, "strip"), 1.0, places=5)

    def test_nodes_must_increase(self) -> None:
        with self.assertRaises(InputError):
            singular_weights(np.array([0.0, 0.5, 0.4, 1.0]), "upper")


class NormTests(unittest.TestCase):
    def setUp(self) -> None:
        self.z = Grid(L=2.0, Nx=8, Nz=33).z_nodes

    def test_parabola_under_strip_weight(self) -> None:
        g = self.z * (1.0 - self.z)
        report = weighted_interpolation_norm(g, self.z, "strip")

        self.assertAlmostEqual(sup_norm(g), 0.25, places=12)
        self.assertAlmostEqual(weighted_norm(g, self.z, "strip"), 1.0, delta=1e-2)
        self.assertLessEqual(report.k_value, 0.25 + 1e-12)
        self.assertAlmostEqual(report.k_value, report.sup_part + report.weighted_part, places=12)
        self.assertLessEqual(report.k_value, brute_force_k(g, self.z, "strip") + 1e-12)

    def test_matches_dense_threshold_scan(self) -> None:
        rng = np.random.default_rng(10)
        for index in range(100):
            kind = ("strip", "upper", "lower")[index % 3]
            g = self.z * (1.0 - self.z) * rng.uniform(0.0, 5.0, size=self.z.shape)
            report = weighted_interpolation_norm(g, self.z, kind)  # type: ignore[arg-type]
            brute = brute_force_k(g, self.z, kind)

            self.assertLessEqual(report.k_value, brute * (1.0 + 1e-12) + 1e-14)
            self.assertGreaterEqual(report.k_value, brute * (1.0 - 1e-3))

    def test_positive_homogeneity(self) -> None:
        g = np.sin(np.pi * self.z) ** 2 * (1.0 + self.z)
        base = weighted_interpolation_norm(g, self.z, "upper").k_value

        for c in (0.5, 3.0, 40.0):
            scaled = weighted_interpolation_norm(c * g, self.z, "upper").k_value
            self.assertAlmostEqual(scaled, c * base, delta=1e-10 * c * max(1.0, base))

    def test_negative_profile_is_rejected(self) -> None:
        with self.assertRaises(InputError):
            weighted_interpolation_norm(-self.z, self.z, "upper")
        with self.assertRaises(InputError):
            weighted_interpolation_norm(self.z[:-1], self.z, "upper")


class NusseltTests(unittest.TestCase):
    def setUp(self) -> None:
        self.averages = averages_of([conduction_state(SimParams(Ra=1e3, Pr=1.0, Nx=16, Nz=17))])

    def test_conduction_has_unit_nusselt_everywhere(self) -> None:
        report = nusselt_report(self.averages)

        self.assertAlmostEqual(nusselt_volume(self.averages), 1.0, places=10)
        self.assertAlmostEqual(report.nu_dissipation, 1.0, places=10)
        self.assertAlmostEqual(nusselt_plane(self.averages, 0.3), 1.0, places=10)
        self.assertLess(report.spread, 1e-10)

    def test_plane_outside_the_layer_is_rejected(self) -> None:
        with self.assertRaises(ParameterError):
            nusselt_plane(self.averages, 1.5)

    def test_empty_averages_have_no_profiles(self) -> None:
        with self.assertRaises(StateError):
            TimeAverages.empty(Grid(L=2.0, Nx=8, Nz=9)).profile("flux")
        with self.assertRaises(StateError):
            averages_of([])

    def test_boundary_layer_bound_without_flow(self) -> None:
        self.assertAlmostEqual(boundary_layer_bound(self.averages, 0.1), 10.0, places=10)
        with self.assertRaises(ParameterError):
            boundary_layer_bound(self.averages, 0.6)


class PlateauTests(unittest.TestCase):
    def test_steady_series_reaches_a_plateau(self) -> None:
        self.assertTrue(plateau_reached(np.full(50, 4.2)))

    def test_growing_series_does_not(self) -> None:
        self.assertFalse(plateau_reached(np.linspace(1.0, 10.0, 50)))

    def test_short_or_nonfinite_series_does_not(self) -> None:
        self.assertFalse(plateau_reached(np.array([1.0, 1.0, 1.0])))
        self.assertFalse(plateau_reached(np.array([1.0, np.nan, 1.0, 1.0, 1.0])))


class BoundTests(unittest.TestCase):
    def test_low_prandtl_point_sets_the_constant(self) -> None:
        report = bound_check([(1e4, 10.0, 5.0)])

        self.assertEqual(report.branches, ["low_pr"])
        self.assertAlmostEqual(report.constant, 5.0 / math.sqrt(1e4 * math.log(1e4) / 10.0), places=12)

    def test_binding_entry_has_the_largest_ratio(self) -> None:
        report = bound_check([(1e4, 1e3, 2.0), (1e5, math.inf, 6.0), (1e6, 1.0, 4.0)])
        ratios = [2.0 / bound_shape(1e4, 1e3), 6.0 / bound_shape(1e5, math.inf), 4.0 / bound_shape(1e6, 1.0)]

        self.assertEqual(report.binding_index, int(np.argmax(ratios)))
        self.assertAlmostEqual(report.constant, max(ratios), places=12)
        self.assertEqual(report.branches, ["high_pr", "high_pr", "low_pr"])

    def test_invalid_input_is_rejected(self) -> None:
        with self.assertRaises(ParameterError):
            bound_check([])
        with self.assertRaises(ParameterError):
            bound_check([(5e3, 1.0, 2.0)])

    def test_branch_threshold(self) -> None:
        Ra = 1e6
        threshold = (Ra * math.log(Ra)) ** (1.0 / 3.0)

        self.assertEqual(branch_of(Ra, threshold * 1.01), "high_pr")
        self.assertEqual(branch_of(Ra, threshold * 0.99), "low_pr")

    def test_delta_choice_is_near_the_scanned_minimiser(self) -> None:
        for Ra, Pr, Nu in ((1e6, 1.0, 10.0), (1e8, math.inf, 30.0), (1e5, 0.1, 5.0)):
            chosen = delta_choice(Ra, Pr, Nu)
            scanned = delta_bruteforce(Ra, Pr, Nu)
            self.assertLess(max(chosen / scanned, scanned / chosen), 2.0, msg=f"Ra={Ra} Pr={Pr}")

    def test_delta_choice_needs_rayleigh_above_one(self) -> None:
        with self.assertRaises(ParameterError):
            delta_choice(1.0, 1.0, 1.0)


class HardyTests(unittest.TestCase):
    def setUp(self) -> None:
        self.grid = Grid(L=2.0 * np.pi, Nx=16, Nz=17)
        x = self.grid.x_nodes[:, np.newaxis]
        z = self.grid.z_nodes[np.newaxis, :]
        self.T = np.ones((16, 17)) * (1.0 - z)
        self.psi = np.sin(x) * (z * (1.0 - z)) ** 2

    def test_dissipation_of_manufactured_streamfunction(self) -> None:
        state = state_from_physical(self.T, self.psi, self.grid)
        expected = 0.5 * (2.0 * 2.0 / 105.0 + 4.0 / 5.0 + 1.0 / 630.0)

        self.assertAlmostEqual(dissipation_integral(state), expected, places=10)

    def test_ratio_is_finite_and_positive(self) -> None:
        ratio = hardy_nonlinearity_ratio(state_from_physical(self.T, self.psi, self.grid))

        self.assertTrue(math.isfinite(ratio))
        self.assertGreater(ratio, 0.0)

    def test_ratio_is_invariant_under_amplitude(self) -> None:
        small = hardy_nonlinearity_ratio(state_from_physical(self.T, self.psi, self.grid))
        large = hardy_nonlinearity_ratio(state_from_physical(self.T, 3.0 * self.psi, self.grid))

        self.assertAlmostEqual(large, small, delta=1e-8 * small)

        self.assertAlmostEqual(large, 3.0 * small, delta=1e-8 * large)

    def test_fluid_at_rest_has_zero_ratio(self) -> None:
        self.assertEqual(hardy_nonlinearity_ratio(conduction_state(SimParams(Ra=1e3, Pr=1.0, Nx=16, Nz=9))), 0.0)


if __name__ == "__main__":
    unittest.main()
