import json
import math
import sys
import tempfile
import unittest
from pathlib import Path
from typing import Any
from unittest.mock import patch

PROJECT_ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(PROJECT_ROOT / "src"))

import pandas as pd

from common.errors import DomainError, FitError, InputError, SimulationFailure
from common.result import Err, Ok
from domains.diagnostics.bounds import bound_shape, delta_choice
from domains.sweep.fit import fit_scaling
from domains.sweep.harness import point_seeds, run_sweep, simulate_point, sweep_summary
from domains.sweep.plots import emit_plots, guide_curves
from domains.sweep.results import CSV_COLUMNS, SweepRow, append_row, branch_for, validate_rows, write_header
from domains.sweep.runspec import RunSpec, SimulationSettings, SweepAxes
from domains.sweep.units import PhysicalParameters, dimensional_to_nondimensional


def make_row(Ra: float, Pr: float, nu: float, **extra: Any) -> SweepRow:
    values: dict[str, Any] = dict(
        Ra=Ra,
        Pr=Pr,
        L=2.0,
        Nx=64,
        Nz=33,
        dt=1e-4,
        t_avg=0.5,
        nu_plane_mean=nu,
        nu_volume=nu,
        nu_dissipation=nu,
        spread=0.001,
        energy_residual=0.01,
        min_T=0.0,
        max_T=1.0,
        hardy_max=0.2,
        wall_clock=1.0,
        branch=branch_for(Ra, Pr),
    )
    values.update(extra)
    return SweepRow(**values)


class FitScalingTests(unittest.TestCase):
    def test_one_third_power_law_is_recovered(self) -> None:
        rows = [make_row(ra, 1.0, 0.1 * ra ** (1.0 / 3.0)) for ra in (1e4, 3e4, 1e5, 3e5, 1e6)]
        fit = fit_scaling(rows)

        self.assertAlmostEqual(fit.exponent, 1.0 / 3.0, delta=1e-6)
        self.assertAlmostEqual(fit.prefactor, 0.1, delta=1e-6)
        self.assertLess(fit.confidence, 1e-6)

    def test_square_root_law_at_fixed_prandtl(self) -> None:
        Pr = 4.0
        rows = [make_row(ra, Pr, math.sqrt(ra / Pr)) for ra in (1e3, 1e4, 1e5)]

        self.assertAlmostEqual(fit_scaling(rows).exponent, 0.5, delta=1e-9)

    def test_log_corrected_slope_is_reported(self) -> None:
        rows = [make_row(ra, 1.0, (ra * math.log(ra)) ** (1.0 / 3.0)) for ra in (1e4, 1e5, 1e6)]
        fit = fit_scaling(rows)

        self.assertAlmostEqual(fit.log_exponent, 1.0 / 3.0, delta=1e-9)
        self.assertGreater(fit.exponent, 1.0 / 3.0)

    def test_insufficient_span_is_a_fit_error(self) -> None:
        rows = [make_row(ra, 1.0, ra**0.3) for ra in (1e4, 3e4, 1e5)]
        with self.assertRaises(FitError):
            fit_scaling(rows)

    def test_too_few_points_is_a_fit_error(self) -> None:
        with self.assertRaises(FitError):
            fit_scaling([make_row(1e4, 1.0, 5.0), make_row(1e6, 1.0, 20.0)])

    def test_mixed_prandtl_needs_a_choice(self) -> None:
        rows = [make_row(ra, pr, ra**0.3) for ra in (1e4, 1e5, 1e6) for pr in (1.0, 10.0)]
        with self.assertRaises(FitError):
            fit_scaling(rows)
        self.assertEqual(fit_scaling(rows, Pr=10.0).points, 3)

    def test_failed_rows_are_ignored(self) -> None:
        rows = [make_row(ra, 1.0, ra**0.25) for ra in (1e4, 1e5, 1e6)]
        rows.append(SweepRow(Ra=3e5, Pr=1.0, L=2.0, Nx=64, Nz=33, dt=1e-4, status="failed", error="diverged"))

        self.assertAlmostEqual(fit_scaling(rows).exponent, 0.25, delta=1e-9)


class UnitsTests(unittest.TestCase):
    def base(self, **changes: float) -> PhysicalParameters:
        values = dict(nu=1e-6, g=9.81, alpha=2e-4, chi=1e-6, h=0.1, T_bottom=301.0, T_top=300.0)
        values.update(changes)
        return PhysicalParameters(**values)

    def test_equal_diffusivities_give_unit_prandtl(self) -> None:
        _, Pr = dimensional_to_nondimensional(self.base())
        self.assertEqual(Pr, 1.0)

    def test_rayleigh_number_formula(self) -> None:
        Ra, _ = dimensional_to_nondimensional(self.base())
        self.assertAlmostEqual(Ra, 9.81 * 2e-4 * 1.0 * 0.1**3 / 1e-12, delta=1e-6 * Ra)

    def test_doubling_depth_multiplies_rayleigh_by_eight(self) -> None:
        Ra, Pr = dimensional_to_nondimensional(self.base())
        Ra_deep, Pr_deep = dimensional_to_nondimensional(self.base(h=0.2))

        self.assertAlmostEqual(Ra_deep / Ra, 8.0, places=12)
        self.assertEqual(Pr_deep, Pr)

    def test_seawater_like_prandtl(self) -> None:
        _, Pr = dimensional_to_nondimensional(self.base(nu=1.34e-6, chi=1e-7))
        self.assertAlmostEqual(Pr, 13.4, places=12)

    def test_inverted_temperatures_are_a_domain_error(self) -> None:
        with self.assertRaises(DomainError):
            dimensional_to_nondimensional(self.base(T_bottom=299.0))

    def test_non_positive_input_is_a_domain_error(self) -> None:
        with self.assertRaises(DomainError):
            dimensional_to_nondimensional(self.base(chi=0.0))


class ResultsFileTests(unittest.TestCase):
    def test_header_only_file_is_a_valid_empty_result(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "results.csv"
            write_header(path)
            result = validate_rows(path)

        match result.inner:
            case Ok(value=rows):
                self.assertEqual(rows, [])
            case Err(error=error):
                self.fail(str(error))

    def test_appended_rows_read_back_with_failures_tagged(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "results.csv"
            write_header(path)
            append_row(path, make_row(1e4, 1.0, 2.5))
            append_row(
                path,
                SweepRow(Ra=1e5, Pr=math.inf, L=2.0, Nx=64, Nz=33, dt=1e-4, status="failed", error="DivergenceError: x"),
            )
            rows = validate_rows(path).unwrap()

        self.assertEqual([row.status for row in rows], ["ok", "failed"])
        self.assertEqual(rows[0].nu_volume, 2.5)
        self.assertTrue(math.isinf(rows[1].Pr))
        self.assertEqual(rows[1].error, "DivergenceError: x")
        self.assertEqual(rows[0].branch, "low_pr")

    def test_wrong_columns_are_rejected(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "results.csv"
            pd.DataFrame({"Ra": [1.0]}).to_csv(path, index=False)
            self.assertTrue(validate_rows(path).is_err)

    def test_completed_row_needs_finite_diagnostics(self) -> None:
        with self.assertRaises(InputError):
            make_row(1e4, 1.0, math.nan)

    def test_failed_row_needs_an_error_tag(self) -> None:
        with self.assertRaises(InputError):
            SweepRow(Ra=1e4, Pr=1.0, L=2.0, Nx=64, Nz=33, dt=1e-4, status="failed")


class PlotTests(unittest.TestCase):
    def test_empty_rows_write_nothing(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(InputError):
                emit_plots([], Path(tmp))
            self.assertFalse((Path(tmp) / "plots").exists())

    def test_three_rows_give_one_plot_one_csv_one_json(self) -> None:
        rows = [make_row(ra, 1.0, 0.2 * ra ** (1.0 / 3.0)) for ra in (1e4, 3e4, 1e5)]
        with tempfile.TemporaryDirectory() as tmp:
            paths = emit_plots(rows, Path(tmp))
            suffixes = sorted(path.suffix for path in paths)
            self.assertEqual(suffixes, [".csv", ".json", ".svg"])
            self.assertTrue(all(path.is_file() for path in paths))
            svg = next(path for path in paths if path.suffix == ".svg").read_text(encoding="utf-8")
            self.assertIn("<svg", svg)

    def test_guide_curves_match_bound_formulas(self) -> None:
        Ra = 1e5
        guides = guide_curves(Ra, 1.0)

        self.assertAlmostEqual(guides["high_pr"], 1.0 / delta_choice(Ra, math.inf, 1.0), places=12)
        self.assertAlmostEqual(guides["high_pr"], bound_shape(Ra, 1e6), places=9)
        self.assertAlmostEqual(guides["low_pr"], bound_shape(Ra, 1.0), places=9)
        self.assertNotIn("low_pr", guide_curves(Ra, math.inf))


def fake_point(settings: SimulationSettings, Ra: float, Pr: float, seed: int, *_: Any, **__: Any) -> tuple[None, SweepRow]:
    return None, make_row(Ra, Pr, 0.15 * Ra ** (1.0 / 3.0), wall_clock=0.0, Nx=settings.Nx or 64)


class RunSweepTests(unittest.TestCase):
    def spec(self, out: str, ra: list[float], seed: int = 5) -> RunSpec:
        return RunSpec(mode="sweep", out=out, seed=seed, sweep=SweepAxes(ra=ra, pr=[1.0]))

    def test_rows_csv_and_summary_are_written(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            with patch("domains.sweep.harness.simulate_point", side_effect=fake_point):
                result = run_sweep(self.spec(tmp, [1e4, 1e5, 1e6]))
            rows = validate_rows(Path(tmp) / "results.csv").unwrap()
            summary = json.loads((Path(tmp) / "summary.json").read_text(encoding="utf-8"))

        self.assertEqual(len(result.rows), 3)
        self.assertEqual([row.Ra for row in rows], [1e4, 1e5, 1e6])
        self.assertEqual(summary["schema"], 1)
        self.assertEqual(summary["columns"], list(CSV_COLUMNS))
        self.assertEqual([entry["branch"] for entry in summary["branches"]], ["low_pr"] * 3)
        self.assertAlmostEqual(summary["bound"]["C"], max(r.nu_volume / bound_shape(r.Ra, 1.0) for r in rows))
        self.assertAlmostEqual(summary["fits"]["1"]["exponent"], 1.0 / 3.0, delta=1e-9)

    def test_failed_point_is_tagged_not_dropped(self) -> None:
        def flaky(settings: SimulationSettings, Ra: float, Pr: float, seed: int, *args: Any, **kwargs: Any) -> Any:
            if Ra == 3e4:
                raise SimulationFailure(message="DivergenceError during step 12", time=0.01, cause="blow-up")
            return fake_point(settings, Ra, Pr, seed)

        with tempfile.TemporaryDirectory() as tmp:
            with patch("domains.sweep.harness.simulate_point", side_effect=flaky):
                result = run_sweep(self.spec(tmp, [1e4, 3e4, 1e5]))
            rows = validate_rows(Path(tmp) / "results.csv").unwrap()

        self.assertEqual([row.status for row in rows], ["ok", "failed", "ok"])
        self.assertIn("SimulationFailure", rows[1].error or "")
        self.assertEqual(len(result.failed), 1)

    def test_same_seed_gives_identical_csv(self) -> None:
        texts = []
        seeds: list[list[int]] = []
        for _ in range(2):
            with tempfile.TemporaryDirectory() as tmp:
                with patch("domains.sweep.harness.simulate_point", side_effect=fake_point) as mocked:
                    run_sweep(self.spec(tmp, [1e4, 1e5]))
                    seeds.append([call.args[3] for call in mocked.call_args_list])
                texts.append((Path(tmp) / "results.csv").read_text(encoding="utf-8"))

        self.assertEqual(texts[0], texts[1])
        self.assertEqual(seeds[0], seeds[1])
        self.assertEqual(seeds[0], point_seeds(5, 2))

    def test_interrupt_leaves_a_header_only_csv(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            with patch("domains.sweep.harness.simulate_point", side_effect=KeyboardInterrupt):
                with self.assertRaises(KeyboardInterrupt):
                    run_sweep(self.spec(tmp, [1e4]))
            rows = validate_rows(Path(tmp) / "results.csv").unwrap()

        self.assertEqual(rows, [])

    def test_summary_without_bound_eligible_points(self) -> None:
        summary = sweep_summary([make_row(2e3, 1.0, 1.2)])

        self.assertIsNone(summary["bound"])
        self.assertEqual(summary["fits"], {})


class SimulatePointTests(unittest.TestCase):
    def test_short_run_produces_a_completed_row(self) -> None:
        settings = SimulationSettings(
            Ra=1e4, Pr=1.0, Nx=16, Nz=9, dt=1e-3, t_end=0.02, transient_fraction=0.25, sample_every=2
        )
        trajectory, row = simulate_point(settings, 1e4, 1.0, seed=3)

        self.assertTrue(row.ok)
        self.assertEqual((row.Nx, row.Nz), (16, 9))
        self.assertAlmostEqual(row.nu_volume, 1.0, delta=0.1)
        self.assertGreater(row.t_avg, 0.0)
        self.assertGreater(len(trajectory.nu_series), 1)


if __name__ == "__main__":
    unittest.main()
