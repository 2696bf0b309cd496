import math
import os
import sys
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

PROJECT_ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(PROJECT_ROOT / "src"))

from common.config import read_environment
from common.result import Err, Ok
from domains.sweep.runspec import (
    ConfigNotFound,
    ConfigSyntaxError,
    InvalidValue,
    Overrides,
    RunSpec,
    UnknownKey,
    apply_overrides,
    error_to_message,
    load_config,
    parse_config,
    serialize_config,
)


MINIMAL = """
[simulation]
Ra = 1e5
Pr = 1
"""


class ParseConfigTests(unittest.TestCase):
    def test_minimal_config_fills_defaults(self) -> None:
        spec = parse_config(MINIMAL).unwrap()

        self.assertEqual(spec.simulation.Ra, 1e5)
        self.assertEqual(spec.simulation.Pr, 1.0)
        self.assertEqual(spec.mode, "simulate")
        self.assertEqual(spec.stokes.R, 1.0 / 16.0)
        self.assertIsNone(spec.simulation.Nx)

    def test_unknown_key_names_key_and_line(self) -> None:
        result = parse_config("[simulation]\nRaa = 1e5\n")

        match result.inner:
            case Err(error=UnknownKey(section=section, key=key, line=line)):
                self.assertEqual((section, key, line), ("simulation", "Raa", 2))
                self.assertIn("Raa", error_to_message(result.inner.error))
            case _:
                self.fail(f"expected UnknownKey, got {result.inner}")

    def test_unknown_section_is_rejected(self) -> None:
        result = parse_config("[physics]\nRa = 1\n")
        match result.inner:
            case Err(error=UnknownKey(line=line)):
                self.assertEqual(line, 1)
            case _:
                self.fail("expected UnknownKey for the section")

    def test_line_without_equals_is_a_syntax_error(self) -> None:
        result = parse_config("[run]\n# comment\nseed 3\n")
        match result.inner:
            case Err(error=ConfigSyntaxError(line=line)):
                self.assertEqual(line, 3)
            case _:
                self.fail("expected ConfigSyntaxError")

    def test_unparseable_number_names_the_key(self) -> None:
        result = parse_config("[simulation]\nRa = lots\n")
        match result.inner:
            case Err(error=InvalidValue(key=key, line=line)):
                self.assertEqual((key, line), ("Ra", 2))
            case _:
                self.fail("expected InvalidValue")

    def test_model_validation_error_names_the_key(self) -> None:
        result = parse_config("[stokes]\nR = 0.1\ndomain = cube\n")
        match result.inner:
            case Err(error=InvalidValue(key=key, line=line)):
                self.assertEqual((key, line), ("domain", 3))
            case _:
                self.fail("expected InvalidValue")

    def test_infinite_prandtl_and_auto_are_accepted(self) -> None:
        spec = parse_config("[simulation]\nPr = inf\nNx = auto\ndt = 2e-5\n").unwrap()

        self.assertTrue(math.isinf(spec.simulation.Pr))
        self.assertIsNone(spec.simulation.Nx)
        self.assertEqual(spec.simulation.dt, 2e-5)

    def test_sweep_mode_rejects_empty_axes(self) -> None:
        result = parse_config("[run]\nmode = sweep\n[sweep]\nra =\n")
        self.assertTrue(result.is_err)

    def test_serialized_config_parses_to_an_equal_spec(self) -> None:
        text = """
        [run]
        mode = sweep
        seed = 11
        [simulation]
        Pr = inf
        Nx = 48
        t_end = 0.25
        [sweep]
        ra = 1e4, 3e4, 1e5
        pr = 0.7, 7
        [stokes]
        R = 0.05
        domain = half
        """
        spec = parse_config(text.replace("        ", "")).unwrap()
        again = parse_config(serialize_config(spec)).unwrap()

        self.assertEqual(again, spec)

    def test_default_spec_round_trips(self) -> None:
        spec = RunSpec()
        self.assertEqual(parse_config(serialize_config(spec)).unwrap(), spec)

    def test_missing_file_is_reported(self) -> None:
        result = load_config(Path("/nonexistent/config.ini"))
        match result.inner:
            case Err(error=ConfigNotFound()):
                pass
            case _:
                self.fail("expected ConfigNotFound")

    def test_load_config_reads_a_file(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "run.ini"
            path.write_text(MINIMAL, encoding="utf-8")
            self.assertEqual(load_config(path).unwrap().simulation.Ra, 1e5)


class SimulationSettingsTests(unittest.TestCase):
    def test_auto_resolution_follows_rayleigh_number(self) -> None:
        params = RunSpec().simulation.params(Ra=1e6, Pr=1.0)

        self.assertGreaterEqual(params.Nx, 64)
        self.assertEqual(params.Nx % 2, 0)
        self.assertGreater(params.dt, 0.0)

    def test_explicit_resolution_is_kept(self) -> None:
        settings = parse_config("[simulation]\nNx = 32\nNz = 17\ndt = 1e-3\n").unwrap().simulation
        params = settings.params()

        self.assertEqual((params.Nx, params.Nz, params.dt), (32, 17, 1e-3))


class OverrideTests(unittest.TestCase):
    def test_later_layers_win(self) -> None:
        spec = RunSpec()
        merged = apply_overrides(
            spec,
            "sweep",
            Overrides(source="environment", out="a", jobs=2),
            Overrides(source="command line", out="b", pr=[0.5]),
        ).unwrap()

        self.assertEqual((merged.out, merged.jobs, merged.mode), ("b", 2, "sweep"))
        self.assertEqual(merged.sweep.pr, [0.5])
        self.assertEqual(merged.sweep.ra, spec.sweep.ra)

    def test_invalid_axis_override_is_rejected(self) -> None:
        result = apply_overrides(RunSpec(), "sweep", Overrides(source="command line", ra=[0.5]))
        match result.inner:
            case Err(error=InvalidValue()):
                pass
            case _:
                self.fail("expected InvalidValue")


class EnvironmentTests(unittest.TestCase):
    def test_environment_overrides_are_read(self) -> None:
        with patch.dict(os.environ, {"RBLAB_OUT_DIR": "results", "RBLAB_JOBS": "4"}):
            result = read_environment()

        match result.inner:
            case Ok(value=settings):
                self.assertEqual((settings.out, settings.jobs), ("results", 4))
            case _:
                self.fail("expected environment settings")

    def test_unknown_log_level_is_rejected(self) -> None:
        with patch.dict(os.environ, {"RBLAB_LOG_LEVEL": "loud"}):
            self.assertTrue(read_environment().is_err)


if __name__ == "__main__":
    unittest.main()
