import io
import os
import sys
import tempfile
import unittest
from contextlib import redirect_stdout
from pathlib import Path
from unittest.mock import patch

PROJECT_ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(PROJECT_ROOT / "src"))

import app
from common.errors import CeilingExceeded, ParameterError, SimulationFailure
from common.loading import progress, spinner
from common.response import STATUS_CEILING, STATUS_FAILURE, STATUS_INVALID, exit_code, to_response
from common.result import Ok


class LoadingTests(unittest.TestCase):
    def test_errors_propagate_through_progress(self) -> None:
        for level in ("quiet", "info"):
            with patch.dict(os.environ, {"RBLAB_LOG_LEVEL": level}):
                with self.assertRaises(SimulationFailure) as context:
                    with progress(3, "steps") as tick:
                        tick(1)
                        raise SimulationFailure(message="diverged", time=0.5)

            self.assertEqual(context.exception.time, 0.5, msg=level)
            self.assertIsNotNone(context.exception.__traceback__)

    def test_errors_propagate_through_spinner(self) -> None:
        with patch.dict(os.environ, {"RBLAB_LOG_LEVEL": "quiet"}):
            with self.assertRaises(ParameterError):
                with spinner("solving"):
                    raise ParameterError(message="bad R")


class ResponseTests(unittest.TestCase):
    def test_statuses_map_to_exit_codes(self) -> None:
        self.assertEqual(exit_code(200), 0)
        self.assertEqual(exit_code(STATUS_INVALID), 2)
        self.assertEqual(exit_code(STATUS_CEILING), 3)
        self.assertEqual(exit_code(STATUS_FAILURE), 1)

    def test_ceiling_failure_carries_ratio(self) -> None:
        content, status = to_response(CeilingExceeded(message="too large", ratio=12.0, ceiling=10.0))

        self.assertEqual(status, STATUS_CEILING)
        self.assertEqual(content["error"]["ratio"], 12.0)

    def test_parameter_error_is_a_usage_status(self) -> None:
        _, status = to_response(ParameterError(message="bad"))
        self.assertEqual(status, STATUS_INVALID)

    def test_unknown_exception_is_internal(self) -> None:
        content, status = to_response(RuntimeError("boom"))

        self.assertEqual(status, STATUS_FAILURE)
        self.assertIn("boom", content["error"]["message"])


class RunTests(unittest.TestCase):
    def test_no_command_prints_help_and_returns_usage(self) -> None:
        with redirect_stdout(io.StringIO()):
            self.assertEqual(app.safe_run([]), 2)

    def test_missing_config_file_is_a_usage_error(self) -> None:
        with redirect_stdout(io.StringIO()):
            code = app.safe_run(["certify-kernels", "--config", "/nonexistent/run.ini"])
        self.assertEqual(code, 2)

    def test_cli_flags_override_environment(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            with patch.dict(os.environ, {"RBLAB_OUT_DIR": "env-out", "RBLAB_JOBS": "3"}):
                parsed = app.ParsedArgs(command="sweep", out=tmp, ra=[2e4, 4e4])
                resolved = app.resolve_spec("sweep", parsed)

        match resolved.inner:
            case Ok(value=spec):
                self.assertEqual(spec.out, tmp)
                self.assertEqual(spec.jobs, 3)
                self.assertEqual(spec.sweep.ra, [2e4, 4e4])
                self.assertEqual(spec.mode, "sweep")
            case _:
                self.fail("expected a resolved spec")

    def test_invalid_environment_jobs_is_rejected(self) -> None:
        with patch.dict(os.environ, {"RBLAB_JOBS": "many"}):
            resolved = app.resolve_spec("sweep", app.ParsedArgs(command="sweep"))
        self.assertTrue(resolved.is_err)

    def test_simulate_flags_set_the_single_point(self) -> None:
        resolved = app.resolve_spec("simulate", app.ParsedArgs(command="simulate", ra=[3e4], pr=[7.0]))

        spec = resolved.unwrap()
        self.assertEqual(spec.simulation.Ra, 3e4)
        self.assertEqual(spec.simulation.Pr, 7.0)

    def test_certification_ceiling_exits_with_three(self) -> None:
        def raise_ceiling(*_: object, **__: object) -> None:
            raise CeilingExceeded(message="ratio above ceiling", ratio=5.0, ceiling=1.0)

        with tempfile.TemporaryDirectory() as tmp:
            with patch("domains.stokes.command.certify_kernels.certify_kernels", side_effect=raise_ceiling):
                with redirect_stdout(io.StringIO()):
                    code = app.safe_run(["certify-kernels", "--out", tmp])
        self.assertEqual(code, 3)


if __name__ == "__main__":
    unittest.main()
