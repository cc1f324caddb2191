import contextlib
import csv
import io
import math
import os
import tempfile
import unittest

from weakmeter.cli import run
from weakmeter.cli.completion import completion_script, detect_shell, install_completion
from weakmeter.config import (
    build_config,
    default_parameters,
    parse_config,
    read_manifest,
    render_parameters,
    resolve_parameters,
)
from weakmeter.errors import ConfigParseError, ConfigValidationError
from weakmeter.models import (
    Analysis,
    ExperimentConfig,
    QuantityRow,
    RunManifest,
    SweepSpec,
    SweepVariable,
    TradeoffRow,
    columns_of,
)
from weakmeter.output import emit_csv
from weakmeter.utils import format_number


def read_table(path):
    """Manifest text and data rows of an emitted CSV file."""
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    return text, list(csv.DictReader(lines))


class TestParseConfig(unittest.TestCase):

    def test_empty_document(self):
        cfg = parse_config("")
        self.assertIsInstance(cfg, ExperimentConfig)
        self.assertAlmostEqual(cfg.setting.theta, math.radians(0.5), delta=1e-15)
        self.assertAlmostEqual(cfg.input_phi, math.radians(2.0), delta=1e-15)
        self.assertEqual(cfg.post_select, "H")
        self.assertEqual(cfg.n_photons, 1_000_000)
        self.assertEqual(cfg.seed, 42)
        self.assertFalse(cfg.exact)

    def test_phi_range_is_a_weak_sweep(self):
        spec = parse_config("phi_start_deg = 0.5\nphi_stop_deg = 1.5\nphi_step_deg = 0.01\n")
        self.assertIsInstance(spec, SweepSpec)
        self.assertIs(spec.variable, SweepVariable.PHI)
        self.assertEqual(len(spec.grid), 101)
        self.assertAlmostEqual(math.degrees(spec.grid[-1]), 1.5, delta=1e-9)

    def test_tradeoff_defaults(self):
        spec = parse_config("v_hv = 0.71\n", command="tradeoff")
        self.assertIs(spec.variable, SweepVariable.THETA)
        self.assertEqual(len(spec.grid), 10)
        self.assertAlmostEqual(spec.base.input_phi_deg, 25.0, delta=1e-12)
        self.assertIsNone(spec.base.post_select)
        self.assertEqual(spec.base.setting.v_hv, 0.71)

    def test_values_and_comments(self):
        text = (
            "# bench working point\n"
            "theta_deg = 22.5  # strong\n"
            "\n"
            "post_select = phi:30\n"
            "exact = yes\n"
            "n_photons = 1e6\n"
            "analysis = PM_BRANCH\n"
        )
        cfg = parse_config(text, command="eval")
        self.assertAlmostEqual(cfg.setting.theta_deg, 22.5, delta=1e-12)
        self.assertEqual(cfg.post_select, "phi:30.0")
        self.assertTrue(cfg.exact)
        self.assertEqual(cfg.n_photons, 1_000_000)
        self.assertIs(cfg.analysis, Analysis.PM_BRANCH)

    def test_indented_keys(self):
        cfg = parse_config("theta_deg = 0.5\n  v_hv = 0.7\n\t# note\n", command="eval")
        self.assertAlmostEqual(cfg.setting.theta_deg, 0.5, delta=1e-12)
        self.assertEqual(cfg.setting.v_hv, 0.7)

    def test_overrides(self):
        cfg = parse_config("seed = 1\n", command="eval", overrides={"seed": "9", "exact": "true"})
        self.assertEqual(cfg.seed, 9)
        self.assertTrue(cfg.exact)

    def test_parse_errors(self):
        with self.assertRaises(ConfigParseError) as cm:
            parse_config("theta_deg = 1.0\nnot a pair\n")
        self.assertEqual(cm.exception.line, 2)

        with self.assertRaises(ConfigParseError) as cm:
            parse_config("seed = 1\nseed = 2\n")
        self.assertEqual(cm.exception.line, 2)

        with self.assertRaises(ConfigParseError):
            parse_config("[bench]\nseed = 1\n")

    def test_validation_errors(self):
        cases = [
            ("colour = red\n", "colour"),
            ("theta_deg = fast\n", "theta_deg"),
            ("v_hv = 1.5\n", "v_hv"),
            ("n_photons = 0\n", "n_photons"),
            ("seed = -1\n", "seed"),
            ("post_select = D\n", "post_select"),
            ("monitor_fraction = 1.0\n", "monitor_fraction"),
            ("exact = maybe\n", "exact"),
            ("phi_start_deg = 0\nphi_stop_deg = 1\n", "phi_step_deg"),
            ("phi_deg = 1\nphi_start_deg = 0\nphi_stop_deg = 1\nphi_step_deg = 0.5\n", "phi_deg"),
            ("phi_start_deg = 0\nphi_stop_deg = 1\nphi_step_deg = 0\n", "phi_step_deg"),
        ]
        for text, key in cases:
            with self.subTest(text=text):
                with self.assertRaises(ConfigValidationError) as cm:
                    parse_config(text)
                self.assertEqual(cm.exception.key, key)

    def test_command_constraints(self):
        with self.assertRaises(ConfigValidationError) as cm:
            parse_config("post_select = H\n", command="tradeoff")
        self.assertEqual(cm.exception.key, "post_select")

        with self.assertRaises(ConfigValidationError):
            parse_config("post_select = none\n", command="weak-sweep")
        with self.assertRaises(ConfigValidationError):
            parse_config("phi_start_deg = 0\nphi_stop_deg = 1\nphi_step_deg = 0.5\n", command="eval")
        with self.assertRaises(ConfigValidationError):
            parse_config("post_select = H\nanalysis = hv_output\n", command="eval")

    def test_manifest_round_trip(self):
        text = "theta_deg = 3\nv_hv = 0.9\nseed = 7\n"
        params = resolve_parameters(text, "tradeoff")
        model = build_config(params, "tradeoff")
        manifest = RunManifest(command="tradeoff", config_path="t.cfg", params=params)
        emitted = emit_csv([], manifest, columns=columns_of(TradeoffRow)).decode("utf-8")

        recovered = read_manifest(emitted)
        self.assertEqual(recovered, params)
        self.assertEqual(parse_config(render_parameters(recovered), "tradeoff"), model)

    def test_defaults_render_and_resolve(self):
        for command in ("weak-sweep", "tradeoff", "calibrate", "eval"):
            params = default_parameters(command)
            self.assertEqual(resolve_parameters(render_parameters(params), command), params)


class TestEmitCsv(unittest.TestCase):

    manifest = RunManifest(command="eval", config_path="p.cfg", params={"seed": "42"})

    def test_layout(self):
        rows = [QuantityRow(quantity="epsilon", value=0.1), QuantityRow(quantity="weak_value", value=None)]
        lines = emit_csv(rows, self.manifest).decode("utf-8").split("\n")
        self.assertEqual(lines[0], "# schema = 1")
        self.assertIn("# seed = 42", lines)
        body = [line for line in lines if line and not line.startswith("#")]
        self.assertEqual(body, ["quantity,value", "epsilon,0.1", "weak_value,"])

    def test_negative_zero(self):
        rows = [QuantityRow(quantity="epsilon", value=-0.0)]
        text = emit_csv(rows, self.manifest).decode("utf-8")
        self.assertIn("epsilon,-0.0", text.split("\n"))
        self.assertEqual(format_number(0.0), "0.0")
        self.assertEqual(math.copysign(1.0, float(format_number(-0.0))), -1.0)

    def test_empty_table(self):
        text = emit_csv([], self.manifest, columns=columns_of(TradeoffRow)).decode("utf-8")
        body = [line for line in text.split("\n") if line and not line.startswith("#")]
        self.assertEqual(body, [",".join(columns_of(TradeoffRow))])

    def test_mismatched_rows(self):
        with self.assertRaises(ValueError):
            emit_csv([{"a": 1}, {"b": 2}], self.manifest)


class TestCommandLine(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def write(self, name, text):
        path = self.path(name)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        return path

    def run_quietly(self, argv):
        with contextlib.redirect_stdout(io.StringIO()) as out, contextlib.redirect_stderr(io.StringIO()):
            code = run(argv)
        return code, out.getvalue()

    def test_eval(self):
        config = self.write("point.cfg", "")
        out = self.path("point.csv")
        self.assertEqual(self.run_quietly(["eval", "-c", config, "--exact", "-o", out])[0], 0)
        text, rows = read_table(out)
        values = {row["quantity"]: row["value"] for row in rows}
        self.assertAlmostEqual(float(values["value_eq9"]), 22.92, delta=0.01)
        self.assertIn("# command = eval", text)
        self.assertIn("# exact = true", text)

    def test_calibrate(self):
        config = self.write("strong.cfg", "theta_deg = 22.5\nv_hv = 0.71\n")
        out = self.path("cal.csv")
        self.assertEqual(self.run_quietly(["calibrate", "-c", config, "--seed", "7", "-o", out])[0], 0)
        _, rows = read_table(out)
        self.assertEqual(len(rows), 1)
        self.assertAlmostEqual(float(rows[0]["epsilon_est"]), 0.71, delta=0.003)

    def test_tradeoff(self):
        config = self.write("tradeoff.cfg", "v_hv = 0.7\n")
        out = self.path("tradeoff.csv")
        self.assertEqual(self.run_quietly(["tradeoff", "-c", config, "--exact", "-o", out])[0], 0)
        _, rows = read_table(out)
        self.assertEqual(len(rows), 10)
        self.assertEqual(list(rows[0]), columns_of(TradeoffRow))
        for row in rows:
            self.assertAlmostEqual(float(row["ellipse_residual"]), 0.0, delta=1e-9)

    def test_weak_sweep_is_deterministic(self):
        config = self.write("weak.cfg", "phi_start_deg = 1\nphi_stop_deg = 5\nphi_step_deg = 1\nn_photons = 100000\n")
        out = self.path("weak.csv")
        outputs = []
        for _ in range(2):
            self.assertEqual(self.run_quietly(["weak-sweep", "-c", config, "-o", out])[0], 0)
            with open(out, "rb") as f:
                outputs.append(f.read())
        self.assertEqual(outputs[0], outputs[1])
        self.assertEqual(len(read_table(out)[1]), 5)

    def test_configuration_errors_exit_1(self):
        bad = self.write("bad.cfg", "colour = red\n")
        self.assertEqual(self.run_quietly(["eval", "-c", bad])[0], 1)
        self.assertEqual(self.run_quietly(["eval", "-c", self.path("missing.cfg")])[0], 1)
        self.assertEqual(self.run_quietly(["eval"])[0], 1)
        self.assertEqual(self.run_quietly([])[0], 1)

    def test_runtime_errors_exit_2(self):
        unpolarized = self.write("diag.cfg", "phi_deg = 45\n")
        self.assertEqual(self.run_quietly(["tradeoff", "-c", unpolarized, "-o", self.path("t.csv")])[0], 2)
        no_resolution = self.write("zero.cfg", "theta_deg = 0\n")
        self.assertEqual(self.run_quietly(["weak-sweep", "-c", no_resolution, "-o", self.path("w.csv")])[0], 2)

        point = self.write("point.cfg", "theta_deg = 1\n")
        with contextlib.redirect_stdout(io.StringIO()), contextlib.redirect_stderr(io.StringIO()) as err:
            code = run(["eval", "-c", point, "--exact", "-o", self.tmp.name])
        self.assertEqual(code, 2)
        self.assertIn(self.tmp.name, err.getvalue())

        missing_dir = self.path(os.path.join("nope", "x.csv"))
        with contextlib.redirect_stdout(io.StringIO()), contextlib.redirect_stderr(io.StringIO()) as err:
            code = run(["eval", "-c", point, "--exact", "-o", missing_dir])
        self.assertEqual(code, 2)
        self.assertIn(missing_dir, err.getvalue())
        self.assertNotIn("file not found", err.getvalue())

    def test_help_exits_0(self):
        self.assertEqual(self.run_quietly(["--help"])[0], 0)

    def test_config_init_show_get(self):
        target = self.path("init.cfg")
        self.assertEqual(self.run_quietly(["config", "init", "tradeoff", "-o", target])[0], 0)
        self.assertEqual(self.run_quietly(["config", "init", "tradeoff", "-o", target])[0], 1)
        self.assertEqual(self.run_quietly(["config", "init", "tradeoff", "-o", target, "--force"])[0], 0)

        code, shown = self.run_quietly(["config", "show", "tradeoff", "-c", target])
        self.assertEqual(code, 0)
        self.assertEqual(shown, render_parameters(default_parameters("tradeoff")))

        code, value = self.run_quietly(["config", "get", "tradeoff", "-c", target, "phi_deg"])
        self.assertEqual(code, 0)
        self.assertEqual(value.strip(), "25.0")
        self.assertEqual(self.run_quietly(["config", "get", "tradeoff", "-c", target, "colour"])[0], 1)


class TestCompletion(unittest.TestCase):

    def test_detect_shell(self):
        self.assertEqual(detect_shell("/bin/zsh"), "zsh")
        self.assertEqual(detect_shell("/usr/bin/fish"), "fish")
        self.assertIsNone(detect_shell(""))

    def test_completion_script(self):
        self.assertEqual(completion_script("bash"), ['eval "$(register-python-argcomplete weakmeter)"'])
        self.assertIn("weakmeter", completion_script("fish")[0])

    def test_install_is_idempotent(self):
        with tempfile.TemporaryDirectory() as home, contextlib.redirect_stderr(io.StringIO()):
            self.assertEqual(install_completion("zsh", home=home), 0)
            self.assertEqual(install_completion("zsh", home=home), 0)
            with open(os.path.join(home, ".zshrc"), encoding="utf-8") as f:
                text = f.read()
        self.assertEqual(text.count("register-python-argcomplete weakmeter"), 1)
        self.assertIn("bashcompinit", text)

    def test_print(self):
        with contextlib.redirect_stdout(io.StringIO()) as out:
            self.assertEqual(run(["completion", "bash", "--print"]), 0)
        self.assertEqual(out.getvalue().strip(), completion_script("bash")[0])


if __name__ == '__main__':
    unittest.main()
