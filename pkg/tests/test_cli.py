import io
import json
import pathlib
import shutil
import subprocess

import pytest

from tsvar import TimeScale
from tsvar.cli import run

FIX = pathlib.Path(__file__).resolve().parent / "fixtures"

Z5 = str(FIX / "z5.json")
Z6 = str(FIX / "z6.json")
HYBRID = str(FIX / "hybrid01_2.json")
PROB_V2 = str(FIX / "prob_v2.json")
DPROB = str(FIX / "dprob_grad2.json")
DPROB_BAD = str(FIX / "dprob_bad_axis.json")
TABLE_TSQ = str(FIX / "table_tsq.json")


def invoke(*argv):
    buf = io.StringIO()
    code = run(list(argv), out=buf)
    return code, buf.getvalue()


class TestScalarCommands:
    def test_integrate_prints_bare_value(self):
        code, text = invoke("integrate", "--scale", Z6, "--fn", "1", "--a", "0", "--b", "3")
        assert (code, text) == (0, "3\n")

    def test_deriv_prints_bare_value(self):
        code, text = invoke("deriv", "--scale", Z6, "--fn", "t^2", "--t", "3")
        assert (code, text) == (0, "7\n")

    def test_deriv_from_tabulated_file(self):
        code, text = invoke("deriv", "--scale", Z6, "--fn", TABLE_TSQ, "--t", "3")
        assert (code, text) == (0, "7\n")

    def test_tabulated_scale_mismatch(self):
        code, _ = invoke("deriv", "--scale", Z5, "--fn", TABLE_TSQ, "--t", "3")
        assert code == 2

    def test_classify_text(self):
        code, text = invoke("classify", "--scale", Z6, "--t", "2")
        assert code == 0
        assert "left-scattered right-scattered" in text and "sigma = 3" in text

    def test_integrate_exact_flag_tracks_arithmetic(self):
        code, text = invoke(
            "integrate", "--scale", Z6, "--fn", "t", "--a", "0", "--b", "3",
            "--format", "json",
        )
        assert code == 0 and json.loads(text)["results"]["exact"] is True
        code, text = invoke(
            "integrate", "--scale", HYBRID, "--fn", "t", "--a", "0", "--b", "1",
            "--format", "json",
        )
        assert code == 0
        rep = json.loads(text)
        assert rep["results"]["exact"] is False
        assert abs(float(rep["results"]["value"]) - 0.5) <= 1e-9


class TestJsonContract:
    def test_byte_stable_across_runs(self):
        args = ("deriv", "--scale", Z6, "--fn", "t^2", "--t", "3", "--format", "json")
        assert invoke(*args) == invoke(*args)

    def test_report_shape_and_method(self):
        _, text = invoke("deriv", "--scale", Z6, "--fn", "t^2", "--t", "3", "--format", "json")
        rep = json.loads(text)
        assert set(rep) == {"command", "inputs", "results", "findings", "status"}
        assert rep["results"]["method"] == "exact-quotient"
        assert rep["status"] == "ok"
        assert len(rep["inputs"]["digest"]) == 64

    def test_embedded_scale_reloads(self):
        _, text = invoke("classify", "--scale", Z6, "--t", "2", "--format", "json")
        rep = json.loads(text)
        again = TimeScale.from_json(rep["inputs"]["scale"])
        assert again == TimeScale.from_json(json.loads(pathlib.Path(Z6).read_text()))

    def test_out_file_matches_stream(self, tmp_path):
        target = tmp_path / "report.json"
        _, text = invoke(
            "integrate", "--scale", Z6, "--fn", "1", "--a", "0", "--b", "3",
            "--format", "json", "--out", str(target),
        )
        assert target.read_text() == text


class TestExitCodes:
    @pytest.mark.parametrize(
        "name", ["malformed_syntax.json", "malformed_nan.json", "malformed_interval.json"]
    )
    def test_malformed_scale_files(self, name):
        code, text = invoke("classify", "--scale", str(FIX / name), "--t", "0")
        assert code == 2 and text == ""

    def test_syntax_error_reports_position(self, capsys):
        invoke("classify", "--scale", str(FIX / "malformed_syntax.json"), "--t", "0")
        err = capsys.readouterr().err
        assert "line" in err and "column" in err

    def test_unknown_command(self):
        code, _ = invoke("bogus")
        assert code == 2

    def test_missing_required_argument(self):
        code, _ = invoke("deriv", "--scale", Z6)
        assert code == 2

    def test_help_exits_zero(self):
        code, _ = invoke("-h")
        assert code == 0

    def test_point_not_on_scale(self):
        code, _ = invoke("classify", "--scale", Z6, "--t", "99")
        assert code == 2

    def test_nonpositive_tolerance(self):
        code, _ = invoke(
            "integrate", "--scale", Z6, "--fn", "1", "--a", "0", "--b", "3",
            "--tol", "-1",
        )
        assert code == 2

    def test_env_tolerance(self, monkeypatch):
        args = ("integrate", "--scale", Z6, "--fn", "1", "--a", "0", "--b", "3")
        monkeypatch.setenv("TSVAR_TOL", "1e-8")
        assert invoke(*args) == (0, "3\n")
        monkeypatch.setenv("TSVAR_TOL", "not-a-number")
        assert invoke(*args)[0] == 2
        # an explicit flag wins over the broken environment
        assert invoke(*args, "--tol", "1e-10") == (0, "3\n")


class TestVerdictCommands:
    def test_el_residual_flags_nonstationary_trajectory(self):
        code, text = invoke("el-residual", "--problem", PROB_V2, "--y", "t^2")
        assert code == 1 and "fail" in text

    def test_el_residual_pass_tol_loosens_the_gate(self):
        code, _ = invoke(
            "el-residual", "--problem", PROB_V2, "--y", "t^2", "--pass-tol", "100"
        )
        assert code == 0

    def test_el_residual_stationary_trajectory(self):
        code, text = invoke("el-residual", "--problem", PROB_V2, "--y", "t")
        assert code == 0
        assert "c_hat = 2" in text
        assert text.count("finding:") == 2

    def test_ibp_check_exact_on_discrete(self):
        code, text = invoke(
            "ibp-check", "--scale", Z6, "--f", "t", "--g", "t^2",
            "--a", "0", "--b", "5",
        )
        assert code == 0
        assert "form 1: residual = 0" in text and "form 2: residual = 0" in text

    def test_flcv_kernel_delta(self):
        code, text = invoke("flcv-kernel", "--scale", Z6, "--variant", "delta")
        assert code == 0
        assert "unconstrained = {4}" in text
        assert "claimed domain fully constrained: True" in text

    def test_flcv_kernel_nabla_reports_failed_claim_with_exit_zero(self):
        code, text = invoke("flcv-kernel", "--scale", Z5, "--variant", "nabla")
        assert code == 0
        assert "unconstrained = {1, 5}" in text
        assert "claimed domain fully constrained: False" in text

    def test_double_el(self):
        code, text = invoke("double-el", "--problem", DPROB, "--u", "t1+t2")
        assert code == 0
        assert "evaluated at 9 points, 7 undefined" in text

    def test_double_el_findings_in_json(self):
        _, text = invoke(
            "double-el", "--problem", DPROB, "--u", "t1+t2", "--format", "json"
        )
        rep = json.loads(text)
        assert len(rep["findings"]) == 7
        assert all("left-scattered maximum" in f for f in rep["findings"])

    def test_fubini_check_hybrid(self):
        code, text = invoke(
            "fubini-check", "--scale1", HYBRID, "--scale2", HYBRID, "--fn", "t1*t2"
        )
        assert code == 0 and "ok" in text

    def test_derivation_check_discrete(self):
        code, text = invoke(
            "derivation-check", "--problem", DPROB, "--u", "t1+t2",
            "--eta", "t1*(4-t1)*t2*(4-t2)",
        )
        assert code == 0
        assert "combine: residual = 0" in text
        assert "region-split: residual = 0" in text

    def test_derivation_check_refuses_bad_axis(self, capsys):
        code, _ = invoke(
            "derivation-check", "--problem", DPROB_BAD, "--u", "t1+t2",
            "--eta", "t1*(1.5-t1)*t2*(1.5-t2)",
        )
        assert code == 2
        assert "unsupported" in capsys.readouterr().err

    def test_counterexample_confirmed(self):
        code, text = invoke("counterexample", "nabla-endpoints", "--format", "json")
        assert code == 0
        assert json.loads(text)["results"]["confirmed"] is True

    def test_counterexample_origin_flag(self):
        code, text = invoke(
            "counterexample", "nabla-endpoints", "--origin", "3", "--format", "json"
        )
        assert code == 0
        assert "{3, 4, 5, 6, 7}" == json.loads(text)["results"]["witness"]["scale"]

    def test_counterexample_bad_witness_point(self):
        code, _ = invoke("counterexample", "eta-not-c1", "--t0", "0.5")
        assert code == 2


class TestConsoleScript:
    def test_installed_entry_point(self):
        exe = shutil.which("tsvar")
        assert exe is not None
        proc = subprocess.run(
            [exe, "integrate", "--scale", Z6, "--fn", "1", "--a", "0", "--b", "3"],
            capture_output=True, text=True, timeout=60,
        )
        assert proc.returncode == 0
        assert proc.stdout == "3\n"
