import json

import pytest
from click.testing import CliRunner

from arstats import __version__
from arstats.cli import main
from arstats.serialize import SCHEMA, format_float, to_csv, to_json


@pytest.fixture
def run(monkeypatch):
    monkeypatch.delenv("ARSTATS_REPORT_DIR", raising=False)

    def invoke(*args):
        return CliRunner().invoke(main, [str(a) for a in args])

    return invoke


def report(result):
    return json.loads(result.stdout)


class TestExamples:
    def test_verify_algebra(self, run):
        res = run("verify-algebra", "--sector", "fermionic", "-r", 2, "-k", 3, "--tol", 1e-10)
        assert res.exit_code == 0, res.output
        rep = report(res)
        assert rep["schema"] == SCHEMA and rep["passed"] is True
        assert all(c["residual"] < 1e-12 for c in rep["checks"])

    def test_coherent_cpr(self, run):
        res = run("coherent", "--family", "cpr", "-r", 1, "-k", 3, "--point", "1")
        assert res.exit_code == 0, res.output
        assert abs(report(res)["data"]["norm_check"] - 1.0) < 1e-12

    def test_projective_moment(self, run):
        res = run("verify-measure", "--family", "projective", "-r", 1, "-k", 2, "--n", 0)
        assert res.exit_code == 0, res.output
        data = report(res)["data"]
        assert data["rhs"] == 1.0 and abs(data["lhs"] - 1.0) < 1e-12


class TestCommands:
    def test_basis_csv(self, run):
        res = run("basis", "--sector", "fermionic", "-r", 2, "-k", 3, "--format", "csv")
        assert res.exit_code == 0
        assert res.stdout == "index,n1,n2,total\n0,0,0,0\n1,0,1,1\n2,1,0,1\n3,0,2,2\n4,1,1,2\n5,2,0,2\n"

    @pytest.mark.parametrize(
        "args",
        [
            ("verify-heisenberg", "--sector", "bosonic", "-r", 2, "-k", 3, "--energies", "1,2.5"),
            ("spectrum", "-r", 2, "-k", 4),
            ("verify-bargmann", "--sector", "bosonic", "--kind", "II", "-r", 2, "-k", 3),
            ("verify-bargmann", "--kind", "fermionic", "-r", 3, "-k", 4),
            ("coherent", "--family", "kp", "--sector", "bosonic", "-k", 2, "--point", "0.5", "--overlap-with", "0.2j"),
            ("coherent", "--family", "gk", "--sector", "bosonic", "-r", 2, "--point", "1,1j", "--overlap-with", "0,0.5"),
            ("verify-eigenstate", "--sector", "bosonic", "-r", 2, "-k", 3, "--point", "1.5,-1j"),
            ("verify-measure", "--family", "bessel", "--sector", "bosonic", "-k", 3, "--n", 2),
            ("verify-measure", "--family", "ball", "--sector", "bosonic", "-r", 2, "-k", 4, "--n", "1,1"),
            ("verify-measure", "--family", "simplex", "--sector", "bosonic", "-r", 2, "-k", 4, "--n", "1,0"),
            ("bose-limit", "--sector", "bosonic", "-r", 2),
            ("bose-limit", "--sector", "fermionic"),
        ],
    )
    def test_passes(self, run, args):
        res = run(*args)
        assert res.exit_code == 0, res.output
        rep = report(res)
        assert rep["passed"] and rep["command"] == args[0]

    def test_spectrum_table(self, run):
        res = run("spectrum", "-r", 1, "-k", 2, "--format", "csv")
        assert res.stdout.splitlines()[0] == "index,n1,total,diagonal,constructed"
        assert report(run("spectrum", "-r", 1, "-k", 2))["data"]["levels"] == [0.0, 1.0]

    def test_bose_limit_table(self, run):
        rep = report(run("bose-limit", "--sector", "bosonic", "--k-list", "10,100"))
        assert [row[0] for row in rep["table"]["rows"]] == [10, 100]
        assert rep["data"]["fitted_constant"] > 0


class TestExitCodes:
    def test_check_failure(self, run):
        res = run("verify-algebra", "--sector", "bosonic", "-r", 2, "-k", 3, "--no-mask")
        assert res.exit_code == 1
        assert "FAIL triple_relations" in res.stderr
        assert report(res)["passed"] is False

    def test_not_decreasing(self, run):
        res = run("bose-limit", "--sector", "bosonic", "--k-list", "100,10")
        assert res.exit_code == 1

    @pytest.mark.parametrize(
        "args",
        [
            ("verify-algebra", "-r", 0),
            ("verify-algebra", "--sector", "bosonic", "-k", 1),
            ("verify-bargmann", "--kind", "II"),
            ("coherent", "--family", "kp", "--sector", "bosonic", "--point", "1.2"),
            ("coherent", "--family", "cpr", "-r", 2, "--point", "1"),
            ("verify-eigenstate", "--point", "0.5"),
            ("verify-measure", "--family", "projective", "-k", 2, "--n", 3),
            ("verify-heisenberg", "--energies", "1,x"),
            ("basis", "--sector", "mixed"),
            ("no-such-command",),
        ],
    )
    def test_config_errors(self, run, args):
        res = run(*args)
        assert res.exit_code == 2
        assert "Error" in res.stderr
        assert res.stdout == ""


class TestConfig:
    def test_yaml_config_and_flag_precedence(self, run, tmp_path):
        cfg = tmp_path / "run.yaml"
        cfg.write_text("sector: bosonic\nmodes: 2\nk: 3\nenergies: [1, 2]\ncutoff: 6\n")
        rep = report(run("--config", cfg, "verify-heisenberg", "-k", 4))
        assert rep["config"]["k"] == 4
        assert rep["config"]["modes"] == 2
        assert rep["config"]["cutoff"] == 6
        assert rep["config"]["energies"] == [1.0, 2.0]

    def test_json_config(self, run, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"family": "cpr", "modes": 1, "k": 3, "point": "1"}))
        res = run("--config", cfg, "coherent")
        assert res.exit_code == 0, res.output

    def test_bad_config(self, run, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text("[1, 2]")
        assert run("--config", cfg, "basis").exit_code == 2

    def test_full_effective_config(self, run):
        rep = report(run("verify-algebra", "--sector", "bosonic", "-r", 1))
        assert list(rep["config"]) == [
            "sector", "modes", "k", "cutoff", "energies", "tol", "fmt", "output", "threads",
            "samples", "seed", "no_mask",
        ]
        assert rep["config"]["cutoff"] == 8 and rep["config"]["tol"] == 1e-10

    def test_flag_order_irrelevant(self, run):
        a = run("verify-algebra", "-k", 4, "-r", 2)
        b = run("verify-algebra", "-r", 2, "-k", 4)
        assert a.stdout == b.stdout


class TestOutput:
    def test_output_file(self, run, tmp_path):
        out = tmp_path / "nested" / "r.json"
        res = run("verify-algebra", "-r", 2, "-k", 3, "--output", out)
        assert res.exit_code == 0 and res.stdout == ""
        assert json.loads(out.read_text())["passed"]

    def test_report_dir(self, run, tmp_path, monkeypatch):
        monkeypatch.setenv("ARSTATS_REPORT_DIR", str(tmp_path))
        res = run("verify-heisenberg", "-r", 2, "-k", 3, "--format", "csv")
        assert res.exit_code == 0
        text = (tmp_path / "verify-heisenberg.csv").read_text()
        assert text.startswith("identity,passed,residual")

    def test_byte_stable(self, run):
        args = ("verify-algebra", "--sector", "bosonic", "-r", 2, "-k", 3, "--seed", 5)
        assert run(*args).stdout == run(*args).stdout

    def test_threads_do_not_change_results(self, run):
        one = report(run("verify-algebra", "-r", 3, "-k", 5, "--threads", 1))
        four = report(run("verify-algebra", "-r", 3, "-k", 5, "--threads", 4))
        assert one["checks"] == four["checks"] and one["data"] == four["data"]

    def test_version(self, run):
        assert __version__ in run("--version").stdout


class TestSerialize:
    def test_floats(self):
        assert format_float(0.1) == "1.0000000000000001e-01"
        assert format_float(float("nan")) == '"NaN"'
        assert format_float(-float("inf")) == '"-Infinity"'

    def test_json_order_and_complex(self):
        text = to_json({"b": 1, "a": [1 + 2j, None, True], "c": {}})
        assert text == '{\n  "b": 1,\n  "a": [[1.0000000000000000e+00, 2.0000000000000000e+00], null, true],\n  "c": {}\n}\n'
        assert json.loads(text)["a"][0] == [1.0, 2.0]

    def test_csv(self):
        assert to_csv(["x", "y"], [[0.5, [1, 2]], [None, False]]) == "x,y\n5.0000000000000000e-01,1 2\n,false\n"
