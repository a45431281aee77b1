"""The msglen command line: fit, eval, sample, check."""

import io
import math

import numpy as np
import pytest

from msglen.cli import main, parse_model_expr
from msglen.errors import ModelExprError
from msglen.models import (
    IndependentProductFamily,
    Model,
    NormalModel,
    TransformedContinuousFamily,
    UPModel,
)


def run(argv, capsys, stdin_text=None, monkeypatch=None):
    if stdin_text is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin_text))
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def kv(out):
    pairs = {}
    for line in out.strip().splitlines():
        key, _, value = line.partition("=")
        pairs[key] = value
    return pairs


def write_csv(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestModelExpr:
    def test_families(self):
        assert isinstance(parse_model_expr("normal"), UPModel)
        assert parse_model_expr("uniform:0:3").name == "uniform:0:3"
        assert parse_model_expr("multistate:0:1").name == "multistate:0:1"
        assert isinstance(parse_model_expr("rd:normal^2"), IndependentProductFamily)

    def test_parameterised(self):
        m = parse_model_expr("normal(0,1)")
        assert isinstance(m, NormalModel)
        m = parse_model_expr("multistate:0:1(0.5,0.5)")
        assert isinstance(m, Model)
        m = parse_model_expr("rd:normal^2(0,1;2,0.5)")
        assert m.components[1].mean == 2.0

    def test_transform_chain(self):
        fam = parse_model_expr("normal.transform(log)")
        assert isinstance(fam, TransformedContinuousFamily)
        fam = parse_model_expr("normal.transform(linear(2,1)).transform(exp)")
        assert fam.name == "normal.transform(linear(2,1)).transform(exp)"

    def test_parameterised_transform(self):
        m = parse_model_expr("normal(0,1).transform(log)")
        assert m.pdf(1.0) == pytest.approx(0.3989422804014327, rel=1e-12)

    def test_discrete_transform_uses_bounds(self):
        fam = parse_model_expr("uniform:0:3.transform(reverse)")
        m = fam.parameterise(())
        assert [m.pr_value(k) for k in m.space()] == pytest.approx([0.25] * 4)
        parse_model_expr("multistate:0:5.transform(rotate(2))")

    def test_errors_carry_position(self):
        with pytest.raises(ModelExprError):
            parse_model_expr("gamma")
        with pytest.raises(ModelExprError):
            parse_model_expr("normal.transform(polar2cartesian)")
        with pytest.raises(ModelExprError):
            parse_model_expr("normal.transform(frobnicate)")
        with pytest.raises(ModelExprError):
            parse_model_expr("normal(0,1)x")
        with pytest.raises(ModelExprError):
            parse_model_expr("uniform:3:0")


class TestFit:
    def test_fit_normal_kv(self, tmp_path, capsys):
        rng = np.random.default_rng(42)
        rows = "\n".join(repr(float(x)) for x in rng.normal(5, 2, 200))
        path = write_csv(tmp_path, "d.csv", "x\n" + rows + "\n")
        code, out, _ = run(["fit", "normal", path, "--aom-const", "0.01", "--format", "kv"], capsys)
        assert code == 0
        got = kv(out)
        assert got["model"] == "normal"
        assert abs(float(got["param.mean"]) - 5.0) < 0.6
        assert float(got["msg"]) == pytest.approx(
            float(got["msg1"]) + float(got["msg2"]), abs=1e-9
        )
        assert got["units"] == "nits"

    def test_fit_log_normal_matches_external_log_mapping(self, tmp_path, capsys):
        rng = np.random.default_rng(42)
        xs = [math.exp(float(v)) for v in rng.normal(0.3, 0.9, 300)]
        raw = "x,aom\n" + "\n".join(f"{x!r},0.001" for x in xs) + "\n"
        mapped = "x,aom\n" + "\n".join(
            f"{math.log(x)!r},{0.001 / x!r}" for x in xs
        ) + "\n"
        p1 = write_csv(tmp_path, "raw.csv", raw)
        p2 = write_csv(tmp_path, "mapped.csv", mapped)
        code1, out1, _ = run(
            ["fit", "normal.transform(log)", p1, "--aom-col", "aom", "--format", "kv"], capsys
        )
        code2, out2, _ = run(["fit", "normal", p2, "--aom-col", "aom", "--format", "kv"], capsys)
        assert code1 == 0 and code2 == 0
        assert float(kv(out1)["msg"]) == pytest.approx(float(kv(out2)["msg"]), abs=1e-9)

    def test_fit_uniform_rejects_out_of_bounds(self, tmp_path, capsys):
        path = write_csv(tmp_path, "d.csv", "k\n1\n7\n")
        code, _, err = run(["fit", "uniform:0:3", path], capsys)
        assert code == 2
        assert "7" in err

    def test_fit_rd_two_columns(self, tmp_path, capsys):
        rng = np.random.default_rng(1)
        rows = "\n".join(
            f"{float(a)!r},{float(b)!r}" for a, b in zip(rng.normal(0, 1, 100), rng.normal(3, 2, 100))
        )
        path = write_csv(tmp_path, "d.csv", "a,b\n" + rows + "\n")
        code, out, _ = run(["fit", "rd:normal^2", path, "--aom-const", "0.01", "--format", "kv"], capsys)
        assert code == 0
        got = kv(out)
        assert abs(float(got["param.0.mean"])) < 0.5
        assert abs(float(got["param.1.mean"]) - 3.0) < 1.0

    def test_fit_multistate(self, tmp_path, capsys):
        path = write_csv(tmp_path, "d.csv", "k\n0\n0\n1\n1\n")
        code, out, _ = run(["fit", "multistate:0:1", path, "--format", "kv"], capsys)
        assert code == 0
        got = kv(out)
        assert float(got["param.p0"]) == pytest.approx(0.5, rel=1e-12)

    def test_fit_rejects_parameterised_model(self, tmp_path, capsys):
        path = write_csv(tmp_path, "d.csv", "x\n1\n2\n")
        code, _, err = run(["fit", "normal(0,1)", path], capsys)
        assert code == 1

    def test_fit_bits_flag(self, tmp_path, capsys):
        rng = np.random.default_rng(0)
        rows = "\n".join(repr(float(x)) for x in rng.normal(0, 1, 50))
        path = write_csv(tmp_path, "d.csv", "x\n" + rows + "\n")
        _, nits_out, _ = run(["fit", "normal", path, "--aom-const", "0.01", "--format", "kv"], capsys)
        _, bits_out, _ = run(
            ["fit", "normal", path, "--aom-const", "0.01", "--format", "kv", "--bits"], capsys
        )
        assert float(kv(bits_out)["msg"]) == pytest.approx(
            float(kv(nits_out)["msg"]) / math.log(2.0), rel=1e-12
        )
        assert kv(bits_out)["units"] == "bits"


class TestEval:
    def test_standard_normal_single_row(self, capsys, monkeypatch):
        code, out, _ = run(
            ["eval", "normal(0,1)", "-", "--aom-col", "aom", "--format", "kv"],
            capsys,
            stdin_text="x,aom\n0,1\n",
            monkeypatch=monkeypatch,
        )
        assert code == 0
        assert float(kv(out)["total"]) == pytest.approx(0.9189385332046727, rel=1e-9)

    def test_empty_csv_totals_zero(self, capsys, monkeypatch):
        code, out, _ = run(
            ["eval", "normal(0,1)", "-", "--format", "kv"],
            capsys,
            stdin_text="x\n",
            monkeypatch=monkeypatch,
        )
        assert code == 0
        assert float(kv(out)["total"]) == 0.0
        assert kv(out)["count"] == "0"

    def test_fair_coin(self, capsys, monkeypatch):
        code, out, _ = run(
            ["eval", "multistate:0:1(0.5,0.5)", "-", "--format", "kv"],
            capsys,
            stdin_text="k\n0\n1\n1\n",
            monkeypatch=monkeypatch,
        )
        assert code == 0
        assert float(kv(out)["total"]) == pytest.approx(3 * math.log(2.0), rel=1e-12)

    def test_eval_requires_parameters(self, capsys, monkeypatch):
        code, _, err = run(
            ["eval", "normal", "-"], capsys, stdin_text="x\n0\n", monkeypatch=monkeypatch
        )
        assert code == 1
        assert "parameters" in err

    def test_uniform_has_trivial_parameters(self, capsys, monkeypatch):
        code, out, _ = run(
            ["eval", "uniform:0:3", "-", "--format", "kv"],
            capsys,
            stdin_text="k\n2\n",
            monkeypatch=monkeypatch,
        )
        assert code == 0
        assert float(kv(out)["total"]) == pytest.approx(math.log(4.0), rel=1e-12)

    def test_domain_error_exit_code(self, capsys, monkeypatch):
        code, _, err = run(
            ["eval", "normal(0,1).transform(log)", "-", "--aom-const", "0.1"],
            capsys,
            stdin_text="x\n-1\n",
            monkeypatch=monkeypatch,
        )
        assert code == 2


class TestSample:
    def test_deterministic_under_seed(self, capsys):
        code1, out1, _ = run(["sample", "normal(0,1).transform(log)", "5", "--seed", "42"], capsys)
        code2, out2, _ = run(["sample", "normal(0,1).transform(log)", "5", "--seed", "42"], capsys)
        assert code1 == code2 == 0
        assert out1 == out2
        _, out3, _ = run(["sample", "normal(0,1).transform(log)", "5", "--seed", "43"], capsys)
        assert out3 != out1

    def test_zero_rows_gives_header_only(self, capsys):
        code, out, _ = run(["sample", "normal(0,1)", "0"], capsys)
        assert code == 0
        assert out == "x,aom\n"

    def test_log_normal_draws_positive(self, capsys):
        _, out, _ = run(["sample", "normal(0,1).transform(log)", "200", "--seed", "1"], capsys)
        rows = out.strip().splitlines()[1:]
        assert len(rows) == 200
        assert all(float(r.split(",")[0]) > 0 for r in rows)

    def test_sample_then_fit_recovers(self, tmp_path, capsys):
        code, out, _ = run(["sample", "normal(3,0.5)", "100000", "--seed", "9"], capsys)
        assert code == 0
        path = tmp_path / "s.csv"
        path.write_text(out)
        code, out, _ = run(
            ["fit", "normal", str(path), "--aom-col", "aom", "--format", "kv"], capsys
        )
        assert code == 0
        got = kv(out)
        n = 100000
        assert abs(float(got["param.mean"]) - 3.0) < 3 * 0.5 / math.sqrt(n)
        assert abs(float(got["param.sd"]) - 0.5) < 3 * 0.5 / math.sqrt(2 * n)

    def test_discrete_and_vector_headers(self, capsys):
        _, out, _ = run(["sample", "uniform:0:3", "2", "--seed", "0"], capsys)
        assert out.splitlines()[0] == "x"
        _, out, _ = run(["sample", "rd:normal^2(0,1;1,1)", "2", "--seed", "0"], capsys)
        assert out.splitlines()[0] == "x1,x2,aom1,aom2"

    def test_sample_aom_flag(self, capsys):
        _, out, _ = run(
            ["sample", "normal(0,1)", "1", "--seed", "0", "--sample-aom", "0.25"], capsys
        )
        assert out.strip().splitlines()[1].split(",")[1] == "0.25"

    def test_negative_count(self, capsys):
        code, _, _ = run(["sample", "normal(0,1)", "-3"], capsys)
        assert code == 1


class TestCheck:
    @pytest.mark.parametrize("suite", ["commute-sp", "commute-est", "info", "jacobian", "normalize", "aom"])
    def test_suites_pass(self, suite, capsys):
        code, out, _ = run(["check", suite], capsys)
        assert code == 0
        assert "FAIL" not in out
        assert "ok" in out

    def test_unknown_suite_is_usage_error(self, capsys):
        code, _, err = run(["check", "bogus"], capsys)
        assert code == 1


class TestUsage:
    def test_unknown_command(self, capsys):
        code, _, _ = run(["frobnicate"], capsys)
        assert code == 1

    def test_parse_error_goes_to_stderr(self, tmp_path, capsys):
        path = write_csv(tmp_path, "d.csv", "x\n1\n")
        code, out, err = run(["fit", "gamma", path], capsys)
        assert code == 1
        assert out == "" and "gamma" in err

    def test_missing_column_is_data_error(self, tmp_path, capsys):
        path = write_csv(tmp_path, "d.csv", "x\n1\n2\n")
        code, _, err = run(["fit", "normal", path, "--col", "nope"], capsys)
        assert code == 2
