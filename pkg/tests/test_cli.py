import json
import subprocess
import sys

import pytest

from bhcert.cli import RunConfig, UsageError, main, sweep_specs


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_family_r2(capsys):
    code, out, _ = run(capsys, "family", "R:2")
    assert code == 0
    assert out.strip().splitlines()[-1] == "# terms 3  degree 2  vars 2"


def test_family_qpow(capsys):
    code, out, _ = run(capsys, "family", "Qpow:1,2")
    assert code == 0 and "# terms 3  degree 4  vars 2" in out


def test_family_bad_spec(capsys):
    code, _, err = run(capsys, "family", "R:1")
    assert code == 1 and "m must be even" in err and "R:4" in err


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 1


def test_certify_r2(capsys):
    code, out, _ = run(capsys, "certify", "R:2")
    d = json.loads(out)
    assert code == 0
    assert d["ratio_lower"] == pytest.approx(1.8236, abs=1e-4)


def test_certify_p4(capsys):
    code, out, _ = run(capsys, "certify", "P4pow:1")
    d = json.loads(out)
    assert code == 0
    assert d["ratio_lower"] == pytest.approx(4.0068, abs=1e-4)
    assert d["closed_form"]["value"] == pytest.approx(3.6742, abs=1e-4)


def test_certify_qpow(capsys):
    code, out, _ = run(capsys, "certify", "Qpow:2,2")
    assert code == 0 and json.loads(out)["ratio_lower"] >= (4 / 3) ** 3


def test_norms_and_supnorm(capsys):
    code, out, _ = run(capsys, "norms", "R:2")
    d = json.loads(out)
    assert code == 0 and d["bh_exponent"] == "4/3" and d["l1"] == "3"
    code, out, _ = run(capsys, "supnorm", "R:4")
    d = json.loads(out)
    assert code == 0 and d["hi"] == "1.5625" and d["method"] == "structural"


def test_sweep_csv(capsys):
    code, out, _ = run(capsys, "sweep", "R", "2..10", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0] == "m,n_vars,ratio_lower,closed_form,ratio_lower^(1/m)"
    assert [ln.split(",")[0] for ln in lines[1:]] == ["2", "4", "6", "8", "10"]


def test_sweep_empty_range(capsys):
    code, out, _ = run(capsys, "sweep", "R", "5..4")
    assert code == 0 and out.strip().splitlines() == [
        "m,n_vars,ratio_lower,closed_form,ratio_lower^(1/m)"]


def test_sweep_svg(tmp_path, capsys):
    target = tmp_path / "q.svg"
    code, _, _ = run(capsys, "sweep", "Qpow", "k=1", "n=1..4", "--format", "svg",
                     "--out", str(target))
    text = target.read_text()
    assert code == 0 and text.startswith("<svg") and text.rstrip().endswith("</svg>")
    assert text.count("<circle") == 4
    assert "27^(1/8)" in text and "2^(1-2^-1)" in text


def test_sweep_json(capsys):
    code, out, _ = run(capsys, "sweep", "P4pow", "1..2", "--format", "json")
    d = json.loads(out)
    assert code == 0 and len(d["certificates"]) == 2 and d["errors"] == []


def test_sweep_parsing():
    assert [s.params for s in sweep_specs("Rodd", ["2..7"])] == [(3,), (5,), (7,)]
    assert len(sweep_specs("Qpow", ["k=1..2", "n=1..3"])) == 6
    with pytest.raises(UsageError):
        sweep_specs("Z", ["1..2"])
    with pytest.raises(UsageError):
        sweep_specs("R", ["two"])


def test_check_commands(capsys):
    code, out, _ = run(capsys, "check", "visser")
    assert code == 0 and "R:2: ratio 1.78885438199983 <= 2: pass" in out
    assert "inconclusive" not in out
    code, out, _ = run(capsys, "check", "identities")
    assert code == 0 and out.count("pass") == 3
    code, out, _ = run(capsys, "check", "parseval")
    assert code == 0 and "inconclusive" not in out


def test_hidden_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "expand", "Qpow:1,3")
    assert code == 0 and "matches" in out
    code, out, _ = run(capsys, "oracle", "grid", "R:2", "101")
    assert code == 0 and out.strip().endswith("1.25")
    with pytest.raises(SystemExit):
        main(["--help"])
    assert "oracle" not in capsys.readouterr().out.split("positional arguments")[0]


def test_run_config_validation():
    with pytest.raises(UsageError):
        RunConfig("certify", tol=0)
    with pytest.raises(UsageError):
        RunConfig("certify", precision_bits=32)
    assert main(["certify", "R:2", "--tol", "-1"]) == 1


def test_nonconvergence_exit_code(monkeypatch, capsys):
    monkeypatch.setenv("BHCERT_BUDGET", "3")
    from bhcert import boxbound
    boxbound._block_enclosure.cache_clear()
    try:
        code, out, _ = run(capsys, "certify", "P4pow:1", "--tol", "1e-12")
        assert code == 2
        assert json.loads(out)["denominator"]["hi"]
    finally:
        boxbound._block_enclosure.cache_clear()


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "bhcert", "family", "P4pow:1"],
                         capture_output=True, text=True, check=True)
    assert "# terms 2  degree 4  vars 2" in res.stdout
