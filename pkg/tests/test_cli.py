import json
import math
import warnings

import pytest

from dilconst.cli import ThetaFileError, main, parse_angle_token, parse_theta_text, run_command
from dilconst.records import validate
from dilconst.rotreps import RationalAngle


def test_parse_theta_examples():
    t = parse_theta_text("2\n3/7\n")
    assert t[0, 1] == pytest.approx(6 * math.pi / 7)
    assert t.rational(0, 1) == RationalAngle.of(3, 7)
    z = parse_theta_text("3  # no entries\n")
    assert not z.array.any() and z.is_rational
    with pytest.warns(UserWarning, match="normalized -1/3 to 2/3"):
        mixed = parse_theta_text("# header\n3\n1/2 0.25\n-1/3\n")
    assert mixed[0, 2] == 0.25 and mixed.rational(1, 2) == RationalAngle.of(2, 3)


@pytest.mark.parametrize("text,needle", [
    ("", "empty"),
    ("x\n", "'x'"),
    ("0\n", "positive dimension"),
    ("3\n1/2 abc\n1/3\n", "'abc'"),
    ("3\n1/2\n", "expected 3"),
    ("2\n1/0\n", "zero denominator"),
    ("2\nnan\n", "non-finite"),
])
def test_parse_theta_errors(text, needle):
    with pytest.raises(ThetaFileError, match=needle):
        parse_theta_text(text)


def test_angle_normalization_warns():
    with pytest.warns(UserWarning, match="normalized"):
        assert parse_angle_token("2/4") == RationalAngle.of(1, 2)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert parse_angle_token("0") == RationalAngle.of(0, 1)
        assert parse_angle_token("1.5") == 1.5


def test_trivial_command_and_output_files(tmp_path, capsys):
    out, csv = tmp_path / "r.jsonl", tmp_path / "r.csv"
    code, recs = run_command(["--output", str(out), "--csv", str(csv), "ctheta", "--m", "0", "--n", "1", "--d", "3"])
    assert code == 0 and len(recs) == 1
    assert recs[0].value == 1.0 and recs[0].error_bound == 0.0
    printed = capsys.readouterr().out.strip().splitlines()
    assert json.loads(printed[0]) == json.loads(out.read_text().strip())
    validate(json.loads(printed[0]))
    assert csv.read_text().startswith("command,")


def test_constants_command():
    code, recs = run_command(["constants", "--d", "2"])
    assert code == 0
    vals = {r.params["constant"]: r.value for r in recs}
    assert vals["c_uf"] == pytest.approx(1.1547, abs=1e-4)
    assert vals["c_f0_lower"] == pytest.approx(1.4142, abs=1e-4)
    assert vals["c_f0_upper"] == pytest.approx(1.7321, abs=1e-4)


@pytest.mark.parametrize("argv", [
    ["ctheta", "--bogus"],
    ["ctheta", "--m", "1", "--n", "0"],
    ["ctheta", "--m", "1", "--n", "2", "--grid", "-1"],
    ["nonsense"],
    ["vectors", "--theta-file", "/nonexistent", "--theta-prime-file", "/nonexistent"],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == 2
    assert capsys.readouterr().err


def test_failed_certificate_exit(capsys):
    code, recs = run_command(["c3-bound", "--grid", "5e-2", "--target", "2.5"])
    assert code == 3 and recs and recs[0].passed is False


def test_resource_cap_exit(tmp_path, capsys):
    theta = tmp_path / "big.txt"
    theta.write_text("4\n1/7 1/7 1/7\n1/7 1/7\n1/7\n")
    code, _ = run_command(["ctheta-general", "--theta-file", str(theta)])
    assert code == 4
    assert "cap" in capsys.readouterr().err


def test_thread_variable(monkeypatch, capsys):
    monkeypatch.setenv("DILCONST_THREADS", "zero")
    assert main(["ctheta", "--m", "1", "--n", "2", "--grid", "1e-2"]) == 2
    monkeypatch.setenv("DILCONST_THREADS", "2")
    assert main(["ctheta", "--m", "1", "--n", "2", "--grid", "1e-2"]) == 0


def test_vectors_and_path_commands(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    a.write_text("3\n3/7 3/7\n3/7\n")
    b.write_text("3\n2/5 3/7\n0.5\n")
    code, recs = run_command(["vectors", "--theta-file", str(a), "--theta-prime-file", str(b)])
    assert code == 0 and recs[0].value <= 1e-10 and recs[0].details["gram_determinant"] > 0
    code, recs = run_command(["extend-path", "--oracle", "power", "--k", "3", "--t", "0.4", "--audit", "50"])
    assert code == 0 and recs[1].passed
