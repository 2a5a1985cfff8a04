import csv
import io
import json
import subprocess
import sys

import pytest

from pathspace import acceptance, cli


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv("PATHSPACE_SEED", raising=False)
    monkeypatch.delenv("PATHSPACE_OUT_DIR", raising=False)


def test_mzi_example(capsys):
    code, out, _ = run_cli(capsys, "mzi", "--wavelength", "1e-6", "--side", "0.1")
    assert code == 0
    r = rows(out)[0]
    assert float(r["p_d1"]) == pytest.approx(0.0, abs=1e-12)
    assert float(r["p_d2"]) == pytest.approx(1.0, abs=1e-12)


def test_rt_example(capsys):
    code, out, _ = run_cli(capsys, "rt", "--alpha", "0", "--beta", "2.0944", "--paths", "512")
    assert code == 0
    r = rows(out)[0]
    assert float(r["p_same_sp"]) == pytest.approx(0.25, abs=1e-4)
    assert float(r["abs_diff"]) < 1e-9


def test_toy_example(capsys):
    code, out, _ = run_cli(capsys, "toy", "--alpha", "0", "--beta", "2.0944", "--trials", "1000000", "--seed", "7")
    assert code == 0
    assert float(rows(out)[0]["p_mc"]) == pytest.approx(1 / 3, abs=0.002)


def test_toy_default_table(capsys):
    code, out, _ = run_cli(capsys, "toy", "--trials", "5000")
    assert code == 0 and len(rows(out)) == 9


def test_ifm_events_bell_cornu_run(capsys):
    assert run_cli(capsys, "ifm", "--trials", "1000", "--live-fraction", "0.5")[0] == 0
    code, out, _ = run_cli(capsys, "events", "--trials", "3000", "--grid", "3", "--format", "json")
    assert code == 0 and len(json.loads(out)["rows"]) == 9
    code, out, _ = run_cli(capsys, "events", "--trials", "3000", "--gamma-mode", "per_trial")
    assert code == 0
    code, out, _ = run_cli(capsys, "bell", "--format", "json", "--backend", "cos2", "--backend", "toy")
    assert [d["backend"] for d in json.loads(out)] == ["cos2", "toy"]
    code, out, _ = run_cli(capsys, "cornu", "--paths", "10", "--format", "json")
    assert code == 0 and len(json.loads(out)["points"]) == 11


@pytest.mark.parametrize(
    "argv",
    [[], ["nonsense"], ["mzi", "--bogus"], ["toy", "--trials", "0"], ["rt", "--wavelength", "-1"],
     ["ifm", "--format", "xml"], ["mzi", "--seed", "-3"]],
)
def test_usage_errors_exit_1(capsys, argv):
    code, out, err = run_cli(capsys, *argv)
    assert code == 1
    assert out == ""
    assert err.startswith("pathspace") or "usage" in err


@pytest.mark.parametrize(
    "argv", [["mzi", "--block", "both"], ["ifm", "--live-fraction", "2"], ["rt", "--paths", "1"]]
)
def test_domain_errors_exit_2(capsys, argv):
    code, out, err = run_cli(capsys, *argv)
    assert code == 2
    assert "validation error" in err


def test_degenerate_event_cell_is_reported(capsys):
    code, out, _ = run_cli(capsys, "events", "--alpha", "3.141592653589793", "--trials", "1000", "--gamma-mode", "per_trial")
    assert code == 0
    assert rows(out)[0]["degenerate_count"] == "1000"


def test_outputs_byte_identical(tmp_path, capsys):
    cases = [
        ["ifm", "--trials", "5000"],
        ["toy", "--trials", "5000", "--threads", "3"],
        ["events", "--trials", "4000", "--grid", "2"],
        ["rt", "--grid", "3", "--paths", "64", "--format", "json"],
        ["cornu", "--paths", "50"],
        ["bell"],
    ]
    for k, argv in enumerate(cases):
        a, b = tmp_path / f"a{k}", tmp_path / f"b{k}"
        assert cli.main([*argv, "--seed", "5", "--out", str(a)]) == 0
        assert cli.main([*argv, "--seed", "5", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
    capsys.readouterr()


def test_threads_do_not_change_output(capsys):
    _, one, _ = run_cli(capsys, "toy", "--trials", "200000", "--threads", "1")
    _, four, _ = run_cli(capsys, "toy", "--trials", "200000", "--threads", "4")
    assert one == four


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"trials": 2000, "seed": 3, "format": "json"}))
    _, from_file, _ = run_cli(capsys, "ifm", "--config", str(cfg))
    doc = json.loads(from_file)[0]
    assert doc["n_bombs"] == 2000
    _, overridden, _ = run_cli(capsys, "ifm", "--config", str(cfg), "--trials", "3000")
    assert json.loads(overridden)[0]["n_bombs"] == 3000
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"colour": 1}))
    assert run_cli(capsys, "ifm", "--config", str(bad))[0] == 1
    assert run_cli(capsys, "ifm", "--config", str(tmp_path / "missing.json"))[0] == 1


def test_environment_overrides(tmp_path, monkeypatch, capsys):
    _, base, _ = run_cli(capsys, "ifm", "--trials", "4000", "--seed", "8")
    monkeypatch.setenv("PATHSPACE_SEED", "8")
    _, env_seed, _ = run_cli(capsys, "ifm", "--trials", "4000")
    assert base == env_seed
    # an explicit flag still wins over the environment
    _, flag_seed, _ = run_cli(capsys, "ifm", "--trials", "4000", "--seed", "9")
    assert flag_seed != base
    monkeypatch.setenv("PATHSPACE_OUT_DIR", str(tmp_path / "out"))
    code, out, _ = run_cli(capsys, "mzi")
    assert code == 0 and out == ""
    assert (tmp_path / "out" / "mzi.csv").read_text().startswith("p_d1,p_d2,p_absorbed")
    monkeypatch.setenv("PATHSPACE_SEED", "abc")
    assert run_cli(capsys, "mzi")[0] == 1


def test_help_names_each_experiment(capsys):
    for name, text in cli.HELP.items():
        with pytest.raises(SystemExit) as exc:
            cli.main([name, "--help"])
        assert exc.value.code == 0
        out = capsys.readouterr().out
        assert text.split(":")[0].split()[0] in out


def test_check_json_format(monkeypatch, capsys):
    # a one-criterion suite is enough to exercise the format toggle
    monkeypatch.setattr(acceptance, "CRITERIA", acceptance.CRITERIA[:1])
    code, out, _ = run_cli(capsys, "check", "--json")
    assert code == 0
    doc = json.loads(out)
    assert [d["id"] for d in doc] == [1, 10]
    assert all(d["passed"] for d in doc)
    code, out, _ = run_cli(capsys, "--check")
    assert code == 0 and "[PASS]" in out


def test_check_negative_control():
    buf = io.StringIO()
    assert cli.check_all(rt_norm_factor=5.0, out=buf) == 3
    assert "[FAIL]  3" in buf.getvalue()


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "pathspace", "mzi", "--format", "json"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)[0]["p_d2"] == 1.0


def test_closed_stdout_pipe_is_not_an_error():
    proc = subprocess.Popen(
        [sys.executable, "-c", "from pathspace.cli import main_exit; main_exit()", "cornu", "--format", "json"],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
    )
    proc.stdout.read(10)
    proc.stdout.close()
    err = proc.stderr.read()
    assert proc.wait() == 0
    assert b"BrokenPipeError" not in err
