import json
import subprocess
import sys

import pytest

from dnfrt.cli import build_parser, main


def test_test_command_writes_reports(tmp_path, capsys):
    out = tmp_path / "run"
    rc = main(
        ["test", "--n", "10", "--s", "1", "--eps", "1/4", "--trials", "2", "--seed", "3",
         "--instance", "random_dnf:n=10,s=1,wmax=3", "--out", str(out)]
    )
    assert rc == 0
    text = capsys.readouterr().out
    assert "accept_rate=" in text and "budget_violations=0" in text
    report = json.loads((out / "report.json").read_text())
    assert report["config"]["eps"] == "1/4"
    assert (out / "trials.csv").read_text().startswith("trial,seed,verdict,reason,r_vector,mq_calls,samp_calls,wall_ms")


def test_test_command_with_override_and_file(tmp_path, capsys):
    f = tmp_path / "f.dnf"
    f.write_text("1 2\n-3\n")
    rc = main(["test", "--n", "3", "--s", "2", "--eps", "1/4", "--trials", "1", "--instance", str(f), "--override", "eq_samples=64"])
    assert rc == 0
    assert "trials=1" in capsys.readouterr().out


def test_theory_mode_errors(capsys):
    rc = main(["test", "--n", "8", "--s", "1", "--eps", "1/4", "--mode", "theory", "--trials", "1", "--instance", "random_dnf:n=8"])
    assert rc == 2
    assert "not runnable" in capsys.readouterr().err


def test_bad_inputs(capsys):
    assert main(["test", "--n", "9", "--s", "1", "--eps", "1/4", "--instance", "random_dnf:n=8"]) == 2
    assert main(["test", "--n", "8", "--s", "1", "--eps", "1/4", "--instance", "random_dnf:n=8", "--override", "bogus=1"]) == 2
    with pytest.raises(SystemExit):
        build_parser().parse_args(["test", "--n", "8", "--s", "1", "--eps", "x/y", "--instance", "a:n=1"])
    capsys.readouterr()


def test_bench_json(capsys):
    rc = main(["bench", "--s", "1", "2", "--trials", "2", "--n", "10", "--json"])
    assert rc == 0
    data = json.loads(capsys.readouterr().out)
    assert [r["s"] for r in data["rows"]] == [1, 2]
    assert all(r["violations"] == 0 for r in data["rows"])
    assert set(data["rows"][0]) == {"s", "trials", "budget", "tfd_bound", "mean", "max", "accept_rate", "violations"}


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "dnfrt.cli", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    assert "verify" in out.stdout and "bench" in out.stdout
