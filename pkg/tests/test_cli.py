import json
import subprocess
import sys

import pytest

from lubintate import cli
from lubintate.cli import ConfigError, Report, build_config, main, run_command


def run(argv, capsys):
    status = main(argv)
    out = capsys.readouterr()
    return status, out.out, out.err


def test_count_points_table(capsys):
    status, out, _ = run(["count-points", "--params", "2,1,1,1"], capsys)
    assert status == 0
    lines = out.splitlines()
    assert lines[0] == "# schema_version\t1"
    assert lines[1] == "# command\tcount-points"
    assert lines[2].startswith("# config_hash\t") and len(lines[2].split("\t")[1]) == 16
    assert "params\tk\tpoints" in lines
    rows = [l.split("\t") for l in lines if l.startswith("(2,1,1,1)")]
    assert [int(r[2]) for r in rows] == [2, 8, 8]


def test_report_has_no_timestamps(capsys):
    _, out, _ = run(["count-points", "--params", "2,1,1,1", "--format", "json"], capsys)
    body = json.loads(out)
    assert body["ok"] and body["results"]["counts"] == {"1": 2, "2": 8, "3": 8}
    assert not any(k in out for k in ("time", "date", "elapsed"))


@pytest.mark.parametrize("argv", [
    ["count-points", "--params", "2,1,1,2"],          # n' not prime to p
    ["count-points", "--params", "2,1,1"],
    ["count-points"],                                  # params missing
    ["count-points", "--params", "2,1,1,1", "--k-min", "3", "--k-max", "2"],
    ["count-points", "--params", "2,1,1,1", "--budget", "0"],
    ["reduce-point", "--params", "2,1,1,1", "--prec", "1/2"],
    ["cycles", "--params", "3,1,1,1"],
])
def test_invalid_configuration_exits_2(argv, capsys):
    status, out, err = run(argv, capsys)
    assert status == 2 and out == "" and err.startswith("error:")


def test_budget_exceeded_exits_3(capsys):
    status, out, _ = run(["count-points", "--params", "3,1,1,2", "--budget", "100"], capsys)
    assert status == 3 and "budget exceeded" in out


def test_verification_failure_exits_1(monkeypatch):
    monkeypatch.setitem(cli.HANDLERS, "count-points", lambda cfg: Report({"ok": False}, ok=False))
    cfg = build_config({}, {"params": "2,1,1,1"})
    status, text = run_command("count-points", cfg)
    assert status == 1 and "# ok\tfalse" in text


def test_skipped_checks_exit_3(monkeypatch):
    monkeypatch.setitem(cli.HANDLERS, "count-points",
                        lambda cfg: Report({"x": {"skipped": "budget"}}, skipped=True))
    status, _ = run_command("count-points", build_config({}, {"params": "2,1,1,1"}))
    assert status == 3


def test_flags_override_file_override_defaults(tmp_path, capsys):
    conf = tmp_path / "run.toml"
    conf.write_text('params = "3,1,1,1"\nk_max = 2\nseed = 7\n')
    cfg = build_config(cli.load_config_file(str(conf)), {"k_max": 1})
    assert (cfg.params.p, cfg.k_max, cfg.seed, cfg.samples) == (3, 1, 7, 20)
    status, out, _ = run(["count-points", "--config", str(conf), "--k-max", "1"], capsys)
    assert status == 0
    assert [l for l in out.splitlines() if l.startswith("(3,1,1,1)")] == ["(3,1,1,1)\t1\t15"]


def test_unknown_config_key(tmp_path, capsys):
    conf = tmp_path / "bad.toml"
    conf.write_text('params = "2,1,1,1"\nprecission = 3\n')
    status, _, err = run(["count-points", "--config", str(conf)], capsys)
    assert status == 2 and "precission" in err


def test_config_hash_ignores_output_path():
    a = build_config({}, {"params": "2,1,1,1", "out": "a.tsv"})
    b = build_config({}, {"params": "2,1,1,1"})
    c = build_config({}, {"params": "2,1,1,1", "seed": 1})
    assert a.digest() == b.digest() != c.digest()


def test_out_file(tmp_path, capsys):
    target = tmp_path / "r.tsv"
    status, out, _ = run(["count-points", "--params", "2,1,1,1", "--out", str(target)], capsys)
    assert status == 0 and out == ""
    assert target.read_text().startswith("# schema_version\t1\n")


def test_partitioned_counts_identical(capsys):
    base = ["count-points", "--params", "3,1,1,2", "--k-max", "2"]
    _, serial, _ = run(base, capsys)
    _, parallel, _ = run(base + ["--partitions", "4", "--workers", "3"], capsys)
    rows = lambda t: [l for l in t.splitlines() if not l.startswith("#")]  # noqa: E731
    assert rows(serial) == rows(parallel)


@pytest.mark.parametrize("command", ["exp-sums", "weil-character", "verify-action",
                                     "reduce-point", "verify-nonarch", "llc-tables"])
def test_commands_pass_on_smallest_params(command, capsys):
    status, out, _ = run([command, "--params", "2,1,1,1", "--samples", "4", "--pairs", "10"], capsys)
    assert status == 0, out
    assert "# ok\ttrue" in out


def test_cycles_command(capsys):
    status, out, _ = run(["cycles", "--params", "2,1,1,3", "--k-max", "2"], capsys)
    assert status == 0 and "# ok\ttrue" in out


def test_verify_all_byte_identical(tmp_path):
    outs = []
    for name in ("a", "b"):
        target = tmp_path / f"{name}.tsv"
        proc = subprocess.run([sys.executable, "-m", "lubintate.cli", "verify-all", "--params",
                               "2,1,1,1", "--seed", "3", "--out", str(target)])
        assert proc.returncode == 0
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]


def test_invalid_output_format():
    with pytest.raises(ConfigError):
        build_config({}, {"params": "2,1,1,1", "output": "xml"})
