import csv
import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from sympair import config
from sympair.catalog import clear_cache
from sympair.cli import main


def schema(name):
    return json.loads(resources.files("sympair").joinpath(f"schemas/{name}.json").read_text())


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


# ------------------------------------------------------------ subcommands

def test_table(tmp_path, capsys):
    out = tmp_path / "t.json"
    code, text, _ = run(["table", "symmetric:3", "--out", str(out)], capsys)
    assert code == 0
    assert "classes 3" in text
    data = json.loads(out.read_text())
    jsonschema.validate(data, schema("table"))
    assert sorted(data["degrees"]) == [1, 1, 2]


def test_mult_gl23_transpose_inverse(tmp_path, capsys):
    out = tmp_path / "m.json"
    code, text, _ = run(["mult", "gl:2:3", "--theta", "transpose-inverse", "-v",
                         "--out", str(out)], capsys)
    assert code == 0
    data = json.loads(out.read_text())
    jsonschema.validate(data, schema("mult"))
    # value confirmed by the Hecke-algebra oracle in test_pairs
    assert data["nu"] == 1 and data["policy"] == "single:transpose-inverse"
    assert "nu=1" in text


def test_mult_all_policy_label(tmp_path, capsys):
    out = tmp_path / "m.json"
    code, _, _ = run(["mult", "symmetric:3", "--theta", "all", "--out", str(out)], capsys)
    data = json.loads(out.read_text())
    assert code == 0 and data["policy"] == "true-max" and len(data["reports"]) == 4
    assert all(r["catalog_complete"] for r in data["reports"])


def test_h1_heisenberg_all(tmp_path, capsys):
    out = tmp_path / "h.json"
    code, text, _ = run(["h1", "heisenberg:5", "--theta", "all", "--out", str(out)], capsys)
    assert code == 0
    lines = [l for l in text.splitlines() if "|H1|" in l]
    assert lines and all(l.endswith("|H1|=1") for l in lines)
    data = json.loads(out.read_text())
    jsonschema.validate(data, schema("h1"))
    assert all(r["class_count"] == 1 for r in data["results"])


def test_h2(tmp_path, capsys):
    out = tmp_path / "h2.json"
    code, text, _ = run(["h2", "cyclic:2", "--p", "2", "--out", str(out)], capsys)
    assert code == 0 and text.strip().endswith("= 1")
    data = json.loads(out.read_text())
    jsonschema.validate(data, schema("h2"))
    assert data["dim"] == 1


def test_verify_main_on_semidirect(tmp_path, capsys):
    out = tmp_path / "v.json"
    code, text, _ = run(["verify", "main", "--spec", "semidirect:(heisenberg:3),(cyclic:2):0",
                         "--p", "3", "--out", str(out)], capsys)
    assert code == 0
    assert "[main] trace: PASS" in text
    data = json.loads(out.read_text())
    jsonschema.validate(data, schema("verify"))
    assert data["ok"]


def test_verify_mackey_draws(capsys):
    code, text, _ = run(["verify", "mackey", "--draws", "50"], capsys)
    assert code == 0
    assert "[mackey] mackey: PASS 50/50" in text


# ------------------------------------------------------------ exit codes

@pytest.mark.parametrize("argv", [["table", "cyclc:5"], ["mult", "gl:2:4"],
                                  ["h2", "cyclic:2:2", "--p", "2"],
                                  ["mult", "gl:2:3", "--theta", "no-such-involution"],
                                  ["h2", "cyclic:100", "--p", "2"],
                                  ["table", "cyclic:3", "--config", "/nonexistent/file"]])
def test_user_errors_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert err.strip()


def test_parse_error_message_has_position(capsys):
    code, _, err = run(["table", "product:(cyclic:2"], capsys)
    assert code == 2 and "column 18" in err


def test_env_caps_exit_2():
    env = {"SYMPAIR_CAPS": "40", "PATH": "/usr/bin:/bin"}
    r = subprocess.run([sys.executable, "-m", "sympair.cli", "table", "gl:2:3"],
                       capture_output=True, text=True, env=env)
    assert r.returncode == 2 and "cap" in r.stderr


@pytest.mark.parametrize("caps", ["abc", "1:2:3:4", "0"])
def test_malformed_env_caps_exit_2(caps):
    env = {"SYMPAIR_CAPS": caps, "PATH": "/usr/bin:/bin"}
    r = subprocess.run([sys.executable, "-m", "sympair.cli", "h2", "cyclic:2", "--p", "2"],
                       capture_output=True, text=True, env=env)
    assert r.returncode == 2 and "SYMPAIR_CAPS" in r.stderr


def test_failed_check_exits_3(monkeypatch, capsys):
    import sympair.verify as verify

    def broken(**kw):
        res = verify.SuiteResult("kernel")
        res.record("identity", False, {"spec": "symmetric:3", "why": "injected"})
        return res

    monkeypatch.setattr(verify, "run_suite", lambda name, **kw: broken(**kw))
    code, _, err = run(["verify", "kernel"], capsys)
    assert code == 3
    assert "injected" in err


def test_console_script_installed():
    r = subprocess.run(["sympair", "h2", "cyclic:3", "--p", "2"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip().endswith("= 0")


# ------------------------------------------------------------ config file

def test_config_file_supplies_flags(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\n--theta transpose-inverse\n")
    out = tmp_path / "m.json"
    code, _, _ = run(["--config", str(cfg), "mult", "gl:2:3", "--out", str(out)], capsys)
    assert code == 0
    assert json.loads(out.read_text())["policy"] == "single:transpose-inverse"
    # explicit flags win over the file
    code, _, _ = run(["--config", str(cfg), "mult", "gl:2:3", "--theta", "id",
                      "--out", str(out)], capsys)
    assert json.loads(out.read_text())["policy"] == "single:id"


# ------------------------------------------------------------ survey

def survey(tmp_path, capsys, name):
    csv_path = tmp_path / f"{name}.csv"
    out = tmp_path / f"{name}.json"
    code, text, _ = run(["survey", "heisenberg", "--primes", "3,5", "--theta", "standard",
                         "--csv", str(csv_path), "--out", str(out)], capsys)
    assert code == 0
    return csv_path, out


def test_survey_outputs(tmp_path, capsys):
    csv_path, out = survey(tmp_path, capsys, "a")
    rows = list(csv.reader(csv_path.open()))
    assert rows[0] == ["p", "spec", "order", "classes", "involutions", "nu", "mu", "policy",
                       "status", "wall_time"]
    assert [r[0] for r in rows[1:]] == ["3", "5"]
    assert all(r[5] == "1" for r in rows[1:])
    png = csv_path.with_suffix(".png")
    assert png.exists() and png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    data = json.loads(out.read_text())
    jsonschema.validate(data, schema("survey"))
    assert data["summary"]["nu_max"] == 1


def test_survey_is_deterministic(tmp_path, capsys):
    def strip(path):
        data = json.loads(path.read_text())
        for r in data["rows"]:
            r.pop("wall_time")
        for c in data["cells"]:
            c.pop("seconds")
        return data

    def csv_rows(path):
        return [r[:-1] for r in csv.reader(path.open())]

    c1, j1 = survey(tmp_path, capsys, "a")
    c2, j2 = survey(tmp_path, capsys, "b")
    assert strip(j1) == strip(j2)
    assert csv_rows(c1) == csv_rows(c2)


def test_survey_records_out_of_range_rows(tmp_path, capsys):
    out = tmp_path / "s.json"
    code, _, _ = run(["survey", "symmetric", "--primes", "5,11", "--out", str(out)], capsys)
    assert code == 0
    rows = json.loads(out.read_text())["rows"]
    assert rows[0]["status"] == "ok" and rows[0]["order"] == 120
    assert rows[1]["status"].startswith("skipped") and rows[1]["nu"] is None


def test_survey_records_capped_rows(tmp_path, capsys):
    env_old = config.set_caps(order=1000)
    clear_cache()
    out = tmp_path / "s.json"
    try:
        code, _, _ = run(["survey", "gl:2", "--primes", "3,11", "--out", str(out)], capsys)
    finally:
        config.set_caps(**env_old.__dict__)
    assert code == 0
    rows = json.loads(out.read_text())["rows"]
    assert [r["status"][:7] for r in rows] == ["ok", "skipped"]


def test_survey_parallel_cells_match_serial():
    from sympair.survey import run_survey

    a = run_survey("heisenberg", [3, 5], policy="all", jobs=1).dumps(timings=False)
    b = run_survey("heisenberg", [3, 5], policy="all", jobs=2).dumps(timings=False)
    assert a == b
