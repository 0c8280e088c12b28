import json
import subprocess
import sys

import pytest

from geomtomo import cli


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_compute_ball_volume(capsys):
    code, out, _ = run(["compute", "volume", "--body", "ball", "--dim", "3"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["results"][0]["value"] == pytest.approx(4.18879, abs=1e-5)
    assert doc["tool"] == "geomtomo" and doc["seed"] == 0 and "timestamp" in doc


def test_compute_csv_has_header_comments(capsys):
    code, out, _ = run(["compute", "projection", "--body", "box:1,2,3", "--theta", "0,0,1", "--format", "csv"],
                       capsys)
    lines = out.splitlines()
    assert code == 0
    assert lines[0].startswith("# geomtomo compute")
    assert lines[3] == "quantity,value,error_estimate,method,inputs_digest"
    assert lines[4].startswith("projection,8.0,")


@pytest.mark.parametrize("spec", ["ellipsoid:1,2,3", "cross:1.5", "lp:3,1.2",
                                  '{"kind": "box", "dim": 2, "params": {"widths": [1, 2]}}'])
def test_body_shorthands(spec, capsys):
    code, out, _ = run(["compute", "surface_area", "--body", spec], capsys)
    assert code == 0 and json.loads(out)["results"][0]["value"] > 0


def test_body_from_file(tmp_path, capsys):
    p = tmp_path / "k.json"
    p.write_text(json.dumps({"kind": "lp_ball", "dim": 3, "params": {"p": "inf", "scale": 1.0}}))
    code, out, _ = run(["compute", "volume", "--body", str(p)], capsys)
    assert code == 0 and json.loads(out)["results"][0]["value"] == pytest.approx(8.0)


def test_malformed_json_reports_position(capsys):
    code, _, err = run(["compute", "volume", "--body", '{"kind": "ball",'], capsys)
    assert code == 1
    assert "line 1, column" in err


def test_unsupported_combination_names_requirement(capsys):
    code, _, err = run(["verify", "--check", "thm14", "--measure", "gaussian"], capsys)
    assert code == 1
    assert "p-concave" in err and "homogeneous" in err


def test_unknown_body(capsys):
    code, _, err = run(["compute", "volume", "--body", "torus"], capsys)
    assert code == 1 and "unknown body" in err


def test_verify_pass_and_fail_exit_codes(capsys):
    code, out, _ = run(["verify", "--check", "gk", "--body", "ball:0.5", "--body", "ball"], capsys)
    assert code == 0 and json.loads(out)["results"][0]["verdict"] == "pass"
    code, out, _ = run(["verify", "--check", "gk", "--body", "ball", "--body", "ball:0.5"], capsys)
    assert code == 2


def test_verify_enforce_flag(capsys):
    code, out, _ = run(["verify", "--check", "cor13b", "--body", "ball", "--body", "ball", "--measure", "gaussian",
                        "--enforce"], capsys)
    assert code == 0


def test_verify_epsilon_auto(capsys):
    code, out, _ = run(["verify", "--check", "thm14", "--body", "ball:0.8", "--body", "ball", "--measure",
                        "cone_power", "--epsilon", "auto"], capsys)
    assert code == 0
    assert json.loads(out)["results"][0]["config"]["epsilon"] >= 0


def test_verify_json_config(tmp_path, capsys):
    p = tmp_path / "check.json"
    p.write_text(json.dumps({"check": "thm51", "bodies": ["ball:0.1", "ball"], "r": 1.0}))
    code, out, _ = run(["verify", "--check", str(p)], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["results"][0]["sub_reports"][0]["verdict"] == "pass"


def test_sweep_remark31(capsys):
    code, out, _ = run(["sweep", "remark31", "--n", "3", "--p", "1,10,100,1000", "--format", "csv"], capsys)
    assert code == 0
    rows = [l.split(",") for l in out.splitlines() if l and not l.startswith("#")]
    obs = [float(r[2]) for r in rows[1:]]
    assert obs == sorted(obs) and abs(obs[-1] - 1.5) < 2e-3


def test_sweep_figure(tmp_path, capsys):
    fig = tmp_path / "s.png"
    code, _, _ = run(["sweep", "remark41", "--n", "2,3", "--figure", str(fig)], capsys)
    assert code == 0 and fig.stat().st_size > 0


def test_battery_output_file_and_figure(tmp_path, capsys):
    out = tmp_path / "b.json"
    fig = tmp_path / "b.png"
    code, msg, _ = run(["battery", "--suite", "lemma_bank", "--count", "22", "--seed", "3", "-o", str(out),
                        "--figure", str(fig)], capsys)
    doc = json.loads(out.read_text())
    assert code == 0 and "wrote" in msg
    assert len(doc["results"]) == 22
    assert fig.stat().st_size > 0


def test_battery_manifest(tmp_path, capsys):
    p = tmp_path / "m.json"
    p.write_text(json.dumps({"checks": [{"check_id": "lemma62", "seed": 1}, {"check_id": "gk", "seed": 2}]}))
    code, out, _ = run(["battery", "--manifest", str(p)], capsys)
    doc = json.loads(out)
    assert code == 0 and [r["check_id"] for r in doc["results"]] == ["lemma62", "gk"]


def test_battery_rerun_identical_except_timestamp(capsys):
    docs = []
    for _ in range(2):
        _, out, _ = run(["battery", "--suite", "lemma_bank", "--count", "11", "--seed", "9"], capsys)
        d = json.loads(out)
        d.pop("timestamp")
        docs.append(json.dumps(d, sort_keys=True))
    assert docs[0] == docs[1]


def test_level_out_of_range_is_rejected():
    with pytest.raises(SystemExit):
        cli.main(["compute", "volume", "--level", "7"])


def test_console_script_entry_point():
    r = subprocess.run([sys.executable, "-m", "geomtomo.cli", "compute", "radii", "--body", "cross", "--dim", "4",
                        "--format", "csv"], capture_output=True, text=True)
    assert r.returncode == 0
    assert "inradius,0.5," in r.stdout
