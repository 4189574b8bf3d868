import csv
import json

import pytest

from markovtype import jsonio, lifting as lf, metric_space as ms
from markovtype.cli import main


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def files(tmp_path):
    c4 = ms.graph_metric(ms.cycle_graph(4))
    half = "1/2"
    simple = {"pi": ["1/4"] * 4,
              "a": [[half if (j - i) % 4 in (1, 3) else 0 for j in range(4)] for i in range(4)]}
    return {
        "tmp": tmp_path,
        "c4": write(tmp_path / "c4.json", jsonio.space_to_json(c4)),
        "c4graph": write(tmp_path / "c4graph.json", {"gen": "cycle", "n": 4}),
        "c8graph": write(tmp_path / "c8graph.json", {"gen": "cycle", "n": 8}),
        "map": write(tmp_path / "map.json", {"vertex_map": [i % 4 for i in range(8)],
                                             "check": "local_bijective"}),
        "simple": write(tmp_path / "simple.json", simple),
        "flip": write(tmp_path / "flip.json", {"pi": [half, half], "a": [[0, 1], [1, 0]]}),
        "rot": write(tmp_path / "rot.json", {"generators": [[2, 3, 0, 1]]}),
        "two": write(tmp_path / "two.json", {"dist": [[0, 1], [1, 0]]}),
    }


def test_space_gen_and_check(files, capsys):
    out = str(files["tmp"] / "h3.json")
    assert main(["space", "gen", "hamming", "--d", "3", "--json", out]) == 0
    assert main(["space", "check", "--space", out]) == 0
    assert "8 points, diameter 3" in capsys.readouterr().out


def test_space_check_rejects_bad_matrix(files, capsys):
    bad = write(files["tmp"] / "bad.json", {"dist": [[0, 1, 3], [1, 0, 1], [3, 1, 0]]})
    assert main(["space", "check", "--space", bad]) == 2
    assert "MetricViolation" in capsys.readouterr().err


def test_walk_ratio_csv(files):
    out = files["tmp"] / "ratio.csv"
    assert main(["walk", "ratio", "--space", files["c4"], "--chain", files["simple"],
                 "--T", "3", "--csv", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert [r["ratio"] for r in rows] == ["1", "1", "1/3"]


def test_walk_stepdist(files, capsys):
    assert main(["walk", "stepdist", "--space", files["c4"], "--chain", files["simple"]]) == 0
    assert "distance" in capsys.readouterr().out


def test_lift_cover(files, capsys):
    out = files["tmp"] / "lift.json"
    assert main(["lift", "cover", "--cover", files["c8graph"], "--base", files["c4graph"],
                 "--map", files["map"], "--chain", files["simple"], "--json", str(out)]) == 0
    assert "[FAIL]" not in capsys.readouterr().out
    assert len(json.loads(out.read_text())["walk"]["pi"]) == 8


def test_lift_cover_rejects_non_covering(files):
    bad = write(files["tmp"] / "badmap.json", {"vertex_map": [(i // 2) % 4 for i in range(8)]})
    assert main(["lift", "cover", "--cover", files["c8graph"], "--base", files["c4graph"],
                 "--map", bad, "--chain", files["simple"]]) == 2


def test_lift_quotient(files, capsys):
    assert main(["lift", "quotient", "--space", files["c4"], "--group", files["rot"],
                 "--chain", files["flip"]]) == 0
    assert "[PASS] metric lift verified" in capsys.readouterr().out


def test_lift_verify(files, tmp_path):
    spec = write(tmp_path / "spec.json", {"sigma": [i % 4 for i in range(8)],
                                          "E": [[i, (i + s) % 8] for i in range(8) for s in (1, 7)]})
    out = tmp_path / "lifted.json"
    assert main(["lift", "verify", "--base-chain", files["simple"], "--spec", spec,
                 "--json", str(out)]) == 0
    assert main(["lift", "verify", "--base-chain", files["simple"], "--spec", spec,
                 "--chain", str(out)]) == 0
    irregular = write(tmp_path / "irr.json", {"sigma": [0, 0, 1], "E": [[0, 2], [2, 0]]})
    flip = files["flip"]
    assert main(["lift", "verify", "--base-chain", flip, "--spec", irregular]) == 1


def test_wp_commands(files, capsys, tmp_path):
    line = write(tmp_path / "line.json", {"dist": [[0, 1, 3], [1, 0, 2], [3, 2, 0]]})
    assert main(["wp", "dist", "--space", line, "--u", "0,1", "--v", "1,2", "--p", "1"]) == 0
    assert "W_1 = 3/2" in capsys.readouterr().out
    assert main(["wp", "isometry", "--space", line, "--u", "0,1,1", "--v", "2,0,2", "--p", "2"]) == 0
    mu = write(tmp_path / "mu.json", {"space": {"dist": [[0, 1], [1, 0]]},
                                      "atoms": [{"point": 0, "w": "1/3"}, {"point": 1, "w": "2/3"}]})
    nu = write(tmp_path / "nu.json", {"atoms": [{"point": 1, "w": "1"}]})
    assert main(["wp", "dist", "--mu", mu, "--nu", nu, "--p", "1"]) == 0
    assert "W_1 = 1/3" in capsys.readouterr().out


def test_opt_commands(files, capsys):
    out = files["tmp"] / "opt.json"
    assert main(["opt", "maximize", "--space", files["two"], "--T", "2", "--restarts", "3",
                 "--json", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["T"] == 2 and "ratio" in report and report["config"]["restarts"] == 3
    assert main(["opt", "grid", "--space", files["two"], "--T", "2", "--resolution", "20"]) == 0
    assert "grid maximum" in capsys.readouterr().out


def test_exp_cantlift(capsys):
    assert main(["exp", "cantlift"]) == 0
    assert "INFEASIBLE, certificate verified" in capsys.readouterr().out


def test_exp_hamming_csv(tmp_path):
    out = tmp_path / "hamming.csv"
    assert main(["exp", "hamming", "--dmax", "4", "--optimize-up-to", "1", "--csv", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert [r["simple_ratio"] for r in rows] == ["1", "1", "25/27", "9/8"]


def test_exp_wasserstein_and_torus(capsys):
    assert main(["exp", "wasserstein", "--trials", "10"]) == 0
    assert main(["exp", "torus", "--nmax", "4", "--kmax", "2", "--T", "2", "--restarts", "2"]) == 0
    assert "[FAIL]" not in capsys.readouterr().out


def test_bounds(capsys):
    assert main(["bound", "wp", "--p", "4"]) == 0
    assert main(["bound", "w2", "--p", "4", "--d", "16"]) == 0
    assert main(["bound", "distortion", "--n", "2.718281828459045", "--p", "4"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "32" and out[1].startswith("13.856406460551")
    assert out[2].startswith("0.5")
    assert main(["bound", "wp", "--p", "2"]) == 2


def test_deterministic_output(files, capsys):
    args = ["opt", "maximize", "--space", files["two"], "--T", "3", "--restarts", "4"]
    main(args)
    first = capsys.readouterr().out
    main(args)
    assert capsys.readouterr().out == first
