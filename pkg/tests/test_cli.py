import json

import pytest

from bogomolov.cli import main

LATTICE = {"dim": 2, "gram": [[1, 0], [0, -1]], "ample": [1, 0]}


def run(capsys, argv):
    status = main(argv)
    return status, capsys.readouterr().out


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def test_bounds_flenner(capsys):
    status, out = run(capsys, ["bounds", "--formula", "flenner", "--d", "2", "--r", "2", "--hd", "1"])
    assert status == 0 and json.loads(out)["minimal_m"] == 2


def test_bounds_from_rank_and_delta(capsys):
    status, out = run(capsys, ["bounds", "--formula", "theorem-3-1", "--rank", "4", "--delta", "-3"])
    assert status == 0 and json.loads(out)["threshold"] == "72"
    status, out = run(capsys, ["bounds", "--formula", "lemma-3-2", "--rank", "3", "--delta", "1"])
    assert status == 1 and "error" in json.loads(out)


def test_sing_degree(capsys, tmp_path):
    path = write(tmp_path, "plane.json", {"d": 2, "t": [3, -6, 4]})
    status, out = run(capsys, ["sing-degree", "--input", path])
    assert status == 0 and json.loads(out)["sing_degree"] == "3"
    status, out = run(capsys, ["sing-degree", "--input", path, "--m", "2", "--points", "5"])
    assert json.loads(out)["zm_degree_bound"]["degree"] == "32"


def test_missing_input_is_exit_2(capsys, tmp_path):
    status, out = run(capsys, ["cone", "--input", str(tmp_path / "absent.json")])
    assert status == 2 and json.loads(out)["kind"] == "input"


def test_zero_denominator_is_schema_error(capsys, tmp_path):
    path = write(tmp_path, "bad.json", {"lattice": LATTICE, "x": ["1/0", 1]})
    assert run(capsys, ["cone", "--input", path])[0] == 2


def test_bad_json_is_exit_2(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert run(capsys, ["grid-check", "--input", str(path)])[0] == 2


def test_signature_error_is_exit_1(capsys, tmp_path):
    bad = {"dim": 2, "gram": [[1, 0], [0, 1]], "ample": [1, 0]}
    path = write(tmp_path, "pos.json", {"lattice": bad, "x": [1, 0]})
    assert run(capsys, ["cone", "--input", path])[0] == 1


def test_cone_and_text_format(capsys, tmp_path):
    path = write(tmp_path, "cone.json", {"lattice": LATTICE, "x": [1, 1]})
    status, out = run(capsys, ["cone", "--input", path, "--format", "text"])
    assert status == 0 and "position: \"boundary\"" in out


def test_delta_report(capsys, tmp_path):
    doc = {
        "lattice": LATTICE,
        "sheaf": {"rank": 4, "c1": [1, 1], "c2h": "3"},
        "candidates": [{"rank": 1, "c1": [1, 0], "c2h": 0}],
        "exterior_power": 2,
        "extension": {"sub": {"rank": 1, "c1": [1, 0]}, "quotient": {"rank": 1, "c1": [-1, 0]}},
    }
    status, out = run(capsys, ["delta", "--input", write(tmp_path, "d.json", doc)])
    rep = json.loads(out)
    assert status == 0 and rep["discriminant"] == "-3"
    assert rep["exterior_power"]["discriminant"] == "-6"
    assert rep["extension"]["identity_2_1"]["holds"]


def test_grid_commands(capsys, tmp_path):
    path = write(tmp_path, "g.json", {"n": 1, "d": 1, "grid": {"a": [0], "c": 1}})
    status, out = run(capsys, ["grid-check", "--input", path, "--matrix"])
    assert status == 0 and json.loads(out)["matrix"] == [["1", "0"], ["1", "1"]]
    f = {"polynomial": {"nvars": 1, "degree": 2, "coeffs": {"2": 1, "1": -1}}}
    status, out = run(capsys, ["grid-find", "--input", write(tmp_path, "f.json", f)])
    assert status == 0 and json.loads(out)["index"] == [2]


def test_residue_search_covering(capsys, tmp_path):
    ok = {"N": 2, "points": [{"p": 2, "v": [1, 0]}, {"p": 3, "v": [1, 1]}]}
    status, out = run(capsys, ["residue-search", "--input", write(tmp_path, "ok.json", ok)])
    assert status == 0 and json.loads(out)["satisfied"] and json.loads(out)["l"] == 6
    cover = {"N": 2, "points": [{"p": 2, "v": v} for v in ([1, 0], [0, 1], [1, 1])]}
    status, out = run(capsys, ["residue-search", "--input", write(tmp_path, "c.json", cover)])
    rep = json.loads(out)
    assert status == 1 and rep["kind"] == "covering" and rep["certificate"]["prime"] == 2


def test_supnorm(capsys, tmp_path):
    doc = {"p_poly": [1, 1], "d_poly": [0, 1], "l": 2, "r": "1/2"}
    status, out = run(capsys, ["supnorm-m", "--input", write(tmp_path, "s.json", doc)])
    assert status == 0 and json.loads(out)["minimal_m"] == 4


def test_section(capsys, tmp_path):
    doc = {
        "residues": {"N": 2, "points": [{"p": 2, "v": [1, 0]}, {"p": 3, "v": [1, 1]}]},
        "avoid": {"nvars": 2, "degree": 1, "coeffs": {"1,0": 1, "0,1": -1}},
        "r": "1/2",
        "m": 6,
    }
    status, out = run(capsys, ["section", "--input", write(tmp_path, "sec.json", doc)])
    assert status == 0 and "norm_bound" in json.loads(out)


def test_chain_and_filtration(capsys, tmp_path):
    universe = {
        "lattice": LATTICE,
        "root": {"rank": 3, "c1": [0, 0], "c2h": -1},
        "nodes": [{"rank": 2, "c1": [1, 2], "c2h": -1}, {"rank": 1, "c1": ["5/2", 1], "c2h": 0}],
        "edges": [[1, 0]],
    }
    path = write(tmp_path, "u.json", universe)
    status, out = run(capsys, ["chain", "--input", path, "--select-first"])
    rep = json.loads(out)
    assert status == 0 and [s["case"] for s in rep["steps"]] == ["sub-refine", "terminal"]
    filt = {"lattice": LATTICE, "filtration": [{"rank": 1, "c1": [2, 0]}, {"rank": 2, "c1": [2, 0], "c2h": 0}]}
    status, out = run(capsys, ["chain", "--input", write(tmp_path, "f.json", filt)])
    assert status == 0 and json.loads(out)["filtration"]["holds"]


def test_verify_identities(capsys):
    status, out = run(capsys, ["verify-identities", "--suite", "determining-matrix", "--cases", "40"])
    rep = json.loads(out)
    assert status == 0 and rep["seed"] == 20240601 and rep["suites"][0]["passed"] == 40
    assert run(capsys, ["verify-identities", "--cases", "0"])[0] == 2
    assert run(capsys, ["verify-identities", "--suite", "nope"])[0] == 2


def test_reports_are_byte_identical(capsys):
    argv = ["verify-identities", "--suite", "lemma-1-1", "--cases", "30", "--seed", "9"]
    assert run(capsys, argv)[1] == run(capsys, argv)[1]


def test_argument_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        main(["bounds", "--formula", "flenner", "--cap", "0"])
    assert info.value.code == 2
