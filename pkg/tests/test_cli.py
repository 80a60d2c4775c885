import json

import pytest

from arbor.cli import CommandPlan, UsageError, main, parse_args
from arbor.coloring import PairColoring
from arbor.tree import FinitePoset, FiniteTree


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    data = json.loads(out)
    assert data["format_version"] == 1
    return data


@pytest.fixture
def files(tmp_path, capsys):
    def gen(name, *params):
        path = tmp_path / name
        assert run(capsys, "gen", *params, "-o", path)[0] == 0
        return path

    return gen


def test_parse_args_examples(tmp_path):
    plan = parse_args(["gen", "--kind", "path", "--n", "6", "-o", "t.json"])
    assert isinstance(plan, CommandPlan) and plan.subcommand == "gen" and plan.output.name == "t.json"
    t = tmp_path / "t.json"
    t.write_text(FiniteTree((None, 0)).to_json())
    plan = parse_args(["arrow", "--tree", str(t), "--goals", "3,3"])
    assert plan.subcommand == "arrow" and plan.inputs["tree"] == t
    for bad in (["arrow", "--goals"], ["gen", "--kind", "path", "--bogus"], [], ["nosuch"], ["arrow", "--tree", str(t)]):
        with pytest.raises(UsageError):
            parse_args(bad)
    with pytest.raises(UsageError):
        parse_args(["cover", "--tree", str(tmp_path / "missing.json")])


def test_usage_exit_code(capsys):
    assert run(capsys, "arrow", "--goals")[0] == 2
    assert run(capsys, "gen", "--kind", "path", "--n", "3", "--what")[0] == 2
    assert run(capsys, "gen", "--kind", "path")[0] == 2


@pytest.mark.parametrize(
    "params",
    [
        ("--kind", "path", "--n", "6"),
        ("--kind", "complete", "--branching", "3", "--levels", "3"),
        ("--kind", "wq", "--m", "4", "--d", "2"),
        ("--kind", "random", "--n", "10", "--seed", "9"),
    ],
)
def test_gen_round_trip_is_byte_identical(files, params):
    path = files("t.json", *params)
    raw = path.read_bytes()
    assert FiniteTree.from_json(raw.decode()).to_json().encode() == raw


def test_gen_dot(capsys):
    code, out, _ = run(capsys, "gen", "--kind", "path", "--n", "3", "--dot")
    assert code == 0 and out.startswith("digraph")


def test_arrow_end_to_end(files, tmp_path, capsys):
    p5 = files("p5.json", "--kind", "path", "--n", "5")
    w = tmp_path / "w.csv"
    v = run_json(capsys, "arrow", "--tree", p5, "--goals", "3,3", "--witness", w)
    assert v["holds"] is False and v["witness_coloring_path"] == str(w)
    check = run_json(capsys, "arrow", "--tree", p5, "--goals", "3,3", "--verify-witness", w)
    assert check["verdict"] == "valid" and max(check["max_lengths"]) <= 2
    p6 = files("p6.json", "--kind", "path", "--n", "6")
    v6 = run_json(capsys, "arrow", "--tree", p6, "--goals", "3,3", "--workers", "2")
    assert v6["holds"] is True and v6["witness_coloring_path"] is None
    sweep = run_json(capsys, "arrow", "--tree", p6, "--sweep", "3", "--k", "2", "--method", "gray")
    assert [r["holds"] for r in sweep["sweep"]] == [True, True]


def test_arrow_inline_witness_and_invalid_witness(files, tmp_path, capsys):
    p5 = files("p5.json", "--kind", "path", "--n", "5")
    v = run_json(capsys, "arrow", "--tree", p5, "--goals", "3,3")
    assert len(v["witness_coloring"]) == 10
    const = tmp_path / "c.csv"
    assert run(capsys, "color", "--tree", p5, "--kind", "constant", "--k", "2", "-o", const)[0] == 0
    assert run_json(capsys, "arrow", "--tree", p5, "--goals", "3,3", "--verify-witness", const)["verdict"] == "invalid"


def test_domain_error_exit_code(files, capsys):
    p9 = files("p9.json", "--kind", "path", "--n", "9")
    code, out, err = run(capsys, "arrow", "--tree", p9, "--goals", "3,3,3")
    assert code == 1 and out == ""
    assert json.loads(err)["error"] == "SearchSpaceTooLarge"


@pytest.mark.parametrize("content", ["", "{", "[1,2]", '{"parent": [0, 0]}', '{"parent": [null, 7]}', "\x00\xff"])
def test_malformed_inputs_never_crash(tmp_path, capsys, content):
    bad = tmp_path / "bad.json"
    bad.write_text(content)
    for argv in (["cover", "--tree", bad], ["nsmember", "--tree", bad, "--set", "0", "--m", "1"], ["sigmaprime", "--poset", bad]):
        code, _, err = run(capsys, *argv)
        assert code == 1
        assert "error" in json.loads(err)


def test_malformed_coloring(files, tmp_path, capsys):
    p3 = files("p3.json", "--kind", "path", "--n", "3")
    bad = tmp_path / "c.csv"
    bad.write_text("0,1,0\n0,5,1\n")
    code, _, err = run(capsys, "maxchain", "--tree", p3, "--coloring", bad, "--color", "0")
    assert code == 1 and json.loads(err)["error"] == "StructureError"


def test_nsmember_and_cover(files, capsys):
    p2 = files("p2.json", "--kind", "path", "--n", "2")
    assert run_json(capsys, "nsmember", "--tree", p2, "--set", "0,1", "--m", "1")["member"] is False
    p4 = files("p4.json", "--kind", "path", "--n", "4")
    v = run_json(capsys, "nsmember", "--tree", p4, "--set", "1,2,3", "--m", "1")
    assert v["member"] and v["witness"] == {"1": 0, "2": 1, "3": 2}
    cover = run_json(capsys, "cover", "--tree", p4)
    assert cover["min_count"] == 4


def test_diag_modes(files, tmp_path, capsys):
    t = tmp_path / "t.json"
    t.write_text(FiniteTree((None, 0, 0)).to_json())
    sets = tmp_path / "sets.json"
    sets.write_text(json.dumps({"0": [0, 2], "1": [1, 2], "2": []}))
    assert run_json(capsys, "diag", "--tree", t, "--sets", sets)["union"] == [0, 2]
    assert run_json(capsys, "diag", "--tree", t, "--family", "mspecial:1", "--set", "1,2")["member"] is True
    it = run_json(capsys, "diag", "--tree", t, "--family", "principal:", "--iterate", "2")
    assert it["members"] == [[]]
    sets.write_text("[1]")
    assert run(capsys, "diag", "--tree", t, "--sets", sets)[0] == 1
    assert run(capsys, "diag", "--tree", t, "--family", "mspecial:1")[0] == 2


def test_color_chi_maxchain(files, tmp_path, capsys):
    c3 = files("c.json", "--kind", "complete", "--branching", "2", "--levels", "3")
    g = tmp_path / "g.csv"
    assert run(capsys, "color", "--tree", c3, "--kind", "galvin", "-o", g)[0] == 0
    T = FiniteTree.from_json(c3.read_text())
    PairColoring.from_csv(g.read_text(), T, 2)
    assert run_json(capsys, "maxchain", "--tree", c3, "--coloring", g, "--color", "0")["length"] == 3
    assert run_json(capsys, "chi", "--tree", c3, "--coloring", g, "--node", "3", "--color", "0")["nodes"] == [0, 1]
    r1 = tmp_path / "r1.csv"
    r2 = tmp_path / "r2.csv"
    for r in (r1, r2):
        assert run(capsys, "color", "--tree", c3, "--kind", "random", "--k", "3", "--seed", "4", "-o", r)[0] == 0
    assert r1.read_bytes() == r2.read_bytes()
    s = tmp_path / "s.csv"
    st = tmp_path / "st.json"
    assert run(capsys, "color", "--kind", "sierpinski", "--perm", "1,0,3,2", "--tree-out", st, "-o", s)[0] == 0
    assert run_json(capsys, "maxchain", "--tree", st, "--coloring", s, "--color", "1")["length"] == 2
    assert run(capsys, "color", "--kind", "sierpinski", "--perm", "1,1,0")[0] == 1
    assert run(capsys, "color", "--kind", "galvin")[0] == 2


def test_good_build_verify_refine(tmp_path, capsys, files):
    p9 = files("p9.json", "--kind", "path", "--n", "9")
    c = tmp_path / "c.csv"
    c.write_text("".join(f"{i},{j},{0 if i // 3 == j // 3 else 1}\n" for i in range(9) for j in range(i + 1, 9)))
    d = tmp_path / "d.json"
    assert run(capsys, "good", "--tree", p9, "--coloring", c, "--rho", "3", "--sigma", "0,1", "-o", d)[0] == 0
    out = json.loads(d.read_text())
    assert out["valid"] and out["homogeneous"] == {"0": [0, 1, 2], "1": [0, 3, 6]}
    assert run_json(capsys, "good", "--tree", p9, "--coloring", c, "--rho", "3", "--sigma", "0,1", "--verify", d)["verdict"] == "valid"
    assert run_json(capsys, "good", "--tree", p9, "--coloring", c, "--rho", "2", "--sigma", "0,1", "--verify", d)["verdict"] == "invalid"
    assert run(capsys, "good", "--tree", p9, "--coloring", c, "--rho", "3", "--sigma", "0", "--verify", d)[0] == 1
    assert run_json(capsys, "good", "--tree", p9, "--coloring", c, "--rho", "3", "--sigma", "1,1")["found"] is False
    r = run_json(capsys, "refine", "--tree", p9, "--coloring", c, "--decomp", d, "--g", "0,0,1,0,0,1,0,1,1", "--xi", "2", "--m", "2")
    assert r["valid"] and r["sigma"] == [0, 1]
    assert run(capsys, "refine", "--tree", p9, "--coloring", c, "--decomp", d, "--g", "0,1", "--xi", "2", "--m", "2")[0] == 2


def test_hier_report(files, tmp_path, capsys):
    p3 = files("p3.json", "--kind", "path", "--n", "3")
    c = tmp_path / "c.csv"
    c.write_text("0,1,0\n0,2,0\n1,2,0\n")
    rep = run_json(capsys, "hier", "--tree", p3, "--coloring", c, "--k", "2", "--depth", "2")
    assert rep["levels"] == [[0, 1, 2], [1, 2], [2], []]
    assert rep["J_equals_meet_I"] and rep["J_subset_meet_I"] and rep["principal"]
    assert [0] in rep["sigma_table"]["2"] and [1] not in rep["sigma_table"]["2"]
    rep2 = run_json(capsys, "hier", "--tree", p3, "--coloring", c, "--k", "2", "--base", "2=principal:0")
    assert rep2["levels"][1] == [1, 2]
    assert run(capsys, "hier", "--tree", p3, "--coloring", c, "--base", "2principal")[0] == 2
    assert run(capsys, "hier", "--tree", p3, "--coloring", c, "--base", "0=principal:1")[0] == 1


def test_sigmaprime_output_is_a_tree(tmp_path, capsys):
    p = tmp_path / "p.json"
    p.write_text(FinitePoset(3, {(0, 1)}).to_json())
    out = tmp_path / "sp.json"
    assert run(capsys, "sigmaprime", "--poset", p, "-o", out)[0] == 0
    data = json.loads(out.read_text())
    T = FiniteTree.from_json(out.read_text())
    assert T.n == 5 and data["max_map"][0] is None


def test_ord(capsys):
    assert run_json(capsys, "ord", "add", "w^2+w", "w*3")["result"] == "w^2 + w*4"
    assert run_json(capsys, "ord", "cmp", "w^w", "w^3*9")["result"] == "greater"
    assert run_json(capsys, "ord", "pigeonhole", "w", "3")["result"] == "w^w"
    assert run_json(capsys, "ord", "verify", "4", "3", "2")["result"] is False
    assert run_json(capsys, "ord", "indecomposable", "w+1")["result"] is False
    assert run(capsys, "ord", "add", "w")[0] == 2
    assert run(capsys, "ord", "cmp", "w^", "1")[0] == 1
    assert run(capsys, "ord", "pigeonhole", "3", "x")[0] == 2


def test_deterministic_outputs(files, capsys):
    t = files("t.json", "--kind", "random", "--n", "7", "--seed", "2")
    a = run_json(capsys, "arrow", "--tree", t, "--goals", "3,3")
    b = run_json(capsys, "arrow", "--tree", t, "--goals", "3,3")
    a.pop("elapsed_ms"), b.pop("elapsed_ms")
    assert a == b
