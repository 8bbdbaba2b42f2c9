import json

import pytest

from fltrees.cli import run


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in {
        "a.tree": "3\n0 1 1\n",
        "b.tree": "3\n2 0 2\n",
        "c.tree": "3\n0 3 1\n",
        "path.tree": "3\n0 1 2\n",
        "g.graph": "2 2 3\n1 1\n1 2\n2 1\n",
        "bad.tree": "3\n0 1\n",
    }.items():
        p = tmp_path / name
        p.write_text(text)
        paths[name] = str(p)
    paths["dir"] = tmp_path
    return paths


def test_perm_same_tree(files, capsys):
    assert run(["perm", files["a.tree"], files["a.tree"]]) == 0
    assert capsys.readouterr().out == "0\n"


def test_perm_example(files, capsys):
    assert run(["perm", files["a.tree"], files["b.tree"], "--script"]) == 0
    assert capsys.readouterr().out == "2\nperm 1:2 2:1\n"


def test_perm_oracle_json(files, capsys):
    assert run(["perm", files["a.tree"], files["b.tree"], "--oracle", "--json"]) == 0
    assert json.loads(capsys.readouterr().out) == {"distance": 2, "script_size": 2, "verified": True}


def test_exit_codes(files):
    assert run(["perm", files["a.tree"], files["path.tree"]]) == 3
    assert run(["perm", files["a.tree"], files["bad.tree"]]) == 2
    assert run(["perm", files["a.tree"], "/nonexistent"]) == 2
    assert run(["nope"]) == 1
    assert run([]) == 1


def test_rearrange_and_verify(files, capsys):
    assert run(["rearrange", files["a.tree"], files["c.tree"], "--script", "--oracle"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert int(out[0]) >= 1
    script = files["dir"] / "s.script"
    script.write_text("\n".join(out[1:]) + "\n")
    assert run(["verify", files["a.tree"], str(script), files["c.tree"]]) == 0
    assert capsys.readouterr().out == "ok\n"
    capsys.readouterr()
    script.write_text("# nothing\n")
    assert run(["verify", files["a.tree"], str(script), files["c.tree"]]) == 4
    assert capsys.readouterr().out == "failed\n"
    script.write_text("cut 2 3\n")
    assert run(["verify", files["a.tree"], str(script), files["c.tree"]]) == 4


def test_tree_rearrange(files, capsys):
    assert run(["tree-rearrange", files["a.tree"], files["c.tree"], "--trace", "--oracle"]) == 0
    assert "total:" in capsys.readouterr().out


def test_gen_is_stable(files, capsys):
    run(["gen", "--n", "12", "--seed", "3"])
    first = capsys.readouterr().out
    run(["gen", "--n", "12", "--seed", "3"])
    assert capsys.readouterr().out == first
    out = files["dir"] / "r.tree"
    assert run(["gen", "--n", "12", "--seed", "3", "--relabel", "4", "--out", str(out)]) == 0
    plain = files["dir"] / "p.tree"
    run(["gen", "--n", "12", "--seed", "3", "--out", str(plain)])
    assert run(["perm", str(plain), str(out)]) == 0
    assert int(capsys.readouterr().out) <= 4


def test_reduce(files, capsys):
    prefix = str(files["dir"] / "red")
    assert run(["reduce", files["g.graph"], "--out-prefix", prefix, "--json"]) == 0
    info = json.loads(capsys.readouterr().out)
    assert info["matching"] == 2 and info["n"] == 7 * info["m"] + 2
    assert run(["perm", prefix + "1.tree", prefix + "2.tree"]) == 0
    assert int(capsys.readouterr().out) == 7 * info["m"] + 2 - info["matching"] - info["splits"]


def test_oracle_command(files, capsys):
    assert run(["oracle", "rearrange", files["a.tree"], files["c.tree"]]) == 0
    assert capsys.readouterr().out == "1\n"
    assert run(["oracle", "perm", files["a.tree"], files["b.tree"], "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["distance"] == 2


def test_script_out_pipeline(files, capsys):
    out = str(files["dir"] / "w.script")
    assert run(["rearrange", files["a.tree"], files["c.tree"], "--script-out", out]) == 0
    assert run(["verify", files["a.tree"], out, files["c.tree"], "--json"]) == 0
    assert json.loads(capsys.readouterr().out.splitlines()[-1])["verified"] is True
    assert run(["perm", files["a.tree"], files["b.tree"], "--script-out", out]) == 0
    assert run(["verify", files["a.tree"], out, files["b.tree"]]) == 0
