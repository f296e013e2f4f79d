import json

import pytest

from qsubgraph.cli import main, parse_int_list


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def body(out):
    return [line for line in out.splitlines() if not line.startswith("#")]


def test_parse_int_list():
    assert parse_int_list("3") == [3]
    assert parse_int_list("0,2") == [0, 2]
    assert parse_int_list("0-3") == [0, 1, 2, 3]


def test_enumerate_sorted(capsys):
    code, out, _ = run(capsys, "enumerate", "--graph", "builtin:kite", "--x", "2")
    assert code == 0
    lines = body(out)
    assert lines[0] == "config_bits,D_classical,argmin"
    assert lines[1] == "1001,4.25,1"
    values = [float(line.split(",")[1]) for line in lines[1:]]
    assert values == sorted(values) and len(values) == 6
    assert "# graph: kite" in out


def test_minfind_p3(capsys):
    code, out, _ = run(capsys, "minfind", "--graph", "builtin:p3w", "--x", "1", "--seeds", "0")
    assert code == 0
    assert body(out) == ["d=10, D=4, verified=true"]


def test_minfind_hybrid_json_and_log(capsys, tmp_path):
    log = tmp_path / "run.jsonl"
    code, out, _ = run(capsys, "minfind", "--graph", "builtin:grid9", "--x", "2", "--mode", "hybrid",
                       "--seeds", "3", "--format", "json", "--log", str(log))
    assert code == 0
    data = json.loads(out)
    assert data["result"]["verified"] is True
    assert data["provenance"]["mode"] == "hybrid"
    assert all(json.loads(line)["step"] <= data["result"]["budget"] for line in log.read_text().splitlines())


def test_sample_is_reproducible(capsys):
    args = ("sample", "--graph", "builtin:kite", "--x", "2", "--shots", "20000", "--seeds", "7")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second
    assert body(first)[0] == "config_bits,D_quantum,D_classical,abs_err"


def test_sample_infinite_shot(capsys):
    code, out, _ = run(capsys, "sample", "--graph", "builtin:p3w", "--x", "1", "--mode", "infinite-shot")
    assert code == 0
    for line in body(out)[1:]:
        assert float(line.split(",")[3]) < 1e-9


def test_converge_json(capsys, tmp_path):
    dest = tmp_path / "conv.json"
    code, _, _ = run(capsys, "converge", "--graph", "builtin:kite", "--x", "2", "--shots", "1000,10000,100000",
                     "--seeds", "0-2", "--format", "json", "--out", str(dest))
    assert code == 0
    data = json.loads(dest.read_text())
    assert len(data["rows"]) == 3 and data["slope"] < 0


def test_costmodel(capsys):
    code, out, _ = run(capsys, "costmodel", "--x", "1,2", "--nmin", "10", "--nmax", "1000", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert {r["x"] for r in data["rows"]} == {1, 2}


def test_quadform(capsys, tmp_path):
    vec = tmp_path / "a.txt"
    vec.write_text("1 0 0\n")
    code, out, _ = run(capsys, "quadform", "--gen", "path:3", "--vector", str(vec), "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["rows"][0]["quantum"] == pytest.approx(1.0, abs=1e-10)


def test_generated_graph(capsys):
    code, out, _ = run(capsys, "enumerate", "--gen", "cycle:4", "--x", "1")
    assert code == 0 and len(body(out)) == 5


@pytest.mark.parametrize("argv,code", [
    (("enumerate", "--graph", "builtin:kite", "--x", "9"), 2),
    (("enumerate", "--graph", "builtin:kite"), 2),
    (("enumerate", "--x", "1"), 2),
    (("minfind", "--graph", "builtin:grid9", "--x", "2", "--mode", "full"), 3),
    (("sample", "--graph", "builtin:grid9", "--x", "2", "--shots", "100", "--cap", "10"), 3),
    (("enumerate", "--graph", "builtin:nosuch", "--x", "1"), 2),
    (("enumerate", "--gen", "hexagon:3", "--x", "1"), 4),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_argparse_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["minfind", "--mode", "annealing"])
    assert exc.value.code == 2


def test_malformed_file(capsys, tmp_path):
    bad = tmp_path / "g.txt"
    bad.write_text("3 2\n0 1 1.0\n")
    code, _, err = run(capsys, "enumerate", "--graph", str(bad), "--x", "1")
    assert code == 4 and "line" in err
