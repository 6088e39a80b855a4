import csv
import io
import json

import jsonschema
import pytest

from diagdesign.cli import SCHEMA_PATH, main, parse_int_list, read_config


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def body(text):
    return "\n".join(l for l in text.splitlines() if not l.startswith("# wall_clock"))


def rows(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def summaries(text):
    return [json.loads(l[len("# summary: "):]) for l in text.splitlines() if l.startswith("# summary: ")]


@pytest.fixture(scope="module")
def schema():
    return json.loads(SCHEMA_PATH.read_text())


def test_ranges():
    assert parse_int_list(["3..6"]) == [3, 4, 5, 6]
    assert parse_int_list(["2", "4,8"]) == [2, 4, 8]


def test_eta_rows(capsys):
    code, out, _ = run(capsys, "eta", "--n", "1", "4", "10", "--t", "1", "2")
    assert code == 0
    table = {(int(r["n"]), int(r["t"])): r for r in rows(out)}
    assert table[(1, 2)]["eta"] == "1/3"
    assert table[(4, 1)]["eta"] == "0"
    assert abs(float(table[(10, 2)]["ratio"]) - 1) < 0.02
    assert out.startswith("# diagdesign ")


def test_eta_exact_flag(capsys):
    _, out, _ = run(capsys, "eta", "--n", "3", "--t", "2", "--exact")
    (row,) = rows(out)
    assert row["eta_asymptotic"] == "1/4" and "/" in row["ratio"]


def test_design_check_rows(capsys):
    _, out, _ = run(capsys, "design-check", "--n", "4", "--t", "2..7")
    assert [int(r["minimal_r"]) for r in rows(out)] == [2, 2, 3, 3, 3, 3]
    _, out, _ = run(capsys, "design-check", "--n", "3", "--t", "8")
    (row,) = rows(out)
    assert row["minimal_r"] == "3" and "|" in row["witness"]


def test_mixing_rows(capsys):
    _, out, _ = run(capsys, "mixing", "--n", "3", "--t", "2", "--grid", "9")
    (summary,) = summaries(out)
    assert summary["p_star"] == "8/9" == summary["p0_closed_form"]
    table = rows(out)
    _, eta_out, _ = run(capsys, "eta", "--n", "3", "--t", "2")
    assert table[-1]["D"] == rows(eta_out)[0]["eta"]
    assert all(float(r["D_float"]) >= summary["D_p_star"] for r in table)


def test_gatecount_rows(capsys):
    _, out, _ = run(capsys, "gatecount", "--n", "5", "--t", "3", "--cost", "unit")
    (row,) = rows(out)
    assert (row["r"], row["supports"], row["total_s_to_r"], row["total_s_below_r"]) == ("2", "10", "30", "20")


def test_circuit_sample_round_trip(capsys):
    from diagdesign.circuits import loads_gates

    _, out, _ = run(capsys, "circuit-sample", "--n", "4", "--t", "3", "--seed", "7")
    gates = loads_gates(out)
    assert len(gates) == 6 * 3 and all(g.m in (4, 2) for g in gates)
    _, again, _ = run(capsys, "circuit-sample", "--n", "4", "--t", "3", "--seed", "7")
    assert body(out) == body(again)


def test_decay_is_reproducible(capsys, tmp_path):
    args = ["decay", "--n", "3", "--max-t", "2", "--samples", "40", "--seed", "3"]
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    assert body(a) == body(b)
    table = rows(a)
    assert float(table[0]["D"]) == pytest.approx(float(table[0]["eta"]), abs=1e-12)


def test_exit_codes(capsys):
    assert run(capsys, "design-check", "--n", "6", "--t", "12", "--budget", "100")[0] == 3
    assert run(capsys, "eta", "--n", "0", "--t", "2")[0] == 2
    assert run(capsys, "eta", "--n", "5..2")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["eta", "--format", "xml"])
    assert exc.value.code == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["eta", "--n", "1..3", "--t", "2"],
        ["design-check", "--n", "3", "--t", "2..4", "--r", "1"],
        ["decay", "--n", "2", "--max-t", "1", "--samples", "20"],
        ["mixing", "--n", "2", "--t", "2", "3"],
        ["gatecount", "--n", "16", "32", "--t", "4"],
        ["circuit-sample", "--n", "3", "--kind", "continuous"],
    ],
)
def test_json_validates(capsys, schema, argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    assert code == 0
    jsonschema.validate(json.loads(out), schema)


def test_replay_reproduces_exact_output(capsys, tmp_path):
    first = tmp_path / "first.csv"
    assert main(["mixing", "--n", "4", "--t", "3", "--exact", "--out", str(first)]) == 0
    cfg = read_config(first)
    assert cfg.n == [4] and cfg.exact
    second = tmp_path / "second.csv"
    assert main(["mixing", "--replay", str(first), "--out", str(second)]) == 0
    strip = lambda p: body(p.read_text()).replace(str(second), str(first))
    assert strip(first) == strip(second)


def test_replay_json(capsys, tmp_path):
    first = tmp_path / "a.json"
    main(["eta", "--n", "2", "--t", "3", "--format", "json", "--out", str(first)])
    second = tmp_path / "b.json"
    main(["eta", "--replay", str(first), "--out", str(second)])
    a, b = json.loads(first.read_text()), json.loads(second.read_text())
    assert a["rows"] == b["rows"]
