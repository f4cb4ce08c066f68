import csv
import io
import json

import pytest

from twinap import cli
from twinap.constellation import CSV_HEADER, ConstellationRecord, scan
from twinap.param_planner import crucial_lhs


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_documented_examples(capsys):
    assert run(capsys, "tuples", "narrowest", "--k", "6", "--limit", "20")[1].strip() == \
        "0,4,6,10,12,16 diameter 16"
    assert run(capsys, "params", "crucial", "--k", "7", "--l", "1", "--theta", "1")[1].strip() == \
        "lhs=21/20 pass"
    code, out, _ = run(capsys, "polignac", "bound", "--k", "6", "--json")
    assert code == 0 and json.loads(out)["bound"] == "2/225"


def test_json_matches_library(capsys):
    _, out, _ = run(capsys, "params", "crucial", "--k", "7", "--l", "1", "--theta", "20/21", "--json")
    d = json.loads(out)
    lib = crucial_lhs(7, 1, "20/21").to_dict()
    assert d["lhs"] == lib["lhs"] == "1" and d["pass"] is False


def test_scan_csv_roundtrip(capsys):
    _, out, _ = run(capsys, "scan", "run", "--tuple", "0,2", "--lo", "5", "--hi", "100",
                    "--c1", "0.3", "--csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == CSV_HEADER
    recs = [ConstellationRecord.from_csv_row(r) for r in rows[1:]]
    assert recs == list(scan(5, 100, (0, 2), 0.3))


def test_outputs_deterministic(capsys):
    argv = ("gt", "enu", "--w", "3", "--N", "5000", "--json")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_out_and_manifest(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("OUT_DIR", str(tmp_path))
    code, out, _ = run(capsys, "polignac", "spectrum", "--N", "100", "--csv", "--out", "gaps.csv")
    assert code == 0 and out == ""
    body = (tmp_path / "gaps.csv").read_text()
    assert body.splitlines()[:3] == ["gap,count", "1,1", "2,8"]
    man = json.loads((tmp_path / "gaps.csv.manifest.json").read_text())
    assert man["command"] == "polignac spectrum" and man["params"]["N"] == 100
    assert man["deterministic"] is True and "wall_time" in man and man["tool_version"]


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# planner run\nk = 7\nl=1\ntheta=1\n")
    code, out, _ = run(capsys, "params", "crucial", "--config", str(cfg))
    assert code == 0 and out.strip() == "lhs=21/20 pass"
    # flags override the file
    _, out, _ = run(capsys, "params", "crucial", "--config", str(cfg), "--k", "9")
    assert out.strip() == "lhs=9/8 pass"


def test_exit_codes(capsys):
    assert run(capsys, "nope")[0] == 2
    assert run(capsys, "tuples", "narrowest")[0] == 2
    assert run(capsys, "params", "crucial", "--k", "7", "--l", "1", "--theta", "2")[0] == 3
    assert run(capsys, "params", "mink", "--theta", "1/2")[0] == 3
    assert run(capsys, "tuples", "narrowest", "--k", "6", "--limit", "10")[0] == 3
    assert run(capsys, "params", "c0", "--delta", "1/2", "--json", "--csv")[0] == 2


@pytest.mark.parametrize("argv", [
    ("tuples", "check", "--tuple", "0,2,6"),
    ("tuples", "primes-above", "--k", "6"),
    ("tuples", "sseries", "--tuple", "0,2", "--truncation", "10000"),
    ("weights", "s0", "--N", "2000"),
    ("weights", "s1", "--N", "2000", "--h", "2"),
    ("weights", "restricted", "--N", "2000", "--power", "0.4", "--eta", "0.3"),
    ("weights", "criterion", "--N", "2000"),
    ("weights", "tq1", "--k", "3", "--l", "2", "--alpha", "1/7"),
    ("params", "c0", "--delta", "1/4"),
    ("params", "minl", "--k", "25"),
    ("params", "mink", "--theta", "0.8"),
    ("scan", "census", "--tuple", "0,2,6", "--lo", "5", "--hi", "2000", "--c1", "0.1"),
    ("scan", "pairs", "--limit", "20000", "--predicate", "omega=4,Omega=5,d=24"),
    ("polignac", "summary", "--N", "1000", "--max-gap", "12"),
    ("gt", "wtrick", "--w", "7", "--tuple", "0,2,6"),
    ("gt", "nu", "--w", "5", "--N", "1000", "--R", "7", "--b", "11", "--n", "300"),
    ("gt", "delta", "--h", "0,1", "--tuple", "0,2", "--W", "30"),
    ("gt", "ap", "--limit", "10000", "--m", "3", "--cap", "5"),
])
def test_every_command(argv, capsys):
    for mode in ((), ("--json",), ("--csv",)):
        code, out, err = run(capsys, *argv, *mode)
        assert code == 0, err
        assert out
        if mode == ("--json",):
            json.loads(out)
