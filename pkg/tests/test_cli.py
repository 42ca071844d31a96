import json

import pytest

from ship.cli import main, parse_k_list
from ship.engine import build_ship, footprint
from ship.index_io import load_index
from ship.prefix import load_table
from ship.synthgen import fixture_path

TABLE = "2001:db8::/32 7\n2001:db8:1::/48 8\n2001:db8:1:2::/64 9\n"


@pytest.fixture
def small(tmp_path):
    t = tmp_path / "t.txt"
    t.write_text(TABLE)
    return t


@pytest.fixture
def built(small, tmp_path, capsys):
    idx = tmp_path / "t.idx"
    assert main(["build", str(small), "-o", str(idx), "--k", "3"]) == 0
    capsys.readouterr()
    return idx


def test_build_reports_shape(small, tmp_path, capsys):
    out = tmp_path / "a.idx"
    assert main(["build", str(small), "-o", str(out)]) == 0
    text = capsys.readouterr().out
    assert "prefixes 3" in text and "bins M=1" in text and "bounds 32 48 64" in text
    first = out.read_bytes()
    assert main(["build", str(small), "-o", str(out)]) == 0
    assert out.read_bytes() == first


def test_build_missing_file(tmp_path, capsys):
    assert main(["build", str(tmp_path / "nope.txt"), "-o", str(tmp_path / "x")]) == 2
    assert "nope.txt" in capsys.readouterr().err


def test_build_malformed_table(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("2001:db8::/32 7\n2001:db8::/999 1\n")
    assert main(["build", str(bad), "-o", str(tmp_path / "x")]) == 2
    assert "bad.txt:2" in capsys.readouterr().err


def test_lookup_hit_and_miss(built, tmp_path, capsys):
    q = tmp_path / "q.txt"
    q.write_text("2001:db8::1\n2001:db8:1:2::5\n3fff::1\n")
    assert main(["lookup", str(built), str(q)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "2001:db8::1 32 7 3"  # 2 hash reads + one read in each single-node tree
    assert lines[1].split()[1:3] == ["64", "9"]
    assert lines[2] == "3fff::1 MISS"


def test_lookup_empty_input(built, tmp_path, capsys):
    q = tmp_path / "empty.txt"
    q.write_text("")
    assert main(["lookup", str(built), str(q)]) == 0
    assert capsys.readouterr().out == ""


def test_lookup_bad_line_continues(built, tmp_path, capsys):
    q = tmp_path / "q.txt"
    q.write_text("nonsense\n2001:db8::1\n")
    assert main(["lookup", str(built), str(q)]) == 2
    cap = capsys.readouterr()
    assert "line 1" in cap.err and cap.out.startswith("2001:db8::1 32 7")


def test_stats_fixture_histogram(capsys):
    assert main(["stats", str(fixture_path()), "--histogram", "--format", "jsonl"]) == 0
    rows = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    hist = {r["key"]: r["value"] for r in rows if r["kind"] == "histogram"}
    assert sorted(hist, key=hist.get)[-2:] in ([32, 48], [48, 32])
    assert [r["value"] for r in rows if r["kind"] == "bound"] == [32, 48, 64]


def test_stats_empty_table(tmp_path, capsys):
    e = tmp_path / "e.txt"
    e.write_text("# nothing\n")
    assert main(["stats", str(e)]) == 0
    assert capsys.readouterr().out.strip() == "kind,key,value"


def test_stats_index_matches_footprint(built, small, capsys):
    assert main(["stats", str(built), "--format", "jsonl"]) == 0
    rows = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    got = {r["key"]: r["value"] for r in rows if r["kind"] == "footprint"}
    assert got == footprint(load_index(built)).as_dict()
    assert got["total_bytes"] == footprint(build_ship(load_table(small), k=3)).total_bytes


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["build"], ["build", "t", "-o", "x", "--k", "99"],
                                  ["bench", "--tables", "x", "--k", "a..b"]])
def test_usage_errors(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 1


def test_invalid_tree_config_is_usage_error(small, tmp_path):
    assert main(["build", str(small), "-o", str(tmp_path / "x"), "--b", "0"]) == 1


def test_k_list():
    assert parse_k_list("1..6") == [1, 2, 3, 4, 5, 6]
    assert parse_k_list("2,4") == [2, 4]


def test_gen_and_bench(tmp_path, capsys):
    out = tmp_path / "r.txt"
    assert main(["gen", "random", "-o", str(out), "--n", "300", "--seed", "2"]) == 0
    v4 = tmp_path / "v4.table"
    assert main(["gen", "v4", "-o", str(v4), "--n", "400"]) == 0
    m = tmp_path / "m.txt"
    assert main(["gen", "map", "-o", str(m), "--source", str(v4), "--scale", "0.5"]) == 0
    assert (tmp_path / "m_0.5.txt").exists()
    csv_path = tmp_path / "rep" / "bench.csv"
    assert main(["bench", "--tables", str(tmp_path / "*.txt"), "--k", "1..2", "--validate", "500",
                 "--node-bits", "256", "--out", str(csv_path)]) == 0
    assert csv_path.exists()
    assert (csv_path.parent / "bench_accesses.svg").exists() and (csv_path.parent / "bench_bytes.svg").exists()
    assert len(csv_path.read_text().splitlines()) == 1 + 3 * 3  # three tables, k in {0, 1, 2}


def test_bench_no_tables(tmp_path):
    assert main(["bench", "--tables", str(tmp_path / "none*.txt")]) == 1
