import json

import pytest

from bimine.cli import main, parse_fractions, UsageError


@pytest.fixture
def edges(tmp_path):
    p = tmp_path / "g.tsv"
    p.write_text("# toy\na\t1\na\t2\nb\t1\nb\t2\nz\t1\n", encoding="utf-8")
    return p


def test_solve_mhibp(edges, tmp_path):
    out = tmp_path / "b.jsonl"
    assert main(["solve-mhibp", "--edges", str(edges), "--out", str(out)]) == 0
    recs = [json.loads(x) for x in out.read_text().splitlines()]
    assert recs == [
        {"sources": ["a", "b"], "targets": ["1", "2"]},
        {"sources": ["a", "b", "z"], "targets": ["1"]},
    ]
    assert not list(tmp_path.glob(".b.jsonl.*"))


def test_detect_writes_ranking(edges, tmp_path):
    out = tmp_path / "r.tsv"
    assert main(["detect", "--edges", str(edges), "--mode", "arbg", "--out", str(out)]) == 0
    rows = [line.split("\t") for line in out.read_text().splitlines()]
    assert [r[0] for r in rows] == ["a", "b", "z"]
    assert float(rows[0][1]) >= float(rows[-1][1])


def test_usage_errors(edges, capsys):
    assert main(["detect"]) == 2
    assert main(["nope"]) == 2
    assert main(["detect", "--edges", str(edges), "--mode", "xyz"]) == 2
    assert main(["inject", "--n-fraud", "3", "--lam", "2", "--out", "x"]) == 2  # no --seed
    err = capsys.readouterr().err.strip().splitlines()
    assert all(line.startswith("bimine: usage error:") for line in err)


def test_data_errors(tmp_path, capsys):
    assert main(["detect", "--edges", str(tmp_path / "missing.tsv")]) == 1
    bad = tmp_path / "bad.tsv"
    bad.write_text("a\tb\tc\n", encoding="utf-8")
    assert main(["detect", "--edges", str(bad)]) == 1
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 2 and all(line.startswith("bimine: error:") for line in err)


def test_inject_detect_eval_pipeline(tmp_path):
    g = tmp_path / "inj.tsv"
    args = ["inject", "--background", "300x100:0.02", "--n-fraud", "30", "--lam", "10",
            "--seed", "4", "--out", str(g)]
    assert main(args) == 0
    first = g.read_bytes()
    assert main(args) == 0
    assert g.read_bytes() == first  # same seed, same bytes
    labels = tmp_path / "inj.labels.tsv"
    assert sum(int(line.split("\t")[1]) for line in labels.read_text().splitlines()) == 30
    rank = tmp_path / "r.tsv"
    assert main(["detect", "--edges", str(g), "--out", str(rank)]) == 0
    metrics = tmp_path / "m.tsv"
    assert main(["eval", "--ranking", str(rank), "--labels", str(labels), "--out", str(metrics)]) == 0
    values = dict(line.split("\t") for line in metrics.read_text().splitlines())
    assert set(values) == {"auc", "best_f1"}
    assert float(values["auc"]) > 0.9


def test_forest_command(tmp_path):
    data = tmp_path / "d.csv"
    data.write_text("user,ip\nu1,x\nu2,x\nu3,y\nu4,z\n", encoding="utf-8")
    (tmp_path / "d.modes.json").write_text('{"ip": "arbg"}', encoding="utf-8")
    out = tmp_path / "s.tsv"
    assert main(["forest", "--kdata", str(data), "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 4
    assert main(["forest", "--kdata", str(data), "--modes", str(tmp_path / "none.json")]) == 1


def test_bench(edges, tmp_path):
    out = tmp_path / "bench.csv"
    assert main(["bench", "--edges", str(edges), "--seed", "1", "--fractions", "0.5,1.0",
                 "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "edge_count,build_ms"
    assert [int(x.split(",")[0]) for x in lines[1:]] == [2, 5]
    assert main(["bench", "--edges", str(edges), "--seed", "1", "--reps", "2"]) == 2


def test_parse_fractions():
    assert parse_fractions("0.1..1.0") == [round(0.1 * i, 10) for i in range(1, 11)]
    assert parse_fractions("0.5,1") == [0.5, 1.0]
    for bad in ("0..1", "x", "1.5", "0.2..0.1"):
        with pytest.raises(UsageError):
            parse_fractions(bad)


def test_log_env_goes_to_stderr(edges, monkeypatch, capsys):
    monkeypatch.setenv("BM_LOG", "info")
    assert main(["solve-mhibp", "--edges", str(edges)]) == 0
    cap = capsys.readouterr()
    assert "bicliques" in cap.err
    assert cap.out.count("\n") == 2
