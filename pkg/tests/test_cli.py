import csv
import hashlib
import json

import numpy as np
import pytest

from sgembed.cli import EXIT_GUARD, EXIT_IO, EXIT_OK, EXIT_USAGE, main
from sgembed.io import load_embeddings

from oracles import complete_graph, cycle_graph, star_graph, write_tu


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize(
    "argv, expected",
    [
        (["--t", 4, "--epsilon", 0.1, "--delta", 0.1], "1154"),
        (["--a", 1, "--epsilon", 0.1, "--delta", 0.1], "600"),
    ],
)
def test_sample_size(capsys, argv, expected):
    code, out, _ = run(capsys, "sample-size", *argv)
    assert code == EXIT_OK and out.strip() == expected


@pytest.mark.parametrize(
    "argv",
    [
        ["--a", 3, "--epsilon", 0, "--delta", 0.1],
        ["--t", 11, "--epsilon", 0.1, "--delta", 0.1],
        ["--epsilon", 0.1, "--delta", 0.1],
        ["--a", 1, "--t", 2, "--epsilon", 0.1, "--delta", 0.1],
        ["--a", "x", "--epsilon", 0.1, "--delta", 0.1],
    ],
)
def test_sample_size_usage_errors(capsys, argv):
    assert run(capsys, "sample-size", *argv)[0] == EXIT_USAGE


def test_collide(capsys):
    code, out, _ = run(capsys, "collide", "--t-max", 5)
    assert code == EXIT_OK
    rows = list(csv.reader(out.splitlines()))
    assert rows[0] == ["t", "hash", "a", "pairs", "collisions", "rate"]
    assert ["5", "degree", "12", "66", "2", "0.0303"] in rows
    assert ["3", "betweenness", "3", "3", "0", "0.0000"] in rows
    assert len(rows) == 1 + 5 * 4


def test_collide_guard(capsys):
    assert run(capsys, "collide", "--t-max", 9)[0] == EXIT_GUARD


@pytest.fixture
def toy(tmp_path):
    """Two classes that differ in cycles versus branching."""
    rng = np.random.default_rng(0)
    graphs, classes = [], []
    for i in range(12):
        graphs.append(cycle_graph(int(rng.integers(5, 9))))
        classes.append(0)
        graphs.append(star_graph(int(rng.integers(4, 8))))
        classes.append(1)
    d = tmp_path / "TOY"
    d.mkdir()
    write_tu(d, "TOY", graphs, classes)
    return d


@pytest.fixture
def triangle_ds(tmp_path):
    d = tmp_path / "TRI"
    d.mkdir()
    write_tu(d, "TRI", [complete_graph(3)], [1])
    return d


def test_embed_triangle(capsys, tmp_path, triangle_ds):
    out = tmp_path / "tri.jsonl"
    code, _, err = run(capsys, "embed", "--dataset", triangle_ds, "--t-max", 3, "--M", 40, "--out", out)
    assert code == EXIT_OK and "per graph" in err
    (e,), vocab, classes, _ = load_embeddings(out)
    assert [e.histograms[t].tolist() for t in (1, 2, 3)] == [[40], [40], [40]]
    manifest = json.loads((tmp_path / "tri.jsonl.manifest.json").read_text())
    assert manifest["outputs"]["tri.jsonl"] == hashlib.sha256(out.read_bytes()).hexdigest()
    assert manifest["config"]["M"] == 40


def test_embed_is_byte_reproducible(capsys, tmp_path, toy):
    args = ["embed", "--dataset", toy, "--t-max", 4, "--epsilon", 0.2, "--delta", 0.2, "--seed", 5]
    run(capsys, *args, "--out", tmp_path / "a.jsonl")
    run(capsys, *args, "--out", tmp_path / "b.jsonl", "--jobs", 2)
    assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()


def test_embed_flag_conflicts(capsys, tmp_path, toy):
    base = ["embed", "--dataset", toy, "--out", tmp_path / "x"]
    assert run(capsys, *base, "--M", 10, "--epsilon", 0.1, "--delta", 0.1)[0] == EXIT_USAGE
    assert run(capsys, *base, "--epsilon", 0.1)[0] == EXIT_USAGE
    assert run(capsys, *base, "--M", 0)[0] == EXIT_USAGE


def test_embed_missing_dataset(capsys, tmp_path):
    code, _, err = run(capsys, "embed", "--dataset", tmp_path / "nope", "--M", 5, "--out", tmp_path / "x")
    assert code == EXIT_IO and "I/O" in err


def test_cv_separable(capsys, tmp_path, toy):
    emb = tmp_path / "toy.jsonl"
    run(capsys, "embed", "--dataset", toy, "--t-max", 3, "--M", 200, "--out", emb)
    code, out, _ = run(capsys, "cv", "--embeddings", emb, "--folds", 4, "--out", tmp_path / "cv.csv")
    assert code == EXIT_OK
    rows = list(csv.reader((tmp_path / "cv.csv").read_text().splitlines()))
    assert ["mean", "1.000000", ""] in rows
    assert (tmp_path / "cv.csv.manifest.json").exists()


def test_cv_corrupt_file(capsys, tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{not json\n")
    assert run(capsys, "cv", "--embeddings", bad)[0] == EXIT_IO


def test_sweep_identity_row_matches_baseline(capsys, tmp_path, toy):
    common = ["--dataset", toy, "--t-max", 3, "--M", 150, "--seed", 2]
    emb = tmp_path / "base.jsonl"
    run(capsys, "embed", *common, "--out", emb)
    run(capsys, "cv", "--embeddings", emb, "--folds", 4, "--out", tmp_path / "cv.csv")
    cv_rows = {r[0]: r[1] for r in csv.reader((tmp_path / "cv.csv").read_text().splitlines())}
    out = tmp_path / "sweep.csv"
    code, _, _ = run(capsys, "sweep", *common, "--folds", 4, "--tau", 0.6, 1.0, 1.4, "--out", out)
    assert code == EXIT_OK
    rows = list(csv.reader(out.read_text().splitlines()))
    assert rows[0] == ["tau", "mean", "std"] and len(rows) == 4
    assert rows[2][0] == "1" and rows[2][1] == cv_rows["mean"] and rows[2][2] == cv_rows["std"]


def test_rho_identical_rankings(capsys, tmp_path):
    p = tmp_path / "r.csv"
    p.write_text("q1,a,b,c\nq2,c,a,b\n")
    code, out, _ = run(capsys, "rho", "--rankings", p, "--truth", p)
    assert code == EXIT_OK
    assert out.strip().splitlines()[-1] == "mean,1.000000"


def test_rho_from_embeddings(capsys, tmp_path, toy):
    emb = tmp_path / "toy.jsonl"
    run(capsys, "embed", "--dataset", toy, "--t-max", 3, "--M", 100, "--out", emb)
    code, out, _ = run(capsys, "rho", "--query-embeddings", emb, "--model-embeddings", emb)
    assert code == EXIT_OK
    scores = [float(r[1]) for r in csv.reader(out.splitlines()[1:-1])]
    assert len(scores) == 24 and all(0 < s <= 1 for s in scores)


def test_rho_usage(capsys, tmp_path):
    assert run(capsys, "rho")[0] == EXIT_USAGE
    assert run(capsys, "bogus")[0] == EXIT_USAGE
