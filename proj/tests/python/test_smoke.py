import json
import math
import os
import pathlib

import pytest

import boilerfield as bf

DATA = pathlib.Path(os.environ.get("BOILERFIELD_DATA_DIR", pathlib.Path(__file__).resolve().parents[2] / "data"))
PAGE = "<html><head><title>T</title></head><body><nav>Home</nav><article><p>Story text.</p></article></body></html>"


def test_extract_blocks():
    blocks = bf.extract_blocks(PAGE, "p1")
    assert [b["dom_path"] for b in blocks] == [
        "/html[1]/head[1]/title[1]/#text[1]",
        "/html[1]/body[1]/nav[1]/#text[1]",
        "/html[1]/body[1]/article[1]/p[1]/#text[1]",
    ]
    assert blocks[2]["text_hash"] == bf.text_hash("Story text.")
    assert len(bf.text_hash("x")) == 16


def test_path_graph_midpoint():
    w = [[0, 1, 0], [1, 0, 1], [0, 1, 0]]
    for r in (bf.solve_iterative(w, {0: 0, 2: 1}), bf.solve_direct(w, {0: 0, 2: 1})):
        assert r["scores"][1] == 0.5
        assert r["labels"] == [0, 0, 1]
        assert r["energy"] == 0.5


def test_three_block_example():
    # Two identical blocks and one orthogonal one; the median distance is sqrt(2).
    weights, sigma = bf.build_graph([[1, 0], [1, 0], [0, 1]])
    assert sigma == pytest.approx(math.sqrt(2))
    r = bf.solve_iterative(weights, {0: 1, 2: 0}, tol=1e-12)
    assert r["scores"][1] == pytest.approx(1 / (1 + math.exp(-0.5)), abs=1e-9)


def test_errors_carry_exit_codes():
    with pytest.raises(bf.BoilerfieldError) as info:
        bf.solve_iterative([[0, 1], [1, 0]], {})
    assert info.value.exit_code == 2
    chain = [[1.0 if abs(i - j) == 1 else 0.0 for j in range(30)] for i in range(30)]
    with pytest.raises(bf.BoilerfieldError) as info:
        bf.solve_iterative(chain, {0: 0, 29: 1}, max_iters=1)
    assert info.value.exit_code == 3


def test_embeddings_and_energy():
    table = bf.EmbeddingTable.parse("alpha 1 0\nbeta 0 1\n")
    assert table.dim == 2 and len(table) == 2
    vec, count = table.embed("Alpha beta gamma")
    assert vec == [0.5, 0.5] and count == 2
    assert bf.energy([[0, 1], [1, 0]], [0, 1]) == 1.0


def test_synthetic_page_pipeline_and_compare():
    table = bf.EmbeddingTable.load(DATA / "synthetic" / "embeddings.txt")
    html = (DATA / "synthetic" / "pages" / "page01.html").read_text()
    truth = json.loads((DATA / "synthetic" / "truth" / "page01.json").read_text())
    pred = bf.extract_page(html, table, "page01", truth=truth, seed_mode="truth")
    assert pred["page_id"] == "page01"
    assert all(0.0 <= b["score"] <= 1.0 for b in pred["blocks"])
    assert sum(b["seed"] for b in pred["blocks"]) == math.ceil(0.2 * len(pred["blocks"]))
    report = bf.compare(pred, truth)
    assert report["accuracy"] >= 0.8
    assert pred == bf.extract_page(html, table, "page01", truth=truth, seed_mode="truth")


def test_evaluate_directory(tmp_path):
    truth = json.loads((DATA / "synthetic" / "truth" / "page01.json").read_text())
    pred = {
        "page_id": "page01",
        "config": {},
        "stats": {},
        "blocks": [dict(b, score=float(b["label"]), seed=False) for b in truth["blocks"]],
    }
    (tmp_path / "page01.json").write_text(json.dumps(pred))
    summary, code = bf.evaluate(tmp_path, DATA / "synthetic" / "truth")
    assert code == 2  # the other nine truth pages have no prediction
    with pytest.raises(bf.BoilerfieldError):
        bf.evaluate(tmp_path, tmp_path / "missing")
