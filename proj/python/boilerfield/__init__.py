"""Boilerplate removal by harmonic label propagation over text blocks."""

import json
import os

from . import _core
from ._core import (
    BoilerfieldError,
    EmbeddingTable,
    build_graph,
    energy,
    median_sigma,
    normalize_text,
    solve_direct,
    solve_iterative,
    text_hash,
    tokenize,
)

__all__ = [
    "BoilerfieldError",
    "EmbeddingTable",
    "build_graph",
    "compare",
    "energy",
    "evaluate",
    "extract_blocks",
    "extract_page",
    "median_sigma",
    "normalize_text",
    "solve_direct",
    "solve_iterative",
    "text_hash",
    "tokenize",
]


def extract_blocks(html, page_id="page"):
    """Leaf text blocks of an HTML document as a list of dicts."""
    return json.loads(_core.extract_blocks_json(html, page_id))["blocks"]


def extract_page(
    html,
    table,
    page_id="page",
    *,
    truth=None,
    kernel="rbf",
    sigma=None,
    knn=None,
    solver="iterative",
    tol=1e-8,
    max_iters=None,
    threshold=0.5,
    seed_mode="heuristic",
    seed_fraction=0.2,
    seed_rng=None,
):
    """Runs the full pipeline on one page and returns the prediction dict.

    `truth` is a ground-truth dict; it is required for seed_mode="truth" and
    used as the fallback when no heuristic rule fires. `seed_rng` selects
    random seed sampling with that RNG seed instead of the first blocks.
    """
    truth_json = None if truth is None else json.dumps(truth)
    text = _core.extract_page_json(
        html, table, page_id, truth_json, kernel, sigma, knn, solver, tol,
        max_iters, threshold, seed_mode, seed_fraction, seed_rng,
    )
    return json.loads(text)


def compare(prediction, truth, exclude_seeds=True):
    """Per-page confusion counts and metrics for a prediction dict."""
    return json.loads(_core.compare_json(json.dumps(prediction), json.dumps(truth), exclude_seeds))


def evaluate(pred_dir, truth_dir, exclude_seeds=True, micro=False):
    """Scores a directory of predictions; returns (report dict, exit code)."""
    text, code = _core.evaluate_json(os.fspath(pred_dir), os.fspath(truth_dir), exclude_seeds, micro)
    return json.loads(text), code
