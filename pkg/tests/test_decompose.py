"""N/R/C edge decomposition: construction, verifier, serialization."""

import csv
import json

import numpy as np
import pytest

from graphconc.decompose import CLASS_C, CLASS_N, CLASS_R
from graphconc import (
    EdgeDecomposition,
    LinearOp,
    SparseGraph,
    Uniform,
    decompose,
    decompose_block,
    decomposition_to_csv,
    expected_adjacency,
    sample,
    trace_to_json,
    triangle_split,
    verify_decomposition,
)

from conftest import MASTER


def zero_ea(n):
    return LinearOp.from_dense(np.zeros((n, n)), symmetric=True)


def directed_star_rows(n):
    """Row 0 owns every edge (0, j)."""
    return SparseGraph(n, np.zeros(n - 1, dtype=int), np.arange(1, n),
                       np.ones(n - 1), directed=True)


def empty_directed(n):
    return SparseGraph(n, [], [], [], directed=True)


# ---------------------------------------------------------------------------
# triangle split


def test_triangle_split_covers_graph():
    g = sample(Uniform(30, 0.2), MASTER)
    up, lo = triangle_split(g)
    assert up.directed and lo.directed
    assert np.all(up.i < up.j) and np.all(lo.i > lo.j)
    assert up.nnz == lo.nnz == g.nnz
    assert np.array_equal(up.to_dense() + lo.to_dense(), g.to_dense())


# ---------------------------------------------------------------------------
# decompose_block primitives


def test_block_on_empty_graph_is_all_core():
    n = 16
    A = empty_directed(n)
    I = J = np.arange(n)
    N, R, C, I1, J1 = decompose_block(A, zero_ea(n), I, J, 1.0, 1.0, 1.0)
    assert I1.size == 0 and J1.size == 0
    assert R[0].size == 0 and C[0].size == 0
    assert N[0].size == n * n  # whole rectangle covered by the core


def test_block_alpha_precondition():
    n = 16
    A = empty_directed(n)
    I = J = np.arange(n)
    with pytest.raises(ValueError):
        decompose_block(A, zero_ea(n), I, J, 0.5, 1.0, 1.0)


def test_block_partition_is_exact():
    n = 32
    g = sample(Uniform(n, 4.0 / n), MASTER)
    up, _ = triangle_split(g)
    I = J = np.arange(n)
    N, R, C, I1, J1 = decompose_block(up, zero_ea(n), I, J, 1.0, 1.0, 4.0)
    seen = np.zeros((n, n), dtype=int)
    for (ii, jj) in (N, R, C):
        seen[ii, jj] += 1
    hole = np.zeros((n, n), dtype=bool)
    hole[np.ix_(I1, J1)] = True
    assert np.all(seen[~hole] == 1)  # disjoint cover outside the hole
    assert np.all(seen[hole] == 0)


# ---------------------------------------------------------------------------
# the driver


def test_single_heavy_row_lands_in_c():
    # a full row fails the 8 r alpha d filter, its entries become the
    # column class (each column holds one entry, far under 32r)
    n = 40
    A = directed_star_rows(n)
    dec = decompose(A, zero_ea(n), r=1.0, d=1.0)
    assert np.all(dec.class_of[0, 1:] == CLASS_C)
    rep = verify_decomposition(A, zero_ea(n), dec, d=1.0, r=1.0)
    assert rep.structural_ok


def test_single_heavy_column_lands_in_r():
    n = 40
    A = directed_star_rows(n)
    At = SparseGraph(n, A.j, A.i, A.w, directed=True)
    dec = decompose(At, zero_ea(n), r=1.0, d=1.0)
    assert np.all(dec.class_of[1:, 0] == CLASS_R)
    rep = verify_decomposition(At, zero_ea(n), dec, d=1.0, r=1.0)
    assert rep.structural_ok


def test_decompose_covers_every_pair():
    n = 64
    m = Uniform(n, 4.0 / n)
    g = sample(m, MASTER)
    up, lo = triangle_split(g)
    EA = expected_adjacency(m)
    for part in (up, lo):
        dec = decompose(part, EA, r=1.0, d=4.0)
        counts = dec.counts()
        assert sum(counts.values()) == n * n
        rep = verify_decomposition(part, EA, dec, d=4.0, r=1.0)
        assert rep.partition_ok and rep.r_rows_ok and rep.c_cols_ok
        assert rep.r_footprint_ok and rep.c_footprint_ok
        assert rep.structural_ok


def test_decompose_rejects_undirected():
    g = sample(Uniform(12, 0.3), MASTER)
    with pytest.raises(ValueError):
        decompose(g, zero_ea(12), r=1.0, d=1.0)


def test_dense_block_recovers_via_row_filter_empty():
    # every row of a complete directed graph violates a tiny degree cap;
    # the driver flags the round and dumps the block into N eventually
    n = 12
    i, j = np.nonzero(~np.eye(n, dtype=bool))
    A = SparseGraph(n, i, j, np.ones(i.size), directed=True)
    dec = decompose(A, zero_ea(n), r=1.0, d=0.001)
    assert sum(dec.counts().values()) == n * n
    assert any(t.get("row_filter_empty") for t in dec.block_trace)


def test_verifier_negative_control():
    # 33 ones in a single R row breaks the per-row bound at r = 1
    n = 40
    A = SparseGraph(n, np.zeros(33, dtype=int), np.arange(1, 34),
                    np.ones(33), directed=True)
    labels = np.zeros((n, n), dtype=np.int8)
    labels[0, 1:34] = CLASS_R
    dec = EdgeDecomposition(n, labels, r=1.0, d=1.0, block_trace=())
    rep = verify_decomposition(A, zero_ea(n), dec, d=1.0, r=1.0)
    assert not rep.r_rows_ok
    assert rep.max_r_row_ones == 33 and rep.ones_cap == 32.0
    assert not rep.structural_ok


def test_verifier_norm_on_empty_graph():
    # with every pair in N, ||(A - EA)_N|| is just ||EA||
    n = 32
    m = Uniform(n, 2.0 / n)
    dec = decompose(empty_directed(n), expected_adjacency(m), r=1.0, d=2.0)
    rep = verify_decomposition(empty_directed(n), expected_adjacency(m), dec,
                               d=2.0, r=1.0)
    assert sum(dec.counts().values()) == n * n
    assert rep.norm_n == pytest.approx((n - 1) * 2.0 / n, rel=1e-6)


def test_edge_decomposition_validation():
    with pytest.raises(ValueError):
        EdgeDecomposition(3, np.zeros((2, 2), dtype=np.int8), 1.0, 1.0, ())
    bad = np.zeros((3, 3), dtype=np.int8)
    bad[0, 0] = 5
    with pytest.raises(ValueError):
        EdgeDecomposition(3, bad, 1.0, 1.0, ())


def test_csv_and_trace_roundtrip(tmp_path):
    n = 16
    g = sample(Uniform(n, 0.2), MASTER)
    up, _ = triangle_split(g)
    dec = decompose(up, zero_ea(n), r=1.0, d=3.2)
    csv_path = tmp_path / "classes.csv"
    decomposition_to_csv(dec, csv_path)
    with open(csv_path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["i", "j", "class"]
    assert len(rows) == n * n + 1
    back = np.zeros((n, n), dtype=np.int8)
    names = {"N": CLASS_N, "R": CLASS_R, "C": CLASS_C}
    for i, j, cls in rows[1:]:
        back[int(i), int(j)] = names[cls]
    assert np.array_equal(back, dec.class_of)

    trace_path = tmp_path / "trace.json"
    trace_to_json(dec, trace_path)
    blob = json.loads(trace_path.read_text())
    assert blob["n"] == n and len(blob["rounds"]) == len(dec.block_trace)
