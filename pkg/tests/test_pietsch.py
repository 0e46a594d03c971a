"""Grothendieck-Pietsch weights and submatrix selection.

The rank-one cases have closed forms: for a single-row B the optimal
weights are mu_j = |b_j| / sum|b| and the achieved norm equals the l1
norm, with no sqrt(pi/2) slack.
"""

import numpy as np
import pytest

from graphconc import (
    PietschWeights,
    VerificationError,
    gp_submatrix,
    gp_weights,
    inf_to_2_norm_exact,
)

from conftest import assert_close


def test_weights_simplex_validation():
    with pytest.raises(VerificationError):
        PietschWeights(np.array([0.5, 0.6]), 1.0, True, 1)
    with pytest.raises(VerificationError):
        PietschWeights(np.array([1.0, 0.0]), 1.0, True, 1)


def test_single_column_is_trivial():
    B = np.array([[3.0], [4.0]])
    w = gp_weights(B)
    assert_close(w.mu, [1.0], 1e-15)
    assert w.achieved_norm == pytest.approx(5.0)  # = ||b||_2 = ||B||_{inf->2}


def test_single_row_closed_form():
    B = np.array([[10.0, 1.0, 1.0, 1.0]])
    w = gp_weights(B, max_iter=800)
    # optimum: mu = |b|/sum|b|, achieved = sum|b| = 13 = ||B||_{inf->2}
    assert w.achieved_norm == pytest.approx(13.0, rel=1e-6)
    assert_close(w.mu, np.array([10.0, 1.0, 1.0, 1.0]) / 13.0, 5e-3)
    assert inf_to_2_norm_exact(B) == pytest.approx(13.0)


def test_single_row_submatrix_drops_heavy_column():
    B = np.array([[10.0, 1.0, 1.0, 1.0]])
    w = gp_weights(B, max_iter=800)
    J, cert = gp_submatrix(B, 0.5, weights=w)
    # threshold 1/(0.5*4) = 0.5 rejects only the weight-10 column
    assert list(J) == [1, 2, 3]
    assert cert.n_selected == 3 and cert.size_bound == 2.0
    assert cert.submatrix_norm == pytest.approx(np.sqrt(3.0))
    assert cert.norm_lhs == pytest.approx(np.sqrt(3.0) * np.sqrt(2.0))
    assert cert.ok


def test_equal_columns_keep_everything():
    B = np.tile(np.array([[1.0], [2.0], [-1.0]]), (1, 6))
    w = gp_weights(B)
    assert_close(w.mu, np.full(6, 1.0 / 6.0), 1e-9)
    for delta in (0.25, 0.5):
        J, cert = gp_submatrix(B, delta, weights=w)
        assert list(J) == list(range(6))
        assert cert.ok


def test_zero_matrix():
    w = gp_weights(np.zeros((3, 5)))
    assert w.achieved_norm == 0.0
    J, cert = gp_submatrix(np.zeros((3, 5)), 0.5, weights=w)
    assert list(J) == list(range(5)) and cert.ok


def test_history_is_monotone_best_so_far():
    rng = np.random.default_rng(21)
    B = rng.standard_normal((6, 10))
    w = gp_weights(B, max_iter=200)
    h = np.array(w.history)
    assert np.all(np.diff(h) <= 1e-15)
    assert w.iterations == h.size


def test_left_inequality_and_simplex_invariant():
    rng = np.random.default_rng(22)
    for _ in range(5):
        B = rng.standard_normal((6, 10))
        w = gp_weights(B, max_iter=300)
        assert w.mu.min() > 0.0
        assert w.mu.sum() == pytest.approx(1.0, abs=1e-12)
        exact = inf_to_2_norm_exact(B)
        assert w.achieved_norm >= exact * (1 - 1e-8)
        # mirror descent lands well inside the sqrt(pi/2) = 1.2533 slack
        assert w.achieved_norm <= 1.3 * exact


def test_pigeonhole_every_delta():
    rng = np.random.default_rng(23)
    B = rng.standard_normal((5, 16))
    w = gp_weights(B, max_iter=300)
    for delta in (0.1, 0.25, 0.5, 0.75):
        J, cert = gp_submatrix(B, delta, weights=w)
        assert J.size >= (1 - delta) * 16 - 1e-9
        assert cert.norm_lhs <= cert.achieved_norm * (1 + 1e-8) + 1e-12


def test_gp_submatrix_input_checks():
    B = np.ones((2, 4))
    with pytest.raises(ValueError):
        gp_submatrix(B, 0.0)
    with pytest.raises(ValueError):
        gp_submatrix(B, 1.0)
    with pytest.raises(ValueError):
        gp_weights(np.empty((3, 0)))
    with pytest.raises(ValueError):
        gp_weights(np.ones(3))
