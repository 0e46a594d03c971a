"""Norm and eigenvalue estimation for LinearOps.

Routes
------
* ``spectral_norm``     -- power iteration on op^T op.  Iterating on the
  Gram operator sidesteps the +/- oscillation that plain power
  iteration hits on symmetric spectra with lambda_min ~ -lambda_max, at
  the price of two matvecs per step.
* ``top_k_eigs``        -- Lanczos with full reorthogonalization and
  optional deflation; residual-checked Ritz pairs.
* ``full_spectrum``     -- dense symmetric eigensolver (Householder
  tridiagonalization + iterative tridiagonal solve, via LAPACK) for
  desk-scale matrices; the exact reference the iterative routes are
  tested against.
* ``inf_to_2_norm_exact`` -- exact max_{x in {-1,1}^m} ||Bx||_2 by
  Gray-code enumeration (m <= 24), plus ``inf_to_2_norm_lower`` for
  larger matrices.
* ``l1_operator_bound`` / ``l2_sparsity_bound`` -- cheap certified
  upper bounds on the spectral norm.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from ._seeding import aux_generator
from .errors import EntryOutOfRange, NoConvergence, SizeExceeded, WidthExceeded
from .operators import LinearOp, gram_op

_DEFAULT_SEED = 0x5EED
FULL_SPECTRUM_LIMIT = 2048
ENUMERATION_LIMIT = 24


def _start_vector(n, rng):
    v = rng.standard_normal(n)
    return v / np.linalg.norm(v)


def spectral_norm(op, tol=1e-7, max_iter=5000, rng=None, seed=None):
    """Largest singular value of ``op`` by power iteration on op^T op.

    Convergence: the sigma estimate changes by a relative tol three
    times in a row AND the Rayleigh residual ||Gx - rho x|| <= 2 tol rho
    (which bounds the relative error of sigma = sqrt(rho) by about tol,
    and is robust against multiplicity plateaus).  Deterministic for a
    given rng or seed; raises NoConvergence with the best estimate after
    max_iter steps.
    """
    if rng is None:
        rng = aux_generator(_DEFAULT_SEED if seed is None else seed, 0, 1)
    G = gram_op(op)
    n = G.n_cols
    if n == 0:
        return 0.0
    x = _start_vector(n, rng)
    for _ in range(3):
        y = G.matvec(x)
        if np.linalg.norm(y) > 0:
            break
        x = _start_vector(n, rng)
    else:
        return 0.0  # op^T op annihilated three random vectors: zero operator
    sigma_prev = np.inf
    plateau = 0
    for _ in range(max_iter):
        rho = float(x @ y)
        sigma = np.sqrt(max(rho, 0.0))
        resid = np.linalg.norm(y - rho * x)
        if sigma > 0 and abs(sigma - sigma_prev) <= tol * sigma:
            plateau += 1
        else:
            plateau = 0
        sigma_prev = sigma
        if plateau >= 3 and resid <= 2.0 * tol * max(rho, 1e-300):
            return sigma
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0
        x = y / ny
        y = G.matvec(x)
    raise NoConvergence(f"power iteration: no convergence in {max_iter} steps",
                        best=sigma_prev)


def _select(theta, k, mode):
    if mode == "la":
        return np.argsort(theta)[-k:][::-1]
    if mode == "sa":
        return np.argsort(theta)[:k]
    if mode == "lm":
        return np.argsort(np.abs(theta))[-k:][::-1]
    raise ValueError(f"unknown mode {mode!r}")


def top_k_eigs(op, k, mode="la", tol=1e-9, max_dim=None, rng=None,
               deflate=None, seed=None):
    """k extremal eigenpairs of a symmetric op by Lanczos.

    mode: "la" largest algebraic, "sa" smallest algebraic, "lm" largest
    magnitude.  ``deflate`` is an optional (n, m) orthonormal block
    projected out of the Krylov space (for known eigenvectors such as
    the Laplacian kernel).  Full reorthogonalization at every step; a
    breakdown (invariant subspace) restarts with a fresh orthogonalized
    random vector.  Each returned pair satisfies
    ||op v - theta v|| <= tol * max(1, |theta|); vectors are pairwise
    orthonormal to the same scale.
    """
    n = op.n_rows
    if not op.symmetric:
        raise ValueError("top_k_eigs needs a symmetric operator")
    if rng is None:
        rng = aux_generator(_DEFAULT_SEED if seed is None else seed, 0, 2)
    Q = None
    n_defl = 0
    if deflate is not None:
        Q = np.asarray(deflate, dtype=float)
        if Q.ndim == 1:
            Q = Q[:, None]
        n_defl = Q.shape[1]
    if k < 1 or k > n - n_defl:
        raise ValueError(f"need 1 <= k <= {n - n_defl}")
    if max_dim is None:
        max_dim = min(n - n_defl, max(6 * k + 40, 64))
    max_dim = max(k, min(max_dim, n - n_defl))

    def project(w):
        return w - Q @ (Q.T @ w) if Q is not None else w

    V = np.empty((n, max_dim))
    alpha = np.empty(max_dim)
    beta = np.zeros(max_dim)  # beta[j] links v_j and v_{j+1}
    v = project(_start_vector(n, rng))
    V[:, 0] = v / np.linalg.norm(v)
    best = None
    j = 0
    while j < max_dim:
        w = op.matvec(V[:, j])
        w = project(w)
        alpha[j] = V[:, j] @ w
        w -= V[:, : j + 1] @ (V[:, : j + 1].T @ w)
        h = V[:, : j + 1].T @ w  # second orthogonalization pass if needed
        if np.abs(h).max() > 1e-10:
            w -= V[:, : j + 1] @ h
        b = np.linalg.norm(w)
        dim = j + 1
        if dim >= k:
            theta, S = scipy.linalg.eigh_tridiagonal(alpha[:dim], beta[: dim - 1])
            idx = _select(theta, k, mode)
            est = b * np.abs(S[-1, idx])
            best = (theta[idx].copy(), V[:, :dim] @ S[:, idx])
            if np.all(est <= tol * np.maximum(1.0, np.abs(theta[idx]))):
                vals, vecs = best
                ok = True
                for c in range(k):
                    vecs[:, c] /= np.linalg.norm(vecs[:, c])
                    r = op.matvec(vecs[:, c]) - vals[c] * vecs[:, c]
                    if np.linalg.norm(r) > tol * max(1.0, abs(vals[c])):
                        ok = False
                        break
                if ok:
                    return vals, vecs
        if j + 1 == max_dim:
            break
        if b <= 1e-14 * max(1.0, np.abs(alpha[: j + 1]).max()):
            # invariant subspace: restart with a fresh direction
            w = project(rng.standard_normal(n))
            w -= V[:, : j + 1] @ (V[:, : j + 1].T @ w)
            b = np.linalg.norm(w)
            if b <= 1e-12:
                # Krylov space exhausted; the tridiagonal eigen-decomposition
                # is exact on it
                theta, S = scipy.linalg.eigh_tridiagonal(alpha[: j + 1], beta[:j])
                idx = _select(theta, min(k, j + 1), mode)
                vecs = V[:, : j + 1] @ S[:, idx]
                vecs /= np.linalg.norm(vecs, axis=0)
                return theta[idx].copy(), vecs
            beta[j] = 0.0
        else:
            beta[j] = b
        V[:, j + 1] = w / b
        j += 1
    raise NoConvergence(f"lanczos: residual tol {tol} not met at dim {max_dim}",
                        best=best)


def full_spectrum(a):
    """All eigenvalues of a symmetric matrix (ascending), n <= 2048."""
    if isinstance(a, LinearOp):
        a = a.to_dense()
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("need a square matrix")
    if a.shape[0] > FULL_SPECTRUM_LIMIT:
        raise SizeExceeded(f"n = {a.shape[0]} exceeds {FULL_SPECTRUM_LIMIT}")
    if a.size and np.abs(a - a.T).max() > 1e-10 * max(1.0, np.abs(a).max()):
        raise ValueError("matrix is not symmetric")
    return np.linalg.eigvalsh(a)


# ---------------------------------------------------------------------------
# infinity -> 2 norms and cheap upper bounds


def inf_to_2_norm_exact(B, limit=ENUMERATION_LIMIT):
    """Exact ||B||_{inf->2} = max over sign vectors x of ||Bx||_2.

    Gray-code walk over {-1,1}^m starting at all-ones, so each step
    flips one sign and updates Bx in O(rows); x ~ -x symmetry halves
    the walk.  Exponential in the column count m; refuses m > limit.
    """
    B = np.asarray(B, dtype=float)
    k, m = B.shape
    if m == 0 or k == 0:
        return 0.0
    if m > limit:
        raise WidthExceeded(f"{m} columns exceeds enumeration limit {limit}")
    x = np.ones(m)
    v = B @ x
    best = float(v @ v)
    for g in range(1, 1 << (m - 1)) if m > 1 else []:
        flip = (g & -g).bit_length() - 1  # lowest set bit = Gray-code flip
        x[flip] = -x[flip]
        v += (2.0 * x[flip]) * B[:, flip]
        nv = float(v @ v)
        if nv > best:
            best = nv
    return float(np.sqrt(best))


def inf_to_2_norm_lower(B, trials=8, rng=None, seed=None):
    """Lower bound on ||B||_{inf->2}: greedy sign flips from random starts.

    Always a valid lower bound; falls back to exact enumeration when
    trials covers the half-cube and the width permits it.
    """
    B = np.asarray(B, dtype=float)
    k, m = B.shape
    if m == 0 or k == 0:
        return 0.0
    if m <= ENUMERATION_LIMIT and trials >= (1 << (m - 1)):
        return inf_to_2_norm_exact(B)
    if rng is None:
        rng = aux_generator(_DEFAULT_SEED if seed is None else seed, 0, 3)
    col_sq = (B * B).sum(axis=0)
    best = 0.0
    for _ in range(trials):
        x = np.where(rng.random(m) < 0.5, -1.0, 1.0)
        v = B @ x
        improved = True
        while improved:
            improved = False
            corr = B.T @ v
            # flipping j changes ||v||^2 by 4 (col_sq[j] - x_j corr[j])
            gains = 4.0 * (col_sq - x * corr)
            jbest = int(np.argmax(gains))
            if gains[jbest] > 1e-12:
                v -= (2.0 * x[jbest]) * B[:, jbest]
                x[jbest] = -x[jbest]
                improved = True
        best = max(best, float(np.linalg.norm(v)))
    return best


def _row_col_reductions(B):
    if hasattr(B, "tocsr") and not isinstance(B, np.ndarray):
        absB = abs(B.tocsr())
        row1 = np.asarray(absB.sum(axis=1)).ravel()
        col1 = np.asarray(absB.sum(axis=0)).ravel()
        sq = B.multiply(B)
        row_nnz = np.diff(B.tocsr().indptr)
        col_sq = np.asarray(sq.sum(axis=0)).ravel()
        return row1, col1, row_nnz, col_sq, B.min() if B.nnz else 0.0, B.max() if B.nnz else 0.0
    B = np.asarray(B, dtype=float)
    row1 = np.abs(B).sum(axis=1)
    col1 = np.abs(B).sum(axis=0)
    row_nnz = (B != 0).sum(axis=1)
    col_sq = (B * B).sum(axis=0)
    lo = B.min() if B.size else 0.0
    hi = B.max() if B.size else 0.0
    return row1, col1, row_nnz, col_sq, lo, hi


def l1_operator_bound(B):
    """sqrt(max row l1 norm * max column l1 norm) >= ||B||."""
    row1, col1, _, _, _, _ = _row_col_reductions(B)
    if row1.size == 0 or col1.size == 0:
        return 0.0
    return float(np.sqrt(row1.max() * col1.max()))


def l2_sparsity_bound(B):
    """sqrt(max row support size * max column squared l2 norm) >= ||B||.

    Valid for entries in [0, 1] (the regime of adjacency fragments);
    anything outside that range is refused.
    """
    _, _, row_nnz, col_sq, lo, hi = _row_col_reductions(B)
    if lo < 0.0 or hi > 1.0:
        raise EntryOutOfRange("l2_sparsity_bound needs entries in [0, 1]")
    if row_nnz.size == 0 or col_sq.size == 0:
        return 0.0
    return float(np.sqrt(float(row_nnz.max()) * col_sq.max()))
