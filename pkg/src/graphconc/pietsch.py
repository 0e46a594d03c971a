"""Grothendieck-Pietsch factorization: simplex weights and submatrix selection.

For a k x m matrix B the factorization guarantees positive weights mu on
the simplex with

    ||B||_{inf->2}  <=  ||B D_mu^{-1/2}||  <=  sqrt(pi/2) ||B||_{inf->2},

where D_mu = diag(mu).  The left inequality is algebraic and holds for
EVERY mu on the simplex (for a sign vector x, ||D_mu^{1/2} x||_2 = 1);
the right one holds at the optimum.  We minimize

    f(mu)^2 = lambda_max( D_mu^{-1/2} B^T B D_mu^{-1/2} )

by entropic mirror descent on the simplex -- f^2 is convex in mu, the
subgradient at the top eigenpair (lambda, v) is g_j = -lambda v_j^2/mu_j
-- and keep the best iterate.  Selecting the columns with
mu_j <= 1/(delta m) then yields at least (1-delta)m columns (pigeonhole)
whose submatrix norm is certified by ||B_J|| sqrt(delta m) <= f(mu).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._seeding import aux_generator
from .errors import VerificationError
from .operators import LinearOp
from .spectral import inf_to_2_norm_exact, inf_to_2_norm_lower, spectral_norm

_MU_FLOOR = 1e-300
_DEFAULT_GP_SEED = 0x6155


@dataclass(frozen=True)
class PietschWeights:
    """Simplex weights with the norm they achieve."""

    mu: np.ndarray
    achieved_norm: float
    converged: bool
    iterations: int
    history: tuple = field(repr=False, default=())

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        if mu.min() <= 0.0:
            raise VerificationError("weights must be strictly positive")
        if abs(mu.sum() - 1.0) > 1e-12:
            raise VerificationError("weights must sum to 1")
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)


@dataclass(frozen=True)
class GPCertificate:
    """Both sides of the submatrix guarantees, as computed."""

    m: int
    delta: float
    threshold: float
    n_selected: int
    size_bound: float          # (1 - delta) m
    submatrix_norm: float      # ||B_J||, exact SVD
    norm_lhs: float            # ||B_J|| sqrt(delta m)
    achieved_norm: float       # f(mu), the certified right-hand side
    ok: bool


def _scaled_op(B, mu, col_live):
    """B D_mu^{-1/2} with dead (all-zero) columns pinned to zero."""
    s = np.where(col_live, 1.0 / np.sqrt(mu), 0.0)
    return LinearOp(B.shape[0], B.shape[1], lambda x: B @ (s * x),
                    lambda x: s * (B.T @ x))


def _top_pair(B, mu, col_live, v0, iters=80, tol=1e-9):
    """Warm-started power iteration for lambda_max of the scaled Gram."""
    s = np.where(col_live, 1.0 / np.sqrt(mu), 0.0)
    v = v0
    lam = 0.0
    for _ in range(iters):
        z = s * (B.T @ (B @ (s * v)))
        nz = np.linalg.norm(z)
        if nz == 0.0:
            return 0.0, v
        z /= nz
        lam_new = nz  # ||Mv|| <= lambda_max for unit v, -> lambda_max
        if abs(lam_new - lam) <= tol * lam_new:
            return lam_new, z
        lam, v = lam_new, z
    return lam, v


def gp_weights(B, tol=1e-4, max_iter=500, step_c=1.0, rng=None):
    """Entropic mirror descent for the Pietsch weights; best iterate kept.

    ``converged`` reports whether the running best improved by less than
    a relative tol over the last 50 iterations (the scheme has no other
    natural stopping rule); callers treat False as a flag, not an error.
    The left inequality achieved_norm >= ||B||_{inf->2} is asserted
    against the greedy lower-bound oracle on every call.
    """
    B = np.asarray(B, dtype=float)
    if B.ndim != 2:
        raise ValueError("B must be a matrix")
    k, m = B.shape
    if m == 0:
        raise ValueError("B needs at least one column")
    if rng is None:
        rng = aux_generator(_DEFAULT_GP_SEED, 0, 4)
    col_sq = (B * B).sum(axis=0)
    col_live = col_sq > 0.0
    if not col_live.any():
        mu = np.full(m, 1.0 / m)
        return PietschWeights(mu, 0.0, True, 0, (0.0,))
    mu = np.full(m, 1.0 / m)
    v = rng.standard_normal(m)
    v[~col_live] = 0.0
    v /= np.linalg.norm(v)
    best_mu = mu.copy()
    best_f = np.inf
    history = []
    for t in range(1, max_iter + 1):
        lam, v = _top_pair(B, mu, col_live, v)
        f = np.sqrt(max(lam, 0.0))
        if f < best_f:
            best_f = f
            best_mu = mu.copy()
        history.append(best_f)
        g = -lam * (v * v) / mu
        gmax = np.abs(g).max()
        if gmax == 0.0:
            break
        mu = mu * np.exp(-(step_c / np.sqrt(t)) * (g / gmax))
        mu = np.maximum(mu / mu.sum(), _MU_FLOOR)
        mu /= mu.sum()
    iterations = len(history)
    window = min(50, iterations - 1) if iterations > 1 else 0
    converged = bool(window and history[-1 - window] - history[-1]
                     <= tol * max(history[-1], 1e-30))
    # exact-at-tolerance re-evaluation of the candidates
    achieved = spectral_norm(_scaled_op(B, best_mu, col_live), tol=1e-11,
                             max_iter=20000, rng=rng)
    final = spectral_norm(_scaled_op(B, mu, col_live), tol=1e-11,
                          max_iter=20000, rng=rng)
    if final < achieved:
        achieved, best_mu = final, mu.copy()
    if m <= 12:
        lower = inf_to_2_norm_exact(B)
    else:
        lower = inf_to_2_norm_lower(B, trials=8, rng=rng)
    if achieved < lower * (1.0 - 1e-8) - 1e-12:
        raise VerificationError(
            f"left factorization inequality violated: {achieved} < {lower}")
    return PietschWeights(best_mu, float(achieved), converged, iterations,
                          tuple(history))


def gp_submatrix(B, delta, weights=None, **gp_kwargs):
    """Columns J = {j : mu_j <= 1/(delta m)} plus the certified bounds.

    Both guarantees are algebraic consequences of sum(mu) = 1 and are
    asserted on every call: |J| >= (1-delta)m by pigeonhole, and
    ||B_J|| sqrt(delta m) <= achieved_norm.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("need 0 < delta < 1")
    B = np.asarray(B, dtype=float)
    m = B.shape[1]
    w = weights if weights is not None else gp_weights(B, **gp_kwargs)
    threshold = 1.0 / (delta * m)
    J = np.flatnonzero(w.mu <= threshold)
    if J.size < (1.0 - delta) * m - 1e-9:
        raise VerificationError("pigeonhole cardinality bound failed")
    if J.size:
        sub_norm = float(np.linalg.svd(B[:, J], compute_uv=False)[0])
    else:
        sub_norm = 0.0
    lhs = sub_norm * np.sqrt(delta * m)
    ok = lhs <= w.achieved_norm * (1.0 + 1e-8) + 1e-12
    cert = GPCertificate(m=m, delta=delta, threshold=threshold,
                         n_selected=int(J.size), size_bound=(1.0 - delta) * m,
                         submatrix_norm=sub_norm, norm_lhs=float(lhs),
                         achieved_norm=w.achieved_norm, ok=bool(ok))
    if not ok:
        raise VerificationError(
            f"submatrix certificate failed: {lhs} > {w.achieved_norm}")
    return J, cert
