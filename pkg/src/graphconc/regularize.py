"""Degree regularization schemes and normalized Laplacians.

All subgraph schemes map a SparseGraph to a new SparseGraph on the same
n vertices (removal zeroes rows/columns, it never reindexes) and are
entrywise dominated by the input.  The tau-shift is the one scheme that
adds mass: A_tau = A + (tau/n)11^T, kept lazy in ``ShiftedGraph``
because it is dense.  The shift includes the diagonal, so the shifted
degree vector is exactly degrees(g) + tau.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ZeroDegree
from .models import SparseGraph, expected_adjacency
from .operators import LinearOp

SCHEMES = ("identity", "remove", "trim", "reweight", "tau")


def degrees(g):
    """Weighted degree vector (out-degrees for directed graphs)."""
    return g.degrees()


def average_degree(g):
    return float(g.degrees().mean()) if g.n else 0.0


def high_degree_set(g, cap):
    """Vertices with weighted degree strictly above the cap."""
    if cap <= 0:
        raise ValueError("cap must be positive")
    return np.flatnonzero(g.degrees() > cap)


def remove_vertices(g, S):
    """Drop every edge incident to a vertex in S (rows/cols zeroed)."""
    S = np.asarray(S, dtype=np.int64)
    drop = np.zeros(g.n, dtype=bool)
    drop[S] = True
    keep = ~(drop[g.i] | drop[g.j])
    return g.with_entries(g.i[keep], g.j[keep], g.w[keep])


def trim_edges(g, cap):
    """Remove just enough edges to force every degree <= cap.

    Policy (the choice of edges is otherwise arbitrary): process
    vertices in decreasing degree order, ties broken toward the lower
    index; for an over-cap vertex, repeatedly delete the incident edge
    whose opposite endpoint currently has the highest degree, ties
    broken toward the higher index, until the vertex meets the cap.
    Only edges incident to originally over-cap vertices are ever
    touched, since degrees never increase.
    """
    if cap <= 0:
        raise ValueError("cap must be positive")
    if g.directed:
        raise ValueError("trim_edges expects an undirected graph")
    if g.nnz and np.any(g.w != 1.0):
        raise ValueError("trim_edges expects an unweighted graph")
    deg = g.degrees()
    if not g.nnz or deg.max() <= cap:
        return g
    nbr = [set() for _ in range(g.n)]
    for a, b in zip(g.i, g.j):
        nbr[a].add(int(b))
        nbr[b].add(int(a))
    while True:
        u = int(np.argmax(deg))  # first maximum = lowest index on ties
        if deg[u] <= cap:
            break
        while deg[u] > cap:
            v = max(nbr[u], key=lambda x: (deg[x], x))
            nbr[u].remove(v)
            nbr[v].remove(u)
            deg[u] -= 1.0
            deg[v] -= 1.0
    ii, jj = [], []
    for a in range(g.n):
        for b in nbr[a]:
            if a < b:
                ii.append(a)
                jj.append(b)
    ii = np.array(ii, dtype=np.int64)
    jj = np.array(jj, dtype=np.int64)
    return SparseGraph(g.n, ii, jj, np.ones(ii.size), directed=False)


def proportional_reweight(g, cap):
    """Scale entry (i, j) by sqrt(lambda_i lambda_j), lambda_i = min(cap/d_i, 1).

    Zero-degree vertices get lambda_i = 1 (vacuous).  For 0/1 inputs
    this pins the squared l2 mass of every row at or below cap:
    sum_j (w'_ij)^2 = lambda_i sum_j lambda_j A_ij <= lambda_i d_i <= cap.
    """
    if cap <= 0:
        raise ValueError("cap must be positive")
    if g.nnz and np.any(g.w != 1.0):
        raise ValueError("proportional_reweight expects an unweighted graph")
    deg = g.degrees()
    lam = np.ones(g.n)
    pos = deg > 0
    lam[pos] = np.minimum(cap / deg[pos], 1.0)
    scale = np.sqrt(lam[g.i] * lam[g.j])
    return g.with_entries(g.i, g.j, g.w * scale)


@dataclass(frozen=True)
class ShiftedGraph:
    """Lazy A_tau = A + (tau/n) 11^T (diagonal entries equal tau/n)."""

    base: SparseGraph
    tau: float

    def __post_init__(self):
        if self.tau < 0:
            raise ValueError("tau must be nonnegative")

    @property
    def n(self):
        return self.base.n

    def degrees(self):
        return self.base.degrees() + self.tau


def tau_shift(g, tau):
    return ShiftedGraph(g, float(tau))


def adjacency_shifted_op(x):
    """A_tau as a LinearOp (or plain adjacency for an unshifted graph)."""
    if isinstance(x, ShiftedGraph):
        g, tau = x.base, x.tau
    else:
        g, tau = x, 0.0
    A = g.to_csr()
    c = tau / g.n

    def mv(v):
        return A @ v + c * v.sum()

    return LinearOp(g.n, g.n, mv, mv, symmetric=not g.directed)


def laplacian(x):
    """Normalized Laplacian L = I - D^{-1/2} A D^{-1/2} as a LinearOp.

    Accepts a SparseGraph or a ShiftedGraph (where A means A_tau and
    D the shifted degrees).  Zero degrees are refused -- the cure for
    isolated vertices is the tau shift, so the caller is sent there.
    D^{1/2} 1 is an exact kernel vector of the result.
    """
    if isinstance(x, ShiftedGraph):
        g, tau = x.base, x.tau
    else:
        g, tau = x, 0.0
    d = g.degrees() + tau
    if d.size == 0 or d.min() <= 0.0:
        bad = int(np.argmin(d)) if d.size else 0
        raise ZeroDegree(f"vertex {bad} has zero shifted degree; regularize first")
    A = g.to_csr()
    inv_sqrt = 1.0 / np.sqrt(d)
    c = tau / g.n

    def mv(v):
        y = inv_sqrt * v
        z = A @ y + c * y.sum()
        return v - inv_sqrt * z

    return LinearOp(g.n, g.n, mv, mv, symmetric=True)


def expected_laplacian(model, tau):
    """L(EA_tau) built on the structured expected adjacency, matrix-free."""
    dbar = model.expected_degrees() + tau
    if dbar.size == 0 or dbar.min() <= 0.0:
        raise ZeroDegree("expected shifted degrees must be positive")
    ea = expected_adjacency(model)
    inv_sqrt = 1.0 / np.sqrt(dbar)
    c = tau / model.n

    def mv(v):
        y = inv_sqrt * v
        z = ea.matvec(y) + c * y.sum()
        return v - inv_sqrt * z

    return LinearOp(model.n, model.n, mv, mv, symmetric=True)


def apply_scheme(g, scheme, cap=None, tau=None):
    """Dispatch a scheme by name; 'tau' returns a ShiftedGraph."""
    if scheme == "identity":
        return g
    if scheme == "tau":
        if tau is None:
            raise ValueError("scheme 'tau' needs tau")
        return tau_shift(g, tau)
    if cap is None:
        raise ValueError(f"scheme {scheme!r} needs a degree cap")
    if scheme == "remove":
        return remove_vertices(g, high_degree_set(g, cap))
    if scheme == "trim":
        return trim_edges(g, cap)
    if scheme == "reweight":
        return proportional_reweight(g, cap)
    raise ValueError(f"unknown scheme {scheme!r}; options: {SCHEMES}")
