"""Inhomogeneous Erdos-Renyi models and the seeded edge sampler.

A model is a symmetric matrix of connection probabilities (p_ij); the
diagonal is always treated as zero (no self-loops anywhere).  Two
sparsity scales are exposed and every experiment states which one it
uses:

* ``max_rate(model)``            -- d     = max_ij n * p_ij,
* ``max_expected_degree(model)`` -- d_ave = max_i sum_{j != i} p_ij.

Sampling contract
-----------------
The uniform variate deciding pair (i, j), j > i, is position j of the
Philox stream keyed by ``(master_seed, stream_index, row=i)``; see
``_seeding``.  Edge {i, j} is present iff u < p_ij.  The draw for a pair
never depends on the order rows are visited, so sampling is trivially
parallel across rows and bit-for-bit reproducible across platforms.
Directed sampling uses the same per-row streams over all positions
j != i, so the j > i half of a directed sample coincides with the
undirected sample at the same seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ._seeding import row_uniforms
from .errors import InvalidModel, InvalidRates
from .operators import LinearOp

EXPLICIT_N_LIMIT = 4096  # guard rail: Explicit stores a dense matrix


class SparseGraph:
    """Weighted graph stored as entry arrays (i, j, w), weights in (0, 1].

    Undirected graphs store each edge once with i < j; ``to_csr`` and
    ``degrees`` account for both orientations.  Self-loops are not
    representable.
    """

    def __init__(self, n, i, j, w, directed=False, _checked=False):
        self.n = int(n)
        self.directed = bool(directed)
        i = np.asarray(i, dtype=np.int64)
        j = np.asarray(j, dtype=np.int64)
        w = np.asarray(w, dtype=np.float64)
        if not _checked:
            if not (i.shape == j.shape == w.shape) or i.ndim != 1:
                raise InvalidModel("entry arrays must be 1-d and equally long")
            if i.size:
                if i.min() < 0 or j.min() < 0 or i.max() >= n or j.max() >= n:
                    raise InvalidModel("vertex index out of range")
                if np.any(i == j):
                    raise InvalidModel("self-loops are not allowed")
                if w.min() <= 0.0 or w.max() > 1.0 + 1e-12:
                    raise InvalidModel("weights must lie in (0, 1]")
                if not self.directed:
                    i, j = np.minimum(i, j), np.maximum(i, j)
                code = i * n + j
                if np.unique(code).size != code.size:
                    raise InvalidModel("duplicate entries")
                order = np.argsort(code, kind="stable")
                i, j, w = i[order], j[order], w[order]
        for a in (i, j, w):
            a.setflags(write=False)
        self.i, self.j, self.w = i, j, w

    @property
    def nnz(self):
        return self.i.size

    def degrees(self):
        """Weighted degree vector (both endpoints for undirected edges)."""
        deg = np.bincount(self.i, weights=self.w, minlength=self.n).astype(float)
        if self.directed:
            return deg  # out-degrees
        deg += np.bincount(self.j, weights=self.w, minlength=self.n)
        return deg

    def to_csr(self):
        if self.directed:
            return sp.csr_matrix((self.w, (self.i, self.j)), shape=(self.n, self.n))
        ii = np.concatenate([self.i, self.j])
        jj = np.concatenate([self.j, self.i])
        ww = np.concatenate([self.w, self.w])
        return sp.csr_matrix((ww, (ii, jj)), shape=(self.n, self.n))

    def to_dense(self):
        return self.to_csr().toarray()

    def with_entries(self, i, j, w):
        """Same n and directedness, new entry arrays (re-validated)."""
        return SparseGraph(self.n, i, j, w, directed=self.directed)

    @classmethod
    def from_dense(cls, M, directed=False, tol=0.0):
        M = np.asarray(M, dtype=float)
        n = M.shape[0]
        if directed:
            i, j = np.nonzero(np.abs(M) > tol)
            keep = i != j
            i, j = i[keep], j[keep]
        else:
            i, j = np.nonzero(np.triu(np.abs(M) > tol, k=1))
        return cls(n, i, j, M[i, j], directed=directed)

    def __eq__(self, other):
        if not isinstance(other, SparseGraph):
            return NotImplemented
        return (self.n == other.n and self.directed == other.directed
                and np.array_equal(self.i, other.i)
                and np.array_equal(self.j, other.j)
                and np.array_equal(self.w, other.w))

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        return f"SparseGraph(n={self.n}, nnz={self.nnz}, {kind})"


# ---------------------------------------------------------------------------
# models


@dataclass(frozen=True)
class Uniform:
    """G(n, p): every pair connected independently with probability p."""

    n: int
    p: float

    def __post_init__(self):
        if self.n < 1:
            raise InvalidModel("n must be positive")
        if not 0.0 <= self.p <= 1.0:
            raise InvalidModel("p must lie in [0, 1]")

    def row_probabilities(self, i, lo, hi):
        return np.full(hi - lo, self.p)

    def expected_degrees(self):
        return np.full(self.n, (self.n - 1) * self.p)


@dataclass(frozen=True)
class RankOne:
    """Degree-profile model: p_ij = min(theta_i * theta_j, 1), theta >= 0."""

    n: int
    theta: tuple

    def __post_init__(self):
        th = np.asarray(self.theta, dtype=float)
        if th.shape != (self.n,):
            raise InvalidModel("theta must have length n")
        if th.size and (th.min() < 0.0 or not np.all(np.isfinite(th))):
            raise InvalidModel("theta must be finite and nonnegative")
        object.__setattr__(self, "theta", tuple(float(t) for t in th))

    def _th(self):
        return np.asarray(self.theta)

    def row_probabilities(self, i, lo, hi):
        th = self._th()
        return np.minimum(th[i] * th[lo:hi], 1.0)

    def expected_degrees(self):
        # sum_{j != i} min(theta_i theta_j, 1) via sorted prefix sums:
        # partners with theta_j > 1/theta_i are clipped to 1.
        th = self._th()
        th_s = np.sort(th)
        pref = np.concatenate([[0.0], np.cumsum(th_s)])
        with np.errstate(divide="ignore"):
            thresh = np.where(th > 0, 1.0 / np.where(th > 0, th, 1.0), np.inf)
        idx = np.searchsorted(th_s, thresh, side="right")
        total = th * pref[idx] + (self.n - idx)
        return total - np.minimum(th * th, 1.0)


@dataclass(frozen=True)
class BlockTwo:
    """Two equal blocks; p = a/n within blocks, b/n across, 0 <= b <= a.

    Vertices 0 .. n/2-1 form block 0, the rest block 1.
    """

    n: int
    a: float
    b: float

    def __post_init__(self):
        if self.n < 2 or self.n % 2:
            raise InvalidRates("n must be even and >= 2")
        if not 0.0 <= self.b <= self.a <= self.n:
            raise InvalidRates("need 0 <= b <= a <= n")

    @property
    def half(self):
        return self.n // 2

    def labels(self):
        """Ground-truth community labels: +1 on block 0, -1 on block 1."""
        return np.where(np.arange(self.n) < self.half, 1, -1)

    def row_probabilities(self, i, lo, hi):
        same = (np.arange(lo, hi) < self.half) == (i < self.half)
        return np.where(same, self.a / self.n, self.b / self.n)

    def expected_degrees(self):
        d = (self.half - 1) * self.a / self.n + self.half * self.b / self.n
        return np.full(self.n, d)


@dataclass(frozen=True)
class Explicit:
    """Arbitrary symmetric probability matrix; diagonal ignored; n <= 4096."""

    P: np.ndarray

    def __post_init__(self):
        P = np.array(self.P, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise InvalidModel("P must be square")
        if P.shape[0] > EXPLICIT_N_LIMIT:
            raise InvalidModel(f"Explicit models are capped at n = {EXPLICIT_N_LIMIT}")
        if P.size and np.abs(P - P.T).max() > 1e-12:
            raise InvalidModel("P must be symmetric")
        np.fill_diagonal(P, 0.0)
        if P.size and (P.min() < 0.0 or P.max() > 1.0):
            raise InvalidModel("probabilities must lie in [0, 1]")
        P.setflags(write=False)
        object.__setattr__(self, "P", P)

    @property
    def n(self):
        return self.P.shape[0]

    def row_probabilities(self, i, lo, hi):
        return self.P[i, lo:hi]

    def expected_degrees(self):
        return self.P.sum(axis=1)


def degree_profile(n, values, fractions):
    """RankOne model whose expected degrees are (almost) the given values.

    theta_i = e_i / sqrt(sum_j e_j) makes E[deg_i] = e_i up to the
    self-loop exclusion.  Low indices get the first listed value:
    fractions (f_1, ..., f_k) allocate the first round(f_1 * n) vertices
    to values[0], the next block to values[1], and so on.
    """
    values = [float(v) for v in values]
    fractions = [float(f) for f in fractions]
    if len(values) != len(fractions) or abs(sum(fractions) - 1.0) > 1e-9:
        raise InvalidModel("fractions must match values and sum to 1")
    e = np.empty(n)
    start = 0
    for v, f in zip(values, fractions):
        stop = min(n, start + int(round(f * n)))
        e[start:stop] = v
        start = stop
    e[start:] = values[-1]
    theta = e / np.sqrt(e.sum())
    return RankOne(n, tuple(theta))


# ---------------------------------------------------------------------------
# model-level quantities


def max_rate(model):
    """d = max_ij n * p_ij over off-diagonal pairs."""
    n = model.n
    if isinstance(model, Uniform):
        return n * model.p
    if isinstance(model, RankOne):
        if n < 2:
            return 0.0
        top2 = np.partition(model._th(), n - 2)[-2:]
        return n * min(top2[0] * top2[1], 1.0)
    if isinstance(model, BlockTwo):
        return float(model.a) if n >= 4 else float(model.b)
    if isinstance(model, Explicit):
        return n * model.P.max() if n >= 2 else 0.0
    raise TypeError(f"unknown model {type(model).__name__}")


def max_expected_degree(model):
    """d_ave = max_i sum_{j != i} p_ij."""
    deg = model.expected_degrees()
    return float(deg.max()) if deg.size else 0.0


def expected_adjacency(model):
    """EA as a symmetric matrix-free operator (diagonal zeroed).

    Structured kinds never materialize a dense matrix: Uniform and
    RankOne are rank-one up to diagonal (and clipping) corrections,
    BlockTwo is block-constant.
    """
    n = model.n
    if isinstance(model, Uniform):
        p = model.p

        def mv(x):
            return p * (x.sum() - x)

        return LinearOp(n, n, mv, mv, symmetric=True)
    if isinstance(model, RankOne):
        th = model._th()
        order = np.argsort(th)
        th_s = th[order]
        with np.errstate(divide="ignore"):
            thresh = np.where(th > 0, 1.0 / np.where(th > 0, th, 1.0), np.inf)
        idx = np.searchsorted(th_s, thresh, side="right")  # clip partners: sorted pos >= idx
        diag = np.minimum(th * th, 1.0)

        def mv(x):
            xs = x[order]
            txs = th_s * xs
            # suffix sums over the sorted order for the clipped partners
            suff_tx = np.concatenate([np.cumsum(txs[::-1])[::-1], [0.0]])
            suff_x = np.concatenate([np.cumsum(xs[::-1])[::-1], [0.0]])
            full = th * (th @ x)
            clip_corr = th * suff_tx[idx] - suff_x[idx]  # sum (th_i th_j - 1) x_j over clipped j
            return full - clip_corr - diag * x

        return LinearOp(n, n, mv, mv, symmetric=True)
    if isinstance(model, BlockTwo):
        h, a, b = model.half, model.a / model.n, model.b / model.n

        def mv(x):
            s0, s1 = x[:h].sum(), x[h:].sum()
            out = np.empty(n)
            out[:h] = a * s0 + b * s1
            out[h:] = b * s0 + a * s1
            return out - a * x

        return LinearOp(n, n, mv, mv, symmetric=True)
    if isinstance(model, Explicit):
        return LinearOp.from_dense(model.P, symmetric=True)
    raise TypeError(f"unknown model {type(model).__name__}")


def expected_dense(model):
    """EA as a dense array; intended for tests and desk-scale checks."""
    if isinstance(model, Explicit):
        return model.P.copy()
    n = model.n
    out = np.empty((n, n))
    for i in range(n):
        out[i, :] = model.row_probabilities(i, 0, n)
    np.fill_diagonal(out, 0.0)
    return out


# ---------------------------------------------------------------------------
# sampling


def sample(model, master_seed, stream_index=0):
    """Draw one undirected graph from the model under the seeding contract.

    Row i consumes stream positions j > i of its keyed Philox stream;
    edge {i, j} is present iff the position-j uniform is < p_ij.
    """
    return _sample(model, master_seed, stream_index, directed=False)


def sample_directed(model, master_seed, stream_index=0):
    """Directed sample: every ordered pair (i, j), i != j, independent."""
    return _sample(model, master_seed, stream_index, directed=True)


def _sample(model, master_seed, stream_index, directed):
    n = model.n
    rows, cols = [], []
    for i in range(n):
        if directed:
            u = row_uniforms(master_seed, stream_index, i, 0, n)
            p = np.asarray(model.row_probabilities(i, 0, n), dtype=float)
            hit = np.flatnonzero(u < p)
            hit = hit[hit != i]
        else:
            if i + 1 >= n:
                break
            u = row_uniforms(master_seed, stream_index, i, i + 1, n)
            p = np.asarray(model.row_probabilities(i, i + 1, n), dtype=float)
            hit = np.flatnonzero(u < p) + (i + 1)
        if hit.size:
            rows.append(np.full(hit.size, i, dtype=np.int64))
            cols.append(hit.astype(np.int64))
    if rows:
        i_idx = np.concatenate(rows)
        j_idx = np.concatenate(cols)
    else:
        i_idx = np.empty(0, dtype=np.int64)
        j_idx = np.empty(0, dtype=np.int64)
    w = np.ones(i_idx.size)
    return SparseGraph(n, i_idx, j_idx, w, directed=directed, _checked=True)


# ---------------------------------------------------------------------------
# file formats


def save_graph(g, path):
    """JSON header line {"n","directed","weighted"} then CSV lines i,j,w."""
    weighted = bool(g.nnz and np.any(g.w != 1.0))
    with open(path, "w") as fh:
        fh.write(json.dumps({"n": g.n, "directed": g.directed,
                             "weighted": weighted}) + "\n")
        for a, b, w in zip(g.i, g.j, g.w):
            fh.write(f"{a},{b},{float(w)!r}\n")


def load_graph(path):
    with open(path) as fh:
        header = json.loads(fh.readline())
        ii, jj, ww = [], [], []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            a, b, w = line.split(",")
            ii.append(int(a))
            jj.append(int(b))
            ww.append(float(w))
    return SparseGraph(header["n"], np.array(ii, dtype=np.int64),
                       np.array(jj, dtype=np.int64), np.array(ww, dtype=float),
                       directed=header["directed"])


def model_to_dict(model):
    if isinstance(model, Uniform):
        return {"kind": "uniform", "n": model.n, "p": model.p}
    if isinstance(model, RankOne):
        return {"kind": "rankone", "n": model.n, "theta": list(model.theta)}
    if isinstance(model, BlockTwo):
        return {"kind": "blocktwo", "n": model.n, "a": model.a, "b": model.b}
    if isinstance(model, Explicit):
        return {"kind": "explicit", "P": model.P.tolist()}
    raise TypeError(f"unknown model {type(model).__name__}")


def model_from_dict(spec):
    kind = spec.get("kind")
    if kind == "uniform":
        return Uniform(int(spec["n"]), float(spec["p"]))
    if kind == "rankone":
        return RankOne(int(spec["n"]), tuple(float(t) for t in spec["theta"]))
    if kind == "blocktwo":
        return BlockTwo(int(spec["n"]), float(spec["a"]), float(spec["b"]))
    if kind == "explicit":
        return Explicit(np.asarray(spec["P"], dtype=float))
    if kind == "profile":
        return degree_profile(int(spec["n"]), spec["values"], spec["fractions"])
    raise InvalidModel(f"unknown model kind {kind!r}")
