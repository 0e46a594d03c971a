"""Matrix-free linear operators.

Everything downstream (norm estimation, Lanczos, the factorization
routines) consumes the small ``LinearOp`` wrapper below, so dense
arrays, scipy sparse matrices and structured closures are
interchangeable.  ``matvec``/``rmatvec`` act on 1-d float vectors.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch


class LinearOp:
    """Linear map given by closures; shape (n_rows, n_cols)."""

    def __init__(self, n_rows, n_cols, matvec, rmatvec=None, symmetric=False):
        if symmetric and n_rows != n_cols:
            raise DimensionMismatch("symmetric operator must be square")
        self.n_rows = int(n_rows)
        self.n_cols = int(n_cols)
        self._matvec = matvec
        self._rmatvec = matvec if (rmatvec is None and symmetric) else rmatvec
        self.symmetric = bool(symmetric)

    @property
    def shape(self):
        return (self.n_rows, self.n_cols)

    def matvec(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_cols,):
            raise DimensionMismatch(f"expected vector of length {self.n_cols}")
        return np.asarray(self._matvec(x), dtype=float)

    def rmatvec(self, x):
        if self._rmatvec is None:
            raise DimensionMismatch("operator has no rmatvec")
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_rows,):
            raise DimensionMismatch(f"expected vector of length {self.n_rows}")
        return np.asarray(self._rmatvec(x), dtype=float)

    @property
    def T(self):
        if self.symmetric:
            return self
        return LinearOp(self.n_cols, self.n_rows, self._rmatvec, self._matvec)

    def to_dense(self):
        """Materialize column by column; meant for tests and small ops."""
        out = np.empty((self.n_rows, self.n_cols))
        e = np.zeros(self.n_cols)
        for k in range(self.n_cols):
            e[k] = 1.0
            out[:, k] = self.matvec(e)
            e[k] = 0.0
        return out

    @classmethod
    def from_dense(cls, M, symmetric=None):
        M = np.asarray(M, dtype=float)
        if symmetric is None:
            symmetric = M.shape[0] == M.shape[1] and np.array_equal(M, M.T)
        return cls(M.shape[0], M.shape[1], lambda x: M @ x, lambda x: M.T @ x,
                   symmetric=symmetric)

    @classmethod
    def from_csr(cls, A, symmetric=False):
        A = sp.csr_matrix(A)
        At = A.T.tocsr()
        return cls(A.shape[0], A.shape[1], lambda x: A @ x, lambda x: At @ x,
                   symmetric=symmetric)


def identity_op(n):
    return LinearOp(n, n, lambda x: x.copy(), symmetric=True)


def adjacency_op(g):
    """Adjacency of a SparseGraph as a LinearOp."""
    return LinearOp.from_csr(g.to_csr(), symmetric=not g.directed)


def op_combine(a, b, alpha=1.0, beta=1.0):
    """alpha * a + beta * b."""
    if a.shape != b.shape:
        raise DimensionMismatch(f"cannot combine shapes {a.shape} and {b.shape}")
    mv = lambda x: alpha * a.matvec(x) + beta * b.matvec(x)
    rmv = lambda x: alpha * a.rmatvec(x) + beta * b.rmatvec(x)
    return LinearOp(a.n_rows, a.n_cols, mv, rmv,
                    symmetric=a.symmetric and b.symmetric)


def compose_difference(a, b):
    """The deviation operator a - b."""
    return op_combine(a, b, 1.0, -1.0)


def op_scale(a, alpha):
    return LinearOp(a.n_rows, a.n_cols, lambda x: alpha * a.matvec(x),
                    lambda x: alpha * a.rmatvec(x), symmetric=a.symmetric)


def gram_op(a):
    """a^T a, symmetric PSD on the column space."""
    return LinearOp(a.n_cols, a.n_cols, lambda x: a.rmatvec(a.matvec(x)),
                    symmetric=True)


def centered_adjacency_op(g, model):
    """A - EA for a sample of the given model."""
    from .models import expected_adjacency

    return compose_difference(adjacency_op(g), expected_adjacency(model))


def tau_shift_op(op, tau):
    """A + (tau/n) 11^T, diagonal included."""
    n = op.n_rows
    if op.n_cols != n:
        raise DimensionMismatch("tau shift needs a square operator")
    c = tau / n

    def mv(x):
        return op.matvec(x) + c * x.sum()

    def rmv(x):
        return op.rmatvec(x) + c * x.sum()

    return LinearOp(n, n, mv, rmv, symmetric=op.symmetric)


def restrict(op, rows=None, cols=None):
    """Zero out the rows outside ``rows`` and columns outside ``cols``.

    Same shape as ``op`` (the masked restriction B_{I x J}, not a
    submatrix).  None means keep-all.
    """
    row_mask = np.zeros(op.n_rows, dtype=bool)
    if rows is None:
        row_mask[:] = True
    else:
        row_mask[np.asarray(rows, dtype=np.int64)] = True
    col_mask = np.zeros(op.n_cols, dtype=bool)
    if cols is None:
        col_mask[:] = True
    else:
        col_mask[np.asarray(cols, dtype=np.int64)] = True

    def mv(x):
        y = op.matvec(np.where(col_mask, x, 0.0))
        y[~row_mask] = 0.0
        return y

    def rmv(x):
        y = op.rmatvec(np.where(row_mask, x, 0.0))
        y[~col_mask] = 0.0
        return y

    sym = op.symmetric and row_mask.shape == col_mask.shape and np.array_equal(row_mask, col_mask)
    return LinearOp(op.n_rows, op.n_cols, mv, rmv, symmetric=sym)


def restrict_edges(op, mask):
    """B_N for a general edge subset N, given as a dense boolean mask.

    Densifies the operator, so this is a desk-scale tool; product-set
    restrictions should use ``restrict``.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != op.shape:
        raise DimensionMismatch("mask shape must match the operator")
    M = op.to_dense() * mask
    return LinearOp.from_dense(M)
