"""Encoder: message matrix in, per-node stored columns out.

Node (e, g) stores the dbar values f_i(lambda(e, g)), one per message-matrix
row polynomial f_i. The whole code matrix is the product of the message
matrix with a fixed evaluation-power matrix; ``node_column`` produces a
single column by Horner evaluation instead, so streaming callers never
materialize the power matrix. Both routes agree exactly.
"""

from __future__ import annotations

from .layout import (
    CodeMatrix,
    CodeParams,
    MessageMatrix,
    NodeId,
    evaluation_point,
    evaluation_points,
    index_sets,
)
from .linalg import matmul, poly_eval

__all__ = ["row_polynomial", "encoding_matrix", "encode", "node_column"]


def row_polynomial(M: MessageMatrix, i: int) -> list:
    """Dense coefficient list of row i; degrees outside J are zero."""
    p = M.params
    if not 0 <= i < p.dbar:
        raise ValueError(f"row {i} outside [0, {p.dbar - 1}]")
    j = index_sets(p)[2]
    coeffs = [0] * (j[-1] + 1)
    for pos, deg in enumerate(j):
        coeffs[deg] = M.rows[i][pos]
    return coeffs


def encoding_matrix(p: CodeParams) -> list:
    """len(J) x n matrix of point powers lambda(e, g)**j, cached per params."""
    got = p._cache.get("encoding_matrix")
    if got is None:
        f = p.field
        j = index_sets(p)[2]
        pts = evaluation_points(p)
        rows = [[f.pow(lam, deg) for lam in pts] for deg in j]
        got = p._cache.setdefault("encoding_matrix", rows)
    return got


def encode(M: MessageMatrix) -> CodeMatrix:
    """Evaluate every row polynomial at every node point."""
    p = M.params
    return CodeMatrix(p, matmul(p.field, M.rows, encoding_matrix(p)))


def node_column(M: MessageMatrix, node: NodeId) -> list:
    """The dbar symbols stored by one node, by direct Horner evaluation."""
    p = M.params
    lam = evaluation_point(p, node)
    return [poly_eval(p.field, row_polynomial(M, i), lam) for i in range(p.dbar)]
