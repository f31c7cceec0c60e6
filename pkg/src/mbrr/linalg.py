"""Polynomial and dense-matrix primitives over a finite field.

Polynomials are coefficient lists indexed by degree; trailing zeros are
allowed, so a list's length is a degree bound rather than the exact degree.
Matrices are row-major lists of lists. Everything here is pure: inputs are
never mutated and results are deterministic.

The work horses are ``BatchInterpolator``, which fixes a set of sample
points once and then interpolates many value vectors against them, and
``solve_linear``, plain Gauss-Jordan elimination with first-nonzero
pivoting.
"""

from __future__ import annotations

import operator
from typing import Sequence

__all__ = [
    "SingularMatrixError",
    "addops",
    "poly_eval",
    "BatchInterpolator",
    "interpolate",
    "vandermonde_solve",
    "solve_linear",
    "matmul",
    "mat_vec",
    "dot",
    "identity",
]


class SingularMatrixError(ValueError):
    """Square system has no unique solution: some column has no nonzero pivot."""


def _identity(a):
    return a


def addops(field):
    """Fast unchecked (add, sub, neg) callables for inner loops.

    Characteristic 2 gets XOR directly; other characteristics get modular
    closures. Operands must already be canonical field elements.
    """
    if field.characteristic == 2:
        return operator.xor, operator.xor, _identity
    p = field.q

    def add(a, b):
        return (a + b) % p

    def sub(a, b):
        return (a - b) % p

    def neg(a):
        return (-a) % p

    return add, sub, neg


def poly_eval(field, coeffs: Sequence[int], x: int) -> int:
    """Evaluate a coefficient list at ``x`` by Horner's rule."""
    if not coeffs:
        return 0
    if x == 0:
        return coeffs[0]
    exp, log = field.exp, field.log
    add, _, _ = addops(field)
    logx = log[x]
    acc = 0
    for c in reversed(coeffs):
        if acc:
            acc = exp[log[acc] + logx]
        if c:
            acc = add(acc, c)
    return acc


class BatchInterpolator:
    """Lagrange interpolation against a fixed set of distinct sample points.

    Construction precomputes the master polynomial prod(x - x_i), each
    per-point numerator (master divided by its linear factor) and the
    matching denominator, all as logarithms. ``interpolate`` then costs
    O(t^2) table lookups per value vector with no per-call setup, which is
    what makes reusing one instance across many stripes cheap.
    """

    __slots__ = ("field", "points", "t", "_lognums", "_scale", "_add", "_qm1")

    def __init__(self, field, points: Sequence[int]):
        t = len(points)
        if t == 0:
            raise ValueError("at least one sample point required")
        if len(set(points)) != t:
            raise ValueError("sample points must be pairwise distinct")
        add, _, neg = addops(field)
        exp, log = field.exp, field.log
        qm1 = field.q - 1

        # Master polynomial prod(x - x_i), built incrementally.
        root = [1]
        for x in points:
            root.insert(0, 0)
            nx = neg(x)
            if nx:
                lnx = log[nx]
                for j in range(len(root) - 1):
                    hi = root[j + 1]
                    if hi:
                        root[j] = add(root[j], exp[lnx + log[hi]])

        lognums = []
        scale = []
        for x in points:
            # Synthetic division of the master polynomial by (x - x_i).
            num = [0] * t
            num[t - 1] = root[t]
            if x:
                lx = log[x]
                for j in range(t - 1, 0, -1):
                    v = root[j]
                    nj = num[j]
                    if nj:
                        v = add(v, exp[lx + log[nj]])
                    num[j - 1] = v
            else:
                for j in range(t - 1, 0, -1):
                    num[j - 1] = root[j]
            d = poly_eval(field, num, x)
            # d is nonzero because the points are distinct.
            scale.append(qm1 - log[d])
            lognums.append([log[c] if c else None for c in num])

        self.field = field
        self.points = tuple(points)
        self.t = t
        self._lognums = lognums
        self._scale = scale
        self._add = add
        self._qm1 = qm1

    def interpolate(self, values: Sequence[int]) -> list:
        """Coefficients of the unique polynomial of degree < t through the points."""
        if len(values) != self.t:
            raise ValueError(f"expected {self.t} values, got {len(values)}")
        exp, log = self.field.exp, self.field.log
        add = self._add
        qm1 = self._qm1
        out = [0] * self.t
        for i, y in enumerate(values):
            if y:
                f = (log[y] + self._scale[i]) % qm1
                for j, ln in enumerate(self._lognums[i]):
                    if ln is not None:
                        out[j] = add(out[j], exp[ln + f])
        return out

    def leading_coefficient(self, values: Sequence[int]) -> int:
        """Degree-(t-1) coefficient of the interpolant, without the other terms.

        The numerators are monic, so the leading coefficient is just the sum
        of values scaled by the inverse denominators.
        """
        if len(values) != self.t:
            raise ValueError(f"expected {self.t} values, got {len(values)}")
        exp, log = self.field.exp, self.field.log
        add = self._add
        acc = 0
        for i, y in enumerate(values):
            if y:
                acc = add(acc, exp[log[y] + self._scale[i]])
        return acc


def interpolate(field, points: Sequence[int], values: Sequence[int]) -> list:
    """One-shot interpolation; see BatchInterpolator for the reusable form."""
    if len(points) != len(values):
        raise ValueError("points and values differ in length")
    return BatchInterpolator(field, points).interpolate(values)


def vandermonde_solve(field, points: Sequence[int], rhs: Sequence[int]) -> list:
    """Solve sum_j c_j * points_i**j = rhs_i for the coefficient vector c.

    This is the same linear system as polynomial interpolation, kept as a
    named solve for callers thinking in vector terms.
    """
    if len(points) != len(rhs):
        raise ValueError("points and right-hand side differ in length")
    return BatchInterpolator(field, points).interpolate(rhs)


def solve_linear(field, A: Sequence[Sequence[int]], b: Sequence[int]) -> list:
    """Solve the square system A x = b by Gauss-Jordan elimination."""
    n = len(A)
    if n == 0:
        raise ValueError("empty system")
    if any(len(row) != n for row in A):
        raise ValueError(f"matrix is not square ({n} rows)")
    if len(b) != n:
        raise ValueError(f"right-hand side has length {len(b)}, expected {n}")
    exp, log = field.exp, field.log
    _, sub, _ = addops(field)
    qm1 = field.q - 1
    aug = [list(A[i]) + [b[i]] for i in range(n)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if aug[r][col]:
                piv = r
                break
        if piv is None:
            raise SingularMatrixError(f"no pivot available in column {col}")
        if piv != col:
            aug[col], aug[piv] = aug[piv], aug[col]
        prow = aug[col]
        scale = qm1 - log[prow[col]]
        for j in range(col, n + 1):
            v = prow[j]
            if v:
                prow[j] = exp[log[v] + scale]
        for r in range(n):
            if r != col:
                f = aug[r][col]
                if f:
                    lf = log[f]
                    rrow = aug[r]
                    for j in range(col, n + 1):
                        v = prow[j]
                        if v:
                            rrow[j] = sub(rrow[j], exp[lf + log[v]])
    return [aug[i][n] for i in range(n)]


def matmul(field, A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> list:
    """Matrix product over the field."""
    if not A or not B:
        raise ValueError("empty operand")
    inner = len(B)
    if any(len(row) != inner for row in A):
        raise ValueError("inner dimensions do not match")
    cols = len(B[0])
    if any(len(row) != cols for row in B):
        raise ValueError("ragged right-hand matrix")
    exp, log = field.exp, field.log
    add, _, _ = addops(field)
    out = [[0] * cols for _ in range(len(A))]
    for i, Ai in enumerate(A):
        Oi = out[i]
        for t in range(inner):
            a = Ai[t]
            if a:
                la = log[a]
                Bt = B[t]
                for j in range(cols):
                    v = Bt[j]
                    if v:
                        Oi[j] = add(Oi[j], exp[la + log[v]])
    return out


def mat_vec(field, A: Sequence[Sequence[int]], x: Sequence[int]) -> list:
    """Matrix-vector product over the field."""
    exp, log = field.exp, field.log
    add, _, _ = addops(field)
    out = []
    for row in A:
        if len(row) != len(x):
            raise ValueError("vector length does not match matrix width")
        acc = 0
        for a, v in zip(row, x):
            if a and v:
                acc = add(acc, exp[log[a] + log[v]])
        out.append(acc)
    return out


def dot(field, xs: Sequence[int], ys: Sequence[int]) -> int:
    """Inner product of two equal-length vectors."""
    if len(xs) != len(ys):
        raise ValueError("vectors differ in length")
    exp, log = field.exp, field.log
    add, _, _ = addops(field)
    acc = 0
    for a, b in zip(xs, ys):
        if a and b:
            acc = add(acc, exp[log[a] + log[b]])
    return acc


def identity(n: int) -> list:
    """n x n identity matrix."""
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]
