"""Systematic form: the first k nodes store the data symbols verbatim.

The first k nodes in rack-major order are the systematic nodes: racks
0..kbar-1 in full plus the first u0 nodes of rack kbar. Their k columns
cannot all be free, because the symmetric block M1 removes
kbar*(kbar-1)/2 degrees of freedom from a stripe; exactly that many cells
are designated redundant:

    rows e+1 .. kbar-1 of column (e, u-1),  for e in 0 .. kbar-2.

Data placement (load-bearing convention): the B data symbols run
column-major through the systematic columns, node (0,0) rows 0..dbar-1
first, then (0,1) and so on, skipping the redundant cells.

``systematic_message_matrix`` finds the unique message matrix consistent
with such a placement:

1. Within racks 0..kbar-1, every row that avoids the redundant cells is
   fully known, so its local polynomial and hence its leading coefficient
   follows by interpolation.
2. The leading coefficients satisfy H = M1 * Phi with Phi the moment matrix
   of the rack points x_e = xi**(e*u). The bottom dbar-kbar rows of M1 hold
   the transposed rectangle block next to zeros, so each bottom row of H
   yields that block row via a kbar-point Vandermonde solve.
3. The top kbar rows are recovered one at a time: row r of H is known at
   racks e >= r; moving the already-known terms (symmetric entries from
   earlier rows plus the rectangle block) to the right leaves a square
   system in the unknown tail of row r of the symmetric core.
4. With M1 complete, each redundant cell follows the same local step a
   repair uses: leading coefficient plus u-1 known in-rack values pin the
   local polynomial down.
5. The completed k columns feed the ordinary any-k decoder.

Every step is linear, so data -> message matrix is an invertible linear map;
``precoding_matrix`` materializes it by probing with unit vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .encode import encode
from .layout import (
    CodeMatrix,
    CodeParams,
    NodeId,
    all_nodes,
    evaluation_point,
    unfill_message_matrix,
)
from .linalg import BatchInterpolator, addops, solve_linear, vandermonde_solve
from .reconstruct import ObservedColumn, reconstruct
from .repair import LeadingVector, rack_point, repair_local

__all__ = [
    "SystematicLayout",
    "systematic_nodes",
    "systematic_layout",
    "read_systematic_data",
    "systematic_message_matrix",
    "systematic_encode",
    "precoding_matrix",
]


@dataclass(frozen=True)
class SystematicLayout:
    """Cell map of the systematic columns: where data lives and what is derived."""

    data_positions: tuple  # ((row, NodeId), ...), length B, placement order
    redundant_positions: tuple  # ((row, NodeId), ...), kbar*(kbar-1)/2 cells


def systematic_nodes(p: CodeParams) -> list:
    """The first k nodes in rack-major order."""
    return [node for _, node in zip(range(p.k), all_nodes(p))]


def systematic_layout(p: CodeParams) -> SystematicLayout:
    got = p._cache.get("systematic_layout")
    if got is None:
        redundant = set()
        for e in range(p.kbar - 1):
            for i in range(e + 1, p.kbar):
                redundant.add((i, NodeId(e, p.u - 1)))
        data = []
        for node in systematic_nodes(p):
            for i in range(p.dbar):
                if (i, node) not in redundant:
                    data.append((i, node))
        if len(data) != p.B:  # counting identity; cannot fail for valid params
            raise AssertionError(f"{len(data)} data cells, expected B={p.B}")
        got = p._cache.setdefault(
            "systematic_layout",
            SystematicLayout(tuple(data), tuple(sorted(redundant))),
        )
    return got


def read_systematic_data(p: CodeParams, columns: Mapping[NodeId, Sequence[int]]) -> list:
    """Data symbols straight out of the systematic columns, placement order."""
    lay = systematic_layout(p)
    out = []
    for i, node in lay.data_positions:
        col = columns.get(node)
        if col is None:
            raise ValueError(f"systematic node {node!r} missing from the column map")
        out.append(col[i])
    return out


def systematic_message_matrix(p: CodeParams, data: Sequence[int]):
    """The unique message matrix whose encoding stores ``data`` verbatim."""
    if len(data) != p.B:
        raise ValueError(f"expected {p.B} data symbols, got {len(data)}")
    q = p.field.q
    for v in data:
        if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < q:
            raise ValueError(f"data symbol {v!r} is not an element of {p.field!r}")
    f = p.field
    add, sub, _ = addops(f)
    exp, log = f.exp, f.log
    lay = systematic_layout(p)
    grid = dict(zip(lay.data_positions, data))

    # Leading local coefficients of every fully known row per full rack.
    known_lead = {}
    for e in range(p.kbar):
        pts = [evaluation_point(p, NodeId(e, g)) for g in range(p.u)]
        interp = BatchInterpolator(f, pts)
        for i in [*range(0, e + 1), *range(p.kbar, p.dbar)]:
            vals = [grid[(i, NodeId(e, g))] for g in range(p.u)]
            known_lead[(i, e)] = interp.leading_coefficient(vals)

    xpts = [rack_point(p, e) for e in range(p.kbar)]

    # Rectangle block of the symmetric core, one bottom row of H at a time.
    T = [[0] * (p.dbar - p.kbar) for _ in range(p.kbar)]
    for i in range(p.kbar, p.dbar):
        c = vandermonde_solve(f, xpts, [known_lead[(i, e)] for e in range(p.kbar)])
        for t in range(p.kbar):
            T[t][i - p.kbar] = c[t]

    # Square block of the core, top rows of H, one row at a time.
    S = [[0] * p.kbar for _ in range(p.kbar)]
    for r in range(p.kbar):
        rhs = []
        for e in range(r, p.kbar):
            v = known_lead[(r, e)]
            x = xpts[e]
            for t in range(r):
                w = S[t][r]
                if w:
                    v = sub(v, f.mul(w, f.pow(x, t)))
            for t in range(p.kbar, p.dbar):
                w = T[r][t - p.kbar]
                if w:
                    v = sub(v, f.mul(w, f.pow(x, t)))
            rhs.append(v)
        A = [
            [f.pow(xpts[e], t) for t in range(r, p.kbar)]
            for e in range(r, p.kbar)
        ]
        sol = solve_linear(f, A, rhs)
        for off, t in enumerate(range(r, p.kbar)):
            S[r][t] = sol[off]
            S[t][r] = sol[off]

    m1 = [[0] * p.dbar for _ in range(p.dbar)]
    for i in range(p.dbar):
        for t in range(p.dbar):
            if i < p.kbar and t < p.kbar:
                m1[i][t] = S[i][t]
            elif i < p.kbar <= t:
                m1[i][t] = T[i][t - p.kbar]
            elif t < p.kbar <= i:
                m1[i][t] = T[t][i - p.kbar]

    # Redundant cells: same local finish a repair performs, using the
    # leading vector h_e = M1 * phi_e of each affected rack.
    redundant = set(lay.redundant_positions)
    for e in range(p.kbar - 1):
        x = xpts[e]
        h = []
        for i in range(p.dbar):
            acc = 0
            row = m1[i]
            for t in range(p.dbar):
                w = row[t]
                if w:
                    acc = add(acc, f.mul(w, f.pow(x, t)))
            h.append(acc)
        surviving = [
            ObservedColumn(
                NodeId(e, g), tuple(grid[(i, NodeId(e, g))] for i in range(p.dbar))
            )
            for g in range(p.u - 1)
        ]
        col = repair_local(p, e, p.u - 1, surviving, LeadingVector(e, tuple(h)))
        for i in range(p.dbar):
            cell = (i, NodeId(e, p.u - 1))
            if cell in redundant:
                grid[cell] = col[i]
            elif grid[cell] != col[i]:  # construction identity; never trips
                raise AssertionError(f"systematic completion mismatch at {cell}")

    cols = [
        ObservedColumn(node, tuple(grid[(i, node)] for i in range(p.dbar)))
        for node in systematic_nodes(p)
    ]
    return reconstruct(p, cols)


def systematic_encode(p: CodeParams, data: Sequence[int]) -> CodeMatrix:
    """Encode so the first k node columns carry ``data`` uncoded."""
    return encode(systematic_message_matrix(p, data))


def precoding_matrix(p: CodeParams) -> list:
    """B x B matrix mapping placement-order data to fill-order matrix slots.

    Column j is the slot vector of the message matrix produced by the unit
    data vector e_j. The map is invertible; filling a message matrix with
    the product of this matrix and a data vector is the fast equivalent of
    ``systematic_message_matrix``.
    """
    got = p._cache.get("precoding_matrix")
    if got is None:
        cols = []
        for jj in range(p.B):
            unit = [0] * p.B
            unit[jj] = 1
            cols.append(unfill_message_matrix(systematic_message_matrix(p, unit)))
        rows = [[cols[jj][r] for jj in range(p.B)] for r in range(p.B)]
        got = p._cache.setdefault("precoding_matrix", rows)
    return got
