"""Code geometry: parameters, node labels, column index sets, evaluation
points, and the message-matrix fill conventions.

A code instance spreads n = nbar * u nodes over nbar racks of u nodes each.
Any k nodes suffice to recover a stripe; writing k = kbar * u + u0 with
0 <= u0 < u, a repair contacts dbar helper racks, kbar <= dbar <= nbar - 1.
Each node stores alpha = dbar symbols per stripe and a stripe carries

    B = k * dbar - kbar * (kbar - 1) / 2

data symbols.

The message matrix M has dbar rows and one column for each degree in the
set J = J1 | J2, kept in ascending degree order:

    J1 = { t*u + u-1 : 0 <= t < dbar }          (one degree per helper rack)
    J2 = [0, k-1] \\ J1

The columns indexed by J1 form the square block M1, which is symmetric with
a zero lower-right (dbar-kbar) x (dbar-kbar) corner. Row i of M, read as
polynomial coefficients, is the row polynomial evaluated at the node points

    lambda(e, g) = xi**e * eta**g

where xi generates the multiplicative group and eta = xi**((q-1)/u) has
order exactly u. Requiring q > n makes all n points distinct.

Fill convention (load-bearing, do not reorder): data symbols are assigned to
matrix cells by walking columns in ascending degree order and rows top-down
inside each column, skipping cells that are structural zeros of M1 and cells
whose value is already forced by M1's symmetry. Exactly B cells receive a
symbol. ``unfill_message_matrix`` walks the same order in reverse and checks
the symmetry and zero constraints as it goes.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterator, NamedTuple, Sequence

from . import gf
from .gf import Field

__all__ = [
    "IntegrityError",
    "NodeId",
    "CodeParams",
    "make_params",
    "index_sets",
    "column_positions",
    "evaluation_points",
    "evaluation_point",
    "node_index",
    "all_nodes",
    "fill_plan",
    "fill_message_matrix",
    "unfill_message_matrix",
    "MessageMatrix",
    "validate_message_matrix",
    "CodeMatrix",
]


class IntegrityError(ValueError):
    """Stored structure violates a required symmetry or zero constraint."""


class NodeId(NamedTuple):
    """Node label: rack index e and in-rack position g."""

    e: int
    g: int


@dataclass(frozen=True, eq=False)
class CodeParams:
    """Validated parameter bundle for one code instance.

    Instances are immutable and compare by identity; derived artifacts
    (index sets, evaluation points, fill plans, the encoding matrix) are
    cached on the instance after first use.
    """

    n: int
    k: int
    u: int
    nbar: int
    kbar: int
    u0: int
    dbar: int
    alpha: int
    beta: int
    B: int
    field: Field
    xi: int
    eta: int
    _cache: dict = dc_field(default_factory=dict, init=False, repr=False)

    def __str__(self):
        return (
            f"(n={self.n}, k={self.k}, u={self.u}, dbar={self.dbar}) over {self.field!r}"
        )


def _auto_field(n: int, u: int) -> Field:
    # Prefer the smallest binary field; fall back to the smallest prime
    # field when none fits (always the case for even u, whose order can
    # never divide the odd group order 2^m - 1).
    if u % 2 == 1:
        for m in range(1, 17):
            q = 1 << m
            if q > n and (q - 1) % u == 0:
                return gf.binary_field(m)
    return gf.prime_field_for(n, u)


def _check_field(field: Field, n: int, u: int) -> None:
    if field.q <= n:
        raise ValueError(
            f"{field!r} has only {field.q} elements; need more than n={n} "
            f"for distinct evaluation points"
        )
    if (field.q - 1) % u:
        raise ValueError(
            f"{field!r} has no element of multiplicative order u={u}: "
            f"{u} does not divide q-1={field.q - 1}"
        )


def make_params(
    n: int,
    k: int,
    u: int,
    dbar: int,
    m: int | None = None,
    field: Field | None = None,
) -> CodeParams:
    """Validate raw code parameters and derive the full bundle.

    ``m`` selects GF(2^m) explicitly; ``field`` supplies a prebuilt field
    object. With neither, the smallest usable field is chosen: GF(2^m) with
    m <= 16 when one exists, otherwise the smallest adequate prime field.
    """
    for name, v in (("n", n), ("k", k), ("u", u), ("dbar", dbar)):
        if not isinstance(v, int) or isinstance(v, bool):
            raise ValueError(f"{name}={v!r} is not an integer")
    if u < 2:
        raise ValueError(f"u={u}: at least two nodes per rack required")
    if n % u:
        raise ValueError(f"rack size u={u} does not divide n={n}")
    nbar = n // u
    if k < u:
        raise ValueError(f"k={k} must be at least the rack size u={u}")
    if k >= n:
        raise ValueError(f"k={k} must be smaller than n={n}")
    kbar, u0 = divmod(k, u)
    if dbar < kbar:
        raise ValueError(f"dbar={dbar} is below the admissible minimum kbar={kbar}")
    if dbar > nbar - 1:
        raise ValueError(
            f"dbar={dbar} exceeds the available helper racks nbar-1={nbar - 1}"
        )
    if field is not None and m is not None:
        raise ValueError("pass either m or field, not both")
    if field is None:
        field = gf.binary_field(m) if m is not None else _auto_field(n, u)
    _check_field(field, n, u)
    B = k * dbar - kbar * (kbar - 1) // 2
    return CodeParams(
        n=n,
        k=k,
        u=u,
        nbar=nbar,
        kbar=kbar,
        u0=u0,
        dbar=dbar,
        alpha=dbar,
        beta=1,
        B=B,
        field=field,
        xi=field.primitive_element(),
        eta=field.element_of_order(u),
    )


def index_sets(p: CodeParams) -> tuple:
    """Column degree sets (J1, J2, J), each ascending."""
    got = p._cache.get("index_sets")
    if got is None:
        j1 = tuple(t * p.u + p.u - 1 for t in range(p.dbar))
        j2 = tuple(j for j in range(p.k) if j % p.u != p.u - 1)
        j = tuple(sorted(set(j1) | set(j2)))
        got = p._cache.setdefault("index_sets", (j1, j2, j))
    return got


def column_positions(p: CodeParams) -> dict:
    """Map from degree j in J to its column position in the message matrix."""
    got = p._cache.get("column_positions")
    if got is None:
        j = index_sets(p)[2]
        got = p._cache.setdefault("column_positions", {v: i for i, v in enumerate(j)})
    return got


def evaluation_points(p: CodeParams) -> tuple:
    """All n node evaluation points, indexed by e * u + g."""
    got = p._cache.get("evaluation_points")
    if got is None:
        f = p.field
        pts = []
        for e in range(p.nbar):
            xe = f.pow(p.xi, e)
            for g in range(p.u):
                pts.append(f.mul(xe, f.pow(p.eta, g)))
        got = p._cache.setdefault("evaluation_points", tuple(pts))
    return got


def node_index(p: CodeParams, node: NodeId) -> int:
    """Flat column index of a node, validating its label."""
    e, g = node
    if not (0 <= e < p.nbar and 0 <= g < p.u):
        raise ValueError(f"node {node!r} outside the {p.nbar} x {p.u} rack grid")
    return e * p.u + g


def all_nodes(p: CodeParams) -> Iterator[NodeId]:
    """All node labels in flat (rack-major) order."""
    for e in range(p.nbar):
        for g in range(p.u):
            yield NodeId(e, g)


def evaluation_point(p: CodeParams, node: NodeId) -> int:
    """Evaluation point lambda(e, g) = xi**e * eta**g of one node."""
    return evaluation_points(p)[node_index(p, node)]


def fill_plan(p: CodeParams) -> tuple:
    """Per-cell data-slot assignment for the message matrix.

    Returns ``(slots, fresh)``, both dbar x len(J) grids. ``slots[i][pos]``
    is the index into the data vector feeding that cell, or None for the
    structural zeros of M1. ``fresh`` marks the cell where each slot is
    assigned for the first time in fill order (columns ascending, rows
    top-down); a non-fresh cell repeats the value of its symmetric partner
    inside M1 and must agree with it.
    """
    got = p._cache.get("fill_plan")
    if got is not None:
        return got
    j1, _, j = index_sets(p)
    j1set = set(j1)
    slots: list = [[None] * len(j) for _ in range(p.dbar)]
    fresh = [[False] * len(j) for _ in range(p.dbar)]
    assigned: dict = {}
    nxt = 0
    for pos, deg in enumerate(j):
        if deg in j1set:
            t = deg // p.u
            for i in range(p.dbar):
                if i >= p.kbar and t >= p.kbar:
                    continue  # zero corner of M1
                if i < t:
                    slots[i][pos] = assigned[(t, i)]
                else:
                    assigned[(i, t)] = nxt
                    slots[i][pos] = nxt
                    fresh[i][pos] = True
                    nxt += 1
        else:
            for i in range(p.dbar):
                slots[i][pos] = nxt
                fresh[i][pos] = True
                nxt += 1
    if nxt != p.B:  # arithmetic identity; cannot fail for validated params
        raise AssertionError(f"fill plan consumed {nxt} slots, expected B={p.B}")
    return p._cache.setdefault("fill_plan", (slots, fresh))


@dataclass
class MessageMatrix:
    """dbar x len(J) data matrix; column order follows ascending degrees J."""

    params: CodeParams
    rows: list

    def entry(self, i: int, j: int) -> int:
        """Entry at row i and degree j (j must belong to J)."""
        pos = column_positions(self.params).get(j)
        if pos is None:
            raise ValueError(f"degree {j} carries no column")
        return self.rows[i][pos]

    def m1(self) -> list:
        """The square symmetric block: columns of degree t*u + u-1."""
        p = self.params
        cp = column_positions(p)
        pos = [cp[t * p.u + p.u - 1] for t in range(p.dbar)]
        return [[row[c] for c in pos] for row in self.rows]


def fill_message_matrix(p: CodeParams, data: Sequence[int]) -> MessageMatrix:
    """Spread B data symbols into a message matrix along the fill order."""
    if len(data) != p.B:
        raise ValueError(f"expected {p.B} data symbols, got {len(data)}")
    q = p.field.q
    for v in data:
        if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < q:
            raise ValueError(f"data symbol {v!r} is not an element of {p.field!r}")
    slots, _ = fill_plan(p)
    rows = [
        [0 if s is None else data[s] for s in slot_row]
        for slot_row in slots
    ]
    return MessageMatrix(p, rows)


def unfill_message_matrix(M: MessageMatrix) -> list:
    """Recover the data vector from a message matrix, verifying structure.

    Walks cells in the same column-major order as the fill so that every
    repeated cell is compared against the first occurrence of its slot.
    """
    p = M.params
    slots, fresh = fill_plan(p)
    cols = len(slots[0])
    if len(M.rows) != p.dbar or any(len(r) != cols for r in M.rows):
        raise ValueError("message matrix has the wrong shape")
    out: list = [None] * p.B
    for pos in range(cols):
        for i in range(p.dbar):
            s = slots[i][pos]
            v = M.rows[i][pos]
            if s is None:
                if v != 0:
                    raise IntegrityError(
                        f"structural zero at row {i}, column {pos} holds {v!r}"
                    )
            elif fresh[i][pos]:
                out[s] = v
            elif v != out[s]:
                raise IntegrityError(
                    f"symmetry violation at row {i}, column {pos}: "
                    f"{v!r} != {out[s]!r}"
                )
    return out


def validate_message_matrix(M: MessageMatrix) -> None:
    """Raise unless shape, symmetry, zero corner and symbol ranges all hold."""
    p = M.params
    j = index_sets(p)[2]
    if len(M.rows) != p.dbar or any(len(r) != len(j) for r in M.rows):
        raise ValueError("message matrix has the wrong shape")
    q = p.field.q
    for row in M.rows:
        for v in row:
            if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < q:
                raise ValueError(f"entry {v!r} is not an element of {p.field!r}")
    m1 = M.m1()
    for i in range(p.dbar):
        for t in range(i + 1, p.dbar):
            if m1[i][t] != m1[t][i]:
                raise IntegrityError(f"M1 is not symmetric at ({i}, {t})")
    for i in range(p.kbar, p.dbar):
        for t in range(p.kbar, p.dbar):
            if m1[i][t] != 0:
                raise IntegrityError(f"M1 zero corner violated at ({i}, {t})")


@dataclass
class CodeMatrix:
    """dbar x n stored-symbol matrix; column e*u + g belongs to node (e, g)."""

    params: CodeParams
    rows: list

    def column(self, node: NodeId) -> list:
        idx = node_index(self.params, node)
        return [row[idx] for row in self.rows]

    def columns(self, ids: Sequence[NodeId] | None = None) -> dict:
        """Columns as a node-keyed mapping (all nodes when ids is None)."""
        if ids is None:
            ids = list(all_nodes(self.params))
        return {node: self.column(node) for node in ids}
