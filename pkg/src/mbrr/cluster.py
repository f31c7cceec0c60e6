"""In-memory rack-aware cluster simulator.

Nodes are arranged in nbar racks of u; each healthy node holds one
alpha-symbol column per stored stripe. The simulator is deterministic and
single-threaded: the same store/fail/repair/read script always produces the
same final state and the same bandwidth ledgers.

Policies (overridable per call):
  reads   any k healthy nodes, lowest node ids first
  repairs the dbar lowest fully healthy racks outside the host rack

A repair moves exactly beta symbols out of each helper rack, so the merged
ledger must show dbar * beta cross-rack symbols per stripe; ``repair_failed``
checks that identity instead of trusting the bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .encode import node_column
from .layout import CodeMatrix, CodeParams, NodeId, all_nodes, node_index, unfill_message_matrix
from .reconstruct import Decoder, ObservedColumn
from .repair import BandwidthLedger, RepairModelError, Repairer
from .systematic import read_systematic_data, systematic_nodes

__all__ = [
    "InsufficientSurvivorsError",
    "OverheadReport",
    "overhead_report",
    "Cluster",
]


class InsufficientSurvivorsError(RuntimeError):
    """Fewer than k healthy nodes remain; no read can succeed."""


@dataclass(frozen=True)
class OverheadReport:
    """Storage and repair cost ratios of a parameter set.

    storage_overhead is total stored symbols over data symbols, n*alpha/B.
    repair_bandwidth is the cross-rack symbol count gamma = dbar*beta of a
    single-node repair, and bandwidth_to_storage is gamma/alpha, which is 1
    by construction: repairing a node moves exactly as much across racks as
    the node stores.
    """

    storage_overhead: Fraction
    repair_bandwidth: int
    bandwidth_to_storage: Fraction

    def lines(self) -> list:
        so = self.storage_overhead
        return [
            f"storage_overhead   {so.numerator}/{so.denominator} = {float(so):.4f}",
            f"repair_bandwidth   {self.repair_bandwidth}",
            f"bandwidth_to_storage {self.bandwidth_to_storage}",
        ]


def overhead_report(p: CodeParams) -> OverheadReport:
    return OverheadReport(
        storage_overhead=Fraction(p.n * p.alpha, p.B),
        repair_bandwidth=p.dbar * p.beta,
        bandwidth_to_storage=Fraction(p.dbar * p.beta, p.alpha),
    )


def _same_code(a: CodeParams, b: CodeParams) -> bool:
    return (
        (a.n, a.k, a.u, a.dbar, a.field.q)
        == (b.n, b.k, b.u, b.dbar, b.field.q)
        and getattr(a.field, "primitive_poly", None)
        == getattr(b.field, "primitive_poly", None)
    )


class Cluster:
    """One erasure-coded placement group: n node shards per stored stripe.

    ``systematic`` declares how the stored stripes were produced, which
    decides what ``read_data`` returns: placement-order data symbols for a
    systematic cluster, matrix fill-order symbols otherwise.
    """

    def __init__(self, params: CodeParams, systematic: bool = False):
        self.params = params
        self.systematic = bool(systematic)
        self._shards = {node: [] for node in all_nodes(params)}
        self._failed = set()
        self._stripes = 0

    @property
    def stripe_count(self) -> int:
        return self._stripes

    def healthy_nodes(self) -> list:
        return [n for n in all_nodes(self.params) if n not in self._failed]

    def failed_nodes(self) -> list:
        return sorted(self._failed)

    def is_healthy(self, node) -> bool:
        node = NodeId(*node)
        node_index(self.params, node)
        return node not in self._failed

    def node_shard(self, node) -> list:
        """Per-stripe columns held by a node; unavailable once it failed."""
        node = NodeId(*node)
        node_index(self.params, node)
        if node in self._failed:
            raise RepairModelError(f"node {node!r} has failed: shard unavailable")
        return [list(col) for col in self._shards[node]]

    def store_stripes(self, matrices: Iterable[CodeMatrix]) -> None:
        """Place column (e,g) of every stripe on node (e,g), replacing any
        previous content. All nodes must be healthy."""
        if self._failed:
            raise RepairModelError(
                f"cannot store stripes with failed nodes: {sorted(self._failed)}"
            )
        p = self.params
        shards = {node: [] for node in all_nodes(p)}
        count = 0
        for C in matrices:
            if not _same_code(C.params, p):
                raise ValueError("stripe parameters do not match the cluster")
            if len(C.rows) != p.alpha or any(len(r) != p.n for r in C.rows):
                raise ValueError(
                    f"stripe {count}: expected {p.alpha} x {p.n} code matrix"
                )
            for node in all_nodes(p):
                shards[node].append(tuple(C.column(node)))
            count += 1
        self._shards = shards
        self._stripes = count

    def fail_node(self, node) -> None:
        node = NodeId(*node)
        node_index(self.params, node)
        if node in self._failed:
            raise ValueError(f"node {node!r} already failed")
        self._failed.add(node)
        self._shards[node] = []

    def _healthy_racks(self) -> list:
        failed_racks = {n.e for n in self._failed}
        return [e for e in range(self.params.nbar) if e not in failed_racks]

    def repair_failed(self, node, helpers: Sequence[int] | None = None) -> BandwidthLedger:
        """Regenerate a failed node on the helper racks' traffic and rejoin it.

        Returns the merged ledger over all stripes, after checking the
        defining bandwidth identity: dbar * beta cross-rack symbols per
        stripe, no more, no less.
        """
        p = self.params
        node = NodeId(*node)
        node_index(p, node)
        if node not in self._failed:
            raise ValueError(f"node {node!r} is healthy: nothing to repair")
        others = [f for f in self._failed if f.e == node.e and f != node]
        if others:
            raise RepairModelError(
                f"host rack {node.e} has further failures {sorted(others)}; "
                "the repair model covers a single failed node per rack"
            )
        if helpers is None:
            candidates = [e for e in self._healthy_racks() if e != node.e]
            if len(candidates) < p.dbar:
                raise RepairModelError(
                    f"only {len(candidates)} fully healthy helper racks available, "
                    f"need dbar={p.dbar}"
                )
            helpers = candidates[: p.dbar]
        else:
            helpers = sorted(helpers)
            unhealthy = [e for e in helpers if e not in self._healthy_racks()]
            if unhealthy:
                raise RepairModelError(f"helper racks {unhealthy} are not fully healthy")
        rep = Repairer(p, node, helpers)
        total = BandwidthLedger()
        regenerated = []
        for s in range(self._stripes):
            columns = {
                nid: self._shards[nid][s]
                for nid in all_nodes(p)
                if nid not in self._failed
            }
            column, ledger = rep.repair(columns)
            regenerated.append(tuple(column))
            total.merge(ledger)
        expected = p.dbar * p.beta * self._stripes
        if total.cross_rack_symbols != expected:
            raise RuntimeError(
                f"bandwidth identity violated: {total.cross_rack_symbols} cross-rack "
                f"symbols for {self._stripes} stripes, expected {expected}"
            )
        if sum(total.per_helper.values()) != total.cross_rack_symbols:
            raise RuntimeError("ledger per-helper breakdown does not sum to the total")
        self._shards[node] = regenerated
        self._failed.discard(node)
        return total

    def read_data(self, survivors: Sequence[NodeId] | None = None) -> list:
        """Per-stripe data symbols, reconstructed from k healthy nodes.

        Default survivor policy: the k lowest healthy node ids. A systematic
        cluster with its systematic nodes intact skips decoding entirely and
        reads the stored symbols back directly.
        """
        p = self.params
        healthy = self.healthy_nodes()
        if len(healthy) < p.k:
            raise InsufficientSurvivorsError(
                f"{len(healthy)} healthy nodes of n={p.n}; need at least k={p.k}"
            )
        if survivors is None:
            if self.systematic:
                front = systematic_nodes(p)
                if all(n not in self._failed for n in front):
                    return [
                        read_systematic_data(
                            p, {n: self._shards[n][s] for n in front}
                        )
                        for s in range(self._stripes)
                    ]
            survivors = healthy[: p.k]
        ids = [NodeId(*n) for n in survivors]
        for n in ids:
            if n in self._failed:
                raise RepairModelError(f"requested survivor {n!r} has failed")
        dec = Decoder(p, ids)
        out = []
        for s in range(self._stripes):
            cols = [ObservedColumn(n, self._shards[n][s]) for n in ids]
            M = dec.reconstruct(cols)
            if self.systematic:
                front = systematic_nodes(p)
                out.append(
                    read_systematic_data(
                        p, {n: node_column(M, n) for n in front}
                    )
                )
            else:
                out.append(unfill_message_matrix(M))
        return out
