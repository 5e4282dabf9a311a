# completion.py
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx

from interval import (
    StraightEnumeration,
    WegnerWitness,
    components,
    straight_enumeration,
    umbrella_holds,
    verify_wegner_witness,
    wegner_witness,
)
from pog import (
    NotStraightError,
    Pair,
    PogError,
    PartiallyOrientedGraph,
    is_acyclic_local_tournament,
    to_nx_arc_digraph,
    to_nx_graph,
    underlying,
)


@dataclass(frozen=True)
class ArcSign:
    arc: Pair
    positive: bool
    balanced: bool

    def to_dict(self) -> Dict:
        return {"arc": list(self.arc), "positive": self.positive, "balanced": self.balanced}


# ----------------------------
# Certificates
# ----------------------------
@dataclass(frozen=True)
class Completed:
    orientation: PartiallyOrientedGraph
    kind = "completed"

    def to_dict(self) -> Dict:
        return {"kind": self.kind, "arcs": [list(a) for a in sorted(self.orientation.arcs)]}


@dataclass(frozen=True)
class NotProperInterval:
    witness: WegnerWitness
    kind = "not_proper_interval"

    def to_dict(self) -> Dict:
        return {"kind": self.kind, "witness": self.witness.to_dict()}


@dataclass(frozen=True)
class DirectedCycle:
    cycle: Tuple[int, ...]
    kind = "directed_cycle"

    def to_dict(self) -> Dict:
        return {"kind": self.kind, "cycle": list(self.cycle)}


@dataclass(frozen=True)
class OpposingUnbalancedArcs:
    positive_arc: Pair
    negative_arc: Pair
    order: StraightEnumeration
    kind = "opposing_unbalanced_arcs"

    def to_dict(self) -> Dict:
        return {
            "kind": self.kind,
            "positive_arc": list(self.positive_arc),
            "negative_arc": list(self.negative_arc),
            "order": list(self.order.order),
        }


CompletionCertificate = Union[Completed, NotProperInterval, DirectedCycle, OpposingUnbalancedArcs]


def _is_balanced_pair(H: PartiallyOrientedGraph, u: int, v: int) -> bool:
    return H.closed_neighbourhood(u) == H.closed_neighbourhood(v)


def arc_signs(H: PartiallyOrientedGraph, order: StraightEnumeration | Sequence[int]) -> List[ArcSign]:
    if not isinstance(order, StraightEnumeration):
        order = StraightEnumeration(tuple(order))
    if not umbrella_holds(underlying(H), order):
        raise NotStraightError(f"{list(order.order)} is not a straight enumeration")
    pos = order.position
    return [ArcSign(arc=(u, v), positive=pos[u] < pos[v], balanced=_is_balanced_pair(H, u, v)) for u, v in sorted(H.arcs)]


def find_directed_cycle(H: PartiallyOrientedGraph) -> Optional[Tuple[int, ...]]:
    try:
        links = nx.find_cycle(to_nx_arc_digraph(H))
    except nx.NetworkXNoCycle:
        return None
    return tuple(u for u, _v in links)


def _twin_runs(H: PartiallyOrientedGraph, order: Sequence[int]) -> List[List[int]]:
    # Twins are contiguous in every straight enumeration.
    runs: List[List[int]] = []
    for v in order:
        if runs and H.closed_neighbourhood(runs[-1][0]) == H.closed_neighbourhood(v):
            runs[-1].append(v)
        else:
            runs.append([v])
    return runs


def _order_twins(H: PartiallyOrientedGraph, run: List[int]) -> List[int]:
    if len(run) == 1:
        return run
    members = set(run)
    d = nx.DiGraph()
    d.add_nodes_from(run)
    d.add_edges_from((u, v) for u, v in H.arcs if u in members and v in members)
    rank = {v: i for i, v in enumerate(run)}
    return list(nx.lexicographical_topological_sort(d, key=rank.__getitem__))


def complete(H: PartiallyOrientedGraph) -> CompletionCertificate:
    G = underlying(H)
    order = straight_enumeration(G)
    if order is None:
        witness = wegner_witness(G)
        logging.debug(f"[Complete] not proper interval: {witness.kind} on {list(witness.vertices)}")
        return NotProperInterval(witness)

    cycle = find_directed_cycle(H)
    if cycle is not None:
        logging.debug(f"[Complete] directed cycle {list(cycle)}")
        return DirectedCycle(cycle)

    pos = order.position
    final: List[int] = []
    for comp in components(G):
        members = set(comp)
        segment = sorted(comp, key=pos.__getitem__)
        unbalanced = [(u, v) for u, v in sorted(H.arcs) if u in members and not _is_balanced_pair(H, u, v)]
        positive = [a for a in unbalanced if pos[a[0]] < pos[a[1]]]
        negative = [a for a in unbalanced if pos[a[0]] > pos[a[1]]]
        if positive and negative:
            logging.debug(f"[Complete] opposing unbalanced arcs {positive[0]} / {negative[0]}")
            return OpposingUnbalancedArcs(positive_arc=positive[0], negative_arc=negative[0], order=order)
        if negative:
            segment.reverse()
        for run in _twin_runs(H, segment):
            final.extend(_order_twins(H, run))

    rank = {v: i for i, v in enumerate(final)}
    arcs = frozenset((u, v) if rank[u] < rank[v] else (v, u) for u, v in G.edges)
    D = PartiallyOrientedGraph(n=H.n, edges=frozenset(), arcs=arcs)
    if not verify_completion(H, D):
        # Unreachable when the straight enumeration and the sign test are right.
        raise RuntimeError("constructed orientation failed verification")
    return Completed(D)


def can_complete(H: PartiallyOrientedGraph) -> bool:
    return isinstance(complete(H), Completed)


def verify_completion(H: PartiallyOrientedGraph, D: PartiallyOrientedGraph) -> bool:
    if D.n != H.n or D.edges:
        return False
    if not H.arcs <= D.arcs:
        return False
    if D.underlying_edges != H.underlying_edges:
        return False
    return is_acyclic_local_tournament(D)


def verify_certificate(H: PartiallyOrientedGraph, cert: CompletionCertificate) -> bool:
    """Re-check a certificate against H without trusting `complete`."""
    if isinstance(cert, Completed):
        return verify_completion(H, cert.orientation)

    if isinstance(cert, NotProperInterval):
        return verify_wegner_witness(underlying(H), cert.witness)

    if isinstance(cert, DirectedCycle):
        cyc = cert.cycle
        if len(cyc) < 3 or len(set(cyc)) != len(cyc):
            return False
        return all((cyc[i], cyc[(i + 1) % len(cyc)]) in H.arcs for i in range(len(cyc)))

    if isinstance(cert, OpposingUnbalancedArcs):
        G = underlying(H)
        try:
            if not umbrella_holds(G, cert.order):
                return False
        except PogError:
            return False
        p, q = cert.positive_arc, cert.negative_arc
        if p not in H.arcs or q not in H.arcs:
            return False
        pos = cert.order.position
        if not (pos[p[0]] < pos[p[1]] and pos[q[0]] > pos[q[1]]):
            return False
        if _is_balanced_pair(H, *p) or _is_balanced_pair(H, *q):
            return False
        return nx.has_path(to_nx_graph(G), p[0], q[0])

    return False
