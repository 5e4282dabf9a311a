# interval.py
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from pog import (
    Graph,
    NotPermutationError,
    PogError,
    ProperIntervalError,
    make_graph,
    to_nx_graph,
    underlying,
)

WITNESS_KINDS = ("claw", "cycle", "tent", "net")


@dataclass(frozen=True)
class StraightEnumeration:
    order: Tuple[int, ...]

    @cached_property
    def position(self) -> Dict[int, int]:
        return {v: i for i, v in enumerate(self.order)}

    def precedes(self, u: int, v: int) -> bool:
        return self.position[u] < self.position[v]

    def reversed(self) -> "StraightEnumeration":
        return StraightEnumeration(tuple(reversed(self.order)))

    def __len__(self) -> int:
        return len(self.order)


@dataclass(frozen=True)
class WegnerWitness:
    """Vertices inducing a claw, net, tent or chordless cycle (k >= 4).

    For cycles the vertices are listed in cyclic order.
    """

    kind: str
    vertices: Tuple[int, ...]

    def to_dict(self) -> Dict:
        out: Dict = {"kind": self.kind, "vertices": list(self.vertices)}
        if self.kind == "cycle":
            out["length"] = len(self.vertices)
        return out


# ----------------------------
# Templates
# ----------------------------
def claw_graph() -> Graph:
    return make_graph(4, [(0, 1), (0, 2), (0, 3)])


def net_graph() -> Graph:
    return make_graph(6, [(0, 1), (1, 2), (0, 2), (0, 3), (1, 4), (2, 5)])


def tent_graph() -> Graph:
    return make_graph(6, [(0, 1), (0, 2), (1, 2), (1, 3), (1, 4), (2, 4), (2, 5), (3, 4), (4, 5)])


def cycle_graph(k: int) -> Graph:
    return make_graph(k, [(i, (i + 1) % k) for i in range(k)])


def _template(kind: str, size: int) -> nx.Graph:
    if kind == "claw":
        return to_nx_graph(claw_graph())
    if kind == "net":
        return to_nx_graph(net_graph())
    if kind == "tent":
        return to_nx_graph(tent_graph())
    if kind == "cycle":
        return nx.cycle_graph(size)
    raise PogError(f"unknown witness kind {kind!r}")


# ----------------------------
# Umbrella property
# ----------------------------
def _check_permutation(G: Graph, order: Sequence[int]) -> None:
    if len(order) != G.n or set(order) != set(range(G.n)):
        raise NotPermutationError(f"{list(order)} is not a permutation of the {G.n} vertices")


def umbrella_holds(G: Graph, order: StraightEnumeration | Sequence[int]) -> bool:
    """True iff every closed neighbourhood occupies a contiguous run of `order`."""
    seq = order.order if isinstance(order, StraightEnumeration) else tuple(order)
    _check_permutation(G, seq)
    pos = {v: i for i, v in enumerate(seq)}
    for v in range(G.n):
        places = [pos[w] for w in G.adjacency[v]]
        places.append(pos[v])
        if max(places) - min(places) + 1 != len(places):
            return False
    return True


# ----------------------------
# Construction (3-sweep LexBFS per component)
# ----------------------------
def components(G: Graph) -> List[List[int]]:
    """Connected components, each sorted, ordered by their smallest vertex."""
    comps = [sorted(c) for c in nx.connected_components(to_nx_graph(G))]
    comps.sort(key=lambda c: c[0])
    return comps


def twin_classes(G: Graph) -> List[List[int]]:
    """Vertices grouped by equal closed neighbourhood, ordered by smallest member."""
    groups: Dict[FrozenSet[int], List[int]] = {}
    for v in range(G.n):
        groups.setdefault(G.closed_neighbourhood(v), []).append(v)
    return sorted(groups.values(), key=lambda g: g[0])


def _lex_bfs(G: Graph, vertices: Sequence[int], tie_rank: Dict[int, int]) -> List[int]:
    # Labels are lists of decreasing step numbers; list comparison is the
    # lexicographic order LexBFS needs. Ties go to the highest tie_rank.
    labels: Dict[int, List[int]] = {v: [] for v in vertices}
    remaining = set(vertices)
    order: List[int] = []
    step = len(vertices)
    while remaining:
        v = max(remaining, key=lambda x: (labels[x], tie_rank[x]))
        order.append(v)
        remaining.discard(v)
        for w in G.adjacency[v]:
            if w in remaining:
                labels[w].append(step)
        step -= 1
    return order


def _component_order(G: Graph, comp: Sequence[int]) -> List[int]:
    if len(comp) <= 2:
        return list(comp)
    first = _lex_bfs(G, comp, {v: -v for v in comp})
    second = _lex_bfs(G, comp, {v: i for i, v in enumerate(first)})
    return _lex_bfs(G, comp, {v: i for i, v in enumerate(second)})


def straight_enumeration(G: Graph) -> Optional[StraightEnumeration]:
    G = underlying(G)
    order: List[int] = []
    for comp in components(G):
        order.extend(_component_order(G, comp))
    candidate = StraightEnumeration(tuple(order))
    if not umbrella_holds(G, candidate):
        logging.debug(f"[Interval] no straight enumeration ({G.n} vertices)")
        return None
    return candidate


def reverse_enumeration(order: StraightEnumeration) -> StraightEnumeration:
    return order.reversed()


def is_proper_interval(G: Graph) -> bool:
    return straight_enumeration(G) is not None


# ----------------------------
# Forbidden induced subgraphs
# ----------------------------
def _independent(G: Graph, vs: Iterable[int]) -> bool:
    vs = list(vs)
    return all(not G.adjacent(a, b) for a, b in itertools.combinations(vs, 2))


def _find_claw(G: Graph) -> Optional[Tuple[int, ...]]:
    for c in range(G.n):
        for leaves in itertools.combinations(sorted(G.adjacency[c]), 3):
            if _independent(G, leaves):
                return (c,) + leaves
    return None


def _triangles(G: Graph) -> Iterable[Tuple[int, int, int]]:
    for a in range(G.n):
        for b in sorted(w for w in G.adjacency[a] if w > a):
            for c in sorted(w for w in G.adjacency[a] & G.adjacency[b] if w > b):
                yield (a, b, c)


def _find_net(G: Graph) -> Optional[Tuple[int, ...]]:
    for tri in _triangles(G):
        private = []
        for x in tri:
            others = [y for y in tri if y != x]
            private.append(sorted(w for w in G.adjacency[x] if w not in tri and not any(G.adjacent(w, y) for y in others)))
        for pendants in itertools.product(*private):
            if len(set(pendants)) == 3 and _independent(G, pendants):
                return tri + pendants
    return None


def _find_tent(G: Graph) -> Optional[Tuple[int, ...]]:
    # Inner triangle (x, y, z); each outer vertex sees exactly one side of it.
    for tri in _triangles(G):
        sides = []
        for p, q in ((tri[0], tri[1]), (tri[0], tri[2]), (tri[1], tri[2])):
            r = next(t for t in tri if t not in (p, q))
            sides.append(sorted(
                w for w in G.adjacency[p] & G.adjacency[q] if w not in tri and not G.adjacent(w, r)
            ))
        for outer in itertools.product(*sides):
            if len(set(outer)) == 3 and _independent(G, outer):
                return tri + outer
    return None


def _find_long_cycle(G: Graph) -> Optional[Tuple[int, ...]]:
    g = to_nx_graph(G)
    for k in range(4, G.n + 1):
        for cycle in nx.chordless_cycles(g, length_bound=k):
            if len(cycle) == k:
                return tuple(cycle)
    return None


def wegner_witness(G: Graph) -> WegnerWitness:
    G = underlying(G)
    if straight_enumeration(G) is not None:
        raise ProperIntervalError("graph is a proper interval graph; no witness exists")

    claw = _find_claw(G)
    if claw is not None:
        return WegnerWitness("claw", claw)
    cycle = _find_long_cycle(G)
    if cycle is not None:
        return WegnerWitness("cycle", cycle)
    tent = _find_tent(G)
    if tent is not None:
        return WegnerWitness("tent", tent)
    net = _find_net(G)
    if net is not None:
        return WegnerWitness("net", net)
    raise PogError("no forbidden induced subgraph found in a non proper interval graph")


def verify_wegner_witness(G: Graph, witness: WegnerWitness) -> bool:
    G = underlying(G)
    vs = list(witness.vertices)
    if witness.kind not in WITNESS_KINDS or len(set(vs)) != len(vs):
        return False
    if any(not (0 <= v < G.n) for v in vs):
        return False
    if witness.kind == "cycle":
        k = len(vs)
        if k < 4:
            return False
        # Cyclic order must match as well as the vertex set.
        for i in range(k):
            for j in range(i + 1, k):
                consecutive = (j - i == 1) or (i == 0 and j == k - 1)
                if G.adjacent(vs[i], vs[j]) != consecutive:
                    return False
        return True
    sub = to_nx_graph(G).subgraph(vs)
    return nx.is_isomorphic(sub, _template(witness.kind, len(vs)))
