# implication.py
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import networkx as nx
from networkx.utils import UnionFind

from pog import (
    Graph,
    MissingArcError,
    NotAnEdgeError,
    Pair,
    PartiallyOrientedGraph,
    to_nx_graph,
    underlying,
)


@dataclass(frozen=True)
class ImplicationClass:
    """Edges of one class plus the Γ*-coset chosen as its orientation."""

    edges: FrozenSet[Pair]
    orientation: FrozenSet[Pair]
    # False when some pair is implied by its own reverse (impossible on
    # proper interval graphs).
    consistent: bool

    @property
    def trivial(self) -> bool:
        return len(self.edges) == 1


@dataclass(frozen=True)
class ImplicationPartition:
    classes: Tuple[ImplicationClass, ...]
    pair_class: Dict[Pair, int]

    def implies(self, p: Pair, q: Pair) -> bool:
        """(u,v) Γ* (x,y)."""
        return self.pair_class[tuple(p)] == self.pair_class[tuple(q)]

    def class_index(self, u: int, v: int) -> int:
        key = (u, v) if u < v else (v, u)
        for i, cls in enumerate(self.classes):
            if key in cls.edges:
                return i
        raise NotAnEdgeError(f"{{{u},{v}}} is not an edge")

    def to_dict(self) -> Dict:
        return {
            "classes": [
                {
                    "edges": [list(e) for e in sorted(c.edges)],
                    "orientation": [list(p) for p in sorted(c.orientation)],
                    "trivial": c.trivial,
                    "consistent": c.consistent,
                }
                for c in self.classes
            ]
        }


def _require_pair(G: Graph, p: Sequence[int]) -> Pair:
    u, v = p
    if u == v or not G.adjacent(u, v):
        raise NotAnEdgeError(f"{list(p)} is not in Z(G)")
    return (u, v)


def gamma_forces(G: Graph, p: Sequence[int], q: Sequence[int]) -> bool:
    u, v = _require_pair(G, p)
    x, y = _require_pair(G, q)
    if u == x and v == y:
        return True
    if u == y and v != x and not G.adjacent(v, x):
        return True
    if v == x and u != y and not G.adjacent(u, y):
        return True
    return False


def _forced_by(G: Graph, u: int, v: int) -> List[Pair]:
    # (u,v) forces (x,u) for x in N(u) \ N[v] and (v,y) for y in N(v) \ N[u].
    forced = [(x, u) for x in G.adjacency[u] if x != v and not G.adjacent(x, v)]
    forced.extend((v, y) for y in G.adjacency[v] if y != u and not G.adjacent(y, u))
    return forced


def implication_classes(G: Graph) -> ImplicationPartition:
    G = underlying(G)
    pairs = sorted(p for u, v in G.edges for p in ((u, v), (v, u)))
    uf = UnionFind(pairs)
    for u, v in pairs:
        for q in _forced_by(G, u, v):
            uf.union((u, v), q)

    classes: List[ImplicationClass] = []
    pair_class: Dict[Pair, int] = {}
    seen: set = set()
    for u, v in sorted(G.edges):
        if (u, v) in seen:
            continue
        root = uf[(u, v)]
        rev_root = uf[(v, u)]
        coset = frozenset(p for p in pairs if uf[p] == root)
        reverse_coset = frozenset(p for p in pairs if uf[p] == rev_root)
        edges = frozenset((a, b) if a < b else (b, a) for a, b in coset | reverse_coset)
        seen.update(edges)
        classes.append(ImplicationClass(edges=edges, orientation=coset, consistent=root != rev_root))

    ids: Dict[object, int] = {}
    for p in pairs:
        ids.setdefault(uf[p], len(ids))
        pair_class[p] = ids[uf[p]]
    return ImplicationPartition(classes=tuple(classes), pair_class=pair_class)


def is_balanced(G: Graph, u: int, v: int) -> bool:
    if u == v or not G.adjacent(u, v):
        raise NotAnEdgeError(f"{{{u},{v}}} is not an edge")
    return G.closed_neighbourhood(u) == G.closed_neighbourhood(v)


def universal_vertices(G: Graph) -> FrozenSet[int]:
    return frozenset(v for v in range(G.n) if G.degree(v) == G.n - 1)


def arc_balancing_candidates(H: PartiallyOrientedGraph, a: Sequence[int]) -> FrozenSet[int]:
    arc = tuple(a)
    if arc not in H.arcs:
        raise MissingArcError(f"arc {list(arc)} is not present")
    x, y = arc
    return frozenset((H.adjacency[x] ^ H.adjacency[y]) - {x, y})


def arc_balancing_vertex(H: PartiallyOrientedGraph, a: Sequence[int]) -> Optional[int]:
    cands = arc_balancing_candidates(H, a)
    if len(cands) == 1:
        return next(iter(cands))
    return None


# ----------------------------
# Structure of proper interval implication classes (test support)
# ----------------------------
@dataclass(frozen=True)
class PigStructure:
    nontrivial_components: Tuple[FrozenSet[int], ...]
    # One entry per class: "trivial", "within" or ("universal", z).
    class_kinds: Tuple[object, ...]
    universal: FrozenSet[int]


def pig_structure_report(G: Graph) -> PigStructure:
    """Classify every implication class against the complement's component."""
    G = underlying(G)
    comp_graph = nx.complement(to_nx_graph(G))
    nontrivial = tuple(
        sorted((frozenset(c) for c in nx.connected_components(comp_graph) if len(c) > 1), key=min)
    )
    universal = universal_vertices(G)
    partition = implication_classes(G)

    H = nontrivial[0] if len(nontrivial) == 1 else frozenset()
    unbalanced_within = frozenset(
        (u, v) for u, v in G.edges if u in H and v in H and not is_balanced(G, u, v)
    )

    kinds: List[object] = []
    for cls in partition.classes:
        if cls.trivial:
            kinds.append("trivial")
            continue
        if cls.edges == unbalanced_within:
            kinds.append("within")
            continue
        for z in sorted(universal):
            spoke = frozenset((min(z, h), max(z, h)) for h in H)
            if cls.edges == spoke:
                kinds.append(("universal", z))
                break
        else:
            kinds.append("other")
    return PigStructure(nontrivial_components=nontrivial, class_kinds=tuple(kinds), universal=universal)
