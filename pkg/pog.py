# pog.py
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
from networkx.algorithms import isomorphism

Pair = Tuple[int, int]
IsoMapping = Tuple[int, ...]

# Pair states used by the canonical code and the enumerator.
NONE, EDGE, ARC_FWD, ARC_BWD = 0, 1, 2, 3


# ----------------------------
# Errors
# ----------------------------
class PogError(ValueError):
    """Base class for every domain error raised by this project."""

    kind = "pog_error"


class InvalidGraphError(PogError):
    kind = "invalid_graph"


class MissingArcError(PogError):
    kind = "missing_arc"


class NotAnEdgeError(PogError):
    kind = "not_an_edge"


class NotPermutationError(PogError):
    kind = "not_permutation"


class NotStraightError(PogError):
    kind = "not_straight"


class ProperIntervalError(PogError):
    kind = "proper_interval"


class CompletableError(PogError):
    kind = "completable"


class CatalogParameterError(PogError):
    kind = "catalog_parameter"


class OracleCapError(PogError):
    kind = "oracle_cap"


class EnumerationLimitError(PogError):
    kind = "enumeration_limit"


class DocumentError(PogError):
    kind = "document"


# ----------------------------
# Data model
# ----------------------------
@dataclass(frozen=True)
class PartiallyOrientedGraph:
    """Mixed graph on vertices 0..n-1.

    `edges` holds normalised pairs (u < v); `arcs` holds (tail, head).
    Build instances through `make_pog` / `make_graph`, which validate.
    """

    n: int
    edges: FrozenSet[Pair]
    arcs: FrozenSet[Pair]

    @cached_property
    def adjacency(self) -> Tuple[FrozenSet[int], ...]:
        adj: List[set] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        for u, v in self.arcs:
            adj[u].add(v)
            adj[v].add(u)
        return tuple(frozenset(a) for a in adj)

    @cached_property
    def out_arcs(self) -> Tuple[FrozenSet[int], ...]:
        out: List[set] = [set() for _ in range(self.n)]
        for u, v in self.arcs:
            out[u].add(v)
        return tuple(frozenset(o) for o in out)

    @cached_property
    def in_arcs(self) -> Tuple[FrozenSet[int], ...]:
        inn: List[set] = [set() for _ in range(self.n)]
        for u, v in self.arcs:
            inn[v].add(u)
        return tuple(frozenset(i) for i in inn)

    @cached_property
    def underlying_edges(self) -> FrozenSet[Pair]:
        return frozenset(self.edges | {_norm(u, v) for u, v in self.arcs})

    def adjacent(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def closed_neighbourhood(self, v: int) -> FrozenSet[int]:
        return self.adjacency[v] | {v}

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def pair_state(self, u: int, v: int) -> int:
        if (u, v) in self.arcs:
            return ARC_FWD
        if (v, u) in self.arcs:
            return ARC_BWD
        if _norm(u, v) in self.edges:
            return EDGE
        return NONE

    def is_graph(self) -> bool:
        return not self.arcs


# An arcless PartiallyOrientedGraph is used wherever a plain graph is meant.
Graph = PartiallyOrientedGraph


def _norm(u: int, v: int) -> Pair:
    return (u, v) if u < v else (v, u)


def _as_pair(raw, what: str, n: int) -> Pair:
    try:
        u, v = raw
    except (TypeError, ValueError):
        raise InvalidGraphError(f"{what} {raw!r} is not a pair")
    if isinstance(u, bool) or isinstance(v, bool) or not isinstance(u, int) or not isinstance(v, int):
        raise InvalidGraphError(f"{what} {raw!r} must hold integer vertex ids")
    if not (0 <= u < n and 0 <= v < n):
        raise InvalidGraphError(f"{what} {raw!r} is out of range for n={n}")
    if u == v:
        raise InvalidGraphError(f"{what} {raw!r} is a self-loop")
    return (u, v)


def make_pog(n: int, edges: Iterable[Sequence[int]] = (), arcs: Iterable[Sequence[int]] = ()) -> PartiallyOrientedGraph:
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise InvalidGraphError(f"vertex count {n!r} must be a non-negative integer")

    edge_set = {_norm(*_as_pair(e, "edge", n)) for e in edges}
    arc_set = {_as_pair(a, "arc", n) for a in arcs}

    for u, v in arc_set:
        if (v, u) in arc_set:
            raise InvalidGraphError(f"both arc directions present on {{{u},{v}}}")
        if _norm(u, v) in edge_set:
            raise InvalidGraphError(f"pair {{{u},{v}}} is both an edge and an arc")

    return PartiallyOrientedGraph(n=n, edges=frozenset(edge_set), arcs=frozenset(arc_set))


def make_graph(n: int, edges: Iterable[Sequence[int]] = ()) -> Graph:
    return make_pog(n, edges, ())


# ----------------------------
# Structural edits
# ----------------------------
def underlying(H: PartiallyOrientedGraph) -> Graph:
    if not H.arcs:
        return H
    return PartiallyOrientedGraph(n=H.n, edges=H.underlying_edges, arcs=frozenset())


def dual(H: PartiallyOrientedGraph) -> PartiallyOrientedGraph:
    if not H.arcs:
        return H
    return PartiallyOrientedGraph(n=H.n, edges=H.edges, arcs=frozenset((v, u) for u, v in H.arcs))


def delete_vertex(H: PartiallyOrientedGraph, v: int) -> PartiallyOrientedGraph:
    """Remove `v`; vertices above it shift down by one."""
    if isinstance(v, bool) or not isinstance(v, int) or not (0 <= v < H.n):
        raise InvalidGraphError(f"vertex {v!r} is out of range for n={H.n}")

    def shift(x: int) -> int:
        return x - 1 if x > v else x

    edges = frozenset((shift(a), shift(b)) for a, b in H.edges if v not in (a, b))
    arcs = frozenset((shift(a), shift(b)) for a, b in H.arcs if v not in (a, b))
    return PartiallyOrientedGraph(n=H.n - 1, edges=edges, arcs=arcs)


def relax_arc(H: PartiallyOrientedGraph, a: Sequence[int]) -> PartiallyOrientedGraph:
    arc = tuple(a)
    if arc not in H.arcs:
        raise MissingArcError(f"arc {list(arc)} is not present")
    u, v = arc
    return PartiallyOrientedGraph(n=H.n, edges=H.edges | {_norm(u, v)}, arcs=H.arcs - {arc})


def orient(H: PartiallyOrientedGraph, arcs: Iterable[Pair]) -> PartiallyOrientedGraph:
    """Replace edges of H by the given arcs (each must cover an edge of H)."""
    new_arcs = set(H.arcs)
    edges = set(H.edges)
    for u, v in arcs:
        key = _norm(u, v)
        if key not in edges:
            raise NotAnEdgeError(f"{{{u},{v}}} is not an edge to orient")
        edges.discard(key)
        new_arcs.add((u, v))
    return PartiallyOrientedGraph(n=H.n, edges=frozenset(edges), arcs=frozenset(new_arcs))


def relabel(H: PartiallyOrientedGraph, perm: Sequence[int]) -> PartiallyOrientedGraph:
    """Vertex v of H becomes perm[v]."""
    if sorted(perm) != list(range(H.n)):
        raise NotPermutationError(f"{list(perm)} is not a permutation of 0..{H.n - 1}")
    edges = frozenset(_norm(perm[a], perm[b]) for a, b in H.edges)
    arcs = frozenset((perm[a], perm[b]) for a, b in H.arcs)
    return PartiallyOrientedGraph(n=H.n, edges=edges, arcs=arcs)


# ----------------------------
# networkx views
# ----------------------------
def to_nx_graph(H: PartiallyOrientedGraph) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(H.n))
    g.add_edges_from(sorted(H.underlying_edges))
    return g


def to_nx_arc_digraph(H: PartiallyOrientedGraph) -> nx.DiGraph:
    d = nx.DiGraph()
    d.add_nodes_from(range(H.n))
    d.add_edges_from(sorted(H.arcs))
    return d


def to_nx_mixed(H: PartiallyOrientedGraph) -> nx.DiGraph:
    """Edges become two opposite 'edge' links, arcs a single 'arc' link."""
    d = nx.DiGraph()
    d.add_nodes_from(range(H.n))
    for u, v in sorted(H.edges):
        d.add_edge(u, v, kind="edge")
        d.add_edge(v, u, kind="edge")
    for u, v in sorted(H.arcs):
        d.add_edge(u, v, kind="arc")
    return d


def is_clique(H: PartiallyOrientedGraph, vertices: Iterable[int]) -> bool:
    vs = list(vertices)
    adj = H.adjacency
    return all(vs[j] in adj[vs[i]] for i in range(len(vs)) for j in range(i + 1, len(vs)))


def is_acyclic_local_tournament(D: PartiallyOrientedGraph) -> bool:
    if D.edges:
        return False
    for v in range(D.n):
        if not is_clique(D, D.out_arcs[v]) or not is_clique(D, D.in_arcs[v]):
            return False
    return nx.is_directed_acyclic_graph(to_nx_arc_digraph(D))


# ----------------------------
# Isomorphism and canonical codes
# ----------------------------
def _kinds_match(a: Dict, b: Dict) -> bool:
    return a.get("kind") == b.get("kind")


def _quick_invariant(H: PartiallyOrientedGraph) -> Tuple:
    profile = sorted(
        (len(H.adjacency[v]) - len(H.out_arcs[v]) - len(H.in_arcs[v]), len(H.out_arcs[v]), len(H.in_arcs[v]))
        for v in range(H.n)
    )
    return (H.n, len(H.edges), len(H.arcs), tuple(profile))


def mixed_isomorphic(H1: PartiallyOrientedGraph, H2: PartiallyOrientedGraph) -> Optional[IsoMapping]:
    """Mapping m with m[v] the image of H1's vertex v in H2, or None."""
    if _quick_invariant(H1) != _quick_invariant(H2):
        return None
    matcher = isomorphism.DiGraphMatcher(to_nx_mixed(H1), to_nx_mixed(H2), edge_match=_kinds_match)
    if not matcher.is_isomorphic():
        return None
    return tuple(matcher.mapping[v] for v in range(H1.n))


def _state_matrix(H: PartiallyOrientedGraph) -> List[List[int]]:
    s = [[NONE] * H.n for _ in range(H.n)]
    for u, v in H.edges:
        s[u][v] = s[v][u] = EDGE
    for u, v in H.arcs:
        s[u][v] = ARC_FWD
        s[v][u] = ARC_BWD
    return s


def _refine(state: List[List[int]], colours: List[int]) -> List[int]:
    n = len(colours)
    while True:
        sigs = [
            (colours[v], tuple(sorted((colours[w], state[v][w]) for w in range(n) if w != v and state[v][w])))
            for v in range(n)
        ]
        ranking = {sig: i for i, sig in enumerate(sorted(set(sigs)))}
        refined = [ranking[sig] for sig in sigs]
        if len(ranking) == len(set(colours)):
            return refined
        colours = refined


def _twin_groups(state: List[List[int]], cell: List[int]) -> List[int]:
    """One representative per group of interchangeable vertices in `cell`."""
    n = len(state)
    reps: List[int] = []
    for v in cell:
        for r in reps:
            if state[v][r] in (NONE, EDGE) and all(
                state[v][w] == state[r][w] for w in range(n) if w != v and w != r
            ):
                break
        else:
            reps.append(v)
    return reps


def _leaf_code(state: List[List[int]], colours: List[int]) -> bytes:
    n = len(colours)
    order = sorted(range(n), key=lambda v: colours[v])
    body = bytes(state[order[i]][order[j]] for i in range(n) for j in range(i + 1, n))
    return bytes([n]) + body


def _search(state: List[List[int]], colours: List[int], best: List[Optional[Tuple[bytes, List[int]]]]) -> None:
    n = len(colours)
    if len(set(colours)) == n:
        code = _leaf_code(state, colours)
        if best[0] is None or code < best[0][0]:
            best[0] = (code, list(colours))
        return
    cells: Dict[int, List[int]] = {}
    for v in range(n):
        cells.setdefault(colours[v], []).append(v)
    target = min(c for c, members in cells.items() if len(members) > 1)
    for v in _twin_groups(state, cells[target]):
        split = [2 * c + (1 if c == target and w != v else 0) for w, c in enumerate(colours)]
        _search(state, _refine(state, split), best)


def _canonical_leaf(H: PartiallyOrientedGraph) -> Tuple[bytes, List[int]]:
    if H.n == 0:
        return bytes([0]), []
    if H.n > 255:
        raise InvalidGraphError("canonical codes support at most 255 vertices")
    state = _state_matrix(H)
    best: List[Optional[Tuple[bytes, List[int]]]] = [None]
    _search(state, _refine(state, [0] * H.n), best)
    code, colours = best[0]  # type: ignore[misc]
    ranks = {c: i for i, c in enumerate(sorted(colours))}
    return code, [ranks[c] for c in colours]


def canonical_code(H: PartiallyOrientedGraph) -> bytes:
    """Minimal pair-state encoding over the refined search tree.

    Byte 0 is n; then one byte per pair i < j of the canonical order with
    0 = none, 1 = edge, 2 = arc i->j, 3 = arc j->i.
    """
    return _canonical_leaf(H)[0]


def canonical_form(H: PartiallyOrientedGraph) -> Tuple[bytes, PartiallyOrientedGraph]:
    code, perm = _canonical_leaf(H)
    return code, relabel(H, perm) if H.n else H


def graph_from_code(code: bytes) -> PartiallyOrientedGraph:
    if not code:
        raise InvalidGraphError("empty canonical code")
    n = code[0]
    body = code[1:]
    if len(body) != n * (n - 1) // 2:
        raise InvalidGraphError("canonical code has the wrong length")
    edges: List[Pair] = []
    arcs: List[Pair] = []
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            s = body[k]
            k += 1
            if s == EDGE:
                edges.append((i, j))
            elif s == ARC_FWD:
                arcs.append((i, j))
            elif s == ARC_BWD:
                arcs.append((j, i))
            elif s != NONE:
                raise InvalidGraphError(f"bad pair state {s} in canonical code")
    return make_pog(n, edges, arcs)


def graph_from_states(n: int, states: Sequence[int]) -> PartiallyOrientedGraph:
    """Inverse of the upper-triangle state listing (row-major, i < j)."""
    return graph_from_code(bytes([n]) + bytes(states))


def summary(H: PartiallyOrientedGraph) -> str:
    return f"n={H.n} edges={len(H.edges)} arcs={len(H.arcs)}"

