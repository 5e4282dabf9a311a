# oracle.py
"""
Brute-force ground truth.

Completability is decided here by exhaustive orientation search with early
local-tournament / cycle cuts, independently of the straight-enumeration
engine in completion.py. The enumerator builds every partially oriented
graph up to isomorphism by adding one vertex at a time (four states per new
pair: none, edge, arc out, arc in) and deduplicating on canonical codes.
"""
from __future__ import annotations

import itertools
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Set, Tuple

from obstruction import is_obstruction
from pog import (
    ARC_BWD,
    ARC_FWD,
    EDGE,
    EnumerationLimitError,
    OracleCapError,
    PartiallyOrientedGraph,
    canonical_code,
    graph_from_code,
    is_clique,
    make_pog,
)

DEFAULT_EDGE_CAP = 25
DEFAULT_MAX_N = 5
LONG_MAX_N = 6


# ----------------------------
# Orientation search
# ----------------------------
def _orientations(H: PartiallyOrientedGraph, acyclic: bool, edge_cap: Optional[int]) -> Iterator[PartiallyOrientedGraph]:
    cap = DEFAULT_EDGE_CAP if edge_cap is None else edge_cap
    if len(H.edges) > cap:
        raise OracleCapError(f"{len(H.edges)} edges exceed the oracle cap of {cap}")

    adj = H.adjacency
    out: List[Set[int]] = [set(s) for s in H.out_arcs]
    inn: List[Set[int]] = [set(s) for s in H.in_arcs]

    for v in range(H.n):
        if not is_clique(H, out[v]) or not is_clique(H, inn[v]):
            return

    def reaches(src: int, dst: int) -> bool:
        stack, seen = [src], {src}
        while stack:
            x = stack.pop()
            if x == dst:
                return True
            for y in out[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return False

    if acyclic and any(reaches(b, a) for a, b in H.arcs):
        return

    edges = sorted(H.edges)

    def fits(a: int, b: int) -> bool:
        # New arc a->b: b joins a's out-set, a joins b's in-set.
        if any(c not in adj[b] for c in out[a]):
            return False
        if any(c not in adj[a] for c in inn[b]):
            return False
        return not (acyclic and reaches(b, a))

    def search(i: int) -> Iterator[PartiallyOrientedGraph]:
        if i == len(edges):
            arcs = frozenset((a, b) for a in range(H.n) for b in out[a])
            yield PartiallyOrientedGraph(n=H.n, edges=frozenset(), arcs=arcs)
            return
        u, v = edges[i]
        for a, b in ((u, v), (v, u)):
            if fits(a, b):
                out[a].add(b)
                inn[b].add(a)
                yield from search(i + 1)
                out[a].discard(b)
                inn[b].discard(a)

    yield from search(0)


def oracle_alt_completable(H: PartiallyOrientedGraph, edge_cap: Optional[int] = None) -> bool:
    """Some orientation of the edges gives an acyclic local tournament."""
    return next(_orientations(H, acyclic=True, edge_cap=edge_cap), None) is not None


def oracle_lt_completable(H: PartiallyOrientedGraph, edge_cap: Optional[int] = None) -> bool:
    """Some orientation of the edges gives a local tournament (cycles allowed)."""
    return next(_orientations(H, acyclic=False, edge_cap=edge_cap), None) is not None


def all_local_tournament_orientations(
    H: PartiallyOrientedGraph, acyclic: bool = False, edge_cap: Optional[int] = None
) -> Iterator[PartiallyOrientedGraph]:
    return _orientations(H, acyclic=acyclic, edge_cap=edge_cap)


# ----------------------------
# Generation up to isomorphism
# ----------------------------
def _extend(parent: PartiallyOrientedGraph, pattern: Sequence[int]) -> PartiallyOrientedGraph:
    new = parent.n
    edges = list(parent.edges)
    arcs = list(parent.arcs)
    for i, s in enumerate(pattern):
        if s == EDGE:
            edges.append((i, new))
        elif s == ARC_FWD:
            arcs.append((i, new))
        elif s == ARC_BWD:
            arcs.append((new, i))
    return make_pog(new + 1, edges, arcs)


def _augment_chunk(parent_codes: Sequence[bytes]) -> Set[bytes]:
    found: Set[bytes] = set()
    for code in parent_codes:
        parent = graph_from_code(code)
        for pattern in itertools.product(range(4), repeat=parent.n):
            found.add(canonical_code(_extend(parent, pattern)))
    return found


def _chunks(items: Sequence, parts: int) -> List[List]:
    parts = max(1, parts)
    return [list(items[i::parts]) for i in range(parts) if items[i::parts]]


def _map(fn: Callable, chunks: List[List], threads: int) -> List:
    if threads <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, chunks))


# Keyed on n alone; the thread count never changes the classes.
_CODE_CACHE: Dict[int, Tuple[bytes, ...]] = {0: (bytes([0]),)}


def _codes_on(n: int, threads: int = 1) -> Tuple[bytes, ...]:
    cached = _CODE_CACHE.get(n)
    if cached is not None:
        return cached
    parents = _codes_on(n - 1, threads)
    merged: Set[bytes] = set()
    for part in _map(_augment_chunk, _chunks(parents, threads * 4), threads):
        merged |= part
    _CODE_CACHE[n] = tuple(sorted(merged))
    return _CODE_CACHE[n]


def mixed_graphs(n: int, threads: int = 1) -> List[PartiallyOrientedGraph]:
    """All partially oriented graphs on exactly n vertices, one per isomorphism class."""
    if n < 0:
        raise EnumerationLimitError("vertex count must be non-negative")
    return [graph_from_code(c) for c in _codes_on(n, max(1, threads))]


def mixed_graphs_up_to(max_n: int, threads: int = 1) -> Iterator[PartiallyOrientedGraph]:
    for n in range(max_n + 1):
        yield from mixed_graphs(n, threads)


# ----------------------------
# Obstruction enumeration
# ----------------------------
@dataclass(frozen=True)
class EnumeratedObstruction:
    code: bytes
    graph: PartiallyOrientedGraph

    def to_dict(self) -> Dict:
        return {
            "code": self.code.hex(),
            "n": self.graph.n,
            "edges": [list(e) for e in sorted(self.graph.edges)],
            "arcs": [list(a) for a in sorted(self.graph.arcs)],
        }


@dataclass(frozen=True)
class EnumerationReport:
    max_n: int
    obstructions: Tuple[EnumeratedObstruction, ...]
    counts: Dict[int, int] = field(default_factory=dict)
    examined: Dict[int, int] = field(default_factory=dict)

    @property
    def codes(self) -> Set[bytes]:
        return {o.code for o in self.obstructions}

    def to_dict(self) -> Dict:
        return {
            "max_n": self.max_n,
            "counts": {str(n): self.counts.get(n, 0) for n in range(self.max_n + 1)},
            "examined": {str(n): self.examined.get(n, 0) for n in range(self.max_n + 1)},
            "obstructions": [o.to_dict() for o in self.obstructions],
        }


def _obstruction_chunk(codes: Sequence[bytes]) -> List[bytes]:
    return [c for c in codes if is_obstruction(graph_from_code(c), completable=oracle_alt_completable)]


def enumerate_obstructions(
    max_n: int, threads: int = 1, allow_long: bool = False, long_limit: int = LONG_MAX_N
) -> EnumerationReport:
    limit = max(DEFAULT_MAX_N, min(long_limit, LONG_MAX_N)) if allow_long else DEFAULT_MAX_N
    if isinstance(max_n, bool) or not isinstance(max_n, int) or max_n < 0:
        raise EnumerationLimitError(f"max_n {max_n!r} must be a non-negative integer")
    if max_n > limit:
        hint = "" if allow_long or max_n > LONG_MAX_N else f" (n = {LONG_MAX_N} needs the long-running flag)"
        raise EnumerationLimitError(f"max_n {max_n} exceeds the limit of {limit}{hint}")

    threads = max(1, int(threads))
    found: List[bytes] = []
    counts: Dict[int, int] = {}
    examined: Dict[int, int] = {}
    started = time.monotonic()
    for n in range(max_n + 1):
        codes = _codes_on(n, threads)
        hits: List[bytes] = []
        for part in _map(_obstruction_chunk, _chunks(codes, threads * 4), threads):
            hits.extend(part)
        counts[n] = len(hits)
        examined[n] = len(codes)
        found.extend(hits)
        logging.info(
            f"[Enumerate] n={n}: {len(codes)} graphs, {len(hits)} obstructions "
            f"({time.monotonic() - started:.1f}s)"
        )

    obstructions = tuple(EnumeratedObstruction(c, graph_from_code(c)) for c in sorted(found))
    return EnumerationReport(max_n=max_n, obstructions=obstructions, counts=counts, examined=examined)
