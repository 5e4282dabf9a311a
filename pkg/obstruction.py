# obstruction.py
"""
Obstruction catalog, the definitional obstruction test, greedy extraction of
a minimal obstruction from an uncompletable input, and classification of a
mixed graph against the catalog up to isomorphism and duality.

Fixed families live in catalog_fixed.json; parametric families (cycles,
the Hamiltonian-cycle cliques, inward-arc paths and the two stretched
patterns) are built here.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import networkx as nx

from completion import can_complete, find_directed_cycle
from implication import arc_balancing_vertex, universal_vertices
from pog import (
    CatalogParameterError,
    CompletableError,
    Pair,
    PartiallyOrientedGraph,
    PogError,
    canonical_code,
    delete_vertex,
    dual,
    make_pog,
    mixed_isomorphic,
    relax_arc,
    to_nx_graph,
    underlying,
)
from settings import CATALOG_PATH
from storage import load_json

Completable = Callable[[PartiallyOrientedGraph], bool]


class Family(str, Enum):
    CYCLE = "Cycle"
    TENT = "Tent"
    CLAW = "Claw"
    NET = "Net"
    F2_I = "F2_i"
    F2_II = "F2_ii"
    F2_III = "F2_iii"
    F2_IV = "F2_iv"
    F2_V = "F2_v"
    F2_VI = "F2_vi"
    F2_VII = "F2_vii"
    F2_VIII = "F2_viii"
    F3_I = "F3_i"
    F3_II = "F3_ii"
    F3_III = "F3_iii"
    F3_IV = "F3_iv"
    F3_V = "F3_v"
    F3_VI = "F3_vi"
    F3_VII = "F3_vii"
    F3_VIII = "F3_viii"


# Smallest member of each parametric family.
PARAMETRIC_MINIMUM: Dict[Family, int] = {
    Family.CYCLE: 4,
    Family.F2_VIII: 3,
    Family.F3_V: 5,
    Family.F3_VI: 3,
    Family.F3_VIII: 7,
}

FIXED_SIZE: Dict[Family, int] = {
    Family.CLAW: 4,
    Family.NET: 6,
    Family.TENT: 6,
    Family.F2_I: 4,
    Family.F2_II: 4,
    Family.F2_III: 5,
    Family.F2_IV: 5,
    Family.F2_V: 5,
    Family.F2_VI: 6,
    Family.F2_VII: 6,
    Family.F3_I: 4,
    Family.F3_II: 5,
    Family.F3_III: 5,
    Family.F3_IV: 6,
    Family.F3_VII: 6,
}

ARCLESS = frozenset({Family.CYCLE, Family.TENT, Family.CLAW, Family.NET})
# Completable to a (possibly cyclic) local tournament.
LT_COMPLETABLE = frozenset(f for f in Family if f.value.startswith("F2_"))
NOT_LT_COMPLETABLE = frozenset(f for f in Family if f.value.startswith("F3_"))


@dataclass(frozen=True)
class CatalogEntry:
    family: Family
    size: Optional[int] = None
    dualized: bool = False

    @property
    def parametric(self) -> bool:
        return self.family in PARAMETRIC_MINIMUM

    @property
    def vertex_count(self) -> int:
        return self.size if self.parametric else FIXED_SIZE[self.family]

    @property
    def name(self) -> str:
        base = self.family.value
        if self.parametric:
            base = f"{base}({self.size})"
        return f"{base} (dual)" if self.dualized else base

    def to_dict(self) -> Dict:
        return {"family": self.family.value, "size": self.vertex_count, "dualized": self.dualized}


@dataclass(frozen=True)
class ObstructionReport:
    graph: PartiallyOrientedGraph
    entry: Optional[CatalogEntry]


@dataclass(frozen=True)
class ExtractionTrace:
    obstruction: PartiallyOrientedGraph
    # Original indices of the surviving vertices, in their new order.
    kept_vertices: Tuple[int, ...]
    # Relaxed arcs, in original indices.
    relaxed_arcs: Tuple[Pair, ...]


# ----------------------------
# Catalog construction
# ----------------------------
@lru_cache(maxsize=None)
def _fixed_members() -> Dict[str, PartiallyOrientedGraph]:
    raw = load_json(CATALOG_PATH, fallback={})
    if not isinstance(raw, dict):
        raise CatalogParameterError(f"{CATALOG_PATH} must hold a JSON object")
    out: Dict[str, PartiallyOrientedGraph] = {}
    for family, row in raw.items():
        try:
            out[family] = make_pog(row["n"], row.get("edges", []), row.get("arcs", []))
        except (PogError, KeyError, TypeError, AttributeError) as e:
            logging.error(f"[Catalog] bad entry {family}: {e}")
            raise CatalogParameterError(f"bad catalog entry {family} in {CATALOG_PATH}: {e}")
    problems = catalog_self_check(out)
    if problems:
        for problem in problems:
            logging.error(f"[Catalog] {problem}")
        raise CatalogParameterError(f"catalog table {CATALOG_PATH} failed its self-check: {'; '.join(problems)}")
    return out


def _cycle(k: int) -> PartiallyOrientedGraph:
    return make_pog(k, [(i, (i + 1) % k) for i in range(k)])


def _hamiltonian_clique(n: int) -> PartiallyOrientedGraph:
    arcs = [(i, (i + 1) % n) for i in range(n)]
    cyc = {frozenset(a) for a in arcs}
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if frozenset((u, v)) not in cyc]
    return make_pog(n, edges, arcs)


def _inward_path(n: int) -> PartiallyOrientedGraph:
    edges = [(i, i + 1) for i in range(1, n - 2)]
    return make_pog(n, edges, [(0, 1), (n - 1, n - 2)])


def _stretched_pendant_triangle(n: int) -> PartiallyOrientedGraph:
    # Pendant 0 on 1, triangle 1-2-3 with arc (1,2), path 3..n-2, arc (n-1, n-2).
    tail = n - 2
    edges = [(0, 1), (1, 3), (2, 3)] + [(i, i + 1) for i in range(3, tail)]
    return make_pog(n, edges, [(1, 2), (n - 1, tail)])


def _stretched_twin_triangles(n: int) -> PartiallyOrientedGraph:
    # Two pendant triangles joined by the path 3..n-4, arcs pointing into the path side.
    p = n - 4
    a, b, c = n - 3, n - 2, n - 1
    edges = [(0, 1), (1, 3), (2, 3)] + [(i, i + 1) for i in range(3, p)]
    edges += [(p, a), (p, b), (b, c)]
    return make_pog(n, edges, [(1, 2), (b, a)])


_PARAMETRIC_BUILDERS: Dict[Family, Callable[[int], PartiallyOrientedGraph]] = {
    Family.CYCLE: _cycle,
    Family.F2_VIII: _hamiltonian_clique,
    Family.F3_VI: _inward_path,
    Family.F3_V: _stretched_pendant_triangle,
    Family.F3_VIII: _stretched_twin_triangles,
}


def catalog_build(entry: CatalogEntry) -> PartiallyOrientedGraph:
    family = Family(entry.family)
    if family in PARAMETRIC_MINIMUM:
        size = entry.size
        minimum = PARAMETRIC_MINIMUM[family]
        if not isinstance(size, int) or isinstance(size, bool) or size < minimum:
            raise CatalogParameterError(f"{family.value} needs a size of at least {minimum}, got {size!r}")
        H = _PARAMETRIC_BUILDERS[family](size)
    else:
        if entry.size is not None and entry.size != FIXED_SIZE[family]:
            raise CatalogParameterError(f"{family.value} has exactly {FIXED_SIZE[family]} vertices")
        members = _fixed_members()
        if family.value not in members:
            raise CatalogParameterError(f"{family.value} is missing from {CATALOG_PATH}")
        H = members[family.value]
    return dual(H) if entry.dualized else H


def catalog_entries(max_vertices: int) -> List[CatalogEntry]:
    """Every catalog member on at most max_vertices vertices, duals included unless isomorphic."""
    entries: List[CatalogEntry] = []
    for family in Family:
        if family in PARAMETRIC_MINIMUM:
            sizes = range(PARAMETRIC_MINIMUM[family], max_vertices + 1)
        else:
            sizes = [None] if FIXED_SIZE[family] <= max_vertices else []
        for size in sizes:
            base = CatalogEntry(family, size)
            entries.append(base)
            H = catalog_build(base)
            if H.arcs and canonical_code(dual(H)) != canonical_code(H):
                entries.append(CatalogEntry(family, size, dualized=True))
    return entries


def catalog_family_split(entry: CatalogEntry) -> Optional[bool]:
    """True for local-tournament-completable families, False for the rest, None when arcless."""
    family = Family(entry.family)
    if family in ARCLESS:
        return None
    return family in LT_COMPLETABLE


# ----------------------------
# Obstruction tests
# ----------------------------
def _sub_checks(H: PartiallyOrientedGraph) -> List[PartiallyOrientedGraph]:
    subs = [delete_vertex(H, v) for v in range(H.n)]
    subs.extend(relax_arc(H, a) for a in sorted(H.arcs))
    return subs


def is_obstruction(H: PartiallyOrientedGraph, completable: Optional[Completable] = None, workers: int = 1) -> bool:
    check = completable or can_complete
    if check(H):
        return False
    subs = _sub_checks(H)
    if workers > 1 and len(subs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return all(pool.map(check, subs))
    return all(check(S) for S in subs)


def is_vertex_minimal(H: PartiallyOrientedGraph, completable: Optional[Completable] = None) -> bool:
    """Uncompletable, and every single vertex deletion is completable (arcs may stay tight)."""
    check = completable or can_complete
    if check(H):
        return False
    return all(check(delete_vertex(H, v)) for v in range(H.n))


def critically_contains(H: PartiallyOrientedGraph, H2: PartiallyOrientedGraph, embedding: Sequence[int]) -> bool:
    """H2 arises from H by deleting vertices then relaxing arcs, vertex i of H2 sitting at embedding[i]."""
    emb = list(embedding)
    if len(emb) != H2.n or len(set(emb)) != len(emb):
        return False
    if any(not isinstance(v, int) or v < 0 or v >= H.n for v in emb):
        return False
    for i in range(H2.n):
        for j in range(i + 1, H2.n):
            x, y = emb[i], emb[j]
            if (i, j) in H2.arcs:
                ok = (x, y) in H.arcs
            elif (j, i) in H2.arcs:
                ok = (y, x) in H.arcs
            elif H2.adjacent(i, j):
                ok = H.adjacent(x, y)
            else:
                ok = not H.adjacent(x, y)
            if not ok:
                return False
    return True


def extract_obstruction_trace(H: PartiallyOrientedGraph, completable: Optional[Completable] = None) -> ExtractionTrace:
    check = completable or can_complete
    if check(H):
        raise CompletableError("input is completable; it contains no obstruction")

    # Completability is preserved under deletion and relaxation, so one pass
    # over vertices and one over arcs leaves nothing removable.
    kept = list(range(H.n))
    cur = H
    i = 0
    while i < len(kept):
        cand = delete_vertex(cur, i)
        if check(cand):
            i += 1
        else:
            logging.debug(f"[Obstruction] deleted vertex {kept[i]}")
            cur = cand
            del kept[i]

    relaxed: List[Pair] = []
    for a in sorted(cur.arcs):
        cand = relax_arc(cur, a)
        if not check(cand):
            cur = cand
            relaxed.append((kept[a[0]], kept[a[1]]))
            logging.debug(f"[Obstruction] relaxed arc {relaxed[-1]}")

    return ExtractionTrace(obstruction=cur, kept_vertices=tuple(kept), relaxed_arcs=tuple(relaxed))


def extract_obstruction(H: PartiallyOrientedGraph, completable: Optional[Completable] = None) -> PartiallyOrientedGraph:
    return extract_obstruction_trace(H, completable).obstruction


# ----------------------------
# Classification
# ----------------------------
def _is_chordless_cycle(H: PartiallyOrientedGraph) -> bool:
    if H.arcs or H.n < 4 or len(H.edges) != H.n:
        return False
    if any(H.degree(v) != 2 for v in range(H.n)):
        return False
    return nx.is_connected(to_nx_graph(H))


def _is_hamiltonian_clique(H: PartiallyOrientedGraph) -> bool:
    n = H.n
    if n < 3 or len(H.arcs) != n or len(H.underlying_edges) != n * (n - 1) // 2:
        return False
    if any(len(H.out_arcs[v]) != 1 or len(H.in_arcs[v]) != 1 for v in range(n)):
        return False
    cycle = find_directed_cycle(H)
    return cycle is not None and len(cycle) == n


def _inward_path_orientation(H: PartiallyOrientedGraph) -> Optional[bool]:
    """None unless H is a chordless path with one arc at each end, both inward or both outward."""
    n = H.n
    if n < 3 or len(H.arcs) != 2 or len(H.underlying_edges) != n - 1:
        return None
    G = to_nx_graph(underlying(H))
    if not nx.is_connected(G):
        return None
    ends = [v for v in range(n) if H.degree(v) == 1]
    if len(ends) != 2 or any(H.degree(v) > 2 for v in range(n)):
        return None
    arcs = sorted(H.arcs)
    if all(a[0] in ends for a in arcs) and {a[0] for a in arcs} == set(ends):
        return False
    if all(a[1] in ends for a in arcs) and {a[1] for a in arcs} == set(ends):
        return True
    return None


def _match(H: PartiallyOrientedGraph, family: Family, size: Optional[int]) -> Optional[CatalogEntry]:
    for dualized in (False, True):
        entry = CatalogEntry(family, size, dualized)
        if mixed_isomorphic(H, catalog_build(entry)) is not None:
            return entry
    return None


def classify_obstruction(H: PartiallyOrientedGraph) -> Optional[CatalogEntry]:
    if _is_chordless_cycle(H):
        return CatalogEntry(Family.CYCLE, H.n)
    if _is_hamiltonian_clique(H):
        return CatalogEntry(Family.F2_VIII, H.n)
    dualized = _inward_path_orientation(H)
    if dualized is not None:
        return CatalogEntry(Family.F3_VI, H.n, dualized=dualized)

    for family, size in FIXED_SIZE.items():
        if size == H.n:
            found = _match(H, family, None)
            if found is not None:
                return found

    if len(H.arcs) == 2:
        for family in (Family.F3_V, Family.F3_VIII):
            if H.n >= PARAMETRIC_MINIMUM[family]:
                found = _match(H, family, H.n)
                if found is not None:
                    return found
    return None


def obstruction_report(H: PartiallyOrientedGraph) -> Optional[ObstructionReport]:
    if not is_obstruction(H):
        return None
    return ObstructionReport(graph=H, entry=classify_obstruction(H))


# ----------------------------
# Structural checks (test support)
# ----------------------------
@dataclass(frozen=True)
class StructureCheck:
    applicable: bool
    # Every vertex off the arcs whose removal keeps the graph connected balances some arc.
    balancing_ok: bool
    # Some universal vertex meets exactly one arc; None when not asked.
    universal_ok: Optional[bool]


def structure_checks(H: PartiallyOrientedGraph, lt_completable: Optional[bool] = None) -> StructureCheck:
    """Structural facts every arc-carrying, cycle-free obstruction satisfies.

    Removing a cut vertex may separate the two opposing arcs, after which
    neither needs balancing; such vertices are skipped.
    """
    if not H.arcs or find_directed_cycle(H) is not None:
        return StructureCheck(applicable=False, balancing_ok=True, universal_ok=None)

    g = to_nx_graph(H)
    cut = set(nx.articulation_points(g)) if nx.is_connected(g) else set(range(H.n))
    on_arc = {v for a in H.arcs for v in a}
    balancers = {arc_balancing_vertex(H, a) for a in H.arcs}
    balancing_ok = all(v in balancers for v in range(H.n) if v not in on_arc and v not in cut)

    universal_ok: Optional[bool] = None
    if lt_completable:
        universal_ok = any(
            sum(1 for a in H.arcs if z in a) == 1 for z in universal_vertices(underlying(H))
        )
    return StructureCheck(applicable=True, balancing_ok=balancing_ok, universal_ok=universal_ok)


def catalog_self_check(
    members: Dict[str, PartiallyOrientedGraph], completable: Optional[Completable] = None
) -> List[str]:
    problems: List[str] = []
    for family, size in FIXED_SIZE.items():
        H = members.get(family.value)
        if H is None:
            problems.append(f"{family.value} missing")
            continue
        if H.n != size:
            problems.append(f"{family.value} has {H.n} vertices, expected {size}")
        if (family in ARCLESS) != (not H.arcs):
            problems.append(f"{family.value} arc set does not match its family")
        if not is_obstruction(H, completable):
            problems.append(f"{family.value} is not an obstruction")
    return problems
