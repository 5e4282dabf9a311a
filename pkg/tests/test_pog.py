from __future__ import annotations

import itertools
import random
import unittest

from hypothesis import given
from hypothesis import strategies as st

import pog
from pog import (
    InvalidGraphError,
    MissingArcError,
    NotAnEdgeError,
    canonical_code,
    canonical_form,
    delete_vertex,
    dual,
    graph_from_code,
    is_acyclic_local_tournament,
    make_graph,
    make_pog,
    mixed_isomorphic,
    orient,
    relabel,
    relax_arc,
    underlying,
)
from oracle import mixed_graphs
from pog_fixtures import LONG, PROPERTY_SETTINGS, all_labelled, path_graph, pogs

F2_I = make_pog(4, [[1, 2], [0, 2], [1, 3]], [(0, 1), (3, 2)])


def _classes_by_iso(graphs):
    reps = []
    for H in graphs:
        if not any(mixed_isomorphic(H, R) is not None for R in reps):
            reps.append(H)
    return reps


class MakePogTests(unittest.TestCase):
    def test_single_arc(self) -> None:
        H = make_pog(2, [], [(0, 1)])
        self.assertEqual(H.n, 2)
        self.assertEqual(H.arcs, frozenset({(0, 1)}))
        self.assertEqual(H.edges, frozenset())

    def test_edges_are_normalised_and_deduplicated(self) -> None:
        H = make_pog(3, [[2, 1], [1, 2], [0, 1]], [])
        self.assertEqual(H.edges, frozenset({(1, 2), (0, 1)}))

    def test_catalog_member_graph(self) -> None:
        self.assertEqual(F2_I.edges, frozenset({(1, 2), (0, 2), (1, 3)}))
        self.assertEqual(F2_I.arcs, frozenset({(0, 1), (3, 2)}))

    def test_rejects_digon(self) -> None:
        with self.assertRaises(InvalidGraphError):
            make_pog(3, [], [(0, 1), (1, 0)])

    def test_rejects_self_loop_range_and_role_conflict(self) -> None:
        with self.assertRaises(InvalidGraphError):
            make_pog(3, [(1, 1)], [])
        with self.assertRaises(InvalidGraphError):
            make_pog(3, [], [(0, 3)])
        with self.assertRaises(InvalidGraphError):
            make_pog(3, [(0, 1)], [(1, 0)])
        with self.assertRaises(InvalidGraphError):
            make_pog(-1)

    def test_errors_are_value_errors(self) -> None:
        self.assertTrue(issubclass(InvalidGraphError, ValueError))


class EditTests(unittest.TestCase):
    def test_underlying(self) -> None:
        self.assertEqual(underlying(make_pog(2, [], [(0, 1)])).edges, frozenset({(0, 1)}))
        G = underlying(F2_I)
        self.assertEqual(G.edges, frozenset({(0, 1), (1, 2), (0, 2), (1, 3), (2, 3)}))
        self.assertFalse(G.arcs)
        P = path_graph(3)
        self.assertEqual(underlying(P), P)

    def test_dual(self) -> None:
        self.assertEqual(dual(F2_I).arcs, frozenset({(1, 0), (2, 3)}))
        self.assertEqual(dual(F2_I).edges, F2_I.edges)
        P = path_graph(4)
        self.assertEqual(dual(P), P)

    @PROPERTY_SETTINGS
    @given(pogs())
    def test_dual_is_an_involution_over_the_same_graph(self, H) -> None:
        self.assertEqual(dual(dual(H)), H)
        self.assertEqual(underlying(dual(H)), underlying(H))

    def test_delete_vertex(self) -> None:
        P = path_graph(3)
        self.assertEqual(delete_vertex(P, 2), make_graph(2, [(0, 1)]))
        self.assertEqual(delete_vertex(P, 1), make_graph(2))
        # Higher indices shift down.
        self.assertEqual(delete_vertex(P, 0), make_graph(2, [(0, 1)]))
        H = make_pog(4, [(0, 3)], [(3, 1)])
        self.assertEqual(delete_vertex(H, 2), make_pog(3, [(0, 2)], [(2, 1)]))
        with self.assertRaises(InvalidGraphError):
            delete_vertex(P, 3)

    def test_orient_undoes_relax_arc(self) -> None:
        for a in sorted(F2_I.arcs):
            self.assertEqual(orient(relax_arc(F2_I, a), [a]), F2_I)
        with self.assertRaises(NotAnEdgeError):
            orient(F2_I, [(0, 1)])
        with self.assertRaises(NotAnEdgeError):
            orient(path_graph(3), [(0, 2)])

    def test_relax_arc(self) -> None:
        H = make_pog(2, [], [(0, 1)])
        self.assertEqual(relax_arc(H, (0, 1)), make_graph(2, [(0, 1)]))
        with self.assertRaises(MissingArcError):
            relax_arc(H, (1, 0))
        R = relax_arc(F2_I, (3, 2))
        self.assertEqual(R.arcs, frozenset({(0, 1)}))
        self.assertIn((2, 3), R.edges)

    @PROPERTY_SETTINGS
    @given(pogs(min_n=1), st.data())
    def test_edits_keep_graphs_valid(self, H, data) -> None:
        v = data.draw(st.integers(min_value=0, max_value=H.n - 1))
        D = delete_vertex(H, v)
        self.assertEqual(make_pog(D.n, D.edges, D.arcs), D)
        for a in sorted(H.arcs):
            R = relax_arc(H, a)
            self.assertEqual(make_pog(R.n, R.edges, R.arcs), R)
            self.assertEqual(underlying(R), underlying(H))


class LocalTournamentTests(unittest.TestCase):
    def test_examples(self) -> None:
        self.assertTrue(is_acyclic_local_tournament(make_pog(3, [], [(0, 1), (1, 2), (0, 2)])))
        self.assertFalse(is_acyclic_local_tournament(make_pog(3, [], [(0, 1), (1, 2), (2, 0)])))
        self.assertFalse(is_acyclic_local_tournament(make_pog(4, [], [(0, 1), (0, 2), (0, 3)])))
        self.assertFalse(is_acyclic_local_tournament(make_pog(2, [(0, 1)], [])))
        self.assertTrue(is_acyclic_local_tournament(make_pog(0)))

    def test_agrees_with_direct_definition(self) -> None:
        for n in range(5):
            for states in itertools.product((0, 2, 3), repeat=n * (n - 1) // 2):
                D = pog.graph_from_states(n, states)
                nbrs_ok = all(
                    pog.is_clique(D, D.out_arcs[v]) and pog.is_clique(D, D.in_arcs[v]) for v in range(D.n)
                )
                order = list(range(n))
                acyclic = any(
                    all(p.index(u) < p.index(w) for u, w in D.arcs) for p in itertools.permutations(order)
                ) if n else True
                self.assertEqual(is_acyclic_local_tournament(D), nbrs_ok and acyclic, msg=str(sorted(D.arcs)))


class IsomorphismTests(unittest.TestCase):
    def test_identity_and_reversal(self) -> None:
        P = path_graph(3)
        self.assertIsNotNone(mixed_isomorphic(P, P))
        m = mixed_isomorphic(F2_I, F2_I)
        self.assertEqual(relabel(F2_I, m), F2_I)
        rev = relabel(P, [2, 1, 0])
        self.assertIsNotNone(mixed_isomorphic(P, rev))

    def test_arc_and_edge_differ(self) -> None:
        self.assertIsNone(mixed_isomorphic(make_pog(2, [], [(0, 1)]), make_graph(2, [(0, 1)])))
        self.assertNotEqual(canonical_code(make_pog(2, [], [(0, 1)])), canonical_code(make_graph(2, [(0, 1)])))

    def test_mapping_preserves_structure(self) -> None:
        H = make_pog(5, [(0, 1), (1, 2), (3, 4)], [(2, 3), (4, 0)])
        perm = [3, 0, 4, 1, 2]
        K = relabel(H, perm)
        m = mixed_isomorphic(H, K)
        self.assertIsNotNone(m)
        self.assertEqual(relabel(H, m), K)

    def test_fixed_member_is_not_self_dual(self) -> None:
        self.assertIsNone(mixed_isomorphic(F2_I, dual(F2_I)))


class CanonicalCodeTests(unittest.TestCase):
    @PROPERTY_SETTINGS
    @given(pogs(max_n=7), st.randoms(use_true_random=False))
    def test_code_is_relabelling_invariant(self, H, rnd) -> None:
        perm = list(range(H.n))
        rnd.shuffle(perm)
        self.assertEqual(canonical_code(H), canonical_code(relabel(H, perm)))

    @PROPERTY_SETTINGS
    @given(pogs(max_n=7))
    def test_code_decodes_to_an_isomorphic_graph(self, H) -> None:
        code, form = canonical_form(H)
        self.assertEqual(graph_from_code(code), form)
        self.assertIsNotNone(mixed_isomorphic(H, form))
        self.assertEqual(code[0], H.n)

    def test_distinct_codes_match_isomorphism_classes_on_three_vertices(self) -> None:
        graphs = list(all_labelled(3))
        self.assertEqual(len(graphs), 64)
        reps = _classes_by_iso(graphs)
        self.assertEqual(len({canonical_code(H) for H in graphs}), len(reps))

    def test_codes_agree_with_isomorphism_exhaustively(self) -> None:
        for n in range(5 if LONG else 4):
            by_code = {}
            for H in all_labelled(n):
                by_code.setdefault(canonical_code(H), []).append(H)
            for group in by_code.values():
                for H in group[1:]:
                    self.assertIsNotNone(mixed_isomorphic(group[0], H))
            reps = [g[0] for g in by_code.values()]
            for A, B in itertools.combinations(reps, 2):
                self.assertIsNone(mixed_isomorphic(A, B))

    def test_enumerated_classes_have_stable_distinct_codes(self) -> None:
        rnd = random.Random(5)
        n = 5 if LONG else 4
        buckets = {}
        for H in mixed_graphs(n):
            code = canonical_code(H)
            for _ in range(3):
                perm = list(range(n))
                rnd.shuffle(perm)
                self.assertEqual(canonical_code(relabel(H, perm)), code)
            buckets.setdefault(pog._quick_invariant(H), []).append(H)
        for group in buckets.values():
            for A, B in itertools.combinations(group, 2):
                self.assertIsNone(mixed_isomorphic(A, B))

    def test_random_pairs_on_eight_vertices(self) -> None:
        rnd = random.Random(8)
        rounds = 10_000 if LONG else 300
        for _ in range(rounds):
            A = pog.graph_from_states(8, [rnd.choice((0, 0, 1, 2, 3)) for _ in range(28)])
            if rnd.random() < 0.5:
                perm = list(range(8))
                rnd.shuffle(perm)
                B = relabel(A, perm)
            else:
                B = pog.graph_from_states(8, [rnd.choice((0, 0, 1, 2, 3)) for _ in range(28)])
            same = canonical_code(A) == canonical_code(B)
            self.assertEqual(same, mixed_isomorphic(A, B) is not None)

    def test_bad_codes(self) -> None:
        with self.assertRaises(InvalidGraphError):
            graph_from_code(b"")
        with self.assertRaises(InvalidGraphError):
            graph_from_code(bytes([3, 0]))
        with self.assertRaises(InvalidGraphError):
            graph_from_code(bytes([2, 7]))


if __name__ == "__main__":
    unittest.main()
