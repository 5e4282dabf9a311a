from __future__ import annotations

import io
import json
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path
from unittest import mock

import cli
import run_store
from obstruction import CatalogEntry, Family, catalog_build
from pog import make_pog
from storage import load_document, parse_document, save_document
from pog_fixtures import path_graph


class CliTestCase(unittest.TestCase):
    def setUp(self) -> None:
        self._td = tempfile.TemporaryDirectory()
        self.dir = Path(self._td.name)
        patcher = mock.patch.object(run_store, "RUNS_DB_PATH", str(self.dir / "runs.db"))
        patcher.start()
        self.addCleanup(patcher.stop)
        self.addCleanup(self._td.cleanup)

    def write(self, H, name: str = "h", title=None) -> str:
        path = str(self.dir / f"{name}.json")
        save_document(path, H, title)
        return path

    def run_cli(self, *argv: str):
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = cli.run(["--config", str(self.dir / "config.json"), *argv])
        return code, out.getvalue(), err.getvalue()


class CheckCommandTests(CliTestCase):
    def test_uncompletable_path(self) -> None:
        path = self.write(catalog_build(CatalogEntry(Family.F3_VI, 4)))
        code, out, _ = self.run_cli("check", path)
        self.assertEqual(code, 1)
        self.assertTrue(out.startswith("UNCOMPLETABLE"))
        self.assertIn("opposing unbalanced arcs", out)

    def test_json_with_oracle(self) -> None:
        path = self.write(path_graph(3, arcs=[(0, 1)]))
        code, out, _ = self.run_cli("check", path, "--json", "--oracle")
        self.assertEqual(code, 0)
        data = json.loads(out)
        self.assertTrue(data["completable"])
        self.assertTrue(data["verified"])
        self.assertTrue(data["oracle_agrees"])
        self.assertEqual(data["certificate"]["kind"], "completed")

    def test_claw_reports_the_witness(self) -> None:
        path = self.write(make_pog(4, [(0, 1), (0, 2), (0, 3)]))
        code, out, _ = self.run_cli("check", path)
        self.assertEqual(code, 1)
        self.assertIn("induced claw", out)


class CompleteCommandTests(CliTestCase):
    def test_prints_the_orientation(self) -> None:
        path = self.write(path_graph(3, arcs=[(0, 1)]), title="p3")
        code, out, _ = self.run_cli("complete", path)
        self.assertEqual(code, 0)
        H, name = parse_document(out)
        self.assertEqual(H.arcs, frozenset({(0, 1), (1, 2)}))
        self.assertEqual(name, "p3")

    def test_writes_the_output_file(self) -> None:
        path = self.write(path_graph(3, arcs=[(2, 1)]))
        target = str(self.dir / "out.json")
        code, out, _ = self.run_cli("complete", path, "-o", target)
        self.assertEqual((code, out), (0, ""))
        H, _ = load_document(target)
        self.assertEqual(H.edges, frozenset())
        self.assertEqual(len(H.arcs), 2)

    def test_failure_prints_the_certificate(self) -> None:
        path = self.write(make_pog(3, [], [(0, 1), (1, 2), (2, 0)]))
        code, out, _ = self.run_cli("complete", path)
        self.assertEqual(code, 1)
        self.assertEqual(json.loads(out)["kind"], "directed_cycle")


class ObstructionCommandTests(CliTestCase):
    def test_classify(self) -> None:
        path = self.write(catalog_build(CatalogEntry(Family.F2_I, dualized=True)))
        code, out, _ = self.run_cli("classify", path)
        self.assertEqual((code, out.strip()), (0, "F2_i size=4 dual=true"))
        code, out, _ = self.run_cli("classify", self.write(path_graph(3), "p"))
        self.assertEqual((code, out.strip()), (1, "not an obstruction"))

    def test_classify_five_vertex_obstruction(self) -> None:
        path = self.write(make_pog(5, [(0, 1), (3, 4), (1, 3)], [(1, 2), (3, 2)]))
        code, out, err = self.run_cli("--no-history", "classify", path)
        self.assertEqual((code, err), (0, ""))
        self.assertTrue(out.startswith("F3_ii size=5"))
        code, out, _ = self.run_cli("--no-history", "extract", path)
        self.assertEqual(code, 0)
        self.assertTrue(parse_document(out)[1].startswith("F3_ii"))

    def test_classify_json(self) -> None:
        path = self.write(catalog_build(CatalogEntry(Family.CYCLE, 5)))
        code, out, _ = self.run_cli("classify", path, "--json")
        data = json.loads(out)
        self.assertEqual(code, 0)
        self.assertEqual(data["name"], "Cycle(5)")
        self.assertTrue(data["vertex_minimal"])

    def test_extract_with_trace(self) -> None:
        path = self.write(make_pog(5, [(1, 2), (2, 3), (3, 0)], [(0, 1)]))
        code, out, _ = self.run_cli("extract", path, "--trace")
        self.assertEqual(code, 0)
        data = json.loads(out)
        self.assertEqual(data["document"]["name"], "Cycle(4)")
        self.assertEqual(data["kept_vertices"], [0, 1, 2, 3])
        self.assertEqual(data["relaxed_arcs"], [[0, 1]])

    def test_extract_on_completable_input(self) -> None:
        code, out, _ = self.run_cli("extract", self.write(path_graph(3)))
        self.assertEqual(code, 1)
        self.assertTrue(out.startswith("COMPLETABLE"))

    def test_catalog(self) -> None:
        code, out, _ = self.run_cli("catalog", "Cycle", "--size", "4")
        H, name = parse_document(out)
        self.assertEqual((code, H.n, len(H.edges), name), (0, 4, 4, "Cycle(4)"))
        code, out, _ = self.run_cli("catalog", "f3_vi", "--dual")
        H, name = parse_document(out)
        self.assertEqual((H.n, name), (3, "F3_vi(3) (dual)"))

    def test_catalog_list(self) -> None:
        code, out, _ = self.run_cli("catalog", "--list", "--max-vertices", "3")
        self.assertEqual(code, 0)
        names = sorted(line.split("\t")[0] for line in out.splitlines())
        self.assertEqual(names, ["F2_viii(3)", "F3_vi(3)", "F3_vi(3) (dual)"])

    def test_catalog_errors(self) -> None:
        code, _, err = self.run_cli("catalog", "Nope")
        self.assertEqual((code, json.loads(err)["error"]), (2, "catalog_parameter"))
        code, _, err = self.run_cli("catalog", "Cycle", "--size", "3")
        self.assertEqual(code, 2)
        code, _, err = self.run_cli("catalog")
        self.assertEqual((code, json.loads(err)["error"]), (2, "usage"))


class EnumerateCommandTests(CliTestCase):
    def test_output_is_deterministic(self) -> None:
        _, first, _ = self.run_cli("--no-history", "enumerate", "--max-n", "3")
        _, second, _ = self.run_cli("--no-history", "enumerate", "--max-n", "3", "--threads", "2")
        self.assertEqual(first, second)
        self.assertEqual(json.loads(first)["counts"], {"0": 0, "1": 0, "2": 0, "3": 3})

    def test_report_and_cache(self) -> None:
        target = str(self.dir / "reports" / "enum.json")
        code, out, _ = self.run_cli("enumerate", "--max-n", "3", "--report", target)
        self.assertEqual((code, out), (0, ""))
        payload = json.loads(Path(target).read_text(encoding="utf-8"))
        self.assertEqual(run_store.load_enum_report(3), payload)
        with mock.patch.object(cli, "enumerate_obstructions", side_effect=AssertionError("not cached")):
            code, out, _ = self.run_cli("enumerate", "--max-n", "3", "--cached")
        self.assertEqual((code, json.loads(out)), (0, payload))

    def test_bare_report_name_goes_to_report_dir(self) -> None:
        reports = self.dir / "reports"
        with mock.patch.object(cli, "REPORT_DIR", str(reports)):
            code, out, _ = self.run_cli("--no-history", "enumerate", "--max-n", "2", "--report", "small.json")
        self.assertEqual((code, out), (0, ""))
        self.assertEqual(json.loads((reports / "small.json").read_text(encoding="utf-8"))["max_n"], 2)
        self.assertFalse(Path("small.json").exists())

    def test_limit(self) -> None:
        code, _, err = self.run_cli("--no-history", "enumerate", "--max-n", "6")
        self.assertEqual((code, json.loads(err)["error"]), (2, "enumeration_limit"))

    def test_config_lowers_the_long_limit(self) -> None:
        (self.dir / "config.json").write_text(json.dumps({"enumerate": {"long_max_n": 5}}), encoding="utf-8")
        with mock.patch.object(cli, "enumerate_obstructions", wraps=cli.enumerate_obstructions) as spy:
            code, _, err = self.run_cli("--no-history", "enumerate", "--max-n", "6", "--long")
        self.assertEqual((code, json.loads(err)["error"]), (2, "enumeration_limit"))
        self.assertEqual(spy.call_args.kwargs["long_limit"], 5)


class GraphCommandTests(CliTestCase):
    def test_straight_enum(self) -> None:
        code, out, _ = self.run_cli("straight-enum", self.write(path_graph(3, arcs=[(2, 1)])))
        self.assertEqual(code, 0)
        self.assertTrue(json.loads(out)["proper_interval"])
        code, out, _ = self.run_cli("straight-enum", self.write(make_pog(4, [(0, 1), (0, 2), (0, 3)]), "claw"))
        self.assertEqual((code, json.loads(out)["witness"]["kind"]), (1, "claw"))

    def test_implication_classes(self) -> None:
        code, out, _ = self.run_cli("implication-classes", self.write(path_graph(3)))
        self.assertEqual(code, 0)
        self.assertEqual(len(json.loads(out)["classes"]), 1)

    def test_export_dot(self) -> None:
        code, out, _ = self.run_cli("export-dot", self.write(make_pog(3, [(0, 1)], [(2, 1)]), title="g"))
        self.assertEqual(code, 0)
        self.assertEqual(out, 'digraph "g" {\n  0;\n  1;\n  2;\n  0 -> 1 [dir=none];\n  2 -> 1;\n}\n')


class ErrorHandlingTests(CliTestCase):
    def test_bad_document(self) -> None:
        path = self.dir / "bad.json"
        path.write_text('{\n  "n": 2,\n  "edges": [[0, 2]],\n  "arcs": []\n}', encoding="utf-8")
        code, out, err = self.run_cli("check", str(path))
        self.assertEqual((code, out), (2, ""))
        data = json.loads(err)
        self.assertEqual(data["error"], "document")
        self.assertTrue(data["message"].startswith("line 3"))

    def test_usage_error(self) -> None:
        code, _, err = self.run_cli("check")
        self.assertEqual((code, json.loads(err)["error"]), (2, "usage"))
        code, _, err = self.run_cli("frobnicate")
        self.assertEqual((code, json.loads(err)["error"]), (2, "usage"))

    def test_unexpected_errors_are_internal(self) -> None:
        path = self.write(path_graph(3))
        with mock.patch.object(cli, "complete", side_effect=RuntimeError("boom")):
            with self.assertLogs(level="ERROR"):
                code, _, err = self.run_cli("check", path)
        self.assertEqual((code, json.loads(err)), (2, {"error": "internal", "message": "boom"}))


class HistoryTests(CliTestCase):
    def test_commands_are_logged(self) -> None:
        path = self.write(path_graph(3))
        self.run_cli("check", path)
        self.run_cli("check", str(self.dir / "missing.json"))
        rows = run_store.list_cmd_log(limit=5)
        self.assertEqual([(r["command"], r["exit_code"]) for r in rows], [("check", 2), ("check", 0)])
        self.assertIn(path, rows[1]["argv"])

    def test_no_history_leaves_the_database_alone(self) -> None:
        self.run_cli("--no-history", "check", self.write(path_graph(3)))
        self.assertFalse((self.dir / "runs.db").exists())


if __name__ == "__main__":
    unittest.main()
