#!/usr/bin/env python3
# cli.py
"""
Command-line front end for partially oriented graph completion.

Usage:
    python3 cli.py check FILE [--json] [--oracle]
    python3 cli.py complete FILE [-o OUT]
    python3 cli.py classify FILE [--json]
    python3 cli.py extract FILE [--trace]
    python3 cli.py catalog ENTRY [--size K] [--dual]
    python3 cli.py catalog --list [--max-vertices K]
    python3 cli.py enumerate [--max-n N] [--report OUT] [--threads K] [--long] [--cached]
    python3 cli.py straight-enum FILE
    python3 cli.py implication-classes FILE
    python3 cli.py export-dot FILE

Graph files are JSON documents: {"n": 4, "edges": [[1, 2]], "arcs": [[0, 1]], "name": "..."}.
Exit status: 0 affirmative answer, 1 negative answer with certificate, 2 invalid input.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from datetime import datetime, timezone
from logging.handlers import RotatingFileHandler
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

# Load env early: settings resolves its paths at import.
load_dotenv(os.path.join(os.path.dirname(os.path.abspath(__file__)), ".env"))

import run_store
from completion import Completed, complete, verify_certificate
from implication import implication_classes
from interval import straight_enumeration, wegner_witness
from obstruction import (
    CatalogEntry,
    Family,
    PARAMETRIC_MINIMUM,
    catalog_build,
    catalog_entries,
    classify_obstruction,
    extract_obstruction_trace,
    is_obstruction,
    is_vertex_minimal,
)
from oracle import LONG_MAX_N, enumerate_obstructions, oracle_alt_completable
from pog import CatalogParameterError, PartiallyOrientedGraph, PogError, summary, underlying
from settings import LOG_PATH, REPORT_DIR
from storage import dumps_document, load_config, load_document, save_json_atomic, save_text_atomic


class UsageError(PogError):
    kind = "usage"


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


# ----------------------------
# Logging
# ----------------------------
class _JsonLineFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        payload = {
            "ts": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        if record.exc_info:
            payload["exc"] = self.formatException(record.exc_info)
        return json.dumps(payload, ensure_ascii=False)


def _configure_logging(verbose: bool = False, cfg: Optional[Dict[str, Any]] = None) -> None:
    root = logging.getLogger()
    root.setLevel(logging.DEBUG if verbose else logging.INFO)
    # Avoid duplicate handlers when main() runs twice in one process.
    for h in list(root.handlers):
        root.removeHandler(h)

    log_cfg = (cfg or {}).get("logging") or {}
    max_bytes = int(log_cfg.get("max_bytes") or 5 * 1024 * 1024)
    backups = int(log_cfg.get("backup_count") or 5)
    try:
        fh = RotatingFileHandler(LOG_PATH, maxBytes=max(1024 * 1024, max_bytes), backupCount=max(1, backups), encoding="utf-8")
        fh.setLevel(logging.INFO)
        fh.setFormatter(_JsonLineFormatter())
        root.addHandler(fh)
    except OSError:
        pass

    sh = logging.StreamHandler()
    sh.setLevel(logging.DEBUG if verbose else logging.WARNING)
    sh.setFormatter(logging.Formatter("%(asctime)s - %(levelname)s - %(message)s"))
    root.addHandler(sh)


# ----------------------------
# Output helpers
# ----------------------------
def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_json(data: Any) -> None:
    _emit(json.dumps(data, indent=2, ensure_ascii=False))


def _pair(p) -> str:
    return f"({p[0]},{p[1]})"


def _certificate_summary(cert) -> str:
    if isinstance(cert, Completed):
        return f"completed orientation with {len(cert.orientation.arcs)} arcs"
    d = cert.to_dict()
    if d["kind"] == "not_proper_interval":
        w = d["witness"]
        size = f" of length {w['length']}" if "length" in w else ""
        return f"underlying graph is not proper interval: induced {w['kind']}{size} on {w['vertices']}"
    if d["kind"] == "directed_cycle":
        return f"directed cycle among arcs: {d['cycle']}"
    return (
        f"opposing unbalanced arcs: positive {_pair(d['positive_arc'])}, "
        f"negative {_pair(d['negative_arc'])} under order {d['order']}"
    )


def _entry_from_name(raw: str, size: Optional[int], dualized: bool) -> CatalogEntry:
    wanted = raw.strip().lower()
    for family in Family:
        if family.value.lower() == wanted:
            return CatalogEntry(family, size, dualized)
    raise CatalogParameterError(f"unknown catalog entry {raw!r}; choose from {', '.join(f.value for f in Family)}")


def _classification(H: PartiallyOrientedGraph, workers: int) -> Dict[str, Any]:
    obstruction = is_obstruction(H, workers=workers)
    entry = classify_obstruction(H) if obstruction else None
    return {
        "obstruction": obstruction,
        "entry": entry.to_dict() if entry else None,
        "name": entry.name if entry else None,
        "vertex_minimal": is_vertex_minimal(H),
    }


# ----------------------------
# Subcommands
# ----------------------------
def _cmd_check(args, cfg) -> int:
    H, _name = load_document(args.file)
    logging.info(f"[CLI] check {args.file}: {summary(H)}")
    cert = complete(H)
    ok = isinstance(cert, Completed)
    agrees: Optional[bool] = None
    if args.oracle:
        agrees = oracle_alt_completable(H, edge_cap=int(cfg["oracle"]["edge_cap"])) == ok
        if not agrees:
            logging.error(f"[CLI] oracle disagrees with the engine on {args.file}")
    if args.json:
        out: Dict[str, Any] = {"completable": ok, "certificate": cert.to_dict(), "verified": verify_certificate(H, cert)}
        if agrees is not None:
            out["oracle_agrees"] = agrees
        _emit_json(out)
    else:
        _emit("COMPLETABLE" if ok else "UNCOMPLETABLE")
        if not ok:
            _emit(_certificate_summary(cert))
        if agrees is not None:
            _emit(f"oracle agrees: {'yes' if agrees else 'no'}")
    return 0 if ok else 1


def _cmd_complete(args, cfg) -> int:
    H, name = load_document(args.file)
    cert = complete(H)
    if not isinstance(cert, Completed):
        _emit_json(cert.to_dict())
        return 1
    text = dumps_document(cert.orientation, name)
    if args.output:
        save_text_atomic(args.output, text)
        logging.info(f"[CLI] wrote completion to {args.output}")
    else:
        _emit(text)
    return 0


def _cmd_classify(args, cfg) -> int:
    H, _name = load_document(args.file)
    info = _classification(H, int(cfg["obstruction"]["workers"]))
    if args.json:
        _emit_json(info)
    elif info["entry"] is not None:
        _emit(f"{info['entry']['family']} size={info['entry']['size']} dual={'true' if info['entry']['dualized'] else 'false'}")
    elif info["obstruction"]:
        _emit("obstruction outside the catalog")
    else:
        _emit("not an obstruction")
    return 0 if info["entry"] is not None else 1


def _cmd_extract(args, cfg) -> int:
    H, _name = load_document(args.file)
    logging.info(f"[CLI] extract {args.file}: {summary(H)}")
    cert = complete(H)
    if isinstance(cert, Completed):
        _emit("COMPLETABLE: no obstruction to extract")
        return 1
    trace = extract_obstruction_trace(H)
    entry = classify_obstruction(trace.obstruction)
    label = entry.name if entry else "unclassified obstruction"
    if args.trace:
        _emit_json(
            {
                "document": json.loads(dumps_document(trace.obstruction, label)),
                "entry": entry.to_dict() if entry else None,
                "kept_vertices": list(trace.kept_vertices),
                "relaxed_arcs": [list(a) for a in trace.relaxed_arcs],
            }
        )
    else:
        _emit(dumps_document(trace.obstruction, label))
    return 0


def _cmd_catalog(args, cfg) -> int:
    if args.list:
        limit = args.max_vertices if args.max_vertices is not None else 8
        for entry in catalog_entries(limit):
            H = catalog_build(entry)
            _emit(f"{entry.name}\tn={H.n}\tedges={len(H.edges)}\tarcs={len(H.arcs)}")
        return 0
    if not args.entry:
        raise UsageError("catalog needs an ENTRY or --list")
    entry = _entry_from_name(args.entry, None, args.dual)
    if entry.family in PARAMETRIC_MINIMUM:
        entry = CatalogEntry(entry.family, args.size if args.size is not None else PARAMETRIC_MINIMUM[entry.family], args.dual)
    elif args.size is not None:
        entry = CatalogEntry(entry.family, args.size, args.dual)
    _emit(dumps_document(catalog_build(entry), entry.name))
    return 0


def _report_path(name: str) -> str:
    # A bare file name lands in REPORT_DIR.
    if os.path.isabs(name) or os.path.dirname(name):
        return name
    return os.path.join(REPORT_DIR, name)


def _cmd_enumerate(args, cfg) -> int:
    ecfg = cfg["enumerate"]
    max_n = args.max_n if args.max_n is not None else int(ecfg["max_n"])
    threads = args.threads if args.threads is not None else int(ecfg["threads"])

    payload: Optional[Dict[str, Any]] = None
    if args.cached and not args.no_history:
        try:
            payload = run_store.load_enum_report(max_n)
        except Exception as e:
            logging.warning(f"[RunStore] cached report unavailable: {e}")
        if payload is not None:
            logging.info(f"[CLI] using cached enumeration for max_n={max_n}")
    if payload is None:
        long_limit = int(ecfg.get("long_max_n", LONG_MAX_N))
        payload = enumerate_obstructions(max_n, threads=threads, allow_long=args.long, long_limit=long_limit).to_dict()
        if not args.no_history:
            try:
                run_store.save_enum_report(max_n, payload)
            except Exception as e:
                logging.warning(f"[RunStore] could not cache report: {e}")

    if args.report:
        target = _report_path(args.report)
        save_json_atomic(target, payload)
        logging.info(f"[CLI] wrote report to {target}")
    else:
        _emit_json(payload)
    return 0


def _cmd_straight_enum(args, cfg) -> int:
    H, _name = load_document(args.file)
    G = underlying(H)
    order = straight_enumeration(G)
    if order is None:
        _emit_json({"proper_interval": False, "witness": wegner_witness(G).to_dict()})
        return 1
    _emit_json({"proper_interval": True, "order": list(order.order)})
    return 0


def _cmd_implication_classes(args, cfg) -> int:
    H, _name = load_document(args.file)
    _emit_json(implication_classes(underlying(H)).to_dict())
    return 0


def to_dot(H: PartiallyOrientedGraph, name: Optional[str] = None) -> str:
    title = json.dumps(name or "H", ensure_ascii=False)
    lines = [f"digraph {title} {{"]
    for v in range(H.n):
        lines.append(f"  {v};")
    for u, v in sorted(H.edges):
        lines.append(f"  {u} -> {v} [dir=none];")
    for u, v in sorted(H.arcs):
        lines.append(f"  {u} -> {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _cmd_export_dot(args, cfg) -> int:
    H, name = load_document(args.file)
    _emit(to_dot(H, name))
    return 0


# ----------------------------
# Parser + dispatch
# ----------------------------
def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pogc", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--config", metavar="PATH", help="config file overriding CONFIG_PATH")
    parser.add_argument("--no-history", action="store_true", help="do not touch the run database")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("check")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.add_argument("--oracle", action="store_true", help="cross-check with the brute-force oracle")
    p.set_defaults(handler=_cmd_check)

    p = sub.add_parser("complete")
    p.add_argument("file")
    p.add_argument("-o", "--output", metavar="OUT")
    p.set_defaults(handler=_cmd_complete)

    p = sub.add_parser("classify")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_classify)

    p = sub.add_parser("extract")
    p.add_argument("file")
    p.add_argument("--trace", action="store_true", help="also print kept vertices and relaxed arcs")
    p.set_defaults(handler=_cmd_extract)

    p = sub.add_parser("catalog")
    p.add_argument("entry", nargs="?")
    p.add_argument("--size", type=int, metavar="K")
    p.add_argument("--dual", action="store_true")
    p.add_argument("--list", action="store_true")
    p.add_argument("--max-vertices", type=int, metavar="K")
    p.set_defaults(handler=_cmd_catalog)

    p = sub.add_parser("enumerate")
    p.add_argument("--max-n", type=int, metavar="N")
    p.add_argument("--report", metavar="OUT", help="bare file names go to REPORT_DIR")
    p.add_argument("--threads", type=int, metavar="K")
    p.add_argument("--long", action="store_true", help="allow the n = 6 run")
    p.add_argument("--cached", action="store_true", help="reuse a stored report for the same max-n")
    p.set_defaults(handler=_cmd_enumerate)

    for name, handler in (
        ("straight-enum", _cmd_straight_enum),
        ("implication-classes", _cmd_implication_classes),
        ("export-dot", _cmd_export_dot),
    ):
        p = sub.add_parser(name)
        p.add_argument("file")
        p.set_defaults(handler=handler)

    return parser


def _record(args, argv: List[str], code: int) -> None:
    if args is None or args.no_history:
        return
    try:
        run_store.insert_cmd_log(args.command, argv, code)
    except Exception as e:
        logging.warning(f"[RunStore] command log write failed: {e}")


def _fail(kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}, ensure_ascii=False) + "\n")
    return 2


def run(argv: List[str]) -> int:
    args = None
    try:
        args = build_parser().parse_args(argv)
        cfg = load_config(args.config)
        code = args.handler(args, cfg)
    except SystemExit as e:
        # --help
        return int(e.code or 0)
    except PogError as e:
        code = _fail(e.kind, str(e))
    except Exception as e:
        logging.error(f"[CLI] {type(e).__name__}: {e}", exc_info=True)
        code = _fail("internal", str(e))
    _record(args, argv, code)
    return code


def main(argv: Optional[List[str]] = None) -> None:
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("-v", "--verbose", action="store_true")
    pre.add_argument("--config")
    known, _rest = pre.parse_known_args(argv)
    _configure_logging(known.verbose, load_config(known.config))
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
