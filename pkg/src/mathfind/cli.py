"""Operator entry points: build a snapshot, query it, serve HTTP, parse LaTeX.

Exit codes: 0 success, 1 I/O or ingest failure, 2 bad query.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path as FsPath

from . import corpus, jsonio
from .engine import CombinedQuery, EmptyQueryError, search_response
from .service import BackendPool, create_app
from .texparse import ParseError, parse_formula, parse_query, unparse
from .canon import canonicalize
from .expr import to_jsonable


def _cmd_build(args: argparse.Namespace) -> int:
    try:
        docs, warnings, corpus_hash = corpus.ingest_path(args.corpus)
    except FileNotFoundError:
        print(f"error: corpus file not found: {args.corpus}", file=sys.stderr)
        return 1
    except corpus.IngestError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    snapshot = corpus.build_snapshot(docs, corpus_hash)
    try:
        corpus.save(snapshot, args.out)
    except OSError as e:
        print(f"error: cannot write snapshot: {e}", file=sys.stderr)
        return 1
    print(
        f"{snapshot.doc_count} docs, {snapshot.formula_count} formulas, "
        f"{len(warnings)} warnings -> {args.out}"
    )
    for w in warnings:
        print(f"warning: line {w.line_no} ({w.doc_id}): {w.message}", file=sys.stderr)
    return 0


def _load_snapshot(path: str) -> corpus.IndexSnapshot | None:
    try:
        return corpus.load(path)
    except (corpus.SnapshotError, FileNotFoundError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return None


def _cmd_query(args: argparse.Namespace) -> int:
    snapshot = _load_snapshot(args.index)
    if snapshot is None:
        return 1
    try:
        q = CombinedQuery(
            text=args.text, math=args.math, alpha=args.alpha, limit=args.limit
        )
    except EmptyQueryError:
        print("error: provide --text and/or --math", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    try:
        body = search_response(snapshot, q)
    except ParseError as e:
        print(f"error: math pattern: {e}", file=sys.stderr)
        return 2
    if args.json:
        sys.stdout.write(jsonio.dumps(body))
        sys.stdout.write("\n")
        return 0
    results = body["results"]
    if not results:
        print("no results")
        return 0
    for rank, r in enumerate(results, start=1):
        score = f" [text {r['text_score']:.4f}]" if "text_score" in r else ""
        print(f"{rank}. {r['title']} ({r['doc_id']}){score}")
        if r["snippet"] != r["title"]:
            print(f"   {r['snippet']}")
        for hit in r["formula_hits"]:
            subs = ", ".join(
                f"?{s['wildcard']} -> {s['latex']}" for s in hit["substitution"]
            )
            line = f"   * {hit['formula_latex']}  (match {hit['latex']}, score {hit['score']})"
            print(line)
            if subs:
                print(f"     {subs}")
    print(f"total: {body['total']}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    snapshot = _load_snapshot(args.index)
    if snapshot is None:
        return 1
    host, _, port_s = args.listen.rpartition(":")
    if not host or not port_s.isdigit():
        print(f"error: --listen must be host:port, got {args.listen!r}", file=sys.stderr)
        return 1
    webui_dir = args.webui if args.webui else _default_webui_dir()
    app = create_app(snapshot, BackendPool(args.backend), webui_dir=webui_dir)
    import uvicorn

    uvicorn.run(app, host=host, port=int(port_s), log_level="warning")
    return 0


def _default_webui_dir() -> str | None:
    # the frontend bundle, when built alongside a source checkout
    candidate = FsPath(__file__).resolve().parents[2] / "frontend" / "dist"
    return str(candidate) if candidate.is_dir() else None


def _cmd_parse(args: argparse.Namespace) -> int:
    try:
        tree = parse_query(args.latex) if args.query else parse_formula(args.latex)
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    body = {
        "ok": True,
        "tree": to_jsonable(tree),
        "canonical_latex": unparse(canonicalize(tree)),
    }
    print(jsonio.dumps(body))
    return 0


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mathfind", description="combined text and formula search"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="ingest a JSONL corpus into a snapshot")
    p_build.add_argument("--corpus", required=True, help="corpus .jsonl path")
    p_build.add_argument("--out", required=True, help="snapshot output directory")
    p_build.set_defaults(func=_cmd_build)

    p_query = sub.add_parser("query", help="run a combined query on a snapshot")
    p_query.add_argument("--index", required=True, help="snapshot directory")
    p_query.add_argument("--text", default=None, help="text query")
    p_query.add_argument("--math", default=None, help="math pattern, ?name wildcards")
    p_query.add_argument("--alpha", action="store_true", help="match up to renaming")
    p_query.add_argument("--limit", type=int, default=10)
    p_query.add_argument("--json", action="store_true", help="print the API body")
    p_query.set_defaults(func=_cmd_query)

    p_serve = sub.add_parser("serve", help="serve the HTTP API")
    p_serve.add_argument("--index", required=True, help="snapshot directory")
    p_serve.add_argument("--listen", default="127.0.0.1:8080", help="host:port")
    p_serve.add_argument(
        "--backend",
        action="append",
        default=[],
        help="render backend base URL (repeatable)",
    )
    p_serve.add_argument("--webui", default=None, help="static web UI directory")
    p_serve.set_defaults(func=_cmd_serve)

    p_parse = sub.add_parser("parse", help="parse one LaTeX formula")
    p_parse.add_argument("--latex", required=True)
    p_parse.add_argument("--query", action="store_true", help="allow ?name wildcards")
    p_parse.set_defaults(func=_cmd_parse)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
