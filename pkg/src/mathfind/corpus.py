"""Corpus ingestion and snapshot persistence.

Input is JSON Lines: one {"id", "title", "text"} object per line, where the
text may contain <math>...</math> spans holding LaTeX.  Spans are extracted
(non-greedy, no nesting), parsed and canonicalized; a span that fails to
parse becomes a warning and is skipped while the document is kept.  The text
handed to the text index has every math span replaced by a single space.

A snapshot is one directory of UTF-8 JSON files:

    meta.json       {"version", "corpus_hash", "created", "doc_count",
                     "formula_count"}
    docs.jsonl      one document per line, id/title/text plus its formulas
                    (formula_id, latex, expr tree, byte span), input order
    mathindex.json  {"formulas": [{"doc", "formula", "expr"}, ...]}; the
                    discrimination tree is rebuilt from these on load
    textindex.json  {"doc_len": {...}, "postings": {term: [[doc, tf], ...]}}

All iteration orders are fixed, so the same input bytes always produce the
same snapshot bytes (set SOURCE_DATE_EPOCH or pass a timestamp to also pin
the created field).
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import time
from dataclasses import dataclass, field
from pathlib import Path as FsPath

from . import jsonio
from .canon import canonicalize
from .expr import MathExpr, from_jsonable, to_jsonable
from .mathindex import ArityCapError, DiscTree, check_arity_cap
from .texparse import ParseError, parse_formula
from .textindex import TextIndex, build_text_index

FORMAT_VERSION = "1"

_MATH_SPAN = re.compile(r"<math>(.*?)</math>", re.DOTALL)


class IngestError(Exception):
    """Hard ingestion failure (malformed input line)."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class SnapshotError(Exception):
    """Unreadable or incompatible snapshot."""


@dataclass(frozen=True, slots=True)
class Formula:
    formula_id: int  # ordinal among the document's parsed formulas
    latex_source: str
    expr: MathExpr  # canonical
    byte_span: tuple[int, int]  # of the whole <math>...</math> region


@dataclass(frozen=True, slots=True)
class Document:
    doc_id: str
    title: str
    body: str
    formulas: tuple[Formula, ...]
    index_text: str  # body with math spans blanked out


@dataclass(frozen=True, slots=True)
class IngestWarning:
    line_no: int
    doc_id: str
    latex_source: str
    message: str


def _byte_offset(text: str, char_offset: int) -> int:
    return len(text[:char_offset].encode("utf-8"))


def ingest_lines(lines) -> tuple[list[Document], list[IngestWarning]]:
    """Parse a JSON Lines corpus; blank lines are skipped."""
    docs: list[Document] = []
    warnings: list[IngestWarning] = []
    seen_ids: set[str] = set()
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise IngestError(line_no, f"invalid JSON: {e.msg}") from e
        if not isinstance(obj, dict):
            raise IngestError(line_no, "expected a JSON object")
        try:
            doc_id = obj["id"]
            title = obj["title"]
            text = obj["text"]
        except KeyError as e:
            raise IngestError(line_no, f"missing field {e.args[0]!r}") from e
        if not isinstance(doc_id, str) or not doc_id:
            raise IngestError(line_no, "id must be a nonempty string")
        if not isinstance(title, str) or not isinstance(text, str):
            raise IngestError(line_no, "title and text must be strings")
        if doc_id in seen_ids:
            raise IngestError(line_no, f"duplicate doc id {doc_id!r}")
        seen_ids.add(doc_id)

        formulas: list[Formula] = []
        for span in _MATH_SPAN.finditer(text):
            latex = span.group(1)
            try:
                tree = canonicalize(parse_formula(latex))
                check_arity_cap(tree)
            except (ParseError, ArityCapError) as e:
                warnings.append(IngestWarning(line_no, doc_id, latex, str(e)))
                continue
            byte_span = (_byte_offset(text, span.start()), _byte_offset(text, span.end()))
            formulas.append(Formula(len(formulas), latex, tree, byte_span))
        index_text = _MATH_SPAN.sub(" ", text)
        docs.append(Document(doc_id, title, text, tuple(formulas), index_text))
    return docs, warnings


def ingest_path(path: str | FsPath) -> tuple[list[Document], list[IngestWarning], str]:
    """Ingest a corpus file; also returns the sha256 of its raw bytes."""
    raw = FsPath(path).read_bytes()
    corpus_hash = hashlib.sha256(raw).hexdigest()
    docs, warnings = ingest_lines(raw.decode("utf-8").splitlines())
    return docs, warnings, corpus_hash


@dataclass(slots=True)
class IndexSnapshot:
    version: str
    corpus_hash: str
    created: str
    documents: dict[str, Document]
    doc_order: list[str]
    math: DiscTree
    text: TextIndex
    formula_count: int = 0

    @property
    def doc_count(self) -> int:
        return len(self.documents)


def _created_stamp(timestamp: float | None) -> str:
    if timestamp is None:
        epoch = os.environ.get("SOURCE_DATE_EPOCH")
        timestamp = float(epoch) if epoch else time.time()
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(timestamp))


def build_snapshot(
    docs: list[Document], corpus_hash: str = "", timestamp: float | None = None
) -> IndexSnapshot:
    math = DiscTree()
    for doc in docs:
        for f in doc.formulas:
            math.insert(f.expr, doc.doc_id, f.formula_id)
    text = build_text_index([(d.doc_id, d.index_text) for d in docs])
    return IndexSnapshot(
        version=FORMAT_VERSION,
        corpus_hash=corpus_hash,
        created=_created_stamp(timestamp),
        documents={d.doc_id: d for d in docs},
        doc_order=[d.doc_id for d in docs],
        math=math,
        text=text,
        formula_count=sum(len(d.formulas) for d in docs),
    )


def save(snapshot: IndexSnapshot, path: str | FsPath) -> None:
    out = FsPath(path)
    out.mkdir(parents=True, exist_ok=True)
    meta = {
        "version": snapshot.version,
        "corpus_hash": snapshot.corpus_hash,
        "created": snapshot.created,
        "doc_count": snapshot.doc_count,
        "formula_count": snapshot.formula_count,
    }
    (out / "meta.json").write_bytes(jsonio.dump_bytes(meta))

    with open(out / "docs.jsonl", "w", encoding="utf-8") as fh:
        for doc_id in snapshot.doc_order:
            doc = snapshot.documents[doc_id]
            fh.write(
                jsonio.dumps(
                    {
                        "id": doc.doc_id,
                        "title": doc.title,
                        "text": doc.body,
                        "formulas": [
                            {
                                "formula_id": f.formula_id,
                                "latex": f.latex_source,
                                "expr": to_jsonable(f.expr),
                                "span": list(f.byte_span),
                            }
                            for f in doc.formulas
                        ],
                    }
                )
            )
            fh.write("\n")

    formulas = [
        {"doc": doc_id, "formula": f.formula_id, "expr": to_jsonable(f.expr)}
        for doc_id in snapshot.doc_order
        for f in snapshot.documents[doc_id].formulas
    ]
    (out / "mathindex.json").write_bytes(jsonio.dump_bytes({"formulas": formulas}))
    (out / "textindex.json").write_bytes(jsonio.dump_bytes(snapshot.text.to_jsonable()))


def load(path: str | FsPath) -> IndexSnapshot:
    root = FsPath(path)
    try:
        meta = json.loads((root / "meta.json").read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise SnapshotError(f"not a snapshot directory: {root}") from e
    except json.JSONDecodeError as e:
        raise SnapshotError(f"corrupt meta.json: {e}") from e
    version = str(meta.get("version"))
    if version != FORMAT_VERSION:
        raise SnapshotError(
            f"snapshot version {version!r} not supported (expected {FORMAT_VERSION!r})"
        )

    documents: dict[str, Document] = {}
    doc_order: list[str] = []
    with open(root / "docs.jsonl", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            formulas = tuple(
                Formula(
                    formula_id=int(f["formula_id"]),
                    latex_source=str(f["latex"]),
                    expr=from_jsonable(f["expr"]),  # type: ignore[arg-type]
                    byte_span=(int(f["span"][0]), int(f["span"][1])),
                )
                for f in obj["formulas"]
            )
            doc = Document(
                doc_id=str(obj["id"]),
                title=str(obj["title"]),
                body=str(obj["text"]),
                formulas=formulas,
                index_text=_MATH_SPAN.sub(" ", str(obj["text"])),
            )
            documents[doc.doc_id] = doc
            doc_order.append(doc.doc_id)

    math_obj = json.loads((root / "mathindex.json").read_text(encoding="utf-8"))
    math = DiscTree()
    for entry in math_obj["formulas"]:
        math.insert(
            from_jsonable(entry["expr"]),  # type: ignore[arg-type]
            str(entry["doc"]),
            int(entry["formula"]),
        )

    text_obj = json.loads((root / "textindex.json").read_text(encoding="utf-8"))
    text = TextIndex.from_jsonable(text_obj)

    return IndexSnapshot(
        version=version,
        corpus_hash=str(meta.get("corpus_hash", "")),
        created=str(meta.get("created", "")),
        documents=documents,
        doc_order=doc_order,
        math=math,
        text=text,
        formula_count=int(meta.get("formula_count", 0)),
    )
