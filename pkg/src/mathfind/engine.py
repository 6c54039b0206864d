"""Combined query evaluation: intersect text hits with formula hits.

Text-only queries rank by BM25.  Math-only queries group formula hits by
document, ordered by best formula score.  When both parts are present, only
documents that match the text AND contain at least one matching formula are
returned, ordered by text score (best formula score, then doc id, break
ties); the limit applies after the intersection.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

from .canon import canonicalize
from .corpus import Document, IndexSnapshot
from .mathindex import FormulaHit
from .texparse import parse_query, unparse
from .textindex import text_search, tokenize


class EmptyQueryError(ValueError):
    """Both query parts are empty."""


@dataclass(frozen=True, slots=True)
class CombinedQuery:
    text: str | None = None
    math: str | None = None
    alpha: bool = False
    limit: int = 10

    def __post_init__(self) -> None:
        if not (self.text or "").strip() and not (self.math or "").strip():
            raise EmptyQueryError("at least one of text/math must be nonempty")
        if self.limit < 1:
            raise ValueError("limit must be positive")


@dataclass(frozen=True, slots=True)
class DocResult:
    doc_id: str
    title: str
    text_score: float | None  # None when the text part is empty
    snippet: str
    formula_hits: tuple[FormulaHit, ...]  # sorted by score descending


SNIPPET_WIDTH = 160


def make_snippet(doc: Document, query_tokens: list[str]) -> str:
    """Fixed-width window around the first query token found in the body."""
    haystack = doc.index_text.lower()
    for token in query_tokens:
        pos = haystack.find(token)
        if pos < 0:
            continue
        center = pos + len(token) // 2
        start = max(0, center - SNIPPET_WIDTH // 2)
        end = min(len(doc.index_text), start + SNIPPET_WIDTH)
        start = max(0, end - SNIPPET_WIDTH)
        return " ".join(doc.index_text[start:end].split())
    return doc.title


@dataclass(slots=True)
class _Evaluation:
    results: list[DocResult]  # full result list, before the limit
    text_ms: float = 0.0
    math_ms: float = 0.0


def _evaluate(snapshot: IndexSnapshot, q: CombinedQuery) -> _Evaluation:
    text_part = (q.text or "").strip()
    math_part = (q.math or "").strip()

    math_hits_by_doc: dict[str, list[FormulaHit]] = {}
    math_ms = 0.0
    if math_part:
        t0 = time.perf_counter()
        pattern = canonicalize(parse_query(math_part))
        for hit in snapshot.math.query(pattern, q.alpha):
            math_hits_by_doc.setdefault(hit.ref.doc_id, []).append(hit)
        math_ms = round((time.perf_counter() - t0) * 1000.0, 3)

    if not text_part:
        # math only: docs by best formula score, ties by doc_id
        ordered = sorted(
            math_hits_by_doc.items(), key=lambda kv: (-kv[1][0].score, kv[0])
        )
        results = [
            _doc_result(snapshot.documents[doc_id], None, [], hits)
            for doc_id, hits in ordered
        ]
        return _Evaluation(results, 0.0, math_ms)

    t0 = time.perf_counter()
    query_tokens = tokenize(text_part)
    text_ranked = text_search(snapshot.text, text_part, limit=None)
    text_ms = round((time.perf_counter() - t0) * 1000.0, 3)

    results = []
    if not math_part:
        for doc_id, score in text_ranked:
            doc = snapshot.documents[doc_id]
            results.append(_doc_result(doc, score, query_tokens, []))
        return _Evaluation(results, text_ms, 0.0)

    # both parts: intersection, text score dominates
    kept = [(d, s) for d, s in text_ranked if d in math_hits_by_doc]
    kept.sort(key=lambda kv: (-kv[1], -math_hits_by_doc[kv[0]][0].score, kv[0]))
    for doc_id, score in kept:
        doc = snapshot.documents[doc_id]
        results.append(_doc_result(doc, score, query_tokens, math_hits_by_doc[doc_id]))
    return _Evaluation(results, text_ms, math_ms)


def search(snapshot: IndexSnapshot, q: CombinedQuery) -> list[DocResult]:
    """Evaluate a combined query against a frozen snapshot.

    Math parse errors propagate as texparse.ParseError with a position.
    """
    return _evaluate(snapshot, q).results[: q.limit]


def _doc_result(
    doc: Document,
    text_score: float | None,
    query_tokens: list[str],
    hits: list[FormulaHit],
) -> DocResult:
    return DocResult(
        doc_id=doc.doc_id,
        title=doc.title,
        text_score=text_score,
        snippet=make_snippet(doc, query_tokens) if query_tokens else doc.title,
        formula_hits=tuple(hits),
    )


# --- canonical JSON rendering (shared verbatim by the CLI and the service) ---


def hit_jsonable(snapshot: IndexSnapshot, hit: FormulaHit, alpha: bool) -> dict:
    doc = snapshot.documents[hit.ref.doc_id]
    formula = doc.formulas[hit.ref.formula_id]
    obj = {
        "formula_id": hit.ref.formula_id,
        "path": list(hit.ref.path),
        "score": str(hit.score),
        "latex": unparse(hit.subterm),
        "formula_latex": formula.latex_source,
        "substitution": [
            {"wildcard": name, "latex": unparse(tree)}
            for name, tree in sorted(hit.substitution.items())
        ],
    }
    if alpha:
        obj["renaming"] = [
            {"from": a, "to": b} for a, b in sorted(hit.renaming.items())
        ]
    return obj


def result_jsonable(snapshot: IndexSnapshot, r: DocResult, alpha: bool) -> dict:
    obj: dict = {"doc_id": r.doc_id, "title": r.title}
    if r.text_score is not None:
        obj["text_score"] = r.text_score
    obj["snippet"] = r.snippet
    obj["formula_hits"] = [hit_jsonable(snapshot, h, alpha) for h in r.formula_hits]
    return obj


def search_response(snapshot: IndexSnapshot, q: CombinedQuery) -> dict:
    """Run the query and build the canonical response body.

    total counts matching documents before the limit; the timings are the
    one non-deterministic part of the body.
    """
    ev = _evaluate(snapshot, q)
    return {
        "results": [
            result_jsonable(snapshot, r, q.alpha) for r in ev.results[: q.limit]
        ],
        "total": len(ev.results),
        "timings": {"text_ms": ev.text_ms, "math_ms": ev.math_ms},
    }
