"""Full-text half of the engine: tokenizer, inverted index, BM25 ranking.

Scoring uses BM25 with k1 = 1.2, b = 0.75 and the Lucene-style smoothed idf

    idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5))
    score(q, d) = sum over unique query tokens t in d of
                  idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl/avgdl))

Query tokens are OR-combined; documents sharing no token are not returned.
No stemming and no stop-words, so behaviour is language-neutral and exact.
"""

from __future__ import annotations

import math
import unicodedata
from dataclasses import dataclass, field

K1 = 1.2
B = 0.75


def _fold_ascii(token: str) -> str:
    decomposed = unicodedata.normalize("NFKD", token)
    return "".join(c for c in decomposed if c.isascii() and not unicodedata.combining(c))


def tokenize(text: str) -> list[str]:
    """Lowercased tokens split on non-letter/non-digit characters.

    Text is NFC-normalized first.  A token containing non-ASCII letters is
    emitted twice: as-is and ASCII-folded (diacritics stripped), so Gröbner
    is findable as both gröbner and grobner.  Folds that come out empty or
    unchanged are not duplicated.
    """
    text = unicodedata.normalize("NFC", text).lower()
    out: list[str] = []
    current: list[str] = []

    def flush() -> None:
        if not current:
            return
        token = "".join(current)
        current.clear()
        out.append(token)
        if not token.isascii():
            folded = _fold_ascii(token)
            if folded and folded != token:
                out.append(folded)

    for ch in text:
        if ch.isalpha() or ch.isdigit():
            current.append(ch)
        else:
            flush()
    flush()
    return out


@dataclass(slots=True)
class Posting:
    doc_id: str
    tf: int  # term frequency, >= 1


@dataclass(slots=True)
class TextIndex:
    """Frozen after build; any number of readers may share it."""

    postings: dict[str, list[Posting]] = field(default_factory=dict)
    doc_len: dict[str, int] = field(default_factory=dict)

    @property
    def doc_count(self) -> int:
        return len(self.doc_len)

    def add_document(self, doc_id: str, text: str) -> None:
        if doc_id in self.doc_len:
            raise ValueError(f"duplicate doc_id {doc_id!r}")
        tokens = tokenize(text)
        self.doc_len[doc_id] = max(len(tokens), 1)
        counts: dict[str, int] = {}
        for t in tokens:
            counts[t] = counts.get(t, 0) + 1
        for term, tf in counts.items():
            self.postings.setdefault(term, []).append(Posting(doc_id, tf))

    def freeze(self) -> None:
        """Fix iteration orders so identical corpora serialize identically."""
        for plist in self.postings.values():
            plist.sort(key=lambda p: p.doc_id)
        self.postings = dict(sorted(self.postings.items()))
        self.doc_len = dict(sorted(self.doc_len.items()))

    def to_jsonable(self) -> dict:
        return {
            "doc_len": self.doc_len,
            "postings": {
                term: [[p.doc_id, p.tf] for p in plist]
                for term, plist in self.postings.items()
            },
        }

    @classmethod
    def from_jsonable(cls, obj: dict) -> "TextIndex":
        index = cls()
        index.doc_len = {str(k): int(v) for k, v in obj["doc_len"].items()}
        index.postings = {
            term: [Posting(str(d), int(tf)) for d, tf in plist]
            for term, plist in obj["postings"].items()
        }
        return index


def build_text_index(docs: list[tuple[str, str]]) -> TextIndex:
    index = TextIndex()
    for doc_id, text in docs:
        index.add_document(doc_id, text)
    index.freeze()
    return index


def text_search(
    index: TextIndex, query: str, limit: int | None = None
) -> list[tuple[str, float]]:
    """BM25-ranked (doc_id, score), ties broken by doc_id ascending."""
    n = index.doc_count
    if n == 0:
        return []
    avgdl = sum(index.doc_len.values()) / n
    scores: dict[str, float] = {}
    for term in sorted(set(tokenize(query))):  # fixed order: deterministic floats
        plist = index.postings.get(term)
        if not plist:
            continue
        df = len(plist)
        idf = math.log(1.0 + (n - df + 0.5) / (df + 0.5))
        for p in plist:
            dl = index.doc_len[p.doc_id]
            tf_part = p.tf * (K1 + 1.0) / (p.tf + K1 * (1.0 - B + B * dl / avgdl))
            scores[p.doc_id] = scores.get(p.doc_id, 0.0) + idf * tf_part
    ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    if limit is not None:
        ranked = ranked[:limit]
    return ranked
