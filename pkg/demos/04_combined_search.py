"""Combined text + formula search over the shipped acceptance corpus.

The text side is BM25, the math side the discrimination tree; a combined
query intersects the two and groups formula hits under each document.
"""

import importlib.resources

from mathfind import corpus
from mathfind.engine import CombinedQuery, search
from mathfind.texparse import unparse

corpus_path = importlib.resources.files("mathfind").joinpath(
    "data/acceptance_corpus.jsonl"
)
docs, warnings, corpus_hash = corpus.ingest_path(str(corpus_path))
snapshot = corpus.build_snapshot(docs, corpus_hash)
print(f"{snapshot.doc_count} docs, {snapshot.formula_count} formulas, "
      f"{len(warnings)} warnings\n")

SCENARIOS = [
    CombinedQuery(math="B_{p+n}"),
    CombinedQuery(text="Gröbner", math="a?x^2+b?y^2+?z"),
    CombinedQuery(math="C_{q+m}", alpha=True),
    CombinedQuery(text="zzz-not-present", math="?w"),
]
for q in SCENARIOS:
    label = " + ".join(filter(None, [q.text and f"text={q.text!r}",
                                     q.math and f"math={q.math!r}",
                                     "alpha" if q.alpha else None]))
    results = search(snapshot, q)
    print(f"query {label}: {len(results)} result(s)")
    for rank, r in enumerate(results[:3], start=1):
        score = f" text={r.text_score:.3f}" if r.text_score is not None else ""
        print(f"  {rank}. {r.title} ({r.doc_id}){score}")
        for h in r.formula_hits:
            print(f"     * {unparse(h.subterm)}  score {h.score}")
    print()
