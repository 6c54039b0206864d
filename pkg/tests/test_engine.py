import random

import pytest

from mathfind import corpus
from mathfind.engine import CombinedQuery, DocResult, EmptyQueryError, search
from mathfind.texparse import ParseError

import randtrees


def test_empty_query_is_typed_error():
    with pytest.raises(EmptyQueryError):
        CombinedQuery()
    with pytest.raises(EmptyQueryError):
        CombinedQuery(text="   ", math="")


def test_math_parse_error_propagates_position():
    snap = _tiny_snapshot()
    with pytest.raises(ParseError) as e:
        search(snap, CombinedQuery(math="a?x^2+b?("))
    assert e.value.position == 7  # the '?' with no name after it


def _tiny_snapshot():
    lines = [
        '{"id": "d1", "title": "Alpha", "text": "alpha words <math>x+y</math>"}',
        '{"id": "d2", "title": "Beta", "text": "beta words <math>x^2</math>"}',
    ]
    docs, _ = corpus.ingest_lines(lines)
    return corpus.build_snapshot(docs, timestamp=0.0)


def test_groebner_scenario(snapshot, manifest):
    results = search(
        snapshot, CombinedQuery(text="Gröbner", math="a?x^2+b?y^2+?z")
    )
    assert results
    first = results[0]
    assert first.doc_id == manifest["poly_doc_id"]
    assert first.text_score is not None
    assert len(first.formula_hits) >= 1
    hit = first.formula_hits[0]
    assert hit.ref.formula_id == 0
    subs = {k: v for k, v in hit.substitution.items()}
    assert set(subs) == {"x", "y", "z"}


def test_bell_exact_query(snapshot, manifest):
    results = search(snapshot, CombinedQuery(math="B_{p+n}"))
    assert len(results) == 1
    assert results[0].doc_id == manifest["bell_doc_id"]
    assert results[0].text_score is None
    assert len(results[0].formula_hits) == 1


def test_intersection_with_absent_text_is_empty(snapshot):
    assert search(snapshot, CombinedQuery(text="zzz-not-present", math="?w")) == []


def test_combined_invariants_on_random_corpora():
    rng = random.Random(31)
    words = ["alpha", "beta", "gamma", "delta", "omega", "prime", "matrix"]
    lines = []
    for i in range(30):
        body_words = rng.sample(words, rng.randint(1, 4))
        formulas = [
            f"<math>{randtrees.tree(rng, 2) and ''}x_{rng.randint(0, 9)} + {rng.choice('abc')}</math>"
            for _ in range(rng.randint(0, 3))
        ]
        text = " ".join(body_words + formulas)
        lines.append(
            f'{{"id": "d{i:02d}", "title": "T{i}", "text": {text!r}}}'.replace("'", '"')
        )
    docs, _ = corpus.ingest_lines(lines)
    snap = corpus.build_snapshot(docs, timestamp=0.0)

    for _ in range(30):
        text_q = " ".join(rng.sample(words, rng.randint(1, 2)))
        math_q = rng.choice(["?w", "x_3+?u", "a+?v", "x_1"])
        both = search(snap, CombinedQuery(text=text_q, math=math_q, limit=50))
        text_only = search(snap, CombinedQuery(text=text_q, limit=50))
        math_only = search(snap, CombinedQuery(math=math_q, limit=50))
        text_ids = {r.doc_id for r in text_only}
        math_ids = {r.doc_id for r in math_only}
        for r in both:
            # intersection soundness
            assert r.doc_id in text_ids and r.doc_id in math_ids
            # grouping completeness: same hits as the math-only result
            math_r = next(m for m in math_only if m.doc_id == r.doc_id)
            assert r.formula_hits == math_r.formula_hits
            # combined results carry both parts
            assert r.text_score is not None and r.formula_hits


def test_limit_monotonic_prefix(snapshot):
    q10 = search(snapshot, CombinedQuery(math="?w", limit=10))
    q11 = search(snapshot, CombinedQuery(math="?w", limit=11))
    assert q11[:10] == q10
    q1 = search(snapshot, CombinedQuery(math="?w", limit=1))
    assert q1 == q10[:1]


def test_formula_hits_sorted_by_score(snapshot):
    for r in search(snapshot, CombinedQuery(math="?u+?v", limit=30)):
        scores = [h.score for h in r.formula_hits]
        assert scores == sorted(scores, reverse=True)


def test_snippet_window(snapshot, manifest):
    results = search(snapshot, CombinedQuery(text="Gröbner"))
    first = results[0]
    assert first.doc_id == manifest["poly_doc_id"]
    assert "gröbner" in first.snippet.lower()
    assert len(first.snippet) <= 160


def test_snippet_falls_back_to_title(snapshot):
    results = search(snapshot, CombinedQuery(math="B_{p+n}"))
    assert results[0].snippet == results[0].title


def test_math_only_ordering_by_best_formula_score():
    lines = [
        '{"id": "small", "title": "S", "text": "<math>x+y</math>"}',
        '{"id": "large", "title": "L", "text": "<math>x+y+z+w</math>"}',
    ]
    docs, _ = corpus.ingest_lines(lines)
    snap = corpus.build_snapshot(docs, timestamp=0.0)
    results = search(snap, CombinedQuery(math="x+y"))
    assert [r.doc_id for r in results] == ["small"]  # exact-arity rule
    results = search(snap, CombinedQuery(math="x+?u"))
    # whole-formula matches on both; small formula scores higher
    assert [r.doc_id for r in results] == ["small", "large"]
