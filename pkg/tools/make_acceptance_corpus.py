#!/usr/bin/env python3
"""Generate the shipped 100-document acceptance corpus.

Deterministic (fixed seed).  Two hand-written pages carry the formulas the
acceptance queries look for; 98 distractor pages carry synthetic prose and
500+ generated formulas.  Distractor formulas never use a compound subscript
index, so the subscript-of-a-sum shape exists only on the Bell page and the
alpha query has exactly one place to land.

Writes src/mathfind/data/acceptance_corpus.jsonl and acceptance_manifest.json,
then re-ingests and re-runs the acceptance queries as a self-check.
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from mathfind import canon, corpus, expr, mathindex, texparse  # noqa: E402

SEED = 20130717
DATA_DIR = ROOT / "src" / "mathfind" / "data"

BELL_DOC = {
    "id": "bell-numbers",
    "title": "Bell numbers",
    "text": (
        "The Bell numbers count the partitions of a finite set. Modulo a prime "
        "they satisfy the Touchard congruence "
        "<math>B_{p+n} = B_n + B_{n+1} \\bmod p \\ \\text{for all}\\ n=0,1,2,\\dots</math> "
        "which makes the sequence eventually periodic modulo every prime. The "
        "minimal period divides a number that grows quickly with the prime."
    ),
}

POLY_DOC = {
    "id": "stable-normal-forms",
    "title": "Stable Normal Forms for Polynomial System Solving",
    "text": (
        "Border bases generalize Gr\u00f6bner bases and behave more stably under "
        "perturbation of the coefficients. As a running example consider the "
        "perturbed quadric <math>p_1=ax_1^2+bx_2^2+\\epsilon_1x_1y_1</math> whose "
        "normal form against a border basis stays continuous while a Gr\u00f6bner "
        "basis computation may jump. Stability is measured against the ideal "
        "<math>I = f, g</math> under small perturbations <math>\\epsilon_1, "
        "\\epsilon_2, \\dots</math> of the input."
    ),
}

TITLE_HEADS = [
    "Spectral", "Orthogonal", "Elliptic", "Modular", "Asymptotic", "Recursive",
    "Convex", "Stochastic", "Harmonic", "Projective", "Algebraic", "Symplectic",
    "Combinatorial", "Analytic", "Geometric", "Diophantine",
]
TITLE_BODIES = [
    "estimates for eigenvalue problems", "decompositions of sparse operators",
    "bounds on lattice sums", "methods for boundary layers",
    "identities of partition functions", "stability of difference schemes",
    "properties of random walks", "expansions of special functions",
    "invariants of knot diagrams", "inequalities for convex bodies",
    "structure of quotient rings", "dynamics of interval maps",
    "regularity of weak solutions", "growth of class groups",
]
SENTENCES = [
    "The {adj} case follows from a direct computation with the generating function.",
    "A classical argument reduces the problem to an estimate on the remainder term.",
    "We record the identity {m} which is proved by induction on the degree.",
    "Sharpness of the bound {m} can be seen on a one-parameter family of examples.",
    "The recurrence {m} determines every coefficient once the seed values are fixed.",
    "Under the usual normalization one obtains {m} for every admissible index.",
    "Numerical experiments suggest that {m} holds with room to spare.",
    "The substitution {m} linearizes the equation near the fixed point.",
    "Equality {m} characterizes the extremal configurations.",
    "An averaging argument upgrades the pointwise statement to {m} in the mean.",
]
ADJECTIVES = ["planar", "discrete", "generic", "critical", "integral", "smooth"]

LETTERS = list("acdefghkmnrstuvwxyz")  # keep b out: the Fig.-2 pattern names it
GREEK = ["\\alpha", "\\beta", "\\gamma", "\\lambda", "\\mu", "\\sigma", "\\omega"]
FUNCS = ["\\sin", "\\cos", "\\log", "\\exp"]


class FormulaGen:
    """Random formulas over the supported grammar, simple subscripts only."""

    def __init__(self, rng: random.Random):
        self.rng = rng

    def var(self) -> str:
        r = self.rng.random()
        if r < 0.6:
            return self.rng.choice(LETTERS)
        if r < 0.8:
            return self.rng.choice(GREEK)
        return f"{self.rng.choice(LETTERS)}_{self.rng.randint(0, 9)}"

    def atom(self) -> str:
        r = self.rng.random()
        if r < 0.5:
            return self.var()
        if r < 0.7:
            return str(self.rng.randint(2, 99))
        if r < 0.85:
            return f"{self.var()}^{{{self.rng.randint(2, 5)}}}"
        return f"{self.rng.choice(FUNCS)}({self.var()})"

    def term(self) -> str:
        n = self.rng.randint(1, 3)
        return " ".join(self.atom() for _ in range(n))

    def sum_expr(self) -> str:
        n = self.rng.randint(2, 4)
        parts = [self.term() for _ in range(n)]
        ops = [self.rng.choice([" + ", " - "]) for _ in range(n - 1)]
        out = parts[0]
        for op, p in zip(ops, parts[1:]):
            out += op + p
        return out

    def formula(self) -> str:
        r = self.rng.random()
        if r < 0.35:
            return f"{self.var()} = {self.sum_expr()}"
        if r < 0.5:
            return f"\\frac{{{self.term()}}}{{{self.term()}}} = {self.term()}"
        if r < 0.62:
            return f"{self.var()} = {self.term()} \\bmod {self.var()}"
        if r < 0.74:
            v = self.rng.choice(LETTERS)
            return f"{v}_1, {v}_2, \\dots, {v}_{self.rng.randint(3, 9)}"
        if r < 0.86:
            return f"\\sqrt{{{self.sum_expr()}}} = {self.term()}"
        return self.sum_expr()


def _has_compound_subscript(tree) -> bool:
    for node in expr.iter_nodes(tree):
        if isinstance(node, expr.Apply) and node.head == expr.SUBSCRIPT:
            if isinstance(node.args[1], expr.Apply):
                return True
    return False


def make_distractor(rng: random.Random, i: int, gen: FormulaGen) -> dict:
    title = f"{rng.choice(TITLE_HEADS)} {rng.choice(TITLE_BODIES)}"
    n_formulas = rng.randint(4, 7)
    sentences = []
    used = 0
    while used < n_formulas or len(sentences) < 3:
        s = rng.choice(SENTENCES)
        if "{m}" in s and used < n_formulas:
            while True:
                latex = gen.formula()
                tree = canon.canonicalize(texparse.parse_formula(latex))
                try:
                    mathindex.check_arity_cap(tree)
                except mathindex.ArityCapError:
                    continue
                if not _has_compound_subscript(tree):
                    break
            s = s.replace("{m}", f"<math>{latex}</math>")
            used += 1
        elif "{m}" in s:
            continue
        s = s.replace("{adj}", rng.choice(ADJECTIVES))
        sentences.append(s)
    return {"id": f"page-{i:03d}", "title": title, "text": " ".join(sentences)}


def main() -> None:
    rng = random.Random(SEED)
    gen = FormulaGen(rng)
    distractors = [make_distractor(rng, i, gen) for i in range(1, 99)]
    docs = distractors[:36] + [BELL_DOC] + distractors[36:70] + [POLY_DOC] + distractors[70:]
    assert len(docs) == 100

    DATA_DIR.mkdir(parents=True, exist_ok=True)
    corpus_path = DATA_DIR / "acceptance_corpus.jsonl"
    with open(corpus_path, "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(json.dumps(doc, ensure_ascii=False))
            fh.write("\n")

    ingested, warnings, _ = corpus.ingest_path(corpus_path)
    assert not warnings, warnings
    formula_count = sum(len(d.formulas) for d in ingested)
    assert formula_count >= 500 + 4, formula_count

    manifest = {
        "docs": len(ingested),
        "formulas": formula_count,
        "bell_doc_id": BELL_DOC["id"],
        "poly_doc_id": POLY_DOC["id"],
    }
    (DATA_DIR / "acceptance_manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )

    # self-check: the acceptance queries must behave before we ship the data
    snap = corpus.build_snapshot(ingested)
    from mathfind.engine import CombinedQuery, search

    r1 = search(snap, CombinedQuery(math="B_{p+n}"))
    assert len(r1) == 1 and r1[0].doc_id == "bell-numbers", r1
    r2 = search(snap, CombinedQuery(text="Gröbner", math="a?x^2+b?y^2+?z"))
    assert r2 and r2[0].doc_id == "stable-normal-forms", r2
    r3 = search(snap, CombinedQuery(math="C_{q+m}", alpha=True))
    assert len(r3) == 1 and r3[0].doc_id == "bell-numbers", r3
    r4 = search(snap, CombinedQuery(math="C_{q+m}", alpha=False))
    assert r4 == []
    print(f"wrote {corpus_path} ({len(ingested)} docs, {formula_count} formulas)")


if __name__ == "__main__":
    main()
