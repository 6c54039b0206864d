"""The discrimination tree: wildcard queries over every subterm.

All subterms of all formulas are indexed; a query walks the token trie
(wildcards skip whole subtrees) and each candidate is confirmed by the
matcher.  The brute-force oracle scans everything and must agree exactly.
"""

from mathfind.canon import canonicalize
from mathfind.mathindex import BruteForce, DiscTree
from mathfind.texparse import parse_formula, parse_query, unparse

CORPUS = [
    ("bell", 0, r"B_{p+n} = B_n + B_{n+1} \bmod p"),
    ("poly", 0, r"p_1=ax_1^2+bx_2^2+\epsilon_1x_1y_1"),
    ("misc", 0, r"\sqrt{x^2+y^2} = r"),
    ("misc", 1, r"e = m c^2"),
]

tree, oracle = DiscTree(), BruteForce()
for doc, fid, latex in CORPUS:
    formula = canonicalize(parse_formula(latex))
    tree.insert(formula, doc, fid)
    oracle.insert(formula, doc, fid)

QUERIES = [
    ("a?x^2+b?y^2+?z", False),   # the two-field demo pattern
    ("B_{p+n}", False),          # exact lookup
    ("C_{q+m}", True),           # same shape up to renaming
    ("?u^2+?v^2", False),        # partial match inside \sqrt
]
for source, alpha in QUERIES:
    pattern = canonicalize(parse_query(source))
    hits, stats = tree.query_with_stats(pattern, alpha)
    assert hits == oracle.query(pattern, alpha)
    mode = "alpha" if alpha else "exact"
    print(f"{source}  [{mode}]  candidates={stats.candidates}")
    for h in hits:
        subs = ", ".join(f"?{k}={unparse(v)}" for k, v in sorted(h.substitution.items()))
        ren = "".join(f"  renaming {h.renaming}" if h.renaming else "")
        print(f"   {h.ref.doc_id}/{h.ref.formula_id} at {list(h.ref.path)} "
              f"score {h.score}  {subs}{ren}")
    print()
