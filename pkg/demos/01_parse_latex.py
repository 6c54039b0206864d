"""Parse LaTeX math into content expression trees.

The tree records what a formula computes: `x_1^2` becomes
power(subscript(x, 1), 2), and `ax` multiplies two identifiers.
"""

from mathfind.expr import node_count, subterms, to_jsonable
from mathfind.jsonio import dumps
from mathfind.texparse import ParseError, parse_formula, parse_query, unparse

congruence = r"B_{p+n} = B_n + B_{n+1} \bmod p \ \text{for all}\ n=0,1,2,\dots"
tree = parse_formula(congruence)
print("source:   ", congruence)
print("tree:     ", dumps(to_jsonable(tree)))
print("nodes:    ", node_count(tree))
print("unparsed: ", unparse(tree))
print()

# every subterm is addressable by its child-index path
for path, sub in subterms(tree)[:5]:
    print(f"  at {list(path)!s:12} {unparse(sub)}")
print()

# queries may hold ?name wildcards; formulas may not
pattern = parse_query(r"a?x^2+b?y^2+?z")
print("pattern:  ", unparse(pattern))
try:
    parse_formula(r"a?x^2")
except ParseError as e:
    print("rejected: ", e)

# errors carry a byte offset, a kind and a message
try:
    parse_formula(r"\frac{1}{")
except ParseError as e:
    print("error:    ", e)
