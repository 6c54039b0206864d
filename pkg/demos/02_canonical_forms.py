"""Canonical forms erase notation choices: term order, nesting, subtraction.

Alpha keys additionally erase identifier names, so B_{p+n} and C_{q+m}
collide -- that is what alpha mode exploits at query time.
"""

from mathfind.canon import alpha_key, canonicalize
from mathfind.texparse import parse_formula, unparse

pairs = [
    ("b+a", "a+b"),
    ("(a+b)+c", "c+b+a"),
    ("a-b", "-b+a"),
    ("x y z", "z y x"),
]
for left, right in pairs:
    cl = canonicalize(parse_formula(left))
    cr = canonicalize(parse_formula(right))
    print(f"{left:10} ~ {right:10} -> {unparse(cl):18} equal: {cl == cr}")
print()

quadric = canonicalize(parse_formula(r"ax_1^2+bx_2^2+\epsilon_1x_1y_1"))
print("canonical quadric:", unparse(quadric))
print()

b = canonicalize(parse_formula("B_{p+n}"))
c = canonicalize(parse_formula("C_{q+m}"))
print("alpha_key(B_{p+n}) :", alpha_key(b))
print("alpha_key(C_{q+m}) :", alpha_key(c))
print("alpha-equivalent   :", alpha_key(b) == alpha_key(c))
