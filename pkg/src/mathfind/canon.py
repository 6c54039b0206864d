"""Canonical forms: one tree per notation variant.

Canonicalization flattens nested sums and products, orders their arguments
by a fixed total order, and rewrites subtraction into addition with a -1
coefficient, so that `a - b` and `-b + a` index identically.  Alpha keys
additionally erase identifier names, keeping only the order of first
occurrence, which makes `B_{p+n}` and `C_{q+m}` collide.
"""

from __future__ import annotations

from .expr import (
    COMMUTATIVE_HEADS,
    MINUS,
    NEGATE,
    PLUS,
    TIMES,
    Apply,
    Identifier,
    MathExpr,
    Number,
    QueryExpr,
    TermKey,
    linearize,
    token_of,
)

_MINUS_ONE = Number("-1")


def canonicalize(e: QueryExpr) -> QueryExpr:
    """Rewrite to canonical form; idempotent.

    - minus(a, b)  ->  plus(a, times(-1, b))
    - negate(a)    ->  times(-1, a)
    - nested plus under plus and times under times are flattened
    - plus/times arguments sort by the TermKey of each canonical argument,
      ties keeping their original relative order

    No distribution, factoring or arithmetic is performed.
    """
    if not isinstance(e, Apply):
        return e
    args = [canonicalize(a) for a in e.args]
    head = e.head
    if head == MINUS:
        head = PLUS
        args = [args[0], _negated(args[1])]
    elif head == NEGATE:
        return _negated(args[0])
    if head in COMMUTATIVE_HEADS:
        flat: list[QueryExpr] = []
        for a in args:
            if isinstance(a, Apply) and a.head == head:
                flat.extend(a.args)
            else:
                flat.append(a)
        flat.sort(key=linearize)  # Python sort is stable: ties keep input order
        return Apply(head, tuple(flat))
    return Apply(head, tuple(args))


def _negated(a: QueryExpr) -> QueryExpr:
    """times(-1, a) in canonical form (a is already canonical)."""
    if isinstance(a, Apply) and a.head == TIMES:
        flat = [_MINUS_ONE, *a.args]
    else:
        flat = [_MINUS_ONE, a]
    flat.sort(key=linearize)
    return Apply(TIMES, tuple(flat))


def is_canonical(e: QueryExpr) -> bool:
    return canonicalize(e) == e


# Alpha keys: identifiers become V:<k> tokens, k = first-occurrence ordinal
# in pre-order.  Commutative arguments are NOT re-sorted after renaming, so
# equal keys imply alpha-equivalence but not always the converse (renamings
# that change the canonical sort order can produce distinct keys).

AlphaKey = TermKey


def alpha_tokens(e: QueryExpr) -> AlphaKey:
    out: list[str] = []
    seen: dict[str, int] = {}

    def walk(node: QueryExpr) -> None:
        if isinstance(node, Identifier):
            k = seen.setdefault(node.name, len(seen) + 1)
            out.append(f"V:{k}")
            return
        out.append(token_of(node))
        if isinstance(node, Apply):
            for a in node.args:
                walk(a)

    walk(e)
    return tuple(out)


def alpha_key(e: MathExpr) -> AlphaKey:
    """Alpha key of a canonical tree.

    Two canonical formulas share a key whenever one is an injective renaming
    of the other that preserves the canonical argument order.
    """
    return alpha_tokens(e)
