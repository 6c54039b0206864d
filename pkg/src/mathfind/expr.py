"""Content expression trees for formulas, plus query trees with wildcards.

A formula is represented by its operator structure (what it computes), not
its layout.  Trees are immutable values: equal trees hash equally and can be
shared freely across threads.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterator, Union

# Operator heads for Apply nodes.
PLUS = "plus"
TIMES = "times"
MINUS = "minus"
NEGATE = "negate"
DIVIDE = "divide"
POWER = "power"
SUBSCRIPT = "subscript"
EQ = "eq"
MOD = "mod"
SEQUENCE = "sequence"
ELLIPSIS = "ellipsis"
ANNOTATE = "annotate"

FUNCTION_PREFIX = "fn:"

COMMUTATIVE_HEADS = frozenset({PLUS, TIMES})

# head -> (min arity, max arity); None = unbounded.
_ARITY = {
    PLUS: (2, None),
    TIMES: (2, None),
    MINUS: (2, 2),
    NEGATE: (1, 1),
    DIVIDE: (2, 2),
    POWER: (2, 2),
    SUBSCRIPT: (2, 2),
    EQ: (2, 2),
    MOD: (2, 2),
    SEQUENCE: (2, None),
    ELLIPSIS: (0, 0),
    ANNOTATE: (2, 2),
}


def function_head(name: str) -> str:
    """Apply head for a named function such as sin or sqrt."""
    return FUNCTION_PREFIX + name


def is_function_head(head: str) -> bool:
    return head.startswith(FUNCTION_PREFIX)


class ExprError(ValueError):
    """Raised when constructing a malformed tree."""


@dataclass(frozen=True, slots=True)
class Number:
    value: str  # decimal literal exactly as written, e.g. "2", "0.50"


@dataclass(frozen=True, slots=True)
class Identifier:
    name: str  # normalized symbol name; subscripts are structure, not names


@dataclass(frozen=True, slots=True)
class TextAnnotation:
    content: str  # verbatim text from \text{...}


@dataclass(frozen=True, slots=True)
class Wildcard:
    """Query placeholder; never appears in corpus formulas."""

    name: str

    def __post_init__(self) -> None:
        if not self.name:
            raise ExprError("wildcard name must be nonempty")


@dataclass(frozen=True, slots=True)
class Apply:
    head: str
    args: tuple["QueryExpr", ...]

    def __post_init__(self) -> None:
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))
        if is_function_head(self.head):
            lo, hi = 1, None
        else:
            try:
                lo, hi = _ARITY[self.head]
            except KeyError:
                raise ExprError(f"unknown operator head: {self.head!r}") from None
        n = len(self.args)
        if n < lo or (hi is not None and n > hi):
            raise ExprError(f"{self.head} cannot take {n} argument(s)")


MathExpr = Union[Number, Identifier, TextAnnotation, Apply]
QueryExpr = Union[MathExpr, Wildcard]

# Pre-order token sequence over a tree; index key for canonical trees.
TermKey = tuple[str, ...]

Path = tuple[int, ...]


def has_wildcards(e: QueryExpr) -> bool:
    match e:
        case Wildcard():
            return True
        case Apply(args=args):
            return any(has_wildcards(a) for a in args)
        case _:
            return False


def node_count(e: QueryExpr) -> int:
    """Number of nodes in the tree (every Apply, leaf and wildcard counts)."""
    match e:
        case Apply(args=args):
            return 1 + sum(node_count(a) for a in args)
        case _:
            return 1


def _text_token(content: str) -> str:
    # Hash keeps annotation tokens bounded regardless of text length.
    digest = hashlib.blake2b(content.encode("utf-8"), digest_size=8).hexdigest()
    return f"T:{digest}"


def token_of(e: QueryExpr) -> str:
    """The single TermKey token for this node (not its subtree)."""
    match e:
        case Number(value=v):
            return f"N:{v}"
        case Identifier(name=n):
            return f"I:{n}"
        case TextAnnotation(content=c):
            return _text_token(c)
        case Wildcard(name=n):
            return f"W:{n}"
        case Apply(head=h, args=args):
            return f"A:{h}:{len(args)}"
    raise ExprError(f"not an expression node: {e!r}")


def linearize(e: QueryExpr) -> TermKey:
    """Pre-order token sequence; injective over canonical trees.

    Token count equals node_count(e).  Arities ride along in Apply tokens,
    so the sequence determines the tree shape.
    """
    out: list[str] = []

    def walk(node: QueryExpr) -> None:
        out.append(token_of(node))
        if isinstance(node, Apply):
            for a in node.args:
                walk(a)

    walk(e)
    return tuple(out)


def subterms(e: QueryExpr) -> list[tuple[Path, QueryExpr]]:
    """All subtrees of e (including e itself) with their root paths.

    Deterministic pre-order.  Flattened n-ary plus/times contribute only
    their structural children, never partial-sum combinations.
    """
    out: list[tuple[Path, QueryExpr]] = []

    def walk(node: QueryExpr, path: Path) -> None:
        out.append((path, node))
        if isinstance(node, Apply):
            for i, a in enumerate(node.args):
                walk(a, path + (i,))

    walk(e, ())
    return out


def subterm_at(e: QueryExpr, path: Path) -> QueryExpr:
    node = e
    for i in path:
        if not isinstance(node, Apply) or i >= len(node.args):
            raise ExprError(f"invalid path {path!r}")
        node = node.args[i]
    return node


def iter_nodes(e: QueryExpr) -> Iterator[QueryExpr]:
    yield e
    if isinstance(e, Apply):
        for a in e.args:
            yield from iter_nodes(a)


def to_jsonable(e: QueryExpr) -> dict:
    """Canonical JSON object form (field order is part of the format)."""
    match e:
        case Apply(head=h, args=args):
            return {"k": "apply", "head": h, "args": [to_jsonable(a) for a in args]}
        case Identifier(name=n):
            return {"k": "id", "name": n}
        case Number(value=v):
            return {"k": "num", "value": v}
        case TextAnnotation(content=c):
            return {"k": "text", "content": c}
        case Wildcard(name=n):
            return {"k": "wild", "name": n}
    raise ExprError(f"not an expression node: {e!r}")


def from_jsonable(obj: object, allow_wildcards: bool = False) -> QueryExpr:
    if not isinstance(obj, dict) or "k" not in obj:
        raise ExprError(f"not an expression object: {obj!r}")
    kind = obj["k"]
    if kind == "apply":
        args = obj.get("args")
        if not isinstance(args, list):
            raise ExprError("apply node needs an args list")
        return Apply(
            str(obj.get("head", "")),
            tuple(from_jsonable(a, allow_wildcards) for a in args),
        )
    if kind == "id":
        return Identifier(str(obj["name"]))
    if kind == "num":
        return Number(str(obj["value"]))
    if kind == "text":
        return TextAnnotation(str(obj["content"]))
    if kind == "wild":
        if not allow_wildcards:
            raise ExprError("wildcard nodes are only valid in queries")
        return Wildcard(str(obj["name"]))
    raise ExprError(f"unknown node kind: {kind!r}")
