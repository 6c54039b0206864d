import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mathfind.expr import (
    Apply,
    Identifier,
    Number,
    TextAnnotation,
    Wildcard,
    function_head,
)
from mathfind.texparse import ParseError, parse_formula, parse_query, unparse

import randtrees


def ident(n):
    return Identifier(n)


def num(v):
    return Number(v)


def sub(base, index):
    return Apply("subscript", (base, index))


def plus(*args):
    return Apply("plus", tuple(args))


def times(*args):
    return Apply("times", tuple(args))


def test_single_identifier():
    assert parse_formula("x") == ident("x")


def test_bell_congruence_parse():
    tree = parse_formula(
        r"B_{p+n} = B_n + B_{n+1} \bmod p \ \text{for all}\ n=0,1,2,\dots"
    )
    lhs = sub(ident("B"), plus(ident("p"), ident("n")))
    rhs = Apply(
        "mod",
        (
            plus(
                sub(ident("B"), ident("n")),
                sub(ident("B"), plus(ident("n"), num("1"))),
            ),
            ident("p"),
        ),
    )
    tail = Apply(
        "annotate",
        (
            Apply(
                "sequence",
                (
                    Apply("eq", (ident("n"), num("0"))),
                    num("1"),
                    num("2"),
                    Apply("ellipsis", ()),
                ),
            ),
            TextAnnotation("for all"),
        ),
    )
    assert tree == Apply("annotate", (Apply("eq", (lhs, rhs)), tail))


def test_perturbed_quadric_parse():
    tree = parse_formula(r"p_1=ax_1^2+bx_2^2+\epsilon_1x_1y_1")
    x1sq = Apply("power", (sub(ident("x"), num("1")), num("2")))
    x2sq = Apply("power", (sub(ident("x"), num("2")), num("2")))
    expected = Apply(
        "eq",
        (
            sub(ident("p"), num("1")),
            plus(
                times(ident("a"), x1sq),
                times(ident("b"), x2sq),
                times(
                    sub(ident("epsilon"), num("1")),
                    sub(ident("x"), num("1")),
                    sub(ident("y"), num("1")),
                ),
            ),
        ),
    )
    assert tree == expected


def test_query_with_wildcards():
    tree = parse_query(r"a?x^2+b?y^2+?z")
    assert tree == plus(
        times(ident("a"), Apply("power", (Wildcard("x"), num("2")))),
        times(ident("b"), Apply("power", (Wildcard("y"), num("2")))),
        Wildcard("z"),
    )
    assert parse_query("?w") == Wildcard("w")
    assert parse_query("B_{p+n}") == sub(ident("B"), plus(ident("p"), ident("n")))


def test_wildcards_rejected_in_formulas():
    with pytest.raises(ParseError) as e:
        parse_formula("a?x^2")
    assert e.value.kind == "unexpected-token"
    assert e.value.position == 1


def test_error_positions_and_kinds():
    cases = [
        ("", 0, "empty-input"),
        ("   ", 0, "empty-input"),
        (r"\unknowncmd", 0, "unknown-command"),
        ("a + ", 4, "unexpected-token"),
        ("(a", 0, "unbalanced-brace"),
        ("a)", 1, "unbalanced-brace"),
        ("{a+b", 0, "unbalanced-brace"),
        (r"x \unknown", 2, "unknown-command"),
        (r"\text{unterminated", 0, "unbalanced-brace"),
        ("x__2", 2, "unexpected-token"),
        ("x^2^3", 3, "unexpected-token"),
    ]
    for src, position, kind in cases:
        with pytest.raises(ParseError) as e:
            parse_formula(src)
        assert e.value.kind == kind, src
        assert e.value.position == position, src
        assert str(e.value) == f"{position}: {kind}: {e.value.message}"


def test_error_position_is_bytes():
    # two-byte ö sits before the failure point
    with pytest.raises(ParseError) as e:
        parse_formula("\\text{ö} )")
    assert e.value.position == len("\\text{ö} ".encode("utf-8"))


def test_script_takes_one_token():
    assert parse_formula("x_12") == times(sub(ident("x"), num("1")), num("2"))
    assert parse_formula("x_{12}") == sub(ident("x"), num("12"))
    assert parse_formula("x_1^2") == Apply(
        "power", (sub(ident("x"), num("1")), num("2"))
    )
    assert parse_formula("x^2_1") == Apply(
        "power", (sub(ident("x"), num("1")), num("2"))
    )


def test_grammar_corners():
    assert parse_formula(r"\frac{a}{b}") == Apply("divide", (ident("a"), ident("b")))
    assert parse_formula(r"\frac12") == Apply("divide", (num("1"), num("2")))
    assert parse_formula(r"\sqrt{x+1}") == Apply(
        function_head("sqrt"), (plus(ident("x"), num("1")),)
    )
    assert parse_formula(r"\sin x") == Apply(function_head("sin"), (ident("x"),))
    assert parse_formula(r"a\cdot b") == times(ident("a"), ident("b"))
    assert parse_formula("2.5x") == times(num("2.5"), ident("x"))
    assert parse_formula("-x^2") == Apply(
        "negate", (Apply("power", (ident("x"), num("2"))),)
    )
    assert parse_formula("-ab") == times(Apply("negate", (ident("a"),)), ident("b"))
    assert parse_formula("a-b+c") == plus(
        Apply("minus", (ident("a"), ident("b"))), ident("c")
    )
    assert parse_formula(r"x \bmod 2 = y") == Apply(
        "eq", (Apply("mod", (ident("x"), num("2"))), ident("y"))
    )
    assert parse_formula(r"x \pmod{p}") == Apply("mod", (ident("x"), ident("p")))
    assert parse_formula(r"\alpha\beta") == times(ident("alpha"), ident("beta"))
    assert parse_formula("{x}") == ident("x")


def test_determinism():
    src = r"a?x^2+b?y^2+?z"
    assert parse_query(src) == parse_query(src)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**48))
def test_unparse_reparse_roundtrip(seed):
    rng = random.Random(seed)
    tree = randtrees.tree(rng, depth=4, wildcard_p=0.15)
    rendered = unparse(tree)
    reparsed = parse_query(rendered)
    assert reparsed == tree, rendered


def test_fuzz_totality_100k():
    rng = random.Random(0xF022)
    alphabet = r"ab xy12+-*/^_{}()\,=?.\frac\sqrt\text\bmod\dots\alpha~"
    for i in range(100_000):
        if i % 3 == 0:
            s = "".join(
                chr(rng.randrange(32, 0x2FF)) for _ in range(rng.randrange(0, 24))
            )
        else:
            s = "".join(
                alphabet[rng.randrange(len(alphabet))]
                for _ in range(rng.randrange(0, 32))
            )
        try:
            tree = parse_query(s) if i % 2 else parse_formula(s)
            assert tree is not None
        except ParseError as e:
            assert 0 <= e.position <= len(s.encode("utf-8"))
