import pytest
from hypothesis import given

from bracket.syntax import (ParseError, parse_cl, parse_lambda, print_cl,
                            print_lambda, print_term, read_corpus, tokenize)
from bracket.terms import (B, C, I, K, S, S1, Abs, App, Var, alpha_equal, app)

from conftest import cl_terms, lambda_terms

x, y, z = Var("x"), Var("y"), Var("z")


def test_parse_examples():
    assert parse_lambda(r"\y. (\z. x) y y") == Abs("y", App(App(Abs("z", x), y), y))
    assert parse_lambda("K S x (K S x)") == App(App(App(K, S), x), App(App(K, S), x))
    assert parse_lambda("x") == x


def test_unicode_lambda_and_prime():
    assert parse_lambda("λx y. x") == parse_lambda(r"\x y. x")
    assert parse_cl("S′ K") == app(S1, K)


def test_trailing_lambda_extends_right():
    assert parse_lambda(r"f \x. x y") == App(Var("f"), Abs("x", App(x, y)))


def test_parse_cl_examples():
    assert parse_cl("S (K x) I") == App(App(S, App(K, x)), I)
    t = parse_cl("S' (C' C) (C B) I")
    assert t == app(S1, app(parse_cl("C'"), C), app(C, B), I)


def test_parse_cl_rejects_lambda():
    with pytest.raises(ParseError, match="CL terms contain no λ"):
        parse_cl(r"\x. x")
    with pytest.raises(ParseError):
        parse_cl(r"f (\x. x)")


def test_parse_error_positions():
    with pytest.raises(ParseError) as info:
        parse_lambda("x\n  (y")
    assert (info.value.line, info.value.column) == (2, 5)
    assert "')'" in info.value.expected
    with pytest.raises(ParseError) as info:
        parse_lambda(r"\x y")
    assert "'.'" in info.value.expected


@pytest.mark.parametrize("bad", ["Foo", "X", "x $", "", "()", r"\. x", "S''"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_lambda(bad)


def test_combinator_tokens_are_single_tokens():
    kinds = [(t.kind, t.text) for t in tokenize("B* B' x")[:2]]
    assert kinds == [("comb", "B*"), ("comb", "B'")]
    with pytest.raises(ParseError):
        tokenize("x'")


def test_print_examples():
    assert print_cl(parse_cl("S (K x) I")) == "S (K x) I"
    assert print_cl(App(App(K, S), x)) == "K S x"
    assert print_cl(parse_cl("K S x (K S x)")) == "K S x (K S x)"
    assert print_lambda(Abs("x", x)) == r"\x. x"
    assert print_lambda(parse_lambda(r"(\x. x) (\y. y) z")) == r"(\x. x) (\y. y) z"
    assert print_lambda(parse_lambda(r"f (\x. x)")) == r"f (\x. x)"


@given(cl_terms)
def test_cl_round_trip(t):
    assert parse_cl(print_cl(t)) == t


@given(lambda_terms)
def test_lambda_round_trip(t):
    back = parse_lambda(print_term(t))
    assert back == t
    assert alpha_equal(back, t)


def test_read_corpus():
    text = "# header\n\nx y  # trailing\n  \\x. x\n"
    assert read_corpus(text) == ["x y", r"\x. x"]
