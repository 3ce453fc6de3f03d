import math
import random

import pytest

from quadledger.expr import (
    Binary,
    Call,
    Const,
    DivisionByZero,
    DomainError,
    ParseError,
    Unary,
    UnboundVariable,
    Var,
    compile_expr,
    evaluate,
    free_variables,
    parse,
    render,
    substitute,
    tokenize,
)


# ----------------------------------------------------------------------
# parsing
# ----------------------------------------------------------------------

def test_parse_rational_kernel_structure():
    tree = parse("x/((1+x^2)*(y^2+x^2))")
    expected = Binary(
        "/",
        Var("x"),
        Binary(
            "*",
            Binary("+", Const(1.0), Binary("^", Var("x"), Const(2.0))),
            Binary("+", Binary("^", Var("y"), Const(2.0)),
                   Binary("^", Var("x"), Const(2.0))),
        ),
    )
    assert tree == expected


def test_parse_log_kernel_structure():
    tree = parse("ln(y)/(1-y^2)")
    expected = Binary(
        "/",
        Call("ln", Var("y")),
        Binary("-", Const(1.0), Binary("^", Var("y"), Const(2.0))),
    )
    assert tree == expected


def test_power_is_right_associative():
    assert evaluate(parse("2^3^2"), {}) == 512.0


def test_precedence():
    assert evaluate(parse("1+2*3"), {}) == 7.0
    assert evaluate(parse("(1+2)*3"), {}) == 9.0
    assert evaluate(parse("-2^2"), {}) == -4.0


def test_pi_parses_as_constant():
    assert parse("pi") == Const(math.pi)


def test_number_literals():
    assert parse("1.5e-3") == Const(0.0015)
    assert parse(".5") == Const(0.5)
    assert parse("2.") == Const(2.0)
    with pytest.raises(ParseError):
        parse("1e999")


@pytest.mark.parametrize("text,position", [
    ("1+", 2),            # end of input
    ("x y", 2),           # implicit multiplication is not a thing
    ("(x", 2),            # unclosed paren
    ("foo(2)", 0),        # unknown identifier
    ("ln 2", 3),          # function call needs '('
    ("1+*2", 2),          # operator where an operand belongs
    ("x @ y", 2),         # bad character
])
def test_parse_error_positions(text, position):
    with pytest.raises(ParseError) as excinfo:
        parse(text)
    assert excinfo.value.position == position


def test_token_positions_strictly_increase():
    tokens = tokenize("x/((1+x^2)*(y^2+x^2))")
    positions = [t.position for t in tokens]
    assert positions == sorted(set(positions))


# ----------------------------------------------------------------------
# evaluation
# ----------------------------------------------------------------------

def test_eval_rational_kernel_point():
    tree = parse("x/((1+x^2)*(y^2+x^2))")
    assert evaluate(tree, {"x": 1.0, "y": 1.0}) == 0.25


def test_eval_log_kernel_point():
    tree = parse("ln(y)/(1-y^2)")
    got = evaluate(tree, {"y": 0.5})
    assert math.isclose(got, math.log(0.5) / 0.75, rel_tol=0, abs_tol=1e-15)
    assert math.isclose(got, -0.9241962407465937, rel_tol=0, abs_tol=1e-11)


def test_eval_errors():
    with pytest.raises(DomainError):
        evaluate(parse("ln(y)"), {"y": 0.0})
    with pytest.raises(DomainError):
        evaluate(parse("sqrt(x)"), {"x": -1.0})
    with pytest.raises(DivisionByZero):
        evaluate(parse("1/x"), {"x": 0.0})
    with pytest.raises(DivisionByZero):
        evaluate(parse("x^(-1)"), {"x": 0.0})
    with pytest.raises(UnboundVariable):
        evaluate(parse("x+y"), {"x": 1.0})


def test_overflow_gives_infinity_not_error():
    assert evaluate(parse("exp(x)"), {"x": 1e6}) == math.inf
    assert evaluate(parse("x^2"), {"x": 1e200}) == math.inf
    assert evaluate(parse("x*x"), {"x": 1e200}) == math.inf
    assert evaluate(parse("(-x)^3"), {"x": 1e200}) == -math.inf


def test_division_by_inf_is_signed_zero():
    assert evaluate(parse("1/exp(x)"), {"x": 1e6}) == 0.0


# ----------------------------------------------------------------------
# rendering and round trips
# ----------------------------------------------------------------------

def test_render_examples():
    assert render(Const(1.0)) == "1"
    tree = Binary("/", Var("x"), Binary("+", Const(1.0),
                                        Binary("^", Var("x"), Const(2.0))))
    assert render(tree) == "(x/(1+(x^2)))"


def test_render_round_trip_of_kernel():
    tree = parse("x/((1+x^2)*(y^2+x^2))")
    assert parse(render(tree)) == tree


def _random_tree(rng: random.Random, depth: int):
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.5:
            return Const(round(rng.uniform(0.0, 10.0), 3))
        return Var(rng.choice("xyz"))
    kind = rng.randrange(3)
    if kind == 0:
        return Unary("neg", _random_tree(rng, depth - 1))
    if kind == 1:
        return Call(rng.choice(("ln", "exp", "sqrt", "abs")),
                    _random_tree(rng, depth - 1))
    op = rng.choice("+-*/^")
    return Binary(op, _random_tree(rng, depth - 1), _random_tree(rng, depth - 1))


def test_round_trip_200_random_trees():
    rng = random.Random(1729)
    for _ in range(200):
        tree = _random_tree(rng, rng.randrange(1, 7))
        assert parse(render(tree)) == tree


def test_compiled_matches_tree_walker():
    rng = random.Random(271828)
    checked = 0
    for _ in range(300):
        tree = _random_tree(rng, rng.randrange(1, 6))
        names = tuple(sorted(free_variables(tree)))
        fn = compile_expr(tree, names)
        bindings = {name: rng.uniform(0.1, 3.0) for name in names}
        args = tuple(bindings[name] for name in names)
        try:
            expected = evaluate(tree, bindings)
        except (DomainError, DivisionByZero) as exc:
            with pytest.raises(type(exc)):
                fn(*args)
            continue
        got = fn(*args)
        assert got == expected or (math.isnan(got) and math.isnan(expected))
        checked += 1
    assert checked > 100


def test_compile_rejects_unbound_parameters():
    with pytest.raises(UnboundVariable):
        compile_expr(parse("x+y"), ("x",))


def test_substitute():
    tree = parse("x/((1+x^2)*(y^2+x^2))")
    fixed = substitute(tree, {"y": 2.0})
    assert free_variables(fixed) == frozenset({"x"})
    assert evaluate(fixed, {"x": 1.0}) == evaluate(tree, {"x": 1.0, "y": 2.0})


# ----------------------------------------------------------------------
# the partial-fraction identity behind the order swap
# ----------------------------------------------------------------------

def test_partial_fraction_identity_pointwise():
    whole = parse("x/((1+x^2)*(y^2+x^2))")
    split = parse("(1/(1-y^2))*(x/(y^2+x^2)-x/(1+x^2))")
    rng = random.Random(31415)
    count = 0
    while count < 100:
        x = rng.uniform(1e-9, 10.0)
        y = rng.uniform(1e-9, 10.0)
        if abs(y - 1.0) <= 1e-3:
            continue
        a = evaluate(whole, {"x": x, "y": y})
        b = evaluate(split, {"x": x, "y": y})
        assert abs(a - b) <= 1e-12 * max(1.0, abs(a))
        count += 1
