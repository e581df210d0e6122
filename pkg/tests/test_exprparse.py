import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from muspec import exprparse as ep


def test_parse_coefficient_shapes():
    ast = ep.parse("2*abs(t)")
    assert ast == ep.Bin("*", ep.Num(2.0), ep.Call("abs", (ep.Var("t"),)))
    ast = ep.parse("sgn(t)*t^2")
    assert ast == ep.Bin("*", ep.Call("sgn", (ep.Var("t"),)),
                         ep.Bin("^", ep.Var("t"), ep.Num(2.0)))


def test_precedence_and_associativity():
    assert ep.parse("1+2*3") == ep.Bin("+", ep.Num(1.0),
                                       ep.Bin("*", ep.Num(2.0), ep.Num(3.0)))
    # ^ is right-associative and binds tighter than unary minus
    assert ep.parse("2^3^2") == ep.Bin("^", ep.Num(2.0),
                                       ep.Bin("^", ep.Num(3.0), ep.Num(2.0)))
    assert ep.parse("-t^2") == ep.Neg(ep.Bin("^", ep.Var("t"), ep.Num(2.0)))
    assert ep.evaluate(ep.parse("-2^2"), 0.0) == -4.0
    assert ep.evaluate(ep.parse("2^-1"), 0.0) == 0.5


def test_syntax_error_offset_and_expected():
    with pytest.raises(ep.ParseError) as err:
        ep.parse("3*t^^2")
    assert err.value.offset == 4
    assert any("number" in e for e in err.value.expected)


def test_no_implicit_multiplication():
    with pytest.raises(ep.ParseError) as err:
        ep.parse("2t")
    assert err.value.offset == 1


def test_unknown_identifier():
    with pytest.raises(ep.UnknownIdentifierError) as err:
        ep.parse("foo(2)")
    assert err.value.offset == 0


def test_single_variable_discipline():
    with pytest.raises(ep.ParseError):
        ep.parse("t+k")
    # the two-variable mode used for closed-form propagators
    ast = ep.parse("k^3-n^3", variables=("k", "n"))
    assert ep.evaluate_env(ast, {"k": 2.0, "n": 1.0}) == 7.0


def test_call_arity():
    with pytest.raises(ep.ParseError):
        ep.parse("min(1)")
    with pytest.raises(ep.ParseError):
        ep.parse("exp(1,2)")
    assert ep.evaluate(ep.parse("max(1,2)"), 0.0) == 2.0


def test_eval_examples():
    ast = ep.parse("exp(-3*k^2-3*k-1)")
    assert ep.evaluate(ast, 0.0) == pytest.approx(math.exp(-1.0), rel=1e-15)
    assert ep.evaluate(ep.parse("sgn(t)"), 0.0) == 0.0
    assert ep.evaluate(ep.parse("3*t^2"), 2.0) == 12.0


def test_eval_is_deterministic():
    ast = ep.parse("exp(sgn(t)*sqrt(abs(t))/3)+t^3")
    a = ep.evaluate(ast, 17.25)
    b = ep.evaluate(ast, 17.25)
    assert a == b


@pytest.mark.parametrize("source,value", [
    ("1/(t-t)", 3.0),
    ("log(0-abs(t))", 1.0),
    ("log(t)", 0.0),
    ("(0-2)^0.5", 1.0),
    ("sqrt(0-1)", 5.0),
    ("0^(0-1)", 2.0),
    ("exp(t)", 1e6),
])
def test_domain_errors(source, value):
    with pytest.raises(ep.DomainError):
        ep.evaluate(ep.parse(source), value)


def test_log_abs_evaluation_stays_in_range():
    ast = ep.parse("exp(-3*k^2-3*k-1)")
    la, sign = ep.evaluate_log_abs(ast, {"k": 400.0})
    assert (la, sign) == (-481201.0, 1)
    la, sign = ep.evaluate_log_abs(ast, {"k": -400.0})
    assert (la, sign) == (-478801.0, 1)
    ast = ep.parse("exp(abs(2*k+1))")
    la, sign = ep.evaluate_log_abs(ast, {"k": -400.0})
    assert (la, sign) == (799.0, 1)


def test_log_abs_products_and_powers():
    ast = ep.parse("(0-2)*exp(t)")
    la, sign = ep.evaluate_log_abs(ast, {"t": 900.0})
    assert sign == -1
    assert la == pytest.approx(900.0 + math.log(2.0), rel=1e-15)
    ast = ep.parse("t^3")
    la, sign = ep.evaluate_log_abs(ast, {"t": -2.0})
    assert sign == -1
    assert la == pytest.approx(3 * math.log(2.0), rel=1e-15)


# -- randomized properties ---------------------------------------------------

_numbers = st.floats(min_value=0.0, max_value=100.0, allow_nan=False,
                     allow_infinity=False)


def _ast_strategy():
    leaves = st.one_of(_numbers.map(ep.Num), st.just(ep.Var("t")))

    def extend(children):
        unary = children.map(ep.Neg)
        calls = st.tuples(st.sampled_from(("exp", "log", "abs", "sgn", "sqrt")),
                          children).map(lambda p: ep.Call(p[0], (p[1],)))
        calls2 = st.tuples(st.sampled_from(("min", "max")), children,
                           children).map(lambda p: ep.Call(p[0], (p[1], p[2])))
        binops = st.tuples(st.sampled_from("+-*/^"), children,
                           children).map(lambda p: ep.Bin(p[0], p[1], p[2]))
        return st.one_of(unary, calls, calls2, binops)

    return st.recursive(leaves, extend, max_leaves=25)


@given(_ast_strategy())
@settings(max_examples=300, deadline=None)
def test_pretty_print_round_trip(ast):
    assert ep.parse(ep.pretty(ast)) == ast


@given(_numbers, _numbers, _numbers)
@settings(max_examples=200, deadline=None)
def test_precedence_property(a, b, c):
    lhs = ep.evaluate(ep.parse(f"{a:.17g}+{b:.17g}*{c:.17g}"), 0.0)
    rhs = ep.evaluate(ep.parse(f"{a:.17g}+({b:.17g}*{c:.17g})"), 0.0)
    assert lhs == rhs


def _random_source(rng: random.Random, depth: int = 0) -> str:
    if depth > 4 or rng.random() < 0.3:
        return rng.choice(["t", f"{rng.uniform(0, 50):.6g}"])
    form = rng.randrange(4)
    if form == 0:
        return f"-{_random_source(rng, depth + 1)}"
    if form == 1:
        op = rng.choice("+-*/^")
        return f"({_random_source(rng, depth + 1)}{op}{_random_source(rng, depth + 1)})"
    if form == 2:
        fn = rng.choice(["exp", "log", "abs", "sgn", "sqrt"])
        return f"{fn}({_random_source(rng, depth + 1)})"
    fn = rng.choice(["min", "max"])
    return f"{fn}({_random_source(rng, depth + 1)},{_random_source(rng, depth + 1)})"


def test_eval_never_aborts_on_random_expressions():
    rng = random.Random(20240811)
    failures = 0
    for _ in range(1000):
        source = _random_source(rng)
        try:
            ast = ep.parse(source)
        except ep.ParseError:
            failures += 1
            continue
        try:
            value = ep.evaluate(ast, rng.uniform(-20, 20))
        except ep.DomainError:
            failures += 1
            continue
        assert isinstance(value, float)
    # the generator builds well-formed sources, so most must evaluate
    assert failures < 1000
