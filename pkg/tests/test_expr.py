import pytest

from ctower import PrimeId, Tower
from ctower.expr import Add, ExprSyntaxError, Gen, Mul, Neg, Num, Pow, Sub, eval_expr, parse_expr
from ctower.model import TowerError


def test_parse_examples():
    assert parse_expr("x(0,0)*y(0,0)") == Mul(Gen("x", 0, 0), Gen("y", 0, 0))
    assert parse_expr("y(0,0)^2 + y(0,0)^5") == Add(Pow(Gen("y", 0, 0), 2), Pow(Gen("y", 0, 0), 5))
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr("x(0,0)+")
    assert info.value.offset == 7


def test_precedence():
    assert parse_expr("1 - 2 - 3") == Sub(Sub(Num(1), Num(2)), Num(3))
    assert parse_expr("-2^2") == Neg(Pow(Num(2), 2))
    assert parse_expr("2*3 + 4") == Add(Mul(Num(2), Num(3)), Num(4))
    assert parse_expr("(1+2)*3") == Mul(Add(Num(1), Num(2)), Num(3))


@pytest.mark.parametrize("text,offset", [("", 0), ("2 $ 3", 2), ("x(1)", 3), ("2^-1", 2), ("(1", 2), ("1 2", 2)])
def test_syntax_errors(text, offset):
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr(text)
    assert info.value.offset == offset


@pytest.fixture
def t2():
    t = Tower()
    t.extend_factor(PrimeId.base(0), (0, 0))
    return t


def test_eval_examples(t2):
    assert eval_expr(t2, "x(0,0)*y(0,0)") == t2.int_const(t2.top, 2)
    assert t2.deg_x(eval_expr(t2, "y(0,0)^2+y(0,0)^5")) == -2
    with pytest.raises(TowerError, match="unknown generator"):
        eval_expr(t2, "x(9,9)")


def test_eval_lifts_lower_generators(t2):
    t2.extend_localize(PrimeId.base(1))
    e = eval_expr(t2, "x(0,0) + 1")
    assert e.level == t2.top
    with pytest.raises(TowerError):
        eval_expr(t2, "x(0,0)", level=0)
    assert eval_expr(t2, "-(3)^2", level=0).n == -9
