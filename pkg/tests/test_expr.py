import math

import numpy as np
import pytest

from morreylab.expr import (Bump, Chi, Dilate, ExprError, Sum, Translate, dilated, evaluate, parse,
                            singular_at_node, translated)


def pts1(*xs):
    return np.array(xs, dtype=float)[:, None]


@pytest.mark.parametrize("text", [
    "zero",
    "(chi -1 1)",
    "(gauss 0.5)",
    "(bump 0 1)",
    "(pow -0.25 0.01)",
    "(dilate 2 (chi 0 1))",
    "(translate 1.5 (bump 0 0.5))",
    "(sum (chi 0 1) (sum (gauss 1) (bump -1 0.5)))",
    "(bump 1,0.5 0.75)",
])
def test_text_round_trip(text):
    e = parse(text)
    assert parse(e.text()) == e


def test_outer_parentheses_optional():
    assert parse("chi -1 1") == parse("(chi -1 1)") == Chi(-1.0, 1.0)


@pytest.mark.parametrize("bad", [
    "", "(chi 1 -1)", "(gauss 0)", "(bump 0 -1)", "(dilate 0 (chi 0 1))",
    "(frob 1)", "(chi 0 1", "(sum (chi 0 1))", "(pow -0.5 -1)",
])
def test_rejects_malformed(bad):
    with pytest.raises(ExprError):
        parse(bad)


def test_chi_is_half_open():
    v = evaluate(parse("(chi -1 1)"), pts1(-1.0, 0.0, 0.999, 1.0))
    assert list(v) == [1.0, 1.0, 1.0, 0.0]


def test_chi_tensorized_in_2d():
    pts = np.array([[0.5, 0.5], [0.5, 1.5], [-1.0, -1.0]])
    assert list(evaluate(parse("(chi -1 1)"), pts)) == [1.0, 0.0, 1.0]


def test_gauss_and_bump_values():
    g = evaluate(parse("(gauss 2)"), pts1(0.0, 2.0))
    assert g == pytest.approx([1.0, math.exp(-1.0)])
    b = evaluate(parse("(bump 1 2)"), pts1(1.0, 2.0, 3.0, 4.0))
    # s = 1/2 at x = 2: exp(1 - 1/(1 - 1/4)) = exp(-1/3)
    assert b == pytest.approx([1.0, math.exp(-1 / 3), 0.0, 0.0])


def test_pow_truncated_inside_eps():
    v = evaluate(parse("(pow -0.5 0.25)"), pts1(0.0, 0.1, 0.25, 4.0))
    assert v == pytest.approx([0.0, 0.0, 2.0, 0.5])


def test_dilate_and_translate_semantics():
    f = parse("(chi 0 1)")
    x = pts1(0.25, 0.75, 1.25, 2.25)
    assert list(evaluate(dilated(f, 2.0), x)) == [1.0, 0.0, 0.0, 0.0]
    assert list(evaluate(translated(f, 2.0), x)) == [0.0, 0.0, 0.0, 1.0]
    assert isinstance(dilated(f, 2.0), Dilate) and isinstance(translated(f, 1.0), Translate)


def test_sum_adds():
    e = parse("(sum (chi 0 1) (chi 0 2))")
    assert isinstance(e, Sum)
    assert list(evaluate(e, pts1(0.5, 1.5))) == [2.0, 1.0]


def test_singular_only_for_untruncated_pow():
    x = pts1(-1.0, 0.0, 1.0)
    assert singular_at_node(parse("(pow -0.5 0)"), x)
    assert not singular_at_node(parse("(pow -0.5 0.1)"), x)
    assert not singular_at_node(parse("(pow 0.5 0)"), x)
    assert not singular_at_node(Bump(0.0, 1.0), x)
