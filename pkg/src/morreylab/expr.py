"""Closed-form function expressions used by configs and the CLI.

The mini-language is a parenthesized prefix form::

    zero
    chi a b                 indicator of [a, b) on every axis (half-open,
                            like the dyadic cubes, so node-aligned ends are
                            counted once)
    gauss sigma             exp(-|x|^2 / sigma^2)
    bump center radius      exp(1 - 1/(1 - |x-c|^2/radius^2)) inside the ball
    pow a eps               |x|^a for |x| >= eps, 0 inside
    dilate lam <expr>       x -> expr(lam * x)
    translate v <expr>      x -> expr(x - v)
    sum <expr> <expr>

Vector arguments (``center``, ``v``) are written ``1,0`` and a scalar is
broadcast to every axis.  The outer parentheses are optional at top level.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

Number = Union[float, tuple]


class ExprError(ValueError):
    """Malformed or unsupported function expression."""


@dataclass(frozen=True)
class Zero:
    def text(self) -> str:
        return "zero"


@dataclass(frozen=True)
class Chi:
    a: float
    b: float

    def text(self) -> str:
        return f"(chi {_num(self.a)} {_num(self.b)})"


@dataclass(frozen=True)
class Gauss:
    sigma: float

    def text(self) -> str:
        return f"(gauss {_num(self.sigma)})"


@dataclass(frozen=True)
class Bump:
    center: Number
    radius: float

    def text(self) -> str:
        return f"(bump {_num(self.center)} {_num(self.radius)})"


@dataclass(frozen=True)
class Pow:
    a: float
    eps: float

    def text(self) -> str:
        return f"(pow {_num(self.a)} {_num(self.eps)})"


@dataclass(frozen=True)
class Dilate:
    lam: float
    inner: "FunctionExpr"

    def text(self) -> str:
        return f"(dilate {_num(self.lam)} {self.inner.text()})"


@dataclass(frozen=True)
class Translate:
    v: Number
    inner: "FunctionExpr"

    def text(self) -> str:
        return f"(translate {_num(self.v)} {self.inner.text()})"


@dataclass(frozen=True)
class Sum:
    left: "FunctionExpr"
    right: "FunctionExpr"

    def text(self) -> str:
        return f"(sum {self.left.text()} {self.right.text()})"


FunctionExpr = Union[Zero, Chi, Gauss, Bump, Pow, Dilate, Translate, Sum]


def _num(v) -> str:
    if isinstance(v, tuple):
        return ",".join(_num(c) for c in v)
    return repr(float(v)).removesuffix(".0") if float(v).is_integer() else repr(float(v))


def _tokenize(text: str) -> list[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def _read(tokens: list[str], pos: int):
    if pos >= len(tokens):
        raise ExprError("unexpected end of expression")
    tok = tokens[pos]
    if tok == "(":
        items = []
        pos += 1
        while pos < len(tokens) and tokens[pos] != ")":
            item, pos = _read(tokens, pos)
            items.append(item)
        if pos >= len(tokens):
            raise ExprError("unbalanced parentheses")
        return items, pos + 1
    if tok == ")":
        raise ExprError("unexpected ')'")
    return tok, pos + 1


def _scalar(tok) -> float:
    if not isinstance(tok, str):
        raise ExprError(f"expected a number, got {tok!r}")
    try:
        return float(tok)
    except ValueError:
        raise ExprError(f"expected a number, got {tok!r}") from None


def _vector(tok) -> Number:
    if isinstance(tok, str) and "," in tok:
        return tuple(_scalar(c) for c in tok.split(","))
    return _scalar(tok)


_ARITY = {"zero": 0, "chi": 2, "gauss": 1, "bump": 2, "pow": 2,
          "dilate": 2, "translate": 2, "sum": 2}


def _build(node) -> FunctionExpr:
    if isinstance(node, str):
        node = [node]
    if not node or not isinstance(node[0], str):
        raise ExprError(f"expected an operator name in {node!r}")
    head, args = node[0], node[1:]
    if head not in _ARITY:
        raise ExprError(f"unknown expression kind {head!r}")
    if len(args) != _ARITY[head]:
        raise ExprError(f"{head} takes {_ARITY[head]} arguments, got {len(args)}")
    if head == "zero":
        return Zero()
    if head == "chi":
        a, b = _scalar(args[0]), _scalar(args[1])
        if not a < b:
            raise ExprError("chi needs a < b")
        return Chi(a, b)
    if head == "gauss":
        s = _scalar(args[0])
        if s <= 0:
            raise ExprError("gauss needs sigma > 0")
        return Gauss(s)
    if head == "bump":
        rad = _scalar(args[1])
        if rad <= 0:
            raise ExprError("bump needs radius > 0")
        return Bump(_vector(args[0]), rad)
    if head == "pow":
        eps = _scalar(args[1])
        if eps < 0:
            raise ExprError("pow needs eps >= 0")
        return Pow(_scalar(args[0]), eps)
    if head == "dilate":
        lam = _scalar(args[0])
        if lam <= 0:
            raise ExprError("dilate needs lambda > 0")
        return Dilate(lam, _build(args[1]))
    if head == "translate":
        return Translate(_vector(args[0]), _build(args[1]))
    return Sum(_build(args[0]), _build(args[1]))


def parse(text: str) -> FunctionExpr:
    """Parse the text form; a bare top level like ``chi -1 1`` is accepted."""
    tokens = _tokenize(text)
    if not tokens:
        raise ExprError("empty expression")
    if tokens[0] != "(":
        tokens = ["(", *tokens, ")"]
    node, pos = _read(tokens, 0)
    if pos != len(tokens):
        raise ExprError(f"trailing tokens in {text!r}")
    return _build(node)


def as_expr(e) -> FunctionExpr:
    return parse(e) if isinstance(e, str) else e


def _axis_vec(v: Number, n: int) -> np.ndarray:
    arr = np.broadcast_to(np.asarray(v, dtype=float), (n,)) if np.ndim(v) == 0 else np.asarray(v, dtype=float)
    if arr.shape != (n,):
        raise ExprError(f"vector {v!r} does not match dimension {n}")
    return arr


def evaluate(expr: FunctionExpr, pts: np.ndarray) -> np.ndarray:
    """Evaluate at points of shape (..., n); returns real values of shape (...)."""
    n = pts.shape[-1]
    if isinstance(expr, Zero):
        return np.zeros(pts.shape[:-1])
    if isinstance(expr, Chi):
        inside = (pts >= expr.a) & (pts < expr.b)
        return np.all(inside, axis=-1).astype(float)
    if isinstance(expr, Gauss):
        return np.exp(-np.sum(pts**2, axis=-1) / expr.sigma**2)
    if isinstance(expr, Bump):
        c = _axis_vec(expr.center, n)
        s2 = np.sum((pts - c) ** 2, axis=-1) / expr.radius**2
        out = np.zeros(s2.shape)
        inside = s2 < 1.0
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - s2[inside]))
        return out
    if isinstance(expr, Pow):
        r = np.sqrt(np.sum(pts**2, axis=-1))
        keep = r >= expr.eps
        if expr.a < 0:
            keep &= r > 0
        out = np.zeros(r.shape)
        out[keep] = r[keep] ** expr.a
        return out
    if isinstance(expr, Dilate):
        return evaluate(expr.inner, expr.lam * pts)
    if isinstance(expr, Translate):
        return evaluate(expr.inner, pts - _axis_vec(expr.v, n))
    if isinstance(expr, Sum):
        return evaluate(expr.left, pts) + evaluate(expr.right, pts)
    raise ExprError(f"cannot evaluate {expr!r}")


def singular_at_node(expr: FunctionExpr, pts: np.ndarray) -> bool:
    """True if some node hits a pole of a ``pow`` with negative exponent and eps = 0."""
    if isinstance(expr, Pow):
        if expr.a < 0 and expr.eps == 0:
            return bool(np.any(np.sum(pts**2, axis=-1) == 0))
        return False
    if isinstance(expr, Dilate):
        return singular_at_node(expr.inner, expr.lam * pts)
    if isinstance(expr, Translate):
        return singular_at_node(expr.inner, pts - _axis_vec(expr.v, pts.shape[-1]))
    if isinstance(expr, Sum):
        return singular_at_node(expr.left, pts) or singular_at_node(expr.right, pts)
    return False


def dilated(expr: FunctionExpr, lam: float) -> FunctionExpr:
    return Dilate(lam, expr)


def translated(expr: FunctionExpr, v: Number) -> FunctionExpr:
    return Translate(v, expr)
