"""Parser for the small algebraic expression language used in scenario files.

Grammar: rational numbers, variable names, ``+ - * /``, and powers written
``^`` or ``**`` with integer or half-integer exponents, e.g.
``(1+lambda*mu)/((1-lambda^2)*(1-mu^2))`` or ``lambda^(1/2)``.
Division by a product is inverted factor by factor so that the result keeps
its (1 - monomial) denominators.
"""
from __future__ import annotations

import ast
import re
from fractions import Fraction

from .ratfun import LaurentPoly, Monomial, RatFun, VarTable

_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


class ExprError(ValueError):
    pass


def _prepare(text: str, vt: VarTable) -> tuple:
    names = {}

    def sub(m):
        name = m.group(0)
        if name not in vt.names:
            raise ExprError(f"unknown variable {name!r} in {text!r}")
        return names.setdefault(name, f"v_{vt.names.index(name)}")

    src = _NAME.sub(sub, text.replace("^", "**"))
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ExprError(f"cannot parse {text!r}: {exc.msg}") from None
    return tree.body, {v: k for k, v in names.items()}


def _const(node) -> Fraction:
    """Evaluate a numeric constant sub-expression (used for exponents)."""
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        if isinstance(node.value, float):
            raise ExprError("write exponents and coefficients as fractions, not floats")
        return Fraction(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _const(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Div, ast.Add, ast.Sub, ast.Mult)):
        a, b = _const(node.left), _const(node.right)
        if isinstance(node.op, ast.Div):
            return a / b
        if isinstance(node.op, ast.Add):
            return a + b
        return a - b if isinstance(node.op, ast.Sub) else a * b
    raise ExprError("exponent must be a rational constant")


def _as_monomial(f: RatFun):
    p = f.as_poly()
    if p is None or len(p.terms) != 1:
        return None
    (e, c), = p.terms.items()
    return Monomial(f.vt, e), c


class _Eval:
    def __init__(self, vt: VarTable, names: dict):
        self.vt = vt
        self.names = names

    def __call__(self, node) -> RatFun:
        vt = self.vt
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, int):
                raise ExprError(f"unsupported constant {node.value!r}")
            return RatFun.const(vt, node.value)
        if isinstance(node, ast.Name):
            return RatFun.mono(vt.var(self.names[node.id]))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = self(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            op = node.op
            if isinstance(op, ast.Add):
                return self(node.left) + self(node.right)
            if isinstance(op, ast.Sub):
                return self(node.left) - self(node.right)
            if isinstance(op, ast.Mult):
                return self(node.left) * self(node.right)
            if isinstance(op, ast.Div):
                return self(node.left) * self.inverse(node.right)
            if isinstance(op, ast.Pow):
                return self.power(self(node.left), _const(node.right))
        raise ExprError(f"unsupported syntax: {ast.dump(node)[:60]}")

    def power(self, base: RatFun, k: Fraction) -> RatFun:
        if k.denominator == 1:
            return base ** int(k)
        mono = _as_monomial(base)
        if mono is None or mono[1] != 1 or (2 * k).denominator != 1:
            raise ExprError("fractional powers are only allowed on bare monomials, with exponent n/2")
        m = mono[0]
        # m^(p/2): doubled exponents times p/2 must stay integral
        e = [x * k for x in m.exp2]
        if any(Fraction(x).denominator != 1 for x in e):
            raise ExprError("power produces an exponent finer than 1/2")
        return RatFun.mono(Monomial(self.vt, tuple(int(x) for x in e)))

    def inverse(self, node) -> RatFun:
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Mult):
            return self.inverse(node.left) * self.inverse(node.right)
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Div):
            return self.inverse(node.left) * self(node.right)
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Pow):
            k = _const(node.right)
            if k.denominator == 1:
                return self.inverse(node.left) ** int(k)
        try:
            return self(node).inverse()
        except (ValueError, ZeroDivisionError) as exc:
            raise ExprError(f"cannot divide by this expression: {exc}") from None


def parse_ratfun(text, vt: VarTable) -> RatFun:
    if isinstance(text, (int, Fraction)):
        return RatFun.const(vt, text)
    if not isinstance(text, str):
        raise ExprError(f"expected an expression string, got {type(text).__name__}")
    node, names = _prepare(text, vt)
    return _Eval(vt, names)(node)


def parse_laurent(text, vt: VarTable) -> LaurentPoly:
    f = parse_ratfun(text, vt)
    p = f.as_poly()
    if p is None:
        raise ExprError(f"{text!r} is not a Laurent polynomial")
    return p
