"""Evaluate closed-form strings such as ``"2/(e^-1 - 1)"`` without ``eval``."""

from __future__ import annotations

import ast
import math
import operator

_NAMES = {"e": math.e, "pi": math.pi, "inf": math.inf}
_FUNCS = {"exp": math.exp, "expm1": math.expm1, "log": math.log, "sqrt": math.sqrt}
_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNOPS = {ast.UAdd: operator.pos, ast.USub: operator.neg}


class ExpressionError(ValueError):
    pass


def _walk(node: ast.AST) -> float:
    if isinstance(node, ast.Expression):
        return _walk(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_walk(node.left), _walk(node.right))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
        return _UNOPS[type(node.op)](_walk(node.operand))
    if (
        isinstance(node, ast.Call)
        and isinstance(node.func, ast.Name)
        and node.func.id in _FUNCS
        and len(node.args) == 1
        and not node.keywords
    ):
        return _FUNCS[node.func.id](_walk(node.args[0]))
    raise ExpressionError(f"unsupported expression element: {ast.dump(node)}")


def evaluate(expr: str | float | int) -> float:
    """Numeric value of ``expr``; ``^`` means power, as in ``e^2``."""
    if isinstance(expr, (int, float)):
        return float(expr)
    text = expr.strip().replace("^", "**")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {expr!r}: {exc.msg}") from exc
    return _walk(tree)
