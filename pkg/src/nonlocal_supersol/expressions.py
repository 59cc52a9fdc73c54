"""Safe parser for the small radial-expression grammar used by the CLI.

Supported syntax: numbers, one free variable (``r`` by default), the
operators ``+ - * / ^`` (``^`` is an alias for ``**``), unary minus,
``exp``, ``log``, ``sqrt``, and ``indicator(a, b)`` which is 1 on
``[a, b)`` and 0 elsewhere.  Expressions compile to vectorized numpy
callables.

The rational subset (no transcendentals or indicators, constant
exponents only) additionally supports symbolic differentiation; the
power-perturbed operator family relies on that to get analytic
derivatives.
"""

from __future__ import annotations

import ast

import numpy as np

_FUNCTIONS = ("exp", "log", "sqrt", "indicator")

_BINOPS = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
    ast.Pow: np.power,
}


class ExpressionError(ValueError):
    """The text does not fit the supported grammar."""


def _parse_tree(text: str, variable: str) -> ast.expr:
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {text!r}: {exc}") from None
    _validate(tree.body, variable)
    return tree.body


def _validate(node: ast.expr, variable: str) -> None:
    if isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)):
            raise ExpressionError(f"unsupported literal {node.value!r}")
    elif isinstance(node, ast.Name):
        if node.id != variable:
            raise ExpressionError(f"unknown name {node.id!r} (variable is {variable!r})")
    elif isinstance(node, ast.BinOp):
        if type(node.op) not in _BINOPS:
            raise ExpressionError(f"unsupported operator {ast.dump(node.op)}")
        _validate(node.left, variable)
        _validate(node.right, variable)
    elif isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, (ast.USub, ast.UAdd)):
            raise ExpressionError("unsupported unary operator")
        _validate(node.operand, variable)
    elif isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS:
            raise ExpressionError("only exp, log, sqrt and indicator calls are allowed")
        if node.keywords:
            raise ExpressionError("keyword arguments are not allowed")
        if node.func.id == "indicator":
            if len(node.args) != 2:
                raise ExpressionError("indicator takes exactly two numeric arguments")
            for arg in node.args:
                _constant_value(arg)
        else:
            if len(node.args) != 1:
                raise ExpressionError(f"{node.func.id} takes exactly one argument")
            _validate(node.args[0], variable)
    else:
        raise ExpressionError(f"unsupported syntax {ast.dump(node)}")


def _constant_value(node: ast.expr) -> float:
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _constant_value(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    raise ExpressionError("indicator bounds must be numeric constants")


def _evaluate(node: ast.expr, x: np.ndarray, variable: str) -> np.ndarray:
    if isinstance(node, ast.Constant):
        return np.full_like(x, float(node.value))
    if isinstance(node, ast.Name):
        return x
    if isinstance(node, ast.BinOp):
        left = _evaluate(node.left, x, variable)
        right = _evaluate(node.right, x, variable)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return _BINOPS[type(node.op)](left, right)
    if isinstance(node, ast.UnaryOp):
        val = _evaluate(node.operand, x, variable)
        return -val if isinstance(node.op, ast.USub) else val
    if isinstance(node, ast.Call):
        name = node.func.id
        if name == "indicator":
            a = _constant_value(node.args[0])
            b = _constant_value(node.args[1])
            return ((x >= a) & (x < b)).astype(float)
        arg = _evaluate(node.args[0], x, variable)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return getattr(np, name)(arg)
    raise ExpressionError("unreachable node")  # pragma: no cover


def _diff(node: ast.expr, variable: str) -> str:
    """Symbolic derivative of the rational subset, rendered as source text."""
    if isinstance(node, ast.Constant):
        return "0"
    if isinstance(node, ast.Name):
        return "1"
    if isinstance(node, ast.UnaryOp):
        inner = _diff(node.operand, variable)
        return f"-({inner})" if isinstance(node.op, ast.USub) else inner
    if isinstance(node, ast.BinOp):
        ls, rs = ast.unparse(node.left), ast.unparse(node.right)
        ld, rd = None, None
        if isinstance(node.op, (ast.Add, ast.Sub)):
            ld, rd = _diff(node.left, variable), _diff(node.right, variable)
            sign = "+" if isinstance(node.op, ast.Add) else "-"
            return f"(({ld}) {sign} ({rd}))"
        if isinstance(node.op, ast.Mult):
            ld, rd = _diff(node.left, variable), _diff(node.right, variable)
            return f"(({ld})*({rs}) + ({ls})*({rd}))"
        if isinstance(node.op, ast.Div):
            ld, rd = _diff(node.left, variable), _diff(node.right, variable)
            return f"((({ld})*({rs}) - ({ls})*({rd})) / ({rs})**2)"
        if isinstance(node.op, ast.Pow):
            try:
                n = _constant_value(node.right)
            except ExpressionError:
                raise ExpressionError("only constant exponents are differentiable") from None
            ld = _diff(node.left, variable)
            return f"({n!r}*({ls})**({n!r}-1)*({ld}))"
    raise ExpressionError("expression is outside the differentiable rational subset")


class Expression:
    """A compiled expression of one radial variable."""

    def __init__(self, text: str, variable: str = "r"):
        self.text = text
        self.variable = variable
        self._tree = _parse_tree(text, variable)
        self.breakpoints = tuple(sorted(self._collect_breakpoints()))

    def _collect_breakpoints(self) -> set[float]:
        points: set[float] = set()
        for node in ast.walk(self._tree):
            if isinstance(node, ast.Call) and node.func.id == "indicator":
                points.add(_constant_value(node.args[0]))
                points.add(_constant_value(node.args[1]))
        return points

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        out = _evaluate(self._tree, np.atleast_1d(arr), self.variable)
        return float(out[0]) if arr.ndim == 0 else out

    def diff(self) -> "Expression":
        return Expression(_diff(self._tree, self.variable), self.variable)

    def __repr__(self):
        return f"Expression({self.text!r}, variable={self.variable!r})"


def parse_expression(text: str, variable: str = "r") -> Expression:
    return Expression(text, variable)
