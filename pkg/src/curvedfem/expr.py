"""Boundary-data expressions: arithmetic over x, y and pi.

Supports + - * / ^ (power), unary minus, parentheses and numeric
literals, e.g. ``1-x`` or ``pi/2*y^2``.
"""

import ast
import math

import numpy as np

from .errors import ConfigurationError

_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)
_NAMES = {"x", "y", "pi"}


def _check(node, source):
    if isinstance(node, ast.Expression):
        return _check(node.body, source)
    if isinstance(node, ast.BinOp) and isinstance(node.op, _BINOPS):
        _check(node.left, source)
        _check(node.right, source)
    elif isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        _check(node.operand, source)
    elif isinstance(node, ast.Constant) and type(node.value) in (int, float):
        pass
    elif isinstance(node, ast.Name) and node.id in _NAMES:
        pass
    else:
        raise ConfigurationError(f"unsupported syntax in expression {source!r}: {ast.dump(node)[:40]}")


class Expression:
    """Compiled scalar function of (x, y); evaluates elementwise on arrays."""

    def __init__(self, source):
        self.source = str(source).strip()
        if not self.source:
            raise ConfigurationError("empty expression")
        if "**" in self.source:
            raise ConfigurationError(f"use ^ for powers in {self.source!r}")
        try:
            tree = ast.parse(self.source.replace("^", "**"), mode="eval")
        except SyntaxError as exc:
            raise ConfigurationError(f"cannot parse expression {self.source!r}: {exc.msg}") from None
        _check(tree, self.source)
        self._code = compile(tree, "<expr>", "eval")

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        val = eval(self._code, {"__builtins__": {}}, {"x": x, "y": y, "pi": math.pi})
        return np.broadcast_to(np.asarray(val, dtype=float), np.broadcast(x, y).shape)

    def __repr__(self):
        return f"Expression({self.source!r})"


def parse(source):
    return Expression(source)
