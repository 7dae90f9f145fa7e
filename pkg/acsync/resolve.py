"""``${...}`` interpolation and arithmetic over already-resolved config values."""

import keyword
import re
from functools import singledispatchmethod
from typing import Any

from acsync.tags import ResolutionError


class ExpressionError(Exception):
    """Errors specific to expression evaluation."""


_OPERATORS = (
    "+", "-", "*", "/", "//", "%", "**", "(", ")",
    "==", "!=", "<=", ">=", "<", ">",
)
_KEYWORDS = {"and", "or", "not", "if", "else"}
_FUNCTIONS = {"min": min, "max": max, "int": int, "float": float, "round": round}


def is_expression(expression: str) -> bool:
    return any(op in expression for op in _OPERATORS) or any(
        re.search(rf"\b{kw}\b", expression) for kw in _KEYWORDS
    )


def _extract_variables(expression: str) -> list[str]:
    no_strings = re.sub(r'"[^"]*"|\'[^\']*\'', "", expression)
    names = re.findall(r"(?<![\w.])[a-zA-Z_][a-zA-Z0-9_.]*", no_strings)
    return [n for n in names if not keyword.iskeyword(n) and n not in _FUNCTIONS]


class Resolver:
    """Resolve a nested mapping top to bottom; each value may reference
    anything resolved before it by dotted path."""

    VAR_RE = re.compile(r"\$\{([^}]+)\}")

    def __init__(self) -> None:
        self.ctx: dict[str, Any] = {}

    @singledispatchmethod
    def resolve(self, node: Any, path: str = "") -> Any:
        return node

    @resolve.register
    def _(self, node: dict, path: str = "") -> dict[str, Any]:
        out: dict[str, Any] = {}
        self.ctx[path] = out
        for key, val in node.items():
            child = f"{path}.{key}" if path else str(key)
            out[key] = self.resolve(val, child)
            self.ctx[child] = out[key]
        return out

    @resolve.register
    def _(self, node: list, path: str = "") -> list[Any]:
        return [self.resolve(x, path) for x in node]

    @resolve.register
    def _(self, node: str, path: str = "") -> Any:
        if m := self.VAR_RE.fullmatch(node):
            return self._evaluate(m.group(1))
        return self.VAR_RE.sub(lambda m: str(self._evaluate(m.group(1))), node)

    def _evaluate(self, expression: str) -> Any:
        expression = expression.strip()
        if not is_expression(expression):
            return self._get(expression)
        namespace: dict[str, Any] = dict(_FUNCTIONS)
        safe_expression = expression
        for name in sorted(set(_extract_variables(expression)), key=len, reverse=True):
            try:
                value = self._get(name)
            except ResolutionError as e:
                raise ExpressionError(f"Failed to resolve variable '{name}': {e}") from e
            safe_name = name.replace(".", "__")
            namespace[safe_name] = value
            safe_expression = re.sub(
                rf"(?<![\w.]){re.escape(name)}(?![\w.])", safe_name, safe_expression
            )
        try:
            return eval(safe_expression, {"__builtins__": {}}, namespace)
        except Exception as e:
            raise ExpressionError(f"Invalid expression '{expression}': {e}") from e

    def _get(self, path: str) -> Any:
        if path in self.ctx:
            return self.ctx[path]

        parts = path.split(".")
        if parts[0] not in self.ctx:
            raise ResolutionError(f"Unknown variable '{parts[0]}'")
        obj = self.ctx[parts[0]]
        for part in parts[1:]:
            try:
                obj = obj[part]
            except (KeyError, TypeError) as e:
                raise ResolutionError(
                    f"Failed to resolve '{part}' in '{path}': {e}"
                ) from e
        return obj
