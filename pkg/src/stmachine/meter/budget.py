"""Resource budgets r(n), s(n), q(n) and closed-form budget expressions."""
from __future__ import annotations

import ast
import math
from dataclasses import dataclass
from typing import Callable, Optional

from .machine import RunReport

_FUNCS = {"log2": math.log2, "sqrt": math.sqrt, "ceil": math.ceil}


class BudgetSyntaxError(ValueError):
    pass


class Expr:
    """A budget expression over ``n``: literals, n, log2, sqrt, ceil, + and *."""

    def __init__(self, text: str) -> None:
        self.text = text.strip()
        try:
            tree = ast.parse(self.text, mode="eval")
        except SyntaxError as exc:
            raise BudgetSyntaxError(f"cannot parse budget {text!r}: {exc.msg}") from None
        self._check(tree.body)
        self._code = compile(tree, "<budget>", "eval")

    def _check(self, node: ast.AST) -> None:
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return
        if isinstance(node, ast.Name) and node.id == "n":
            return
        if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Mult)):
            self._check(node.left)
            self._check(node.right)
            return
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Name)
            and node.func.id in _FUNCS
            and len(node.args) == 1
            and not node.keywords
        ):
            self._check(node.args[0])
            return
        raise BudgetSyntaxError(f"unsupported construct in budget {self.text!r}: {ast.dump(node)}")

    def __call__(self, n: int) -> float:
        if n <= 0:
            # log2(0) is undefined; budgets are monotone so clamp to n = 1
            n = max(n, 1)
        return eval(self._code, {"__builtins__": {}}, dict(_FUNCS, n=n))

    def __repr__(self) -> str:
        return f"Expr({self.text!r})"


@dataclass(frozen=True)
class Budget:
    r: Callable[[int], float]
    s: Callable[[int], float]
    q: Optional[Callable[[int], float]] = None

    @classmethod
    def parse(cls, text: str) -> "Budget":
        """Parse ``r=EXPR,s=EXPR[,q=EXPR]``. Missing r or s means unbounded."""
        parts: dict[str, Expr] = {}
        for chunk in _split_top_level(text):
            key, sep, expr = chunk.partition("=")
            key = key.strip()
            if not sep or key not in ("r", "s", "q"):
                raise BudgetSyntaxError(f"bad budget item {chunk!r}")
            parts[key] = Expr(expr)
        unbounded = lambda n: math.inf  # noqa: E731
        return cls(parts.get("r", unbounded), parts.get("s", unbounded), parts.get("q"))


def _split_top_level(text: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if "".join(cur).strip():
        out.append("".join(cur))
    return out


@dataclass(frozen=True)
class BudgetCheck:
    passed: bool
    violated: tuple

    def __bool__(self) -> bool:
        return self.passed


def check_budget(report: RunReport, budget: Budget) -> BudgetCheck:
    n = report.n
    violated = []
    if report.r_used > budget.r(n):
        violated.append("r")
    if report.s_peak > budget.s(n):
        violated.append("s")
    if budget.q is not None and report.q_used > budget.q(n):
        violated.append("q")
    return BudgetCheck(not violated, tuple(violated))
