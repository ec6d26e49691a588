"""Core XPath syntax: tokenizer, recursive-descent parser and unparser.

Grammar (``pred`` binds ``or`` loosest, then ``and``, then ``not``)::

    corexpath    := locationpath | '/' locationpath
    locationpath := step ('/' step)*
    step         := axis '::' test ( '[' pred ']' )?
    pred         := pred 'or' pred | pred 'and' pred | 'not' '(' pred ')'
                  | '(' pred ')' | corexpath
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

SUPPORTED_AXES = ("child", "parent", "descendant", "ancestor")
DOWNWARD_AXES = ("child", "descendant")
XPATH_AXES = SUPPORTED_AXES + (
    "self",
    "descendant-or-self",
    "ancestor-or-self",
    "following",
    "following-sibling",
    "preceding",
    "preceding-sibling",
    "attribute",
    "namespace",
)
WILDCARD = "*"


class XPathSyntaxError(ValueError):
    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} at offset {position}")
        self.position = position


class UnsupportedAxisError(ValueError):
    def __init__(self, axis: str, position: int) -> None:
        super().__init__(f"axis {axis!r} is not supported (offset {position})")
        self.axis = axis
        self.position = position


@dataclass(frozen=True)
class And:
    left: "Pred"
    right: "Pred"


@dataclass(frozen=True)
class Or:
    left: "Pred"
    right: "Pred"


@dataclass(frozen=True)
class Not:
    arg: "Pred"


@dataclass(frozen=True)
class Step:
    axis: str
    test: str
    pred: Optional["Pred"] = None


@dataclass(frozen=True)
class LocationPath:
    absolute: bool
    steps: tuple


Pred = Union[And, Or, Not, LocationPath]
CoreXPathAst = LocationPath

_TOKENS = re.compile(
    r"\s*(?:(?P<dcolon>::)|(?P<punct>[/\[\]()*])|(?P<name>[A-Za-z0-9_.][A-Za-z0-9_.\-]*))"
)


def _lex(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKENS.match(text, pos)
        if m is None or m.end() == pos:
            raise XPathSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str) -> None:
        self.toks = _lex(text)
        self.i = 0

    def peek(self, offset: int = 0):
        return self.toks[min(self.i + offset, len(self.toks) - 1)]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        tok = self.take()
        if tok[1] != value or tok[0] == "end":
            what = tok[1] or "end of input"
            raise XPathSyntaxError(f"expected {value!r}, found {what!r}", tok[2])
        return tok

    def corexpath(self) -> LocationPath:
        absolute = False
        if self.peek()[1] == "/":
            self.take()
            absolute = True
        steps = [self.step()]
        while self.peek()[1] == "/":
            self.take()
            steps.append(self.step())
        return LocationPath(absolute, tuple(steps))

    def step(self) -> Step:
        kind, axis, pos = self.take()
        if kind != "name":
            raise XPathSyntaxError(f"expected an axis name, found {axis or 'end of input'!r}", pos)
        if axis not in XPATH_AXES:
            raise XPathSyntaxError(f"unknown axis {axis!r}", pos)
        self.expect("::")
        kind, test, tpos = self.take()
        if kind != "name" and test != WILDCARD:
            raise XPathSyntaxError(f"expected a node test, found {test or 'end of input'!r}", tpos)
        if axis not in SUPPORTED_AXES:
            raise UnsupportedAxisError(axis, pos)
        pred = None
        if self.peek()[1] == "[":
            self.take()
            pred = self.pred_or()
            self.expect("]")
        return Step(axis, test, pred)

    def pred_or(self):
        left = self.pred_and()
        while self.peek()[0] == "name" and self.peek()[1] == "or":
            self.take()
            left = Or(left, self.pred_and())
        return left

    def pred_and(self):
        left = self.pred_atom()
        while self.peek()[0] == "name" and self.peek()[1] == "and":
            self.take()
            left = And(left, self.pred_atom())
        return left

    def pred_atom(self):
        kind, value, pos = self.peek()
        if kind == "name" and value == "not" and self.peek(1)[1] == "(":
            self.take()
            self.take()
            arg = self.pred_or()
            self.expect(")")
            return Not(arg)
        if value == "(" and kind == "punct":
            self.take()
            inner = self.pred_or()
            self.expect(")")
            return inner
        return self.corexpath()


def parse_corexpath(text: str) -> CoreXPathAst:
    p = _Parser(text)
    ast = p.corexpath()
    kind, value, pos = p.peek()
    if kind != "end":
        raise XPathSyntaxError(f"unexpected {value!r}", pos)
    return ast


def unparse(node) -> str:
    if isinstance(node, LocationPath):
        body = "/".join(unparse(s) for s in node.steps)
        return "/" + body if node.absolute else body
    if isinstance(node, Step):
        text = f"{node.axis}::{node.test}"
        return text + (f"[{unparse(node.pred)}]" if node.pred is not None else "")
    if isinstance(node, Not):
        return f"not({unparse(node.arg)})"
    if isinstance(node, And):
        return f"{_wrap(node.left, Or)} and {_wrap(node.right, (Or, And))}"
    if isinstance(node, Or):
        return f"{unparse(node.left)} or {_wrap(node.right, Or)}"
    raise TypeError(f"not a Core XPath node: {node!r}")


def _wrap(node, kinds) -> str:
    text = unparse(node)
    return f"({text})" if isinstance(node, kinds) else text


def iter_steps(node):
    """Every step of the query, including those inside predicates."""
    if isinstance(node, LocationPath):
        for s in node.steps:
            yield s
            if s.pred is not None:
                yield from iter_steps(s.pred)
    elif isinstance(node, Not):
        yield from iter_steps(node.arg)
    elif isinstance(node, (And, Or)):
        yield from iter_steps(node.left)
        yield from iter_steps(node.right)
