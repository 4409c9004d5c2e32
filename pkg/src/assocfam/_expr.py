"""A tiny arithmetic expression language for laws, warps and graphs.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | atom
    atom   := NUMBER | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')'

Expressions evaluate on floats or :class:`~assocfam.jets.Jet2` values, so a
warp function written as ``cosh(2*t)/2`` yields exact derivatives when ``t``
is a jet. Nothing in this module is part of the public API.
"""

from __future__ import annotations

import re
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Union

from .exceptions import ConfigError, DomainError
from .jets import Jet2, JetLike, lift

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_θ][A-Za-z_0-9θ]*)"
    r"|(?P<op>[-+*/(),]))"
)

LAW_FUNCTIONS = frozenset({"sin", "cos", "pow"})
WARP_FUNCTIONS = frozenset({"sin", "cos", "sinh", "cosh", "exp", "log", "sqrt", "pow"})
GRAPH_FUNCTIONS = WARP_FUNCTIONS

_ARITY = {"pow": 2}


@dataclass(frozen=True)
class _Num:
    value: float


@dataclass(frozen=True)
class _Var:
    name: str


@dataclass(frozen=True)
class _Neg:
    operand: _Node


@dataclass(frozen=True)
class _BinOp:
    op: str
    left: _Node
    right: _Node


@dataclass(frozen=True)
class _Call:
    fn: str
    args: tuple[_Node, ...]


_Node = Union[_Num, _Var, _Neg, _BinOp, _Call]


def _tokenize(source: str) -> list[tuple[str, str]]:
    tokens: list[tuple[str, str]] = []
    pos = 0
    stripped = source.rstrip()
    while pos < len(stripped):
        match = _TOKEN.match(stripped, pos)
        if match is None or match.end() == pos:
            raise ConfigError(f"unexpected character {stripped[pos:pos + 1]!r} in {source!r}")
        kind = match.lastgroup
        assert kind is not None
        tokens.append((kind, match.group(kind)))
        pos = match.end()
    return tokens


class _Parser:
    def __init__(self, source: str, variables: frozenset[str], functions: frozenset[str]) -> None:
        self.source = source
        self.tokens = _tokenize(source)
        self.pos = 0
        self.variables = variables
        self.functions = functions

    def error(self, message: str) -> ConfigError:
        return ConfigError(f"{message} in expression {self.source!r}")

    def peek(self) -> tuple[str, str] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, text: str | None = None) -> tuple[str, str]:
        token = self.peek()
        if token is None:
            raise self.error("unexpected end")
        if text is not None and token[1] != text:
            raise self.error(f"expected {text!r}, got {token[1]!r}")
        self.pos += 1
        return token

    def parse(self) -> _Node:
        if not self.tokens:
            raise self.error("empty expression")
        node = self.expr()
        if self.peek() is not None:
            raise self.error(f"trailing {self.peek()[1]!r}")  # type: ignore[index]
        return node

    def expr(self) -> _Node:
        node = self.term()
        while (token := self.peek()) is not None and token[1] in "+-" and token[0] == "op":
            self.take()
            node = _BinOp(token[1], node, self.term())
        return node

    def term(self) -> _Node:
        node = self.unary()
        while (token := self.peek()) is not None and token[1] in ("*", "/"):
            self.take()
            node = _BinOp(token[1], node, self.unary())
        return node

    def unary(self) -> _Node:
        token = self.peek()
        if token is not None and token[1] in ("+", "-"):
            self.take()
            operand = self.unary()
            return _Neg(operand) if token[1] == "-" else operand
        return self.atom()

    def atom(self) -> _Node:
        kind, text = self.take()
        if kind == "num":
            return _Num(float(text))
        if kind == "name":
            following = self.peek()
            if following is not None and following[1] == "(":
                if text not in self.functions:
                    raise self.error(f"unknown function {text!r}")
                self.take("(")
                args = [self.expr()]
                while (token := self.peek()) is not None and token[1] == ",":
                    self.take()
                    args.append(self.expr())
                self.take(")")
                if len(args) != _ARITY.get(text, 1):
                    raise self.error(f"{text} takes {_ARITY.get(text, 1)} argument(s)")
                return _Call(text, tuple(args))
            if text not in self.variables:
                raise self.error(f"unknown name {text!r}")
            return _Var(text)
        if text == "(":
            node = self.expr()
            self.take(")")
            return node
        raise self.error(f"unexpected {text!r}")


def _evaluate(node: _Node, env: Mapping[str, JetLike]) -> JetLike:
    if isinstance(node, _Num):
        return node.value
    if isinstance(node, _Var):
        return env[node.name]
    if isinstance(node, _Neg):
        return -_evaluate(node.operand, env)
    if isinstance(node, _BinOp):
        left = _evaluate(node.left, env)
        right = _evaluate(node.right, env)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if isinstance(right, Jet2):
            return left / right
        if right == 0:
            raise DomainError("division by zero")
        return left / right
    arg = _evaluate(node.args[0], env)
    if node.fn == "pow":
        exponent = _evaluate(node.args[1], env)
        if isinstance(exponent, Jet2):
            raise DomainError("pow exponent must not depend on the variables")
        return lift("pow", arg, exponent)
    return lift(node.fn, arg)


class Expression:
    """A parsed expression over a fixed set of variable names.

    ``str(expr)`` is the source with whitespace removed, which parses back to
    the same expression.
    """

    def __init__(
        self,
        source: str,
        variables: tuple[str, ...],
        functions: frozenset[str],
        aliases: Mapping[str, str] | None = None,
    ) -> None:
        self.source = re.sub(r"\s+", "", source)
        self.variables = variables
        self.aliases = dict(aliases or {})
        names = frozenset(variables) | frozenset(self.aliases)
        self._tree = _Parser(self.source, names, functions).parse()

    def __str__(self) -> str:
        return self.source

    def __repr__(self) -> str:
        return f"Expression({self.source!r})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Expression) and other.source == self.source

    def __hash__(self) -> int:
        return hash(self.source)

    def __call__(self, *values: JetLike) -> JetLike:
        if len(values) != len(self.variables):
            raise ConfigError(
                f"expression {self.source!r} takes {len(self.variables)} value(s), "
                f"got {len(values)}"
            )
        env: dict[str, JetLike] = dict(zip(self.variables, values))
        for alias, target in self.aliases.items():
            env[alias] = env[target]
        return _evaluate(self._tree, env)


def split_top_level(body: str) -> list[str]:
    """Split on commas that are not nested in brackets or parentheses."""
    parts: list[str] = []
    depth = 0
    start = 0
    for i, ch in enumerate(body):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
            if depth < 0:
                raise ConfigError(f"unbalanced brackets in {body!r}")
        elif ch == "," and depth == 0:
            parts.append(body[start:i])
            start = i + 1
    if depth != 0:
        raise ConfigError(f"unbalanced brackets in {body!r}")
    parts.append(body[start:])
    return [p.strip() for p in parts]
