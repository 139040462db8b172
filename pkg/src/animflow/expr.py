"""Small expression language used by predicates and event-stream filters.

Grammar (loosest binding first):

    or     := and ("||" and)*
    and    := cmp ("&&" cmp)*
    cmp    := add (("<" | "<=" | ">" | ">=" | "==" | "!=") add)?
    add    := mul (("+" | "-") mul)*
    mul    := unary (("*" | "/") unary)*
    unary  := ("!" | "-")* atom
    atom   := number | string | ident | "(" or ")"

All operators are left-associative.  Evaluation is total given an
environment that binds every free identifier; anything else raises.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class ExprError(Exception):
    """Syntax error, annotated with the column offset of the bad token."""

    def __init__(self, message: str, column: int):
        super().__init__(f"{message} (column {column})")
        self.column = column


class EvalError(Exception):
    pass


@dataclass(frozen=True)
class Lit:
    value: object


@dataclass(frozen=True)
class Ident:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str
    operand: object


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object


_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>\d+\.\d*|\.\d+|\d+)"
    r"|(?P<str>\"[^\"]*\"|'[^']*')"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>\|\||&&|<=|>=|==|!=|[-+*/<>!()])"
    r")"
)

_KEYWORDS = {"true": True, "false": False, "null": None}


def _tokenize(text: str) -> list[tuple[str, object, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise ExprError(f"unexpected character {stripped[0]!r}", at)
        if m.lastgroup == "num":
            raw = m.group("num")
            value = float(raw) if ("." in raw) else int(raw)
            tokens.append(("num", value, m.start("num")))
        elif m.lastgroup == "str":
            tokens.append(("str", m.group("str")[1:-1], m.start("str")))
        elif m.lastgroup == "ident":
            tokens.append(("ident", m.group("ident"), m.start("ident")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("eof", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def accept_op(self, *ops: str):
        kind, value, _ = self.peek()
        if kind == "op" and value in ops:
            return self.next()[1]
        return None

    def parse(self):
        node = self.parse_or()
        kind, value, col = self.peek()
        if kind != "eof":
            raise ExprError(f"unexpected token {value!r}", col)
        return node

    def parse_or(self):
        node = self.parse_and()
        while self.accept_op("||"):
            node = Binary("||", node, self.parse_and())
        return node

    def parse_and(self):
        node = self.parse_cmp()
        while self.accept_op("&&"):
            node = Binary("&&", node, self.parse_cmp())
        return node

    def parse_cmp(self):
        node = self.parse_add()
        op = self.accept_op("<", "<=", ">", ">=", "==", "!=")
        while op:
            node = Binary(op, node, self.parse_add())
            op = self.accept_op("<", "<=", ">", ">=", "==", "!=")
        return node

    def parse_add(self):
        node = self.parse_mul()
        op = self.accept_op("+", "-")
        while op:
            node = Binary(op, node, self.parse_mul())
            op = self.accept_op("+", "-")
        return node

    def parse_mul(self):
        node = self.parse_unary()
        op = self.accept_op("*", "/")
        while op:
            node = Binary(op, node, self.parse_unary())
            op = self.accept_op("*", "/")
        return node

    def parse_unary(self):
        op = self.accept_op("!", "-")
        if op:
            return Unary(op, self.parse_unary())
        return self.parse_atom()

    def parse_atom(self):
        kind, value, col = self.next()
        if kind == "num" or kind == "str":
            return Lit(value)
        if kind == "ident":
            if value in _KEYWORDS:
                return Lit(_KEYWORDS[value])
            return Ident(value)
        if kind == "op" and value == "(":
            node = self.parse_or()
            if not self.accept_op(")"):
                _, _, col2 = self.peek()
                raise ExprError("expected ')'", col2)
            return node
        raise ExprError(f"unexpected token {value!r}", col)


def parse_expression(text: str):
    """Parse ``text`` into an expression AST."""
    return _Parser(text).parse()


def _numeric(v, op):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise EvalError(f"operator {op!r} needs a number, got {v!r}")
    return v


def _truthy(v):
    if isinstance(v, bool):
        return v
    raise EvalError(f"expected a boolean, got {v!r}")


def _compare(op, a, b):
    numeric_a = isinstance(a, (int, float)) and not isinstance(a, bool)
    numeric_b = isinstance(b, (int, float)) and not isinstance(b, bool)
    if numeric_a != numeric_b or (not numeric_a and type(a) is not type(b)):
        if op in ("==", "!=") and (a is None or b is None):
            return (a is b) if op == "==" else (a is not b)
        raise EvalError(f"cannot compare {a!r} and {b!r}")
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    if op == "==":
        return a == b
    return a != b


def eval_expression(expr, env: dict) -> object:
    """Evaluate ``expr`` against ``env``.  ``env`` is never mutated."""
    if isinstance(expr, Lit):
        return expr.value
    if isinstance(expr, Ident):
        if expr.name not in env:
            raise EvalError(f"unbound identifier {expr.name!r}")
        return env[expr.name]
    if isinstance(expr, Unary):
        v = eval_expression(expr.operand, env)
        if expr.op == "-":
            return -_numeric(v, "-")
        return not _truthy(v)
    if isinstance(expr, Binary):
        if expr.op == "&&":
            return _truthy(eval_expression(expr.left, env)) and _truthy(
                eval_expression(expr.right, env)
            )
        if expr.op == "||":
            return _truthy(eval_expression(expr.left, env)) or _truthy(
                eval_expression(expr.right, env)
            )
        a = eval_expression(expr.left, env)
        b = eval_expression(expr.right, env)
        if expr.op in ("<", "<=", ">", ">=", "==", "!="):
            return _compare(expr.op, a, b)
        a = _numeric(a, expr.op)
        b = _numeric(b, expr.op)
        if expr.op == "+":
            return a + b
        if expr.op == "-":
            return a - b
        if expr.op == "*":
            return a * b
        if b == 0:
            raise EvalError("division by zero")
        return a / b
    raise EvalError(f"not an expression node: {expr!r}")


def free_identifiers(expr) -> set[str]:
    if isinstance(expr, Ident):
        return {expr.name}
    if isinstance(expr, Unary):
        return free_identifiers(expr.operand)
    if isinstance(expr, Binary):
        return free_identifiers(expr.left) | free_identifiers(expr.right)
    return set()
