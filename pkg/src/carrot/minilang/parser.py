"""Lexer, recursive-descent parser and static checks for minilang.

Grammar::

    program := fn+
    fn      := "fn" NAME "(" [NAME ("," NAME)*] ")" block
    block   := "{" stmt* "}"
    stmt    := "let" NAME "=" expr ";"
             | NAME "=" expr ";"
             | "if" "(" expr ")" block ["else" (block | if-stmt)]
             | "return" expr ";"
             | "halt" ";"
             | expr ";"
    expr    := comparison
    comparison := additive (("=="|"!="|"<"|"<="|">"|">=") additive)*
    additive   := term (("+"|"-") term)*
    term       := unary ("*" unary)*
    unary      := "-" unary | primary
    primary    := INT | NAME | NAME "(" [expr ("," expr)*] ")" | "(" expr ")"

Comments run from ``#`` or ``//`` to end of line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union


class MinilangError(Exception):
    """Lexical, syntactic or static error in a minilang program."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        loc = f"{line}:{column}: " if line is not None else ""
        super().__init__(loc + message)


# -- AST -------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: int
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class Var:
    name: str
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class Neg:
    operand: "Expr"
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple["Expr", ...]
    line: int = 0
    col: int = 0


Expr = Union[Num, Var, BinOp, Neg, Call]


@dataclass(frozen=True)
class Let:
    name: str
    value: Expr
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class Assign:
    name: str
    value: Expr
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class If:
    cond: Expr
    then: tuple["Stmt", ...]
    orelse: tuple["Stmt", ...] = ()
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class Return:
    value: Expr
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class Halt:
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class ExprStmt:
    value: Expr
    line: int = 0
    col: int = 0


Stmt = Union[Let, Assign, If, Return, Halt, ExprStmt]


@dataclass(frozen=True)
class FunctionDef:
    name: str
    params: tuple[str, ...]
    body: tuple[Stmt, ...]
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class Program:
    functions: tuple[FunctionDef, ...]
    by_name: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        self.by_name.update({f.name: f for f in self.functions})

    def function(self, name: str) -> FunctionDef:
        try:
            return self.by_name[name]
        except KeyError:
            raise MinilangError(f"undefined function {name}") from None

    @property
    def entry(self) -> FunctionDef:
        """The first function in the file; the default entry point."""
        return self.functions[0]


# -- lexer -----------------------------------------------------------------

KEYWORDS = {"fn", "let", "if", "else", "return", "halt"}

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>(\#|//)[^\n]*)
  | (?P<int>[0-9]+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>==|!=|<=|>=|[-+*<>=(){},;])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # 'int', 'name', 'kw', 'op', 'eof'
    text: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            raise MinilangError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "name":
            text = m.group()
            tokens.append(Token("kw" if text in KEYWORDS else "name", text, line, col))
        elif kind in ("int", "op"):
            tokens.append(Token(kind, m.group(), line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# -- parser ----------------------------------------------------------------

_COMPARISONS = ("==", "!=", "<", "<=", ">", ">=")


class Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def _advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def _check(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("op", "kw") and t.text == text

    def _expect(self, text: str) -> Token:
        if not self._check(text):
            self._fail(f"expected '{text}'")
        return self._advance()

    def _expect_name(self) -> Token:
        if self.tok.kind != "name":
            self._fail("expected a name")
        return self._advance()

    def _fail(self, message: str):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise MinilangError(f"{message}, found {found}", t.line, t.col)

    def parse_program(self) -> list[FunctionDef]:
        fns = []
        while self.tok.kind != "eof":
            fns.append(self.parse_function())
        return fns

    def parse_function(self) -> FunctionDef:
        start = self._expect("fn")
        name = self._expect_name().text
        self._expect("(")
        params = []
        if not self._check(")"):
            params.append(self._expect_name().text)
            while self._check(","):
                self._advance()
                params.append(self._expect_name().text)
        self._expect(")")
        body = self.parse_block()
        return FunctionDef(name, tuple(params), body, start.line, start.col)

    def parse_block(self) -> tuple[Stmt, ...]:
        self._expect("{")
        stmts = []
        while not self._check("}"):
            if self.tok.kind == "eof":
                self._fail("expected '}'")
            stmts.append(self.parse_stmt())
        self._expect("}")
        return tuple(stmts)

    def parse_stmt(self) -> Stmt:
        t = self.tok
        if self._check("let"):
            self._advance()
            name = self._expect_name().text
            self._expect("=")
            value = self.parse_expr()
            self._expect(";")
            return Let(name, value, t.line, t.col)
        if self._check("if"):
            return self.parse_if()
        if self._check("return"):
            self._advance()
            value = self.parse_expr()
            self._expect(";")
            return Return(value, t.line, t.col)
        if self._check("halt"):
            self._advance()
            self._expect(";")
            return Halt(t.line, t.col)
        if t.kind == "name" and self.tokens[self.i + 1].text == "=" and self.tokens[self.i + 1].kind == "op":
            self._advance()
            self._advance()
            value = self.parse_expr()
            self._expect(";")
            return Assign(t.text, value, t.line, t.col)
        value = self.parse_expr()
        self._expect(";")
        return ExprStmt(value, t.line, t.col)

    def parse_if(self) -> If:
        t = self._expect("if")
        self._expect("(")
        cond = self.parse_expr()
        self._expect(")")
        then = self.parse_block()
        orelse: tuple[Stmt, ...] = ()
        if self._check("else"):
            self._advance()
            orelse = (self.parse_if(),) if self._check("if") else self.parse_block()
        return If(cond, then, orelse, t.line, t.col)

    def parse_expr(self) -> Expr:
        left = self.parse_additive()
        while self.tok.kind == "op" and self.tok.text in _COMPARISONS:
            op = self._advance()
            left = BinOp(op.text, left, self.parse_additive(), op.line, op.col)
        return left

    def parse_additive(self) -> Expr:
        left = self.parse_term()
        while self._check("+") or self._check("-"):
            op = self._advance()
            left = BinOp(op.text, left, self.parse_term(), op.line, op.col)
        return left

    def parse_term(self) -> Expr:
        left = self.parse_unary()
        while self._check("*"):
            op = self._advance()
            left = BinOp("*", left, self.parse_unary(), op.line, op.col)
        return left

    def parse_unary(self) -> Expr:
        if self._check("-"):
            t = self._advance()
            operand = self.parse_unary()
            if isinstance(operand, Num):
                return Num(-operand.value, t.line, t.col)
            return Neg(operand, t.line, t.col)
        return self.parse_primary()

    def parse_primary(self) -> Expr:
        t = self.tok
        if t.kind == "int":
            self._advance()
            return Num(int(t.text), t.line, t.col)
        if t.kind == "name":
            self._advance()
            if self._check("("):
                self._advance()
                args = []
                if not self._check(")"):
                    args.append(self.parse_expr())
                    while self._check(","):
                        self._advance()
                        args.append(self.parse_expr())
                self._expect(")")
                return Call(t.text, tuple(args), t.line, t.col)
            return Var(t.text, t.line, t.col)
        if self._check("("):
            self._advance()
            e = self.parse_expr()
            self._expect(")")
            return e
        self._fail("expected an expression")


# -- static checks ---------------------------------------------------------

def _check_expr(e: Expr, assigned: set[str], program: dict[str, FunctionDef]) -> None:
    if isinstance(e, Var):
        if e.name not in assigned:
            raise MinilangError(f"use of unassigned variable {e.name}", e.line, e.col)
    elif isinstance(e, BinOp):
        _check_expr(e.left, assigned, program)
        _check_expr(e.right, assigned, program)
    elif isinstance(e, Neg):
        _check_expr(e.operand, assigned, program)
    elif isinstance(e, Call):
        callee = program.get(e.name)
        if callee is None:
            raise MinilangError(f"call to undefined function {e.name}", e.line, e.col)
        if len(callee.params) != len(e.args):
            raise MinilangError(
                f"{e.name} takes {len(callee.params)} argument(s), called with {len(e.args)}",
                e.line,
                e.col,
            )
        for a in e.args:
            _check_expr(a, assigned, program)
    elif isinstance(e, Num):
        if not -(2**63) <= e.value <= 2**63 - 1:
            raise MinilangError(f"integer literal {e.value} out of int64 range", e.line, e.col)


def _check_block(stmts, assigned: set[str], program) -> set[str]:
    """Return the variables definitely assigned after ``stmts``."""
    assigned = set(assigned)
    for s in stmts:
        if isinstance(s, Let):
            _check_expr(s.value, assigned, program)
            assigned.add(s.name)
        elif isinstance(s, Assign):
            if s.name not in assigned:
                raise MinilangError(f"assignment to undeclared variable {s.name}", s.line, s.col)
            _check_expr(s.value, assigned, program)
        elif isinstance(s, If):
            _check_expr(s.cond, assigned, program)
            after_then = _check_block(s.then, assigned, program)
            after_else = _check_block(s.orelse, assigned, program)
            assigned = after_then & after_else
        elif isinstance(s, (Return, ExprStmt)):
            _check_expr(s.value, assigned, program)
    return assigned


def check_program(fns: list[FunctionDef]) -> Program:
    if not fns:
        raise MinilangError("no functions defined")
    table: dict[str, FunctionDef] = {}
    for f in fns:
        if f.name in table:
            raise MinilangError(f"duplicate function {f.name}", f.line, f.col)
        if len(set(f.params)) != len(f.params):
            raise MinilangError(f"duplicate parameter in {f.name}", f.line, f.col)
        table[f.name] = f
    for f in fns:
        _check_block(f.body, set(f.params), table)
    return Program(tuple(fns))


def parse_program(source: str | bytes) -> Program:
    """Parse and statically check minilang source."""
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    return check_program(Parser(source).parse_program())
