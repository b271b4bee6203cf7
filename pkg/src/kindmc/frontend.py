"""Parser and type checker for the bounded mini-C input language.

The accepted language is a closed subset of C: integer scalar variables,
assignments, if/else, while/for/do-while, the intrinsics nondet_uint(),
nondet_int(), assume(e) and assert(e) (also their __VERIFIER_* spellings),
plus a single entry function `int main(...)` whose argc/argv header is
accepted and ignored.  Pointers, arrays, structs, calls, floats and returns
are rejected with an `unsupported-feature` diagnostic.

Arithmetic is fixed-width two's complement: unsigned wraps, signed overflow
wraps as well (no undefined behaviour).  Type widths are configurable so the
whole pipeline can run at small oracle widths (4 or 8 bits).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

ALLOWED_WIDTHS = (4, 8, 16, 32, 64)


class SourceError(Exception):
    """Positioned diagnostic. `kind` is one of syntax, unknown-identifier,
    unsupported-feature, type."""

    def __init__(self, kind: str, message: str, line: int, col: int):
        super().__init__(message)
        self.kind = kind
        self.message = message
        self.line = line
        self.col = col

    def format(self, filename: str = "<input>") -> str:
        return f"{filename}:{self.line}:{self.col}: {self.kind}: {self.message}"


@dataclass(frozen=True)
class IntType:
    width: int
    signed: bool

    def __post_init__(self):
        if self.width not in ALLOWED_WIDTHS:
            raise ValueError(f"unsupported width {self.width}")

    @property
    def umax(self) -> int:
        return (1 << self.width) - 1

    @property
    def smin(self) -> int:
        return -(1 << (self.width - 1))

    @property
    def smax(self) -> int:
        return (1 << (self.width - 1)) - 1

    def min_value(self) -> int:
        return self.smin if self.signed else 0

    def max_value(self) -> int:
        return self.smax if self.signed else self.umax

    def __str__(self):
        sign = "" if self.signed else "u"
        return f"{sign}int{self.width}"


@dataclass(frozen=True)
class WidthConfig:
    """Bit widths for the two type families.  `int` covers int/unsigned int,
    `long` covers long/long long variants.  Oracle runs use e.g. (4, 8)."""

    int_width: int = 32
    long_width: int = 64

    def __post_init__(self):
        if self.int_width not in ALLOWED_WIDTHS or self.long_width not in ALLOWED_WIDTHS:
            raise ValueError("widths must" f" be one of {ALLOWED_WIDTHS}")
        if self.int_width > self.long_width:
            raise ValueError("int width must not exceed long width")

    def type_of(self, base: str, signed: bool) -> IntType:
        width = self.int_width if base == "int" else self.long_width
        return IntType(width, signed)


# ------------------------------------------------------------------
# AST
# ------------------------------------------------------------------

@dataclass(frozen=True)
class Loc:
    line: int = 0
    col: int = 0


_NOLOC = Loc()


@dataclass
class Expr:
    pass


@dataclass
class IntLit(Expr):
    value: int
    ty: Optional[IntType] = None
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass
class Var(Expr):
    name: str
    ty: Optional[IntType] = None
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass
class Nondet(Expr):
    """A nondet_uint()/nondet_int() call site."""

    ty: Optional[IntType] = None
    signed: bool = False
    loc: Loc = field(default=_NOLOC, compare=False)
    site: int = field(default=-1, compare=False)  # assigned by typecheck, textual order


@dataclass
class Unary(Expr):
    op: str  # '-' or '!'
    operand: Expr = None  # type: ignore[assignment]
    ty: Optional[IntType] = None
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass
class Binary(Expr):
    op: str  # + - * / % < <= > >= == != && ||
    lhs: Expr = None  # type: ignore[assignment]
    rhs: Expr = None  # type: ignore[assignment]
    ty: Optional[IntType] = None
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass
class Cast(Expr):
    """Implicit conversion made explicit by the type checker."""

    ty: IntType = None  # type: ignore[assignment]
    operand: Expr = None  # type: ignore[assignment]
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass
class Stmt:
    pass


@dataclass
class Decl(Stmt):
    name: str
    ty: IntType = None  # type: ignore[assignment]
    init: Optional[Expr] = None  # Nondet for `= *` and uninitialised-as-nondet
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass
class Assign(Stmt):
    name: str
    expr: Expr = None  # type: ignore[assignment]
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass
class If(Stmt):
    cond: Expr = None  # type: ignore[assignment]
    then: list = field(default_factory=list)
    els: list = field(default_factory=list)
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass
class While(Stmt):
    cond: Expr = None  # type: ignore[assignment]
    body: list = field(default_factory=list)
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass
class For(Stmt):
    init: Optional[Stmt] = None  # Decl or Assign
    cond: Optional[Expr] = None
    step: Optional[Stmt] = None  # Assign
    body: list = field(default_factory=list)
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass
class DoWhile(Stmt):
    body: list = field(default_factory=list)
    cond: Expr = None  # type: ignore[assignment]
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass
class Assume(Stmt):
    expr: Expr = None  # type: ignore[assignment]
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass
class Assert(Stmt):
    expr: Expr = None  # type: ignore[assignment]
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass
class SourceProgram:
    body: list
    declarations: list = field(default_factory=list)  # (name, IntType), filled by typecheck
    typechecked: bool = False


# ------------------------------------------------------------------
# Lexer
# ------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<lcomment>//[^\n]*)
  | (?P<bcomment>/\*.*?\*/)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>\+\+|--|&&|\|\||<=|>=|==|!=|->|<<|>>|[-+*/%(){};,=<>!&|\[\]^~?:.])
    """,
    re.VERBOSE | re.DOTALL,
)

KEYWORDS = {"int", "long", "unsigned", "signed", "void", "char", "if", "else",
            "while", "for", "do", "main"}

# Recognised so the diagnostic can say what is unsupported instead of
# producing a bare syntax error.
UNSUPPORTED_KEYWORDS = {"return", "break", "continue", "goto", "switch", "case",
                        "struct", "union", "enum", "typedef", "float", "double",
                        "static", "const", "extern", "sizeof", "short"}

ASSUME_NAMES = {"assume", "__VERIFIER_assume"}
ASSERT_NAMES = {"assert", "__VERIFIER_assert"}
NONDET_UINT_NAMES = {"nondet_uint", "__VERIFIER_nondet_uint"}
NONDET_INT_NAMES = {"nondet_int", "__VERIFIER_nondet_int"}


@dataclass
class Token:
    kind: str  # 'num', 'ident', or the punct text itself
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise SourceError("syntax", f"unexpected character {text[pos]!r}", line, col)
        lexeme = m.group(0)
        if m.lastgroup == "nl":
            line += 1
            col = 1
        elif m.lastgroup in ("ws", "lcomment"):
            col += len(lexeme)
        elif m.lastgroup == "bcomment":
            nls = lexeme.count("\n")
            if nls:
                line += nls
                col = len(lexeme) - lexeme.rfind("\n")
            else:
                col += len(lexeme)
        else:
            kind = m.lastgroup if m.lastgroup in ("num", "ident") else lexeme
            tokens.append(Token(kind, lexeme, line, col))
            col += len(lexeme)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


# ------------------------------------------------------------------
# Parser (recursive descent, precedence climbing for expressions)
# ------------------------------------------------------------------

_BIN_PREC = {
    "||": 1,
    "&&": 2,
    "==": 3, "!=": 3,
    "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6, "%": 6,
}


class _Parser:
    def __init__(self, tokens: list[Token], widths: WidthConfig):
        self.toks = tokens
        self.i = 0
        self.widths = widths

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        tok = self.toks[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def error(self, kind: str, message: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise SourceError(kind, message, tok.line, tok.col)

    def expect(self, kind: str, what: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            self.error("syntax", f"expected {what or kind!r}, found {tok.text or 'end of input'!r}")
        return self.next()

    def at_unsupported(self, tok: Token) -> None:
        if tok.kind == "ident" and tok.text in UNSUPPORTED_KEYWORDS:
            self.error("unsupported-feature", f"{tok.text!r} is not supported", tok)

    # -- program --------------------------------------------------

    def parse_program(self) -> SourceProgram:
        self.parse_main_header()
        body = self.parse_block()
        if self.peek().kind != "eof":
            self.error("syntax", "trailing input after main function")
        return SourceProgram(body=body)

    def parse_main_header(self):
        tok = self.peek()
        if tok.kind == "ident" and tok.text in ("int", "void"):
            self.next()
        else:
            self.error("syntax", "program must start with the main function")
        name = self.expect("ident", "main")
        if name.text != "main":
            if name.text in UNSUPPORTED_KEYWORDS:
                self.error("unsupported-feature", f"{name.text!r} is not supported", name)
            self.error("unsupported-feature", "only a single main function is supported", name)
        self.expect("(")
        # accepted and ignored: (), (void), (int argc, char **argv)
        if self.peek().kind != ")":
            if self.peek().text == "void":
                self.next()
            else:
                self.expect("ident", "int")
                self.expect("ident", "argc")
                self.expect(",")
                if self.peek().text != "char":
                    self.error("syntax", "expected 'char' in main signature")
                self.next()
                self.expect("*")
                self.expect("*")
                self.expect("ident", "argv")
        self.expect(")")

    def parse_block(self) -> list:
        self.expect("{")
        stmts = []
        while self.peek().kind != "}":
            if self.peek().kind == "eof":
                self.error("syntax", "unterminated block")
            stmts.extend(self.parse_stmt())
        self.expect("}")
        return stmts

    # -- statements -----------------------------------------------
    # parse_stmt returns a list so `i++;` sugar and multi-declarator
    # declarations expand without a wrapper node.

    def parse_stmt(self) -> list:
        tok = self.peek()
        self.at_unsupported(tok)
        if tok.kind == "{":
            return self.parse_block()
        if tok.kind == ";":
            self.next()
            return []
        if tok.kind != "ident":
            self.error("syntax", f"unexpected {tok.text!r}")
        if tok.text in ("int", "long", "unsigned", "signed"):
            return self.parse_decl()
        if tok.text in ("char", "void", "float", "double"):
            self.error("unsupported-feature", f"type {tok.text!r} is not supported", tok)
        if tok.text == "if":
            return [self.parse_if()]
        if tok.text == "while":
            return [self.parse_while()]
        if tok.text == "for":
            return [self.parse_for()]
        if tok.text == "do":
            return [self.parse_do_while()]
        if tok.text in ASSUME_NAMES:
            return [self.parse_intrinsic(Assume)]
        if tok.text in ASSERT_NAMES:
            return [self.parse_intrinsic(Assert)]
        stmt = self.parse_simple_stmt()
        self.expect(";")
        return [stmt]

    def parse_decl(self) -> list:
        loc = Loc(self.peek().line, self.peek().col)
        ty = self.parse_type()
        decls = []
        while True:
            if self.peek().kind == "*":
                self.error("unsupported-feature", "pointers are not supported")
            name = self.expect("ident", "variable name")
            if name.text in KEYWORDS or name.text in UNSUPPORTED_KEYWORDS:
                self.error("syntax", f"{name.text!r} cannot be used as a variable name", name)
            if self.peek().kind == "[":
                self.error("unsupported-feature", "arrays are not supported")
            if self.peek().kind == "(":
                self.error("unsupported-feature", "function definitions other than main are not supported", name)
            init = None
            if self.peek().kind == "=":
                self.next()
                if self.peek().kind == "*":
                    star = self.next()  # `x = *;` nondet initialiser
                    init = Nondet(signed=ty.signed, loc=Loc(star.line, star.col))
                else:
                    init = self.parse_expr()
            decls.append(Decl(name=name.text, ty=ty, init=init,
                              loc=Loc(name.line, name.col) if len(decls) else loc))
            if self.peek().kind == ",":
                self.next()
                continue
            break
        self.expect(";")
        return decls

    def parse_type(self) -> IntType:
        signed = True
        is_long = False
        consumed = 0
        while self.peek().kind == "ident" and self.peek().text in ("int", "long", "unsigned", "signed"):
            word = self.next().text
            consumed += 1
            if word == "unsigned":
                signed = False
            elif word == "long":
                is_long = True
        if not consumed:
            self.error("syntax", "expected a type")
        return self.widths.type_of("long" if is_long else "int", signed)

    def parse_simple_stmt(self) -> Stmt:
        """Assignment or ++/-- sugar, used in statement and for positions."""
        name = self.expect("ident", "identifier")
        self.at_unsupported(name)
        loc = Loc(name.line, name.col)
        tok = self.peek()
        if tok.kind == "=":
            self.next()
            return Assign(name=name.text, expr=self.parse_expr(), loc=loc)
        if tok.kind in ("++", "--"):
            self.next()
            op = "+" if tok.kind == "++" else "-"
            one = IntLit(1, loc=loc)
            return Assign(name=name.text, expr=Binary(op, Var(name.text, loc=loc), one, loc=loc), loc=loc)
        if tok.kind == "(":
            self.error("unsupported-feature", f"call to {name.text!r} is not supported", name)
        self.error("syntax", f"expected assignment, found {tok.text!r}")

    def parse_if(self) -> If:
        tok = self.next()
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        then = self.parse_stmt()
        els = []
        if self.peek().text == "else":
            self.next()
            els = self.parse_stmt()
        return If(cond=cond, then=then, els=els, loc=Loc(tok.line, tok.col))

    def parse_while(self) -> While:
        tok = self.next()
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        return While(cond=cond, body=self.parse_stmt(), loc=Loc(tok.line, tok.col))

    def parse_for(self) -> For:
        tok = self.next()
        self.expect("(")
        init = None
        if self.peek().kind != ";":
            if self.peek().text in ("int", "long", "unsigned", "signed"):
                decls = self.parse_decl()  # consumes the ';'
                if len(decls) != 1:
                    self.error("syntax", "for initialiser must declare a single variable", tok)
                init = decls[0]
            else:
                init = self.parse_simple_stmt()
                self.expect(";")
        else:
            self.next()
        cond = None
        if self.peek().kind != ";":
            cond = self.parse_expr()
        self.expect(";")
        step = None
        if self.peek().kind != ")":
            step = self.parse_simple_stmt()
        self.expect(")")
        return For(init=init, cond=cond, step=step, body=self.parse_stmt(), loc=Loc(tok.line, tok.col))

    def parse_do_while(self) -> DoWhile:
        tok = self.next()
        body = self.parse_stmt()
        if self.peek().text != "while":
            self.error("syntax", "expected 'while' after do body")
        self.next()
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        self.expect(";")
        return DoWhile(body=body, cond=cond, loc=Loc(tok.line, tok.col))

    def parse_intrinsic(self, ctor) -> Stmt:
        tok = self.next()
        self.expect("(")
        expr = self.parse_expr()
        self.expect(")")
        self.expect(";")
        return ctor(expr=expr, loc=Loc(tok.line, tok.col))

    # -- expressions ----------------------------------------------

    def parse_expr(self, min_prec: int = 1) -> Expr:
        lhs = self.parse_unary()
        while True:
            tok = self.peek()
            prec = _BIN_PREC.get(tok.kind, 0)
            if prec < min_prec:
                return lhs
            self.next()
            rhs = self.parse_expr(prec + 1)
            lhs = Binary(tok.kind, lhs, rhs, loc=Loc(tok.line, tok.col))

    def parse_unary(self) -> Expr:
        tok = self.peek()
        if tok.kind in ("-", "!"):
            self.next()
            return Unary(tok.kind, self.parse_unary(), loc=Loc(tok.line, tok.col))
        if tok.kind == "+":
            self.next()
            return self.parse_unary()
        return self.parse_primary()

    def parse_primary(self) -> Expr:
        tok = self.next()
        if tok.kind == "num":
            return IntLit(int(tok.text), loc=Loc(tok.line, tok.col))
        if tok.kind == "(":
            expr = self.parse_expr()
            self.expect(")")
            return expr
        if tok.kind == "ident":
            self.at_unsupported(tok)
            if tok.text in NONDET_UINT_NAMES or tok.text in NONDET_INT_NAMES:
                self.expect("(")
                self.expect(")")
                return Nondet(signed=tok.text in NONDET_INT_NAMES, loc=Loc(tok.line, tok.col))
            if self.peek().kind == "(":
                self.error("unsupported-feature", f"call to {tok.text!r} is not supported", tok)
            if tok.text in KEYWORDS:
                self.error("syntax", f"unexpected keyword {tok.text!r}", tok)
            return Var(tok.text, loc=Loc(tok.line, tok.col))
        if tok.kind in ("*", "&"):
            self.error("unsupported-feature", "pointers are not supported", tok)
        self.error("syntax", f"unexpected {tok.text or 'end of input'!r}", tok)


def parse(text: str, widths: WidthConfig | None = None) -> SourceProgram:
    widths = widths or WidthConfig()
    return _Parser(tokenize(text), widths).parse_program()


# ------------------------------------------------------------------
# Type checking
# ------------------------------------------------------------------

def _common_type(a: IntType, b: IntType) -> IntType:
    """Usual arithmetic conversions, simplified: the wider type wins; on
    equal width, unsigned wins."""
    if a.width != b.width:
        return a if a.width > b.width else b
    return IntType(a.width, a.signed and b.signed)


def _literal_type(value: int, widths: WidthConfig) -> IntType:
    for ty in (IntType(widths.int_width, True),
               IntType(widths.long_width, True),
               IntType(widths.long_width, False)):
        if ty.min_value() <= value <= ty.max_value():
            return ty
    raise ValueError(f"literal {value} does not fit any type")


class _TypeChecker:
    def __init__(self, widths: WidthConfig):
        self.widths = widths
        self.symbols: dict[str, IntType] = {}
        self.order: list[str] = []
        self.nondet_sites = 0

    def error(self, kind: str, message: str, loc: Loc):
        raise SourceError(kind, message, loc.line, loc.col)

    def coerce(self, expr: Expr, ty: IntType) -> Expr:
        if expr.ty == ty:
            return expr
        if isinstance(expr, IntLit):
            # literals convert in place, wrapping modulo 2^width
            value = expr.value & ty.umax
            if ty.signed and value > ty.smax:
                value -= 1 << ty.width
            return IntLit(value, ty=ty, loc=expr.loc)
        return Cast(ty=ty, operand=expr, loc=expr.loc)

    def check_expr(self, expr: Expr) -> Expr:
        if isinstance(expr, IntLit):
            if expr.ty is None:
                try:
                    expr.ty = _literal_type(expr.value, self.widths)
                except ValueError as exc:
                    self.error("type", str(exc), expr.loc)
            return expr
        if isinstance(expr, Var):
            if expr.name not in self.symbols:
                self.error("unknown-identifier", f"use of undeclared variable {expr.name!r}", expr.loc)
            expr.ty = self.symbols[expr.name]
            return expr
        if isinstance(expr, Nondet):
            expr.ty = self.widths.type_of("int", expr.signed)
            expr.site = self.nondet_sites
            self.nondet_sites += 1
            return expr
        if isinstance(expr, Unary):
            operand = self.check_expr(expr.operand)
            if expr.op == "!":
                expr.operand = operand
                expr.ty = self.widths.type_of("int", True)  # 0/1 result
            else:
                expr.operand = operand
                expr.ty = operand.ty
            return expr
        if isinstance(expr, Binary):
            lhs = self.check_expr(expr.lhs)
            rhs = self.check_expr(expr.rhs)
            if expr.op in ("&&", "||"):
                expr.lhs, expr.rhs = lhs, rhs
                expr.ty = self.widths.type_of("int", True)
            elif expr.op in ("<", "<=", ">", ">=", "==", "!="):
                common = _common_type(lhs.ty, rhs.ty)
                expr.lhs = self.coerce(lhs, common)
                expr.rhs = self.coerce(rhs, common)
                expr.ty = self.widths.type_of("int", True)
            else:
                common = _common_type(lhs.ty, rhs.ty)
                expr.lhs = self.coerce(lhs, common)
                expr.rhs = self.coerce(rhs, common)
                expr.ty = common
            return expr
        if isinstance(expr, Cast):
            expr.operand = self.check_expr(expr.operand)
            return expr
        raise TypeError(f"unknown expression node {expr!r}")

    def check_body(self, stmts: list):
        for stmt in stmts:
            self.check_stmt(stmt)

    def check_stmt(self, stmt: Stmt):
        if isinstance(stmt, Decl):
            if stmt.name in self.symbols:
                self.error("type", f"redeclaration of {stmt.name!r}", stmt.loc)
            self.symbols[stmt.name] = stmt.ty
            self.order.append(stmt.name)
            if stmt.init is not None:
                init = self.check_expr(stmt.init)
                if isinstance(init, Nondet):
                    init.ty = stmt.ty  # `= *` adopts the declared type
                    stmt.init = init
                else:
                    stmt.init = self.coerce(init, stmt.ty)
        elif isinstance(stmt, Assign):
            if stmt.name not in self.symbols:
                self.error("unknown-identifier", f"assignment to undeclared variable {stmt.name!r}", stmt.loc)
            expr = self.check_expr(stmt.expr)
            stmt.expr = self.coerce(expr, self.symbols[stmt.name])
        elif isinstance(stmt, If):
            stmt.cond = self.check_expr(stmt.cond)
            self.check_body(stmt.then)
            self.check_body(stmt.els)
        elif isinstance(stmt, While):
            stmt.cond = self.check_expr(stmt.cond)
            self.check_body(stmt.body)
        elif isinstance(stmt, For):
            if stmt.init is not None:
                self.check_stmt(stmt.init)
            if stmt.cond is not None:
                stmt.cond = self.check_expr(stmt.cond)
            self.check_body(stmt.body)
            if stmt.step is not None:
                self.check_stmt(stmt.step)
        elif isinstance(stmt, DoWhile):
            self.check_body(stmt.body)
            stmt.cond = self.check_expr(stmt.cond)
        elif isinstance(stmt, (Assume, Assert)):
            stmt.expr = self.check_expr(stmt.expr)
        else:
            raise TypeError(f"unknown statement node {stmt!r}")


def typecheck(program: SourceProgram, widths: WidthConfig | None = None) -> SourceProgram:
    """Annotate every expression with an IntType and make implicit widenings
    explicit Cast nodes.  Mutates and returns the program."""
    widths = widths or WidthConfig()
    checker = _TypeChecker(widths)
    checker.check_body(program.body)
    program.declarations = [(name, checker.symbols[name]) for name in checker.order]
    program.typechecked = True
    return program


def parse_and_check(text: str, widths: WidthConfig | None = None) -> SourceProgram:
    widths = widths or WidthConfig()
    return typecheck(parse(text, widths), widths)


# ------------------------------------------------------------------
# Pretty printer (parse . pretty . parse is the identity on the AST)
# ------------------------------------------------------------------

def _type_name(ty: IntType, widths: WidthConfig) -> str:
    base = "int" if ty.width == widths.int_width else "long long int"
    # widths may coincide; int is the default family name then
    if ty.width == widths.int_width:
        base = "int"
    elif ty.width == widths.long_width:
        base = "long long int"
    return base if ty.signed else f"unsigned {base}"


def pretty_expr(expr: Expr) -> str:
    if isinstance(expr, IntLit):
        return str(expr.value) if expr.value >= 0 else f"(-{-expr.value})"
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Nondet):
        return "nondet_int()" if expr.signed else "nondet_uint()"
    if isinstance(expr, Unary):
        return f"({expr.op}{pretty_expr(expr.operand)})"
    if isinstance(expr, Binary):
        return f"({pretty_expr(expr.lhs)} {expr.op} {pretty_expr(expr.rhs)})"
    if isinstance(expr, Cast):
        return pretty_expr(expr.operand)  # no cast syntax in the language
    raise TypeError(f"unknown expression node {expr!r}")


def pretty(program: SourceProgram, widths: WidthConfig | None = None) -> str:
    widths = widths or WidthConfig()
    lines = ["int main() {"]

    def emit(stmts: list, indent: int):
        pad = "  " * indent
        for stmt in stmts:
            if isinstance(stmt, Decl):
                init = f" = {pretty_expr(stmt.init)}" if stmt.init is not None else ""
                lines.append(f"{pad}{_type_name(stmt.ty, widths)} {stmt.name}{init};")
            elif isinstance(stmt, Assign):
                lines.append(f"{pad}{stmt.name} = {pretty_expr(stmt.expr)};")
            elif isinstance(stmt, If):
                lines.append(f"{pad}if ({pretty_expr(stmt.cond)}) {{")
                emit(stmt.then, indent + 1)
                if stmt.els:
                    lines.append(f"{pad}}} else {{")
                    emit(stmt.els, indent + 1)
                lines.append(f"{pad}}}")
            elif isinstance(stmt, While):
                lines.append(f"{pad}while ({pretty_expr(stmt.cond)}) {{")
                emit(stmt.body, indent + 1)
                lines.append(f"{pad}}}")
            elif isinstance(stmt, For):
                init = ""
                if isinstance(stmt.init, Decl):
                    tail = f" = {pretty_expr(stmt.init.init)}" if stmt.init.init is not None else ""
                    init = f"{_type_name(stmt.init.ty, widths)} {stmt.init.name}{tail}"
                elif isinstance(stmt.init, Assign):
                    init = f"{stmt.init.name} = {pretty_expr(stmt.init.expr)}"
                cond = pretty_expr(stmt.cond) if stmt.cond is not None else ""
                step = f"{stmt.step.name} = {pretty_expr(stmt.step.expr)}" if stmt.step is not None else ""
                lines.append(f"{pad}for ({init}; {cond}; {step}) {{")
                emit(stmt.body, indent + 1)
                lines.append(f"{pad}}}")
            elif isinstance(stmt, DoWhile):
                lines.append(f"{pad}do {{")
                emit(stmt.body, indent + 1)
                lines.append(f"{pad}}} while ({pretty_expr(stmt.cond)});")
            elif isinstance(stmt, Assume):
                lines.append(f"{pad}assume({pretty_expr(stmt.expr)});")
            elif isinstance(stmt, Assert):
                lines.append(f"{pad}assert({pretty_expr(stmt.expr)});")
            else:
                raise TypeError(f"unknown statement node {stmt!r}")

    emit(program.body, 1)
    lines.append("}")
    return "\n".join(lines) + "\n"
