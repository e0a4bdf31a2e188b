"""QIL: syntax tree, parser, pretty-printer and desugaring.

Concrete syntax::

    program := "qubits" INT ";" stmt
    stmt    := atom { ";" atom }
    atom    := "skip" | G "(" QVAR ")" | "CX" "(" QVAR "," QVAR ")"
             | "meas" "(" QVAR ")" | "init" [ "(" QVAR ")" ]
             | "if" QVAR "then" stmt "else" stmt "fi"
             | "while" QVAR "do" stmt "od"
    G       := "X" | "Y" | "Z" | "H" | "S" | "T"
    QVAR    := "q" INT

``//`` starts a comment.  Sequencing is right-associative.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

GATES = ("X", "Y", "Z", "H", "S", "T")


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line, self.col = line, col
        where = f"{line}:{col}: " if line else ""
        super().__init__(where + message)


# syntax tree ---------------------------------------------------------------

@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Seq:
    first: "Stmt"
    second: "Stmt"


@dataclass(frozen=True)
class Gate1:
    gate: str
    q: int


@dataclass(frozen=True)
class CX:
    c: int
    t: int


@dataclass(frozen=True)
class If:
    q: int
    then: "Stmt"
    else_: "Stmt"


@dataclass(frozen=True)
class While:
    q: int
    body: "Stmt"


@dataclass(frozen=True)
class Meas:
    q: int


@dataclass(frozen=True)
class Init:
    q: int | None = None


Stmt = Union[Skip, Seq, Gate1, CX, If, While, Meas, Init]
CORE = (Skip, Seq, Gate1, CX, If, While)


@dataclass(frozen=True)
class Program:
    n_qubits: int
    body: Stmt

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("a program needs at least one qubit")
        validate(self.body, self.n_qubits)


def seq(*stmts: Stmt) -> Stmt:
    """Right-nested sequence, the shape the parser produces."""
    if not stmts:
        return Skip()
    out = stmts[-1]
    for s in reversed(stmts[:-1]):
        out = Seq(s, out)
    return out


def flatten(s: Stmt) -> list[Stmt]:
    out = []
    while isinstance(s, Seq):
        out.extend(flatten(s.first))
        s = s.second
    out.append(s)
    return out


def qubits_of(s: Stmt):
    if isinstance(s, (Gate1, Meas)):
        yield s.q
    elif isinstance(s, CX):
        yield s.c
        yield s.t
    elif isinstance(s, Init) and s.q is not None:
        yield s.q
    elif isinstance(s, Seq):
        yield from qubits_of(s.first)
        yield from qubits_of(s.second)
    elif isinstance(s, If):
        yield s.q
        yield from qubits_of(s.then)
        yield from qubits_of(s.else_)
    elif isinstance(s, While):
        yield s.q
        yield from qubits_of(s.body)


def validate(s: Stmt, n: int) -> None:
    for q in qubits_of(s):
        if not 0 <= q < n:
            raise ValueError(f"qubit q{q} out of range for {n} qubits")
    _check_cx(s)


def _check_cx(s: Stmt) -> None:
    if isinstance(s, CX) and s.c == s.t:
        raise ValueError(f"CX(q{s.c},q{s.t}) needs distinct qubits")
    for child in _children(s):
        _check_cx(child)


def _children(s: Stmt):
    if isinstance(s, Seq):
        return (s.first, s.second)
    if isinstance(s, If):
        return (s.then, s.else_)
    if isinstance(s, While):
        return (s.body,)
    return ()


# desugaring ----------------------------------------------------------------

def _desugar(s: Stmt, n: int) -> Stmt:
    if isinstance(s, Meas):
        return If(s.q, Skip(), Skip())
    if isinstance(s, Init):
        if s.q is None:
            return seq(*(If(q, Skip(), Gate1("X", q)) for q in range(n)))
        return If(s.q, Skip(), Gate1("X", s.q))
    if isinstance(s, Seq):
        return seq(*(y for x in flatten(s) for y in flatten(_desugar(x, n))))
    if isinstance(s, If):
        return If(s.q, _desugar(s.then, n), _desugar(s.else_, n))
    if isinstance(s, While):
        return While(s.q, _desugar(s.body, n))
    return s


def desugar(p: Program) -> Program:
    """Expand ``meas`` and ``init`` into core statements."""
    return Program(p.n_qubits, _desugar(p.body, p.n_qubits))


def is_core(s: Stmt) -> bool:
    return isinstance(s, CORE) and all(is_core(c) for c in _children(s))


# lexer -----------------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+|//[^\n]*)"
    r"|(?P<qvar>q(?P<qidx>\d+))(?![A-Za-z0-9_])"
    r"|(?P<int>\d+)"
    r"|(?P<word>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<punct>[;(),])"
)

KEYWORDS = {"qubits", "skip", "if", "then", "else", "fi", "while", "do", "od", "meas", "init", "CX", *GATES}


@dataclass(frozen=True)
class Token:
    kind: str  # keyword text, "qvar", "int", punctuation or "eof"
    value: object
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", line, col)
        text = m.group(0)
        if m.lastgroup == "ws":
            pass
        elif m.group("qvar"):
            tokens.append(Token("qvar", int(m.group("qidx")), line, col))
        elif m.lastgroup == "int":
            tokens.append(Token("int", int(text), line, col))
        elif m.lastgroup == "word":
            if text not in KEYWORDS:
                raise ParseError(f"unknown word {text!r}", line, col)
            tokens.append(Token(text, text, line, col))
        else:
            tokens.append(Token(text, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", None, line, pos - line_start + 1))
    return tokens


# parser ----------------------------------------------------------------------

class Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.pos = 0
        self.n = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.col)

    def eat(self, kind: str) -> Token:
        tok = self.tok
        if tok.kind != kind:
            found = "end of input" if tok.kind == "eof" else repr(tok.value)
            raise self.error(f"expected {kind!r}, found {found}")
        self.pos += 1
        return tok

    def program(self) -> Program:
        self.eat("qubits")
        n_tok = self.eat("int")
        self.n = n_tok.value
        if self.n < 1:
            raise self.error("a program needs at least one qubit", n_tok)
        self.eat(";")
        body = self.stmt()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.value!r} after statement")
        return Program(self.n, body)

    def stmt(self) -> Stmt:
        atoms = [self.atom()]
        while self.tok.kind == ";":
            self.eat(";")
            atoms.append(self.atom())
        return seq(*atoms)

    def qvar(self) -> int:
        tok = self.eat("qvar")
        if tok.value >= self.n:
            raise self.error(f"qubit q{tok.value} out of range for {self.n} qubits", tok)
        return tok.value

    def atom(self) -> Stmt:
        tok = self.tok
        k = tok.kind
        if k == "skip":
            self.eat("skip")
            return Skip()
        if k in GATES:
            self.eat(k)
            self.eat("(")
            q = self.qvar()
            self.eat(")")
            return Gate1(k, q)
        if k == "CX":
            self.eat("CX")
            self.eat("(")
            c = self.qvar()
            self.eat(",")
            t_tok = self.tok
            t = self.qvar()
            self.eat(")")
            if c == t:
                raise self.error(f"CX(q{c},q{t}) needs distinct qubits", t_tok)
            return CX(c, t)
        if k == "meas":
            self.eat("meas")
            self.eat("(")
            q = self.qvar()
            self.eat(")")
            return Meas(q)
        if k == "init":
            self.eat("init")
            if self.tok.kind == "(":
                self.eat("(")
                q = self.qvar()
                self.eat(")")
                return Init(q)
            return Init()
        if k == "if":
            self.eat("if")
            q = self.qvar()
            self.eat("then")
            then = self.stmt()
            self.eat("else")
            else_ = self.stmt()
            self.eat("fi")
            return If(q, then, else_)
        if k == "while":
            self.eat("while")
            q = self.qvar()
            self.eat("do")
            body = self.stmt()
            self.eat("od")
            return While(q, body)
        found = "end of input" if k == "eof" else repr(tok.value)
        raise self.error(f"expected a statement, found {found}")


def parse(source: str, expand: bool = True) -> Program:
    """Parse QIL source; with ``expand`` the ``meas``/``init`` sugar is desugared."""
    p = Parser(source).program()
    return desugar(p) if expand else p


# pretty-printer ----------------------------------------------------------------

def pretty_stmt(s: Stmt, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(s, Seq):
        return ";\n".join(pretty_stmt(x, indent) for x in flatten(s))
    if isinstance(s, Skip):
        return pad + "skip"
    if isinstance(s, Gate1):
        return f"{pad}{s.gate}(q{s.q})"
    if isinstance(s, CX):
        return f"{pad}CX(q{s.c},q{s.t})"
    if isinstance(s, Meas):
        return f"{pad}meas(q{s.q})"
    if isinstance(s, Init):
        return pad + ("init" if s.q is None else f"init(q{s.q})")
    if isinstance(s, If):
        return (
            f"{pad}if q{s.q} then\n{pretty_stmt(s.then, indent + 1)}\n"
            f"{pad}else\n{pretty_stmt(s.else_, indent + 1)}\n{pad}fi"
        )
    if isinstance(s, While):
        return f"{pad}while q{s.q} do\n{pretty_stmt(s.body, indent + 1)}\n{pad}od"
    raise TypeError(f"not a statement: {s!r}")


def pretty(p: Program) -> str:
    return f"qubits {p.n_qubits};\n{pretty_stmt(p.body)}"


def short(s: Stmt) -> str:
    """One-line label for trace points."""
    if isinstance(s, If):
        return f"if q{s.q}"
    if isinstance(s, While):
        return f"while q{s.q}"
    return pretty_stmt(s)
