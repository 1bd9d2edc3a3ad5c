"""Recursive-descent parser for the OpenQASM 3 subset carried by quantum tasks.

Accepted program shape::

    OPENQASM 3;
    include "stdgates.inc";
    qubit[2] q;
    bit[2] c;
    h q[0];
    rz(-pi/4) q[1];
    cx q[0], q[1];
    c = measure q;

No classical control flow, gate definitions or mid-circuit measurement: once a
qubit has been measured no gate may touch it.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from braket_qdmi.errors import InvalidArgumentError

# name -> (qubit arity, parameter count)
GATES: dict[str, tuple[int, int]] = {
    "x": (1, 0),
    "y": (1, 0),
    "z": (1, 0),
    "h": (1, 0),
    "s": (1, 0),
    "sdg": (1, 0),
    "t": (1, 0),
    "tdg": (1, 0),
    "rx": (1, 1),
    "ry": (1, 1),
    "rz": (1, 1),
    "cx": (2, 0),
    "cz": (2, 0),
    "swap": (2, 0),
    "ccx": (3, 0),
}


class QasmError(InvalidArgumentError):
    """Parse failure carrying a 1-based source position."""

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class QasmSyntaxError(QasmError):
    pass


class QasmSemanticError(QasmError):
    pass


@dataclass(frozen=True)
class QubitRef:
    register: str
    index: int


@dataclass(frozen=True)
class BitRef:
    register: str
    index: int


@dataclass(frozen=True)
class GateApplication:
    gate: str
    params: tuple[float, ...]
    targets: tuple[QubitRef, ...]


@dataclass(frozen=True)
class Measurement:
    bit: BitRef
    qubit: QubitRef


@dataclass
class Program:
    version: str | None = None
    qubit_decls: dict[str, int] = field(default_factory=dict)
    bit_decls: dict[str, int] = field(default_factory=dict)
    statements: list[GateApplication | Measurement] = field(default_factory=list)

    @property
    def num_qubits(self) -> int:
        return sum(self.qubit_decls.values())

    def qubit_index(self, ref: QubitRef) -> int:
        """Flat index of ``ref``; registers are laid out in declaration order."""
        offset = 0
        for name, size in self.qubit_decls.items():
            if name == ref.register:
                return offset + ref.index
            offset += size
        raise KeyError(ref.register)

    @property
    def gates(self) -> list[GateApplication]:
        return [s for s in self.statements if isinstance(s, GateApplication)]

    @property
    def measured_qubits(self) -> list[int]:
        """Flat qubit indices in measurement order; every qubit if none are measured."""
        measured = [self.qubit_index(s.qubit) for s in self.statements if isinstance(s, Measurement)]
        return measured or list(range(self.num_qubits))


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<float>(?:\d+\.\d*|\.\d+)(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*|π)
  | (?P<string>"[^"\n]*")
  | (?P<sym>[;\[\](),=+\-*/])
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise QasmSyntaxError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, text, line, pos - line_start + 1))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


_RESERVED = frozenset({"OPENQASM", "include", "qubit", "bit", "measure", "pi", "π"})
_MAX_NESTING = 64
_MAX_INT_DIGITS = 9


class _Parser:
    def __init__(self, source: str) -> None:
        self.tokens = _tokenize(source)
        self.pos = 0
        self.program = Program()
        self.measured: set[QubitRef] = set()
        self.depth = 0

    # token helpers

    @property
    def tok(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        return self.tok.kind in ("sym", "ident") and self.tok.text == text

    def expect(self, text: str) -> _Token:
        if not self.at(text):
            self.syntax(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def expect_kind(self, kind: str, what: str) -> _Token:
        if self.tok.kind != kind:
            self.syntax(f"expected {what}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def syntax(self, message: str, tok: _Token | None = None):
        tok = tok or self.tok
        raise QasmSyntaxError(message, tok.line, tok.column)

    def semantic(self, message: str, tok: _Token):
        raise QasmSemanticError(message, tok.line, tok.column)

    def integer(self, tok: _Token) -> int:
        if len(tok.text) > _MAX_INT_DIGITS:
            self.semantic(f"integer {tok.text[:12]}... too large", tok)
        return int(tok.text)

    # grammar

    def parse(self) -> Program:
        if self.at("OPENQASM"):
            self.advance()
            version = self.advance()
            if version.kind not in ("int", "float") or float(version.text) != 3.0:
                self.syntax("only OPENQASM 3 is supported", version)
            self.program.version = "3"
            self.expect(";")
        while self.at("include"):
            self.advance()
            self.expect_kind("string", "include path")
            self.expect(";")
        while self.tok.kind != "eof":
            self.statement()
        if not self.program.qubit_decls:
            self.syntax("program declares no qubits")
        return self.program

    def statement(self) -> None:
        tok = self.tok
        if tok.kind != "ident":
            self.syntax(f"unexpected {tok.text!r}")
        if tok.text in ("qubit", "bit"):
            self.declaration()
        elif tok.text in GATES:
            self.gate()
        elif self.tokens[self.pos + 1].text in ("=", "["):
            self.measurement()
        else:
            self.semantic(f"unknown gate or statement {tok.text!r}", tok)

    def declaration(self) -> None:
        kind = self.advance().text
        self.expect("[")
        size_tok = self.expect_kind("int", "register size")
        self.expect("]")
        name_tok = self.expect_kind("ident", "register name")
        self.expect(";")
        size = self.integer(size_tok)
        if size < 1:
            self.semantic("register size must be positive", size_tok)
        name = name_tok.text
        if name in _RESERVED or name in GATES:
            self.semantic(f"{name!r} is a reserved word", name_tok)
        if name in self.program.qubit_decls or name in self.program.bit_decls:
            self.semantic(f"name {name!r} already in use", name_tok)
        if kind == "qubit":
            self.program.qubit_decls[name] = size
        else:
            self.program.bit_decls[name] = size

    def indexed(self, decls: dict[str, int], what: str) -> tuple[str, int | None, _Token]:
        name_tok = self.expect_kind("ident", f"{what} register")
        if name_tok.text not in decls:
            self.semantic(f"undeclared {what} register {name_tok.text!r}", name_tok)
        index = None
        if self.at("["):
            self.advance()
            idx_tok = self.expect_kind("int", "index")
            self.expect("]")
            index = self.integer(idx_tok)
            if index >= decls[name_tok.text]:
                self.semantic(
                    f"index {index} out of range for {name_tok.text}[{decls[name_tok.text]}]", idx_tok
                )
        return name_tok.text, index, name_tok

    def gate(self) -> None:
        name_tok = self.advance()
        arity, n_params = GATES[name_tok.text]
        params: list[float] = []
        if self.at("("):
            self.advance()
            params.append(self.expr())
            while self.at(","):
                self.advance()
                params.append(self.expr())
            self.expect(")")
        if len(params) != n_params:
            self.semantic(f"{name_tok.text} takes {n_params} parameter(s), got {len(params)}", name_tok)
        targets = [self.qubit_operand()]
        while self.at(","):
            self.advance()
            targets.append(self.qubit_operand())
        self.expect(";")
        if len(targets) != arity:
            self.semantic(f"{name_tok.text} acts on {arity} qubit(s), got {len(targets)}", name_tok)
        if len(set(targets)) != len(targets):
            self.semantic(f"{name_tok.text} targets must be distinct", name_tok)
        for ref in targets:
            if ref in self.measured:
                self.semantic(f"gate on {ref.register}[{ref.index}] after measurement", name_tok)
        self.program.statements.append(GateApplication(name_tok.text, tuple(params), tuple(targets)))

    def qubit_operand(self) -> QubitRef:
        name, index, tok = self.indexed(self.program.qubit_decls, "qubit")
        if index is None:
            self.syntax("gate operands must be indexed qubits", tok)
        return QubitRef(name, index)

    def measurement(self) -> None:
        bit_name, bit_index, bit_tok = self.indexed(self.program.bit_decls, "bit")
        self.expect("=")
        self.expect("measure")
        q_name, q_index, q_tok = self.indexed(self.program.qubit_decls, "qubit")
        self.expect(";")
        if (bit_index is None) != (q_index is None):
            self.semantic("cannot mix indexed and whole-register measurement", bit_tok)
        if bit_index is None:
            size = self.program.qubit_decls[q_name]
            if self.program.bit_decls[bit_name] != size:
                self.semantic("register sizes differ in whole-register measurement", bit_tok)
            pairs = [(BitRef(bit_name, i), QubitRef(q_name, i)) for i in range(size)]
        else:
            pairs = [(BitRef(bit_name, bit_index), QubitRef(q_name, q_index))]
        for bit, qubit in pairs:
            if qubit in self.measured:
                self.semantic(f"qubit {qubit.register}[{qubit.index}] measured twice", q_tok)
            self.measured.add(qubit)
            self.program.statements.append(Measurement(bit, qubit))

    # angle expressions: + - * / over literals and pi, with parentheses

    def expr(self) -> float:
        value = self.term()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> float:
        value = self.unary()
        while self.at("*") or self.at("/"):
            op_tok = self.advance()
            rhs = self.unary()
            if op_tok.text == "*":
                value *= rhs
            elif rhs == 0:
                self.semantic("division by zero", op_tok)
            else:
                value /= rhs
        return value

    def unary(self) -> float:
        sign = 1.0
        while self.at("-") or self.at("+"):
            if self.advance().text == "-":
                sign = -sign
        return sign * self.primary()

    def primary(self) -> float:
        tok = self.tok
        if tok.kind in ("int", "float"):
            self.advance()
            return float(tok.text)
        if tok.kind == "ident" and tok.text in ("pi", "π"):
            self.advance()
            return math.pi
        if self.at("("):
            self.depth += 1
            if self.depth > _MAX_NESTING:
                self.syntax("expression nested too deeply")
            self.advance()
            value = self.expr()
            self.expect(")")
            self.depth -= 1
            return value
        self.syntax(f"expected angle expression, found {tok.text or 'end of input'!r}")


def parse(source: str) -> Program:
    """Parse ``source``; raises :class:`QasmSyntaxError` or :class:`QasmSemanticError`."""
    return _Parser(source).parse()
