"""Text format for machine descriptions: `.fsm` files.

Line-oriented grammar, `#` comments, one directive per line:

    fsm <name>
    inputs <name>...
    outputs <name>...
    pulses <name>...
    initial <state>
    reset <input>            # optional
    state <Name> { <out>=<bit> ... }
    trans <Src> -> <Dst> when <expr> [emit <pulse>...]

Guard expressions use `!` (highest), `&`, `|` (lowest), parentheses, and the
literals `0`/`1`.  Names match ``[A-Za-z_][A-Za-z0-9_]*`` and are
case-sensitive; directive keywords are reserved.  `parse` recovers per line
so one pass reports as many errors as possible, and `serialize` emits a
canonical form that `parse` maps back to a structurally equal spec.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .model import (
    And, Const, FsmSpec, GuardExpr, Not, Or, StateDef, Transition, Var,
)

SYNTAX = "syntax"
UNKNOWN_SIGNAL = "unknown-signal"
DUPLICATE_NAME = "duplicate-name"
BAD_BIT = "bad-bit"

KEYWORDS = frozenset({
    "fsm", "inputs", "outputs", "pulses", "initial", "reset",
    "state", "trans", "when", "emit",
})
# Directives are recognized positionally at line start, so most keywords are
# fine as signal/state names (the bundled controller has an input named
# `reset`).  Only the in-line markers are truly ambiguous.
NAME_RESERVED = frozenset({"when", "emit"})

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_TOKEN_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|->|[0-9]+|[!&|(){}=]|\S")


@dataclass(frozen=True)
class SourceSpan:
    line: int    # 1-based
    column: int  # 1-based
    length: int


@dataclass(frozen=True)
class ParseError:
    span: SourceSpan
    kind: str
    message: str

    def __str__(self) -> str:
        return f"{self.span.line}:{self.span.column}: {self.kind}: {self.message}"


class ParseFailure(Exception):
    """Raised when a source text cannot be parsed; carries all errors found."""

    def __init__(self, errors: list[ParseError]):
        self.errors = errors
        super().__init__("; ".join(str(e) for e in errors))


@dataclass(frozen=True)
class _Token:
    text: str
    line: int
    column: int

    @property
    def span(self) -> SourceSpan:
        return SourceSpan(self.line, self.column, max(1, len(self.text)))


def _tokenize_line(text: str, lineno: int) -> list[_Token]:
    # Strip comment first; the grammar has no string literals.
    hash_pos = text.find("#")
    if hash_pos >= 0:
        text = text[:hash_pos]
    return [
        _Token(m.group(), lineno, m.start() + 1)
        for m in _TOKEN_RE.finditer(text)
    ]


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

class _LineParser:
    """Cursor over one line's tokens; errors abort only the current line."""

    def __init__(self, tokens: list[_Token], lineno: int, errors: list[ParseError]):
        self.tokens = tokens
        self.pos = 0
        self.lineno = lineno
        self.errors = errors

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> _Token | None:
        tok = self.peek()
        if tok is not None:
            self.pos += 1
        return tok

    def end_span(self) -> SourceSpan:
        if self.tokens:
            last = self.tokens[-1]
            return SourceSpan(last.line, last.column + len(last.text), 1)
        return SourceSpan(self.lineno, 1, 1)

    def fail(self, message: str, tok: _Token | None = None, kind: str = SYNTAX) -> None:
        span = tok.span if tok is not None else self.end_span()
        self.errors.append(ParseError(span, kind, message))
        raise _LineAbort()

    def expect_name(self, what: str) -> _Token:
        tok = self.next()
        if tok is None or not _NAME_RE.fullmatch(tok.text):
            self.fail(f"expected {what}", tok)
        if tok.text in NAME_RESERVED:
            self.fail(f"'{tok.text}' is a reserved word, not a valid {what}", tok)
        return tok

    def expect(self, literal: str) -> _Token:
        tok = self.next()
        if tok is None or tok.text != literal:
            self.fail(f"expected '{literal}'", tok)
        return tok

    def expect_end(self) -> None:
        tok = self.peek()
        if tok is not None:
            self.fail("unexpected trailing tokens", tok)


class _LineAbort(Exception):
    pass


def _parse_expr(p: _LineParser) -> GuardExpr:
    return _parse_or(p)


def _parse_or(p: _LineParser) -> GuardExpr:
    expr = _parse_and(p)
    while (tok := p.peek()) is not None and tok.text == "|":
        p.next()
        expr = Or(expr, _parse_and(p))
    return expr


def _parse_and(p: _LineParser) -> GuardExpr:
    expr = _parse_unary(p)
    while (tok := p.peek()) is not None and tok.text == "&":
        p.next()
        expr = And(expr, _parse_unary(p))
    return expr


def _parse_unary(p: _LineParser) -> GuardExpr:
    tok = p.peek()
    if tok is not None and tok.text == "!":
        p.next()
        return Not(_parse_unary(p))
    return _parse_atom(p)


def _parse_atom(p: _LineParser) -> GuardExpr:
    tok = p.next()
    if tok is None:
        p.fail("expected guard expression")
    if tok.text == "(":
        expr = _parse_expr(p)
        p.expect(")")
        return expr
    if tok.text in ("0", "1"):
        return Const(int(tok.text))
    if _NAME_RE.fullmatch(tok.text) and tok.text not in NAME_RESERVED:
        return Var(tok.text)
    p.fail("expected guard expression", tok)


@dataclass
class _PendingTrans:
    source: str
    source_tok: _Token
    destination: str
    dest_tok: _Token
    guard: GuardExpr
    guard_vars: list[_Token]
    pulses: list[_Token]


def parse(text: str) -> FsmSpec:
    """Parse `.fsm` source into a spec; raises ParseFailure listing every
    error found (with 1-based source spans) if the text is malformed."""
    errors: list[ParseError] = []
    name: str | None = None
    inputs: list[str] = []
    outputs: list[str] = []
    pulses: list[str] = []
    initial: _Token | None = None
    reset: _Token | None = None
    # state name -> (token, {output name -> bit}), in declaration order
    states: dict[str, tuple[_Token, dict[str, int]]] = {}
    state_assign_toks: list[tuple[str, _Token]] = []
    transitions: list[_PendingTrans] = []
    signal_toks: list[_Token] = []

    lines = text.split("\n")
    saw_any = False
    for lineno, raw in enumerate(lines, start=1):
        tokens = _tokenize_line(raw.rstrip("\r"), lineno)
        if not tokens:
            continue
        p = _LineParser(tokens, lineno, errors)
        head = tokens[0]
        try:
            if not saw_any:
                saw_any = True
                if head.text != "fsm":
                    p.fail("missing fsm header", head)
                p.next()
                name = p.expect_name("machine name").text
                p.expect_end()
                continue
            if head.text == "fsm":
                p.fail("duplicate fsm header", head)
            elif head.text in ("inputs", "outputs", "pulses"):
                p.next()
                target = {"inputs": inputs, "outputs": outputs, "pulses": pulses}[head.text]
                while p.peek() is not None:
                    tok = p.expect_name("signal name")
                    target.append(tok.text)
                    signal_toks.append(tok)
            elif head.text == "initial":
                p.next()
                if initial is not None:
                    p.fail("duplicate initial directive", head)
                initial = p.expect_name("state name")
                p.expect_end()
            elif head.text == "reset":
                p.next()
                if reset is not None:
                    p.fail("duplicate reset directive", head)
                reset = p.expect_name("input name")
                p.expect_end()
            elif head.text == "state":
                p.next()
                tok = p.expect_name("state name")
                if tok.text in states:
                    p.fail(f"duplicate state name '{tok.text}'", tok, DUPLICATE_NAME)
                assigns: dict[str, int] = {}
                p.expect("{")
                while (nxt := p.peek()) is not None and nxt.text != "}":
                    out_tok = p.expect_name("output name")
                    p.expect("=")
                    bit_tok = p.next()
                    if bit_tok is None:
                        p.fail("expected bit value")
                    if bit_tok.text not in ("0", "1"):
                        p.fail(f"bit value must be 0 or 1, got '{bit_tok.text}'",
                               bit_tok, BAD_BIT)
                    if out_tok.text in assigns:
                        p.fail(f"duplicate assignment to '{out_tok.text}'",
                               out_tok, DUPLICATE_NAME)
                    assigns[out_tok.text] = int(bit_tok.text)
                    state_assign_toks.append((tok.text, out_tok))
                p.expect("}")
                p.expect_end()
                states[tok.text] = (tok, assigns)
            elif head.text == "trans":
                p.next()
                src = p.expect_name("source state")
                p.expect("->")
                dst = p.expect_name("destination state")
                p.expect("when")
                guard_start = p.pos
                guard = _parse_expr(p)
                guard_vars = [
                    t for t in tokens[guard_start:p.pos]
                    if _NAME_RE.fullmatch(t.text) and t.text not in NAME_RESERVED
                ]
                emit_pulses: list[_Token] = []
                if (nxt := p.peek()) is not None:
                    if nxt.text != "emit":
                        p.fail("expected 'emit' or end of line", nxt)
                    p.next()
                    while p.peek() is not None:
                        emit_pulses.append(p.expect_name("pulse name"))
                    if not emit_pulses:
                        p.fail("expected pulse name after 'emit'")
                transitions.append(_PendingTrans(
                    src.text, src, dst.text, dst, guard, guard_vars, emit_pulses))
            else:
                p.fail(f"unknown directive '{head.text}'", head)
        except _LineAbort:
            continue

    if not saw_any:
        errors.append(ParseError(SourceSpan(1, 1, 1), SYNTAX, "missing fsm header"))

    # Cross-line resolution.
    declared_signals: set[str] = set()
    for tok in signal_toks:
        if tok.text in declared_signals:
            errors.append(ParseError(
                tok.span, DUPLICATE_NAME, f"duplicate signal name '{tok.text}'"))
        declared_signals.add(tok.text)

    known_inputs = set(inputs)
    known_outputs = set(outputs)
    known_pulses = set(pulses)
    for state_name, out_tok in state_assign_toks:
        if out_tok.text not in known_outputs:
            errors.append(ParseError(
                out_tok.span, UNKNOWN_SIGNAL,
                f"'{out_tok.text}' is not a declared output"))
    for t in transitions:
        for ref, what in ((t.source_tok, "state"), (t.dest_tok, "state")):
            if ref.text not in states:
                errors.append(ParseError(
                    ref.span, UNKNOWN_SIGNAL,
                    f"'{ref.text}' is not a declared {what}"))
        for tok in t.guard_vars:
            if tok.text not in known_inputs:
                errors.append(ParseError(
                    tok.span, UNKNOWN_SIGNAL,
                    f"'{tok.text}' is not a declared input"))
        for tok in t.pulses:
            if tok.text not in known_pulses:
                errors.append(ParseError(
                    tok.span, UNKNOWN_SIGNAL,
                    f"'{tok.text}' is not a declared pulse"))
    if name is not None:
        if initial is None:
            errors.append(ParseError(
                SourceSpan(1, 1, 1), SYNTAX, "missing initial directive"))
        elif initial.text not in states:
            errors.append(ParseError(
                initial.span, UNKNOWN_SIGNAL,
                f"initial state '{initial.text}' is not declared"))
        if reset is not None and reset.text not in known_inputs:
            errors.append(ParseError(
                reset.span, UNKNOWN_SIGNAL,
                f"reset input '{reset.text}' is not a declared input"))

    if errors:
        raise ParseFailure(errors)
    assert name is not None and initial is not None

    by_source: dict[str, list[Transition]] = {s: [] for s in states}
    for t in transitions:
        by_source[t.source].append(Transition(
            t.guard, t.destination, frozenset(tok.text for tok in t.pulses)))
    state_defs = tuple(
        StateDef(sname, assigns, tuple(by_source[sname]))
        for sname, (_tok, assigns) in states.items()
    )
    return FsmSpec(
        name=name,
        inputs=tuple(inputs),
        moore_outputs=tuple(outputs),
        pulse_outputs=tuple(pulses),
        states=state_defs,
        initial_state=initial.text,
        reset_input=reset.text if reset is not None else None,
    )


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

_PREC = {Or: 1, And: 2, Not: 3}


def format_guard(expr: GuardExpr, _parent_prec: int = 0) -> str:
    """Canonical text of a guard, with minimal parentheses."""
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Const):
        return str(1 if expr.value else 0)
    if isinstance(expr, Not):
        text = "!" + format_guard(expr.operand, _PREC[Not])
        prec = _PREC[Not]
    elif isinstance(expr, And):
        text = f"{format_guard(expr.left, _PREC[And])} & {format_guard(expr.right, _PREC[And] + 1)}"
        prec = _PREC[And]
    elif isinstance(expr, Or):
        text = f"{format_guard(expr.left, _PREC[Or])} | {format_guard(expr.right, _PREC[Or] + 1)}"
        prec = _PREC[Or]
    else:
        raise TypeError(f"not a guard expression: {expr!r}")
    if prec < _parent_prec:
        return f"({text})"
    return text


def serialize(spec: FsmSpec) -> str:
    """Canonical `.fsm` text: fixed directive order, declaration-order states
    and transitions, assignments ordered by output declaration.  Byte-stable
    for equal specs, and a fixed point of parse-then-serialize."""
    lines = [f"fsm {spec.name}"]
    if spec.inputs:
        lines.append("inputs " + " ".join(spec.inputs))
    if spec.moore_outputs:
        lines.append("outputs " + " ".join(spec.moore_outputs))
    if spec.pulse_outputs:
        lines.append("pulses " + " ".join(spec.pulse_outputs))
    lines.append(f"initial {spec.initial_state}")
    if spec.reset_input is not None:
        lines.append(f"reset {spec.reset_input}")
    output_order = {name: i for i, name in enumerate(spec.moore_outputs)}
    for s in spec.states:
        assigns = sorted(s.moore_assignments.items(),
                         key=lambda kv: output_order.get(kv[0], len(output_order)))
        body = " ".join(f"{k}={v}" for k, v in assigns)
        lines.append(f"state {s.name} {{ {body} }}" if body else f"state {s.name} {{ }}")
    pulse_order = {name: i for i, name in enumerate(spec.pulse_outputs)}
    for s in spec.states:
        for t in s.transitions:
            line = f"trans {s.name} -> {t.destination} when {format_guard(t.guard)}"
            if t.pulses:
                ordered = sorted(t.pulses, key=lambda p: pulse_order.get(p, len(pulse_order)))
                line += " emit " + " ".join(ordered)
            lines.append(line)
    return "\n".join(lines) + "\n"
