"""Code generators: synthesizable Verilog-2001 from a machine description,
and UCF pin-constraint text for board bring-up.

Both emitters are pure text functions; tests pin their output byte-for-byte
against golden files.  Generated HDL uses a synchronous dominant reset and
registered state, matching the simulation kernel, with combinational pulse
outputs asserted during the cycle a transition fires.  The generated text is
meant to be fed to a vendor toolchain by hand; no synthesis is attempted
here.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .model import And, Const, FsmSpec, GuardExpr, Not, Or, Var, validate

BINARY = "binary"
ONE_HOT = "onehot"

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")

# Enough of the Verilog-2001 reserved words to catch realistic collisions.
_VERILOG_KEYWORDS = frozenset("""
always and assign begin case casex casez default else end endcase endfunction
endmodule endtask for forever function if initial inout input integer
localparam module nand negedge nor not or output parameter posedge reg
repeat task tri wand while wire wor xnor xor
""".split())


class EmitError(Exception):
    """The spec cannot be rendered as HDL; message lists the offenders."""


@dataclass(frozen=True)
class PinEntry:
    signal: str
    location: str
    kind: str  # input | output


@dataclass(frozen=True)
class PinMap:
    entries: tuple[PinEntry, ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for e in self.entries:
            if e.kind not in ("input", "output"):
                raise EmitError(f"pin '{e.signal}': kind must be input or output, got '{e.kind}'")
            if e.signal in seen:
                raise EmitError(f"duplicate pin mapping for signal '{e.signal}'")
            seen.add(e.signal)

    def check_against(self, spec: FsmSpec) -> None:
        known = set(spec.inputs) | set(spec.moore_outputs) | set(spec.pulse_outputs)
        missing = [e.signal for e in self.entries if e.signal not in known]
        if missing:
            raise EmitError(
                f"pin map names signals absent from spec '{spec.name}': "
                + ", ".join(missing))


@dataclass(frozen=True)
class EmitOptions:
    module_name: str
    state_encoding: str = BINARY

    def __post_init__(self) -> None:
        if self.state_encoding not in (BINARY, ONE_HOT):
            raise EmitError(f"unknown state encoding '{self.state_encoding}'")
        if not _IDENT_RE.fullmatch(self.module_name) or self.module_name in _VERILOG_KEYWORDS:
            raise EmitError(f"'{self.module_name}' is not a valid HDL module name")


def parse_pin_file(text: str) -> PinMap:
    """Pin file: one `<signal> <pin> <input|output>` per line, # comments."""
    entries: list[PinEntry] = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 3:
            raise EmitError(f"pin file line {lineno}: expected '<signal> <pin> <input|output>'")
        entries.append(PinEntry(fields[0], fields[1], fields[2]))
    return PinMap(tuple(entries))


def emit_ucf(pins: PinMap) -> str:
    """UCF constraint text, one NET/LOC line per pin in map order."""
    return "".join(f'NET "{e.signal}" LOC = "{e.location}";\n' for e in pins.entries)


# ---------------------------------------------------------------------------
# Verilog
# ---------------------------------------------------------------------------

_PREC = {Or: 1, And: 2, Not: 3}


def _verilog_guard(expr: GuardExpr, parent_prec: int = 0) -> str:
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Const):
        return f"1'b{1 if expr.value else 0}"
    if isinstance(expr, Not):
        text = "!" + _verilog_guard(expr.operand, _PREC[Not])
        prec = _PREC[Not]
    elif isinstance(expr, And):
        text = f"{_verilog_guard(expr.left, _PREC[And])} & {_verilog_guard(expr.right, _PREC[And] + 1)}"
        prec = _PREC[And]
    else:
        text = f"{_verilog_guard(expr.left, _PREC[Or])} | {_verilog_guard(expr.right, _PREC[Or] + 1)}"
        prec = _PREC[Or]
    return f"({text})" if prec < parent_prec else text


def _check_identifiers(spec: FsmSpec, opts: EmitOptions) -> None:
    reserved = {"clk", "state", "state_next"}
    reserved.update(f"{p}_next" for p in spec.pulse_outputs)
    offenders: list[str] = []
    names = list(spec.inputs) + list(spec.moore_outputs) + list(spec.pulse_outputs)
    for name in names:
        if not _IDENT_RE.fullmatch(name) or name in _VERILOG_KEYWORDS or name in reserved:
            offenders.append(name)
    for s in spec.states:
        if (not _IDENT_RE.fullmatch(s.name) or s.name in _VERILOG_KEYWORDS
                or s.name in reserved or s.name in names):
            offenders.append(s.name)
    if offenders:
        raise EmitError(
            "names unusable as HDL identifiers: " + ", ".join(sorted(set(offenders))))


def emit_verilog(spec: FsmSpec, opts: EmitOptions) -> str:
    """Render the machine as a synthesizable Verilog-2001 module.

    Port order: clk, inputs, Moore outputs, pulse outputs.  The state
    register updates on the rising clock edge; reset (when the spec declares
    one) synchronously forces the initial state and suppresses pulses.
    """
    report = validate(spec)
    if not report.ok:
        raise EmitError(
            f"spec '{spec.name}' has {len(report.findings)} validation findings; "
            "emit requires a clean spec")
    _check_identifiers(spec, opts)

    n = len(spec.states)
    if opts.state_encoding == BINARY:
        width = max(1, (n - 1).bit_length())
        encode = lambda i: f"{width}'d{i}"
    else:
        width = n
        encode = lambda i: f"{width}'b" + "".join(
            "1" if j == i else "0" for j in reversed(range(n)))
    rng = f"[{width - 1}:0] " if width > 1 else ""

    lines: list[str] = []
    w = lines.append
    w(f"// Machine '{spec.name}' rendered as synthesizable Verilog. Generated file; do not edit.")
    w(f"module {opts.module_name} (")
    ports = (
        [("input", "clk")]
        + [("input", name) for name in spec.inputs]
        + [("output", name) for name in spec.moore_outputs]
        + [("output", name) for name in spec.pulse_outputs]
    )
    for i, (direction, name) in enumerate(ports):
        comma = "," if i < len(ports) - 1 else ""
        pad = " " if direction == "input" else ""
        w(f"    {direction} {pad}wire {name}{comma}")
    w(");")
    w("")
    for i, s in enumerate(spec.states):
        w(f"    localparam {rng}{s.name} = {encode(i)};")
    w("")
    w(f"    reg {rng}state = {spec.initial_state};")
    w(f"    reg {rng}state_next;")
    for p in spec.pulse_outputs:
        w(f"    reg {p}_next;")
    w("")
    w("    always @* begin")
    w("        state_next = state;")
    for p in spec.pulse_outputs:
        w(f"        {p}_next = 1'b0;")
    indent = "        "
    if spec.reset_input is not None:
        w(f"{indent}if ({spec.reset_input}) begin")
        w(f"{indent}    state_next = {spec.initial_state};")
        w(f"{indent}end else begin")
        indent += "    "
    w(f"{indent}case (state)")
    for s in spec.states:
        w(f"{indent}    {s.name}: begin")
        for j, t in enumerate(s.transitions):
            keyword = "if" if j == 0 else "end else if"
            w(f"{indent}        {keyword} ({_verilog_guard(t.guard)}) begin")
            w(f"{indent}            state_next = {t.destination};")
            for p in spec.pulse_outputs:
                if p in t.pulses:
                    w(f"{indent}            {p}_next = 1'b1;")
        if s.transitions:
            w(f"{indent}        end")
        w(f"{indent}    end")
    w(f"{indent}    default: state_next = {spec.initial_state};")
    w(f"{indent}endcase")
    if spec.reset_input is not None:
        w("        end")
    w("    end")
    w("")
    w("    always @(posedge clk) begin")
    w("        state <= state_next;")
    w("    end")
    w("")
    for out in spec.moore_outputs:
        asserting = [s.name for s in spec.states if s.moore_assignments.get(out, 0)]
        if asserting:
            expr = " | ".join(f"(state == {name})" for name in asserting)
        else:
            expr = "1'b0"
        w(f"    assign {out} = {expr};")
    for p in spec.pulse_outputs:
        w(f"    assign {p} = {p}_next;")
    w("")
    w("endmodule")
    return "\n".join(lines) + "\n"
