"""Line-oriented ``.qc`` circuit format.

::

    # teleport one qubit
    qubits 3
    h 1
    stage bell_h
    measure 0 1
    dephase 0.25 2
    u 0 re00 im00 re01 im01 re10 im10 re11 im11

One directive per line; ``#`` starts a comment; keywords are
case-insensitive.  ``qubits N`` must come first.  Parsing never raises on bad
input: every problem becomes a :class:`ParseDiagnostic` with a line and
column.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass

import numpy as np

from .circuit import (
    STANDARD_GATES,
    UNITARY_TOL,
    Circuit,
    Dephase,
    Gate,
    Measure,
    StageCut,
    unitarity_defect,
)

PARSE_UNITARY_TOL = 1e-8

_INT = re.compile(r"[0-9]+\Z", re.ASCII)
_FLOAT = re.compile(r"[+-]?(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?\Z", re.ASCII)
_TOKEN = re.compile(r"\S+")

ONE_QUBIT = ("h", "x", "z", "s", "t")
TWO_QUBIT = ("cnot", "cz")
KEYWORDS = ("qubits",) + ONE_QUBIT + TWO_QUBIT + ("u", "measure", "dephase", "stage")


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class ParseDiagnostic:
    span: SourceSpan
    severity: Severity
    message: str

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def __str__(self) -> str:
        return f"{self.span.line}:{self.span.column}: {self.severity.value}: {self.message}"


class _LineError(Exception):
    def __init__(self, column: int, message: str):
        super().__init__(message)
        self.column = column
        self.message = message


def _int(tok: tuple[int, str], what: str = "qubit index") -> int:
    col, text = tok
    if not _INT.match(text):
        raise _LineError(col, f"expected {what}, got {text!r}")
    return int(text)


def _float(tok: tuple[int, str]) -> float:
    col, text = tok
    if not _FLOAT.match(text):
        raise _LineError(col, f"expected a real number, got {text!r}")
    value = float(text)
    if not math.isfinite(value):
        raise _LineError(col, f"number {text!r} is out of range")
    return value


def _arity(key, args, count, kw_col):
    if len(args) != count:
        raise _LineError(kw_col, f"{key!r} takes {count} argument(s), got {len(args)}")


def _decode(source) -> tuple[str | None, list[ParseDiagnostic]]:
    if isinstance(source, str):
        return source, []
    try:
        return bytes(source).decode("utf-8"), []
    except UnicodeDecodeError as exc:
        head = bytes(source)[: exc.start]
        line = head.count(b"\n") + 1
        col = exc.start - (head.rfind(b"\n") + 1) + 1
        return None, [ParseDiagnostic(SourceSpan(line, col), Severity.ERROR, "invalid UTF-8")]


def parse_with_diagnostics(source) -> tuple[Circuit | None, list[ParseDiagnostic]]:
    """Parse ``source`` (text or UTF-8 bytes) into a circuit plus diagnostics.

    The circuit is ``None`` whenever any error diagnostic was produced.
    """
    text, diags = _decode(source)
    if text is None:
        return None, diags

    def error(line, col, msg):
        diags.append(ParseDiagnostic(SourceSpan(line, col), Severity.ERROR, msg))

    n: int | None = None
    seen_header = False
    seen_directive = False
    elements: list = []
    last_cut_line = 0
    trailing_line = 0

    for lineno, raw in enumerate(text.split("\n"), start=1):
        body = raw.split("#", 1)[0]
        toks = [(m.start() + 1, m.group()) for m in _TOKEN.finditer(body)]
        if not toks:
            continue
        kw_col, kw = toks[0][0], toks[0][1].lower()
        args = toks[1:]
        try:
            if kw not in KEYWORDS:
                raise _LineError(kw_col, f"unknown directive {toks[0][1]!r}")
            if kw == "qubits":
                if seen_header:
                    raise _LineError(kw_col, "'qubits' may appear only once")
                seen_header = True
                _arity(kw, args, 1, kw_col)
                count = _int(args[0], "qubit count")
                if count < 1:
                    raise _LineError(args[0][0], "qubit count must be at least 1")
                n = count
                if seen_directive:
                    raise _LineError(kw_col, "'qubits' must be the first directive")
                continue
            if not seen_header and not seen_directive:
                error(lineno, kw_col, "expected 'qubits N' as the first directive")
            seen_directive = True

            def qubit(tok):
                q = _int(tok)
                if n is not None and q >= n:
                    raise _LineError(tok[0], f"qubit index {q} out of range for {n} qubits")
                return q

            if kw in ONE_QUBIT:
                _arity(kw, args, 1, kw_col)
                elem = Gate(kw, STANDARD_GATES[kw], (qubit(args[0]),))
            elif kw in TWO_QUBIT:
                _arity(kw, args, 2, kw_col)
                c, t = qubit(args[0]), qubit(args[1])
                if c == t:
                    raise _LineError(args[1][0], f"{kw} control and target are both {c}")
                elem = Gate(kw, STANDARD_GATES[kw], (c, t))
            elif kw == "u":
                _arity(kw, args, 9, kw_col)
                q = qubit(args[0])
                vals = [_float(tok) for tok in args[1:]]
                u = np.array(
                    [complex(vals[i], vals[i + 1]) for i in range(0, 8, 2)], dtype=np.complex128
                ).reshape(2, 2)
                defect = unitarity_defect(u)
                if defect > PARSE_UNITARY_TOL:
                    raise _LineError(kw_col, f"matrix is not unitary (defect {defect:.3e})")
                if defect > UNITARY_TOL:
                    # nearest unitary in the polar decomposition
                    w, _, vh = np.linalg.svd(u)
                    u = w @ vh
                    diags.append(
                        ParseDiagnostic(
                            SourceSpan(lineno, kw_col),
                            Severity.WARNING,
                            f"matrix projected onto the nearest unitary (defect {defect:.3e})",
                        )
                    )
                elem = Gate("u", u, (q,))
            elif kw == "measure":
                if not args:
                    raise _LineError(kw_col, "'measure' needs at least one qubit")
                qs = [qubit(tok) for tok in args]
                if len(set(qs)) != len(qs):
                    raise _LineError(kw_col, f"'measure' repeats a qubit: {qs}")
                elem = Measure(tuple(qs))
            elif kw == "dephase":
                _arity(kw, args, 2, kw_col)
                lam = _float(args[0])
                if not 0.0 <= lam <= 1.0:
                    raise _LineError(args[0][0], f"dephasing strength {lam!r} outside [0, 1]")
                elem = Dephase(lam, qubit(args[1]))
            else:  # stage
                label = body[kw_col - 1 + len(toks[0][1]):].strip()
                elem = StageCut(label)
        except _LineError as exc:
            error(lineno, exc.column, exc.message)
            continue
        except Exception as exc:  # element constructors double-check invariants
            error(lineno, kw_col, str(exc))
            continue
        elements.append(elem)
        if isinstance(elem, StageCut):
            last_cut_line = lineno
            trailing_line = 0
        elif not trailing_line:
            trailing_line = lineno

    if not seen_header and not seen_directive:
        error(1, 1, "missing 'qubits N' directive")
    if any(d.is_error for d in diags) or n is None:
        return None, diags
    if trailing_line:
        diags.append(
            ParseDiagnostic(
                SourceSpan(trailing_line, 1),
                Severity.WARNING,
                "elements after the last 'stage' are applied but not profiled",
            )
        )
    try:
        circuit = Circuit(n, elements)
    except Exception as exc:
        error(last_cut_line or 1, 1, str(exc))
        return None, diags
    return circuit, diags


def parse_circuit(source) -> Circuit | list[ParseDiagnostic]:
    """Circuit on success, otherwise the list of diagnostics."""
    circuit, diags = parse_with_diagnostics(source)
    if circuit is None:
        return diags
    return circuit


def _num(x: float) -> str:
    return format(float(x), ".17g")


def serialize_circuit(circuit: Circuit, header: str | None = None) -> str:
    """Text form that :func:`parse_circuit` maps back to an equal element list.

    One-qubit gates outside the named set are written as ``u``; two-qubit
    gates other than ``cnot`` and ``cz`` have no text form.
    """
    lines = []
    if header:
        lines += [f"# {h}".rstrip() for h in header.splitlines()]
    lines.append(f"qubits {circuit.qubit_count}")
    for elem in circuit.elements:
        if isinstance(elem, Gate):
            std = STANDARD_GATES.get(elem.name)
            if std is not None and np.array_equal(std, elem.unitary):
                lines.append(" ".join([elem.name] + [str(q) for q in elem.targets]))
            elif len(elem.targets) == 1:
                parts = []
                for z in elem.unitary.ravel():
                    parts += [_num(z.real), _num(z.imag)]
                lines.append(f"u {elem.targets[0]} " + " ".join(parts))
            else:
                raise ValueError(f"two-qubit gate {elem.name!r} has no text form")
        elif isinstance(elem, Measure):
            lines.append("measure " + " ".join(str(q) for q in elem.targets))
        elif isinstance(elem, Dephase):
            lines.append(f"dephase {_num(elem.lam)} {elem.target}")
        else:
            lines.append(f"stage {elem.label}".rstrip())
    return "\n".join(lines) + "\n"
