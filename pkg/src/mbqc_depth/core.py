"""Intermediate representation for measurement patterns and circuits.

Angles are exact rationals in units of pi, signals are sets of qubit
identifiers added modulo 2, and every IR value is immutable.  The module
also holds the text formats and the structural validator for patterns.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

__all__ = [
    "Angle",
    "PauliClass",
    "Signal",
    "Prep",
    "Ent",
    "Meas",
    "CorrX",
    "CorrZ",
    "Shift",
    "Command",
    "Pattern",
    "Jgate",
    "CZgate",
    "Hgate",
    "ZPhase",
    "CXgate",
    "MeasZ",
    "Gate",
    "Circuit",
    "Geometry",
    "Violation",
    "ValidationReport",
    "ParseError",
    "DialectError",
    "PatternError",
    "validate_pattern",
    "geometry_of",
    "is_standard",
    "parse_circuit",
    "serialize_circuit",
    "parse_pattern",
    "serialize_pattern",
    "normalize_cz",
]


class ParseError(ValueError):
    """Malformed text input; ``line`` is 1-based (0 when unknown)."""

    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class DialectError(ParseError):
    """A gate that the declared circuit dialect does not allow."""


class PatternError(ValueError):
    """A pattern that breaks a precondition of the requested operation."""


# ---------------------------------------------------------------------------
# Angles
# ---------------------------------------------------------------------------


class PauliClass(str, Enum):
    X = "X"
    Y = "Y"
    N = "N"  # non-Pauli


@dataclass(frozen=True)
class Angle:
    """``(numerator / denominator) * pi`` reduced and normalized into [0, 2pi).

    An angle may carry an opaque ``tag``; tagged angles stand for a generic
    non-Pauli value and always classify as :attr:`PauliClass.N`, whatever
    their rational placeholder value is.
    """

    numerator: int
    denominator: int = 1
    tag: str | None = None

    def __post_init__(self) -> None:
        if self.denominator == 0:
            raise ValueError("angle denominator must be nonzero")
        value = Fraction(self.numerator, self.denominator) % 2
        object.__setattr__(self, "numerator", value.numerator)
        object.__setattr__(self, "denominator", value.denominator)

    @classmethod
    def of(cls, value: Union["Angle", Fraction, int, str]) -> "Angle":
        if isinstance(value, Angle):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        value = Fraction(value)
        return cls(value.numerator, value.denominator)

    @classmethod
    def parse(cls, text: str) -> "Angle":
        m = re.fullmatch(r"\s*(-?\d+)\s*(?:/\s*(\d+))?\s*", text)
        if not m or (m.group(2) is not None and int(m.group(2)) == 0):
            raise ValueError(f"bad angle {text!r}")
        return cls(int(m.group(1)), int(m.group(2) or 1))

    @classmethod
    def generic(cls, tag: str) -> "Angle":
        """A tagged non-Pauli angle with a deterministic placeholder value."""
        digest = hashlib.sha256(tag.encode()).digest()
        num = 2 * (int.from_bytes(digest[:4], "big") % 1000) + 1
        return cls(num, 1024, tag)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def radians(self) -> float:
        import math

        return float(self.fraction) * math.pi

    @property
    def pauli(self) -> PauliClass:
        if self.tag is not None:
            return PauliClass.N
        if self.denominator == 1:
            return PauliClass.X
        if self.denominator == 2:
            return PauliClass.Y
        return PauliClass.N

    @property
    def is_pauli(self) -> bool:
        return self.pauli is not PauliClass.N

    def __neg__(self) -> "Angle":
        return Angle(-self.numerator, self.denominator, self.tag)

    def plus_pi(self) -> "Angle":
        return Angle(self.numerator + self.denominator, self.denominator, self.tag)

    def adapted(self, s: int, t: int) -> "Angle":
        """The angle actually measured when the signals evaluate to ``s`` and ``t``."""
        angle = -self if s % 2 else self
        return angle.plus_pi() if t % 2 else angle

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"


def _angle(value) -> Angle:
    return Angle.of(value)


# ---------------------------------------------------------------------------
# Signals
# ---------------------------------------------------------------------------


class Signal(frozenset):
    """Sum modulo 2 of measurement outcomes; the domain is the set itself."""

    def __new__(cls, domain: Iterable[int] = ()):
        return super().__new__(cls, domain)

    def __add__(self, other: Iterable[int]) -> "Signal":
        return Signal(frozenset.symmetric_difference(self, frozenset(other)))

    def substitute(self, qubit: int, replacement: Iterable[int]) -> "Signal":
        """Replace ``s_qubit`` by ``s_qubit + replacement`` when it occurs."""
        if qubit not in self:
            return self
        return self + replacement

    def value(self, outcomes: Mapping[int, int]) -> int:
        return sum(outcomes[q] for q in self) % 2

    def __repr__(self) -> str:
        return f"Signal({sorted(self)})"


def _signal(value) -> Signal:
    return value if isinstance(value, Signal) else Signal(value)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Prep:
    qubit: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,)


@dataclass(frozen=True)
class Ent:
    """Controlled-Z between two qubits; stored with ``i < j``."""

    i: int
    j: int

    def __post_init__(self) -> None:
        if self.i > self.j:
            a, b = self.j, self.i
            object.__setattr__(self, "i", a)
            object.__setattr__(self, "j", b)

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.i, self.j)

    @property
    def pair(self) -> tuple[int, int]:
        return (self.i, self.j)


@dataclass(frozen=True)
class Meas:
    qubit: int
    angle: Angle
    s: Signal = field(default_factory=Signal)
    t: Signal = field(default_factory=Signal)

    def __post_init__(self) -> None:
        object.__setattr__(self, "angle", _angle(self.angle))
        object.__setattr__(self, "s", _signal(self.s))
        object.__setattr__(self, "t", _signal(self.t))

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,)

    @property
    def domain(self) -> Signal:
        return Signal(self.s | self.t)


@dataclass(frozen=True)
class CorrX:
    qubit: int
    s: Signal = field(default_factory=Signal)

    def __post_init__(self) -> None:
        object.__setattr__(self, "s", _signal(self.s))

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,)

    @property
    def domain(self) -> Signal:
        return self.s


@dataclass(frozen=True)
class CorrZ:
    qubit: int
    s: Signal = field(default_factory=Signal)

    def __post_init__(self) -> None:
        object.__setattr__(self, "s", _signal(self.s))

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,)

    @property
    def domain(self) -> Signal:
        return self.s


@dataclass(frozen=True)
class Shift:
    """Adds the signal ``t`` to the recorded outcome of ``qubit``."""

    qubit: int
    t: Signal = field(default_factory=Signal)

    def __post_init__(self) -> None:
        object.__setattr__(self, "t", _signal(self.t))

    @property
    def qubits(self) -> tuple[int, ...]:
        return ()

    @property
    def domain(self) -> Signal:
        return self.t


Command = Union[Prep, Ent, Meas, CorrX, CorrZ, Shift]
Correction = (CorrX, CorrZ)


def command_domain(cmd: Command) -> Signal:
    return getattr(cmd, "domain", Signal())


@dataclass(frozen=True)
class Pattern:
    """Computational space ``(V, I, O)`` with commands in execution order.

    ``inputs`` and ``outputs`` are ordered: their order fixes the tensor
    factor order of the operator a pattern implements.
    """

    qubits: frozenset
    inputs: tuple
    outputs: tuple
    commands: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "qubits", frozenset(self.qubits))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "commands", tuple(self.commands))

    def with_commands(self, commands: Iterable[Command]) -> "Pattern":
        return Pattern(self.qubits, self.inputs, self.outputs, tuple(commands))

    @property
    def measured(self) -> list[int]:
        return [c.qubit for c in self.commands if isinstance(c, Meas)]

    def measurements(self) -> dict[int, Meas]:
        return {c.qubit: c for c in self.commands if isinstance(c, Meas)}

    def angles(self) -> dict[int, Angle]:
        return {c.qubit: c.angle for c in self.commands if isinstance(c, Meas)}

    def __len__(self) -> int:
        return len(self.commands)

    def __iter__(self) -> Iterator[Command]:
        return iter(self.commands)

    def __str__(self) -> str:
        return serialize_pattern(self)


# ---------------------------------------------------------------------------
# Circuits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Jgate:
    qubit: int
    angle: Angle

    def __post_init__(self) -> None:
        object.__setattr__(self, "angle", _angle(self.angle))

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,)


@dataclass(frozen=True)
class CZgate:
    a: int
    b: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.a, self.b)

    @property
    def pair(self) -> frozenset:
        return frozenset((self.a, self.b))


@dataclass(frozen=True)
class Hgate:
    qubit: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,)


@dataclass(frozen=True)
class ZPhase:
    qubit: int
    angle: Angle

    def __post_init__(self) -> None:
        object.__setattr__(self, "angle", _angle(self.angle))

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,)


@dataclass(frozen=True)
class CXgate:
    control: int
    target: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.control, self.target)


@dataclass(frozen=True)
class MeasZ:
    qubit: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,)


Gate = Union[Jgate, CZgate, Hgate, ZPhase, CXgate, MeasZ]
SOURCE_GATES = (Jgate, CZgate)


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: tuple = ()
    dialect: str = "source"

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.dialect not in ("source", "target"):
            raise ValueError(f"unknown dialect {self.dialect!r}")
        for g in self.gates:
            if self.dialect == "source" and not isinstance(g, SOURCE_GATES):
                raise DialectError(f"{type(g).__name__} not allowed in a source circuit")
            for q in g.qubits:
                if not 0 <= q < self.n:
                    raise ValueError(f"qubit {q} outside circuit of width {self.n}")
            if len(g.qubits) == 2 and g.qubits[0] == g.qubits[1]:
                raise ValueError("two-qubit gate on a single wire")

    @property
    def size(self) -> int:
        return len(self.gates)

    def count(self, kind: type) -> int:
        return sum(isinstance(g, kind) for g in self.gates)

    def __str__(self) -> str:
        return serialize_circuit(self)


def normalize_cz(c: Circuit) -> Circuit:
    """Cancel pairs of CZ gates on the same wires with nothing in between."""
    out: list[Gate] = []
    for g in c.gates:
        if isinstance(g, CZgate):
            prev = next((h for h in reversed(out) if set(h.qubits) & g.pair), None)
            if isinstance(prev, CZgate) and prev.pair == g.pair:
                out.reverse()
                out.remove(prev)
                out.reverse()
                continue
        out.append(g)
    return Circuit(c.n, out, c.dialect)


# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Geometry:
    """Undirected simple graph with ordered input and output lists."""

    vertices: frozenset
    edges: frozenset
    inputs: tuple = ()
    outputs: tuple = ()

    def __post_init__(self) -> None:
        edges = frozenset(tuple(sorted(e)) for e in self.edges)
        for a, b in edges:
            if a == b:
                raise ValueError("geometry edges must join distinct vertices")
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        missing = ({v for e in edges for v in e} | set(self.inputs) | set(self.outputs)) - self.vertices
        if missing:
            raise ValueError(f"unknown vertices {sorted(missing)}")

    @classmethod
    def build(cls, edges: Iterable[Sequence[int]], inputs=(), outputs=(), vertices=()) -> "Geometry":
        edges = [tuple(e) for e in edges]
        vs = set(vertices) | {v for e in edges for v in e} | set(inputs) | set(outputs)
        return cls(frozenset(vs), frozenset(edges), tuple(inputs), tuple(outputs))

    def neighbors(self, v: int) -> set[int]:
        return self.adjacency()[v]

    def adjacency(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {v: set() for v in self.vertices}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def adjacent(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges

    @property
    def max_degree(self) -> int:
        adj = self.adjacency()
        return max((len(n) for n in adj.values()), default=0)

    @property
    def non_inputs(self) -> list[int]:
        ins = set(self.inputs)
        return sorted(v for v in self.vertices if v not in ins)

    @property
    def non_outputs(self) -> list[int]:
        outs = set(self.outputs)
        return sorted(v for v in self.vertices if v not in outs)


def geometry_of(p: Pattern) -> Geometry:
    edges = {c.pair for c in p.commands if isinstance(c, Ent)}
    return Geometry(p.qubits, frozenset(edges), p.inputs, p.outputs)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    index: int
    rule: str

    def __str__(self) -> str:
        return f"command {self.index}: {self.rule}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_pattern(p: Pattern) -> ValidationReport:
    """Check the definiteness condition, reporting every breach."""
    out: list[Violation] = []
    inputs, outputs = set(p.inputs), set(p.outputs)
    if len(inputs) != len(p.inputs):
        out.append(Violation(-1, "duplicate input"))
    if len(outputs) != len(p.outputs):
        out.append(Violation(-1, "duplicate output"))
    if not (inputs | outputs) <= p.qubits:
        out.append(Violation(-1, "input or output outside V"))
    prepared = set(inputs)
    measured: set[int] = set()
    for k, cmd in enumerate(p.commands):
        if any(q not in p.qubits for q in cmd.qubits):
            out.append(Violation(k, "unknown qubit"))
            continue
        if isinstance(cmd, Prep):
            if cmd.qubit in inputs:
                out.append(Violation(k, "prepares an input qubit"))
            elif cmd.qubit in prepared:
                out.append(Violation(k, "prepares a qubit twice"))
            prepared.add(cmd.qubit)
            continue
        if isinstance(cmd, Shift):
            if cmd.qubit not in measured:
                out.append(Violation(k, "shifts an unmeasured qubit"))
        elif any(q in measured for q in cmd.qubits):
            out.append(Violation(k, "acts on measured qubit"))
        elif any(q not in prepared for q in cmd.qubits):
            out.append(Violation(k, "acts on unprepared qubit"))
        if any(q not in measured for q in command_domain(cmd)):
            out.append(Violation(k, "depends on unmeasured qubit"))
        if isinstance(cmd, Meas):
            if cmd.qubit in outputs:
                out.append(Violation(k, "measures an output qubit"))
            measured.add(cmd.qubit)
    end = len(p.commands)
    for q in sorted(p.qubits - inputs - prepared):
        out.append(Violation(end, f"non-input qubit {q} never prepared"))
    for q in sorted(p.qubits - outputs - measured):
        out.append(Violation(end, f"non-output qubit {q} never measured"))
    return ValidationReport(tuple(out))


_RANK = {Prep: 0, Ent: 1, Meas: 2, CorrX: 3, CorrZ: 3}


def is_standard(p: Pattern) -> bool:
    """True when commands run N*, E*, M*, then corrections, with no shifts."""
    ranks = []
    for c in p.commands:
        if isinstance(c, Shift):
            return False
        ranks.append(_RANK[type(c)])
    return all(a <= b for a, b in zip(ranks, ranks[1:]))


# ---------------------------------------------------------------------------
# Text formats
# ---------------------------------------------------------------------------

_ANGLE = r"-?\d+(?:/\d+)?"


def _lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for num, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield num, body.split()


def _int(tok: str, line: int) -> int:
    if not re.fullmatch(r"\d+", tok):
        raise ParseError(f"expected a qubit index, got {tok!r}", line)
    return int(tok)


def _parse_angle(tok: str, line: int) -> Angle:
    if not re.fullmatch(_ANGLE, tok):
        raise ParseError(f"bad angle {tok!r}", line)
    try:
        return Angle.parse(tok)
    except ValueError as exc:
        raise ParseError(str(exc), line) from None


def parse_circuit(text: str) -> Circuit:
    lines = list(_lines(text))
    if not lines:
        raise ParseError("empty input")
    num, head = lines[0]
    if head[0] != "circuit" or len(head) not in (2, 3):
        raise ParseError("expected 'circuit <n> [source|target]'", num)
    n = _int(head[1], num)
    dialect = head[2] if len(head) == 3 else "source"
    if dialect not in ("source", "target"):
        raise ParseError(f"unknown dialect {dialect!r}", num)
    arity = {"J": 2, "CZ": 2, "H": 1, "ZP": 2, "CX": 2, "MZ": 1}
    gates: list[Gate] = []
    for num, toks in lines[1:]:
        op, args = toks[0], toks[1:]
        if op not in arity:
            raise ParseError(f"unknown gate {op!r}", num)
        if len(args) != arity[op]:
            raise ParseError(f"{op} takes {arity[op]} arguments", num)
        if dialect == "source" and op not in ("J", "CZ"):
            raise DialectError(f"{op} is not a source-dialect gate", num)
        q = _int(args[0], num)
        if q >= n:
            raise ParseError(f"qubit {q} outside circuit of width {n}", num)
        if op in ("J", "ZP"):
            gate: Gate = (Jgate if op == "J" else ZPhase)(q, _parse_angle(args[1], num))
        elif op in ("CZ", "CX"):
            r = _int(args[1], num)
            if r >= n or r == q:
                raise ParseError(f"bad second qubit {r}", num)
            gate = CZgate(q, r) if op == "CZ" else CXgate(q, r)
        else:
            gate = Hgate(q) if op == "H" else MeasZ(q)
        gates.append(gate)
    return Circuit(n, gates, dialect)


def serialize_circuit(c: Circuit) -> str:
    out = [f"circuit {c.n} {c.dialect}"]
    for g in c.gates:
        if isinstance(g, Jgate):
            out.append(f"J {g.qubit} {g.angle}")
        elif isinstance(g, CZgate):
            out.append(f"CZ {g.a} {g.b}")
        elif isinstance(g, Hgate):
            out.append(f"H {g.qubit}")
        elif isinstance(g, ZPhase):
            out.append(f"ZP {g.qubit} {g.angle}")
        elif isinstance(g, CXgate):
            out.append(f"CX {g.control} {g.target}")
        else:
            out.append(f"MZ {g.qubit}")
    return "\n".join(out) + "\n"


def _parse_list(tok: str, line: int) -> list[int]:
    body = tok[1:-1] if tok.startswith("[") and tok.endswith("]") else tok
    if body == "":
        return []
    if not re.fullmatch(r"\d+(,\d+)*", body):
        raise ParseError(f"malformed list {tok!r}", line)
    return [int(x) for x in body.split(",")]


def _keyed(tok: str, key: str, line: int) -> str:
    if not tok.startswith(key + "="):
        raise ParseError(f"expected {key}=..., got {tok!r}", line)
    return tok[len(key) + 1 :]


def _fmt_list(items: Iterable[int]) -> str:
    return "[" + ",".join(str(x) for x in items) + "]"


def parse_pattern(text: str) -> Pattern:
    lines = list(_lines(text))
    if not lines:
        raise ParseError("empty input")
    num, head = lines[0]
    if head[0] != "pattern" or len(head) != 4:
        raise ParseError("expected 'pattern V=<list> I=<list> O=<list>'", num)
    qubits = _parse_list(_keyed(head[1], "V", num), num)
    inputs = _parse_list(_keyed(head[2], "I", num), num)
    outputs = _parse_list(_keyed(head[3], "O", num), num)
    commands: list[Command] = []
    for num, toks in lines[1:]:
        op, args = toks[0], toks[1:]
        try:
            if op == "N" and len(args) == 1:
                cmd: Command = Prep(_int(args[0], num))
            elif op == "E" and len(args) == 2:
                i, j = _int(args[0], num), _int(args[1], num)
                if i == j:
                    raise ParseError("E needs two distinct qubits", num)
                cmd = Ent(i, j)
            elif op == "M" and 2 <= len(args) <= 4:
                q = _int(args[0], num)
                angle = _parse_angle(_keyed(args[1], "a", num), num)
                sigs = {"s": [], "t": []}
                for tok in args[2:]:
                    key = tok.split("=", 1)[0]
                    if key not in sigs:
                        raise ParseError(f"unexpected field {tok!r}", num)
                    sigs[key] = _parse_list(_keyed(tok, key, num), num)
                cmd = Meas(q, angle, Signal(sigs["s"]), Signal(sigs["t"]))
            elif op in ("X", "Z") and len(args) == 2:
                q = _int(args[0], num)
                dom = Signal(_parse_list(_keyed(args[1], "s", num), num))
                cmd = CorrX(q, dom) if op == "X" else CorrZ(q, dom)
            elif op == "S" and len(args) == 2:
                cmd = Shift(_int(args[0], num), Signal(_parse_list(_keyed(args[1], "t", num), num)))
            else:
                raise ParseError(f"malformed command {' '.join(toks)!r}", num)
        except ParseError:
            raise
        commands.append(cmd)
    return Pattern(frozenset(qubits), tuple(inputs), tuple(outputs), tuple(commands))


def serialize_pattern(p: Pattern) -> str:
    out = [f"pattern V={_fmt_list(sorted(p.qubits))} I={_fmt_list(p.inputs)} O={_fmt_list(p.outputs)}"]
    for c in p.commands:
        if isinstance(c, Prep):
            out.append(f"N {c.qubit}")
        elif isinstance(c, Ent):
            out.append(f"E {c.i} {c.j}")
        elif isinstance(c, Meas):
            out.append(f"M {c.qubit} a={c.angle} s={_fmt_list(sorted(c.s))} t={_fmt_list(sorted(c.t))}")
        elif isinstance(c, CorrX):
            out.append(f"X {c.qubit} s={_fmt_list(sorted(c.s))}")
        elif isinstance(c, CorrZ):
            out.append(f"Z {c.qubit} s={_fmt_list(sorted(c.s))}")
        else:
            out.append(f"S {c.qubit} t={_fmt_list(sorted(c.t))}")
    return "\n".join(out) + "\n"
