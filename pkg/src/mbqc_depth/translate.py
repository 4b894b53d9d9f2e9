"""Circuit to pattern and pattern to circuit translations, and the
parallelization pipeline built from them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .core import (
    Angle,
    Circuit,
    CorrX,
    CorrZ,
    CXgate,
    CZgate,
    DialectError,
    Ent,
    Geometry,
    Hgate,
    Jgate,
    Meas,
    MeasZ,
    Pattern,
    PatternError,
    Prep,
    Signal,
    ZPhase,
    is_standard,
    normalize_cz,
)
from .depth import preparation_depth
from .flow import (
    DepthReport,
    Flow,
    characterized_depth,
    flow_from_map,
    flow_pattern,
    is_reset_sequence,
    simplify_word,
)
from .rewrite import pauli_simplify, signal_shift

__all__ = [
    "IN",
    "OUT",
    "IO",
    "AUX",
    "LabelledVertex",
    "LabelledGraph",
    "TranslationStats",
    "FanIn",
    "CoherentCircuit",
    "CircuitPath",
    "ParallelReport",
    "labelled_graph",
    "gate_patterns",
    "insert_teleports",
    "circuit_to_pattern",
    "coherent_circuit",
    "pattern_to_circuit",
    "circuit_depth",
    "circuit_influencing_paths",
    "d_prime",
    "parallelize_circuit",
    "cx_as_source",
    "three_wire_circuit",
    "polydepth_circuit",
    "parity_circuit",
]

IN, OUT, IO, AUX = "Input", "Output", "InputOutput", "Auxiliary"

_CONTRACT = {(IO, IO): IO, (IO, IN): IN, (OUT, IO): OUT, (OUT, IN): AUX}


def _source(c: Circuit) -> Circuit:
    if c.dialect != "source":
        raise DialectError("expected a source circuit")
    return normalize_cz(c)


# ---------------------------------------------------------------------------
# Circuit to pattern
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LabelledVertex:
    id: int
    label: str
    wire: int
    angle: Angle | None = None


@dataclass(frozen=True)
class LabelledGraph:
    """Entanglement graph of a source circuit, one vertex per wire segment.

    ``segments[w]`` lists the vertex ids along wire ``w``; consecutive ones
    are joined by the edge of a J gate.
    """

    vertices: tuple
    edges: frozenset
    segments: tuple

    def geometry(self) -> Geometry:
        # inputs and outputs are listed in wire order
        ins = tuple(seg[0] for seg in self.segments)
        outs = tuple(seg[-1] for seg in self.segments)
        return Geometry(frozenset(v.id for v in self.vertices), self.edges, ins, outs)

    def flow(self) -> Flow:
        fmap = {a: b for seg in self.segments for a, b in zip(seg, seg[1:])}
        return flow_from_map(self.geometry(), fmap)

    def angles(self) -> dict[int, Angle]:
        return {v.id: v.angle for v in self.vertices if v.angle is not None}


def labelled_graph(c: Circuit) -> LabelledGraph:
    """Build the labelled entanglement graph of ``c`` by local pieces and contraction.

    Every wire opens with an Input/Output piece; a J gate contributes an
    Input-Output pair joined by a horizontal edge and a CZ contributes an
    Input/Output piece on each of its wires joined by a vertical edge.  Each
    wire is then contracted left to right.  Parallel vertical edges cancel,
    since two CZ gates on one pair of vertices multiply to the identity.
    """
    c = _source(c)
    pieces: list[list[list]] = [[[IO, None, None]] for _ in range(c.n)]
    raw_edges: list[tuple[int, int, int, int]] = []
    j_count = 0
    for g in c.gates:
        if isinstance(g, Jgate):
            pieces[g.qubit].append([IN, None, g.angle])
            pieces[g.qubit].append([OUT, c.n + j_count, None])
            j_count += 1
        else:
            ia, ib = len(pieces[g.a]), len(pieces[g.b])
            pieces[g.a].append([IO, None, None])
            pieces[g.b].append([IO, None, None])
            raw_edges.append((g.a, ia, g.b, ib))

    # contract every wire; remember which contracted vertex each piece joined
    where: dict[tuple[int, int], int] = {}
    vertices: list[LabelledVertex] = []
    segments = []
    for w in range(c.n):
        seg_ids = []
        label, vid, angle = IO, w, None
        for k, (plabel, pid, pangle) in enumerate(pieces[w]):
            if k == 0:
                where[(w, k)] = vid
                continue
            if plabel == OUT:
                # horizontal edge closes the current vertex
                vertices.append(LabelledVertex(vid, label, w, angle))
                seg_ids.append(vid)
                label, vid, angle = OUT, pid, None
            else:
                label = _CONTRACT[(label, plabel)]
                if pangle is not None:
                    angle = -pangle
            where[(w, k)] = vid
        vertices.append(LabelledVertex(vid, label, w, angle))
        seg_ids.append(vid)
        segments.append(tuple(seg_ids))

    edges: set[tuple[int, int]] = set()
    for seg in segments:
        edges.update(tuple(sorted(e)) for e in zip(seg, seg[1:]))
    for a, ia, b, ib in raw_edges:
        e = tuple(sorted((where[(a, ia)], where[(b, ib)])))
        edges ^= {e}
    vertices.sort(key=lambda v: v.id)
    return LabelledGraph(tuple(vertices), frozenset(edges), tuple(segments))


def gate_patterns(c: Circuit) -> Pattern:
    """Concatenate the J and CZ patterns gate by gate (a wild pattern)."""
    c = _source(c)
    frontier = list(range(c.n))
    nxt = c.n
    cmds: list = []
    for g in c.gates:
        if isinstance(g, Jgate):
            q, r = frontier[g.qubit], nxt
            nxt += 1
            cmds += [Prep(r), Ent(q, r), Meas(q, -g.angle), CorrX(r, Signal([q]))]
            frontier[g.qubit] = r
        else:
            cmds.append(Ent(frontier[g.a], frontier[g.b]))
    return Pattern(frozenset(range(nxt)), tuple(range(c.n)), tuple(frontier), tuple(cmds))


def insert_teleports(c: Circuit) -> tuple[Circuit, int]:
    """Put J(0) J(0) between consecutive CZ gates on a common wire.

    Returns the new circuit and the number of positions that needed it.
    """
    c = _source(c)
    last_cz = [False] * c.n
    out: list = []
    m = 0
    for g in c.gates:
        if isinstance(g, CZgate):
            for w in (g.a, g.b):
                if last_cz[w]:
                    out += [Jgate(w, Angle(0)), Jgate(w, Angle(0))]
                    m += 1
                last_cz[w] = True
        else:
            last_cz[g.qubit] = False
        out.append(g)
    return Circuit(c.n, out, "source"), m


@dataclass(frozen=True)
class TranslationStats:
    variant: str
    wires: int
    j_gates: int
    consecutive_cz: int
    qubits: int
    measurements: int
    auxiliary: int
    corrections: int
    source_depth: int
    max_degree: int
    preparation_depth: int

    def items(self) -> dict[str, object]:
        return dict(self.__dict__)


def circuit_to_pattern(c: Circuit, variant: str = "direct") -> tuple[Pattern, Flow, TranslationStats]:
    """Standard, signal-shifted pattern for a source circuit, with its flow.

    ``cluster`` first inserts a teleportation segment between consecutive
    CZ gates on a common wire, which keeps every vertex degree at most 4.
    """
    if variant not in ("direct", "cluster"):
        raise ValueError(f"unknown variant {variant!r}")
    c = _source(c)
    m = 0
    work = c
    if variant == "cluster":
        work, m = insert_teleports(c)
    lg = labelled_graph(work)
    g = lg.geometry()
    flow = lg.flow()
    pattern, _ = signal_shift(flow_pattern(g, flow, lg.angles()))
    stats = TranslationStats(
        variant=variant,
        wires=c.n,
        j_gates=c.count(Jgate),
        consecutive_cz=m,
        qubits=len(pattern.qubits),
        measurements=sum(isinstance(x, Meas) for x in pattern.commands),
        auxiliary=sum(v.label == AUX for v in lg.vertices),
        corrections=sum(isinstance(x, (CorrX, CorrZ)) for x in pattern.commands),
        source_depth=circuit_depth(c),
        max_degree=g.max_degree,
        preparation_depth=preparation_depth(g)[0],
    )
    return pattern, flow, stats


# ---------------------------------------------------------------------------
# Pattern to circuit
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FanIn:
    kind: str
    target: int
    controls: tuple
    ancillas: tuple
    height: int


@dataclass(frozen=True)
class CoherentCircuit:
    """A coherent circuit with its wire layout.

    ``wire`` maps pattern qubits to circuit wires; ancilla wires follow.  The
    circuit is read by post-selecting measured wires on any outcome and
    ancillas on 0; the logical map is then the pattern's operator.
    """

    circuit: Circuit
    wire: dict
    inputs: tuple
    outputs: tuple
    measured: tuple
    ancillas: tuple
    fanins: tuple = field(default=(), compare=False)


def _fanin(kind: str, controls: Sequence[int], target: int, mode: str, fresh) -> tuple[list, FanIn]:
    gate = CXgate if kind == "X" else CZgate
    controls = tuple(controls)
    if mode == "linear" or len(controls) == 1:
        return [gate(c, target) for c in controls], FanIn(kind, target, controls, (), len(controls))
    compute: list = []
    ancillas: list[int] = []
    level = list(controls)
    height = 0
    while len(level) > 1:
        nxt = []
        for k in range(0, len(level) - 1, 2):
            a = fresh()
            ancillas.append(a)
            compute += [CXgate(level[k], a), CXgate(level[k + 1], a)]
            nxt.append(a)
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
        height += 1
    gates = compute + [gate(level[0], target)] + compute[::-1]
    return gates, FanIn(kind, target, controls, tuple(ancillas), height)


def coherent_circuit(p: Pattern, fanin: str = "tree") -> CoherentCircuit:
    """Replace classical control by quantum control.

    Non-input wires start with H, the entanglement graph is laid down one
    colour class at a time, each measurement becomes an X fan-in from its
    domain followed by Z(-a) and H, and corrections become X or Z fan-ins.
    Computational-basis measurements sit at the ends of the measured wires.
    """
    if fanin not in ("linear", "tree"):
        raise ValueError(f"unknown fan-in mode {fanin!r}")
    if not is_standard(p):
        raise PatternError("pattern must be standard")
    if any(isinstance(c, Meas) and c.t for c in p.commands):
        raise PatternError("pattern must be signal-shifted (no t-signals)")
    order = sorted(p.qubits)
    wire = {q: k for k, q in enumerate(order)}
    width = [len(order)]

    def fresh() -> int:
        width[0] += 1
        return width[0] - 1

    gates: list = [Hgate(wire[q]) for q in order if q not in set(p.inputs)]
    edges = [c.pair for c in p.commands if isinstance(c, Ent)]
    if edges:
        _, coloring = preparation_depth(Geometry.build(edges))
        for step in coloring.timesteps():
            gates += [CZgate(wire[a], wire[b]) for a, b in step]
    fanins: list[FanIn] = []
    measured: list[int] = []
    for cmd in p.commands:
        if isinstance(cmd, Meas):
            w = wire[cmd.qubit]
            if cmd.s:
                fg, rec = _fanin("X", [wire[q] for q in sorted(cmd.s)], w, fanin, fresh)
                gates += fg
                fanins.append(rec)
            gates += [ZPhase(w, -cmd.angle), Hgate(w)]
            measured.append(cmd.qubit)
        elif isinstance(cmd, (CorrX, CorrZ)) and cmd.s:
            kind = "X" if isinstance(cmd, CorrX) else "Z"
            fg, rec = _fanin(kind, [wire[q] for q in sorted(cmd.s)], wire[cmd.qubit], fanin, fresh)
            gates += fg
            fanins.append(rec)
    gates += [MeasZ(wire[q]) for q in measured]
    ancillas = tuple(range(len(order), width[0]))
    return CoherentCircuit(
        Circuit(width[0], gates, "target"),
        wire,
        tuple(wire[q] for q in p.inputs),
        tuple(wire[q] for q in p.outputs),
        tuple(wire[q] for q in measured),
        ancillas,
        tuple(fanins),
    )


def pattern_to_circuit(p: Pattern, fanin: str = "tree") -> Circuit:
    return coherent_circuit(p, fanin).circuit


def circuit_depth(c: Circuit, count_measurements: bool = False) -> int:
    """Layers of an as-soon-as-possible schedule, one gate per wire per layer."""
    ready = [0] * c.n
    for g in c.gates:
        if isinstance(g, MeasZ) and not count_measurements:
            continue
        t = max(ready[w] for w in g.qubits) + 1
        for w in g.qubits:
            ready[w] = t
    return max(ready, default=0)


# ---------------------------------------------------------------------------
# Circuit influencing paths
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CircuitPath:
    """A left-to-right walk through a source circuit.

    ``stops`` lists (wire, segment) pairs, a segment being the stretch of a
    wire between two J gates; ``jumps[k]`` tells whether stop ``k`` was
    reached through a CZ.  ``word`` holds the letters of the J gates of the
    path, with ``|`` standing for the pair of J gates right after a jump.
    """

    stops: tuple
    jumps: tuple
    word: str

    @property
    def simplified(self) -> str:
        return simplify_word(self.word)

    @property
    def consecutive_j(self) -> int:
        return max((chain.count("N") for chain in self.simplified.split("/")), default=0)


def _segments(c: Circuit) -> tuple[list[list[Jgate]], dict]:
    """J gates per wire, and for each (wire, segment) the CZ partners in it."""
    js: list[list[Jgate]] = [[] for _ in range(c.n)]
    partners: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for g in c.gates:
        if isinstance(g, Jgate):
            js[g.qubit].append(g)
        else:
            sa, sb = (g.a, len(js[g.a])), (g.b, len(js[g.b]))
            partners.setdefault(sa, []).append(sb)
            partners.setdefault(sb, []).append(sa)
    for k, lst in partners.items():
        # a CZ pair that occurs twice between the same segments cancels
        counts: dict = {}
        for x in lst:
            counts[x] = counts.get(x, 0) + 1
        partners[k] = sorted(x for x, n in counts.items() if n % 2)
    return js, partners


def circuit_influencing_paths(c: Circuit, maximal: bool = True) -> list[CircuitPath]:
    """Walks that start at the beginning of a wire, cross J gates left to
    right and jump along CZ gates, never jumping twice in a row.

    Every wire end reached closes a path.  With ``maximal`` paths that are a
    proper suffix of another one are dropped.
    """
    c = _source(c)
    js, partners = _segments(c)
    found: list[tuple[tuple, tuple]] = []

    def walk(stops: list, jumps: list) -> None:
        w, s = stops[-1]
        if s == len(js[w]):
            found.append((tuple(stops), tuple(jumps)))
        if s < len(js[w]) and (w, s + 1) not in stops:
            walk(stops + [(w, s + 1)], jumps + [False])
        if jumps and jumps[-1]:
            return
        for other in partners.get((w, s), []):
            if other not in stops:
                walk(stops + [other], jumps + [True])

    for w in range(c.n):
        if js[w]:
            walk([(w, 0), (w, 1)], [False, False])
    if maximal:
        seqs = {st for st, _ in found}
        found = [
            (st, jp)
            for st, jp in found
            if not any(len(q) > len(st) and q[len(q) - len(st) :] == st for q in seqs)
        ]
    found.sort()
    return [CircuitPath(st, jp, _circuit_word(js, st, jp)) for st, jp in found]


def _circuit_word(js: list[list[Jgate]], stops: tuple, jumps: tuple) -> str:
    ends = set()
    for k in range(1, len(stops)):
        if jumps[k]:
            ends.update((stops[k - 1], stops[k]))
    letters = []
    for k, (w, s) in enumerate(stops[:-1]):
        if k + 1 < len(stops) and jumps[k + 1]:
            letters.append("|")
        elif (w, s) not in ends:
            letters.append(js[w][s].angle.pauli.value)
    return "".join(letters)


def d_prime(c: Circuit) -> int:
    """Largest number of consecutive J gates left on a circuit influencing
    path once reset sequences have cut the chains."""
    paths = circuit_influencing_paths(c, maximal=False)
    return max((p.consecutive_j for p in paths), default=0)


# ---------------------------------------------------------------------------
# Parallelization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParallelReport:
    source_depth: int
    source_size: int
    d_prime: int
    pattern_depth: int
    output_depth: int
    output_qubits: int
    ancillas: int
    fanin_heights: tuple
    depth: DepthReport = field(compare=False)

    def items(self) -> dict[str, object]:
        out = {k: v for k, v in self.__dict__.items() if k not in ("depth", "fanin_heights")}
        out["max_fanin_height"] = max(self.fanin_heights, default=0)
        out.update({f"pattern_{k}": v for k, v in self.depth.items().items()})
        return out


def parallelize_circuit(c: Circuit, fanin: str = "tree") -> tuple[CoherentCircuit, ParallelReport]:
    """Translate, simplify, shift, and translate back with parity trees."""
    c = _source(c)
    _, flow, _ = circuit_to_pattern(c, "direct")
    lg = labelled_graph(c)
    base = flow_pattern(lg.geometry(), flow, lg.angles())
    report = characterized_depth(base, flow)
    reduced, _ = pauli_simplify(base)
    reduced, _ = signal_shift(reduced)
    coh = coherent_circuit(reduced, fanin)
    rep = ParallelReport(
        source_depth=circuit_depth(c),
        source_size=c.size,
        d_prime=d_prime(c),
        pattern_depth=report.characterized_depth,
        output_depth=circuit_depth(coh.circuit),
        output_qubits=coh.circuit.n,
        ancillas=len(coh.ancillas),
        fanin_heights=tuple(f.height for f in coh.fanins),
        depth=report,
    )
    return coh, rep


# ---------------------------------------------------------------------------
# Circuit builders
# ---------------------------------------------------------------------------


def cx_as_source(control: int, target: int) -> list:
    """CX = H_t CZ H_t with H = J(0)."""
    return [Jgate(target, Angle(0)), CZgate(control, target), Jgate(target, Angle(0))]


def three_wire_circuit(alpha=None, beta=None, gamma=None) -> Circuit:
    """Three wires: J(a) on wire 0, CZ(0,1), J(b) on wire 1, CZ(1,2), CZ(0,1), J(c) on wire 1."""
    alpha = Angle.generic("alpha") if alpha is None else Angle.of(alpha)
    beta = Angle.generic("beta") if beta is None else Angle.of(beta)
    gamma = Angle.generic("gamma") if gamma is None else Angle.of(gamma)
    gates = [
        Jgate(0, alpha),
        CZgate(0, 1),
        Jgate(1, beta),
        CZgate(1, 2),
        CZgate(0, 1),
        Jgate(1, gamma),
    ]
    return Circuit(3, gates)


def polydepth_circuit(n: int, reset: str = "XXX", columns: int | None = None) -> Circuit:
    """Staircase of generic J gates separated by reset blocks.

    Column ``j`` runs J(i, j), CZ(i, i+1), R(i) down the wires, ending with
    J(n-1, j), R(n-1).  ``reset`` spells R with X = H = J(0) and
    Y = H^i = J(pi/2).
    """
    if not is_reset_sequence(reset):
        raise ValueError(f"{reset!r} is not a reset sequence")
    letter = {"X": Angle(0), "Y": Angle(1, 2)}
    columns = n if columns is None else columns
    gates: list = []
    for j in range(columns):
        for i in range(n):
            gates.append(Jgate(i, Angle.generic(f"J{i}.{j}")))
            if i + 1 < n:
                gates.append(CZgate(i, i + 1))
            gates += [Jgate(i, letter[x]) for x in reset]
    return Circuit(n, gates)


_PARITY_LAYERS = (
    ((0, 1), (2, 3), (4, 5), (6, 7)),
    ((1, 3), (5, 7)),
    ((3, 7),),
    ((1, 3),),
    ((0, 1), (2, 3), (4, 5)),
)


def parity_circuit() -> Circuit:
    """The 8-wire log-depth parity circuit written with J(0) and CZ."""
    gates: list = []
    for layer in _PARITY_LAYERS:
        for ctrl, tgt in layer:
            gates += cx_as_source(ctrl, tgt)
    return Circuit(8, gates)


def ceil_log2(k: int) -> int:
    return math.ceil(math.log2(k)) if k > 1 else 0
