"""Dense statevector oracle for circuits and measurement patterns.

Qubit order convention: within any matrix returned here, the first qubit
of the relevant ordered list (pattern inputs/outputs, circuit wires in
ascending order) is the most significant bit of the row/column index.

Patterns are executed with preparation and entanglement deferred until a
qubit is first needed, and measured qubits are projected and dropped at
once.  Both moves are free commutations, so branch maps are unchanged while
the live register stays small.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .core import (
    Angle,
    CorrX,
    Circuit,
    CXgate,
    CZgate,
    Ent,
    Hgate,
    Jgate,
    Meas,
    MeasZ,
    Pattern,
    PatternError,
    Prep,
    Shift,
    ZPhase,
)

__all__ = [
    "MAX_QUBITS",
    "BRANCH_CAP",
    "EQUIV_TOL",
    "NORM_TOL",
    "SEED",
    "SizeError",
    "BranchResult",
    "DeterminismReport",
    "j_matrix",
    "zphase_matrix",
    "H",
    "X",
    "Z",
    "CZ",
    "CX",
    "circuit_unitary",
    "simulate_circuit",
    "run_pattern_branch",
    "branches",
    "check_determinism",
    "pattern_operator",
    "equiv_up_to_phase",
    "resample_angles",
]

MAX_QUBITS = 12
BRANCH_CAP = 10
EQUIV_TOL = 1e-9
NORM_TOL = 1e-12
SEED = 0x5EED

SQRT1_2 = 1 / np.sqrt(2)
H = np.array([[1, 1], [1, -1]], dtype=complex) * SQRT1_2
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
CX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
PLUS = np.array([1, 1], dtype=complex) * SQRT1_2
ZERO = np.array([1, 0], dtype=complex)
ONE = np.array([0, 1], dtype=complex)


class SizeError(RuntimeError):
    """The requested simulation exceeds the desk-scale caps."""


def j_matrix(angle: Angle) -> np.ndarray:
    e = np.exp(1j * angle.radians)
    return np.array([[1, e], [1, -e]], dtype=complex) * SQRT1_2


def zphase_matrix(angle: Angle) -> np.ndarray:
    return np.diag([1, np.exp(1j * angle.radians)]).astype(complex)


def _bra(angle: Angle, outcome: int) -> np.ndarray:
    """Row vector of <+_a| (outcome 0) or <-_a| (outcome 1)."""
    sign = -1 if outcome else 1
    return np.array([1, sign * np.exp(-1j * angle.radians)], dtype=complex) * SQRT1_2


class _Register:
    """State tensor of shape ``(columns, 2, ..., 2)`` over a list of qubit ids."""

    def __init__(self, columns: int, cap: int = MAX_QUBITS):
        self.state = np.ones((columns,), dtype=complex)
        self.qubits: list[int] = []
        self.cap = cap

    @classmethod
    def basis(cls, qubits: Sequence[int], cap: int = MAX_QUBITS) -> "_Register":
        k = len(qubits)
        if k > cap:
            raise SizeError(f"{k} live qubits exceed the cap of {cap}")
        reg = cls(2**k, cap)
        reg.state = np.eye(2**k, dtype=complex).reshape((2**k,) + (2,) * k)
        reg.qubits = list(qubits)
        return reg

    def axis(self, q: int) -> int:
        return self.qubits.index(q) + 1

    def add(self, q: int, vec: np.ndarray) -> None:
        if len(self.qubits) + 1 > self.cap:
            raise SizeError(f"more than {self.cap} live qubits")
        self.state = self.state[..., None] * vec
        self.qubits.append(q)

    def apply1(self, q: int, u: np.ndarray) -> None:
        a = self.axis(q)
        self.state = np.moveaxis(np.tensordot(u, self.state, axes=([1], [a])), 0, a)

    def apply2(self, q1: int, q2: int, u: np.ndarray) -> None:
        a, b = self.axis(q1), self.axis(q2)
        moved = np.moveaxis(self.state, (a, b), (0, 1))
        shape = moved.shape
        moved = (u @ moved.reshape(4, -1)).reshape(shape)
        self.state = np.moveaxis(moved, (0, 1), (a, b))

    def cz(self, q1: int, q2: int) -> None:
        a, b = self.axis(q1), self.axis(q2)
        idx = [slice(None)] * self.state.ndim
        idx[a] = 1
        idx[b] = 1
        self.state = self.state.copy()
        self.state[tuple(idx)] *= -1

    def project(self, q: int, bra: np.ndarray) -> None:
        a = self.axis(q)
        self.state = np.tensordot(bra, self.state, axes=([0], [a]))
        self.qubits.remove(q)

    def matrix(self, order: Sequence[int]) -> np.ndarray:
        """Columns are the batch inputs, rows the qubits of ``order``."""
        if sorted(order) != sorted(self.qubits):
            raise PatternError("live register does not match the requested output order")
        axes = [0] + [self.axis(q) for q in order]
        st = np.transpose(self.state, axes)
        return st.reshape(st.shape[0], -1).T


# ---------------------------------------------------------------------------
# Circuits
# ---------------------------------------------------------------------------


def _gate_on(reg: _Register, g) -> None:
    if isinstance(g, Jgate):
        reg.apply1(g.qubit, j_matrix(g.angle))
    elif isinstance(g, Hgate):
        reg.apply1(g.qubit, H)
    elif isinstance(g, ZPhase):
        reg.apply1(g.qubit, zphase_matrix(g.angle))
    elif isinstance(g, CZgate):
        reg.cz(g.a, g.b)
    elif isinstance(g, CXgate):
        reg.apply2(g.control, g.target, CX)
    else:
        raise TypeError(f"cannot apply {g!r} unitarily")


def circuit_unitary(c: Circuit) -> np.ndarray:
    """The exact product of gate matrices; wire 0 is the most significant bit."""
    if c.n > MAX_QUBITS:
        raise SizeError(f"{c.n} qubits exceed the cap of {MAX_QUBITS}")
    if any(isinstance(g, MeasZ) for g in c.gates):
        raise ValueError("circuit_unitary does not accept MZ gates")
    reg = _Register.basis(list(range(c.n)))
    for g in c.gates:
        _gate_on(reg, g)
    return reg.matrix(list(range(c.n)))


def _diagonal_on(g, w: int) -> bool:
    """True when gate ``g`` acts diagonally (in the Z basis) on wire ``w``."""
    if isinstance(g, (CZgate, ZPhase, MeasZ)):
        return True
    return isinstance(g, CXgate) and g.control == w


def _width_friendly_order(c: Circuit, live: set[int], closing: set[int], early: bool = False) -> list:
    """A topological order of the gate dependency DAG that keeps few wires open.

    Wires in ``closing`` are finished one at a time: the next one is the
    open wire whose outstanding prerequisites open the fewest new wires.  A
    wire is finished after its last gate, or with ``early`` after its last
    gate that is not Z-diagonal on it.
    """
    # gates that are Z-diagonal on a shared wire commute there, so a
    # gate only waits for the gates on its wires that it does not commute with
    anchor: dict[int, int] = {}
    diag_run: dict[int, list[int]] = {}
    preds: list[list[int]] = []
    finish: dict[int, int] = {}
    for k, g in enumerate(c.gates):
        before = []
        for w in g.qubits:
            if _diagonal_on(g, w):
                if w in anchor:
                    before.append(anchor[w])
                diag_run.setdefault(w, []).append(k)
            else:
                before.extend(diag_run.pop(w, []) or ([anchor[w]] if w in anchor else []))
                anchor[w] = k
        preds.append(before)
        for w in g.qubits:
            if not (early and _diagonal_on(g, w)):
                finish[w] = k
    done = [False] * len(c.gates)
    opened = set(live)
    order: list = []

    def closure(k: int) -> list[int]:
        seen, stack = set(), [k]
        while stack:
            j = stack.pop()
            if j in seen or done[j]:
                continue
            seen.add(j)
            stack.extend(preds[j])
        return sorted(seen)

    def run(ks: list[int]) -> None:
        for j in ks:
            done[j] = True
            order.append(c.gates[j])
            opened.update(c.gates[j].qubits)

    pending = {w for w in closing if w in finish}
    while pending:
        pool = [w for w in pending if w in opened] or list(pending)
        best = None
        for w in pool:
            ks = closure(finish[w])
            fresh = {q for j in ks for q in c.gates[j].qubits} - opened
            key = (len(fresh), len(ks), w)
            if best is None or key < best[0]:
                best = (key, w, ks)
        _, w, ks = best
        run(ks)
        pending.discard(w)
        pending -= {q for q in pending if done[finish[q]]}
    run([k for k in range(len(c.gates)) if not done[k]])
    return order


def simulate_circuit(
    c: Circuit,
    inputs: Sequence[int] | None = None,
    outputs: Sequence[int] | None = None,
    cap: int = MAX_QUBITS,
    postselect: Mapping[int, int] | None = None,
    early: bool = False,
) -> np.ndarray:
    """Linear map from ``inputs`` wires to ``outputs`` wires.

    Wires outside ``inputs`` start in ``|0>``; wires outside ``outputs`` are
    post-selected onto ``|0>``, or onto the basis state ``postselect`` names
    for them, which is also how ``MZ`` annotations are read.  By default a
    wire is post-selected after its last gate.  With ``early`` it is
    post-selected as soon as only Z-diagonal gates remain on it; those gates
    then act classically on the other wires, which gives the same map while
    keeping fewer wires live.

    A wire holding a known basis state stays out of the state tensor until a
    gate puts it in superposition, so parity ancillas fed by post-selected
    wires cost nothing.  Gates are replayed in a width-friendly order that
    only swaps gates commuting on their shared wires.
    """
    inputs = list(range(c.n)) if inputs is None else list(inputs)
    outputs = list(range(c.n)) if outputs is None else list(outputs)
    out_set = set(outputs)
    postselect = postselect or {}
    closing = {w for w in range(c.n) if w not in out_set}
    order = _width_friendly_order(c, set(inputs), closing, early)
    last: dict[int, int] = {}
    for k, g in enumerate(order):
        for w in g.qubits:
            if not early or not _diagonal_on(g, w) or w not in last:
                last[w] = k
    kets = {0: ZERO, 1: ONE}
    in_set = set(inputs)
    bits = {w: 0 for w in range(c.n) if w not in in_set}
    closed: set[int] = set()
    phase = 1.0 + 0j
    reg = _Register.basis(inputs, cap)

    def close(w: int) -> complex:
        want = postselect.get(w, 0)
        closed.add(w)
        if w in bits:
            return 1.0 if bits[w] == want else 0.0
        reg.project(w, kets[want])
        bits[w] = want
        return 1.0

    for w in inputs:
        if w not in out_set and w not in last:
            phase *= close(w)
    for k, g in enumerate(order):
        if isinstance(g, MeasZ):
            pass
        else:
            classical_cx = isinstance(g, CXgate) and g.control in bits
            for w in g.qubits:
                if w in bits and not _diagonal_on(g, w) and not classical_cx:
                    if w in closed:
                        raise PatternError(f"gate {g!r} acts non-diagonally on a closed wire")
                    reg.add(w, kets[bits.pop(w)])
            if any(w in bits for w in g.qubits):
                phase *= _classical(reg, g, bits, closed)
            else:
                _gate_on(reg, g)
        for w in g.qubits:
            if last[w] == k and w not in out_set and w not in closed:
                phase *= close(w)
    for w in outputs:
        if w in bits:
            reg.add(w, kets[bits.pop(w)])
    return phase * reg.matrix(outputs)


def _classical(reg: _Register, g, bits: dict[int, int], closed: set[int]) -> complex:
    """Apply a gate some of whose wires hold known basis states."""
    if isinstance(g, ZPhase):
        return complex(zphase_matrix(g.angle)[bits[g.qubit], bits[g.qubit]])
    if isinstance(g, CZgate):
        a, b = g.a, g.b
        if a in bits and b in bits:
            return -1.0 if bits[a] and bits[b] else 1.0
        ctrl, other = (a, b) if a in bits else (b, a)
        if bits[ctrl]:
            reg.apply1(other, Z)
        return 1.0
    if isinstance(g, CXgate):
        flip = bits[g.control]
        if g.target not in bits:
            if flip:
                reg.apply1(g.target, X)
            return 1.0
        if g.target in closed:
            # a post-selected target must not be flipped afterwards
            return 0.0 if flip else 1.0
        bits[g.target] ^= flip
        return 1.0
    raise PatternError(f"gate {g!r} cannot act on a classical wire")


# ---------------------------------------------------------------------------
# Patterns
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BranchResult:
    outcome: str
    probability: float
    map: np.ndarray = field(compare=False, repr=False)


def _measured_order(p: Pattern) -> list[int]:
    return [c.qubit for c in p.commands if isinstance(c, Meas)]


def run_pattern_branch(
    p: Pattern,
    outcomes: Mapping[int, int] | Sequence[int] | str,
    cap: int = MAX_QUBITS,
) -> BranchResult:
    """Execute one computational branch and return its (subnormalized) map.

    ``outcomes`` gives the raw measurement result of every measured qubit,
    either as a mapping or as a sequence in measurement-command order.  The
    probability is taken for the maximally mixed input.
    """
    order = _measured_order(p)
    if not isinstance(outcomes, Mapping):
        bits = [int(b) for b in outcomes]
        if len(bits) != len(order):
            raise PatternError(f"expected {len(order)} outcome bits, got {len(bits)}")
        outcomes = dict(zip(order, bits))
    missing = [q for q in order if q not in outcomes]
    if missing:
        raise PatternError(f"no outcome given for measured qubits {missing}")

    reg = _Register.basis(list(p.inputs), cap)
    record: dict[int, int] = {}
    pending_prep: set[int] = set()
    pending_ent: list[Ent] = []

    def wake(q: int) -> None:
        if q in pending_prep:
            pending_prep.discard(q)
            reg.add(q, PLUS)

    def flush(q: int | None) -> None:
        keep = []
        for e in pending_ent:
            if q is None or q in e.qubits:
                wake(e.i)
                wake(e.j)
                reg.cz(e.i, e.j)
            else:
                keep.append(e)
        pending_ent[:] = keep

    for cmd in p.commands:
        if isinstance(cmd, Prep):
            pending_prep.add(cmd.qubit)
        elif isinstance(cmd, Ent):
            pending_ent.append(cmd)
        elif isinstance(cmd, Shift):
            record[cmd.qubit] = (record[cmd.qubit] + cmd.t.value(record)) % 2
        else:
            q = cmd.qubit
            flush(q)
            wake(q)
            if isinstance(cmd, Meas):
                angle = cmd.angle.adapted(cmd.s.value(record), cmd.t.value(record))
                bit = int(outcomes[q])
                reg.project(q, _bra(angle, bit))
                record[q] = bit
            elif cmd.s.value(record):
                reg.apply1(q, X if isinstance(cmd, CorrX) else Z)
    flush(None)
    for q in sorted(pending_prep):
        wake(q)
    amap = reg.matrix(list(p.outputs))
    prob = float(np.vdot(amap, amap).real) / amap.shape[1]
    label = "".join(str(int(outcomes[q])) for q in order)
    return BranchResult(label, prob, amap)


def branches(p: Pattern, cap: int = BRANCH_CAP) -> list[BranchResult]:
    """All ``2^k`` branches ordered by outcome string."""
    k = len(_measured_order(p))
    if k > cap:
        raise SizeError(f"{k} measured qubits exceed the branch cap of {cap}")
    return [run_pattern_branch(p, bits) for bits in itertools.product((0, 1), repeat=k)]


def equiv_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = EQUIV_TOL) -> bool:
    """True iff ``a = lam * b`` within ``tol`` (max-norm) for some unit ``lam``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    if a.size == 0:
        return True
    k = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[k]) <= tol:
        return bool(np.max(np.abs(a)) <= tol)
    lam = a[k] / b[k]
    if abs(lam) == 0:
        return bool(np.max(np.abs(a)) <= tol)
    lam /= abs(lam)
    return bool(np.max(np.abs(a - lam * b)) <= tol)


def _proportional(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na <= tol or nb <= tol:
        return na <= tol and nb <= tol
    return equiv_up_to_phase(a / na, b / nb, tol)


@dataclass(frozen=True)
class DeterminismReport:
    deterministic: bool
    strong: bool
    uniform: bool
    witness: tuple | None = None


def resample_angles(p: Pattern, rng: random.Random) -> Pattern:
    """Same pattern with every measurement angle replaced by a random non-Pauli one."""
    cmds = []
    for c in p.commands:
        if isinstance(c, Meas):
            c = Meas(c.qubit, Angle(2 * rng.randrange(1024) + 1, 1024), c.s, c.t)
        cmds.append(c)
    return p.with_commands(cmds)


def _strong_witness(results: list[BranchResult], tol: float) -> tuple | None:
    ref = results[0]
    for r in results[1:]:
        if abs(r.probability - ref.probability) > tol or not equiv_up_to_phase(r.map, ref.map, tol):
            return (ref.outcome, r.outcome)
    return None


def check_determinism(
    p: Pattern,
    resamples: int = 3,
    seed: int = SEED,
    tol: float = EQUIV_TOL,
) -> DeterminismReport:
    results = branches(p)
    ref = results[0]
    witness = None
    deterministic = True
    for r in results[1:]:
        if not _proportional(r.map, ref.map, tol):
            deterministic = False
            witness = (ref.outcome, r.outcome)
            break
    strong_w = _strong_witness(results, tol)
    strong = deterministic and strong_w is None
    witness = witness or strong_w
    uniform = strong
    if strong:
        rng = random.Random(seed)
        for _ in range(resamples):
            q = resample_angles(p, rng)
            w = _strong_witness(branches(q), tol)
            if w is not None:
                uniform = False
                witness = w
                break
    return DeterminismReport(deterministic, strong, uniform, witness)


def pattern_operator(p: Pattern, verify: bool = True, samples: int = 16, tol: float = EQUIV_TOL) -> np.ndarray:
    """Branch-0 map rescaled by ``2^(k/2)`` for ``k`` measured qubits.

    With ``verify`` the pattern must be strongly deterministic: every branch
    is compared when there are at most :data:`BRANCH_CAP` measurements,
    otherwise ``samples`` seeded random branches are.
    """
    order = _measured_order(p)
    zero = run_pattern_branch(p, [0] * len(order))
    if verify and order:
        if len(order) <= BRANCH_CAP:
            others = [tuple(b) for b in itertools.product((0, 1), repeat=len(order))][1:]
        else:
            rng = random.Random(SEED)
            others = [tuple(rng.randrange(2) for _ in order) for _ in range(samples)]
        for bits in others:
            r = run_pattern_branch(p, bits)
            if not equiv_up_to_phase(r.map, zero.map, tol):
                raise PatternError(f"not strongly deterministic: branches {zero.outcome} and {r.outcome} differ")
    return zero.map * 2 ** (len(order) / 2)
