"""Shared corpus generators and brute-force oracles for the test suite.

The oracles here deliberately avoid the package's own algorithms: flows are
found by trying every injective map, paths by filtering every simple path,
depths by replaying commands against a clock, colourings by exhaustive
search.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter

from mbqc_depth.core import (
    Angle,
    Circuit,
    CorrX,
    CorrZ,
    CZgate,
    Ent,
    Geometry,
    Jgate,
    Meas,
    Pattern,
    Prep,
)
from mbqc_depth.flow import find_flow

# seven-vertex example geometry, vertices a..g numbered 0..6
NAMES = dict(enumerate("abcdefg"))
DEMO_EDGES = [(0, 2), (1, 2), (1, 3), (2, 4), (2, 5), (3, 5), (3, 6)]
DEMO_INPUTS = (0, 1)
DEMO_OUTPUTS = (4, 5, 6)

PAULI_ANGLES = [Angle(0), Angle(1), Angle(1, 2), Angle(3, 2)]
CLIFFORD_ANGLES = PAULI_ANGLES


def demo_geometry() -> Geometry:
    return Geometry.build(DEMO_EDGES, DEMO_INPUTS, DEMO_OUTPUTS)


def demo_angles() -> dict[int, Angle]:
    return {v: Angle.generic(name) for v, name in zip(range(4), ["alpha", "beta", "gamma", "delta"])}


# ---------------------------------------------------------------------------
# Corpora
# ---------------------------------------------------------------------------


def random_angle(rng: random.Random, tag: str, pauli_share: float = 0.5) -> Angle:
    if rng.random() < pauli_share:
        return rng.choice(PAULI_ANGLES)
    return Angle.generic(tag)


def random_open_graph(rng: random.Random, equal: bool = True, max_vertices: int = 8, max_measured: int = 6):
    """A random geometry that has a flow, with the flow."""
    while True:
        n = rng.randint(2, max_vertices)
        edges = [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < 0.35]
        k = rng.randint(1, min(3, n - 1))
        vs = list(range(n))
        rng.shuffle(vs)
        inputs = sorted(vs[:k])
        size = k if equal else rng.randint(k, min(n - 1, k + 1))
        outputs = sorted(rng.sample(vs, size))
        g = Geometry.build(edges, inputs, outputs, range(n))
        if len(g.non_outputs) > max_measured:
            continue
        f = find_flow(g)
        if f is not None:
            return g, f


def flow_corpus(seed: int, count: int, equal: bool | None = None, **kw):
    """``count`` random (geometry, flow, angles) triples."""
    rng = random.Random(seed)
    out = []
    for k in range(count):
        eq = (k % 2 == 0) if equal is None else equal
        g, f = random_open_graph(rng, eq, **kw)
        angles = {v: random_angle(rng, f"v{seed}.{k}.{v}") for v in g.non_outputs}
        out.append((g, f, angles))
    return out


def line_geometry(length: int) -> Geometry:
    """Path 0-1-...-length with input 0 and output ``length``."""
    return Geometry.build([(i, i + 1) for i in range(length)], [0], [length])


def random_source_circuit(rng: random.Random, n: int, gates: int, clifford: bool = False) -> Circuit:
    out = []
    for k in range(gates):
        if n > 1 and rng.random() < 0.4:
            a, b = rng.sample(range(n), 2)
            out.append(CZgate(a, b))
        else:
            q = rng.randrange(n)
            if clifford:
                angle = rng.choice(CLIFFORD_ANGLES)
            elif rng.random() < 0.5:
                angle = rng.choice(PAULI_ANGLES)
            else:
                angle = Angle(rng.choice([1, 3, 5, 7]), rng.choice([4, 8]))
            out.append(Jgate(q, angle))
    return Circuit(n, out)


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------


def _acyclic(nodes, arcs) -> bool:
    succ = {v: set() for v in nodes}
    for a, b in arcs:
        succ[a].add(b)
    state: dict = {}

    def visit(v) -> bool:
        state[v] = 1
        for w in succ[v]:
            if state.get(w) == 1 or (w not in state and not visit(w)):
                return False
        state[v] = 2
        return True

    for v in nodes:
        if v not in state and not visit(v):
            return False
    return True


def brute_force_flows(g: Geometry) -> list[dict[int, int]]:
    """Every map f: O^c -> I^c meeting the three flow conditions."""
    adj = g.adjacency()
    sources = sorted(g.vertices - set(g.outputs))
    targets = sorted(g.vertices - set(g.inputs))
    found = []
    for image in itertools.permutations(targets, len(sources)):
        f = dict(zip(sources, image))
        if any(f[x] not in adj[x] for x in sources):
            continue
        arcs = [(x, f[x]) for x in sources]
        arcs += [(x, y) for x in sources for y in adj[f[x]] if y != x]
        if _acyclic(g.vertices, arcs):
            found.append(f)
    return found


def brute_force_paths(g: Geometry, fmap: dict[int, int]) -> set[tuple]:
    """Filter every simple path of ``g`` by the influencing-path predicate."""
    adj = g.adjacency()
    outs = set(g.outputs)
    images = set(fmap.values())
    starts = set(g.inputs) | (set(fmap) - images)
    every: list[tuple] = []

    def extend(path):
        every.append(tuple(path))
        for w in adj[path[-1]]:
            if w not in path:
                extend(path + [w])

    for v in g.vertices:
        extend([v])

    def ok(path) -> bool:
        if len(path) < 2 or path[0] not in starts or path[-1] not in outs:
            return False
        kinds = []
        for a, b in zip(path, path[1:]):
            if fmap.get(a) == b:
                kinds.append("f")
            elif fmap.get(b) == a:
                return False
            else:
                kinds.append("n")
        if kinds[0] != "f":
            return False
        return not any(x == y == "n" for x, y in zip(kinds, kinds[1:]))

    return {p for p in every if ok(p)}


def clock_depth(p: Pattern) -> int:
    """Quantum depth by replaying a standard pattern against a clock.

    Every measured or corrected qubit finishes one tick after the latest
    qubit its signals read; the depth is the largest finishing time.
    """
    done: dict[int, int] = {}
    for c in p.commands:
        if isinstance(c, (Prep, Ent)):
            continue
        if isinstance(c, Meas):
            dom = set(c.s) | set(c.t)
        else:
            dom = set(c.s)
        start = max((done[q] for q in dom), default=0)
        done[c.qubit] = max(done.get(c.qubit, 0), start + 1)
    return max(done.values(), default=0)


def brute_force_chromatic_index(g: Geometry) -> int:
    edges = sorted(g.edges)
    if not edges:
        return 0
    for k in range(1, len(edges) + 1):
        for colours in itertools.product(range(k), repeat=len(edges)):
            seen = set()
            good = True
            for (a, b), c in zip(edges, colours):
                if (a, c) in seen or (b, c) in seen:
                    good = False
                    break
                seen.add((a, c))
                seen.add((b, c))
            if good:
                return k
    raise AssertionError("unreachable")


def canonical_corrections(p: Pattern) -> tuple:
    """Measurements (as a set, their order only matters through signals),
    corrections XOR-merged per (qubit, kind) and E pairs taken mod 2."""
    meas = frozenset((c.qubit, c.angle, frozenset(c.s), frozenset(c.t)) for c in p.commands if isinstance(c, Meas))
    acc: dict = {}
    for c in p.commands:
        if isinstance(c, (CorrX, CorrZ)):
            key = (c.qubit, type(c).__name__)
            acc[key] = acc.get(key, frozenset()) ^ frozenset(c.s)
    corr = tuple(sorted((k, tuple(sorted(v))) for k, v in acc.items() if v))
    # a repeated E pair cancels
    ents: frozenset = frozenset()
    for c in p.commands:
        if isinstance(c, Ent):
            ents ^= {frozenset(c.qubits)}
    return meas, corr, ents


def j_matrix_oracle(alpha: float):
    import numpy as np

    return np.array([[1, np.exp(1j * alpha)], [1, -np.exp(1j * alpha)]]) / np.sqrt(2)


def dense_unitary(c: Circuit):
    """Circuit unitary by Kronecker products of full-width gate matrices."""
    import numpy as np

    from mbqc_depth.core import CXgate, Hgate, ZPhase

    eye = np.eye(2)
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    p0, p1 = np.diag([1, 0]), np.diag([0, 1])
    x, z = np.array([[0, 1], [1, 0]]), np.diag([1, -1])

    def full(ops: dict):
        m = np.array([[1.0 + 0j]])
        for q in range(c.n):
            m = np.kron(m, ops.get(q, eye))
        return m

    u = np.eye(2**c.n, dtype=complex)
    for g in c.gates:
        if isinstance(g, Jgate):
            m = full({g.qubit: j_matrix_oracle(g.angle.radians)})
        elif isinstance(g, Hgate):
            m = full({g.qubit: h})
        elif isinstance(g, ZPhase):
            m = full({g.qubit: np.diag([1, np.exp(1j * g.angle.radians)])})
        elif isinstance(g, CZgate):
            m = full({g.a: p0}) + full({g.a: p1, g.b: z})
        elif isinstance(g, CXgate):
            m = full({g.control: p0}) + full({g.control: p1, g.target: x})
        else:
            raise ValueError(g)
        u = m @ u
    return u


def word_counts(words) -> Counter:
    return Counter(words)


def coherent_map(coh, rng: random.Random, early: bool = True, cap: int = 16):
    """Logical map of a coherent circuit, rescaled by ``2^(k/2)``.

    Measured wires are post-selected on random bits, ancillas on 0.
    """
    from mbqc_depth import sim

    bits = {w: rng.randrange(2) for w in coh.measured}
    m = sim.simulate_circuit(coh.circuit, coh.inputs, coh.outputs, cap=cap, postselect=bits, early=early)
    return m * 2 ** (len(coh.measured) / 2)
