"""Flows on open graphs, the dependent patterns they induce, and path-based depth analysis."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .core import (
    Angle,
    CorrX,
    CorrZ,
    Ent,
    Geometry,
    Meas,
    Pattern,
    PatternError,
    PauliClass,
    Prep,
    Signal,
    geometry_of,
    is_standard,
)

__all__ = [
    "FlowError",
    "PathLimitError",
    "Flow",
    "InfluencingPath",
    "PathDepth",
    "DepthReport",
    "find_flow",
    "flow_from_map",
    "check_flow",
    "flow_pattern",
    "flow_pattern_wild",
    "recover_flow",
    "influencing_paths",
    "is_reset_sequence",
    "severs_dependency",
    "flow_word_depth",
    "simplify_word",
    "word_depth",
    "x_dependencies",
    "walk_depth",
    "characterized_depth",
    "depth_upper_bound",
    "classical_cost",
    "classical_depth",
]

FLOW, NONFLOW, LOOP = "flow", "nonflow", "loop"
PATH_CAP = 10**6


class FlowError(ValueError):
    """Flow requested or supplied outside the supported setting."""


class PathLimitError(RuntimeError):
    """Influencing-path enumeration exceeded its cap."""


@dataclass(frozen=True)
class Flow:
    """A flow map with the layering of its dependency order.

    ``f`` is stored as sorted ``(x, f(x))`` pairs; ``layers`` lists the
    vertices of each level earliest first and ``loops`` the vertices with
    ``f(x) == x``.
    """

    f: tuple
    layers: tuple
    loops: frozenset = frozenset()

    @property
    def map(self) -> dict[int, int]:
        return dict(self.f)

    @property
    def inverse(self) -> dict[int, int]:
        return {y: x for x, y in self.f if x != y}

    @property
    def depth(self) -> int:
        return len(self.layers)

    def layer_of(self) -> dict[int, int]:
        return {v: k for k, layer in enumerate(self.layers) for v in layer}

    def order(self) -> list[int]:
        """Measurement order: layer by layer, ascending inside a layer."""
        fmap = self.map
        return [v for layer in self.layers for v in sorted(layer) if v in fmap]


def _relation(g: Geometry, fmap: Mapping[int, int]) -> dict[int, set[int]]:
    """Successor sets of the generating relation of the dependency order."""
    adj = g.adjacency()
    succ: dict[int, set[int]] = {v: set() for v in g.vertices}
    for x, fx in fmap.items():
        if fx != x:
            succ[x].add(fx)
        succ[x].update(y for y in adj[fx] if y != x)
    return succ


def _layers(g: Geometry, fmap: Mapping[int, int]) -> tuple | None:
    """Latest-possible levels of the relation, or None if it is cyclic."""
    succ = _relation(g, fmap)
    height: dict[int, int] = {}
    state: dict[int, int] = {}

    def visit(v: int) -> bool:
        stack = [(v, iter(sorted(succ[v])))]
        state[v] = 1
        while stack:
            node, it = stack[-1]
            child = next(it, None)
            if child is None:
                height[node] = 1 + max((height[w] for w in succ[node]), default=-1)
                state[node] = 2
                stack.pop()
            elif state.get(child) == 1:
                return False
            elif child not in state:
                state[child] = 1
                stack.append((child, iter(sorted(succ[child]))))
        return True

    for v in sorted(g.vertices):
        if v not in state and not visit(v):
            return None
    top = max(height.values(), default=-1)
    levels: list[list[int]] = [[] for _ in range(top + 1)]
    for v, h in height.items():
        levels[top - h].append(v)
    return tuple(tuple(sorted(level)) for level in levels)


def check_flow(g: Geometry, fmap: Mapping[int, int]) -> list[str]:
    """Return the list of flow conditions ``fmap`` breaks on ``g`` (empty if none)."""
    problems = []
    ins, outs = set(g.inputs), set(g.outputs)
    domain = set(g.vertices) - outs
    if set(fmap) != domain:
        problems.append("domain is not the set of non-outputs")
    images = [y for x, y in fmap.items() if x != y]
    if len(images) != len(set(images)):
        problems.append("map is not injective")
    for x, y in fmap.items():
        if y in ins:
            problems.append(f"{x} maps to input {y}")
        if x == y:
            if x in ins or any(fmap.get(z) == x for z in fmap if z != x):
                problems.append(f"loop on {x} is not allowed")
        elif not g.adjacent(x, y):
            problems.append(f"{x} is not adjacent to {y}")
    if not problems and _layers(g, fmap) is None:
        problems.append("dependency relation has a cycle")
    return problems


def flow_from_map(g: Geometry, fmap: Mapping[int, int]) -> Flow:
    problems = check_flow(g, fmap)
    if problems:
        raise FlowError("; ".join(problems))
    layers = _layers(g, fmap)
    loops = frozenset(x for x, y in fmap.items() if x == y)
    return Flow(tuple(sorted(fmap.items())), layers, loops)


def find_flow(g: Geometry) -> Flow | None:
    """Find a flow of an open graph, or None when there is none.

    Works backwards from the outputs: a processed vertex that is not an
    input and has exactly one unprocessed neighbour must be that
    neighbour's image.  The result is unique when |I| = |O|; otherwise it
    is the flow this sweep finds first (ascending vertex order breaks ties).
    """
    if len(g.inputs) > len(g.outputs):
        return None
    adj = g.adjacency()
    ins = set(g.inputs)
    processed = set(g.outputs)
    correctors = processed - ins
    fmap: dict[int, int] = {}
    while True:
        claimed: dict[int, int] = {}
        for v in sorted(correctors):
            rest = [w for w in adj[v] if w not in processed]
            if len(rest) == 1 and rest[0] not in claimed:
                claimed[rest[0]] = v
        if not claimed:
            break
        fmap.update(claimed)
        processed |= set(claimed)
        correctors = (correctors - set(claimed.values())) | (set(claimed) - ins)
    if processed != set(g.vertices):
        return None
    return flow_from_map(g, fmap)


# ---------------------------------------------------------------------------
# Patterns from flows
# ---------------------------------------------------------------------------


def _check_angles(g: Geometry, angles: Mapping[int, Angle]) -> dict[int, Angle]:
    need = set(g.non_outputs)
    missing = sorted(need - set(angles))
    if missing:
        raise FlowError(f"missing angle for qubits {missing}")
    return {v: Angle.of(angles[v]) for v in need}


def _z_sources(g: Geometry, flow: Flow) -> dict[int, list[int]]:
    """For each vertex i, the j (in measurement order) with f(j) adjacent to i, j != i."""
    adj = g.adjacency()
    fmap = flow.map
    out: dict[int, list[int]] = {v: [] for v in g.vertices}
    for j in flow.order():
        for i in sorted(adj[fmap[j]]):
            if i != j:
                out[i].append(j)
    return out


def flow_pattern(g: Geometry, flow: Flow, angles: Mapping[int, Angle]) -> Pattern:
    """Standard dependent pattern realised by ``flow`` with the given angles."""
    angles = _check_angles(g, angles)
    inv = flow.inverse
    zsrc = _z_sources(g, flow)
    cmds: list = [Prep(v) for v in g.non_inputs]
    cmds += [Ent(a, b) for a, b in sorted(g.edges)]
    for i in flow.order():
        s = [inv[i]] if i in inv else []
        cmds.append(Meas(i, angles[i], Signal(s), Signal(zsrc[i])))
    for o in sorted(g.outputs):
        if o in inv:
            cmds.append(CorrX(o, Signal([inv[o]])))
        cmds += [CorrZ(o, Signal([j])) for j in zsrc[o]]
    return Pattern(g.vertices, g.inputs, g.outputs, tuple(cmds))


def flow_pattern_wild(g: Geometry, flow: Flow, angles: Mapping[int, Angle]) -> Pattern:
    """The same computation written as measure-then-correct steps after E_G."""
    angles = _check_angles(g, angles)
    adj = g.adjacency()
    fmap = flow.map
    cmds: list = [Prep(v) for v in g.non_inputs]
    cmds += [Ent(a, b) for a, b in sorted(g.edges)]
    for i in flow.order():
        cmds.append(Meas(i, angles[i]))
        fi = fmap[i]
        if fi != i:
            cmds.append(CorrX(fi, Signal([i])))
        cmds += [CorrZ(k, Signal([i])) for k in sorted(adj[fi]) if k != i]
    return Pattern(g.vertices, g.inputs, g.outputs, tuple(cmds))


def recover_flow(p: Pattern) -> Flow:
    """Read the flow back off a standard pattern in flow form."""
    if not is_standard(p):
        raise FlowError("pattern is not standard")
    g = geometry_of(p)
    fmap: dict[int, int] = {}
    for cmd in p.commands:
        if isinstance(cmd, (Meas, CorrX)) and cmd.s:
            if len(cmd.s) != 1:
                raise FlowError("pattern is not in flow form")
            (src,) = cmd.s
            fmap[src] = cmd.qubit
    for v in g.non_outputs:
        fmap.setdefault(v, v)
    try:
        flow = flow_from_map(g, fmap)
    except FlowError as exc:
        raise FlowError(f"pattern is not in flow form: {exc}") from None
    expected = flow_pattern(g, flow, p.angles())
    if _canonical(expected) != _canonical(p):
        raise FlowError("pattern is not in flow form")
    return flow


def _canonical(p: Pattern) -> tuple:
    meas = sorted((c.qubit, c.s, c.t) for c in p.commands if isinstance(c, Meas))
    corr = {}
    for c in p.commands:
        if isinstance(c, (CorrX, CorrZ)):
            key = (c.qubit, type(c).__name__)
            corr[key] = corr.get(key, Signal()) + c.s
    return (
        frozenset(c.pair for c in p.commands if isinstance(c, Ent)),
        tuple(meas),
        tuple(sorted((k, v) for k, v in corr.items() if v)),
    )


# ---------------------------------------------------------------------------
# Influencing paths
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InfluencingPath:
    """An influencing path.  ``kinds[k]`` is the kind of the edge entering
    ``vertices[k]`` (``kinds[0]`` is ``loop`` for a loop start, else absent)."""

    vertices: tuple
    kinds: tuple

    @property
    def loop(self) -> bool:
        return bool(self.kinds) and self.kinds[0] == LOOP

    def steps(self) -> list[tuple[int, int, str]]:
        """(from, to, kind) for every non-loop edge."""
        ks = self.kinds[1:] if self.loop else self.kinds
        return [(a, b, k) for a, b, k in zip(self.vertices, self.vertices[1:], ks)]

    def counts(self) -> tuple[int, int, int]:
        """(flow edges, non-flow edges, loop edges)."""
        e = sum(k == FLOW for k in self.kinds)
        n = sum(k == NONFLOW for k in self.kinds)
        return e, n, int(self.loop)

    def name(self, names: Mapping[int, str] | None = None) -> str:
        names = names or {}
        parts = [str(names.get(v, v)) for v in self.vertices]
        sep = "" if all(len(x) == 1 for x in parts) else "-"
        return sep.join(parts)


def _loop_eligible(g: Geometry, flow: Flow, angles: Mapping[int, Angle] | None) -> set[int]:
    if angles is None:
        return set(flow.loops)
    fmap = flow.map
    images = {y for x, y in fmap.items() if x != y}
    ins, outs = set(g.inputs), set(g.outputs)
    extra = {
        v
        for v in g.vertices
        if v not in ins and v not in outs and v not in images and v in angles and Angle.of(angles[v]).pauli is PauliClass.Y
    }
    return set(flow.loops) | extra


def influencing_paths(
    g: Geometry,
    flow: Flow,
    angles: Mapping[int, Angle] | None = None,
    maximal: bool = True,
    cap: int = PATH_CAP,
) -> list[InfluencingPath]:
    """Enumerate influencing paths in lexicographic vertex order.

    Paths start at the inputs and, when there are more outputs than inputs,
    also at measured vertices outside the image of the flow (these have no
    incoming X-dependency either).
    Paths follow flow edges forwards and never take two non-flow edges in a
    row.  Every output reached ends a path; a path may also carry on through
    an output along a non-flow edge.  With ``maximal`` only paths that are
    not a proper suffix of another path are kept.
    """
    adj = g.adjacency()
    fmap = flow.map
    outs = set(g.outputs)
    flow_edges = {frozenset((x, y)) for x, y in fmap.items() if x != y}
    found: list[InfluencingPath] = []

    def walk(verts: list[int], kinds: list[str]) -> None:
        v = verts[-1]
        if v in outs:
            if len(found) >= cap:
                raise PathLimitError(f"more than {cap} influencing paths")
            found.append(InfluencingPath(tuple(verts), tuple(kinds)))
        fv = fmap.get(v)
        if fv is not None and fv != v and fv not in verts:
            walk(verts + [fv], kinds + [FLOW])
        if kinds and kinds[-1] == NONFLOW:
            return
        for w in sorted(adj[v]):
            if w not in verts and frozenset((v, w)) not in flow_edges:
                walk(verts + [w], kinds + [NONFLOW])

    images = {y for x, y in fmap.items() if x != y}
    for i in sorted(set(g.inputs) | (set(fmap) - images)):
        fi = fmap.get(i)
        if fi is not None and fi != i:
            walk([i, fi], [FLOW])
    for v in sorted(_loop_eligible(g, flow, angles)):
        for w in sorted(adj[v]):
            if frozenset((v, w)) not in flow_edges:
                walk([v, w], [LOOP, NONFLOW])

    if maximal:
        seqs = {p.vertices for p in found}
        found = [
            p
            for p in found
            if not any(len(q) > len(p.vertices) and q[len(q) - len(p.vertices) :] == p.vertices for q in seqs)
        ]
    found.sort(key=lambda p: p.vertices)
    return found


# ---------------------------------------------------------------------------
# Words and the reset language
# ---------------------------------------------------------------------------

_RESET = re.compile(r"X(XX)*(YX(XX)*)*")


def _letter(c) -> str:
    c = PauliClass(c) if not isinstance(c, PauliClass) else c
    return c.value


def is_reset_sequence(word: Sequence) -> bool:
    """Membership in (X)^odd (Y (X)^odd)^*."""
    letters = "".join(_letter(c) for c in word)
    if "N" in letters:
        raise ValueError("reset sequences contain only Pauli measurements")
    return _RESET.fullmatch(letters) is not None


# parities (two back, one back) of the dependency on the opening N; X swaps
# them, Y shifts in their sum
_SEVER_STEP = {"X": lambda a, b: (b, a), "Y": lambda a, b: (b, a ^ b)}


def severs_dependency(word: Sequence) -> bool:
    """Whether a flow-edge stretch of Pauli letters between two non-Pauli
    measurements leaves the later one free of the earlier one.

    Every reset sequence severs; so do further words such as ``YY``.
    """
    letters = "".join(_letter(c) for c in word)
    if "N" in letters:
        raise ValueError("the stretch must contain only Pauli measurements")
    state = (0, 1)
    for x in letters:
        state = _SEVER_STEP[x](*state)
    return state[1] == 0


def simplify_word(word: Sequence) -> str:
    """Apply the reset rule to a path word.

    ``word`` is a string over ``N``, ``X``, ``Y`` with ``|`` marking a
    non-flow edge.  Scanning left to right, the Pauli stretch between two
    ``N`` letters is dropped.  When some ``|``-separated block of the stretch
    severs the dependency (see :func:`severs_dependency`; reset sequences
    always do) the chain breaks there, written ``/``; the next ``N``
    then keeps the Pauli letter feeding it, if any, as the head of its chain.
    Pauli letters before the first and after the last ``N`` are kept.
    """
    text = "".join(word)
    pieces = text.split("N")
    if len(pieces) == 1:
        return text
    out = pieces[0] + "N"
    for stretch in pieces[1:-1]:
        blocks = [blk for blk in stretch.split("|") if blk]
        if any(severs_dependency(blk) for blk in blocks):
            head = stretch[-1] if stretch[-1] != "|" else ""
            out += "/" + head + "N"
        else:
            out += "N"
    return out + pieces[-1]


def word_depth(simplified: str, loop: bool = False) -> int:
    """Depth of a simplified path word: the longest of its chains.

    A chain ``P N^d`` counts ``d + 2`` (Pauli layer, ``d`` dependent layers,
    correction layer); a chain opening on ``N``, or on the ``Y`` of a loop
    start, counts ``d + 1``.  A word with no non-Pauli letter counts 2.
    """
    chains = simplified.replace("|", "").split("/")
    if "N" not in chains[0] and len(chains) == 1:
        return 2
    best = 0
    for k, chain in enumerate(chains):
        d = chain.count("N")
        head = chain[0] if chain else "N"
        free = head == "N" or (k == 0 and loop and head == "Y")
        best = max(best, d + (1 if free else 2))
    return best


def flow_word_depth(word: Sequence) -> int:
    """Exact depth of a word read along flow edges only.

    Position ``v`` is X-fed by ``v - 1`` and Z-fed by ``v - 2``.  After Pauli
    simplification only ``N`` letters keep an X-dependency and a ``Y`` letter
    turns its X-source into a Z-source; after shifting a
    signal ``v`` stands for ``v`` plus the signals of its Z-sources.  A Pauli
    letter sits in the first layer, an ``N`` one layer after everything its
    shifted signal reads, and the output after both of its sources.
    """
    letters = "".join(word)
    if "|" in letters or "/" in letters:
        raise ValueError("flow words carry no non-flow markers")
    if not letters:
        return 0
    eff: list[frozenset] = []
    layer: list[int] = []

    def signal(u: int) -> frozenset:
        return eff[u] if u >= 0 else frozenset()

    for v, x in enumerate(letters):
        reads = signal(v - 1) if x == "N" else frozenset()
        layer.append(1 + max((layer[u] for u in reads), default=0))
        shifted = frozenset({v}) ^ signal(v - 2)
        eff.append(shifted ^ signal(v - 1) if x == "Y" else shifted)
    m = len(letters)
    out = signal(m - 1) | signal(m - 2)
    layer.append(1 + max((layer[u] for u in out), default=0))
    best = max(layer)
    return max(best, 2) if "N" not in letters else best


# ---------------------------------------------------------------------------
# Depth characterization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PathDepth:
    path: InfluencingPath
    e: int
    n: int
    p: int
    loop: int
    word: str
    simplified: str
    depth: int

    @property
    def bound(self) -> int:
        return self.e - (self.n + self.p + self.loop) + 1


@dataclass(frozen=True)
class DepthReport:
    flow_depth: int
    quantum_depth_bound: int
    characterized_depth: int
    classical_depth: int
    paths: tuple = field(default=(), compare=False)
    walk_depth: int = field(default=0, compare=False)

    @property
    def path_max(self) -> int:
        """Largest per-path depth from the word rule."""
        return max((pd.depth for pd in self.paths), default=0)

    def items(self) -> dict[str, object]:
        return {
            "characterized_depth": self.characterized_depth,
            "classical_depth": self.classical_depth,
            "flow_depth": self.flow_depth,
            "path_count": len(self.paths),
            "quantum_depth_bound": self.quantum_depth_bound,
            "walk_depth": self.walk_depth,
        }


def _classes(angles: Mapping[int, Angle]) -> dict[int, str]:
    return {v: Angle.of(a).pauli.value for v, a in angles.items()}


def _path_word(path: InfluencingPath, classes: Mapping[int, str], outs: set[int]) -> str:
    """Letters of the measured vertices along ``path``; both endpoints of a
    non-flow edge collapse into one ``|`` marker."""
    ends = {v for a, b, k in path.steps() if k == NONFLOW for v in (a, b)}
    marks = {a for a, b, k in path.steps() if k == NONFLOW}
    letters = []
    for v in path.vertices[:-1]:
        if v in marks:
            letters.append("|")
        elif v not in ends:
            letters.append(classes[v])
    return "".join(letters)


def _path_depth(path: InfluencingPath, classes: Mapping[int, str], outs: set[int]) -> PathDepth:
    e, n, loop = path.counts()
    # a Pauli vertex only saves a layer when the path leaves it by a flow edge;
    # before a non-flow edge it just relays a Z-dependency
    steps = path.steps()
    leaves = {a: k for a, b, k in steps}
    pauli_heads = sum(
        1 for a, b, k in steps if k == FLOW and b not in outs and classes[b] != "N" and leaves.get(b) != NONFLOW
    )
    word = _path_word(path, classes, outs)
    simplified = simplify_word(word)
    if "|" in word or path.loop:
        depth = word_depth(simplified, path.loop)
    else:
        depth = flow_word_depth(word)
    return PathDepth(path, e, n, pauli_heads, loop, word, simplified, depth)


def x_dependencies(g: Geometry, flow: Flow, angles: Mapping[int, Angle]) -> dict[int, set[int]]:
    """Final X-dependency sources of every vertex once Pauli simplification
    and signal shifting have run on the flow pattern.

    A vertex ``k`` feeds ``i`` when the number of influencing walks from ``k``
    that end with the flow edge into ``i`` is odd.  Walks are built from
    Z-steps (a flow edge followed by a non-flow edge, or a flow edge into a
    Y-measured vertex); parities are carried as sets under symmetric
    difference.  Outputs collect both their X- and Z-correction sources.
    """
    classes = _classes({v: angles[v] for v in g.non_outputs})
    inv = flow.inverse
    zsrc = _z_sources(g, flow)
    outs = set(g.outputs)
    reach: dict[int, frozenset] = {}

    def z_domain(i: int) -> set[int]:
        dom = set(zsrc[i])
        if i not in outs and classes[i] == "Y" and i in inv:
            dom ^= {inv[i]}
        return dom

    for i in flow.order():
        acc = {i}
        for j in z_domain(i):
            acc ^= reach[j]
        reach[i] = frozenset(acc)

    deps: dict[int, set[int]] = {}
    for i in flow.order():
        src = set()
        if classes[i] == "N" and i in inv:
            src ^= reach[inv[i]]
        deps[i] = src
    for o in g.outputs:
        xs: set[int] = set(reach[inv[o]]) if o in inv else set()
        zs: set[int] = set()
        for j in zsrc[o]:
            zs ^= reach[j]
        deps[o] = xs | zs
    return deps


def walk_depth(g: Geometry, flow: Flow, angles: Mapping[int, Angle]) -> int:
    """Critical path length of the dependencies found by :func:`x_dependencies`."""
    deps = x_dependencies(g, flow, angles)
    outs = set(g.outputs)
    active = set(flow.order()) | {o for o in outs if deps[o]}
    level: dict[int, int] = {}
    for v in flow.order() + sorted(outs):
        if v in active:
            level[v] = 1 + max((level[u] for u in deps[v]), default=0)
    return max(level.values(), default=0)


def characterized_depth(p: Pattern, flow: Flow | None = None) -> DepthReport:
    """Depth of a flow pattern after Pauli simplification and signal shifting.

    Every influencing path (suffixes included) gets its word simplified and
    scored by :func:`word_depth`; the depth is the largest score.  The
    report also carries :func:`walk_depth` as a second, path-free count.
    """
    if flow is None:
        flow = recover_flow(p)
    g = geometry_of(p)
    angles = p.angles()
    outs = set(g.outputs)
    classes = _classes(angles)
    every = influencing_paths(g, flow, angles, maximal=False)
    paths = tuple(_path_depth(ip, classes, outs) for ip in every)
    floor = 1 if flow.order() else 0
    value = max([floor] + [pd.depth for pd in paths])
    bound = max([floor] + [pd.bound for pd in paths])
    return DepthReport(
        flow.depth, bound, value, classical_depth(p), paths, walk_depth(g, flow, angles)
    )


def depth_upper_bound(p: Pattern, flow: Flow | None = None) -> int:
    """Largest ``e - (n + p + l) + 1`` over the Pauli influencing paths."""
    return characterized_depth(p, flow).quantum_depth_bound


# ---------------------------------------------------------------------------
# Classical depth
# ---------------------------------------------------------------------------


def classical_cost(cmd) -> int:
    size = len(cmd.s) + (len(cmd.t) if isinstance(cmd, Meas) else 0)
    return math.ceil(math.log2(max(1, size)))


def classical_depth(p: Pattern, v: int | None = None) -> int:
    """Parity-evaluation depth: one qubit's cost, or the sum over quantum
    layers of the most expensive command in each layer."""
    from .depth import execution_digraph, greedy_schedule

    costs: dict[int, int] = {}
    for cmd in p.commands:
        if isinstance(cmd, (Meas, CorrX, CorrZ)):
            costs[cmd.qubit] = max(costs.get(cmd.qubit, 0), classical_cost(cmd))
    if v is not None:
        return costs.get(v, 0)
    if not is_standard(p):
        raise PatternError("classical depth needs a standard pattern")
    layers = greedy_schedule(execution_digraph(p))
    return sum(max((costs.get(q, 0) for q in layer), default=0) for layer in layers)
