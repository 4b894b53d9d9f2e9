"""Execution digraphs, quantum depth and preparation depth."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable

from .core import (
    CorrX,
    CorrZ,
    Ent,
    Geometry,
    Meas,
    Pattern,
    PatternError,
    Prep,
    is_standard,
    validate_pattern,
)

__all__ = [
    "ExecutionDigraph",
    "EdgeColoring",
    "execution_digraph",
    "quantum_depth",
    "longest_path",
    "greedy_schedule",
    "preparation_depth",
    "misra_gries",
    "bipartite_coloring",
    "is_bipartite",
    "digraph_dot",
    "geometry_dot",
]

XDEP, ZDEP, EDGE = "Xdep", "Zdep", "Edge"


@dataclass(frozen=True)
class ExecutionDigraph:
    """Dependency DAG of a pattern.

    For standard patterns the nodes are qubits and ``weights`` is empty (every
    node costs one step).  Wild patterns get one node per measurement or
    correction command plus one node per maximal run of ``E`` commands; the
    run's weight is the edge-colouring number of the edges it creates.
    """

    nodes: tuple
    arcs: frozenset
    active: frozenset
    weights: dict = field(default_factory=dict, compare=False)
    labels: dict = field(default_factory=dict, compare=False)

    def weight(self, node: Hashable) -> int:
        return self.weights.get(node, 1)

    def successors(self) -> dict:
        out: dict = {n: set() for n in self.nodes}
        for a, b, _ in self.arcs:
            out[a].add(b)
        return out

    def predecessors(self) -> dict:
        out: dict = {n: set() for n in self.nodes}
        for a, b, _ in self.arcs:
            out[b].add(a)
        return out


def _standard_digraph(p: Pattern) -> ExecutionDigraph:
    arcs = set()
    active = set()
    for cmd in p.commands:
        if isinstance(cmd, Meas):
            active.add(cmd.qubit)
            arcs.update((i, cmd.qubit, XDEP) for i in cmd.s)
            arcs.update((i, cmd.qubit, ZDEP) for i in cmd.t)
        elif isinstance(cmd, (CorrX, CorrZ)):
            active.add(cmd.qubit)
            kind = XDEP if isinstance(cmd, CorrX) else ZDEP
            arcs.update((i, cmd.qubit, kind) for i in cmd.s)
    return ExecutionDigraph(tuple(sorted(p.qubits)), frozenset(arcs), frozenset(active))


def _wild_digraph(p: Pattern) -> ExecutionDigraph:
    nodes: list = []
    members: list[tuple] = []  # (node, qubits, is_correction, measured qubit)
    weights: dict = {}
    labels: dict = {}
    run: list = []

    def close_run() -> None:
        if not run:
            return
        node = f"E{len(nodes)}"
        edges = [c.pair for c in run]
        g = Geometry.build(edges)
        weights[node] = preparation_depth(g)[0]
        labels[node] = "E[" + " ".join(f"{a}-{b}" for a, b in edges) + "]"
        nodes.append(node)
        members.append((node, set(g.vertices), False, None, frozenset()))
        run.clear()

    for k, cmd in enumerate(p.commands):
        if isinstance(cmd, Ent):
            run.append(cmd)
            continue
        close_run()
        if isinstance(cmd, Prep):
            continue
        if isinstance(cmd, Meas):
            node = f"M{cmd.qubit}"
            members.append((node, {cmd.qubit}, False, cmd.qubit, cmd.domain))
        elif isinstance(cmd, (CorrX, CorrZ)):
            node = f"{'X' if isinstance(cmd, CorrX) else 'Z'}{cmd.qubit}@{k}"
            members.append((node, {cmd.qubit}, True, None, cmd.s))
        else:
            raise PatternError("execution digraph requires shift-free patterns")
        labels[node] = node.split("@")[0]
        nodes.append(node)
    close_run()

    where = {m[3]: m[0] for m in members if m[3] is not None}
    arcs = set()
    for b, (nb, qb, corr_b, _, dom_b) in enumerate(members):
        for i in dom_b:
            arcs.add((where[i], nb, XDEP))
        for na, qa, corr_a, _, _ in members[:b]:
            if qa & qb and not (corr_a and corr_b):
                arcs.add((na, nb, EDGE))
    return ExecutionDigraph(tuple(nodes), frozenset(arcs), frozenset(nodes), weights, labels)


def execution_digraph(p: Pattern) -> ExecutionDigraph:
    report = validate_pattern(p)
    if not report.ok:
        raise PatternError(f"invalid pattern: {report.violations[0]}")
    if is_standard(p):
        return _standard_digraph(p)
    return _wild_digraph(p)


def _topological(dg: ExecutionDigraph) -> list:
    preds = dg.predecessors()
    indeg = {n: len(preds[n]) for n in dg.nodes}
    succ = dg.successors()
    queue = deque(n for n in dg.nodes if indeg[n] == 0)
    order = []
    while queue:
        n = queue.popleft()
        order.append(n)
        for m in sorted(succ[n], key=str):
            indeg[m] -= 1
            if indeg[m] == 0:
                queue.append(m)
    if len(order) != len(dg.nodes):
        raise PatternError("execution digraph has a cycle")
    return order


def longest_path(dg: ExecutionDigraph) -> tuple[int, list]:
    """Critical path over active nodes: (total weight, node list)."""
    preds = dg.predecessors()
    best: dict = {}
    back: dict = {}
    for n in _topological(dg):
        if n not in dg.active:
            continue
        prev = [m for m in preds[n] if m in best]
        top = max(prev, key=lambda m: (best[m], str(m)), default=None)
        best[n] = dg.weight(n) + (best[top] if top is not None else 0)
        back[n] = top
    if not best:
        return 0, []
    end = max(best, key=lambda n: (best[n], str(n)))
    path = [end]
    while back[path[-1]] is not None:
        path.append(back[path[-1]])
    return best[end], path[::-1]


def greedy_schedule(dg: ExecutionDigraph) -> list[list]:
    """Earliest-start list schedule; returns the nodes started at each step.

    A node of weight ``w`` occupies ``w`` consecutive steps, so the number of
    steps equals the critical path weight.
    """
    preds = dg.predecessors()
    pending = {n for n in dg.nodes if n in dg.active}
    finish: dict = {}
    steps: list[list] = []
    clock = 0
    while pending:
        ready = sorted(
            (n for n in pending if all(m in finish and finish[m] <= clock for m in preds[n] if m in dg.active)),
            key=str,
        )
        if not ready and not any(f > clock for f in finish.values()):
            raise PatternError("execution digraph has a cycle")
        for n in ready:
            finish[n] = clock + dg.weight(n)
            pending.discard(n)
        steps.append(ready)
        clock += 1
    horizon = max(finish.values(), default=0)
    while len(steps) < horizon:
        steps.append([])
    return steps


def quantum_depth(p: Pattern) -> int:
    return longest_path(execution_digraph(p))[0]


# ---------------------------------------------------------------------------
# Edge colouring
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EdgeColoring:
    color: dict

    @property
    def count(self) -> int:
        return len(set(self.color.values()))

    def is_proper(self) -> bool:
        seen = set()
        for (a, b), c in self.color.items():
            if c < 1 or (a, c) in seen or (b, c) in seen:
                return False
            seen.add((a, c))
            seen.add((b, c))
        return True

    def timesteps(self) -> list[list[tuple[int, int]]]:
        steps: dict[int, list] = {}
        for e, c in sorted(self.color.items()):
            steps.setdefault(c, []).append(e)
        return [steps[c] for c in sorted(steps)]


class _Palette:
    """Per-vertex colour bookkeeping shared by both colouring routines."""

    def __init__(self, g: Geometry):
        self.adj = g.adjacency()
        self.color: dict[tuple[int, int], int] = {}
        self.at: dict[int, dict[int, int]] = {v: {} for v in g.vertices}

    @staticmethod
    def key(a: int, b: int) -> tuple[int, int]:
        return (a, b) if a < b else (b, a)

    def get(self, a: int, b: int) -> int | None:
        return self.color.get(self.key(a, b))

    def free(self, v: int, c: int) -> bool:
        return c not in self.at[v]

    def first_free(self, v: int, colors: Iterable[int]) -> int:
        return next(c for c in colors if c not in self.at[v])

    def unset(self, a: int, b: int) -> None:
        c = self.color.pop(self.key(a, b), None)
        if c is not None:
            del self.at[a][c]
            del self.at[b][c]

    def set(self, a: int, b: int, c: int) -> None:
        self.unset(a, b)
        self.color[self.key(a, b)] = c
        self.at[a][c] = b
        self.at[b][c] = a

    def alternating_path(self, start: int, first: int, second: int) -> list[tuple[int, int]]:
        path, v, want = [], start, first
        while want in self.at[v]:
            w = self.at[v][want]
            path.append((v, w))
            v, want = w, (second if want == first else first)
        return path

    def swap(self, path: list[tuple[int, int]], c: int, d: int) -> None:
        old = [(a, b, self.get(a, b)) for a, b in path]
        for a, b, _ in old:
            self.unset(a, b)
        for a, b, col in old:
            self.set(a, b, d if col == c else c)


def misra_gries(g: Geometry) -> EdgeColoring:
    """Proper edge colouring with at most max-degree + 1 colours."""
    pal = _Palette(g)
    colors = range(1, g.max_degree + 2)
    for u, v in sorted(g.edges):
        fan = [v]
        while True:
            last = fan[-1]
            nxt = next(
                (
                    w
                    for w in sorted(pal.adj[u])
                    if w not in fan and pal.get(u, w) is not None and pal.free(last, pal.get(u, w))
                ),
                None,
            )
            if nxt is None:
                break
            fan.append(nxt)
        c = pal.first_free(u, colors)
        d = pal.first_free(fan[-1], colors)
        pal.swap(pal.alternating_path(u, d, c), c, d)
        w = next(i for i, x in enumerate(fan) if pal.free(x, d))
        shifted = [pal.get(u, fan[i + 1]) for i in range(w)]
        for i in range(1, w + 1):
            pal.unset(u, fan[i])
        for i in range(w):
            pal.set(u, fan[i], shifted[i])
        pal.set(u, fan[w], d)
    return EdgeColoring(dict(pal.color))


def is_bipartite(g: Geometry) -> bool:
    adj = g.adjacency()
    side: dict[int, int] = {}
    for root in sorted(g.vertices):
        if root in side:
            continue
        side[root] = 0
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if w not in side:
                    side[w] = 1 - side[v]
                    queue.append(w)
                elif side[w] == side[v]:
                    return False
    return True


def bipartite_coloring(g: Geometry) -> EdgeColoring:
    """Max-degree colouring of a bipartite graph by alternating-path swaps."""
    if not is_bipartite(g):
        raise ValueError("graph is not bipartite")
    pal = _Palette(g)
    colors = range(1, g.max_degree + 1)
    for u, v in sorted(g.edges):
        a = pal.first_free(u, colors)
        b = pal.first_free(v, colors)
        if not pal.free(v, a):
            # the a/b path from v cannot reach u in a bipartite graph
            pal.swap(pal.alternating_path(v, a, b), a, b)
        pal.set(u, v, a)
    return EdgeColoring(dict(pal.color))


def preparation_depth(g: Geometry) -> tuple[int, EdgeColoring]:
    coloring = bipartite_coloring(g) if is_bipartite(g) else misra_gries(g)
    return coloring.count, coloring


# ---------------------------------------------------------------------------
# DOT
# ---------------------------------------------------------------------------

_ARROW = {XDEP: "odiamond", ZDEP: "normal", EDGE: "none"}


def _quote(x) -> str:
    return '"' + str(x).replace('"', r"\"") + '"'


def digraph_dot(dg: ExecutionDigraph, names: dict | None = None, name: str = "execution") -> str:
    names = names or {}
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for n in dg.nodes:
        label = names.get(n, dg.labels.get(n, n))
        style = "" if n in dg.active else ", style=dashed"
        lines.append(f"  {_quote(n)} [label={_quote(label)}{style}];")
    for a, b, kind in sorted(dg.arcs, key=lambda arc: tuple(map(str, arc))):
        lines.append(f"  {_quote(a)} -> {_quote(b)} [arrowhead={_ARROW[kind]}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def geometry_dot(g: Geometry, coloring: EdgeColoring | None = None, names: dict | None = None) -> str:
    names = names or {}
    ins, outs = set(g.inputs), set(g.outputs)
    lines = ["graph geometry {"]
    for v in sorted(g.vertices):
        shape = "box" if v in ins else "circle"
        extra = ", peripheries=2" if v in outs else ""
        lines.append(f"  {_quote(v)} [label={_quote(names.get(v, v))}, shape={shape}{extra}];")
    for a, b in sorted(g.edges):
        attr = f" [label={coloring.color[(a, b)]}]" if coloring else ""
        lines.append(f"  {_quote(a)} -- {_quote(b)}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"
