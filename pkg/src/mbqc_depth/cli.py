"""Command-line front end.

Every subcommand reads one circuit or pattern file (``-`` for stdin) and
writes either a file in the same text formats or a ``key = value`` report
with sorted keys.  Exit status is 0 on success, 1 when the answer is
negative (no flow, failed verification) and 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from typing import Callable, Sequence

from . import depth as depth_mod
from . import flow as flow_mod
from . import rewrite, sim, translate
from .core import (
    Circuit,
    MeasZ,
    ParseError,
    Pattern,
    PatternError,
    geometry_of,
    is_standard,
    parse_circuit,
    parse_pattern,
    serialize_circuit,
    serialize_pattern,
)

OK, FAIL, USAGE = 0, 1, 2


class CliError(Exception):
    """Input the command cannot work with; reported with exit status 2."""


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _load(path: str) -> tuple[str, Circuit | Pattern, str]:
    text = _read(path)
    first = next((ln.split("#", 1)[0].split() for ln in text.splitlines() if ln.split("#", 1)[0].strip()), [""])
    if first[0] == "circuit":
        return text, parse_circuit(text), "circuit"
    if first[0] == "pattern":
        return text, parse_pattern(text), "pattern"
    raise CliError(f"{path}: expected a 'circuit' or 'pattern' header")


def _pattern(obj, kind: str) -> Pattern:
    if kind != "pattern":
        raise CliError("this command needs a pattern file")
    return obj


def _circuit(obj, kind: str) -> Circuit:
    if kind != "circuit":
        raise CliError("this command needs a circuit file")
    return obj


def _report(args: argparse.Namespace, text: str, values: dict) -> str:
    lines = dict(values)
    lines["command"] = args.command
    lines["input_sha256"] = hashlib.sha256(text.encode()).hexdigest()
    return "".join(f"{k} = {_fmt(v)}\n" for k, v in sorted(lines.items()))


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, tuple)):
        return " ".join(_fmt(x) for x in v)
    return str(v)


def _emit(args: argparse.Namespace, body: str) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)


def _pattern_flow(p: Pattern) -> flow_mod.Flow | None:
    if is_standard(p):
        try:
            return flow_mod.recover_flow(p)
        except (flow_mod.FlowError, PatternError):
            pass
    return flow_mod.find_flow(geometry_of(p))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_translate(args) -> int:
    text, obj, kind = _load(args.input)
    if args.to == "pattern":
        p, _, stats = translate.circuit_to_pattern(_circuit(obj, kind), args.variant)
        body = serialize_pattern(p)
        if args.report:
            body = _report(args, text, stats.items())
    else:
        coh = translate.coherent_circuit(_pattern(obj, kind), args.fanin)
        body = serialize_circuit(coh.circuit)
        if args.report:
            body = _report(
                args,
                text,
                {
                    "ancillas": len(coh.ancillas),
                    "depth": translate.circuit_depth(coh.circuit),
                    "fanins": len(coh.fanins),
                    "inputs": list(coh.inputs),
                    "outputs": list(coh.outputs),
                    "measured": list(coh.measured),
                    "wires": coh.circuit.n,
                },
            )
    _emit(args, body)
    return OK


def _rewriter(fn: Callable) -> Callable:
    def run(args) -> int:
        text, obj, kind = _load(args.input)
        p, trace = fn(_pattern(obj, kind))
        if args.trace:
            _emit(args, "".join(f"{s.rule} {s.before} {s.after}\n" for s in trace))
        else:
            _emit(args, serialize_pattern(p))
        return OK

    return run


def cmd_depth(args) -> int:
    text, obj, kind = _load(args.input)
    p = _pattern(obj, kind)
    wanted = [k for k in ("quantum", "classical", "preparation", "characterized", "bound") if getattr(args, k)]
    wanted = wanted or ["quantum"]
    values: dict = {}
    flow = None
    if {"characterized", "bound"} & set(wanted):
        flow = _pattern_flow(p)
        if flow is None:
            print("NOFLOW", file=sys.stderr)
            return FAIL
    for k in wanted:
        if k == "quantum":
            values[k] = depth_mod.quantum_depth(p)
        elif k == "classical":
            values[k] = flow_mod.classical_depth(p)
        elif k == "preparation":
            values[k] = depth_mod.preparation_depth(geometry_of(p))[0]
        elif k == "characterized":
            values[k] = flow_mod.characterized_depth(p, flow).characterized_depth
        else:
            values[k] = flow_mod.depth_upper_bound(p, flow)
    if len(values) == 1 and not args.report:
        _emit(args, f"{next(iter(values.values()))}\n")
    else:
        _emit(args, _report(args, text, values))
    return OK


def cmd_flow(args) -> int:
    text, obj, kind = _load(args.input)
    g = geometry_of(_pattern(obj, kind))
    f = flow_mod.find_flow(g)
    if f is None:
        _emit(args, "NOFLOW\n")
        return FAIL
    lines = [f"f {a} {b}" for a, b in f.f]
    lines += [f"layer {k} " + " ".join(map(str, layer)) for k, layer in enumerate(f.layers)]
    _emit(args, "\n".join(lines) + "\n")
    return OK


def cmd_paths(args) -> int:
    text, obj, kind = _load(args.input)
    p = _pattern(obj, kind)
    flow = _pattern_flow(p)
    if flow is None:
        print("NOFLOW", file=sys.stderr)
        return FAIL
    report = flow_mod.characterized_depth(p, flow)
    rows = report.paths if args.all else [d for d in report.paths if d.path in set(_maximal(p, flow))]
    out = []
    for d in rows:
        verts = "-".join(map(str, d.path.vertices))
        out.append(f"{verts} word={d.word or '-'} simplified={d.simplified or '-'} depth={d.depth} bound={d.bound}")
    _emit(args, "\n".join(out) + ("\n" if out else ""))
    return OK


def _maximal(p: Pattern, flow) -> list:
    return flow_mod.influencing_paths(geometry_of(p), flow, p.angles(), maximal=True)


def cmd_verify(args) -> int:
    text, obj, kind = _load(args.input)
    _, other, okind = _load(args.against)
    a, b = _operator(obj, kind), _operator(other, okind)
    if a.shape != b.shape:
        print(f"shape mismatch {a.shape} vs {b.shape}", file=sys.stderr)
        return FAIL
    same = sim.equiv_up_to_phase(a, b, args.tol)
    _emit(args, "EQUIVALENT\n" if same else "DIFFERENT\n")
    return OK if same else FAIL


def _operator(obj, kind: str):
    if kind == "pattern":
        return sim.pattern_operator(obj)
    if any(isinstance(g, MeasZ) for g in obj.gates):
        raise CliError("circuits with MZ need their wire layout; verify the pattern instead")
    return sim.circuit_unitary(obj)


def cmd_parallelize(args) -> int:
    text, obj, kind = _load(args.input)
    coh, rep = translate.parallelize_circuit(_circuit(obj, kind), args.fanin)
    if args.report:
        _emit(args, _report(args, text, rep.items()))
    else:
        _emit(args, serialize_circuit(coh.circuit))
    return OK


def cmd_dot(args) -> int:
    text, obj, kind = _load(args.input)
    if kind == "circuit":
        if args.graph != "geometry":
            raise CliError("circuits only have a geometry graph")
        g = translate.labelled_graph(obj).geometry()
    else:
        g = geometry_of(obj)
    if args.graph == "geometry":
        _, coloring = depth_mod.preparation_depth(g)
        body = depth_mod.geometry_dot(g, coloring)
    else:
        body = depth_mod.digraph_dot(depth_mod.execution_digraph(obj))
    _emit(args, body)
    return OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise CliError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mbqc-depth", description="Measurement pattern depth tools.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, fn: Callable, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help)
        sp.add_argument("input", help="circuit or pattern file, or - for stdin")
        sp.add_argument("-o", "--output", help="write here instead of stdout")
        sp.set_defaults(func=fn)
        return sp

    sp = add("translate", cmd_translate, "circuit to pattern, or pattern to coherent circuit")
    sp.add_argument("--to", choices=["pattern", "circuit"], required=True)
    sp.add_argument("--variant", choices=["direct", "cluster"], default="direct")
    sp.add_argument("--fanin", choices=["linear", "tree"], default="tree")
    sp.add_argument("--report", action="store_true", help="print statistics instead of the result")

    for name, fn, help in (
        ("standardize", rewrite.standardize, "bring a pattern to standard form"),
        ("shift", rewrite.signal_shift, "signal-shift a standard pattern"),
        ("simplify", rewrite.pauli_simplify, "drop Pauli-measurement dependencies"),
    ):
        sp = add(name, _rewriter(fn), help)
        sp.add_argument("--trace", action="store_true", help="print the rewrite steps")

    sp = add("depth", cmd_depth, "pattern depth metrics")
    for k in ("quantum", "classical", "preparation", "characterized", "bound"):
        sp.add_argument(f"--{k}", action="store_true")
    sp.add_argument("--report", action="store_true", help="always print a key = value report")

    add("flow", cmd_flow, "find a flow of the pattern's geometry")
    sp = add("paths", cmd_paths, "influencing paths with their angle words")
    sp.add_argument("--all", action="store_true", help="include paths that are suffixes of others")

    sp = add("verify", cmd_verify, "compare operators with the simulator")
    sp.add_argument("--against", required=True)
    sp.add_argument("--tol", type=float, default=sim.EQUIV_TOL)

    sp = add("parallelize", cmd_parallelize, "circuit to pattern and back to a shallow circuit")
    sp.add_argument("--fanin", choices=["linear", "tree"], default="tree")
    sp.add_argument("--report", action="store_true", help="print the depth report instead of the circuit")

    sp = add("dot", cmd_dot, "emit a DOT graph")
    sp.add_argument("--graph", choices=["geometry", "execution"], default="geometry")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return USAGE
    except (PatternError, flow_mod.FlowError, sim.SizeError, flow_mod.PathLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
