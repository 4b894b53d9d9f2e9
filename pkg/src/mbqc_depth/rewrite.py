"""Standardization, signal shifting and Pauli simplification.

All three systems work on the execution-order command list and record a
:class:`RewriteTrace` that :func:`replay` can re-apply step by step.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    Command,
    CorrX,
    CorrZ,
    Ent,
    Meas,
    Pattern,
    PatternError,
    PauliClass,
    Prep,
    Shift,
    Signal,
    is_standard,
    validate_pattern,
)

__all__ = [
    "RewriteStep",
    "RewriteTrace",
    "standardize",
    "signal_shift",
    "pauli_simplify",
    "replay",
]


@dataclass(frozen=True)
class RewriteStep:
    """One rule application.

    ``before`` is the index the rule fired at (the left command of the
    rewritten pair); ``after`` is where the moved or merged command ends up.
    For ``substitute`` steps ``source`` names the shifted qubit and ``signal``
    the signal it was shifted by.
    """

    rule: str
    before: int
    after: int
    source: int | None = None
    signal: Signal | None = None


@dataclass(frozen=True)
class RewriteTrace:
    steps: tuple = ()

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def rules(self) -> list[str]:
        return [s.rule for s in self.steps]


def _require_valid(p: Pattern) -> None:
    report = validate_pattern(p)
    if not report.ok:
        raise PatternError(f"invalid pattern: {report.violations[0]}")


def _require_standard(p: Pattern) -> None:
    _require_valid(p)
    if not is_standard(p):
        raise PatternError("pattern is not in standard form")


# ---------------------------------------------------------------------------
# Standardization
# ---------------------------------------------------------------------------

_RANK = {Prep: 0, Ent: 1, Meas: 2, CorrX: 3, CorrZ: 3}


def _rewrite_pair(a: Command, b: Command) -> tuple[str, list[Command], int]:
    """Rewrite the out-of-order pair ``a, b`` (``a`` executed first).

    Returns the rule name, the replacement commands and the offset of the
    moved command ``a`` inside the replacement.
    """
    if isinstance(a, (CorrX, CorrZ)):
        if isinstance(b, Ent) and a.qubit in b.qubits:
            if isinstance(a, CorrX):
                other = b.j if a.qubit == b.i else b.i
                return "EX", [b, CorrZ(other, a.s), a], 2
            return "EZ", [b, a], 1
        if isinstance(b, Meas) and b.qubit == a.qubit:
            if isinstance(a, CorrX):
                return "MX", [Meas(b.qubit, b.angle, b.s + a.s, b.t)], 0
            return "MZ", [Meas(b.qubit, b.angle, b.s, b.t + a.s)], 0
    return "commute", [b, a], 1


def _first_disorder(cmds: list[Command], start: int) -> int:
    for k in range(max(start, 0), len(cmds) - 1):
        if _RANK[type(cmds[k])] > _RANK[type(cmds[k + 1])]:
            return k
    return -1


def standardize(p: Pattern) -> tuple[Pattern, RewriteTrace]:
    """Bring ``p`` to N-E-M-C order with the leftmost-first strategy.

    Every step rewrites the leftmost adjacent pair that is out of order; at
    most one of the four rules or free commutation applies to such a pair.
    """
    _require_valid(p)
    if any(isinstance(c, Shift) for c in p.commands):
        raise PatternError("standardize does not accept shift commands")
    cmds = list(p.commands)
    steps: list[RewriteStep] = []
    k = _first_disorder(cmds, 0)
    while k >= 0:
        rule, repl, offset = _rewrite_pair(cmds[k], cmds[k + 1])
        cmds[k : k + 2] = repl
        steps.append(RewriteStep(rule, k, k + offset))
        k = _first_disorder(cmds, k - 1)
    return p.with_commands(cmds), RewriteTrace(tuple(steps))


# ---------------------------------------------------------------------------
# Signal shifting
# ---------------------------------------------------------------------------


def _substituted(cmd: Command, qubit: int, t: Signal) -> Command:
    if isinstance(cmd, Meas):
        return Meas(cmd.qubit, cmd.angle, cmd.s.substitute(qubit, t), cmd.t.substitute(qubit, t))
    if isinstance(cmd, CorrX):
        return CorrX(cmd.qubit, cmd.s.substitute(qubit, t))
    if isinstance(cmd, CorrZ):
        return CorrZ(cmd.qubit, cmd.s.substitute(qubit, t))
    return cmd


def _tidy_corrections(cmds: list[Command], steps: list[RewriteStep]) -> None:
    """Merge adjacent same-kind corrections on one qubit, drop empty ones."""
    k = 0
    while k < len(cmds) - 1:
        a, b = cmds[k], cmds[k + 1]
        if isinstance(a, (CorrX, CorrZ)) and type(a) is type(b) and a.qubit == b.qubit:
            cmds[k : k + 2] = [type(a)(a.qubit, a.s + b.s)]
            steps.append(RewriteStep("merge", k + 1, k))
        else:
            k += 1
    k = 0
    while k < len(cmds):
        c = cmds[k]
        if isinstance(c, (CorrX, CorrZ)) and not c.s:
            del cmds[k]
            steps.append(RewriteStep("drop", k, k))
        else:
            k += 1


def signal_shift(p: Pattern) -> tuple[Pattern, RewriteTrace]:
    """Move every Z-dependency of a measurement into later signals.

    Measurements are processed in execution order.  ``M(s, t)`` on qubit
    ``i`` becomes ``M(s)`` and each later occurrence of ``s_i`` becomes
    ``s_i + t``; the shift command itself is dropped once propagated.  When
    anything was shifted, adjacent corrections of one kind on one qubit are
    merged and corrections left with an empty signal are removed.
    """
    _require_standard(p)
    cmds = list(p.commands)
    steps: list[RewriteStep] = []
    for k, cmd in enumerate(cmds):
        if not isinstance(cmd, Meas) or not cmd.t:
            continue
        i, t = cmd.qubit, cmd.t
        cmds[k] = Meas(i, cmd.angle, cmd.s)
        steps.append(RewriteStep("shift", k, k, i, t))
        for j in range(k + 1, len(cmds)):
            new = _substituted(cmds[j], i, t)
            if new != cmds[j]:
                cmds[j] = new
                steps.append(RewriteStep("substitute", j, j, i, t))
    if steps:
        _tidy_corrections(cmds, steps)
    return p.with_commands(cmds), RewriteTrace(tuple(steps))


# ---------------------------------------------------------------------------
# Pauli simplification
# ---------------------------------------------------------------------------


def pauli_simplify(p: Pattern) -> tuple[Pattern, RewriteTrace]:
    """Drop X-dependencies of X-type measurements; turn them into Z-dependencies for Y-type ones."""
    _require_standard(p)
    cmds = list(p.commands)
    steps: list[RewriteStep] = []
    for k, cmd in enumerate(cmds):
        if not isinstance(cmd, Meas) or not cmd.s:
            continue
        kind = cmd.angle.pauli
        if kind is PauliClass.X:
            cmds[k] = Meas(cmd.qubit, cmd.angle, Signal(), cmd.t)
            steps.append(RewriteStep("X-rule", k, k))
        elif kind is PauliClass.Y:
            cmds[k] = Meas(cmd.qubit, cmd.angle, Signal(), cmd.t + cmd.s)
            steps.append(RewriteStep("Y-rule", k, k))
    return p.with_commands(cmds), RewriteTrace(tuple(steps))


# ---------------------------------------------------------------------------
# Replay
# ---------------------------------------------------------------------------


def replay(p: Pattern, trace: RewriteTrace) -> Pattern:
    """Re-apply a recorded trace to ``p``; equals the rewrite's own output."""
    cmds = list(p.commands)
    for st in trace.steps:
        k = st.before
        if st.rule in ("EX", "EZ", "MX", "MZ", "commute"):
            rule, repl, _ = _rewrite_pair(cmds[k], cmds[k + 1])
            if rule != st.rule:
                raise PatternError(f"trace expects {st.rule} at {k}, found {rule}")
            cmds[k : k + 2] = repl
        elif st.rule == "shift":
            c = cmds[k]
            cmds[k] = Meas(c.qubit, c.angle, c.s)
        elif st.rule == "substitute":
            cmds[k] = _substituted(cmds[k], st.source, st.signal)
        elif st.rule == "merge":
            a, b = cmds[k - 1], cmds[k]
            cmds[k - 1 : k + 1] = [type(a)(a.qubit, a.s + b.s)]
        elif st.rule == "drop":
            del cmds[k]
        elif st.rule == "X-rule":
            c = cmds[k]
            cmds[k] = Meas(c.qubit, c.angle, Signal(), c.t)
        elif st.rule == "Y-rule":
            c = cmds[k]
            cmds[k] = Meas(c.qubit, c.angle, Signal(), c.t + c.s)
        else:
            raise PatternError(f"unknown rule {st.rule!r}")
    return p.with_commands(cmds)
