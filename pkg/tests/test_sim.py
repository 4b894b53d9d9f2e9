import math
import random

import numpy as np
import pytest

from helpers import dense_unitary, demo_angles, demo_geometry, flow_corpus, j_matrix_oracle, random_source_circuit
from mbqc_depth import sim
from mbqc_depth.core import (
    Angle,
    Circuit,
    CorrX,
    CorrZ,
    CXgate,
    CZgate,
    Ent,
    Hgate,
    Jgate,
    Meas,
    Pattern,
    Prep,
    Signal,
    ZPhase,
)
from mbqc_depth.flow import find_flow, flow_pattern

TELEPORT = Pattern(
    {0, 1, 2},
    (0,),
    (2,),
    (
        Prep(1),
        Prep(2),
        Ent(0, 1),
        Ent(1, 2),
        Meas(0, Angle(0)),
        Meas(1, Angle(0)),
        CorrX(2, Signal([1])),
        CorrZ(2, Signal([0])),
    ),
)


def _j_pattern(angle):
    return Pattern({0, 1}, (0,), (1,), (Prep(1), Ent(0, 1), Meas(0, -angle), CorrX(1, Signal([0]))))


# ---------------------------------------------------------------------------
# Gates and circuits
# ---------------------------------------------------------------------------


def test_j_zero_is_hadamard():
    assert np.allclose(sim.j_matrix(Angle(0)), sim.H)


def test_j_half_pi_is_h_times_phase():
    expected = sim.H @ np.diag([1, 1j])
    assert np.allclose(sim.j_matrix(Angle(1, 2)), expected)


@pytest.mark.parametrize("angle", [Angle(1, 4), Angle(3, 8), Angle(5, 3)])
def test_j_matrix_matches_oracle(angle):
    assert np.allclose(sim.j_matrix(angle), j_matrix_oracle(angle.radians))


def test_double_cz_is_identity():
    u = sim.circuit_unitary(Circuit(2, [CZgate(0, 1), CZgate(0, 1)]))
    assert np.allclose(u, np.eye(4))


@pytest.mark.parametrize("seed", range(5))
def test_circuit_unitary_matches_kronecker_oracle(seed):
    rng = random.Random(seed)
    for _ in range(8):
        c = random_source_circuit(rng, rng.randint(1, 4), rng.randint(0, 12))
        assert np.allclose(sim.circuit_unitary(c), dense_unitary(c), atol=1e-10)


def test_target_gates_match_oracle():
    c = Circuit(3, [Hgate(0), CXgate(0, 2), ZPhase(1, Angle(1, 3)), CZgate(1, 2), Hgate(2)], "target")
    assert np.allclose(sim.circuit_unitary(c), dense_unitary(c))


def test_simulate_circuit_without_ancillas_is_the_unitary():
    c = random_source_circuit(random.Random(3), 3, 10)
    assert np.allclose(sim.simulate_circuit(c), sim.circuit_unitary(c))


def test_simulate_postselects_extra_wires():
    c = Circuit(2, [Hgate(1), CXgate(1, 0)], "target")
    m = sim.simulate_circuit(c, inputs=[0], outputs=[0], postselect={1: 1})
    assert np.allclose(m, np.array([[0, 1], [1, 0]]) / math.sqrt(2))


@pytest.mark.parametrize("seed", range(4))
def test_early_postselection_matches_plain(seed):
    rng = random.Random(seed)
    for _ in range(6):
        n = rng.randint(2, 5)
        gates = []
        for _ in range(rng.randint(1, 12)):
            k = rng.random()
            if k < 0.3:
                gates.append(Hgate(rng.randrange(n)))
            elif k < 0.5:
                gates.append(ZPhase(rng.randrange(n), Angle(rng.randint(1, 7), 4)))
            else:
                a, b = rng.sample(range(n), 2)
                gates.append((CXgate if k < 0.75 else CZgate)(a, b))
        c = Circuit(n, gates, "target")
        ins = [0]
        outs = [n - 1]
        bits = {w: rng.randrange(2) for w in range(n) if w not in outs}
        plain = sim.simulate_circuit(c, ins, outs, postselect=bits)
        early = sim.simulate_circuit(c, ins, outs, postselect=bits, early=True)
        assert np.allclose(plain, early, atol=1e-12)


def test_size_cap_raises():
    with pytest.raises(sim.SizeError):
        sim.simulate_circuit(Circuit(5, [Hgate(q) for q in range(5)], "target"), cap=3)


# ---------------------------------------------------------------------------
# Patterns
# ---------------------------------------------------------------------------


def test_teleportation_branch_zero_is_identity_with_quarter_probability():
    r = sim.run_pattern_branch(TELEPORT, [0, 0])
    assert r.outcome == "00"
    assert math.isclose(r.probability, 0.25)
    assert sim.equiv_up_to_phase(r.map * 2, np.eye(2))


def test_teleportation_branches_sum_to_one():
    results = sim.branches(TELEPORT)
    assert [r.outcome for r in results] == ["00", "01", "10", "11"]
    assert math.isclose(sum(r.probability for r in results), 1.0)
    for r in results:
        assert sim.equiv_up_to_phase(r.map * 2, np.eye(2))


@pytest.mark.parametrize("angle", [Angle(0), Angle(1, 4), Angle(1, 2), Angle(5, 8)])
def test_j_pattern_implements_j(angle):
    p = _j_pattern(angle)
    for r in sim.branches(p):
        assert math.isclose(r.probability, 0.5)
    assert sim.equiv_up_to_phase(sim.pattern_operator(p), sim.j_matrix(angle))


def test_demo_pattern_is_uniformly_deterministic():
    g = demo_geometry()
    rep = sim.check_determinism(flow_pattern(g, find_flow(g), demo_angles()))
    assert rep.deterministic and rep.strong and rep.uniform
    assert rep.witness is None


def test_deleting_a_correction_breaks_determinism():
    p = _j_pattern(Angle(1, 4))
    broken = p.with_commands(p.commands[:-1])
    rep = sim.check_determinism(broken)
    assert not rep.deterministic
    assert rep.witness == ("0", "1")


@pytest.mark.parametrize("seed", range(3))
def test_flow_patterns_are_deterministic(seed):
    for g, f, angles in flow_corpus(300 + seed, 10):
        assert sim.check_determinism(flow_pattern(g, f, angles)).uniform


def test_equiv_up_to_phase():
    a = np.array([[1, 0], [0, 1j]])
    assert sim.equiv_up_to_phase(a, np.exp(0.7j) * a)
    assert not sim.equiv_up_to_phase(a, 2 * a)
    assert not sim.equiv_up_to_phase(a, np.eye(2))
    assert sim.equiv_up_to_phase(np.zeros((2, 2)), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        sim.equiv_up_to_phase(np.eye(2), np.eye(4))


def test_resampling_keeps_signals():
    p = _j_pattern(Angle(1, 4))
    q = sim.resample_angles(p, random.Random(1))
    (m,) = [c for c in q.commands if isinstance(c, Meas)]
    assert m.angle.pauli.value == "N"
    assert [type(c) for c in q.commands] == [type(c) for c in p.commands]


def test_pattern_operator_of_circuit_pattern():
    c = Circuit(2, [Jgate(0, Angle(1, 4)), CZgate(0, 1), Jgate(1, Angle(1, 3))])
    from mbqc_depth.translate import circuit_to_pattern

    p, _, _ = circuit_to_pattern(c)
    assert sim.equiv_up_to_phase(sim.pattern_operator(p), sim.circuit_unitary(c))
