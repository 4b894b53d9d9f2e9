import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import (
    NAMES,
    PAULI_ANGLES,
    brute_force_flows,
    brute_force_paths,
    demo_angles,
    demo_geometry,
    flow_corpus,
    line_geometry,
    random_open_graph,
)
from mbqc_depth.core import Angle, CorrX, CorrZ, Geometry, Meas, Signal
from mbqc_depth.depth import quantum_depth
from mbqc_depth.flow import (
    FlowError,
    characterized_depth,
    check_flow,
    classical_depth,
    depth_upper_bound,
    find_flow,
    flow_from_map,
    flow_pattern,
    influencing_paths,
    flow_word_depth,
    is_reset_sequence,
    recover_flow,
    severs_dependency,
    simplify_word,
    walk_depth,
    word_depth,
    x_dependencies,
)
from mbqc_depth.rewrite import pauli_simplify, signal_shift

A, B, C, D, E, F, G = range(7)
LETTER = {"X": Angle(0), "Y": Angle(1, 2)}


def _demo():
    g = demo_geometry()
    return flow_pattern(g, find_flow(g), demo_angles())


def _pipeline(p):
    q, _ = pauli_simplify(p)
    return signal_shift(q)[0]


def _line(word, generic_ends=True):
    """Line pattern: generic, the Pauli ``word``, generic, then the output."""
    n = len(word)
    g = line_geometry(n + 2)
    angles = {0: Angle.generic("head"), n + 1: Angle.generic("tail")}
    angles.update({k + 1: LETTER[x] for k, x in enumerate(word)})
    return flow_pattern(g, find_flow(g), angles)


# ---------------------------------------------------------------------------
# Flow finding
# ---------------------------------------------------------------------------


def test_demo_flow_and_layers():
    f = find_flow(demo_geometry())
    assert f.map == {A: C, B: D, C: E, D: G}
    assert f.layers == ((A,), (B,), (C, D), (E, F, G))
    assert f.depth == 4


def test_single_edge_flow():
    f = find_flow(Geometry.build([(0, 1)], [0], [1]))
    assert f.map == {0: 1}
    assert f.layers == ((0,), (1,))


def test_triangle_has_no_flow():
    assert find_flow(Geometry.build([(0, 1), (1, 2), (0, 2)], [0], [2])) is None


def test_more_inputs_than_outputs_has_no_flow():
    assert find_flow(Geometry.build([(0, 2), (1, 2)], [0, 1], [2])) is None


def test_all_outputs_is_trivial_flow():
    f = find_flow(Geometry.build([(0, 1)], [0, 1], [0, 1]))
    assert f.map == {}


def test_grid_flow_is_deterministic():
    edges = [(0, 1), (2, 3), (0, 2), (1, 3)]
    g = Geometry.build(edges, [0, 1], [2, 3])
    assert find_flow(g) == find_flow(g)
    assert find_flow(g).map == {0: 2, 1: 3}


def test_check_flow_reports_violations():
    g = demo_geometry()
    assert check_flow(g, {A: C, B: D, C: E, D: G}) == []
    assert check_flow(g, {A: C, B: D, C: F, D: G}) == []
    assert check_flow(g, {A: E, B: D, C: F, D: G})
    with pytest.raises(FlowError):
        flow_from_map(g, {A: E, B: D, C: F, D: G})


@pytest.mark.parametrize("seed", range(6))
def test_find_flow_agrees_with_brute_force(seed):
    rng = random.Random(seed)
    for _ in range(25):
        n = rng.randint(2, 7)
        edges = [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < 0.4]
        k = rng.randint(1, min(3, n - 1))
        vs = rng.sample(range(n), n)
        g = Geometry.build(edges, sorted(vs[:k]), sorted(rng.sample(range(n), k)), range(n))
        flows = brute_force_flows(g)
        f = find_flow(g)
        assert (f is None) == (not flows)
        if f is not None:
            assert f.map in flows
            assert len(flows) == 1


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_found_flow_passes_the_checker(seed):
    g, f = random_open_graph(random.Random(seed), equal=seed % 2 == 0)
    assert check_flow(g, f.map) == []
    layer = f.layer_of()
    for x, y in f.map.items():
        assert layer[x] < layer[y]


# ---------------------------------------------------------------------------
# Flow patterns
# ---------------------------------------------------------------------------


def test_demo_standard_pattern_sequence():
    p = _demo()
    tail = [c for c in p.commands if isinstance(c, (Meas, CorrX, CorrZ))]
    ang = demo_angles()
    assert tail == [
        Meas(A, ang[A]),
        Meas(B, ang[B], Signal(), Signal([A])),
        Meas(C, ang[C], Signal([A])),
        Meas(D, ang[D], Signal([B])),
        CorrX(E, Signal([C])),
        CorrZ(E, Signal([A])),
        CorrZ(F, Signal([A])),
        CorrZ(F, Signal([B])),
        CorrX(G, Signal([D])),
        CorrZ(G, Signal([B])),
    ]


def test_recover_flow_round_trip():
    for g, f, angles in flow_corpus(5, 30):
        assert recover_flow(flow_pattern(g, f, angles)).map == f.map


# ---------------------------------------------------------------------------
# Influencing paths
# ---------------------------------------------------------------------------


def test_demo_influencing_paths():
    g = demo_geometry()
    paths = influencing_paths(g, find_flow(g))
    assert {p.name(NAMES) for p in paths} == {"ace", "acf", "acbdf", "acbdg"}


def test_cluster_paths_match_brute_force():
    edges = []
    for r in range(3):
        for c in range(3):
            v = 3 * r + c
            if c < 2:
                edges.append((v, v + 1))
            if r < 2:
                edges.append((v, v + 3))
    g = Geometry.build(edges, [0, 3, 6], [2, 5, 8])
    f = find_flow(g)
    got = {p.vertices for p in influencing_paths(g, f, maximal=False)}
    assert got == brute_force_paths(g, f.map)


def test_corpus_paths_match_brute_force():
    for g, f, _ in flow_corpus(3, 60):
        got = {p.vertices for p in influencing_paths(g, f, maximal=False)}
        assert got == brute_force_paths(g, f.map)


# ---------------------------------------------------------------------------
# Reset sequences and words
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "word, expected",
    [("X", True), ("XYX", True), ("XXX", True), ("XYXXX", True), ("XX", False), ("Y", False), ("XYYX", False), ("", False)],
)
def test_reset_sequence_examples(word, expected):
    assert is_reset_sequence(word) is expected


def test_reset_sequence_rejects_non_pauli():
    with pytest.raises(ValueError):
        is_reset_sequence("XNX")


@pytest.mark.parametrize("n", range(1, 9))
def test_reset_block_removes_the_x_dependency(n):
    """Between two generic measurements joined by flow edges, a reset block
    leaves the later one free of the earlier one once rewriting is done."""
    for w in itertools.product("XY", repeat=n):
        if not is_reset_sequence(w):
            continue
        q = _pipeline(_line(w))
        assert 0 not in q.measurements()[n + 1].s


@pytest.mark.parametrize("word, expected", [("X", True), ("YY", True), ("XYX", True), ("Y", False), ("XX", False), ("XY", False)])
def test_severing_examples(word, expected):
    assert severs_dependency(word) is expected


@pytest.mark.parametrize("n", range(1, 9))
def test_severing_is_exact_on_lines(n):
    for w in itertools.product("XY", repeat=n):
        if is_reset_sequence(w):
            assert severs_dependency(w)
        q = _pipeline(_line(w))
        assert (0 not in q.measurements()[n + 1].s) == severs_dependency(w)


def test_flow_word_depth_examples():
    assert flow_word_depth("N") == 2
    assert flow_word_depth("NN") == 3
    assert flow_word_depth("NXN") == 3
    assert flow_word_depth("NXNYYN") == 3
    assert flow_word_depth("NNNXNN") == 5
    assert flow_word_depth("XYX") == 2


def test_word_simplification_and_depth():
    assert simplify_word("NXN") == "N/XN"
    assert word_depth("N/XN") == 3
    assert simplify_word("NXXN") == "NN"
    assert word_depth("NN") == 3
    assert word_depth("XX") == 2
    assert word_depth("N") == 2


# ---------------------------------------------------------------------------
# Characterized depth
# ---------------------------------------------------------------------------


def test_demo_characterized_depth():
    report = characterized_depth(_demo())
    assert report.characterized_depth == 3
    assert report.walk_depth == 3
    assert report.flow_depth == 4
    assert quantum_depth(_pipeline(_demo())) == 3


def test_all_pauli_pattern_has_depth_two():
    g = demo_geometry()
    p = flow_pattern(g, find_flow(g), {v: Angle(0) for v in range(4)})
    assert characterized_depth(p).characterized_depth == 2
    assert quantum_depth(_pipeline(p)) == 2


@pytest.mark.parametrize("n", range(0, 7))
def test_line_words_match_rewritten_depth(n):
    for w in itertools.product("XYN", repeat=n):
        g = line_geometry(n + 1)
        angles = {k: Angle.generic(f"l{k}") if x == "N" else LETTER[x] for k, x in enumerate(("N",) + w)}
        p = flow_pattern(g, find_flow(g), angles)
        want = quantum_depth(_pipeline(p))
        assert characterized_depth(p).characterized_depth == want, w


@pytest.mark.parametrize("seed", [21, 22])
def test_corpus_characterized_depth_matches_rewriting(seed):
    for g, f, angles in flow_corpus(seed, 150):
        p = flow_pattern(g, f, angles)
        want = quantum_depth(_pipeline(p))
        report = characterized_depth(p, f)
        assert report.characterized_depth == want
        assert walk_depth(g, f, angles) == want


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_x_dependencies_predict_rewritten_domains(seed):
    rng = random.Random(seed)
    g, f = random_open_graph(rng, equal=seed % 2 == 0)
    angles = {v: rng.choice(PAULI_ANGLES + [Angle.generic(f"r{v}")] * 4) for v in g.non_outputs}
    q = _pipeline(flow_pattern(g, f, angles))
    deps = x_dependencies(g, f, angles)
    for v, m in q.measurements().items():
        assert set(m.s) == deps[v]
        assert not m.t


# ---------------------------------------------------------------------------
# Upper bound and classical depth
# ---------------------------------------------------------------------------


def test_upper_bound_examples():
    assert depth_upper_bound(_demo()) == 3
    j = flow_pattern(Geometry.build([(0, 1)], [0], [1]), find_flow(Geometry.build([(0, 1)], [0], [1])), {0: Angle(1, 4)})
    assert depth_upper_bound(j) == 2


@pytest.mark.parametrize("seed", [31, 32])
def test_upper_bound_dominates_characterized_depth(seed):
    for g, f, angles in flow_corpus(seed, 120):
        p = flow_pattern(g, f, angles)
        assert depth_upper_bound(p, f) >= characterized_depth(p, f).characterized_depth


def test_classical_depth_examples():
    assert classical_depth(_demo()) == 0
    shifted, _ = signal_shift(_demo())
    assert classical_depth(shifted, G) == 1
    assert classical_depth(shifted, A) == 0
    assert classical_depth(shifted) == 2


def test_classical_cost_is_log_of_domain():
    for g, f, angles in flow_corpus(41, 40):
        q = _pipeline(flow_pattern(g, f, angles))
        for m in q.measurements().values():
            k = len(m.s) + len(m.t)
            assert classical_depth(q, m.qubit) == (0 if k <= 1 else (k - 1).bit_length())
