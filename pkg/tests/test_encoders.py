import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from corpus import connected_corpus, is_biconnected, st_choice
from gridsat.boxes import BoxConsistencyError
from gridsat.cnf import CapacityError
from gridsat.encoders import (
    EncodingError,
    decode_bandwidth,
    decode_boxicity,
    decode_layout2d,
    decode_orientation,
    decode_pathwidth,
    encode_bandwidth,
    encode_bar_k_visibility,
    encode_bar_visibility,
    encode_boxicity,
    encode_pathwidth,
    encode_st_orientation,
)
from gridsat.graph import Graph, complete_graph, cycle_graph, path_graph
from gridsat.solver import Status, solve
from gridsat.verify import (
    verify_bandwidth,
    verify_bar_visibility,
    verify_boxicity,
    verify_pathwidth,
    verify_st_orientation,
)

SMALL = connected_corpus(count=40, max_n=6, seed=99)


def run(enc):
    res = solve(enc.formula)
    assert res.status is not Status.TIMEOUT
    return res


def sat(enc):
    return run(enc).status is Status.SAT


# --- pathwidth ---------------------------------------------------------------

@pytest.mark.parametrize("g,p,expected", [
    (complete_graph(4), 2, False),
    (complete_graph(4), 3, True),
    (path_graph(5), 1, True),
    (cycle_graph(5), 1, False),
    (cycle_graph(5), 2, True),
])
def test_pathwidth_examples(g, p, expected):
    enc = encode_pathwidth(g, p)
    res = run(enc)
    assert (res.status is Status.SAT) == expected
    if expected:
        assert verify_pathwidth(g, decode_pathwidth(enc, res.assignment), p)


def test_pathwidth_tiny_graphs():
    single = Graph.from_edges(1, [])
    enc = encode_pathwidth(single, 0)
    assert decode_pathwidth(enc, run(enc).assignment).intervals == {0: (1, 1)}
    edge = path_graph(2)
    enc = encode_pathwidth(edge, 1)
    lay = decode_pathwidth(enc, run(enc).assignment)
    (a0, a1), (b0, b1) = lay.intervals[0], lay.intervals[1]
    assert max(a0, b0) <= min(a1, b1)


@pytest.mark.parametrize("g,p,nvars,nclauses", [
    (path_graph(4), 1, 60, 135),
    (cycle_graph(5), 2, 100, 245),
    (complete_graph(4), 3, 72, 146),
])
def test_pathwidth_golden_counts(g, p, nvars, nclauses):
    enc = encode_pathwidth(g, p)
    assert (enc.num_vars, enc.num_clauses) == (nvars, nclauses)


def test_pathwidth_guard_names_constraint():
    with pytest.raises(CapacityError) as err:
        encode_pathwidth(complete_graph(30), 10, clause_limit=10_000)
    assert err.value.constraint == "width"


# --- bandwidth ---------------------------------------------------------------

@pytest.mark.parametrize("g,k,expected", [
    (path_graph(6), 1, True),
    (complete_graph(4), 2, False),
    (complete_graph(4), 3, True),
    (cycle_graph(5), 1, False),
    (cycle_graph(5), 2, True),
])
def test_bandwidth_examples(g, k, expected):
    enc = encode_bandwidth(g, k)
    res = run(enc)
    assert (res.status is Status.SAT) == expected
    if expected:
        assert verify_bandwidth(g, decode_bandwidth(enc, res.assignment), k)


# --- st-orientation ----------------------------------------------------------

def test_st_triangle():
    g = complete_graph(3)
    assert not sat(encode_st_orientation(g, 0, 2, 2))
    enc = encode_st_orientation(g, 0, 2, 3)
    res = run(enc)
    orient = decode_orientation(enc, res.assignment)
    assert sorted(orient.levels.values()) == [1, 2, 3]
    assert verify_st_orientation(g, orient, 0, 2, 3)


def test_st_k4_needs_four_levels():
    g = complete_graph(4)
    assert not sat(encode_st_orientation(g, 0, 3, 3))
    assert sat(encode_st_orientation(g, 0, 3, 4))


def test_st_chord_cycle():
    # s=0, a=1, t=2, b=3; cycle s-a-t-b-s plus chord s-t
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
    assert not sat(encode_st_orientation(g, 0, 2, 2))
    enc = encode_st_orientation(g, 0, 2, 3)
    res = run(enc)
    orient = decode_orientation(enc, res.assignment)
    assert verify_st_orientation(g, orient, 0, 2, 3)
    assert orient.arcs[(0, 2)] == (0, 2)


def test_st_errors():
    with pytest.raises(EncodingError):
        encode_st_orientation(complete_graph(3), 1, 1, 3)
    with pytest.raises(EncodingError, match="edge"):
        encode_st_orientation(path_graph(3), 0, 2, 3)


# --- bar visibility ----------------------------------------------------------

def test_bar_visibility_single_edge():
    g = path_graph(2)
    enc = encode_bar_visibility(g, 2, 1)
    lay = decode_layout2d(enc, run(enc).assignment)
    assert verify_bar_visibility(g, lay, 0)
    assert {lay.vertex_bars[0][0], lay.vertex_bars[1][0]} == {1, 2}
    assert lay.edge_bars[(0, 1)] == (1, 1, 2)


def test_bar_visibility_k4_width_sweep():
    g = complete_graph(4)
    found = None
    for w in range(1, 5):
        enc = encode_bar_visibility(g, 4, w)
        res = run(enc)
        if res.status is Status.SAT:
            lay = decode_layout2d(enc, res.assignment)
            assert verify_bar_visibility(g, lay, 0)
            found = w
            break
    assert found is not None and found >= 2


def test_bar_shapes_are_degenerate():
    g = cycle_graph(4)
    enc = encode_bar_visibility(g, 4, 4)
    lay = decode_layout2d(enc, run(enc).assignment)
    for r, c0, c1 in lay.vertex_bars.values():
        assert 1 <= r <= 4 and 1 <= c0 <= c1 <= 4
    for c, r0, r1 in lay.edge_bars.values():
        assert 1 <= c <= 4 and r0 < r1


def test_bar_visibility_without_endpoint_clauses():
    g = cycle_graph(4)
    loose = encode_bar_visibility(g, 4, 4, endpoints=False)
    tight = encode_bar_visibility(g, 4, 4)
    assert loose.num_clauses < tight.num_clauses
    lay = decode_layout2d(loose, run(loose).assignment)
    assert verify_bar_visibility(g, lay, 0)


def test_bar_k_visibility_path():
    g = path_graph(3)
    enc = encode_bar_k_visibility(g, 3, 1, 1)
    lay = decode_layout2d(enc, run(enc).assignment)
    assert verify_bar_visibility(g, lay, 1)
    with pytest.raises(EncodingError):
        encode_bar_k_visibility(g, 3, 1, 0)


def test_bar_k_visibility_k5_small_widths_are_verified():
    g = complete_graph(5)
    for w in range(1, 4):
        enc = encode_bar_k_visibility(g, 5, w, 1)
        res = run(enc)
        if res.status is Status.SAT:
            assert verify_bar_visibility(g, decode_layout2d(enc, res.assignment), 1)


def test_bar_k_guard_names_crossing_constraint():
    with pytest.raises(CapacityError) as err:
        encode_bar_k_visibility(path_graph(2), 8, 8, 3, clause_limit=1000)
    assert err.value.constraint == "crossing-budget"


# --- boxicity ----------------------------------------------------------------

def test_boxicity_examples():
    k3 = complete_graph(3)
    enc = encode_boxicity(k3, 1, 3)
    assert verify_boxicity(k3, decode_boxicity(enc, run(enc).assignment), 1)
    c4 = cycle_graph(4)
    assert not sat(encode_boxicity(c4, 1, 4))
    enc = encode_boxicity(c4, 2, 4)
    lay = decode_boxicity(enc, run(enc).assignment)
    assert verify_boxicity(c4, lay, 2)


def test_boxicity_isolated_vertex_gets_box():
    g = Graph.from_edges(3, [(0, 1)])
    enc = encode_boxicity(g, 2, 3)
    lay = decode_boxicity(enc, run(enc).assignment)
    assert set(lay.boxes) == {0, 1, 2}
    assert verify_boxicity(g, lay, 2)


# --- corpus-wide soundness and monotonicity ---------------------------------

@pytest.mark.parametrize("g", SMALL, ids=[g.name for g in SMALL])
def test_monotone_and_sound_on_corpus(g):
    n = g.n
    prev = False
    for p in range(0, n):
        enc = encode_pathwidth(g, p)
        res = run(enc)
        ok = res.status is Status.SAT
        assert not (prev and not ok), f"pathwidth not monotone at {p}"
        if ok:
            assert verify_pathwidth(g, decode_pathwidth(enc, res.assignment), p)
        prev = ok
    prev = False
    for k in range(1, n):
        enc = encode_bandwidth(g, k)
        res = run(enc)
        ok = res.status is Status.SAT
        assert not (prev and not ok), f"bandwidth not monotone at {k}"
        if ok:
            assert verify_bandwidth(g, decode_bandwidth(enc, res.assignment), k)
        prev = ok
    if is_biconnected(g) and n >= 3:
        s, t = st_choice(g, seed=5)
        h = g if g.has_edge(s, t) else g.with_edge(s, t)
        prev = False
        for k in range(2, n + 1):
            enc = encode_st_orientation(h, s, t, k)
            res = run(enc)
            ok = res.status is Status.SAT
            assert not (prev and not ok), f"st levels not monotone at {k}"
            if ok:
                assert verify_st_orientation(h, decode_orientation(enc, res.assignment), s, t, k)
            prev = ok
    prev = False
    for side in range(1, n + 1):
        enc = encode_boxicity(g, 2, side)
        res = run(enc)
        ok = res.status is Status.SAT
        assert not (prev and not ok), f"boxicity side not monotone at {side}"
        if ok:
            assert verify_boxicity(g, decode_boxicity(enc, res.assignment), 2)
        prev = ok


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.sampled_from(SMALL), st.integers(1, 4))
def test_bar_zero_solutions_survive_k1(g, width):
    enc0 = encode_bar_visibility(g, g.n, width)
    res0 = run(enc0)
    if res0.status is not Status.SAT:
        return
    lay = decode_layout2d(enc0, res0.assignment)
    assert verify_bar_visibility(g, lay, 0) and verify_bar_visibility(g, lay, 1)
    assert sat(encode_bar_k_visibility(g, g.n, width, 1))


def test_decoder_rejects_broken_model():
    g = path_graph(2)
    enc = encode_bar_visibility(g, 2, 1)
    values = list(run(enc).assignment)
    bv = enc.boxes[("v", 0)]
    for var in bv.x.values():
        values[var] = True
    for var in bv.begin[0]:
        values[var] = True
    with pytest.raises(BoxConsistencyError):
        decode_layout2d(enc, values)
