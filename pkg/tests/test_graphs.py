import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from liftspec.errors import DepthTooLarge, IndexOutOfRange
from liftspec.graphs import (canonical_edge, ColoredGraph, build_colored_graph,
                             ball, ball_excess, is_tangle_free, count_cycles,
                             local_moment)
from liftspec.freelimit import free_moment
from liftspec.lift import LiftOperator
from liftspec.model import PermutationFamily, canonical_star, sample_symmetric
from liftspec.presets import regular_weight_system

from test_lift import random_symmetric_system


def triangle_family():
    return PermutationFamily(n=3, q=1, perms=np.array([[1, 2, 0], [2, 0, 1]]))


@given(x=st.integers(0, 9), y=st.integers(0, 9), c=st.integers(0, 5),
       q=st.integers(0, 2))
def test_canonical_edge_identifies_both_orientations(x, y, c, q):
    star = canonical_star(q, 6)
    e = canonical_edge(x, c, y, star)
    assert e == canonical_edge(y, star[c], x, star)
    assert e == canonical_edge(*e, star)


def test_colored_graph_rejects_bad_input():
    star = (1, 0)
    with pytest.raises(IndexOutOfRange):
        ColoredGraph(n=2, d=2, star=(0, 2), edges=())
    with pytest.raises(IndexOutOfRange):
        ColoredGraph(n=2, d=2, star=star, edges=((1, 0, 0),))
    with pytest.raises(IndexOutOfRange):
        ColoredGraph(n=2, d=2, star=star, edges=((0, 0, 1), (0, 0, 1)))
    with pytest.raises(IndexOutOfRange):
        ColoredGraph(n=2, d=2, star=star, edges=((0, 0, 5),))


@settings(deadline=None, max_examples=40)
@given(q=st.integers(0, 2), extra=st.integers(0, 2), half=st.integers(2, 15),
       seed=st.integers(0, 50))
def test_edge_class_count(q, extra, half, seed):
    d = 2 * q + extra
    if d == 0:
        return
    n = 2 * half
    pf = sample_symmetric(n, q, d, seed)
    g = build_colored_graph(pf)
    assert g.num_edges == n * q + n * extra // 2


def test_triangle_cycle_census():
    g = build_colored_graph(triangle_family())
    assert g.num_edges == 3
    counts = count_cycles(g, max_len=6)
    assert counts == {1: 0, 2: 0, 3: 1, 4: 0, 5: 0, 6: 0}


def test_loop_and_parallel_counts():
    loop = ColoredGraph(n=1, d=1, star=(0,), edges=((0, 0, 0),))
    assert count_cycles(loop, max_len=2) == {1: 1, 2: 0}
    star = (1, 0, 3, 2)
    parallel = ColoredGraph(n=2, d=4, star=star,
                            edges=((0, 0, 1), (0, 2, 1)))
    assert count_cycles(parallel, max_len=3) == {1: 0, 2: 1, 3: 0}


def test_four_cycle_census():
    pf = PermutationFamily(n=4, q=1,
                           perms=np.array([[1, 2, 3, 0], [3, 0, 1, 2]]))
    g = build_colored_graph(pf)
    counts = count_cycles(g, max_len=5)
    assert counts[4] == 1
    assert counts[1] == counts[2] == counts[3] == counts[5] == 0


def test_count_cycles_depth_guard():
    g = build_colored_graph(triangle_family())
    with pytest.raises(DepthTooLarge):
        count_cycles(g, max_len=13)
    with pytest.raises(ValueError):
        count_cycles(g, max_len=0)


def test_ball_and_excess_on_triangle():
    g = build_colored_graph(triangle_family())
    b1 = ball(g, 0, 1)
    assert b1.num_edges == 2
    assert ball_excess(g, 0, 1) == 0
    assert ball(g, 0, 2).num_edges == 3
    assert ball_excess(g, 0, 2) == 1
    assert ball(g, 0, 0).num_edges == 0
    with pytest.raises(IndexOutOfRange):
        ball(g, 3, 1)
    with pytest.raises(IndexOutOfRange):
        ball_excess(g, -1, 1)


def test_tangle_detection_on_shared_vertex_triangles():
    star = (1, 0, 3, 2)
    edges = ((0, 0, 1), (0, 1, 2), (0, 2, 3), (0, 3, 4),
             (1, 0, 2), (3, 2, 4))
    g = ColoredGraph(n=5, d=4, star=star, edges=edges)
    assert ball_excess(g, 0, 2) == 2
    assert is_tangle_free(g, 1)
    assert not is_tangle_free(g, 2)
    assert is_tangle_free(build_colored_graph(triangle_family()), 3)


def test_triangle_count_envelope_for_random_regular():
    # simple cycles of length 3 in a union of 4 random matchings are
    # asymptotically Poisson with mean (d-1)^3 / 6 = 4.5
    total = 0
    for seed in range(20):
        pf = sample_symmetric(300, 0, 4, seed)
        g = build_colored_graph(pf)
        total += count_cycles(g, max_len=3)[3]
    mean = total / 20.0
    assert 2.5 <= mean <= 6.5


def test_local_moment_basics():
    rng = np.random.default_rng(21)
    ws = random_symmetric_system(rng, 2, 1, 2)
    pf = sample_symmetric(12, 1, 4, 5)
    assert local_moment(ws, pf, 0, 0) == 1.0
    with pytest.raises(IndexOutOfRange):
        local_moment(ws, pf, 12, 2)
    with pytest.raises(ValueError):
        local_moment(ws, pf, 0, -1)


def test_mean_local_moment_matches_dense_trace():
    rng = np.random.default_rng(22)
    ws = random_symmetric_system(rng, 2, 1, 2)
    pf = sample_symmetric(8, 1, 4, 9)
    dense = LiftOperator(ws, pf).dense()
    for k in (1, 2, 3, 4):
        mean = np.mean([local_moment(ws, pf, x, k) for x in range(pf.n)])
        want = np.trace(np.linalg.matrix_power(dense, k)).real / (pf.n * ws.r)
        assert mean == pytest.approx(want, abs=1e-9)


def test_local_moment_equals_free_moment_on_acyclic_ball():
    ws = regular_weight_system(4)
    pf = sample_symmetric(200, 2, 4, 3)
    g = build_colored_graph(pf)
    tree_sites = [x for x in range(pf.n) if ball_excess(g, x, 3) == 0]
    assert tree_sites
    x = tree_sites[0]
    for k in range(1, 7):
        assert local_moment(ws, pf, x, k) == pytest.approx(
            free_moment(ws, k), abs=1e-9)


def test_local_moment_differs_inside_short_cycle():
    # on the 3-cycle lift the length-3 walk count is nonzero, unlike on
    # the tree
    ws = regular_weight_system(2)
    pf = triangle_family()
    assert free_moment(ws, 3) == pytest.approx(0.0, abs=1e-12)
    assert local_moment(ws, pf, 0, 3) > 1.0
