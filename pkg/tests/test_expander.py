import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import two_cliques
from nestcyc.expander import (
    FAIL,
    NOT_APPLICABLE,
    PASS,
    ExpanderParams,
    ThinnessParams,
    epsilon,
    expansion_witness_check,
    extract_expander_subgraph,
    find_large_ball_avoiding,
    find_violating_set,
    grow_ball_robust,
    is_thin_around,
    link_sets,
    peel,
    search_violating_set,
)
from nestcyc.generators import complete, cycle_graph, gnp, path_graph, random_regular, rng_for
from nestcyc.graph import GraphError, average_degree, ball, build_graph, degree_stats


def boundary(G, X):
    X = set(X)
    return {w for u in X for w in G.adj[u]} - X


# --- epsilon ---------------------------------------------------------------


def test_epsilon_zero_below_k_over_5():
    assert epsilon(10 / 6, ExpanderParams(0.5, 10)) == 0.0


def test_epsilon_at_k_over_5():
    assert epsilon(2.0, ExpanderParams(1.0, 10)) == pytest.approx(1 / math.log(3) ** 2, abs=1e-12)
    assert epsilon(2.0, ExpanderParams(1.0, 10)) == pytest.approx(0.8286, abs=1e-4)


def test_epsilon_reference_value():
    assert epsilon(100, ExpanderParams(0.5, 10)) == pytest.approx(0.01992, abs=1e-5)


def test_params_validation():
    with pytest.raises(ValueError):
        ExpanderParams(0.0, 1)
    with pytest.raises(ValueError):
        ExpanderParams(0.5, 0)
    assert ExpanderParams.for_degree(0.1, 20).k == pytest.approx(2.0)


@settings(max_examples=50)
@given(st.floats(0.01, 1.0), st.floats(0.5, 50))
def test_epsilon_monotone_grid(eps1, k):
    p = ExpanderParams(eps1, k)
    xs = np.linspace(k / 2, 50 * k, 400)
    e = [epsilon(x, p) for x in xs]
    assert all(a >= b - 1e-12 for a, b in zip(e, e[1:]))
    xe = [x * v for x, v in zip(xs, e)]
    assert all(a <= b + 1e-12 for a, b in zip(xe, xe[1:]))


# --- witness check -----------------------------------------------------------


def test_long_cycle_arc_fails_expansion():
    # with eps1=0.1, k=4 the required boundary is 0.18 < 2, so we use a stricter pair
    C = cycle_graph(100)
    v = expansion_witness_check(C, ExpanderParams(0.5, 40), range(50))
    assert v.status == FAIL
    assert v.boundary == 2
    assert v.required == pytest.approx(50 * 0.5 / math.log(15 * 50 / 40) ** 2)


def test_complete_graph_half_passes():
    v = expansion_witness_check(complete(20), ExpanderParams(0.1, 4), range(10))
    assert v.status == PASS and v.boundary == 10


def test_small_set_not_applicable():
    v = expansion_witness_check(complete(20), ExpanderParams(0.1, 10), [0, 1])
    assert v.status == NOT_APPLICABLE


def test_witness_rejects_foreign_edges():
    with pytest.raises(GraphError):
        expansion_witness_check(cycle_graph(10), ExpanderParams(0.1, 2), [0, 1], F=[(0, 5)])


def test_deleted_edges_shrink_boundary():
    K = complete(10)
    p = ExpanderParams(1.0, 2)
    X = [0, 1]
    full = expansion_witness_check(K, p, X)
    cut = expansion_witness_check(K, p, X, F=[(0, 2), (1, 2)])
    assert full.boundary == 8 and cut.boundary == 7


# --- refutation search -------------------------------------------------------


def test_two_cliques_violator_is_a_side():
    G = two_cliques(10)
    p = ExpanderParams(0.9, 10)
    X = find_violating_set(G, p)
    assert X in (frozenset(range(10)), frozenset(range(10, 20)))
    assert len(boundary(G, X)) == 1
    assert expansion_witness_check(G, p, X).status == FAIL


def test_complete_graph_has_no_violator():
    p = ExpanderParams(0.1, 4)
    assert find_violating_set(complete(20), p) is None
    # independent check by symmetry: every X of size s has boundary n - s
    for s in range(2, 11):
        assert 20 - s >= epsilon(s, p) * s


def test_long_cycle_violator_is_an_arc():
    C = cycle_graph(100)
    p = ExpanderParams(0.5, 40)
    X = find_violating_set(C, p)
    assert X is not None
    assert expansion_witness_check(C, p, X).status == FAIL
    assert len(boundary(C, X)) == 2  # contiguous arc


@settings(max_examples=40, deadline=None)
@given(st.integers(6, 16), st.floats(0.1, 0.6), st.integers(0, 2**32 - 1))
def test_violators_are_genuine(n, prob, seed):
    G = gnp(n, prob, rng_for(seed))
    p = ExpanderParams(0.9, 2)
    res = search_violating_set(G, p)
    if res.violator is not None:
        assert expansion_witness_check(G, p, res.violator).status == FAIL


@settings(max_examples=25, deadline=None)
@given(st.integers(4, 12), st.floats(0.1, 0.9), st.integers(0, 2**32 - 1))
def test_exhaustive_search_is_complete_on_small_graphs(n, prob, seed):
    # brute force oracle over all subsets in range
    from itertools import combinations

    G = gnp(n, prob, rng_for(seed))
    p = ExpanderParams(0.9, 2)
    truth = any(
        len(boundary(G, X)) < epsilon(s, p) * s - 1e-12
        for s in range(1, n // 2 + 1)
        if s >= p.k / 2
        for X in combinations(range(n), s)
    )
    assert (find_violating_set(G, p, budget=10**7) is not None) == truth


# --- extraction ---------------------------------------------------------------


def test_peel_reaches_half_average():
    G = gnp(80, 0.1, rng_for(3))
    H, labels = peel(G)
    d, mn, _ = degree_stats(H)
    assert d >= average_degree(G)
    assert 2 * mn >= d


def test_complete_graph_extracts_to_itself():
    H, rep = extract_expander_subgraph(complete(20), ExpanderParams(0.1, 1.9))
    assert H.n == 20 and H.m == 190
    assert rep.rounds == 0 and rep.heuristically_expanding


def test_two_k20_split_to_one_side():
    G = two_cliques(20)
    H, rep = extract_expander_subgraph(G, ExpanderParams(0.9, 20))
    assert H.n == 20 and H.m == 190
    assert rep.rounds == 1
    assert rep.labels == tuple(range(20))  # tie broken to the lower-labelled side


def test_star_is_degenerate():
    star = build_graph(51, [(0, i) for i in range(1, 51)])
    H, rep = extract_expander_subgraph(star, ExpanderParams(0.1, 0.2))
    assert rep.degenerate


def test_extraction_report_is_json_ready():
    import json

    _, rep = extract_expander_subgraph(gnp(60, 0.2, rng_for(1)), ExpanderParams(0.1, 1.2))
    json.dumps(rep.to_json())


@settings(max_examples=30, deadline=None)
@given(st.integers(5, 60), st.floats(0.05, 0.5), st.integers(0, 2**32 - 1))
def test_extraction_inequalities(n, prob, seed):
    G = gnp(n, prob, rng_for(seed))
    if G.m == 0:
        return
    d = average_degree(G)
    H, rep = extract_expander_subgraph(G, ExpanderParams(0.1, max(0.1 * float(d), 0.01)))
    dH, mn, _ = degree_stats(H)
    assert dH >= d / 2
    assert Fraction(mn) >= dH / 2
    # labels map back into G edges
    for u, v in H.sorted_edges():
        assert G.has_edge(rep.labels[u], rep.labels[v])


# --- thinness -----------------------------------------------------------------


def test_empty_set_is_thin():
    G = gnp(30, 0.2, rng_for(5))
    assert is_thin_around(G, [], [0], ThinnessParams(0.01, 1, 5)).passed


def test_path_single_hit():
    v = is_thin_around(path_graph(3), [1], [0], ThinnessParams(10, 2, 1))
    assert v.passed and v.profile == [1]


def test_star_fails_at_radius_one():
    star = build_graph(5, [(0, i) for i in range(1, 5)])
    v = is_thin_around(star, [0], [1], ThinnessParams(0.5, 1, 3))
    assert not v.passed and v.radius == 1


def test_thin_rejects_overlap():
    with pytest.raises(GraphError):
        is_thin_around(path_graph(3), [0, 1], [1], ThinnessParams())


# --- robust growth -----------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 40), st.floats(0.05, 0.4), st.integers(0, 2**32 - 1), st.integers(0, 6), st.data())
def test_robust_growth_reduces_to_ball(n, prob, seed, r, data):
    G = gnp(n, prob, rng_for(seed))
    X = data.draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=4))
    Z, trace = grow_ball_robust(G, X, (), (), r)
    assert Z == ball(G, X, r)
    assert trace.sizes[-1] == len(Z)


def test_robust_growth_radius_zero():
    Z, trace = grow_ball_robust(cycle_graph(9), {0, 4}, r=0)
    assert Z == {0, 4} and trace.sizes == [2]


def test_robust_growth_conclusion_on_regular_graph():
    G = random_regular(4096, 8, rng_for(11))
    Z, trace = grow_ball_robust(G, [0], r=9, p=ExpanderParams(0.1, 0.8))
    assert len(Z) >= math.exp(9 ** 0.25)
    assert trace.conclusion_holds is True


def test_robust_growth_avoids_y_and_w():
    G = path_graph(6)
    Z, trace = grow_ball_robust(G, [0], Y=[2], W=[4], r=5)
    assert Z == {0, 1}
    assert trace.boundary_hits[0] == 0


# --- linking and large balls --------------------------------------------------


def test_link_sets_examples():
    C6 = cycle_graph(6)
    assert link_sets(C6, {0, 1}, {1, 2}) == (1,)
    assert link_sets(C6, {0}, {3}, max_len=2) is None
    K = complete(20)
    path = link_sets(K, {0}, {19}, avoid=range(1, 6))
    assert path is not None and len(path) - 1 <= 2


def test_large_ball_whole_graph():
    G = gnp(40, 0.2, rng_for(2))
    from nestcyc.graph import distances

    assert len(distances(G, [0])) == 40  # connected at this density
    res = find_large_ball_avoiding(G, [], ExpanderParams(0.1, 1))
    assert res.vertices == frozenset(range(40))


def test_large_ball_in_complete_graph():
    res = find_large_ball_avoiding(complete(20), range(5), ExpanderParams(0.1, 1))
    assert res.vertices == frozenset(range(5, 20))
    assert res.radius == 1


def test_large_ball_on_broken_cycle():
    # the largest ball is centred mid-path, so its radius is 49
    res = find_large_ball_avoiding(cycle_graph(100), [0], ExpanderParams(0.1, 4))
    assert res.vertices == frozenset(range(1, 100))
    assert res.radius == 49
    assert res.size_ok
