import json

import networkx as nx
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import to_nx
from nestcyc.generators import complete, gnp, rng_for
from nestcyc.graph import build_graph, shortest_cycle
from nestcyc.linker import (
    BLOBS,
    HUBS,
    PathSystem,
    audit_path_system,
    build_path_system,
    check_path_system,
    cycle_contact_profile,
    is_locally_minimal,
    repair_path_system,
    shorten_path_system,
)


def test_no_targets_gives_empty_system():
    G = complete(8)
    S = build_path_system(G, (0, 1, 2), [])
    assert S.paths == []


def test_complete_graph_triangle_to_six_hubs():
    G = complete(20)
    C = (0, 1, 2)
    S = build_path_system(G, C, range(3, 9))
    assert check_path_system(G, S) == []
    assert S.usage() == {0: 2, 1: 2, 2: 2}
    assert all(len(P) - 1 <= 2 for P in S.paths)
    assert sorted(S.path_targets) == list(range(3, 9))


def test_blob_targets_each_used_once():
    G = complete(12)
    blobs = [frozenset({3, 4}), frozenset({5, 6}), frozenset({7, 8})]
    S = build_path_system(G, (0, 1, 2), blobs, BLOBS)
    assert check_path_system(G, S) == []
    assert sorted(S.path_targets) == [0, 1, 2]


def test_capacity_and_eligibility_respected():
    G = complete(12)
    S = build_path_system(G, (0, 1, 2), range(3, 12), per_vertex={0: 1, 1: 2}, eligible=[0, 1])
    use = S.usage()
    assert use[0] == 1 and use[1] == 2 and use[2] == 0


def test_blocked_vertices_are_never_used():
    G = complete(10)
    S = build_path_system(G, (0, 1, 2), [8, 9], blocked={3, 4, 5, 6, 7})
    for P in S.paths:
        assert not set(P) & {3, 4, 5, 6, 7}


def test_max_len_enforced():
    # 0-1-2 triangle; hub 6 only reachable by a long path
    G = build_graph(7, [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 5), (5, 6)])
    assert build_path_system(G, (0, 1, 2), [6], max_len=3).paths == []
    assert build_path_system(G, (0, 1, 2), [6], max_len=4).paths == [(0, 3, 4, 5, 6)]


@settings(max_examples=40, deadline=None)
@given(st.integers(8, 40), st.floats(0.1, 0.5), st.integers(0, 2**32 - 1), st.data())
def test_built_systems_satisfy_invariants(n, prob, seed, data):
    G = gnp(n, prob, rng_for(seed))
    C = shortest_cycle(G)
    if C is None:
        return
    others = [v for v in range(n) if v not in C]
    L = data.draw(st.sets(st.sampled_from(others), max_size=8)) if others else set()
    S = build_path_system(G, C, L)
    assert check_path_system(G, S) == []
    assert all(u <= 2 for u in S.usage().values())


def test_checker_catches_shared_vertex():
    G = complete(10)
    S = PathSystem((0, 1, 2), HUBS, [5, 6], [(0, 3, 5), (1, 3, 6)], [5, 6], per_vertex={0: 2, 1: 2, 2: 2})
    assert any("share vertex 3" in p for p in check_path_system(G, S))


# --- shortening ----------------------------------------------------------------


def test_detour_is_shortened():
    # path 0-3-4-5-6 while the chord 3-6 is available
    G = build_graph(7, [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 5), (5, 6), (3, 6)])
    S = PathSystem((0, 1, 2), HUBS, [6], [(0, 3, 4, 5, 6)], [6], per_vertex={0: 2, 1: 2, 2: 2})
    assert not is_locally_minimal(G, S)
    T = shorten_path_system(G, S)
    assert T.paths == [(0, 3, 6)]
    assert T.total_length() < S.total_length()
    assert is_locally_minimal(G, T)


def test_shortening_fixpoint_is_unchanged():
    G = complete(20)
    S = build_path_system(G, (0, 1, 2), range(3, 9))
    T = shorten_path_system(G, S)
    assert T.paths == S.paths
    assert shorten_path_system(G, T).paths == T.paths


# --- audits --------------------------------------------------------------------


def contact_oracle(G, C, v, i):
    """|N(B^{i-1}_{G-(C-v)}(v)) cap C| via networkx."""
    H = to_nx(G)
    H.remove_nodes_from(set(C) - {v})
    dist = nx.single_source_shortest_path_length(H, v, cutoff=i - 1)
    B = set(dist)
    N = {w for u in B for w in G.adj[u]} - B
    return len(N & set(C))


@settings(max_examples=40, deadline=None)
@given(st.integers(5, 30), st.floats(0.08, 0.4), st.integers(0, 2**32 - 1))
def test_cycle_contact_profile_matches_oracle(n, prob, seed):
    G = gnp(n, prob, rng_for(seed))
    C = shortest_cycle(G)
    if C is None:
        return
    for v in C:
        prof = cycle_contact_profile(G, C, v, 6)
        assert prof == [contact_oracle(G, C, v, i) for i in range(1, 7)]
        assert all(c <= 2 * i for i, c in enumerate(prof, start=1))


def test_empty_system_audit_passes():
    G = gnp(40, 0.15, rng_for(9))
    C = shortest_cycle(G)
    S = PathSystem(C, HUBS, [], per_vertex={v: 2 for v in C})
    for v in C:
        rep = audit_path_system(G, S, v)
        assert rep.applicable and rep.passed


def test_audit_detects_path_doubling_back():
    # triangle 0,1,2; path from 1 runs 1-4-5-6-7-8 and free vertex 3 (next to 0) touches 4, 5, 6
    edges = [(0, 1), (1, 2), (2, 0), (0, 3), (1, 4), (4, 5), (5, 6), (6, 7), (7, 8), (3, 4), (3, 5), (3, 6)]
    G = build_graph(9, edges)
    S = PathSystem((0, 1, 2), HUBS, [8], [(1, 4, 5, 6, 7, 8)], [8], per_vertex={0: 2, 1: 2, 2: 2})
    assert check_path_system(G, S) == []
    rep = audit_path_system(G, S, 0, horizon=4)
    assert not rep.passed
    bad = rep.first_failure()
    assert bad.radius == 2 and bad.lhs == 3 and bad.rhs == 2  # hits 4, 5, 6
    json.dumps(rep.to_json())


def test_audit_not_applicable_when_saturated():
    G = complete(20)
    S = build_path_system(G, (0, 1, 2), range(3, 9))
    assert not audit_path_system(G, S, 0).applicable


def test_shortened_systems_pass_audits_on_random_graphs():
    # G(n, 8/n) nearly always has triangles, so no girth conditioning
    audited = 0
    for seed in range(1, 201):
        n = 20 + seed * 9 % 180
        G = gnp(n, 8 / n, rng_for(seed))
        C = shortest_cycle(G)
        if C is None:
            continue
        L = [v for v in range(n) if len(G.adj[v]) >= 12 and v not in C]
        S = shorten_path_system(G, build_path_system(G, C, L))
        assert is_locally_minimal(G, S)
        for v in C:
            rep = audit_path_system(G, S, v, horizon=4)
            audited += rep.applicable
            assert rep.passed, (seed, v, rep.to_json())
    assert audited > 50


def test_shortening_moves_path_to_spare_vertex():
    # path 0-3-4 to hub 4, but cycle vertex 1 (unused) is adjacent to the hub
    G = build_graph(5, [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (1, 4)])
    S = PathSystem((0, 1, 2), HUBS, [4], [(0, 3, 4)], [4], per_vertex={0: 2, 1: 2, 2: 2})
    T = shorten_path_system(G, S)
    assert T.paths == [(1, 4)]


def test_repair_keeps_system_valid():
    G = gnp(120, 0.06, rng_for(4))
    C = shortest_cycle(G)
    L = [v for v in range(G.n) if len(G.adj[v]) >= 9 and v not in C]
    out = repair_path_system(G, build_path_system(G, C, L), max_rounds=10)
    assert check_path_system(G, out.system) == []
    assert out.rounds <= 10
