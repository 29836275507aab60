import json

import pytest

from conftest import hand_kraken
from nestcyc.expander import ExpanderParams
from nestcyc.generators import complete, generate_graph, path_graph, random_regular, rng_for, torus_grid
from nestcyc.graph import build_graph, distances
from nestcyc.kraken import (
    CASE_BLOBS,
    CASE_HUBS,
    KrakenError,
    KrakenParams,
    build_kraken,
    default_kraken_params,
    find_far_apart_blobs,
    induced_diameter,
    validate_kraken,
)


def test_hand_built_kraken_passes():
    G, K = hand_kraken()
    v = validate_kraken(G, K, KrakenParams(m=3, blob_size=2, hub_threshold=100, separation=1))
    assert v.passed, v.failures


def test_shared_blob_vertex_is_named():
    G, K = hand_kraken()
    K.blobs[1] = (frozenset({5, 9}), K.blobs[1][1])  # 9 already in blob (0, 0)
    v = validate_kraken(G, K, KrakenParams(m=3, blob_size=2, hub_threshold=100, separation=1))
    assert not v.passed
    hits = [f for f in v.failures if f["clause"] == "blob_disjoint"]
    assert hits and hits[0]["where"] == [[0, 0], [1, 0]]


def test_overlong_arm_is_named():
    G, K = hand_kraken(arm_extra=10)
    P = KrakenParams(m=1, blob_size=2, hub_threshold=100, separation=1)
    assert P.arm_cap == 10
    v = validate_kraken(G, K, P)
    assert [f["where"] for f in v.failures if f["clause"] == "arm_length"] == [[0, 0]]
    G, K = hand_kraken(arm_extra=9)
    assert validate_kraken(G, K, P).passed


def test_arm_through_cycle_rejected():
    G, K = hand_kraken()
    G = build_graph(30, list(G.sorted_edges()) + [(1, 3)])
    K.arms[0] = ((0, 1, 3), K.arms[0][1])
    v = validate_kraken(G, K, KrakenParams(m=3, blob_size=2, hub_threshold=100, separation=1))
    assert any(f["clause"] == "arm_interior" for f in v.failures)


def test_induced_diameter():
    assert induced_diameter(path_graph(5), range(5)) == 4
    assert induced_diameter(path_graph(5), [0, 2]) is None


# --- blob families -------------------------------------------------------------


def test_torus_blobs_far_apart():
    T = torus_grid(40, 40)
    P = KrakenParams(m=10, blob_size=9, hub_threshold=100, separation=6)
    C = (0, 1, 41, 40)
    fam = find_far_apart_blobs(T, [], C, P, 8)
    assert len(fam.blobs) == 8
    for a, A in enumerate(fam.blobs):
        assert len(A) == 9
        assert induced_diameter(T, A) <= P.m
        dist = distances(T, A)
        for B in fam.blobs[a + 1 :]:
            assert min(dist[w] for w in B) >= 6
        assert min(dist[c] for c in C) >= 6


def test_complete_graph_fits_at_most_one_blob():
    P = KrakenParams(m=3, blob_size=2, hub_threshold=100, separation=1)
    fam = find_far_apart_blobs(complete(12), [], (), P, 5)
    assert len(fam.blobs) <= 1


def test_mostly_forbidden_returns_what_fits():
    G = generate_graph("torus:10:10")
    keep = set(range(10))  # one row, a 10-cycle
    P = KrakenParams(m=5, blob_size=2, hub_threshold=100, separation=1)
    fam = find_far_apart_blobs(G, set(range(100)) - keep, (), P, 10)
    assert 1 <= len(fam.blobs) < 10
    for A in fam.blobs:
        assert A <= keep


# --- construction --------------------------------------------------------------


def test_complete_graph_hub_case():
    G = complete(20)
    P = KrakenParams(m=3, blob_size=2, hub_threshold=10, separation=1)
    K, rep = build_kraken(G, ExpanderParams(0.1, 1.9), P)
    assert K.case_tag == CASE_HUBS
    assert K.cycle == (0, 1, 2)
    assert validate_kraken(G, K, P).passed
    assert rep["side_condition"]["holds"]
    json.dumps(K.to_json())


def test_forest_has_no_kraken():
    with pytest.raises(KrakenError) as err:
        build_kraken(path_graph(10), ExpanderParams(0.1, 0.2), KrakenParams(m=3, blob_size=1, hub_threshold=2, separation=1))
    assert err.value.kind == "no_cycle"


def test_sparse_regular_attempts_blob_case():
    G = random_regular(5000, 3, rng_for(1))
    p = ExpanderParams(0.1, 0.3)
    P = default_kraken_params(G, p, hub_threshold=20, blob_size=3)
    try:
        K, rep = build_kraken(G, p, P)
    except KrakenError as exc:
        assert exc.kind in ("augmentation_shortfall", "blob_shortage")
        assert "blob_family" in exc.report
    else:
        assert K.case_tag == CASE_BLOBS
        assert validate_kraken(G, K, P).passed


@pytest.mark.parametrize("spec", ["regular:2000:6", "hypercube:10", "gnp:2000:0.004"])
def test_blob_case_succeeds_on_sparse_expanders(spec):
    G = generate_graph(spec, 3)
    p = ExpanderParams(0.1, 0.6)
    P = default_kraken_params(G, p, hub_threshold=10**6, separation=2, blob_size=2)
    K, rep = build_kraken(G, p, P)
    assert K.case_tag == CASE_BLOBS
    assert validate_kraken(G, K, P).passed
    assert not any(any(h) for h in K.hub_anchor)
    assert rep["side_condition"]["kind"] == "few_hubs_far_anchors"


def test_mixed_case_with_few_hubs():
    # a sparse graph plus two high-degree vertices
    base = generate_graph("regular:600:6", 5)
    edges = list(base.sorted_edges())
    edges += [(0, w) for w in range(100, 160)] + [(1, w) for w in range(200, 260)]
    G = build_graph(600, edges)
    p = ExpanderParams(0.1, 0.6)
    P = default_kraken_params(G, p, hub_threshold=40, separation=1, blob_size=2)
    K, _ = build_kraken(G, p, P)
    assert validate_kraken(G, K, P).passed
    flags = [h for pair in K.hub_anchor for h in pair]
    assert any(flags) and not all(flags)


def test_relabel_round_trip():
    G = complete(20)
    P = KrakenParams(m=3, blob_size=2, hub_threshold=10, separation=1)
    K, _ = build_kraken(G, ExpanderParams(0.1, 1.9), P)
    labels = list(range(100, 120))
    R = K.relabel(labels)
    assert R.cycle == tuple(100 + v for v in K.cycle)
    assert R.blobs[0][0] == frozenset(100 + v for v in K.blobs[0][0])
