"""Krakens: a shortest cycle whose vertices each carry two arms ending in blobs.

``build_kraken`` links the cycle to high-degree hubs first; when that leaves
cycle vertices short of arms it finds far-apart blobs away from the hub
paths and links the remaining vertices to those.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

from .expander import ExpanderParams, find_large_ball_avoiding
from .graph import Graph, average_degree, ball, bfs_layers, distances, is_path, shortest_cycle
from .linker import BLOBS, HUBS, PathSystem, build_path_system, repair_path_system

log = logging.getLogger(__name__)

CASE_HUBS = "hubs"
CASE_BLOBS = "blobs"


@dataclass(frozen=True)
class KrakenParams:
    m: int
    blob_size: int
    hub_threshold: float
    separation: int
    max_arm_len: Optional[int] = None
    blob_count: Optional[int] = None
    ball_starts: int = 8

    def __post_init__(self):
        if self.m < 1 or self.blob_size < 1:
            raise ValueError("m and blob_size must be at least 1")
        if self.separation < 1:
            raise ValueError("separation must be at least 1")

    @property
    def arm_cap(self) -> int:
        return self.max_arm_len if self.max_arm_len is not None else 10 * self.m

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "blob_size": self.blob_size,
            "hub_threshold": self.hub_threshold,
            "separation": self.separation,
            "max_arm_len": self.arm_cap,
            "blob_count": self.blob_count,
            "ball_starts": self.ball_starts,
        }


def default_kraken_params(G: Graph, p: ExpanderParams, **overrides) -> KrakenParams:
    """Desk-scale defaults; any field may be overridden (``None`` keeps the default)."""
    n = max(G.n, 3)
    logn = math.log(n)
    degs = [len(a) for a in G.adj] or [0]
    d = float(average_degree(G)) if G.n else 0.0
    values = dict(
        m=max(1, math.ceil(100 / p.eps1 * logn**3)),
        blob_size=max(1, min(math.ceil(logn), min(degs) // 2)),
        hub_threshold=math.ceil(4 * d),
        separation=max(1, math.ceil(math.sqrt(logn))),
    )
    for key, val in overrides.items():
        if val is not None:
            values[key] = val
    return KrakenParams(**values)


@dataclass
class Kraken:
    """Cycle ``v_1..v_k`` with anchors, blobs and arms indexed ``[i][j]``, ``j in {0, 1}``."""

    cycle: tuple[int, ...]
    anchors: list  # list[tuple[int, int]]
    blobs: list  # list[tuple[frozenset, frozenset]]
    arms: list  # list[tuple[path, path]]
    case_tag: str
    hub_anchor: list = field(default_factory=list)  # list[tuple[bool, bool]]

    @property
    def k(self) -> int:
        return len(self.cycle)

    def vertices(self) -> set[int]:
        out = set(self.cycle)
        for i in range(self.k):
            for j in range(2):
                out.update(self.arms[i][j])
                out.update(self.blobs[i][j])
        return out

    def to_json(self) -> dict:
        return {
            "cycle": list(self.cycle),
            "anchors": [list(a) for a in self.anchors],
            "blobs": [[sorted(b) for b in pair] for pair in self.blobs],
            "arms": [[list(r) for r in pair] for pair in self.arms],
            "case_tag": self.case_tag,
            "hub_anchor": [list(h) for h in self.hub_anchor],
        }

    def relabel(self, labels: Sequence[int]) -> "Kraken":
        f = lambda seq: tuple(labels[v] for v in seq)  # noqa: E731
        return Kraken(
            f(self.cycle),
            [tuple(labels[u] for u in a) for a in self.anchors],
            [tuple(frozenset(labels[v] for v in b) for b in pair) for pair in self.blobs],
            [tuple(f(r) for r in pair) for pair in self.arms],
            self.case_tag,
            list(self.hub_anchor),
        )


@dataclass
class Verdict:
    passed: bool
    failures: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"passed": self.passed, "failures": self.failures}


def induced_diameter(G: Graph, A: Iterable[int]) -> Optional[int]:
    """Diameter of ``G[A]``; ``None`` when disconnected."""
    As = set(A)
    outside = set(range(G.n)) - As
    best = 0
    for s in sorted(As):
        dist = distances(G, [s], outside)
        if len(dist) != len(As):
            return None
        best = max(best, max(dist.values()))
    return best


def validate_kraken(G: Graph, K: Kraken, P: KrakenParams) -> Verdict:
    """Check every clause of the kraken definition; failures name ``(i, j)`` and clause."""
    fails = []

    def fail(clause, where, detail):
        fails.append({"clause": clause, "where": where, "detail": detail})

    C = K.cycle
    k = len(C)
    cyc = set(C)
    if k < 3 or not is_path(G, C) or not G.has_edge(C[-1], C[0]):
        fail("cycle", None, "C is not a cycle of G")
    if not (len(K.anchors) == len(K.blobs) == len(K.arms) == k):
        fail("shape", None, "anchors/blobs/arms must have one pair per cycle vertex")
        return Verdict(False, fails)
    idx = [(i, j) for i in range(k) for j in range(2)]
    all_blob = {}
    for i, j in idx:
        A = K.blobs[i][j]
        u = K.anchors[i][j]
        if len(A) != P.blob_size:
            fail("blob_size", [i, j], f"|A| = {len(A)} != {P.blob_size}")
        if A & cyc:
            fail("blob_cycle", [i, j], f"blob meets V(C) at {sorted(A & cyc)}")
        if u not in A:
            fail("anchor_in_blob", [i, j], f"anchor {u} not in its blob")
        if u in cyc:
            fail("anchor_cycle", [i, j], f"anchor {u} lies on C")
        diam = induced_diameter(G, A) if A else None
        if diam is None or diam > P.m:
            fail("blob_diameter", [i, j], f"diameter {diam} exceeds m = {P.m}")
        for w in A:
            if w in all_blob:
                fail("blob_disjoint", [list(all_blob[w]), [i, j]], f"blobs share vertex {w}")
            else:
                all_blob[w] = (i, j)
    interiors = {}
    for i, j in idx:
        R = tuple(K.arms[i][j])
        u = K.anchors[i][j]
        if not is_path(G, R) or R[0] != C[i] or R[-1] != u:
            fail("arm_path", [i, j], f"arm is not a path from v_{i} to its anchor")
            continue
        if len(R) - 1 > P.arm_cap:
            fail("arm_length", [i, j], f"length {len(R) - 1} > {P.arm_cap}")
        for w in R[1:-1]:
            if w in cyc:
                fail("arm_interior", [i, j], f"internal vertex {w} on C")
            owner = all_blob.get(w)
            if owner is not None and owner != (i, j):
                fail("arm_interior", [i, j], f"internal vertex {w} in blob {list(owner)}")
            if w in interiors:
                fail("arm_disjoint", [list(interiors[w]), [i, j]], f"arms share internal vertex {w}")
            interiors[w] = (i, j)
    for i, j in idx:
        R = K.arms[i][j]
        for w in (R[0], R[-1]):
            if w in interiors and interiors[w] != (i, j):
                fail("arm_disjoint", [list(interiors[w]), [i, j]], f"endpoint {w} inside another arm")
    return Verdict(not fails, fails)


@dataclass
class BlobFamily:
    blobs: list
    separation: int
    diameter_bound: int
    centers: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "blobs": [sorted(b) for b in self.blobs],
            "separation": self.separation,
            "diameter_bound": self.diameter_bound,
            "centers": self.centers,
        }


def find_far_apart_blobs(
    G: Graph,
    forbidden: Iterable[int],
    C: Sequence[int],
    P: KrakenParams,
    count_target: int,
    p: Optional[ExpanderParams] = None,
) -> BlobFamily:
    """Greedy maximal family of small connected blobs, pairwise far apart and far from ``C``.

    Each round excludes a ball of radius ``P.separation`` around the chosen
    blobs and the cycle (inside ``G - forbidden``), takes the largest ball
    left, and trims it to a BFS prefix of ``P.blob_size`` vertices.
    """
    F = set(forbidden)
    p = p or ExpanderParams(0.5, 1.0)
    chosen: list[frozenset] = []
    centers = []
    anchors_for_exclusion = set(v for v in C if v not in F)
    while len(chosen) < count_target:
        seeds = set(anchors_for_exclusion)
        for b in chosen:
            seeds |= b
        excluded = set(ball(G, seeds, P.separation, F)) if seeds else set()
        W = F | excluded
        found = find_large_ball_avoiding(G, W, p, max_starts=P.ball_starts)
        if found is None or len(found.vertices) < P.blob_size:
            break
        prefix: list[int] = []
        for layer in bfs_layers(G, [found.center], W):
            prefix.extend(layer)
            if len(prefix) >= P.blob_size:
                break
        blob = frozenset(prefix[: P.blob_size])
        diam = induced_diameter(G, blob)
        if diam is None or diam > P.m:
            break
        chosen.append(blob)
        centers.append(found.center)
    return BlobFamily(chosen, P.separation, P.m, centers)


class KrakenError(RuntimeError):
    """Construction fell short; ``kind`` is no_cycle, augmentation_shortfall or blob_shortage."""

    def __init__(self, kind: str, message: str, report: Optional[dict] = None):
        super().__init__(message)
        self.kind = kind
        self.report = report or {}


def _hub_blobs(
    G: Graph,
    anchors: Sequence[int],
    size: int,
    taken: set[int],
) -> Optional[list[frozenset]]:
    """Disjoint ``{u} + (size-1)`` neighbour sets, filled round-robin."""
    blobs = [[u] for u in anchors]
    used = set(taken) | set(anchors)
    pools = [[w for w in G.adj[u]] for u in anchors]
    cursor = [0] * len(anchors)
    for _ in range(size - 1):
        for a in range(len(anchors)):
            pool = pools[a]
            while cursor[a] < len(pool) and pool[cursor[a]] in used:
                cursor[a] += 1
            if cursor[a] == len(pool):
                return None
            w = pool[cursor[a]]
            blobs[a].append(w)
            used.add(w)
    return [frozenset(b) for b in blobs]


def _pair_arms(paths_by_vertex: dict, C: Sequence[int]) -> list:
    out = []
    for v in C:
        arms = sorted(paths_by_vertex[v], key=lambda P: (P[-1], P))
        out.append(tuple(arms))
    return out


def build_kraken(G: Graph, p: ExpanderParams, P: KrakenParams, repair_rounds: int = 50) -> tuple[Kraken, dict]:
    """Construct a validated kraken in ``G`` or raise :class:`KrakenError`."""
    report: dict = {"params": P.to_json()}
    C = shortest_cycle(G)
    if C is None:
        raise KrakenError("no_cycle", "graph is a forest", report)
    k = len(C)
    cyc = set(C)
    L = {v for v in range(G.n) if len(G.adj[v]) >= P.hub_threshold}
    report.update(cycle=list(C), hubs=len(L))
    log.info("kraken: girth %d, |L| = %d, params %s", k, len(L), P.to_json())

    S = build_path_system(G, C, L - cyc, HUBS, max_len=P.arm_cap)
    outcome = repair_path_system(G, S, max_rounds=repair_rounds)
    S = outcome.system
    report["hub_system"] = S.to_json()
    report["hub_audit"] = {"passed": outcome.audits_passed, "rounds": outcome.rounds, "failures": outcome.failures}
    use = S.usage()
    by_vertex: dict[int, list] = {v: [] for v in C}
    for path in S.paths:
        by_vertex[path[0]].append(path)

    if all(use[v] == 2 for v in C):
        case = CASE_HUBS
        arms = _pair_arms(by_vertex, C)
        anchors = [tuple(R[-1] for R in pair) for pair in arms]
        taken = set(cyc)
        for pair in arms:
            for R in pair:
                taken.update(R)
        flat = [u for pair in anchors for u in pair]
        hb = _hub_blobs(G, flat, P.blob_size, taken - set(flat))
        if hb is None:
            raise KrakenError("blob_shortage", "hub neighbourhoods too small for disjoint blobs", report)
        blobs = [(hb[2 * i], hb[2 * i + 1]) for i in range(k)]
        hub_flags = [(True, True)] * k
    else:
        case = CASE_BLOBS
        V1 = [v for v in C if use[v] < 2]
        path_vertices = set()
        for path in S.paths:
            path_vertices.update(path)
        forbidden = (path_vertices | L) - set(V1)
        need = sum(2 - use[v] for v in V1)
        count = P.blob_count if P.blob_count is not None else 2 * need
        family = find_far_apart_blobs(G, forbidden, C, P, count, p)
        report["blob_family"] = family.to_json()
        if len(family.blobs) < need:
            raise KrakenError(
                "blob_shortage", f"found {len(family.blobs)} far-apart blobs, need {need}", report
            )
        S2 = build_path_system(
            G,
            C,
            family.blobs,
            BLOBS,
            max_len=P.arm_cap,
            per_vertex={v: 2 - use[v] for v in V1},
            eligible=V1,
            blocked=forbidden,
        )
        outcome2 = repair_path_system(G, S2, max_rounds=repair_rounds, base=S)
        S2 = outcome2.system
        report["blob_system"] = S2.to_json()
        report["blob_audit"] = {
            "passed": outcome2.audits_passed,
            "rounds": outcome2.rounds,
            "failures": outcome2.failures,
        }
        use2 = S2.usage()
        short = [v for v in V1 if use[v] + use2[v] < 2]
        if short:
            raise KrakenError(
                "augmentation_shortfall", f"cycle vertices {short} have fewer than two arms", report
            )
        blob_of = {}
        for path, t in zip(S2.paths, S2.path_targets):
            by_vertex[path[0]].append(path)
            blob_of[path[-1]] = family.blobs[t]
        arms = _pair_arms(by_vertex, C)
        anchors = [tuple(R[-1] for R in pair) for pair in arms]
        taken = set(cyc)
        for pair in arms:
            for R in pair:
                taken.update(R)
        for b in blob_of.values():
            taken |= b
        hub_anchor_list = [u for pair in anchors for u in pair if u not in blob_of]
        hb = _hub_blobs(G, hub_anchor_list, P.blob_size, taken - set(hub_anchor_list))
        if hb is None:
            raise KrakenError("blob_shortage", "hub neighbourhoods too small for disjoint blobs", report)
        hub_blob = dict(zip(hub_anchor_list, hb))
        blobs = [tuple(blob_of.get(u) or hub_blob[u] for u in pair) for pair in anchors]
        hub_flags = [tuple(u not in blob_of for u in pair) for pair in anchors]

    K = Kraken(tuple(C), anchors, blobs, arms, case, hub_flags)
    verdict = validate_kraken(G, K, P)
    assert verdict.passed, f"constructed kraken fails validation: {verdict.failures}"
    report["case"] = case
    report["side_condition"] = side_conditions(G, K, P, L)
    return K, report


def side_conditions(G: Graph, K: Kraken, P: KrakenParams, L: set[int]) -> dict:
    anchors = [K.anchors[i][j] for i in range(K.k) for j in range(2)]
    if K.case_tag == CASE_HUBS:
        return {
            "kind": "all_anchors_hubs",
            "holds": all(len(G.adj[u]) >= P.hub_threshold for u in anchors),
        }
    free = [u for u in anchors if u not in L]
    closest = None
    for a, u in enumerate(free):
        dist = distances(G, [u], L - {u}, max_radius=P.separation)
        for w in free[a + 1 :]:
            d = dist.get(w)
            if d is not None and (closest is None or d < closest):
                closest = d
    far = closest is None or closest >= P.separation
    return {
        "kind": "few_hubs_far_anchors",
        "hubs": len(L),
        "hubs_small": len(L) <= 2 * K.k,
        "closest_anchor_distance": closest,
        "anchors_far": far,
        "holds": far and len(L) <= 2 * K.k,
    }


def with_overrides(P: KrakenParams, **kw) -> KrakenParams:
    return replace(P, **{k: v for k, v in kw.items() if v is not None})
