"""Turn a kraken into two nested cycles without crossings.

The kraken's cycle becomes the inner cycle.  Consecutive arms are joined by
disjoint link paths through expanded anchor blobs, and arms plus links trace
the outer cycle in the inner cycle's order.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .expander import ExpanderParams, ExtractionError, extract_expander_subgraph
from .graph import Graph, average_degree, ball, cycle_edges, shortest_path_between_sets
from .kraken import CASE_HUBS, Kraken, KrakenError, build_kraken, default_kraken_params
from .verify import verify_nested_no_crossings

log = logging.getLogger(__name__)


class AssemblyError(RuntimeError):
    def __init__(self, kind: str, message: str, where=None):
        super().__init__(message)
        self.kind = kind
        self.where = where


@dataclass
class NestedCertificate:
    outer: tuple[int, ...]
    inner: tuple[int, ...]
    inner_positions: dict
    provenance: dict = field(default_factory=dict)

    def relabel(self, labels: Sequence[int]) -> "NestedCertificate":
        outer = tuple(labels[v] for v in self.outer)
        inner = tuple(labels[v] for v in self.inner)
        prov = dict(self.provenance)
        prov["segments"] = [
            {**s, "vertices": [labels[v] for v in s["vertices"]]} for s in self.provenance.get("segments", [])
        ]
        return NestedCertificate(outer, inner, {labels[v]: i for v, i in self.inner_positions.items()}, prov)

    def to_json(self) -> dict:
        return {
            "outer": list(self.outer),
            "inner": list(self.inner),
            "inner_positions": {str(v): i for v, i in sorted(self.inner_positions.items())},
            "provenance": self.provenance,
        }


def expand_anchor_blobs(
    G: Graph,
    K: Kraken,
    L: set,
    r: int,
    hub_size: Optional[int] = None,
    hub_min: int = 0,
) -> list:
    """Pairwise disjoint expanded blobs ``A*[i][j]``.

    Non-hub anchors grow a radius-``r`` ball around their blob in
    ``G - L - Y`` (``Y`` = other arm vertices plus the cycle), shrinking the
    radius of colliding pairs until disjoint.  Hub anchors then take unused
    neighbours round-robin.
    """
    k = K.k
    cyc = set(K.cycle)
    arm_vertices = set()
    for pair in K.arms:
        for R in pair:
            arm_vertices.update(R)
    idx = [(i, j) for i in range(k) for j in range(2)]
    hub = {(i, j): bool(K.hub_anchor[i][j]) if K.hub_anchor else K.anchors[i][j] in L for i, j in idx}
    radius = {key: r for key in idx if not hub[key]}
    cache: dict = {}

    def grow(key, rad):
        if (key, rad) in cache:
            return cache[(key, rad)]
        i, j = key
        u = K.anchors[i][j]
        Y = (arm_vertices - {u}) | cyc
        blocked = Y | (set(L) - {u})
        X = [w for w in K.blobs[i][j] if w not in blocked]
        region = ball(G, X, rad, blocked)
        # keep the part connected to the anchor
        comp = ball(G, [u], len(region), set(range(G.n)) - region)
        cache[(key, rad)] = comp
        return comp

    while True:
        star = {key: grow(key, radius[key]) for key in radius}
        keys = sorted(star)
        clash = None
        for a, ka in enumerate(keys):
            for kb in keys[a + 1 :]:
                if star[ka] & star[kb]:
                    clash = (ka, kb)
                    break
            if clash:
                break
        if clash is None:
            break
        ka, kb = clash
        if radius[ka] == 0 and radius[kb] == 0:
            raise AssemblyError("blob_overlap", f"blobs {ka} and {kb} overlap at radius 0", [ka, kb])
        for key in clash:
            radius[key] = max(0, radius[key] - 1)

    used = set(cyc) | (arm_vertices - {K.anchors[i][j] for i, j in idx if hub[(i, j)]})
    for s in star.values():
        used |= s
    hub_keys = [key for key in idx if hub[key]]
    target = hub_size if hub_size is not None else max(len(K.blobs[0][0]), 1)
    sets = {key: [K.anchors[key[0]][key[1]]] for key in hub_keys}
    used |= {K.anchors[i][j] for i, j in hub_keys}
    pools = {key: list(G.adj[K.anchors[key[0]][key[1]]]) for key in hub_keys}
    cursor = {key: 0 for key in hub_keys}
    for _ in range(target):
        for key in hub_keys:
            pool = pools[key]
            while cursor[key] < len(pool) and pool[cursor[key]] in used:
                cursor[key] += 1
            if cursor[key] < len(pool):
                w = pool[cursor[key]]
                sets[key].append(w)
                used.add(w)
    for key in hub_keys:
        if len(sets[key]) - 1 < hub_min:
            raise AssemblyError(
                "hub_neighbourhood",
                f"hub anchor {K.anchors[key[0]][key[1]]} has only {len(sets[key]) - 1} unused neighbours",
                list(key),
            )
        star[key] = frozenset(sets[key])
    out = [[None, None] for _ in range(k)]
    for (i, j), s in star.items():
        out[i][j] = frozenset(s)
    all_sets = [out[i][j] for i, j in idx]
    total = sum(len(s) for s in all_sets)
    assert len(set().union(*all_sets)) == total, "expanded blobs are not pairwise disjoint"
    return [tuple(pair) for pair in out]


def link_arms(
    G: Graph,
    K: Kraken,
    expanded: list,
    q_len: Optional[int] = None,
    p_len: Optional[int] = None,
) -> list:
    """Paths ``P_i`` from ``u_{i,2}`` to ``u_{i+1,1}`` (indices mod k), built in order."""
    k = K.k
    base = set(K.cycle)
    for pair in K.arms:
        for R in pair:
            base.update(R)
    everything = set()
    for pair in expanded:
        for s in pair:
            everything |= s
    built: set[int] = set()
    out = []
    for i in range(k):
        nxt = (i + 1) % k
        X1 = expanded[i][1]
        X2 = expanded[nxt][0]
        avoid = (base | built | everything) - X1 - X2
        Q = shortest_path_between_sets(G, X1, X2, avoid)
        if Q is None:
            raise AssemblyError("link", f"no link between blobs of arms ({i},2) and ({nxt},1)", i)
        if q_len is not None and len(Q) - 1 > q_len:
            raise AssemblyError("link", f"link {i} has length {len(Q) - 1} > {q_len}", i)
        u_from = K.anchors[i][1]
        u_to = K.anchors[nxt][0]
        head = shortest_path_between_sets(G, [u_from], [Q[0]], set(range(G.n)) - X1)
        tail = shortest_path_between_sets(G, [Q[-1]], [u_to], set(range(G.n)) - X2)
        if head is None or tail is None:
            raise AssemblyError("link", f"cannot extend link {i} inside its blobs", i)
        path = head + Q[1:-1] + tail if len(Q) > 1 else head + tail[1:]
        if len(set(path)) != len(path):
            raise AssemblyError("link", f"link {i} is not a simple path", i)
        if p_len is not None and len(path) - 1 > p_len:
            raise AssemblyError("link", f"path {i} has length {len(path) - 1} > {p_len}", i)
        built.update(path)
        out.append(tuple(path))
    return out


def assemble(K: Kraken, links: Sequence[Sequence[int]]) -> NestedCertificate:
    """Outer cycle ``v_1 R_{1,2} P_1 R_{2,1}^{-1} v_2 ...``; inner cycle = the kraken cycle."""
    k = K.k
    outer: list[int] = []
    positions = {}
    segments = []
    for i in range(k):
        nxt = (i + 1) % k
        out_arm = K.arms[i][1]
        back_arm = tuple(reversed(K.arms[nxt][0]))
        positions[K.cycle[i]] = len(outer)
        segments.append({"kind": "arm", "i": i, "j": 1, "start": len(outer), "vertices": list(out_arm)})
        outer.extend(out_arm[:-1])
        segments.append({"kind": "link", "i": i, "start": len(outer), "vertices": list(links[i])})
        outer.extend(links[i][:-1])
        segments.append({"kind": "arm", "i": nxt, "j": 0, "start": len(outer), "vertices": list(back_arm)})
        outer.extend(back_arm[:-1])
    outer_t = tuple(outer)
    inner = tuple(K.cycle)
    # structural invariants independent of the generic crossing checker
    if len(set(outer_t)) != len(outer_t):
        raise AssertionError("outer walk repeats a vertex")
    if not set(inner) <= set(outer_t):
        raise AssertionError("inner vertices missing from outer")
    if cycle_edges(inner) & cycle_edges(outer_t):
        raise AssertionError("inner and outer share an edge")
    pos = [positions[v] for v in inner]
    if any(pos[a] >= pos[a + 1] for a in range(k - 1)):
        raise AssertionError("inner vertices out of order along outer")
    prov = {"case": K.case_tag, "segments": segments}
    return NestedCertificate(outer_t, inner, positions, prov)


# --- pipeline ---------------------------------------------------------------


@dataclass
class PipelineConfig:
    eps1: float = 0.1
    k: Optional[float] = None
    budget: int = 200_000
    exhaustive_threshold: int = 18
    hub_threshold: Optional[float] = None
    blob_size: Optional[int] = None
    m: Optional[int] = None
    separation: Optional[int] = None
    max_arm_len: Optional[int] = None
    expand_radius: Optional[int] = None
    q_len: Optional[int] = None
    p_len: Optional[int] = None
    ladder: bool = True
    timings: bool = False

    def to_json(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


@dataclass
class PipelineResult:
    certificate: Optional[NestedCertificate]
    stages: list
    failure: Optional[dict] = None
    verdict: Optional[dict] = None

    @property
    def ok(self) -> bool:
        return self.certificate is not None


def _attempts(H: Graph, p: ExpanderParams, cfg: PipelineConfig) -> list:
    fixed = dict(m=cfg.m, separation=cfg.separation, max_arm_len=cfg.max_arm_len)
    first = default_kraken_params(H, p, hub_threshold=cfg.hub_threshold, blob_size=cfg.blob_size, **fixed)
    out = [("configured", first)]
    if not cfg.ladder:
        return out
    degs = [len(a) for a in H.adj]
    d = math.ceil(average_degree(H))
    if cfg.separation is None:
        tight = dict(fixed, separation=1)
        out.append(
            ("unit_separation", default_kraken_params(H, p, hub_threshold=cfg.hub_threshold, blob_size=cfg.blob_size, **tight))
        )
    out.append(("hubs_at_average", default_kraken_params(H, p, hub_threshold=d, blob_size=cfg.blob_size, **fixed)))
    out.append(("all_hubs_unit_blobs", default_kraken_params(H, p, hub_threshold=min(degs), blob_size=1, **fixed)))
    seen, uniq = set(), []
    for name, P in out:
        if P not in seen:
            seen.add(P)
            uniq.append((name, P))
    return uniq


def _try_kraken(G: Graph, H: Graph, p: ExpanderParams, P, cfg: PipelineConfig, stage: dict):
    K, rep = build_kraken(H, p, P)
    stage["kraken"] = {"case": rep["case"], "side_condition": rep["side_condition"], "k": K.k}
    L = {v for v in range(H.n) if len(H.adj[v]) >= P.hub_threshold}
    r = cfg.expand_radius if cfg.expand_radius is not None else max(0, (P.separation - 1) // 2)
    stars = expand_anchor_blobs(H, K, L, r)
    q_len = cfg.q_len if cfg.q_len is not None else P.m
    p_len = cfg.p_len if cfg.p_len is not None else 30 * P.m
    links = link_arms(H, K, stars, q_len, p_len)
    cert = assemble(K, links)
    return K, cert


def run_pipeline(G: Graph, config: Optional[PipelineConfig] = None) -> PipelineResult:
    """Extract an expander, build a kraken, link and assemble; verify in ``G``.

    A certificate is returned only if it passes the independent verifier in
    the original labelling.
    """
    cfg = config or PipelineConfig()
    stages: list = []

    def clock():
        return time.perf_counter() if cfg.timings else 0.0

    t0 = clock()
    if G.m == 0:
        return PipelineResult(None, stages, {"stage": "extract", "kind": "no_edges"})
    k = cfg.k if cfg.k is not None else cfg.eps1 * float(average_degree(G))
    p = ExpanderParams(cfg.eps1, k)
    try:
        H, ext = extract_expander_subgraph(G, p, cfg.budget, cfg.exhaustive_threshold)
    except ExtractionError as exc:
        return PipelineResult(None, stages, {"stage": "extract", "kind": "extraction", "message": str(exc)})
    entry = {"stage": "extract", "report": ext.to_json()}
    if cfg.timings:
        entry["seconds"] = clock() - t0
    stages.append(entry)
    labels = ext.labels

    last_failure = None
    for name, P in _attempts(H, p, cfg):
        t1 = clock()
        stage: dict = {"stage": "kraken", "attempt": name, "params": P.to_json()}
        stages.append(stage)
        try:
            K, cert = _try_kraken(G, H, p, P, cfg, stage)
        except KrakenError as exc:
            stage["failure"] = {"kind": exc.kind, "message": str(exc)}
            last_failure = {"stage": "kraken", "attempt": name, "kind": exc.kind, "message": str(exc)}
            continue
        except AssemblyError as exc:
            stage["failure"] = {"kind": exc.kind, "message": str(exc), "where": exc.where}
            last_failure = {"stage": "assemble", "attempt": name, "kind": exc.kind, "message": str(exc)}
            continue
        finally:
            if cfg.timings:
                stage["seconds"] = clock() - t1
        final = cert.relabel(labels)
        final.provenance["attempt"] = name
        final.provenance["kraken"] = K.relabel(labels).to_json()
        verdict = verify_nested_no_crossings(G, final.outer, final.inner)
        stage["verdict"] = verdict.to_json()
        if not verdict.passed:
            raise AssertionError(f"assembled certificate failed verification: {verdict.failures}")
        return PipelineResult(final, stages, None, verdict.to_json())
    return PipelineResult(None, stages, last_failure)
