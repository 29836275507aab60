"""Sublinear expander toolkit: expansion rate, refutation search, extraction,
thinness, robust ball growth, short linking and large-ball finding.
"""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional

from .graph import (
    Graph,
    GraphError,
    average_degree,
    bfs_layers,
    shortest_path_between_sets,
)

log = logging.getLogger(__name__)

TOL = 1e-12

PASS = "PASS"
FAIL = "FAIL"
NOT_APPLICABLE = "NOT_APPLICABLE"


@dataclass(frozen=True)
class ExpanderParams:
    eps1: float
    k: float

    def __post_init__(self):
        if not 0 < self.eps1 <= 1:
            raise ValueError(f"eps1 must lie in (0, 1], got {self.eps1}")
        if not self.k > 0:
            raise ValueError(f"k must be positive, got {self.k}")

    @classmethod
    def for_degree(cls, eps1: float, d) -> "ExpanderParams":
        """The usual convention ``k = eps1 * d``."""
        return cls(eps1, eps1 * float(d))


@dataclass(frozen=True)
class ThinnessParams:
    lam: float = 10.0
    power: int = 2
    horizon: int = 1

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if self.lam <= 0:
            raise ValueError("lambda must be positive")


def epsilon(x: float, p: ExpanderParams) -> float:
    """Expansion rate: 0 below ``k/5``, else ``eps1 / log^2(15x/k)``."""
    if x < 0:
        raise ValueError("x must be non-negative")
    if x < p.k / 5:
        return 0.0
    return p.eps1 / math.log(15 * x / p.k) ** 2


# --- witness checking -----------------------------------------------------


@dataclass
class ExpansionVerdict:
    status: str
    size: int
    boundary: int
    required: float
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASS


def _norm_edge(e) -> tuple[int, int]:
    u, v = int(e[0]), int(e[1])
    return (u, v) if u < v else (v, u)


def expansion_witness_check(
    G: Graph, p: ExpanderParams, X: Iterable[int], F: Iterable = ()
) -> ExpansionVerdict:
    """Check ``|N_{G\\F}(X)| >= eps(|X|)|X|`` for one pair ``(X, F)``."""
    Xs = set(X)
    Fs = {_norm_edge(e) for e in F}
    if not Fs <= G.edges:
        raise GraphError("F must be a subset of E(G)")
    size = len(Xs)
    rate = epsilon(size, p)
    required = rate * size
    if not (p.k / 2 <= size <= G.n / 2):
        return ExpansionVerdict(NOT_APPLICABLE, size, -1, required, "|X| outside [k/2, n/2]")
    if len(Fs) > float(average_degree(G)) * required + TOL:
        return ExpansionVerdict(NOT_APPLICABLE, size, -1, required, "e(F) exceeds d(G)*eps(|X|)*|X|")
    boundary = set()
    for u in Xs:
        for w in G.adj[u]:
            if w not in Xs and _norm_edge((u, w)) not in Fs:
                boundary.add(w)
    status = PASS if len(boundary) >= required - TOL else FAIL
    return ExpansionVerdict(status, size, len(boundary), required)


def _violates(p: ExpanderParams, n: int, size: int, boundary: int) -> bool:
    if not (p.k / 2 <= size <= n / 2):
        return False
    return boundary < epsilon(size, p) * size - TOL


# --- refutation search ------------------------------------------------------


@dataclass
class ViolatorSearch:
    violator: Optional[frozenset]
    family: Optional[str]
    visits: int
    budget_exhausted: bool


def _degeneracy_order(G: Graph) -> list[int]:
    deg = [len(a) for a in G.adj]
    heap = [(deg[v], v) for v in range(G.n)]
    heapq.heapify(heap)
    removed = [False] * G.n
    order = []
    while heap:
        d, v = heapq.heappop(heap)
        if removed[v] or d != deg[v]:
            continue
        removed[v] = True
        order.append(v)
        for w in G.adj[v]:
            if not removed[w]:
                deg[w] -= 1
                heapq.heappush(heap, (deg[w], w))
    return order


def search_violating_set(
    G: Graph, p: ExpanderParams, budget: int = 200_000, exhaustive_threshold: int = 18
) -> ViolatorSearch:
    """Look for a set ``X`` with ``|N(X)| < eps(|X|)|X|`` (``F`` empty).

    Candidates: BFS balls around every vertex, prefixes of the low-degree
    peeling order, and for small graphs every subset in range.  The first
    violator met in that order is returned.  ``budget`` caps vertex visits.
    """
    n = G.n
    visits = 0
    lo = max(1, math.ceil(p.k / 2 - TOL))
    hi = n // 2
    if lo > hi:
        return ViolatorSearch(None, None, 0, False)

    # (a) BFS balls
    for v in range(n):
        size = 0
        layers = bfs_layers(G, [v])
        layer = next(layers)
        while layer:
            size += len(layer)
            visits += len(layer)
            if size > hi:
                break
            nxt = next(layers, [])
            if size >= lo and _violates(p, n, size, len(nxt)):
                ball = set()
                for r, lay in enumerate(bfs_layers(G, [v])):
                    ball.update(lay)
                    if len(ball) == size:
                        break
                return ViolatorSearch(frozenset(ball), "ball", visits, False)
            layer = nxt
            if visits > budget:
                return ViolatorSearch(None, None, visits, True)

    # (b) low-degree peeling prefixes
    order = _degeneracy_order(G)
    inside = [False] * n
    contact = [0] * n
    boundary = 0
    for idx, v in enumerate(order[:hi]):
        if contact[v] > 0:
            boundary -= 1
        inside[v] = True
        for w in G.adj[v]:
            if not inside[w]:
                contact[w] += 1
                if contact[w] == 1:
                    boundary += 1
        visits += 1 + len(G.adj[v])
        size = idx + 1
        if size >= lo and _violates(p, n, size, boundary):
            return ViolatorSearch(frozenset(order[:size]), "peel", visits, False)
    if visits > budget:
        return ViolatorSearch(None, None, visits, True)

    # (c) exhaustive subsets for small graphs
    if n <= exhaustive_threshold:
        masks = [0] * n
        for v in range(n):
            for w in G.adj[v]:
                masks[v] |= 1 << w
        for size in range(lo, hi + 1):
            need = epsilon(size, p) * size - TOL
            for combo in combinations(range(n), size):
                visits += 1
                xm = 0
                nm = 0
                for v in combo:
                    xm |= 1 << v
                    nm |= masks[v]
                if bin(nm & ~xm).count("1") < need:
                    return ViolatorSearch(frozenset(combo), "exhaustive", visits, False)
                if visits > budget:
                    return ViolatorSearch(None, None, visits, True)
    return ViolatorSearch(None, None, visits, False)


def find_violating_set(
    G: Graph, p: ExpanderParams, budget: int = 200_000, exhaustive_threshold: int = 18
) -> Optional[frozenset]:
    """Sound refutation of expansion; ``None`` is not a proof of expansion."""
    return search_violating_set(G, p, budget, exhaustive_threshold).violator


# --- extraction -------------------------------------------------------------


class ExtractionError(RuntimeError):
    def __init__(self, message: str, trace: list):
        super().__init__(message)
        self.trace = trace


@dataclass
class ExtractionReport:
    labels: tuple[int, ...]
    input_average: Fraction
    average: Fraction
    min_degree: int
    rounds: int
    heuristically_expanding: bool
    budget_exhausted: bool
    degenerate: bool
    trace: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "n": len(self.labels),
            "input_average_degree": str(self.input_average),
            "average_degree": str(self.average),
            "min_degree": self.min_degree,
            "rounds": self.rounds,
            "heuristically_expanding": self.heuristically_expanding,
            "budget_exhausted": self.budget_exhausted,
            "degenerate": self.degenerate,
            "trace": self.trace,
        }


def peel(G: Graph) -> tuple[Graph, tuple[int, ...]]:
    """Delete minimum-degree vertices while ``deg < d(current)/2``.

    Deleting a vertex of degree at most half the average never lowers the
    average, so the result has ``d >= d(G)`` and ``delta >= d/2``.
    """
    n = G.n
    deg = [len(a) for a in G.adj]
    alive = [True] * n
    nv, e = n, G.m
    heap = [(deg[v], v) for v in range(n)]
    heapq.heapify(heap)
    while heap and nv > 1:
        d, v = heap[0]
        if not alive[v] or d != deg[v]:
            heapq.heappop(heap)
            continue
        # deg < (2e/nv)/2  <=>  deg * nv < e
        if d * nv >= e:
            break
        heapq.heappop(heap)
        alive[v] = False
        nv -= 1
        e -= d
        for w in G.adj[v]:
            if alive[w]:
                deg[w] -= 1
                heapq.heappush(heap, (deg[w], w))
    keep = [v for v in range(n) if alive[v]]
    return G.induced(keep)


def _compose(outer: tuple[int, ...], inner: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(outer[i] for i in inner)


def _is_forest(G: Graph) -> bool:
    from .graph import girth

    return girth(G) is None


def extract_expander_subgraph(
    G: Graph,
    p: ExpanderParams,
    budget: int = 200_000,
    exhaustive_threshold: int = 18,
    max_rounds: int = 100,
) -> tuple[Graph, ExtractionReport]:
    """Subgraph ``H`` with ``d(H) >= d(G)/2`` and ``delta(H) >= d(H)/2``.

    After peeling, violators found by :func:`search_violating_set` split the
    graph into ``G[X + N(X)]`` or ``H - X`` (larger average degree wins) as
    long as the degree floor survives.  The two degree inequalities are
    asserted; expansion is only heuristic.
    """
    if G.m < 1:
        raise ExtractionError("graph has no edges", [])
    floor = average_degree(G) / 2
    H, labels = peel(G)
    trace: list = [{"step": "peel", "n": H.n, "average_degree": str(average_degree(H))}]
    rounds = 0
    expanding = False
    exhausted = False
    while rounds < max_rounds:
        search = search_violating_set(H, p, budget, exhaustive_threshold)
        exhausted = search.budget_exhausted
        X = search.violator
        if X is None:
            expanding = not exhausted
            break
        rounds += 1
        closed = set(X)
        for v in X:
            closed.update(H.adj[v])
        pieces = []
        for name, keep in (("closed_neighbourhood", sorted(closed)), ("complement", sorted(set(range(H.n)) - X))):
            sub, sub_labels = H.induced(keep)
            if sub.m == 0:
                continue
            sub, inner = peel(sub)
            sub_labels = _compose(sub_labels, inner)
            pieces.append((average_degree(sub), -min(labels[i] for i in sub_labels), name, sub, sub_labels))
        entry = {"step": "split", "violator_size": len(X), "family": search.family}
        if not pieces:
            entry["accepted"] = False
            trace.append(entry)
            break
        avg, _, name, sub, sub_labels = max(pieces, key=lambda t: (t[0], t[1]))
        if avg < floor:
            entry["accepted"] = False
            entry["best_average_degree"] = str(avg)
            trace.append(entry)
            log.info("violator split rejected: best piece has d=%s below floor %s", avg, floor)
            break
        entry.update(accepted=True, piece=name, n=sub.n, average_degree=str(avg))
        trace.append(entry)
        H = sub
        labels = _compose(labels, sub_labels)
    avg, dmin, _ = degree_stats_safe(H)
    if H.n == 0 or H.m == 0:
        raise ExtractionError("extraction exhausted the graph", trace)
    assert avg >= floor, "d(H) >= d(G)/2 violated"
    assert 2 * dmin >= avg, "delta(H) >= d(H)/2 violated"
    report = ExtractionReport(
        labels=labels,
        input_average=average_degree(G),
        average=avg,
        min_degree=dmin,
        rounds=rounds,
        heuristically_expanding=expanding,
        budget_exhausted=exhausted,
        degenerate=_is_forest(H),
        trace=trace,
    )
    return H, report


def degree_stats_safe(H: Graph) -> tuple[Fraction, int, int]:
    if H.n == 0:
        return Fraction(0), 0, 0
    degs = [len(a) for a in H.adj]
    return Fraction(2 * H.m, H.n), min(degs), max(degs)


# --- thinness and robust growth ---------------------------------------------


@dataclass
class ThinVerdict:
    passed: bool
    radius: Optional[int] = None
    hits: Optional[int] = None
    bound: Optional[float] = None
    profile: list = field(default_factory=list)


def thin_profile(
    G: Graph, U: Iterable[int], A: Iterable[int], horizon: int, blocked: Iterable[int] = ()
) -> list[int]:
    """``|N(B^{i-1}_{G-U}(A)) cap U|`` for ``i = 1..horizon`` inside ``G - blocked``."""
    Us = set(U)
    Bs = set(blocked)
    out = []
    touched: set[int] = set()
    layers = bfs_layers(G, A, Us | Bs)
    for i in range(1, horizon + 1):
        layer = next(layers, None)
        if layer is not None:
            for u in layer:
                for w in G.adj[u]:
                    if w in Us and w not in Bs:
                        touched.add(w)
        out.append(len(touched))
    return out


def is_thin_around(
    G: Graph, U: Iterable[int], A: Iterable[int], t: ThinnessParams, blocked: Iterable[int] = ()
) -> ThinVerdict:
    """Is ``U`` (lambda, power)-thin around ``A`` for radii ``1..horizon``?

    ``blocked`` evaluates the condition in ``G - blocked``.
    """
    Us, As = set(U), set(A)
    if Us & As:
        raise GraphError("U and A must be disjoint")
    prof = thin_profile(G, Us, As, t.horizon, blocked)
    for i, hits in enumerate(prof, start=1):
        bound = t.lam * i**t.power
        if hits > bound + TOL:
            return ThinVerdict(False, i, hits, bound, prof)
    return ThinVerdict(True, profile=prof)


@dataclass
class GrowthTrace:
    sizes: list[int]
    boundary_hits: list[int]
    y_small: Optional[bool] = None
    w_thin: Optional[bool] = None
    conclusion_holds: Optional[bool] = None
    r_in_range: Optional[bool] = None

    def to_json(self) -> dict:
        return {
            "sizes": self.sizes,
            "boundary_hits": self.boundary_hits,
            "y_small": self.y_small,
            "w_thin": self.w_thin,
            "conclusion_holds": self.conclusion_holds,
            "r_in_range": self.r_in_range,
        }


def grow_ball_robust(
    G: Graph,
    X: Iterable[int],
    Y: Iterable[int] = (),
    W: Iterable[int] = (),
    r: int = 1,
    p: Optional[ExpanderParams] = None,
    thin: Optional[ThinnessParams] = None,
    measure: bool = True,
) -> tuple[frozenset, GrowthTrace]:
    """``B^r_{G-W-Y}(X)`` with its growth trace and hypothesis/conclusion flags.

    The flags are measurements only; nothing is enforced.
    """
    Xs, Ys, Ws = set(X), set(Y), set(W)
    if not Xs:
        raise GraphError("X must be non-empty")
    if Xs & (Ys | Ws):
        raise GraphError("X must be disjoint from Y and W")
    sizes: list[int] = []
    hits: list[int] = []
    Z: set[int] = set()
    touched: set[int] = set()
    layers = bfs_layers(G, Xs, Ys | Ws)
    for i in range(r + 1):
        layer = next(layers, [])
        Z.update(layer)
        sizes.append(len(Z))
        if i == r:
            break
        for u in layer:
            for w in G.adj[u]:
                if w in Ws and w not in Ys:
                    touched.add(w)
        hits.append(len(touched))
    trace = GrowthTrace(sizes, hits)
    if not measure:
        return frozenset(Z), trace
    if p is not None:
        trace.y_small = len(Ys) <= 0.25 * epsilon(len(Xs), p) * len(Xs) + TOL
    if r >= 1:
        t = thin or ThinnessParams(horizon=r)
        trace.w_thin = is_thin_around(G, Ws - Ys, Xs, t, blocked=Ys).passed
        trace.r_in_range = G.n > 1 and r <= math.log(G.n)
    trace.conclusion_holds = len(Z) >= math.exp(r**0.25) - TOL
    return frozenset(Z), trace


def link_sets(
    G: Graph,
    X1: Iterable[int],
    X2: Iterable[int],
    avoid: Iterable[int] = (),
    max_len: Optional[int] = None,
) -> Optional[tuple[int, ...]]:
    """Shortest ``X1``-``X2`` path in ``G - avoid`` if its length is within ``max_len``."""
    path = shortest_path_between_sets(G, X1, X2, avoid)
    if path is None:
        return None
    if max_len is not None and len(path) - 1 > max_len:
        return None
    return path


@dataclass
class LargeBall:
    vertices: frozenset
    center: int
    radius: int
    size_ok: bool
    radius_ok: bool

    @property
    def success(self) -> bool:
        return self.size_ok and self.radius_ok


def find_large_ball_avoiding(
    G: Graph,
    W: Iterable[int],
    p: ExpanderParams,
    max_starts: Optional[int] = None,
    max_radius: Optional[int] = None,
) -> Optional[LargeBall]:
    """Largest BFS ball of ``G - W`` over the probed centres, smallest radius on ties.

    Centres are drawn from the largest component (smallest labels first,
    at most ``max_starts`` of them).
    """
    Ws = set(W)
    free = [v for v in range(G.n) if v not in Ws]
    if not free:
        return None
    seen: set[int] = set()
    best_comp: list[int] = []
    for v in free:
        if v in seen:
            continue
        comp = set()
        for layer in bfs_layers(G, [v], Ws):
            comp.update(layer)
        seen |= comp
        if len(comp) > len(best_comp):
            best_comp = sorted(comp)
    starts = best_comp if max_starts is None else best_comp[:max_starts]
    best = None
    for s in starts:
        ball_set: set[int] = set()
        radius = -1
        for layer in bfs_layers(G, [s], Ws, max_radius):
            ball_set.update(layer)
            radius += 1
        key = (-len(ball_set), radius, s)
        if best is None or key < best[0]:
            best = (key, frozenset(ball_set), s, radius)
    _, verts, center, radius = best
    n = G.n
    size_ok = len(verts) >= n / 25
    radius_ok = n > 1 and radius <= 100 / p.eps1 * math.log(n) ** 3
    return LargeBall(verts, center, radius, size_ok, radius_ok)
