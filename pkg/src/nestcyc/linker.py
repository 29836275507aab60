"""Path systems from a shortest cycle to hub vertices or to blobs.

A path system is grown greedily by ball growth plus short linking, shortened
path-by-path to a local fixpoint, and audited against the contact bounds a
globally minimal system would satisfy.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .expander import ThinnessParams, grow_ball_robust, link_sets, thin_profile
from .graph import Graph, bfs_layers, is_path, shortest_path_between_sets

log = logging.getLogger(__name__)

HUBS = "hubs"
BLOBS = "blobs"


@dataclass
class PathSystem:
    """Paths from ``base_cycle`` vertices to targets.

    For ``target_kind == "hubs"`` targets are single vertices; for
    ``"blobs"`` they are vertex sets and ``path_targets`` holds blob indices.
    Paths run from their cycle vertex to the target vertex.
    """

    base_cycle: tuple[int, ...]
    target_kind: str
    targets: list  # hubs: list[int]; blobs: list[frozenset]
    paths: list[tuple[int, ...]] = field(default_factory=list)
    path_targets: list[int] = field(default_factory=list)
    max_len: Optional[int] = None
    per_vertex: dict = field(default_factory=dict)  # cycle vertex -> capacity
    blocked: frozenset = frozenset()

    def usage(self) -> dict[int, int]:
        out = {v: 0 for v in self.base_cycle}
        for P in self.paths:
            out[P[0]] += 1
        return out

    def total_length(self) -> int:
        return sum(len(P) - 1 for P in self.paths)

    def target_vertices(self) -> set[int]:
        if self.target_kind == HUBS:
            return set(self.targets)
        out: set[int] = set()
        for b in self.targets:
            out |= set(b)
        return out

    def used_targets(self) -> set[int]:
        return set(self.path_targets)

    def capacity(self, v: int) -> int:
        return self.per_vertex.get(v, 0)

    def to_json(self) -> dict:
        return {
            "base_cycle": list(self.base_cycle),
            "target_kind": self.target_kind,
            "paths": [list(P) for P in self.paths],
            "path_targets": list(self.path_targets),
            "total_length": self.total_length(),
        }


def check_path_system(G: Graph, S: PathSystem) -> list[str]:
    """Independent invariant checker; returns a list of violations (empty = valid)."""
    problems = []
    cyc = set(S.base_cycle)
    tv = S.target_vertices()
    seen_outside: dict[int, int] = {}
    counts: dict[int, int] = {}
    for idx, (P, t) in enumerate(zip(S.paths, S.path_targets)):
        if not is_path(G, P) or len(P) < 2:
            problems.append(f"path {idx} is not a path of G")
            continue
        if P[0] not in cyc:
            problems.append(f"path {idx} does not start on the base cycle")
        end_ok = P[-1] == t if S.target_kind == HUBS else P[-1] in S.targets[t]
        if not end_ok:
            problems.append(f"path {idx} does not end in its target")
        for w in P[1:-1]:
            if w in cyc or w in tv:
                problems.append(f"path {idx} has internal vertex {w} on the cycle or in a target")
            if w in S.blocked:
                problems.append(f"path {idx} uses blocked vertex {w}")
        for w in P[1:]:
            if w in seen_outside:
                problems.append(f"paths {seen_outside[w]} and {idx} share vertex {w}")
            seen_outside[w] = idx
        counts[P[0]] = counts.get(P[0], 0) + 1
        if S.max_len is not None and len(P) - 1 > S.max_len:
            problems.append(f"path {idx} has length {len(P) - 1} > {S.max_len}")
    for v, c in counts.items():
        if c > S.capacity(v):
            problems.append(f"cycle vertex {v} is in {c} paths (capacity {S.capacity(v)})")
    if len(set(S.path_targets)) != len(S.path_targets):
        problems.append("a target is linked by more than one path")
    return problems


def _assert_valid(G: Graph, S: PathSystem) -> None:
    problems = check_path_system(G, S)
    assert not problems, f"path system invariant broken: {problems}"


def _avoid_set(S: PathSystem, v: int, skip: Optional[int] = None) -> set[int]:
    """Vertices a new path from ``v`` may not use internally."""
    avoid = set(S.base_cycle) | S.target_vertices() | set(S.blocked)
    for idx, P in enumerate(S.paths):
        if idx != skip:
            avoid.update(P)
    avoid.discard(v)
    return avoid


def _free_target_vertices(S: PathSystem, skip: Optional[int] = None) -> dict[int, int]:
    """Map target vertex -> target id for targets not used by any path (except ``skip``)."""
    used = {t for idx, t in enumerate(S.path_targets) if idx != skip}
    out = {}
    if S.target_kind == HUBS:
        for t in S.targets:
            if t not in used and t not in S.blocked:
                out[t] = t
    else:
        for i, b in enumerate(S.targets):
            if i not in used:
                for w in b:
                    if w not in S.blocked:
                        out[w] = i
    return out


def default_radius(n: int) -> int:
    if n < 3:
        return 1
    return max(1, math.ceil(math.log(math.log(n)) ** 10)) if math.log(n) > 1 else 1


def _augment_once(G: Graph, S: PathSystem, v: int, r: int) -> Optional[tuple[tuple[int, ...], int]]:
    free = _free_target_vertices(S)
    if not free:
        return None
    avoid = _avoid_set(S, v)
    for t in free:
        avoid.discard(t)
    # grow the ball around v inside G - U - targets, then link it to a free target
    interior_avoid = avoid | set(free)
    ball, _ = grow_ball_robust(G, [v], W=interior_avoid, r=r, measure=False)
    Q = link_sets(G, ball, free.keys(), avoid - ball)
    if Q is None:
        return None
    # extend inside the ball from v to Q's start
    head = shortest_path_between_sets(G, [v], [Q[0]], set(range(G.n)) - ball)
    path = head + Q[1:]
    if len(set(path)) != len(path):
        return None
    if S.max_len is not None and len(path) - 1 > S.max_len:
        return None
    return path, free[path[-1]]


def build_path_system(
    G: Graph,
    C: Sequence[int],
    targets,
    target_kind: str = HUBS,
    max_len: Optional[int] = None,
    per_vertex: Optional[dict] = None,
    eligible: Optional[Iterable[int]] = None,
    blocked: Iterable[int] = (),
    radius: Optional[int] = None,
) -> PathSystem:
    """Greedy maximal path system from the cycle ``C`` to ``targets``.

    Repeatedly picks the smallest eligible cycle vertex with spare capacity
    and links it to the nearest free target; a vertex that cannot be
    augmented is retired.  ``blocked`` vertices are treated as deleted.
    """
    C = tuple(C)
    if target_kind == HUBS:
        tlist = sorted(set(targets))
        if set(tlist) & set(C):
            raise ValueError("hub targets must be disjoint from the cycle")
    else:
        tlist = [frozenset(b) for b in targets]
        for b in tlist:
            if b & set(C):
                raise ValueError("blob targets must be disjoint from the cycle")
    elig = set(C) if eligible is None else set(eligible)
    caps = {v: (per_vertex or {}).get(v, 2) if v in elig else 0 for v in C}
    S = PathSystem(C, target_kind, tlist, max_len=max_len, per_vertex=caps, blocked=frozenset(blocked))
    r = radius if radius is not None else min(default_radius(G.n), G.n)
    retired: set[int] = set()
    while True:
        use = S.usage()
        candidates = sorted(v for v in C if v not in retired and use[v] < S.capacity(v))
        if not candidates:
            break
        v = candidates[0]
        found = _augment_once(G, S, v, r)
        if found is None:
            retired.add(v)
            continue
        path, tid = found
        S.paths.append(path)
        S.path_targets.append(tid)
        _assert_valid(G, S)
    return S


def _best_replacement(G: Graph, S: PathSystem, idx: int, start: Optional[int] = None):
    P = S.paths[idx]
    v = P[0] if start is None else start
    free = _free_target_vertices(S, skip=idx)
    if not free:
        return None
    avoid = _avoid_set(S, v, skip=idx)
    for t in free:
        avoid.discard(t)
    path = shortest_path_between_sets(G, [v], free.keys(), avoid)
    if path is None or len(path) < 2:
        return None
    return path, free[path[-1]]


def _shortest_replacement(G: Graph, S: PathSystem, idx: int):
    """Best replacement for path ``idx`` from its own start or any cycle vertex with spare capacity."""
    use = S.usage()
    own = S.paths[idx][0]
    starts = [own] + [c for c in S.base_cycle if c != own and use[c] < S.capacity(c)]
    best = None
    for c in starts:
        rep = _best_replacement(G, S, idx, start=c)
        if rep is not None and (best is None or len(rep[0]) < len(best[0])):
            best = rep
    return best


def shorten_path_system(G: Graph, S: PathSystem, max_rounds: int = 10_000) -> PathSystem:
    """Replace single paths by strictly shorter ones until none improves.

    A replacement may start at the path's own cycle vertex or at any cycle
    vertex with spare capacity.
    """
    paths = list(S.paths)
    tids = list(S.path_targets)
    S = PathSystem(
        S.base_cycle, S.target_kind, S.targets, paths, tids, S.max_len, dict(S.per_vertex), S.blocked
    )
    for _ in range(max_rounds):
        improved = False
        for idx in range(len(S.paths)):
            rep = _shortest_replacement(G, S, idx)
            if rep is None:
                continue
            path, tid = rep
            if len(path) < len(S.paths[idx]):
                S.paths[idx] = path
                S.path_targets[idx] = tid
                _assert_valid(G, S)
                improved = True
        if not improved:
            break
    return S


def is_locally_minimal(G: Graph, S: PathSystem) -> bool:
    for idx in range(len(S.paths)):
        rep = _shortest_replacement(G, S, idx)
        if rep is not None and len(rep[0]) < len(S.paths[idx]):
            return False
    return True


# --- audits -----------------------------------------------------------------


@dataclass
class AuditItem:
    passed: bool
    radius: Optional[int] = None
    lhs: Optional[int] = None
    rhs: Optional[float] = None
    path: Optional[int] = None

    def to_json(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


@dataclass
class AuditReport:
    applicable: bool
    vertex: int
    horizon: int = 0
    cycle_contact: Optional[AuditItem] = None
    path_contact: list = field(default_factory=list)
    far_path: Optional[AuditItem] = None
    thinness: Optional[AuditItem] = None
    combined_thinness: Optional[AuditItem] = None

    @property
    def passed(self) -> bool:
        if not self.applicable:
            return True
        items = [self.cycle_contact, self.far_path, self.thinness, self.combined_thinness, *self.path_contact]
        return all(i is None or i.passed for i in items)

    def first_failure(self) -> Optional[AuditItem]:
        for i in [self.cycle_contact, *self.path_contact, self.far_path, self.thinness, self.combined_thinness]:
            if i is not None and not i.passed:
                return i
        return None

    def to_json(self) -> dict:
        return {
            "applicable": self.applicable,
            "vertex": self.vertex,
            "horizon": self.horizon,
            "passed": self.passed,
            "cycle_contact": self.cycle_contact.to_json() if self.cycle_contact else None,
            "path_contact": [p.to_json() for p in self.path_contact],
            "far_path": self.far_path.to_json() if self.far_path else None,
            "thinness": self.thinness.to_json() if self.thinness else None,
            "combined_thinness": self.combined_thinness.to_json() if self.combined_thinness else None,
        }


def _contact_sets(G: Graph, v: int, avoid: set[int], horizon: int) -> list[set[int]]:
    """``N_G(B^{i-1}_{G-avoid}(v))`` for ``i = 1..horizon`` (outside the ball)."""
    out = []
    ball: set[int] = set()
    layers = bfs_layers(G, [v], avoid)
    for _ in range(horizon):
        layer = next(layers, None)
        if layer is not None:
            ball.update(layer)
        nb = set()
        for u in ball:
            nb.update(G.adj[u])
        out.append(nb - ball)
    return out


def cycle_contact_profile(G: Graph, C: Sequence[int], v: int, horizon: int) -> list[int]:
    """``|N_G(B^{i-1}_{G-V(C)}(v)) cap V(C)|`` for ``i = 1..horizon``.

    The ball starts at ``v`` and grows around the rest of the cycle.
    """
    cyc = set(C)
    return thin_profile(G, cyc - {v}, [v], horizon)


def _cycle_ball(C: Sequence[int], v: int, radius: int) -> set[int]:
    k = len(C)
    i = list(C).index(v)
    return {C[(i + d) % k] for d in range(-radius, radius + 1)}


def audit_path_system(
    G: Graph,
    S: PathSystem,
    v: int,
    horizon: Optional[int] = None,
    base: Optional[PathSystem] = None,
) -> AuditReport:
    """Audit the contact bounds around a cycle vertex ``v`` in fewer than two paths.

    ``base`` is the first-level system when ``S`` is a second-level one; the
    combined (18, 2) thinness is then checked for ``U'`` around ``v``.
    """
    C = S.base_cycle
    if v not in C:
        return AuditReport(False, v)
    in_paths = sum(1 for P in S.paths if P[0] == v)
    if base is not None:
        in_paths_base = sum(1 for P in base.paths if P[0] == v)
        if in_paths_base >= 2:
            return AuditReport(False, v)
    if in_paths >= 2:
        return AuditReport(False, v)
    h = horizon if horizon is not None else len(C)
    rep = AuditReport(True, v, h)

    # cycle contact: <= 2i
    prof = cycle_contact_profile(G, C, v, h)
    rep.cycle_contact = AuditItem(True)
    for i, c in enumerate(prof, start=1):
        if c > 2 * i:
            rep.cycle_contact = AuditItem(False, i, c, 2 * i)
            break

    U = set(C)
    for P in S.paths:
        U.update(P)
    if base is not None:
        for P in base.paths:
            U.update(P)
    U.discard(v)
    contacts = _contact_sets(G, v, U, h)

    for pidx, P in enumerate(S.paths):
        item = AuditItem(True, path=pidx)
        Pset = set(P) - set(C)
        for i, nb in enumerate(contacts, start=1):
            c = len(nb & Pset)
            if c > i:
                item = AuditItem(False, i, c, i, pidx)
                break
        rep.path_contact.append(item)

    rep.far_path = AuditItem(True)
    for i, nb in enumerate(contacts, start=1):
        near = _cycle_ball(C, v, 4 * i)
        bad = [pidx for pidx, P in enumerate(S.paths) if P[0] not in near and nb & set(P)]
        if bad:
            rep.far_path = AuditItem(False, i, len(nb & set(S.paths[bad[0]])), 0, bad[0])
            break

    lam = 18.0 if base is not None else 10.0
    item = AuditItem(True)
    for i, nb in enumerate(contacts, start=1):
        c = len(nb & U)
        if c > lam * i * i:
            item = AuditItem(False, i, c, lam * i * i)
            break
    if base is not None:
        rep.combined_thinness = item
        # first-level thinness of V(C) + V(base) around v
        U0 = set(C)
        for P in base.paths:
            U0.update(P)
        U0.discard(v)
        t = ThinnessParams(10.0, 2, h)
        prof0 = thin_profile(G, U0, [v], h)
        rep.thinness = AuditItem(True)
        for i, c in enumerate(prof0, start=1):
            if c > t.lam * i**t.power:
                rep.thinness = AuditItem(False, i, c, t.lam * i**t.power)
                break
    else:
        rep.thinness = item
    return rep


def _reroute(G: Graph, S: PathSystem, v: int) -> bool:
    """Move some path to start at ``v`` if that makes it strictly shorter."""
    best = None
    for idx, P in enumerate(S.paths):
        if P[0] == v:
            continue
        rep = _best_replacement(G, S, idx, start=v)
        if rep is None:
            continue
        path, tid = rep
        gain = len(P) - len(path)
        if gain > 0 and (best is None or gain > best[0]):
            best = (gain, idx, path, tid)
    if best is None:
        return False
    _, idx, path, tid = best
    S.paths[idx] = path
    S.path_targets[idx] = tid
    _assert_valid(G, S)
    return True


@dataclass
class RepairOutcome:
    system: PathSystem
    rounds: int
    audits_passed: bool
    failures: list


def repair_path_system(
    G: Graph, S: PathSystem, max_rounds: int = 50, base: Optional[PathSystem] = None
) -> RepairOutcome:
    """Shorten to fixpoint, audit unsaturated cycle vertices, reroute on failure.

    Every accepted move strictly lowers the total length; after
    ``max_rounds`` the remaining audit failures are reported, not hidden.
    """
    S = shorten_path_system(G, S)
    for rnd in range(max_rounds + 1):
        failures = []
        use = S.usage()
        for v in S.base_cycle:
            if use[v] >= 2:
                continue
            rep = audit_path_system(G, S, v, base=base)
            if rep.applicable and not rep.passed:
                failures.append(rep)
        if not failures:
            return RepairOutcome(S, rnd, True, [])
        if rnd == max_rounds:
            break
        moved = False
        for rep in failures:
            if S.capacity(rep.vertex) > S.usage()[rep.vertex] and _reroute(G, S, rep.vertex):
                moved = True
                break
        if not moved:
            break
        S = shorten_path_system(G, S)
    return RepairOutcome(S, rnd, False, [f.to_json() for f in failures])
