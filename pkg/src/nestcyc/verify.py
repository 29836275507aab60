"""Ground truth: crossing tests, certificate verification, cycle enumeration
and a brute-force search for nested cycles without crossings.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterable, Iterator, Optional, Sequence

from .graph import Graph, bfs_layers, canonical_cycle, cycle_edges


def chords_cross(length: int, e: Sequence[int], f: Sequence[int]) -> bool:
    """Do chords ``e`` and ``f`` of a cycle with positions ``1..length`` interleave?

    Chords sharing an endpoint never cross.
    """
    a, b = sorted(e)
    c, d = sorted(f)
    for x in (a, b, c, d):
        if not 1 <= x <= length:
            raise ValueError(f"index {x} outside 1..{length}")
    if len({a, b, c, d}) < 4:
        return False
    return (a < c < b) != (a < d < b)


def chords_cross_naive(length: int, e: Sequence[int], f: Sequence[int]) -> bool:
    """Literal pattern: some naming ``e = {i, i'}``, ``f = {j, j'}`` with ``i < j < i' < j'``."""
    for x, y in ((e, f), (f, e)):
        for i, ip in permutations(x):
            for j, jp in permutations(y):
                if i < j < ip < jp:
                    return True
    return False


@dataclass
class Verdict:
    passed: bool
    failures: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"passed": self.passed, "failures": self.failures}


def _cycle_problems(G: Graph, name: str, cyc: Sequence[int]) -> list:
    out = []
    if len(cyc) < 3:
        out.append({"clause": "a", "cycle": name, "detail": f"length {len(cyc)} < 3"})
        return out
    if len(set(cyc)) != len(cyc):
        out.append({"clause": "a", "cycle": name, "detail": "repeated vertex"})
    for v in cyc:
        if not 0 <= v < G.n:
            out.append({"clause": "a", "cycle": name, "detail": f"vertex {v} not in G"})
            return out
    k = len(cyc)
    for i in range(k):
        u, v = cyc[i], cyc[(i + 1) % k]
        if not G.has_edge(u, v):
            out.append({"clause": "a", "cycle": name, "detail": f"missing edge {u}-{v}"})
    return out


def verify_nested_no_crossings(G: Graph, outer: Sequence[int], inner: Sequence[int]) -> Verdict:
    """Itemised check that ``(outer, inner)`` are nested cycles without crossings in ``G``.

    Clauses: (a) both are cycles of G, (b) V(inner) within V(outer),
    (c) no shared edge, (d) no two inner edges cross under outer's indexing.
    """
    outer = [int(v) for v in outer]
    inner = [int(v) for v in inner]
    fails = _cycle_problems(G, "outer", outer) + _cycle_problems(G, "inner", inner)
    if fails:
        return Verdict(False, fails)
    missing = sorted(set(inner) - set(outer))
    if missing:
        fails.append({"clause": "b", "detail": f"inner vertices not on outer: {missing}"})
    shared = sorted(cycle_edges(inner) & cycle_edges(outer))
    if shared:
        fails.append({"clause": "c", "detail": "shared edges", "edges": [list(e) for e in shared]})
    if not missing:
        pos = {v: i + 1 for i, v in enumerate(outer)}
        chords = [(inner[i], inner[(i + 1) % len(inner)]) for i in range(len(inner))]
        for x in range(len(chords)):
            for y in range(x + 1, len(chords)):
                e, f = chords[x], chords[y]
                if chords_cross(len(outer), (pos[e[0]], pos[e[1]]), (pos[f[0]], pos[f[1]])):
                    fails.append({"clause": "d", "detail": "crossing inner edges", "edges": [list(e), list(f)]})
    return Verdict(not fails, fails)


# --- cycle enumeration ------------------------------------------------------


@dataclass(frozen=True)
class SearchCaps:
    max_cycles: int = 1_000_000
    max_cycle_length: Optional[int] = None
    time_budget: Optional[float] = None

    def __post_init__(self):
        if self.max_cycles < 1:
            raise ValueError("max_cycles must be positive")
        if self.max_cycle_length is not None and self.max_cycle_length < 3:
            raise ValueError("max_cycle_length must be at least 3")
        if self.time_budget is not None and self.time_budget <= 0:
            raise ValueError("time_budget must be positive")


def cycles_of_length(G: Graph, length: int) -> Iterator[tuple[int, ...]]:
    """Canonical cycles of exactly ``length``, by start vertex then lexicographically."""
    adj = G.adj
    for s in range(G.n):
        dist: dict[int, int] = {}
        for r, layer in enumerate(bfs_layers(G, [s], range(s), length // 2 + 1)):
            for v in layer:
                dist[v] = r
        path = [s]
        on = {s}

        def extend() -> Iterator[tuple[int, ...]]:
            u = path[-1]
            depth = len(path)
            if depth == length:
                if s in G.neighbor_set(u) and path[1] < path[-1]:
                    yield tuple(path)
                return
            remaining = length - depth
            for w in adj[u]:
                if w <= s or w in on or dist.get(w, length + 1) > remaining:
                    continue
                path.append(w)
                on.add(w)
                yield from extend()
                path.pop()
                on.discard(w)

        yield from extend()


class CycleStream:
    """Iterator over canonical cycles ordered by length; ``truncated`` is set if a cap hit."""

    def __init__(self, G: Graph, caps: SearchCaps = SearchCaps()):
        self.G = G
        self.caps = caps
        self.truncated = False
        self.count = 0
        self.done = False

    def __iter__(self):
        caps = self.caps
        top = self.G.n if caps.max_cycle_length is None else min(caps.max_cycle_length, self.G.n)
        start = time.monotonic()
        for length in range(3, top + 1):
            for cyc in cycles_of_length(self.G, length):
                if self.count >= caps.max_cycles or (
                    caps.time_budget is not None and time.monotonic() - start > caps.time_budget
                ):
                    self.truncated = True
                    return
                self.count += 1
                yield cyc
        if caps.max_cycle_length is not None and caps.max_cycle_length < self.G.n:
            # longer cycles were never looked at
            self.truncated = self.truncated or _has_longer_cycles(self.G, caps.max_cycle_length)
        self.done = True


def _has_longer_cycles(G: Graph, length: int) -> bool:
    for L in range(length + 1, G.n + 1):
        for _ in cycles_of_length(G, L):
            return True
    return False


def enumerate_cycles(G: Graph, caps: SearchCaps = SearchCaps()) -> CycleStream:
    """Every simple cycle (canonical form, each once) up to the caps."""
    return CycleStream(G, caps)


# --- brute-force oracle -----------------------------------------------------


def best_inner_cycle(G: Graph, outer: Sequence[int]) -> Optional[tuple[int, ...]]:
    """Shortest (then canonically least) inner cycle nested in ``outer`` without crossings.

    Inner cycles without crossings visit their vertices in outer's cyclic
    order, so candidates are index subsequences whose consecutive members
    are adjacent in G and not adjacent along outer.
    """
    L = len(outer)
    best: Optional[tuple[int, tuple[int, ...]]] = None
    nbr = G.neighbor_set

    def close(seq: list[int]) -> None:
        nonlocal best
        cand = canonical_cycle([outer[i] for i in seq])
        key = (len(cand), cand)
        if best is None or key < best:
            best = key

    def grow(seq: list[int]) -> None:
        last = seq[-1]
        first = seq[0]
        if best is not None and len(seq) >= best[0]:
            return
        for nxt in range(last + 2, L):
            if outer[nxt] not in nbr(outer[last]):
                continue
            seq.append(nxt)
            if len(seq) >= 3 and first + L - nxt >= 2 and outer[first] in nbr(outer[nxt]):
                close(seq)
            grow(seq)
            seq.pop()

    for first in range(L):
        grow([first])
    return None if best is None else best[1]


@dataclass
class OracleResult:
    pair: Optional[tuple[tuple[int, ...], tuple[int, ...]]]
    exhaustive: bool
    cycles_examined: int

    def to_json(self) -> dict:
        return {
            "found": self.pair is not None,
            "outer": list(self.pair[0]) if self.pair else None,
            "inner": list(self.pair[1]) if self.pair else None,
            "exhaustive": self.exhaustive,
            "cycles_examined": self.cycles_examined,
        }


def oracle_find_nested_pair(G: Graph, caps: SearchCaps = SearchCaps()) -> OracleResult:
    """First verified pair under the order (outer length, inner length, canonical forms).

    ``exhaustive`` is true when the enumeration was never truncated; only
    then does an empty result certify that no pair exists.
    """
    stream = enumerate_cycles(G, caps)
    group_len = None
    best = None
    for outer in stream:
        if len(outer) != group_len:
            if best is not None:
                break
            group_len = len(outer)
        inner = best_inner_cycle(G, outer)
        if inner is None:
            continue
        key = (len(inner), outer, inner)
        if best is None or key < best:
            best = key
            if len(inner) == 3:
                # outers arrive in canonical order, so nothing later in the group beats this
                break
    if best is not None:
        _, outer, inner = best
        verdict = verify_nested_no_crossings(G, outer, inner)
        assert verdict.passed, f"oracle produced an invalid pair: {verdict.failures}"
        return OracleResult((outer, inner), not stream.truncated, stream.count)
    return OracleResult(None, not stream.truncated, stream.count)


def oracle_find_nested_pair_naive(G: Graph, caps: SearchCaps = SearchCaps()) -> OracleResult:
    """All ordered pairs of enumerated cycles, checked with the verifier (small graphs only)."""
    stream = enumerate_cycles(G, caps)
    cycles = list(stream)
    pairs = sorted(
        ((len(o), len(i), o, i) for o in cycles for i in cycles if len(i) <= len(o)),
    )
    for _, _, o, i in pairs:
        if verify_nested_no_crossings(G, o, i).passed:
            return OracleResult((o, i), True, len(cycles))
    return OracleResult(None, not stream.truncated, len(cycles))


# --- small-n scans ----------------------------------------------------------


@dataclass
class ScanRow:
    n: int
    m: int
    samples: int
    hits: int
    exhaustive: bool

    @property
    def fraction(self) -> float:
        return self.hits / self.samples if self.samples else 0.0

    def csv_line(self) -> str:
        return f"{self.n},{self.m},{self.samples},{self.fraction:.6f},{str(self.exhaustive).lower()}"


@dataclass
class ScanTable:
    rows: list
    min_m_with_pair: Optional[int]

    CSV_HEADER = "n,m,samples,fraction,exhaustive"

    def to_csv(self) -> str:
        return "\n".join([self.CSV_HEADER] + [r.csv_line() for r in self.rows]) + "\n"

    def to_json(self) -> dict:
        return {
            "rows": [
                {"n": r.n, "m": r.m, "samples": r.samples, "fraction": r.fraction, "exhaustive": r.exhaustive}
                for r in self.rows
            ],
            "min_m_with_pair": self.min_m_with_pair,
        }


def _scan_one(args) -> tuple[bool, bool]:
    n, m, seed, caps = args
    from .generators import STREAM_SCAN, gnm, rng_for

    G = gnm(n, m, rng_for(seed, STREAM_SCAN))
    res = oracle_find_nested_pair(G, caps)
    return res.pair is not None, res.exhaustive


def extremal_scan(
    n: int,
    m_values: Iterable[int],
    samples: int,
    caps: SearchCaps = SearchCaps(),
    seed: int = 0,
    jobs: int = 1,
    max_n: int = 12,
) -> ScanTable:
    """Fraction of sampled ``G(n, m)`` graphs that hold a nested pair without crossings.

    Sample ``s`` for edge count ``m`` uses seed ``seed + 1_000_003 * m + s``, so
    rows are reproducible independently of each other and of ``jobs``.
    A row is exhaustive only if every sample's search was.
    """
    if n > max_n:
        raise ValueError(f"n={n} exceeds the exhaustive scan limit {max_n}")
    if samples < 1:
        raise ValueError("samples must be positive")
    ms = list(m_values)
    top = n * (n - 1) // 2
    for m in ms:
        if not 0 <= m <= top:
            raise ValueError(f"m={m} outside 0..{top}")
    tasks = [(n, m, seed + 1_000_003 * m + s, caps) for m in ms for s in range(samples)]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_scan_one, tasks))
    else:
        results = [_scan_one(t) for t in tasks]
    rows = []
    min_m = None
    for a, m in enumerate(ms):
        chunk = results[a * samples : (a + 1) * samples]
        hits = sum(1 for found, _ in chunk if found)
        rows.append(ScanRow(n, m, samples, hits, all(ex for _, ex in chunk)))
        if hits and (min_m is None or m < min_m):
            min_m = m
    return ScanTable(rows, min_m)
