"""Seeded graph generators.

Spec strings: ``complete:N``, ``gnp:N:P``, ``gnm:N:M``, ``regular:N:D``,
``hypercube:DIM``, ``torus:A:B``, ``cycle:N``, ``path:N``, ``petersen``.
"""

from __future__ import annotations

from collections import defaultdict

import numpy as np

from .graph import Graph, GraphError, build_graph

# fixed stream offsets so independent stages never share random draws
STREAM_GENERATE = 0
STREAM_SCAN = 1


def rng_for(seed: int, stream: int = STREAM_GENERATE) -> np.random.Generator:
    bitgen = np.random.PCG64(seed & ((1 << 64) - 1))
    if stream:
        bitgen = bitgen.jumped(stream)
    return np.random.Generator(bitgen)


def complete(n: int) -> Graph:
    return build_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("a cycle needs at least 3 vertices")
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def hypercube(dim: int) -> Graph:
    n = 1 << dim
    return build_graph(n, [(v, v ^ (1 << b)) for v in range(n) for b in range(dim) if v < v ^ (1 << b)])


def torus_grid(a: int, b: int) -> Graph:
    if a < 3 or b < 3:
        raise GraphError("torus sides must be at least 3")
    idx = lambda x, y: (x % a) * b + (y % b)  # noqa: E731
    edges = []
    for x in range(a):
        for y in range(b):
            edges.append((idx(x, y), idx(x + 1, y)))
            edges.append((idx(x, y), idx(x, y + 1)))
    return build_graph(a * b, edges)


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return build_graph(10, outer + spokes + inner)


def gnp(n: int, p: float, rng: np.random.Generator) -> Graph:
    if not 0 <= p <= 1:
        raise GraphError("p must lie in [0, 1]")
    edges = []
    for i in range(n - 1):
        hits = np.nonzero(rng.random(n - i - 1) < p)[0]
        edges.extend((i, i + 1 + int(j)) for j in hits)
    return build_graph(n, edges)


def gnm(n: int, m: int, rng: np.random.Generator) -> Graph:
    total = n * (n - 1) // 2
    if not 0 <= m <= total:
        raise GraphError(f"cannot place {m} edges on {n} vertices")
    picks = np.sort(rng.choice(total, size=m, replace=False)) if m else []
    edges = []
    # decode pair index -> (i, j) in row-major upper-triangular order
    row_start = [i * n - i * (i + 1) // 2 for i in range(n)]
    for t in picks:
        t = int(t)
        lo, hi = 0, n - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if row_start[mid] <= t:
                lo = mid
            else:
                hi = mid - 1
        i = lo
        j = i + 1 + (t - row_start[i])
        edges.append((i, j))
    return build_graph(n, edges)


def random_regular(n: int, d: int, rng: np.random.Generator, max_restarts: int = 1000) -> Graph:
    """Pairing model; defective pairs (loops, repeats) have their stubs re-paired."""
    if (n * d) % 2:
        raise GraphError("n * d must be even")
    if not 0 <= d < n:
        raise GraphError("need 0 <= d < n")
    if d == 0:
        return build_graph(n, [])

    def suitable(edges, pending):
        if not pending:
            return True
        nodes = sorted(pending)
        for a in range(len(nodes)):
            for b in range(a + 1, len(nodes)):
                if (nodes[a], nodes[b]) not in edges:
                    return True
        return False

    for _ in range(max_restarts):
        edges: set[tuple[int, int]] = set()
        stubs = np.repeat(np.arange(n), d)
        ok = True
        while len(stubs):
            rng.shuffle(stubs)
            pending: dict[int, int] = defaultdict(int)
            for s1, s2 in zip(stubs[0::2].tolist(), stubs[1::2].tolist()):
                u, v = (s1, s2) if s1 < s2 else (s2, s1)
                if u != v and (u, v) not in edges:
                    edges.add((u, v))
                else:
                    pending[u] += 1
                    pending[v] += 1
            if not suitable(edges, pending):
                ok = False
                break
            stubs = np.array([v for v in sorted(pending) for _ in range(pending[v])], dtype=np.int64)
        if ok:
            return build_graph(n, edges)
    raise GraphError(f"random_regular({n}, {d}) failed after {max_restarts} restarts")


def parse_spec(spec: str) -> tuple[str, list]:
    parts = spec.split(":")
    name = parts[0].strip().lower()
    args = parts[1:]
    arity = {
        "complete": 1, "gnp": 2, "gnm": 2, "regular": 2, "random_regular": 2,
        "hypercube": 1, "torus": 2, "torus_grid": 2, "cycle": 1, "path": 1, "petersen": 0,
    }
    if name not in arity:
        raise GraphError(f"unknown generator {name!r}")
    if len(args) != arity[name]:
        raise GraphError(f"generator {name!r} takes {arity[name]} argument(s), got {len(args)}")
    try:
        vals = [float(a) if name == "gnp" and i == 1 else int(a) for i, a in enumerate(args)]
    except ValueError:
        raise GraphError(f"bad numeric argument in generator spec {spec!r}") from None
    return name, vals


def generate_graph(spec: str, seed: int = 0) -> Graph:
    """Deterministic under ``(spec, seed)``."""
    name, a = parse_spec(spec)
    if any(isinstance(x, int) and x < 0 for x in a):
        raise GraphError("generator arguments must be non-negative")
    if name == "complete":
        return complete(a[0])
    if name == "cycle":
        return cycle_graph(a[0])
    if name == "path":
        return path_graph(a[0])
    if name == "petersen":
        return petersen()
    if name == "hypercube":
        return hypercube(a[0])
    if name in ("torus", "torus_grid"):
        return torus_grid(a[0], a[1])
    rng = rng_for(seed)
    if name == "gnp":
        return gnp(a[0], a[1], rng)
    if name == "gnm":
        return gnm(a[0], a[1], rng)
    return random_regular(a[0], a[1], rng)
