import networkx as nx
import pytest

from nestcyc.graph import Graph, build_graph
from nestcyc.kraken import CASE_BLOBS, Kraken


def to_nx(G: Graph) -> nx.Graph:
    H = nx.Graph()
    H.add_nodes_from(range(G.n))
    H.add_edges_from(G.sorted_edges())
    return H


def from_nx(H: nx.Graph) -> Graph:
    H = nx.convert_node_labels_to_integers(H, ordering="sorted")
    return build_graph(H.number_of_nodes(), H.edges())


def two_cliques(a: int) -> Graph:
    """Two copies of K_a, vertex a-1 bridged to vertex a."""
    edges = [(i, j) for i in range(a) for j in range(i + 1, a)]
    edges += [(i + a, j + a) for i, j in edges]
    edges.append((a - 1, a))
    return build_graph(2 * a, edges)


# Octagon 0..7 plus inner chords: the first inner cycle is crossing-free, the second crosses.
OCT_OUTER = tuple(range(8))
OCT_NESTED = (0, 2, 4, 6)
OCT_CROSSING = (0, 2, 6, 1, 3)


def octagon_graph(inner) -> Graph:
    edges = [(i, (i + 1) % 8) for i in range(8)]
    edges += [(inner[i], inner[(i + 1) % len(inner)]) for i in range(len(inner))]
    return build_graph(8, edges)


@pytest.fixture
def oct_nested():
    return octagon_graph(OCT_NESTED)


@pytest.fixture
def oct_crossing():
    return octagon_graph(OCT_CROSSING)


def hand_kraken(arm_extra=0, extra_edges=()):
    """Triangle 0,1,2; anchor 3+2i+j on a single-edge arm; blob {a, a+6}.

    ``arm_extra`` > 0 stretches arm (0, 0) through vertices 15, 16, ...
    """
    edges = [(0, 1), (1, 2), (2, 0)]
    anchors, arms, blobs = [], [], []
    for i in range(3):
        pair_a, pair_r, pair_b = [], [], []
        for j in range(2):
            a = 3 + 2 * i + j
            edges.append((a, a + 6))
            if i == 0 and j == 0 and arm_extra:
                mid = list(range(15, 15 + arm_extra))
                R = (0, *mid, a)
            else:
                R = (i, a)
            edges += list(zip(R, R[1:]))
            pair_a.append(a)
            pair_r.append(R)
            pair_b.append(frozenset({a, a + 6}))
        anchors.append(tuple(pair_a))
        arms.append(tuple(pair_r))
        blobs.append(tuple(pair_b))
    G = build_graph(30, edges + list(extra_edges))
    return G, Kraken((0, 1, 2), anchors, blobs, arms, CASE_BLOBS, [(False, False)] * 3)


# --- acceptance reporting ------------------------------------------------------

ACCEPTANCE: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


@pytest.fixture
def criterion(request):
    """Collects a one-line result for an acceptance criterion; set ``id``, ``name`` and ``detail``."""
    note: dict = {}
    yield note
    rep = getattr(request.node, "rep_call", None)
    status = "PASS" if rep is not None and rep.passed else "FAIL"
    line = f"criterion {note.get('id', '?'):>2}  {status}  {note.get('name', request.node.name)}"
    if note.get("detail"):
        line += f"  ({note['detail']})"
    ACCEPTANCE[note.get("id", request.node.name)] = line
    print("\n" + line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE, key=lambda k: (not isinstance(k, int), k if isinstance(k, int) else 0, str(k))):
            terminalreporter.write_line(ACCEPTANCE[key])
