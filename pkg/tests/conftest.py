import pytest
from hypothesis import settings

from pottsflow.cycles import make_gen_set
from pottsflow.graph import fundamental_cycles, from_edge_list
from pottsflow import lattices

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def triangle():
    return from_edge_list(3, [(0, 1), (1, 2), (2, 0)])


def triangle_gens(g=None):
    g = g or triangle()
    return make_gen_set(g, [{0: 1, 1: 1, 2: 1}])


def glued_triangles():
    """Triangles 0-1-2 and 1-3-2 sharing edge 1 = (1, 2)."""
    g = from_edge_list(4, [(0, 1), (1, 2), (2, 0), (1, 3), (3, 2)])
    return g, make_gen_set(g, [{0: 1, 1: 1, 2: 1}, {3: 1, 4: 1, 1: -1}])


def double_edge_pendant():
    return from_edge_list(3, [(0, 1), (0, 1), (1, 2)])


def k4():
    return from_edge_list(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])


def loop_graph():
    """Triangle with a loop at vertex 0."""
    return from_edge_list(3, [(0, 1), (1, 2), (2, 0), (0, 0)])


def with_cycle_basis(g):
    return g, make_gen_set(g, fundamental_cycles(g))


def small_graphs():
    """The seven identity-suite graphs, by name."""
    return {
        "triangle": triangle(),
        "double-edge-pendant": double_edge_pendant(),
        "K4": k4(),
        "grid2x2": lattices.grid(2, 2).graph,
        "grid3x3": lattices.grid(3, 3).graph,
        "glued-triangles": glued_triangles()[0],
        "loop": loop_graph(),
    }


@pytest.fixture
def tri():
    g = triangle()
    return g, triangle_gens(g)


@pytest.fixture
def grid3():
    return lattices.grid(3, 3)


# -- acceptance report -------------------------------------------------------------

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (bool(ok), detail)
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} | {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} | {detail}")
