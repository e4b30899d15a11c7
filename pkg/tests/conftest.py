import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(Path(__file__).resolve().parent))

FIXTURES = ROOT / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def cl40_mesh():
    import meshstream as ms
    return ms.load_gmsh(FIXTURES / "step2d_cl40.msh")


@pytest.fixture(scope="session")
def cl40_dual(cl40_mesh):
    import meshstream as ms
    return ms.dual_graph(cl40_mesh)


@pytest.fixture(scope="session")
def shipped_labeling():
    import meshstream as ms
    return ms.read_labeling(FIXTURES / "step2d_cl40_am1.labels")


def random_connected_graph(n, extra_edges, rng):
    """Random spanning-tree-plus-chords graph, always connected."""
    import meshstream as ms
    edges = [(i, int(rng.integers(0, i))) for i in range(1, n)]
    for _ in range(extra_edges):
        a, b = (int(x) for x in rng.integers(0, n, 2))
        if a != b:
            edges.append((a, b))
    return ms.Graph(n, edges)


def random_labeling(n, rng):
    import meshstream as ms
    return ms.Labeling(rng.permutation(n) + 1)
