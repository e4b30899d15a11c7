"""Graphs, labelings, metrics, mesh ingestion and descriptor streams."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import meshstream as ms
from meshstream.errors import (GraphFormatError, IndexWidthError,
                               LabelingError, MeshFormatError)
from meshstream.meshcore import (DescriptorConfig, boundary_slot,
                                 check_index_capacity, read_descriptor_stream,
                                 write_descriptor_stream)
from conftest import random_connected_graph, random_labeling

import _meshgen as mg


# ---------------------------------------------------------------------------
# literal transcription of the serial-bandwidth definitions (test oracle)

def sbw_literal(g, f):
    n = g.n
    label = {v: int(f.perm[v]) for v in range(n)}
    vertex_at = {label[v]: v for v in range(n)}
    s = {}
    e = {}
    for i in range(1, n + 1):
        u = vertex_at[i]
        labs = [label[w] for w in g.neighbors(u)]
        s[i] = min(labs) if labs else i
        e[i] = max(labs) if labs else i
    S = {}
    E = {}
    for i in range(1, n + 1):
        E[i] = max(e[j] for j in range(1, i + 1))
        S[i] = min(s[j] for j in range(i, n + 1))
    return max(E[i] - S[i] for i in range(1, n + 1))


def bw_literal(g, f):
    if g.m == 0:
        return 0
    return max(abs(int(f.perm[u]) - int(f.perm[v]))
               for u, v in zip(g.edge_u, g.edge_v))


# ---------------------------------------------------------------------------
# Graph / Labeling basics

def test_graph_rejects_self_loop():
    with pytest.raises(GraphFormatError):
        ms.Graph(3, [(0, 0)])


def test_graph_merges_duplicate_edges():
    g = ms.Graph(3, [(0, 1), (1, 0), (0, 1)])
    assert g.m == 1


def test_labeling_must_be_bijection():
    with pytest.raises(LabelingError):
        ms.Labeling([1, 1, 3])


def test_labeling_size_mismatch_raises():
    g = ms.Graph(3, [(0, 1)])
    with pytest.raises(LabelingError):
        ms.serial_bandwidth(g, ms.Labeling.natural(4))
    with pytest.raises(LabelingError):
        ms.classical_bandwidth(g, ms.Labeling.natural(2))


def test_path_p5_metrics():
    g = ms.Graph(5, [(i, i + 1) for i in range(4)])
    f = ms.Labeling.natural(5)
    assert ms.classical_bandwidth(g, f) == 1
    assert ms.serial_bandwidth(g, f) == 2


def test_complete_k4_metrics():
    g = ms.Graph(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
    rng = np.random.default_rng(7)
    for _ in range(5):
        f = random_labeling(4, rng)
        assert ms.classical_bandwidth(g, f) == 3
        assert ms.serial_bandwidth(g, f) == 3


def test_cbw_helper():
    assert ms.c_bw(5) == 11


def test_random_graphs_match_literal_definitions():
    rng = np.random.default_rng(11)
    for _ in range(80):
        n = int(rng.integers(2, 9))
        g = random_connected_graph(n, int(rng.integers(0, 2 * n)), rng)
        f = random_labeling(n, rng)
        assert ms.classical_bandwidth(g, f) == bw_literal(g, f)
        assert ms.serial_bandwidth(g, f) == sbw_literal(g, f)


def test_serial_dominates_classical():
    rng = np.random.default_rng(3)
    for _ in range(40):
        n = int(rng.integers(2, 30))
        g = random_connected_graph(n, n, rng)
        f = random_labeling(n, rng)
        assert ms.serial_bandwidth(g, f) >= ms.classical_bandwidth(g, f)


def test_metrics_invariant_under_label_structure_isomorphism():
    rng = np.random.default_rng(5)
    for _ in range(20):
        n = int(rng.integers(3, 20))
        g = random_connected_graph(n, n, rng)
        f = random_labeling(n, rng)
        # reverse all labels and rename vertices by a random permutation
        pi = rng.permutation(n)
        g2 = g.renamed(pi)
        perm2 = np.empty(n, dtype=np.int64)
        perm2[pi] = n + 1 - f.perm
        f2 = ms.Labeling(perm2)
        assert ms.serial_bandwidth(g, f) == ms.serial_bandwidth(g2, f2)
        assert ms.classical_bandwidth(g, f) == ms.classical_bandwidth(g2, f2)


@given(st.integers(2, 16), st.integers(0, 40), st.integers(0, 10 ** 6))
@settings(max_examples=40, deadline=None)
def test_property_serial_ge_classical(n, extra, seed):
    rng = np.random.default_rng(seed)
    g = random_connected_graph(n, extra, rng)
    f = random_labeling(n, rng)
    assert ms.serial_bandwidth(g, f) >= ms.classical_bandwidth(g, f)


def test_isolated_vertex_uses_self_window():
    g = ms.Graph(3, [(0, 1)])
    f = ms.Labeling([1, 3, 2])
    assert ms.serial_bandwidth(g, f) == sbw_literal(g, f) == 2


# ---------------------------------------------------------------------------
# edge list and labeling files

def test_edge_list_round_trip(tmp_path):
    g = ms.Graph(5, [(0, 1), (1, 2), (3, 4)])
    path = tmp_path / "g.txt"
    ms.write_edge_list(g, path)
    g2 = ms.read_edge_list(path)
    assert g2.n == g.n and g2.m == g.m
    assert np.array_equal(g2.indices, g.indices)


def test_labeling_round_trip(tmp_path):
    f = ms.Labeling([3, 1, 2])
    path = tmp_path / "f.labels"
    ms.write_labeling(f, path)
    assert ms.read_labeling(path) == f


def test_edge_list_header_errors(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("3\n")
    with pytest.raises(GraphFormatError):
        ms.read_edge_list(path)


# ---------------------------------------------------------------------------
# gmsh ingestion

MINIMAL_MSH = """$MeshFormat
2.2 0 8
$EndMeshFormat
$Nodes
3
1 0 0 0
2 1 0 0
3 0 1 0
$EndNodes
$Elements
4
1 1 2 3 0 1 2
2 1 2 3 0 2 3
3 1 2 3 0 3 1
4 2 2 0 0 1 2 3
$EndElements
"""


def test_load_single_triangle(tmp_path):
    path = tmp_path / "tri.msh"
    path.write_text(MINIMAL_MSH)
    mesh = ms.load_gmsh(path)
    assert mesh.n_tri == 1
    assert len(mesh.boundary_tags) == 3


def test_quadrilateral_element_rejected(tmp_path):
    text = MINIMAL_MSH.replace("4 2 2 0 0 1 2 3", "4 3 2 0 0 1 2 3 1")
    path = tmp_path / "quad.msh"
    path.write_text(text)
    with pytest.raises(MeshFormatError, match="unsupported element"):
        ms.load_gmsh(path)


def test_untagged_boundary_edge_rejected(tmp_path):
    lines = MINIMAL_MSH.splitlines()
    # drop one boundary line element
    del lines[lines.index("3 1 2 3 0 3 1")]
    lines[lines.index("4")] = "3"
    path = tmp_path / "untagged.msh"
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(MeshFormatError, match="no tag"):
        ms.load_gmsh(path)


def test_wrong_version_rejected(tmp_path):
    path = tmp_path / "v4.msh"
    path.write_text(MINIMAL_MSH.replace("2.2 0 8", "4.1 0 8"))
    with pytest.raises(MeshFormatError, match="version"):
        ms.load_gmsh(path)


def test_gmsh_round_trip(tmp_path):
    mesh = mg.structured_rect(4, 3, tags=("inflow", "outflow", "wall", "wall"))
    path = tmp_path / "rect.msh"
    ms.write_gmsh(mesh, path)
    mesh2 = ms.load_gmsh(path)
    assert mesh2.n_tri == mesh.n_tri
    assert np.array_equal(mesh2.triangles, mesh.triangles)
    assert np.allclose(mesh2.vertices, mesh.vertices)
    assert mesh2.boundary_tags == mesh.boundary_tags


def test_cl40_fixture_count(fixtures_dir):
    mesh = ms.load_gmsh(fixtures_dir / "step2d_cl40.msh")
    assert mesh.n_tri == 12252


# ---------------------------------------------------------------------------
# dual graph

def test_dual_two_triangles():
    mesh = ms.TriMesh([[0, 0], [1, 0], [1, 1], [0, 1]],
                      [[0, 1, 2], [0, 2, 3]],
                      {(0, 1): "wall", (1, 2): "wall",
                       (2, 3): "wall", (0, 3): "wall"})
    g = ms.dual_graph(mesh)
    assert g.n == 2 and g.m == 1


def test_dual_fan_strip_is_path():
    # four triangles around a hub, consecutive ones sharing an edge
    mesh = mg.structured_rect(4, 1, tags=("wall",) * 4)
    g = ms.dual_graph(mesh)
    # brute force shared-edge count equals graph edge count
    shared = 0
    tris = [set(t) for t in mesh.triangles.tolist()]
    for i in range(len(tris)):
        for j in range(i + 1, len(tris)):
            if len(tris[i] & tris[j]) == 2:
                shared += 1
                assert g.has_edge(i, j)
    assert g.m == shared


def test_dual_degree_at_most_three():
    rng = np.random.default_rng(0)
    for seed in range(3):
        mesh = mg.delaunay_blob(8 + 3 * seed, seed=seed)
        assert ms.dual_graph(mesh).max_degree <= 3


# ---------------------------------------------------------------------------
# descriptor streams

def test_descriptor_round_trip_small():
    mesh = mg.structured_rect(3, 2, tags=("inflow", "outflow", "wall", "wall"))
    f = ms.Labeling.natural(mesh.n_tri)
    cfg = DescriptorConfig(index_width=16, precision="double",
                           values_per_node=7)
    rng = np.random.default_rng(1)
    vals = rng.normal(size=(mesh.n_tri, 7))
    data = write_descriptor_stream(mesh, f, cfg, node_values=vals)
    dec = read_descriptor_stream(data)
    assert dec.config == cfg
    assert np.array_equal(dec.node_values, vals)
    g = ms.dual_graph(mesh)
    order = f.order()
    for pos in range(mesh.n_tri):
        nbrs = sorted((f.perm[w] - 1) for w in g.neighbors(order[pos]))
        assert dec.rows[pos] == nbrs


def test_descriptor_single_precision_round_trip():
    mesh = mg.structured_rect(2, 2, tags=("wall",) * 4)
    f = ms.Labeling.natural(mesh.n_tri)
    cfg = DescriptorConfig(index_width=8, precision="single",
                           values_per_node=7)
    data = write_descriptor_stream(mesh, f, cfg)
    dec = read_descriptor_stream(data)
    assert dec.node_values.dtype == np.float32
    assert np.allclose(dec.node_values[:, 4], mesh.areas.astype(np.float32))


def test_descriptor_single_triangle(tmp_path):
    path = tmp_path / "tri.msh"
    path.write_text(MINIMAL_MSH)
    mesh = ms.load_gmsh(path)
    data = write_descriptor_stream(mesh, ms.Labeling.natural(1))
    dec = read_descriptor_stream(data)
    assert dec.node_values.shape == (1, 7)
    assert dec.rows == [[]]                      # no neighbors
    assert dec.element_slots.shape == (1, 3, 2)
    # all three faces are ghost faces carrying the wall sentinel
    assert set(dec.element_slots[0, :, 1].tolist()) == {boundary_slot("wall")}
    # outward normals of a closed cell sum to zero
    s = (dec.elements[0, :, 0:2] * dec.elements[0, :, 2:3]).sum(axis=0)
    assert np.allclose(s, 0, atol=1e-12)


def test_descriptor_stream_fig_style_neighborhood():
    # a node whose neighbors carry labels 9, 13 and 14: the row holds
    # exactly those labels (0-based positions 8, 12, 13), flag on the first
    n = 15
    edges = [(7, 8), (7, 12), (7, 13)]
    filler = [(i, i + 1) for i in range(6)] + [(8, 9), (9, 10), (10, 11),
                                               (11, 12), (13, 14)]
    g = ms.Graph(n, edges + filler)
    f = ms.Labeling.natural(n)         # vertex k gets label k+1
    # build via the shared row logic: use a synthetic mesh-free encoding
    from meshstream.meshcore.descriptors import _ROW_FLAG
    import struct
    # reuse the writer on a mesh is overkill here; check row semantics on
    # the decode side instead by writing a matching stream by hand
    words = []
    for pos in range(n):
        nbrs = sorted(int(f.perm[w] - 1) for w in g.neighbors(pos))
        if not nbrs:
            nbrs = [pos]
        for j, p in enumerate(nbrs):
            words.append(np.uint32(p) | (_ROW_FLAG if j == 0 else np.uint32(0)))
    header = struct.pack("<4sIBBBxII", b"MSD1", n, 24, 1, 1, len(words), 3 * n)
    node = np.zeros((n, 1)).tobytes()
    elem = b"\x00" * ((3 * 8 + 4) * 3 * n)
    dec = read_descriptor_stream(header + node
                                 + np.array(words, dtype="<u4").tobytes()
                                 + elem)
    row8 = dec.rows[7]                 # node with label 8
    assert [r + 1 for r in row8] == [9, 13, 14]


def test_index_width_overflow():
    cfg = DescriptorConfig(index_width=24)
    check_index_capacity(2 ** 24, cfg)
    with pytest.raises(IndexWidthError):
        check_index_capacity(2 ** 24 + 1, cfg)


def test_index_width_overflow_on_write():
    mesh = mg.structured_rect(20, 20, tags=("wall",) * 4)   # 800 triangles
    cfg = DescriptorConfig(index_width=8)
    with pytest.raises(IndexWidthError):
        write_descriptor_stream(mesh, ms.Labeling.natural(mesh.n_tri), cfg)


def test_descriptor_config_validation():
    with pytest.raises(IndexWidthError):
        DescriptorConfig(index_width=7)
    with pytest.raises(IndexWidthError):
        DescriptorConfig(precision="half")


@given(st.integers(2, 5), st.integers(2, 5), st.integers(0, 10 ** 6))
@settings(max_examples=15, deadline=None)
def test_property_descriptor_round_trip(nx, ny, seed):
    mesh = mg.structured_rect(nx, ny, tags=("inflow", "outflow", "wall",
                                            "wall"))
    rng = np.random.default_rng(seed)
    f = random_labeling(mesh.n_tri, rng)
    data = write_descriptor_stream(mesh, f)
    dec = read_descriptor_stream(data)
    g = ms.dual_graph(mesh)
    order = f.order()
    for pos in range(mesh.n_tri):
        assert dec.rows[pos] == sorted((f.perm[w] - 1)
                                       for w in g.neighbors(order[pos]))
