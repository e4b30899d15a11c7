"""Triangle meshes for cell-centered finite volume solvers."""
from __future__ import annotations

import numpy as np

from ..errors import MeshFormatError
from .graph import Graph

BOUNDARY_KINDS = ("inflow", "outflow", "wall")


class TriMesh:
    """2D triangulation with tagged boundary edges.

    Triangles are normalized to counter-clockwise orientation on
    construction.  Every edge of the triangulation is either interior
    (shared by exactly two triangles) or carries a boundary tag.
    """

    def __init__(self, vertices, triangles, boundary_tags):
        self.vertices = np.asarray(vertices, dtype=np.float64).reshape(-1, 2)
        tris = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
        if tris.size and (tris.min() < 0 or tris.max() >= len(self.vertices)):
            raise MeshFormatError("triangle references unknown vertex")

        # orient counter-clockwise
        a = self.vertices[tris[:, 0]]
        b = self.vertices[tris[:, 1]]
        c = self.vertices[tris[:, 2]]
        signed = 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
                        - (c[:, 0] - a[:, 0]) * (b[:, 1] - a[:, 1]))
        flip = signed < 0
        tris[flip, 1], tris[flip, 2] = tris[flip, 2].copy(), tris[flip, 1].copy()
        if np.any(np.abs(signed) <= 0.0):
            raise MeshFormatError("degenerate (zero-area) triangle")
        self.triangles = tris
        self.areas = np.abs(signed)

        for kind in boundary_tags.values():
            if kind not in BOUNDARY_KINDS:
                raise MeshFormatError(f"unknown boundary kind {kind!r}")
        self.boundary_tags = {
            (min(u, v), max(u, v)): kind for (u, v), kind in boundary_tags.items()
        }
        self._build_faces()

    @property
    def n_tri(self):
        return len(self.triangles)

    def _build_faces(self):
        """Unique edges with left/right triangle and boundary kind."""
        tris = self.triangles
        nt = len(tris)
        e0 = tris[:, [0, 1]]
        e1 = tris[:, [1, 2]]
        e2 = tris[:, [2, 0]]
        all_edges = np.concatenate([e0, e1, e2])           # directed, CCW
        owner = np.tile(np.arange(nt), 3)
        key_lo = np.minimum(all_edges[:, 0], all_edges[:, 1])
        key_hi = np.maximum(all_edges[:, 0], all_edges[:, 1])
        nv = len(self.vertices)
        key = key_lo * nv + key_hi
        order = np.argsort(key, kind="stable")
        key_sorted = key[order]

        faces = []        # (v_from, v_to, left_tri, right_tri, kind_code)
        i = 0
        while i < len(key_sorted):
            j = i + 1
            while j < len(key_sorted) and key_sorted[j] == key_sorted[i]:
                j += 1
            idxs = order[i:j]
            if j - i == 2:
                t0, t1 = int(owner[idxs[0]]), int(owner[idxs[1]])
                v_from, v_to = all_edges[idxs[0]]
                faces.append((int(v_from), int(v_to), t0, t1, -1))
            elif j - i == 1:
                v_from, v_to = all_edges[idxs[0]]
                tag_key = (min(int(v_from), int(v_to)), max(int(v_from), int(v_to)))
                kind = self.boundary_tags.get(tag_key)
                if kind is None:
                    raise MeshFormatError(
                        f"boundary edge {tag_key} carries no tag")
                faces.append((int(v_from), int(v_to), int(owner[idxs[0]]), -1,
                              BOUNDARY_KINDS.index(kind)))
            else:
                raise MeshFormatError(
                    "edge shared by more than two triangles")
            i = j

        faces = np.array(faces, dtype=np.int64).reshape(-1, 5)
        self.face_nodes = faces[:, 0:2]
        self.face_left = faces[:, 2]
        self.face_right = faces[:, 3]
        self.face_kind = faces[:, 4]          # -1 interior, else BOUNDARY_KINDS idx

    def face_geometry(self):
        """Outward-from-left unit normals and lengths, shape (n_faces, 3).

        The stored edge direction follows the left triangle's CCW loop,
        so rotating it by -90 degrees points out of the left triangle.
        """
        p = self.vertices[self.face_nodes[:, 0]]
        q = self.vertices[self.face_nodes[:, 1]]
        d = q - p
        length = np.hypot(d[:, 0], d[:, 1])
        nx = d[:, 1] / length
        ny = -d[:, 0] / length
        return nx, ny, length

    def centroids(self):
        return self.vertices[self.triangles].mean(axis=1)


def dual_graph(mesh):
    """Graph with one vertex per triangle and edges across shared faces."""
    interior = mesh.face_kind == -1
    edges = np.stack([mesh.face_left[interior], mesh.face_right[interior]], axis=1)
    return Graph(mesh.n_tri, edges)
