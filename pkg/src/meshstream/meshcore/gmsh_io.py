"""Reader and writer for the Gmsh MSH 2.2 ASCII format.

Only the subset needed here is supported: ``$MeshFormat``, ``$Nodes``
and ``$Elements`` sections with 2-node lines (boundary edges, carrying
a physical tag) and 3-node triangles.  Everything else is rejected.
"""
from __future__ import annotations

import numpy as np

from ..errors import MeshFormatError
from .mesh import TriMesh

DEFAULT_TAG_TABLE = {1: "inflow", 2: "outflow", 3: "wall"}

_LINE = 1
_TRIANGLE = 2


def load_gmsh(path, tag_table=None):
    """Load an MSH 2.2 ASCII file into a :class:`TriMesh`.

    Parameters
    ----------
    tag_table : dict, optional
        Maps physical tags of line elements to boundary kinds
        ("inflow" | "outflow" | "wall").  Defaults to
        ``{1: inflow, 2: outflow, 3: wall}``.
    """
    tag_table = dict(DEFAULT_TAG_TABLE if tag_table is None else tag_table)
    with open(path) as fh:
        lines = fh.read().splitlines()

    sections = {}
    i = 0
    while i < len(lines):
        line = lines[i].strip()
        if line.startswith("$") and not line.startswith("$End"):
            name = line[1:]
            j = i + 1
            while j < len(lines) and lines[j].strip() != f"$End{name}":
                j += 1
            if j == len(lines):
                raise MeshFormatError(f"unterminated section ${name}")
            sections[name] = lines[i + 1:j]
            i = j + 1
        else:
            i += 1

    fmt = sections.get("MeshFormat")
    if not fmt:
        raise MeshFormatError("missing $MeshFormat section")
    parts = fmt[0].split()
    if not parts or not parts[0].startswith("2.2"):
        raise MeshFormatError(f"unsupported MSH version {parts[0] if parts else '?'}"
                              " (only 2.2 ASCII is accepted)")
    if len(parts) > 1 and parts[1] != "0":
        raise MeshFormatError("binary MSH files are not supported")

    node_lines = sections.get("Nodes")
    if node_lines is None:
        raise MeshFormatError("missing $Nodes section")
    n_nodes = int(node_lines[0])
    if len(node_lines) - 1 != n_nodes:
        raise MeshFormatError("node count does not match $Nodes body")
    ids = np.empty(n_nodes, dtype=np.int64)
    xy = np.empty((n_nodes, 2), dtype=np.float64)
    for k, row in enumerate(node_lines[1:]):
        t = row.split()
        ids[k] = int(t[0])
        xy[k, 0] = float(t[1])
        xy[k, 1] = float(t[2])
    id_map = {int(g): k for k, g in enumerate(ids)}

    elem_lines = sections.get("Elements")
    if elem_lines is None:
        raise MeshFormatError("missing $Elements section")
    n_elem = int(elem_lines[0])
    if len(elem_lines) - 1 != n_elem:
        raise MeshFormatError("element count does not match $Elements body")

    triangles = []
    boundary = {}
    for row in elem_lines[1:]:
        t = [int(x) for x in row.split()]
        etype, ntags = t[1], t[2]
        tags = t[3:3 + ntags]
        nodes = t[3 + ntags:]
        if etype == _TRIANGLE:
            if len(nodes) != 3:
                raise MeshFormatError("triangle element with wrong node count")
            triangles.append([id_map[v] for v in nodes])
        elif etype == _LINE:
            if len(nodes) != 2:
                raise MeshFormatError("line element with wrong node count")
            phys = tags[0] if tags else None
            if phys not in tag_table:
                raise MeshFormatError(
                    f"boundary line with unknown physical tag {phys}")
            u, v = id_map[nodes[0]], id_map[nodes[1]]
            boundary[(min(u, v), max(u, v))] = tag_table[phys]
        else:
            raise MeshFormatError(f"unsupported element type {etype}")

    if not triangles:
        raise MeshFormatError("no triangles in mesh")
    return TriMesh(xy, np.array(triangles, dtype=np.int64), boundary)


def write_gmsh(mesh, path, tag_table=None):
    """Write a TriMesh as MSH 2.2 ASCII (inverse of :func:`load_gmsh`)."""
    tag_table = dict(DEFAULT_TAG_TABLE if tag_table is None else tag_table)
    kind_to_tag = {kind: tag for tag, kind in tag_table.items()}
    lines = ["$MeshFormat", "2.2 0 8", "$EndMeshFormat", "$Nodes",
             str(len(mesh.vertices))]
    for k, (x, y) in enumerate(mesh.vertices, start=1):
        lines.append(f"{k} {float(x)!r} {float(y)!r} 0")
    lines += ["$EndNodes", "$Elements"]
    boundary = sorted(mesh.boundary_tags.items())
    lines.append(str(len(boundary) + mesh.n_tri))
    eid = 1
    for (u, v), kind in boundary:
        lines.append(f"{eid} 1 2 {kind_to_tag[kind]} 0 {u + 1} {v + 1}")
        eid += 1
    for tri in mesh.triangles:
        lines.append(f"{eid} 2 2 0 0 {tri[0] + 1} {tri[1] + 1} {tri[2] + 1}")
        eid += 1
    lines.append("$EndElements")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
