"""Binary descriptor streams consumed by the streaming memory unit.

Layout (little-endian), after a 20-byte header:

* node data array: one record per node in label order, ``values_per_node``
  IEEE-754 values each (precision from the config);
* connectivity array: one 32-bit word per adjacency entry, bit 31 flags
  the start of a node's row, the low ``index_width`` bits hold the
  neighbor's 0-based stream position.  Rows appear in label order with
  entries ascending; a node without neighbors emits a single flagged
  word holding its own position so rows stay decodable;
* element array: per node, its triangle's three faces in CCW order,
  each face a record of (n_x, n_y, |n|) in the configured precision plus
  two 16-bit slots into the node's neighborhood memory (slot 0 is the
  node itself, slot j is its j-th row neighbor).  Boundary faces encode
  the kind in the second slot as 0xFFF0 + kind index.

Widths above 31 bits behave as 31 because bit 31 carries the row flag.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from ..errors import IndexWidthError, MeshFormatError
from .graph import Labeling
from .mesh import BOUNDARY_KINDS, dual_graph

_MAGIC = b"MSD1"
_ROW_FLAG = np.uint32(1 << 31)
_BOUNDARY_BASE = 0xFFF0


@dataclass(frozen=True)
class DescriptorConfig:
    index_width: int = 24
    precision: str = "double"
    values_per_node: int = 7

    def __post_init__(self):
        if not 8 <= self.index_width <= 32:
            raise IndexWidthError("index width must be between 8 and 32 bits")
        if self.precision not in ("single", "double"):
            raise IndexWidthError("precision must be 'single' or 'double'")
        if self.values_per_node < 1:
            raise IndexWidthError("values_per_node must be positive")

    @property
    def float_dtype(self):
        return np.float32 if self.precision == "single" else np.float64

    @property
    def effective_width(self):
        return min(self.index_width, 31)


@dataclass
class DescriptorStream:
    """Decoded descriptor stream (see :func:`read_descriptor_stream`)."""

    config: DescriptorConfig
    node_values: np.ndarray          # (n, values_per_node)
    rows: list                       # neighbor stream positions per node
    elements: np.ndarray             # (n, 3, 3) face normals nx, ny, |n|
    element_slots: np.ndarray        # (n, 3, 2) uint16 local slots


def check_index_capacity(n, config):
    """Raise if n stream positions do not fit the configured index width."""
    if n > (1 << config.effective_width):
        raise IndexWidthError(
            f"{n} nodes exceed the {config.index_width}-bit index range")


def write_descriptor_stream(mesh, labeling, config=None, node_values=None):
    """Serialize mesh connectivity and face geometry in label order.

    ``node_values`` optionally carries the per-triangle node record
    payload in triangle-id order, shape (n_tri, values_per_node); by
    default the record is zero-filled except for the triangle area in
    column 4 (the constant slot of the solver layout).
    """
    config = config or DescriptorConfig()
    n = mesh.n_tri
    check_index_capacity(n, config)
    if labeling.n != n:
        raise MeshFormatError("labeling size does not match triangle count")

    fdt = config.float_dtype
    F = config.values_per_node
    if node_values is None:
        node_values = np.zeros((n, F), dtype=fdt)
        if F >= 5:
            node_values[:, 4] = mesh.areas
    node_values = np.asarray(node_values, dtype=fdt).reshape(n, F)

    order = labeling.order()                  # triangle at each position
    pos_of = labeling.perm - 1                # triangle id -> position
    dual = dual_graph(mesh)

    conn_words = []
    for k in range(n):
        t = order[k]
        nbr_pos = sorted(pos_of[dual.neighbors(t)].tolist())
        if not nbr_pos:
            nbr_pos = [k]
        for j, p in enumerate(nbr_pos):
            word = np.uint32(p) | (_ROW_FLAG if j == 0 else np.uint32(0))
            conn_words.append(word)
    conn = np.array(conn_words, dtype="<u4")

    # face lookup: undirected vertex pair -> face index
    nv = len(mesh.vertices)
    face_key = (np.minimum(mesh.face_nodes[:, 0], mesh.face_nodes[:, 1]) * nv
                + np.maximum(mesh.face_nodes[:, 0], mesh.face_nodes[:, 1]))
    face_of = {int(k): i for i, k in enumerate(face_key)}
    nx, ny, ln = mesh.face_geometry()

    elem_floats = np.empty((n, 3, 3), dtype=fdt)
    elem_slots = np.empty((n, 3, 2), dtype="<u2")
    for k in range(n):
        t = order[k]
        nbr_pos = sorted(pos_of[dual.neighbors(t)].tolist())
        slot_of = {p: j + 1 for j, p in enumerate(nbr_pos)}
        tri = mesh.triangles[t]
        for e in range(3):
            a, b = tri[e], tri[(e + 1) % 3]
            fi = face_of[min(a, b) * nv + max(a, b)]
            sign = 1.0 if mesh.face_left[fi] == t else -1.0
            elem_floats[k, e, 0] = sign * nx[fi]
            elem_floats[k, e, 1] = sign * ny[fi]
            elem_floats[k, e, 2] = ln[fi]
            if mesh.face_kind[fi] >= 0:
                other_slot = _BOUNDARY_BASE + int(mesh.face_kind[fi])
            else:
                other = mesh.face_right[fi] if mesh.face_left[fi] == t \
                    else mesh.face_left[fi]
                other_slot = slot_of[int(pos_of[other])]
            elem_slots[k, e, 0] = 0
            elem_slots[k, e, 1] = other_slot

    header = struct.pack("<4sIBBBxII", _MAGIC, n, config.index_width,
                         0 if config.precision == "single" else 1,
                         F, len(conn), 3 * n)
    node_bytes = node_values.astype(f"<f{fdt().itemsize}").tobytes()
    elem_bytes = b""
    fsize = fdt().itemsize
    for k in range(n):
        for e in range(3):
            elem_bytes += elem_floats[k, e].astype(f"<f{fsize}").tobytes()
            elem_bytes += elem_slots[k, e].tobytes()
    return header + node_bytes + conn.tobytes() + elem_bytes


def read_descriptor_stream(data):
    """Decode bytes produced by :func:`write_descriptor_stream`."""
    magic, n, width, prec, F, n_conn, n_elem = struct.unpack_from(
        "<4sIBBBxII", data, 0)
    if magic != _MAGIC:
        raise MeshFormatError("not a descriptor stream (bad magic)")
    config = DescriptorConfig(index_width=width,
                              precision="single" if prec == 0 else "double",
                              values_per_node=F)
    fdt = config.float_dtype
    fsize = fdt().itemsize
    off = struct.calcsize("<4sIBBBxII")

    node_values = np.frombuffer(data, dtype=f"<f{fsize}", count=n * F,
                                offset=off).reshape(n, F).astype(fdt)
    off += n * F * fsize

    conn = np.frombuffer(data, dtype="<u4", count=n_conn, offset=off)
    off += 4 * n_conn
    mask = np.uint32((1 << config.effective_width) - 1)
    rows = []
    current = None
    for word in conn:
        if word & _ROW_FLAG:
            current = []
            rows.append(current)
        if current is None:
            raise MeshFormatError("connectivity stream does not start a row")
        current.append(int(word & mask))
    if len(rows) != n:
        raise MeshFormatError(f"expected {n} rows, decoded {len(rows)}")
    rows = [r if r != [k] else [] for k, r in enumerate(rows)]

    elements = np.empty((n, 3, 3), dtype=fdt)
    slots = np.empty((n, 3, 2), dtype="<u2")
    rec = 3 * fsize + 4
    for k in range(n):
        for e in range(3):
            elements[k, e] = np.frombuffer(data, dtype=f"<f{fsize}", count=3,
                                           offset=off)
            slots[k, e] = np.frombuffer(data, dtype="<u2", count=2,
                                        offset=off + 3 * fsize)
            off += rec
    if 3 * n != n_elem:
        raise MeshFormatError("element record count mismatch")
    return DescriptorStream(config, node_values, rows, elements, slots)


def boundary_slot(kind):
    """Second-slot sentinel carried by ghost faces of the given kind."""
    return _BOUNDARY_BASE + BOUNDARY_KINDS.index(kind)
