"""Undirected graphs, vertex labelings and streaming bandwidth metrics.

Vertices are 0-based integers internally; labels are 1-based so the
bandwidth formulas read the same way they are usually written.
"""
from __future__ import annotations

from collections import deque

import numpy as np

from ..errors import GraphFormatError, LabelingError


class Graph:
    """Immutable undirected simple graph stored in CSR form.

    Parameters
    ----------
    n : int
        Number of vertices.
    edges : iterable of (u, v)
        Undirected edges, 0-based endpoints.  Duplicates are merged,
        self loops are rejected.
    """

    def __init__(self, n, edges):
        if n < 0:
            raise GraphFormatError("vertex count must be non-negative")
        edges = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if edges.size:
            if edges.min() < 0 or edges.max() >= n:
                raise GraphFormatError("edge endpoint out of range")
            if (edges[:, 0] == edges[:, 1]).any():
                raise GraphFormatError("self loops are not allowed")
            lo = np.minimum(edges[:, 0], edges[:, 1])
            hi = np.maximum(edges[:, 0], edges[:, 1])
            key = lo * n + hi
            uniq = np.unique(key)
            lo = (uniq // n).astype(np.int64)
            hi = (uniq % n).astype(np.int64)
        else:
            lo = hi = np.empty(0, dtype=np.int64)

        self.n = int(n)
        self.edge_u = lo
        self.edge_v = hi
        self.m = int(lo.size)

        both_src = np.concatenate([lo, hi])
        both_dst = np.concatenate([hi, lo])
        order = np.lexsort((both_dst, both_src))
        self.indices = both_dst[order]
        counts = np.bincount(both_src, minlength=n)
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=self.indptr[1:])
        self.degrees = counts.astype(np.int64)

    @property
    def max_degree(self):
        return int(self.degrees.max()) if self.n else 0

    def neighbors(self, v):
        """Sorted neighbor ids of ``v`` (array view, do not mutate)."""
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def adjacency_sets(self):
        """List of neighbor sets; convenient for pure-python algorithms."""
        return [set(self.neighbors(v).tolist()) for v in range(self.n)]

    def has_edge(self, u, v):
        row = self.neighbors(u)
        i = np.searchsorted(row, v)
        return bool(i < row.size and row[i] == v)

    def bfs_levels(self, root, active=None):
        """Level of every vertex reachable from ``root`` (-1 elsewhere).

        ``active`` optionally restricts the traversal to a boolean mask
        of usable vertices.
        """
        level = np.full(self.n, -1, dtype=np.int64)
        if active is not None and not active[root]:
            raise GraphFormatError("root is not in the active set")
        level[root] = 0
        q = deque([root])
        while q:
            v = q.popleft()
            lv = level[v] + 1
            for w in self.neighbors(v):
                if level[w] < 0 and (active is None or active[w]):
                    level[w] = lv
                    q.append(w)
        return level

    def connected_components(self, active=None):
        """Components as arrays of vertex ids, largest first (ties: min id)."""
        seen = np.zeros(self.n, dtype=bool)
        if active is not None:
            seen[~np.asarray(active, dtype=bool)] = True
        comps = []
        for v in range(self.n):
            if seen[v]:
                continue
            seen[v] = True
            comp = [v]
            q = deque([v])
            while q:
                u = q.popleft()
                for w in self.neighbors(u):
                    if not seen[w]:
                        seen[w] = True
                        comp.append(w)
                        q.append(w)
            comps.append(np.array(sorted(comp), dtype=np.int64))
        comps.sort(key=lambda c: (-c.size, int(c[0])))
        return comps

    def is_connected(self):
        return self.n <= 1 or len(self.connected_components()) == 1

    def subgraph(self, vertices):
        """Induced subgraph; returns (graph, original_ids)."""
        vertices = np.asarray(sorted(vertices), dtype=np.int64)
        remap = -np.ones(self.n, dtype=np.int64)
        remap[vertices] = np.arange(vertices.size)
        keep = (remap[self.edge_u] >= 0) & (remap[self.edge_v] >= 0)
        edges = np.stack([remap[self.edge_u[keep]], remap[self.edge_v[keep]]], axis=1)
        return Graph(vertices.size, edges), vertices

    def renamed(self, mapping):
        """Graph with vertex ids renamed by permutation array ``mapping``."""
        mapping = np.asarray(mapping, dtype=np.int64)
        edges = np.stack([mapping[self.edge_u], mapping[self.edge_v]], axis=1)
        return Graph(self.n, edges)

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


class Labeling:
    """Bijection vertex id -> label in 1..n."""

    def __init__(self, perm):
        perm = np.asarray(perm, dtype=np.int64)
        n = perm.size
        if n and (perm.min() != 1 or perm.max() != n or np.unique(perm).size != n):
            raise LabelingError("labeling must be a bijection onto 1..n")
        self.perm = perm
        self.n = int(n)

    @classmethod
    def natural(cls, n):
        return cls(np.arange(1, n + 1))

    @classmethod
    def from_order(cls, order):
        """Labeling that assigns label k+1 to ``order[k]``."""
        order = np.asarray(order, dtype=np.int64)
        perm = np.empty(order.size, dtype=np.int64)
        perm[order] = np.arange(1, order.size + 1)
        return cls(perm)

    def order(self):
        """Vertex occupying each label position (label k+1 -> order()[k])."""
        out = np.empty(self.n, dtype=np.int64)
        out[self.perm - 1] = np.arange(self.n)
        return out

    def reversed(self):
        return Labeling(self.n + 1 - self.perm)

    def __eq__(self, other):
        return isinstance(other, Labeling) and np.array_equal(self.perm, other.perm)

    def __repr__(self):
        return f"Labeling(n={self.n})"


def _check_sizes(g, f):
    if g.n != f.n:
        raise LabelingError(f"labeling size {f.n} does not match graph size {g.n}")


def classical_bandwidth(g, f):
    """Maximum label distance across any edge."""
    _check_sizes(g, f)
    if g.m == 0:
        return 0
    return int(np.abs(f.perm[g.edge_u] - f.perm[g.edge_v]).max())


def c_bw(bandwidth):
    """On-chip window size implied by the classical bandwidth."""
    return 2 * bandwidth + 1


def serial_bandwidth(g, f):
    """Window size (minus one) needed for miss-free in-order streaming.

    Computes per label position i the extremes s(i)/e(i) of neighbor
    labels, their running envelope E(i) = max(e(1..i)) and
    S(i) = min(s(i..n)), and returns max(E(i) - S(i)).  Vertices without
    neighbors use s(i) = e(i) = i.
    """
    _check_sizes(g, f)
    n = g.n
    if n == 0:
        return 0
    labels = f.perm
    nl = labels[g.indices]
    own = np.arange(1, n + 1, dtype=np.int64)

    mins = np.full(n, 0, dtype=np.int64)
    maxs = np.full(n, 0, dtype=np.int64)
    nonempty = g.degrees > 0
    if nl.size:
        starts = g.indptr[:-1]
        # reduceat misbehaves on empty rows; patch those afterwards.
        safe_starts = np.minimum(starts, nl.size - 1)
        mins_all = np.minimum.reduceat(nl, safe_starts)
        maxs_all = np.maximum.reduceat(nl, safe_starts)
        mins[nonempty] = mins_all[nonempty]
        maxs[nonempty] = maxs_all[nonempty]
    s_pos = np.empty(n, dtype=np.int64)
    e_pos = np.empty(n, dtype=np.int64)
    s_pos[labels - 1] = np.where(nonempty, mins, labels)
    e_pos[labels - 1] = np.where(nonempty, maxs, labels)
    # own label participates in neither s nor e unless isolated
    del own

    E = np.maximum.accumulate(e_pos)
    S = np.minimum.accumulate(s_pos[::-1])[::-1]
    return int((E - S).max())


def write_edge_list(g, path):
    with open(path, "w") as fh:
        fh.write(f"{g.n} {g.m}\n")
        for u, v in zip(g.edge_u, g.edge_v):
            fh.write(f"{u} {v}\n")


def read_edge_list(path):
    """Graph from text: header "n m", then m lines "u v" (0-based)."""
    with open(path) as fh:
        tokens = fh.read().split()
    if len(tokens) < 2:
        raise GraphFormatError("edge list needs an 'n m' header")
    n, m = int(tokens[0]), int(tokens[1])
    if len(tokens) != 2 + 2 * m:
        raise GraphFormatError(
            f"expected {2 * m} endpoint tokens, found {len(tokens) - 2}")
    vals = np.array(tokens[2:], dtype=np.int64).reshape(m, 2)
    return Graph(n, vals)


def write_labeling(f, path):
    with open(path, "w") as fh:
        for lab in f.perm:
            fh.write(f"{lab}\n")


def read_labeling(path):
    """Labeling from text: line k holds the label of vertex k."""
    with open(path) as fh:
        vals = [int(line) for line in fh.read().split()]
    return Labeling(np.array(vals, dtype=np.int64))
