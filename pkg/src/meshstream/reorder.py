"""Bandwidth-reducing vertex orderings.

Two heuristics are provided: the classic level-structure method of
Gibbs, Poole and Stockmeyer (GPS) and a constructive part-growing
heuristic (AM1) that targets the serial bandwidth directly, plus an
exact branch-and-bound search usable as an oracle on tiny graphs.
"""
from __future__ import annotations

import heapq
import itertools
import random

import numpy as np

from .errors import ExactSearchSizeError, GraphFormatError
from .meshcore.graph import Graph, Labeling, serial_bandwidth


# ---------------------------------------------------------------------------
# pseudo-diameter (GPS shrinking strategy)

def _level_structure(g, root, active=None):
    levels = g.bfs_levels(root, active=active)
    depth = int(levels.max())
    width = int(np.bincount(levels[levels >= 0]).max())
    return levels, depth, width


def pseudo_diameter(g, active=None):
    """Endpoints of a pseudo-diameter of (the active part of) ``g``.

    Starts from a minimum-degree vertex, builds a rooted level
    structure and retries from the deepest level's vertices in order of
    increasing degree until the eccentricity stops growing.  The second
    endpoint is the candidate whose structure has minimal width.
    """
    if g.n == 0:
        raise GraphFormatError("empty graph has no pseudo-diameter")
    if active is None:
        cand = range(g.n)
    else:
        cand = np.flatnonzero(active)
        if cand.size == 0:
            raise GraphFormatError("no active vertices")
    u = min(cand, key=lambda v: (g.degrees[v], v))

    levels, depth, _ = _level_structure(g, u, active)
    while True:
        last = np.flatnonzero(levels == depth)
        last = sorted(last, key=lambda v: (g.degrees[v], v))
        best_v, best_width = None, None
        improved = False
        for v in last:
            lv, dv, wv = _level_structure(g, v, active)
            if dv > depth:
                u, levels, depth = v, lv, dv
                improved = True
                break
            if best_width is None or wv < best_width:
                best_v, best_width = v, wv
        if not improved:
            return int(u), int(best_v)


# ---------------------------------------------------------------------------
# AM1 part growth (shared with the bounded access-pattern generator)

class PartResult:
    """Outcome of growing one AM1 part.

    Attributes
    ----------
    members : list of vertex ids in part-index order (index = position+1)
    s : list of s(i) values per member (window reach back to the lowest
        indexed in-part neighbor, clamped at 0)
    frontier_i : 1-based index I of the first member with uncovered
        forced neighbors (n+1 when the part completed)
    exec_limit : 1-based cap actually safe to execute below (min of I and
        the first position whose exact window need exceeded the bound)
    exact_sbw : per-member exact window need, fixed at insertion time
    imp_trace : optional per-step (I, imp(I)) log when tracing
    """

    def __init__(self):
        self.members = []
        self.s = []
        self.frontier_i = 1
        self.exec_limit = 1
        self.exact_sbw = []
        self.imp_trace = None


def grow_am1_part(g, start, rng, bound=None, is_ghost=None, active=None,
                  trace=False):
    """Grow one AM1 part from ``start`` over the active vertices.

    Vertices flagged by ``is_ghost`` join without forcing their own
    neighbors in (their uncovered set stays empty and their importance
    is zero).  With ``bound`` set, growth stops once the importance
    bound would be exceeded; without it the part covers the whole
    reachable region.
    """
    res = PartResult()
    if trace:
        res.imp_trace = []

    pos = {}                     # vertex -> 1-based part index
    members = res.members
    s_vals = res.s
    u_sets = []                  # uncovered forced neighbors per member
    base = []                    # -i + |u(i)| + s(i) per member (imp = n + base)
    heap = []                    # lazy max-heap over base for fresh members
    frontier = set()             # union of all u sets
    I = 1
    poison = None                # first 1-based index with exact need > bound

    def ghost(v):
        return is_ghost is not None and is_ghost[v]

    def usable(w):
        return active is None or active[w]

    def insert(v):
        nonlocal I, poison
        idx = len(members) + 1
        members.append(v)
        pos[v] = idx
        in_part = [int(w) for w in g.neighbors(v) if w in pos and w != v]
        s_v = max(0, idx - min((pos[w] for w in in_part), default=idx))
        s_vals.append(s_v)
        frontier.discard(v)
        if ghost(v):
            u_sets.append(set())
            base.append(None)
        else:
            uv = {int(w) for w in g.neighbors(v)
                  if usable(w) and w not in pos}
            u_sets.append(uv)
            frontier.update(uv)
            b = -idx + len(uv) + s_v
            base.append(b)
            heapq.heappush(heap, (-b, idx, b))
        # v is now covered: shrink the u sets that forced it
        for w in in_part:
            uw = u_sets[pos[w] - 1]
            if v in uw:
                uw.discard(v)
                if base[pos[w] - 1] is not None:
                    b = base[pos[w] - 1] - 1
                    base[pos[w] - 1] = b
                    heapq.heappush(heap, (-b, pos[w], b))
        while I <= len(members) and not u_sets[I - 1]:
            I += 1
        exact = len(frontier) + s_v if not ghost(v) else 0
        res.exact_sbw.append(exact)
        if bound is not None and not ghost(v) and exact > bound:
            if poison is None or idx < poison:
                poison = idx

    def max_imp():
        n_cur = len(members)
        while heap:
            negb, idx, b = heap[0]
            if idx < I or base[idx - 1] != b:
                heapq.heappop(heap)
                continue
            return n_cur + b
        return 0

    insert(start)
    while True:
        if I > len(members):
            break                                   # part complete
        if bound is not None and I >= 2:
            if poison is not None and I > poison:
                break
            if max_imp() > bound:
                break
        u_I = u_sets[I - 1]
        cands = sorted(u_I)
        candidate = rng.choice(cands)
        node_I = members[I - 1]
        n_cur = len(members)
        global_max = 0
        for k in cands:
            local_max = 0
            for l in g.neighbors(k):
                li = pos.get(int(l))
                if li is None or l == node_I:
                    continue
                if li < I or base[li - 1] is None:
                    imp_l = 0
                else:
                    imp_l = n_cur + base[li - 1]
                if imp_l > local_max:
                    local_max = imp_l
            if local_max > global_max:
                candidate = k
                global_max = local_max
        if trace:
            res.imp_trace.append((I, max(0, n_cur + base[I - 1])
                                  if base[I - 1] is not None else 0))
        insert(candidate)

    res.frontier_i = I
    res.exec_limit = min(I, poison) if poison is not None else I
    return res


def am1_reorder(g, seed=42):
    """Constructive serial-bandwidth-reducing labeling.

    Grows a single part from a pseudo-diameter endpoint, always picking
    from the frontier's forced set the vertex whose most important
    in-part neighbor is globally maximal.  Deterministic for a given
    seed.  Disconnected graphs are processed component by component,
    larger components first.
    """
    if g.n == 0:
        raise GraphFormatError("cannot reorder an empty graph")
    rng = random.Random(seed)
    order = []
    for comp in g.connected_components():
        if comp.size == 1:
            order.append(int(comp[0]))
            continue
        active = np.zeros(g.n, dtype=bool)
        active[comp] = True
        a, b = pseudo_diameter(g, active=active)
        start = min((a, b), key=lambda v: (g.degrees[v], v))
        part = grow_am1_part(g, start, rng, active=active)
        order.extend(part.members)
    return Labeling.from_order(np.array(order, dtype=np.int64))


# ---------------------------------------------------------------------------
# GPS

def _merge_level_structures(g, comp, active, u, v):
    lu = g.bfs_levels(u, active=active)
    lv = g.bfs_levels(v, active=active)
    k = int(lu[comp].max())
    a = lu
    b = k - lv
    assigned = np.full(g.n, -1, dtype=np.int64)
    same = (a == b)
    assigned[comp[same[comp]]] = a[comp[same[comp]]]

    # components of the still-unassigned part, largest first
    unassigned = comp[~same[comp]]
    if unassigned.size:
        mask = np.zeros(g.n, dtype=bool)
        mask[unassigned] = True
        width = np.bincount(assigned[assigned >= 0], minlength=k + 1)
        pieces = g.connected_components(active=mask)
        for piece in pieces:
            wa = width.copy()
            wb = width.copy()
            np.add.at(wa, a[piece], 1)
            np.add.at(wb, b[piece], 1)
            use_a = wa[np.unique(a[piece])].max() <= wb[np.unique(b[piece])].max()
            pick = a if use_a else b
            assigned[piece] = pick[piece]
            np.add.at(width, pick[piece], 1)
    return assigned, k


def gps_reorder(g):
    """Level-structure labeling in the style of Gibbs, Poole and Stockmeyer.

    Pipeline: pseudo-diameter endpoints, merged level structure from
    both ends, then level-by-level numbering preferring vertices
    adjacent to already numbered ones (lowest numbered neighbor first,
    then degree, then id).
    """
    if g.n == 0:
        raise GraphFormatError("cannot reorder an empty graph")
    order = []
    for comp in g.connected_components():
        if comp.size == 1:
            order.append(int(comp[0]))
            continue
        active = np.zeros(g.n, dtype=bool)
        active[comp] = True
        u, v = pseudo_diameter(g, active=active)
        if g.degrees[v] < g.degrees[u]:
            u, v = v, u
        levels, k = _merge_level_structures(g, comp, active, u, v)

        numbered = {}
        next_label = len(order)
        for lvl in range(k + 1):
            pool = set(int(w) for w in comp[levels[comp] == lvl])
            while pool:
                with_nbr = []
                for w in pool:
                    labs = [numbered[x] for x in g.neighbors(w) if x in numbered]
                    if labs:
                        with_nbr.append((min(labs), g.degrees[w], w))
                if with_nbr:
                    w = min(with_nbr)[2]
                else:
                    w = min(pool, key=lambda x: (g.degrees[x], x))
                pool.remove(w)
                numbered[w] = next_label
                order.append(w)
                next_label += 1
    return Labeling.from_order(np.array(order, dtype=np.int64))


# ---------------------------------------------------------------------------
# exact search (tiny graphs)

def _sbw_of_order(adj, order):
    n = len(order)
    label = {v: i + 1 for i, v in enumerate(order)}
    s = [0] * (n + 1)
    e = [0] * (n + 1)
    for i, v in enumerate(order, start=1):
        labs = [label[w] for w in adj[v]]
        s[i] = min(labs) if labs else i
        e[i] = max(labs) if labs else i
    best = 0
    E = 0
    suffix_min = [0] * (n + 2)
    suffix_min[n + 1] = n + 1
    for i in range(n, 0, -1):
        suffix_min[i] = min(s[i], suffix_min[i + 1])
    for i in range(1, n + 1):
        E = max(E, e[i])
        best = max(best, E - suffix_min[i])
    return best


def exact_min_sbw(g, max_n=10, prune=True):
    """Optimal serial-bandwidth labeling by exhaustive search.

    Branch-and-bound over label positions; with ``prune=False`` every
    permutation is evaluated (self-consistency oracle).  Rejects graphs
    with more than ``max_n`` vertices.
    """
    if g.n > max_n:
        raise ExactSearchSizeError(
            f"exact search limited to {max_n} vertices, got {g.n}")
    if g.n == 0:
        raise GraphFormatError("empty graph")
    adj = g.adjacency_sets()
    verts = list(range(g.n))

    if not prune:
        best_val, best_order = None, None
        for perm in itertools.permutations(verts):
            val = _sbw_of_order(adj, perm)
            if best_val is None or val < best_val:
                best_val, best_order = val, perm
        return Labeling.from_order(np.array(best_order)), best_val

    n = g.n
    best_val = _sbw_of_order(adj, verts)
    best_order = list(verts)

    label = {}
    placed = []

    def lower_bound():
        t = len(placed)
        E = 0
        e_min = []
        s_ub = []
        for i, v in enumerate(placed, start=1):
            nb_labs = [label[w] for w in adj[v] if w in label]
            has_unplaced = len(nb_labs) < len(adj[v])
            e_i = max(nb_labs) if nb_labs else (i if not adj[v] else 0)
            if has_unplaced:
                e_i = max(e_i, t + 1)
            e_min.append(e_i)
            s_ub.append(min(nb_labs) if nb_labs else (i if not adj[v] else n + 1))
        lb = 0
        suffix = n + 1
        for i in range(t, 0, -1):
            suffix = min(suffix, s_ub[i - 1])
            s_ub[i - 1] = suffix
        for i in range(1, t + 1):
            E = max(E, e_min[i - 1])
            lb = max(lb, E - s_ub[i - 1])
        return lb

    def dfs():
        nonlocal best_val, best_order
        t = len(placed)
        if t == n:
            val = _sbw_of_order(adj, placed)
            if val < best_val:
                best_val = val
                best_order = list(placed)
            return
        for v in verts:
            if v in label:
                continue
            placed.append(v)
            label[v] = t + 1
            if lower_bound() < best_val:
                dfs()
            del label[v]
            placed.pop()

    dfs()
    return Labeling.from_order(np.array(best_order)), best_val


def random_restart_baseline(g, restarts=10000, seed=0):
    """Best serial bandwidth over uniformly random labelings.

    A deliberately weak sanity baseline: heuristics are expected to be
    far better, never much worse.
    """
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        perm = rng.permutation(g.n) + 1
        val = serial_bandwidth(g, Labeling(perm))
        if best is None or val < best:
            best = val
    return best
