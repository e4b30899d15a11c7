"""Bounded serial-bandwidth access patterns.

A pattern is an ordered list of (vertex, execute-flag) entries.  Parts
are grown with the AM1 engine until the importance bound would be
exceeded, then finalized: members below the frontier are executed,
members whose whole neighborhood is executed become perfect and leave
the residual graph, and everything else may reappear later as a ghost
(loaded for its data, not updated).
"""
from __future__ import annotations

import random
from bisect import bisect_right
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import GraphFormatError, PatternBoundError
from .reorder import grow_am1_part, pseudo_diameter


@dataclass
class AccessPattern:
    """Streaming schedule: vertices in arrival order with execute flags."""

    vertices: np.ndarray
    ex: np.ndarray
    bound: int
    n: int
    part_lengths: list = field(default_factory=list)

    @property
    def length(self):
        return int(self.vertices.size)

    @property
    def k(self):
        return self.length / self.n if self.n else 0.0

    @property
    def n_parts(self):
        return len(self.part_lengths)

    def write(self, path):
        with open(path, "w") as fh:
            fh.write(f"{self.n} {self.bound} {self.n_parts} {self.length}\n")
            for v, e in zip(self.vertices, self.ex):
                fh.write(f"{v} {1 if e else 0}\n")

    @classmethod
    def read(cls, path):
        """Load a pattern file.  Only the part count survives a round
        trip; individual part boundaries are not persisted."""
        with open(path) as fh:
            n, bound, n_parts, length = (int(x) for x in fh.readline().split())
            vs = np.empty(length, dtype=np.int64)
            ex = np.empty(length, dtype=bool)
            for i in range(length):
                a, b = fh.readline().split()
                vs[i] = int(a)
                ex[i] = b == "1"
        pat = cls(vs, ex, bound, n)
        pat.part_lengths = [-1] * n_parts
        return pat


def generate_bounded_pattern(g, bound, seed=42):
    """Access pattern whose executed stencils fit a window of ``bound``+1.

    Repeatedly grows AM1 parts over the not-yet-executed vertices (ghost
    members join with zero importance), finalizes each part when the
    importance bound fails, and restarts on the residual graph until
    every vertex carries its execute flag exactly once.
    """
    if g.n == 0:
        raise GraphFormatError("empty graph")
    if bound <= g.max_degree:
        raise PatternBoundError(
            f"bound {bound} must exceed the maximum degree {g.max_degree}")
    rng = random.Random(seed)

    ex = np.zeros(g.n, dtype=bool)
    pr = np.zeros(g.n, dtype=bool)
    entries_v = []
    entries_e = []
    part_lengths = []

    while not ex.all():
        # seed the next part inside the largest unexecuted component
        comps = g.connected_components(active=~ex)
        comp = comps[0]
        if comp.size == 1:
            start = int(comp[0])
        else:
            comp_mask = np.zeros(g.n, dtype=bool)
            comp_mask[comp] = True
            a, b = pseudo_diameter(g, active=comp_mask)
            start = min((a, b), key=lambda v: (g.degrees[v], v))

        part = grow_am1_part(g, start, rng, bound=bound,
                             is_ghost=ex, active=~pr)
        members = part.members
        n_part = len(members)
        i_exec = part.exec_limit

        # s* over the pending range decides which members become perfect
        if i_exec <= n_part:
            s_star = min((k + 1) - part.s[k] for k in range(i_exec - 1, n_part))
        else:
            s_star = n_part + 1

        for idx0, v in enumerate(members):
            local_index = idx0 + 1
            fresh = not ex[v]
            if local_index < s_star and fresh:
                pr[v] = True
            entries_v.append(v)
            entries_e.append(fresh and local_index < i_exec)
        for idx0, v in enumerate(members):
            if idx0 + 1 < i_exec:
                ex[v] = True
        part_lengths.append(n_part)

    pat = AccessPattern(np.array(entries_v, dtype=np.int64),
                        np.array(entries_e, dtype=bool), bound, g.n)
    pat.part_lengths = part_lengths
    return pat


# ---------------------------------------------------------------------------
# window replay (shared by validate_pattern and the stream simulator)

@dataclass
class ReplayResult:
    misses: list                  # (entry position, vertex, missing neighbor)
    loads: int
    peak_occupancy: int
    processed: int
    stencil_sizes: list
    trace: list | None            # (entry pos, vertex, evicted or None)


def replay_window(g, vertices, ex, capacity, trace=False):
    """Drive entries through a circular window of ``capacity`` slots.

    Entries arrive in order, evicting the oldest once the window is
    full.  Execute entries are processed in order; processing happens at
    the earliest arrival head at which every stencil member (the vertex
    and its graph neighbors) is simultaneously resident, never earlier
    than the entry itself.  Stencil members that can never become
    resident are reported as misses.
    """
    L = len(vertices)
    occurrences = {}
    for p, v in enumerate(vertices):
        occurrences.setdefault(int(v), []).append(p)

    window = deque()
    resident = {}
    peak = 0
    events = [] if trace else None

    head = -1

    def arrive():
        nonlocal peak
        v = int(vertices[head])
        evicted = None
        window.append(v)
        resident[v] = resident.get(v, 0) + 1
        if len(window) > capacity:
            evicted = window.popleft()
            resident[evicted] -= 1
            if not resident[evicted]:
                del resident[evicted]
        peak = max(peak, len(window))
        if events is not None:
            events.append((head, v, evicted))

    misses = []
    processed = 0
    stencil_sizes = []
    exec_positions = np.flatnonzero(np.asarray(ex))
    for p in exec_positions:
        p = int(p)
        v = int(vertices[p])
        needed = [int(w) for w in g.neighbors(v)] + [v]
        lost = []

        # minimal head >= max(current, p) with every needed vertex in window
        H = max(head, p)
        pending = list(needed)
        while True:
            raised = False
            for w in list(pending):
                occ = occurrences.get(w, [])
                i = bisect_right(occ, H) - 1
                if i >= 0 and occ[i] > H - capacity:
                    continue                      # resident at head H
                j = bisect_right(occ, H)
                if j < len(occ):
                    H = occ[j]
                    raised = True
                    break
                lost.append(w)
                pending.remove(w)
            if not raised:
                break
        while head < H:
            head += 1
            arrive()
        for w in lost:
            misses.append((p, v, w))
        processed += 1
        stencil_sizes.append(len(needed) - 1)

    # drain remaining arrivals so loads reflect the whole stream
    while head < L - 1:
        head += 1
        arrive()

    return ReplayResult(misses, L, peak, processed, stencil_sizes, events)


@dataclass
class PatternReport:
    """Result of replaying a pattern against its sliding window."""

    violations: list
    execute_counts: np.ndarray
    k: float
    window: int

    @property
    def ok(self):
        return (not self.violations) and bool((self.execute_counts == 1).all())


def validate_pattern(g, pattern):
    """Replay ``pattern`` through a window of bound+1 slots and verify
    that every executed entry finds its whole stencil resident."""
    result = replay_window(g, pattern.vertices, pattern.ex, pattern.bound + 1)
    counts = np.zeros(g.n, dtype=np.int64)
    np.add.at(counts, pattern.vertices[pattern.ex], 1)
    return PatternReport(result.misses, counts,
                         pattern.length / g.n if g.n else 0.0,
                         pattern.bound + 1)
