"""Deterministic mesh generators for tests and shipped fixtures.

Mesh generation is not part of the package itself: these helpers build
forward-facing-step channels, structured strips and random blobs, all
returned as TriMesh objects (and written to MSH 2.2 via the package
writer when persisted).
"""
from __future__ import annotations

import numpy as np
from scipy.spatial import Delaunay, cKDTree

from meshstream.meshcore import TriMesh

# step channel geometry: [0,3]x[0,1] with the step at x >= STEP_X, y <= STEP_Y
CHANNEL_L = 3.0
CHANNEL_H = 1.0
STEP_X = 0.6
STEP_Y = 0.2


def structured_rect(nx, ny, lx=1.0, ly=1.0, x0=0.0, y0=0.0,
                    tags=("outflow", "outflow", "wall", "wall")):
    """Structured triangulated rectangle; tags = (left, right, bottom, top)."""
    xs = np.linspace(x0, x0 + lx, nx + 1)
    ys = np.linspace(y0, y0 + ly, ny + 1)
    xv, yv = np.meshgrid(xs, ys, indexing="ij")
    verts = np.stack([xv.ravel(), yv.ravel()], axis=1)

    def vid(i, j):
        return i * (ny + 1) + j

    tris = []
    for i in range(nx):
        for j in range(ny):
            a, b = vid(i, j), vid(i + 1, j)
            c, d = vid(i + 1, j + 1), vid(i, j + 1)
            if (i + j) % 2 == 0:
                tris.append([a, b, c])
                tris.append([a, c, d])
            else:
                tris.append([a, b, d])
                tris.append([b, c, d])

    left, right, bottom, top = tags
    boundary = {}
    for j in range(ny):
        boundary[(vid(0, j), vid(0, j + 1))] = left
        boundary[(vid(nx, j), vid(nx, j + 1))] = right
    for i in range(nx):
        boundary[(vid(i, 0), vid(i + 1, 0))] = bottom
        boundary[(vid(i, ny), vid(i + 1, ny))] = top
    return TriMesh(verts, np.array(tris), boundary)


def _corner_h(pts, cl, refine, radius):
    """Target spacing near the step corner, graded back to cl."""
    h_min = cl / refine
    d = np.hypot(pts[..., 0] - STEP_X, pts[..., 1] - STEP_Y)
    grade = (cl - h_min) / radius
    return np.clip(h_min + grade * d, h_min, cl)


def _boundary_points(cl, refine, radius):
    segs = [
        ((0.0, 0.0), (0.0, CHANNEL_H), "inflow"),
        ((0.0, CHANNEL_H), (CHANNEL_L, CHANNEL_H), "wall"),
        ((CHANNEL_L, STEP_Y), (CHANNEL_L, CHANNEL_H), "outflow"),
        ((0.0, 0.0), (STEP_X, 0.0), "wall"),
        ((STEP_X, 0.0), (STEP_X, STEP_Y), "wall"),
        ((STEP_X, STEP_Y), (CHANNEL_L, STEP_Y), "wall"),
    ]
    pts = []
    for (ax, ay), (bx, by), _ in segs:
        length = np.hypot(bx - ax, by - ay)
        t = 0.0
        seg_pts = [(ax, ay)]
        while True:
            p = np.array([ax + (bx - ax) * t / length,
                          ay + (by - ay) * t / length])
            h = float(_corner_h(p, cl, refine, radius))
            t += h
            if t >= length - 0.45 * h:
                break
            seg_pts.append((ax + (bx - ax) * t / length,
                            ay + (by - ay) * t / length))
        seg_pts.append((bx, by))
        pts.extend(seg_pts)
    return np.array(pts)


def _hex_lattice(x_range, y_range, spacing, rng, jitter):
    rows = []
    y = y_range[0]
    row = 0
    dy = spacing * np.sqrt(3.0) / 2.0
    while y <= y_range[1]:
        off = 0.5 * spacing if row % 2 else 0.0
        xs = np.arange(x_range[0] + off, x_range[1] + 1e-12, spacing)
        rows.append(np.stack([xs, np.full_like(xs, y)], axis=1))
        y += dy
        row += 1
    pts = np.concatenate(rows)
    pts = pts + rng.uniform(-jitter, jitter, pts.shape) * spacing
    return pts


def _inside_channel(pts, margin=0.0):
    x, y = pts[:, 0], pts[:, 1]
    inside = (x > margin) & (x < CHANNEL_L - margin) & \
             (y > margin) & (y < CHANNEL_H - margin)
    in_step = (x > STEP_X - margin) & (y < STEP_Y + margin)
    return inside & ~in_step


def step_channel(cl, seed=0, refine=4.0, radius_factor=16.0, density=1.165,
                 retries=8):
    """Unstructured forward-facing-step mesh with corner refinement.

    ``cl`` is the base characteristic length; spacing shrinks to
    ``cl / refine`` at the step corner over ``radius_factor * cl``.
    ``density`` packs points tighter than the nominal spacing.  Rarely a
    seed produces a cracked boundary; those seeds are skipped.
    """
    last = None
    for attempt in range(retries):
        try:
            return _step_channel_once(cl, seed + 1000 * attempt, refine,
                                      radius_factor, density)
        except ValueError as exc:
            last = exc
    raise last


def _step_channel_once(cl, seed, refine, radius_factor, density):
    rng = np.random.default_rng(seed)
    radius = radius_factor * cl
    bpts = _boundary_points(cl, refine, radius)

    base = _hex_lattice((0.0, CHANNEL_L), (0.0, CHANNEL_H), cl / density, rng,
                        jitter=0.28)
    d_base = np.hypot(base[:, 0] - STEP_X, base[:, 1] - STEP_Y)
    base = base[d_base > radius]

    h_min = cl / refine
    box = (max(0.0, STEP_X - radius), STEP_X + radius), \
          (max(0.0, STEP_Y - radius), STEP_Y + radius)
    fine = _hex_lattice(box[0], box[1], h_min / density, rng, jitter=0.28)
    d_fine = np.hypot(fine[:, 0] - STEP_X, fine[:, 1] - STEP_Y)
    keep = d_fine <= radius
    fine = fine[keep]
    h_at = _corner_h(fine, cl, refine, radius)
    fine = fine[rng.random(len(fine)) < (h_min / h_at) ** 2]

    interior = np.concatenate([base, fine])
    interior = interior[_inside_channel(interior)]
    # clear a margin around the boundary so boundary edges stay clean
    tree = cKDTree(bpts)
    h_int = _corner_h(interior, cl, refine, radius)
    dist, _ = tree.query(interior)
    interior = interior[dist > 0.55 * h_int]

    pts = np.concatenate([bpts, interior])
    h_all = _corner_h(pts, cl, refine, radius)
    pair_tree = cKDTree(pts)
    drop = np.zeros(len(pts), dtype=bool)
    for i, j in pair_tree.query_pairs(r=float(h_all.max()) * 0.52):
        if drop[i] or drop[j]:
            continue
        if np.hypot(*(pts[i] - pts[j])) < 0.5 * min(h_all[i], h_all[j]):
            drop[max(i, j) if max(i, j) >= len(bpts) else min(i, j)] = True
    drop[:len(bpts)] = False
    pts = pts[~drop]

    dela = Delaunay(pts)
    tris = dela.simplices
    cent = pts[tris].mean(axis=1)
    keep = ~((cent[:, 0] >= STEP_X) & (cent[:, 1] <= STEP_Y))
    tris = tris[keep]

    boundary = _tag_step_boundary(pts, tris)
    return TriMesh(pts, tris, boundary)


def _tag_step_boundary(pts, tris):
    from collections import Counter
    count = Counter()
    for tri in tris:
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            count[(min(a, b), max(a, b))] += 1
    tol = 1e-9
    tags = {}
    for (a, b), c in count.items():
        if c != 1:
            continue
        mx, my = (pts[a] + pts[b]) / 2.0
        if abs(mx) < tol:
            kind = "inflow"
        elif abs(mx - CHANNEL_L) < tol:
            kind = "outflow"
        elif abs(my) < tol or abs(my - CHANNEL_H) < tol:
            kind = "wall"
        elif abs(mx - STEP_X) < tol and my <= STEP_Y + tol:
            kind = "wall"
        elif abs(my - STEP_Y) < tol and mx >= STEP_X - tol:
            kind = "wall"
        else:
            raise ValueError(f"boundary edge off the domain outline at "
                             f"({mx:.4f}, {my:.4f})")
        tags[(int(a), int(b))] = kind
    return tags


def delaunay_blob(n_side, seed=0, tags="outflow"):
    """Random-ish triangulated unit square, every boundary edge one kind."""
    rng = np.random.default_rng(seed)
    xs = np.linspace(0, 1, n_side)
    xv, yv = np.meshgrid(xs, xs, indexing="ij")
    pts = np.stack([xv.ravel(), yv.ravel()], axis=1)
    inner = (pts[:, 0] > 0) & (pts[:, 0] < 1) & (pts[:, 1] > 0) & (pts[:, 1] < 1)
    jitter = rng.uniform(-0.35, 0.35, pts.shape) / (n_side - 1)
    pts[inner] += jitter[inner]
    dela = Delaunay(pts)
    tris = dela.simplices

    from collections import Counter
    count = Counter()
    for tri in tris:
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            count[(min(a, b), max(a, b))] += 1
    boundary = {e: tags for e, c in count.items() if c == 1}
    return TriMesh(pts, tris, boundary)


def sod_strip(nx, ny=2, height_per_dx=2.0):
    """Quasi-1D strip for shock-tube runs: open ends, walled sides."""
    dx = 1.0 / nx
    return structured_rect(nx, ny, lx=1.0, ly=height_per_dx * dx * ny / 2.0,
                           tags=("outflow", "outflow", "wall", "wall"))
