"""Cell-centered finite-volume solver for the 2D Euler equations.

First-order scheme on triangle meshes: one state vector per triangle,
face fluxes from the Lax-Friedrichs numerical flux evaluated in a
face-aligned frame, forward-Euler time stepping with all reads from the
previous time level.  Boundaries use virtual ghost states (reflected
wall, fixed inflow, copied outflow).
"""
from __future__ import annotations

import csv
import time
from dataclasses import dataclass

import numpy as np

from .errors import MeshFormatError, PositivityError, PreconditionError
from .meshcore.mesh import BOUNDARY_KINDS

GAMMA_DEFAULT = 1.4

#: Default inflow: density 1.4 and unit pressure make the sound speed
#: exactly 1, so u = 3 is a Mach 3 stream.
MACH3_INFLOW = (1.4, 3.0, 0.0, 1.0)


@dataclass(frozen=True)
class SolverConfig:
    gamma: float = GAMMA_DEFAULT
    cfl: float = 0.4
    t_end: float = 1.0
    fixed_dt: float | None = None
    inflow: tuple = MACH3_INFLOW

    @classmethod
    def from_file(cls, path):
        """Key-value text: gamma, cfl, t_end, fixed_dt, inflow_rho/u/v/p."""
        vals = {}
        with open(path) as fh:
            for raw in fh:
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise PreconditionError(f"bad config line: {raw.rstrip()}")
                key, val = (s.strip() for s in line.split("=", 1))
                vals[key] = float(val)
        inflow = tuple(vals.pop(f"inflow_{k}", d) for k, d in
                       zip(("rho", "u", "v", "p"), MACH3_INFLOW))
        kwargs = {}
        for key in ("gamma", "cfl", "t_end", "fixed_dt"):
            if key in vals:
                kwargs[key] = vals.pop(key)
        if vals:
            raise PreconditionError(f"unknown config keys: {sorted(vals)}")
        return cls(inflow=inflow, **kwargs)


def prim_to_cons(prim, gamma=GAMMA_DEFAULT):
    """[rho, u, v, p] -> [rho, rho*u, rho*v, E]."""
    prim = np.asarray(prim, dtype=np.float64)
    rho, u, v, p = np.moveaxis(prim, -1, 0)
    E = p / (gamma - 1.0) + 0.5 * rho * (u * u + v * v)
    return np.stack([rho, rho * u, rho * v, E], axis=-1)


def cons_to_prim(cons, gamma=GAMMA_DEFAULT):
    """[rho, rho*u, rho*v, E] -> [rho, u, v, p]; rejects rho <= 0, p <= 0."""
    cons = np.asarray(cons, dtype=np.float64)
    rho, ru, rv, E = np.moveaxis(cons, -1, 0)
    if np.any(rho <= 0):
        raise PositivityError(-1, int(np.argmin(rho)), "non-positive density")
    u = ru / rho
    v = rv / rho
    p = (gamma - 1.0) * (E - 0.5 * rho * (u * u + v * v))
    if np.any(p <= 0):
        raise PositivityError(-1, int(np.argmin(p)), "non-positive pressure")
    return np.stack([rho, u, v, p], axis=-1)


def sound_speed(rho, p, gamma=GAMMA_DEFAULT):
    return np.sqrt(gamma * p / rho)


def lax_friedrichs_face_flux(UL, UR, gamma=GAMMA_DEFAULT):
    """Numerical flux for face-frame states (x axis normal to the face).

    Central average of the physical fluxes minus (|u_bar| + c_bar)/2
    times the state jump, with u_bar and c_bar the arithmetic means of
    the normal velocity and sound speed.
    """
    UL = np.asarray(UL, dtype=np.float64)
    UR = np.asarray(UR, dtype=np.float64)

    def split(U):
        rho, run, rvt, E = np.moveaxis(U, -1, 0)
        un = run / rho
        vt = rvt / rho
        p = (gamma - 1.0) * (E - 0.5 * rho * (un * un + vt * vt))
        c = np.sqrt(gamma * p / rho)
        Fx = np.stack([run, run * un + p, rvt * un, (E + p) * un], axis=-1)
        return un, c, Fx

    unL, cL, FL = split(UL)
    unR, cR, FR = split(UR)
    a = np.abs(0.5 * (unL + unR)) + 0.5 * (cL + cR)
    return 0.5 * (FL + FR) - 0.5 * a[..., None] * (UR - UL)


class FlowField:
    """State plus precomputed face geometry for one mesh.

    Cells may be permuted by a labeling so state arrays live in label
    order; faces are always sorted by their lower cell index.
    """

    def __init__(self, mesh, config, labeling=None, initial=None):
        n = mesh.n_tri
        if labeling is not None:
            if labeling.n != n:
                raise MeshFormatError("labeling does not match triangle count")
            cell_order = labeling.order()
            new_id = labeling.perm - 1
        else:
            cell_order = np.arange(n)
            new_id = np.arange(n)

        self.config = config
        self.gamma = config.gamma
        self.cell_order = cell_order          # mesh triangle id per cell row
        self.volumes = mesh.areas[cell_order].copy()
        self.centroids = mesh.centroids()[cell_order]

        nx, ny, ln = mesh.face_geometry()
        fl = new_id[mesh.face_left]
        fr = np.where(mesh.face_right >= 0, new_id[mesh.face_right], -1)
        kind = mesh.face_kind

        fsort = np.argsort(np.where(fr >= 0, np.minimum(fl, fr), fl),
                           kind="stable")
        self.face_left = fl[fsort]
        self.face_right = fr[fsort]
        self.face_nx = nx[fsort]
        self.face_ny = ny[fsort]
        self.face_len = ln[fsort]
        self.face_kind = kind[fsort]

        nf = len(fsort)
        interior = self.face_right >= 0
        f_ids = np.arange(nf)
        owners = np.concatenate([self.face_left, self.face_right[interior]])
        fids = np.concatenate([f_ids, f_ids[interior]])
        signs = np.concatenate([np.ones(nf), -np.ones(int(interior.sum()))])
        order = np.argsort(owners, kind="stable")
        self.cell_faces = fids[order].reshape(n, 3)
        self.cell_sign = signs[order].reshape(n, 3)

        if initial is None:
            prim = np.tile(np.asarray(config.inflow, dtype=np.float64), (n, 1))
        else:
            prim = np.asarray(initial(self.centroids[:, 0],
                                      self.centroids[:, 1]), dtype=np.float64)
            if prim.shape != (n, 4):
                prim = np.broadcast_to(prim, (n, 4)).copy()
        self.U = prim_to_cons(prim, self.gamma)
        self.time = 0.0

    @property
    def n_cells(self):
        return len(self.volumes)

    def primitive(self):
        return cons_to_prim(self.U, self.gamma)

    def total_mass(self):
        return float(np.dot(self.U[:, 0], self.volumes))

    def copy(self):
        out = object.__new__(FlowField)
        out.__dict__.update(self.__dict__)
        out.U = self.U.copy()
        return out

    # -- core update ------------------------------------------------------

    def _face_states(self):
        """Left/right conservative states in each face's normal frame."""
        U = self.U
        nx, ny = self.face_nx, self.face_ny
        UL = U[self.face_left]
        runL = nx * UL[:, 1] + ny * UL[:, 2]
        rvtL = -ny * UL[:, 1] + nx * UL[:, 2]
        ULf = np.stack([UL[:, 0], runL, rvtL, UL[:, 3]], axis=-1)

        URf = np.empty_like(ULf)
        interior = self.face_kind == -1
        UR = U[self.face_right[interior]]
        runR = nx[interior] * UR[:, 1] + ny[interior] * UR[:, 2]
        rvtR = -ny[interior] * UR[:, 1] + nx[interior] * UR[:, 2]
        URf[interior] = np.stack([UR[:, 0], runR, rvtR, UR[:, 3]], axis=-1)

        for code, kindname in enumerate(BOUNDARY_KINDS):
            sel = self.face_kind == code
            if not sel.any():
                continue
            if kindname == "wall":
                ghost = ULf[sel].copy()
                ghost[:, 1] = -ghost[:, 1]
            elif kindname == "outflow":
                ghost = ULf[sel].copy()
            else:                                   # inflow
                free = prim_to_cons(self.config.inflow, self.gamma)
                ghost = np.empty((int(sel.sum()), 4))
                ghost[:, 0] = free[0]
                ghost[:, 1] = nx[sel] * free[1] + ny[sel] * free[2]
                ghost[:, 2] = -ny[sel] * free[1] + nx[sel] * free[2]
                ghost[:, 3] = free[3]
            URf[sel] = ghost
        return ULf, URf

    def residual(self):
        """Sum of rotated, length-scaled face fluxes per cell."""
        ULf, URf = self._face_states()
        F = lax_friedrichs_face_flux(ULf, URf, self.gamma)
        nx, ny, ln = self.face_nx, self.face_ny, self.face_len
        G = np.empty_like(F)
        G[:, 0] = F[:, 0] * ln
        G[:, 1] = (nx * F[:, 1] - ny * F[:, 2]) * ln
        G[:, 2] = (ny * F[:, 1] + nx * F[:, 2]) * ln
        G[:, 3] = F[:, 3] * ln
        per_cell = G[self.cell_faces] * self.cell_sign[:, :, None]
        return per_cell.sum(axis=1)

    def stable_dt(self):
        """CFL time step: volume over summed face wave speeds."""
        prim = self.primitive()
        u, v = prim[:, 1], prim[:, 2]
        c = sound_speed(prim[:, 0], prim[:, 3], self.gamma)
        nx = self.face_nx[self.cell_faces] * self.cell_sign
        ny = self.face_ny[self.cell_faces] * self.cell_sign
        ln = self.face_len[self.cell_faces]
        un = np.abs(u[:, None] * nx + v[:, None] * ny) + c[:, None]
        wave = (un * ln).sum(axis=1)
        return self.config.cfl * float((self.volumes / wave).min())


def timestep(field, dt):
    """One forward-Euler step; returns the advanced field."""
    if dt <= 0:
        raise PreconditionError("time step must be positive")
    out = field.copy()
    res = field.residual()
    out.U = field.U - (dt / field.volumes)[:, None] * res
    out.time = field.time + dt
    rho = out.U[:, 0]
    p = (field.gamma - 1.0) * (out.U[:, 3] - 0.5 * (out.U[:, 1] ** 2
                               + out.U[:, 2] ** 2) / rho)
    if np.any(rho <= 0) or np.any(p <= 0):
        bad = int(np.argmin(np.where(rho <= 0, rho, p)))
        raise PositivityError(-1, bad)
    return out


@dataclass
class RunStats:
    steps: int
    wall_seconds: float
    updates_per_sec: float
    t_final: float


def run_case(mesh, config, labeling=None, initial=None, max_steps=None,
             on_step=None):
    """Advance a mesh from its initial condition to ``config.t_end``.

    Returns (field, stats).  Supplying a labeling stores all state in
    label order, which is the cache-locality experiment; timings cover
    the time loop only.
    """
    field = FlowField(mesh, config, labeling=labeling, initial=initial)
    steps = 0
    t0 = time.perf_counter()
    while field.time < config.t_end:
        if max_steps is not None and steps >= max_steps:
            break
        dt = config.fixed_dt or field.stable_dt()
        dt = min(dt, config.t_end - field.time)
        try:
            field = timestep(field, dt)
        except PositivityError as exc:
            raise PositivityError(steps, exc.cell) from exc
        steps += 1
        if on_step:
            on_step(field, steps)
    wall = time.perf_counter() - t0
    ups = steps * field.n_cells / wall if wall > 0 else float("inf")
    return field, RunStats(steps, wall, ups, field.time)


def field_to_csv(field, path):
    """Per-triangle CSV: id, centroid, density, velocity, pressure."""
    prim = field.primitive()
    with open(path, "w", newline="") as fh:
        fh.write("# meshstream-csv v1 field\n")
        w = csv.writer(fh)
        w.writerow(["triangle", "x", "y", "rho", "u", "v", "p"])
        for i in range(field.n_cells):
            w.writerow([i] + [repr(float(x)) for x in
                              (field.centroids[i, 0], field.centroids[i, 1],
                               prim[i, 0], prim[i, 1], prim[i, 2],
                               prim[i, 3])])


# ---------------------------------------------------------------------------
# static operation count of one triangle update, as implemented above

NODE_PRIMITIVE_OPS = {"velocity": 2, "kinetic_energy": 5, "pressure": 2,
                      "sound_speed": 3}
FACE_FLUX_OPS = {"rotate_in": 12, "normal_velocity": 6, "side_fluxes": 10,
                 "central_average": 8, "dissipation": 19, "rotate_out": 10}
UPDATE_OPS = {"face_sum": 8, "volume_scale": 9}
FACES_PER_UPDATE = 3


def flop_breakdown(dissipation=True):
    face = dict(FACE_FLUX_OPS)
    if not dissipation:
        face.pop("dissipation")
    return {
        "node_primitive": dict(NODE_PRIMITIVE_OPS),
        "face_flux": face,
        "faces_per_update": FACES_PER_UPDATE,
        "update": dict(UPDATE_OPS),
    }


def flop_count_per_update(dissipation=True):
    """Floating-point operations for one triangle update (3 face fluxes
    plus the accumulation), counting +, -, *, /, sqrt and abs as one."""
    b = flop_breakdown(dissipation)
    return (sum(b["node_primitive"].values())
            + FACES_PER_UPDATE * sum(b["face_flux"].values())
            + sum(b["update"].values()))
