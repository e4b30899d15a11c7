"""Exact solver for the 1D Euler Riemann problem.

Used as an independent reference for shock-tube validation.  Follows
the classical two-rarefaction/two-shock pressure function approach: the
star-region pressure solves f_L(p) + f_R(p) + (u_R - u_L) = 0, then the
solution is sampled along rays x/t.
"""
from __future__ import annotations

import numpy as np
from scipy.optimize import brentq

SOD_LEFT = (1.0, 0.0, 1.0)
SOD_RIGHT = (0.125, 0.0, 0.1)


def _f_side(p, rho, u, pk, gamma):
    c = np.sqrt(gamma * pk / rho)
    if p > pk:        # shock
        a = 2.0 / ((gamma + 1.0) * rho)
        b = (gamma - 1.0) / (gamma + 1.0) * pk
        return (p - pk) * np.sqrt(a / (p + b))
    # rarefaction
    return 2.0 * c / (gamma - 1.0) * ((p / pk) ** ((gamma - 1.0) / (2.0 * gamma)) - 1.0)


def star_state(left, right, gamma=1.4):
    """Star-region pressure and velocity for states (rho, u, p)."""
    rho_l, u_l, p_l = left
    rho_r, u_r, p_r = right

    def func(p):
        return (_f_side(p, rho_l, u_l, p_l, gamma)
                + _f_side(p, rho_r, u_r, p_r, gamma) + (u_r - u_l))

    p_hi = max(p_l, p_r)
    while func(p_hi) < 0:
        p_hi *= 4.0
    p_lo = 1e-12
    p_star = brentq(func, p_lo, p_hi, xtol=1e-14, rtol=1e-13)
    u_star = 0.5 * (u_l + u_r) + 0.5 * (
        _f_side(p_star, rho_r, u_r, p_r, gamma)
        - _f_side(p_star, rho_l, u_l, p_l, gamma))
    return p_star, u_star


def sample(xi, left, right, gamma=1.4):
    """Solution (rho, u, p) along the similarity coordinate xi = x/t."""
    rho_l, u_l, p_l = left
    rho_r, u_r, p_r = right
    p_s, u_s = star_state(left, right, gamma)
    c_l = np.sqrt(gamma * p_l / rho_l)
    c_r = np.sqrt(gamma * p_r / rho_r)
    gm, gp = gamma - 1.0, gamma + 1.0

    xi = np.asarray(xi, dtype=np.float64)
    rho = np.empty_like(xi)
    u = np.empty_like(xi)
    p = np.empty_like(xi)

    left_side = xi <= u_s
    # left wave
    if p_s > p_l:     # shock
        rho_sl = rho_l * ((p_s / p_l + gm / gp) / (gm / gp * p_s / p_l + 1.0))
        s_l = u_l - c_l * np.sqrt(gp / (2 * gamma) * p_s / p_l + gm / (2 * gamma))
        pre = left_side & (xi < s_l)
        post = left_side & ~pre
        rho[pre], u[pre], p[pre] = rho_l, u_l, p_l
        rho[post], u[post], p[post] = rho_sl, u_s, p_s
    else:             # rarefaction
        rho_sl = rho_l * (p_s / p_l) ** (1.0 / gamma)
        c_sl = c_l * (p_s / p_l) ** (gm / (2 * gamma))
        head, tail = u_l - c_l, u_s - c_sl
        pre = left_side & (xi < head)
        fan = left_side & (xi >= head) & (xi < tail)
        post = left_side & (xi >= tail)
        rho[pre], u[pre], p[pre] = rho_l, u_l, p_l
        u[fan] = 2.0 / gp * (c_l + gm / 2.0 * u_l + xi[fan])
        cf = c_l - gm / 2.0 * (u[fan] - u_l)
        rho[fan] = rho_l * (cf / c_l) ** (2.0 / gm)
        p[fan] = p_l * (cf / c_l) ** (2.0 * gamma / gm)
        rho[post], u[post], p[post] = rho_sl, u_s, p_s

    right_side = ~left_side
    if p_s > p_r:     # shock
        rho_sr = rho_r * ((p_s / p_r + gm / gp) / (gm / gp * p_s / p_r + 1.0))
        s_r = u_r + c_r * np.sqrt(gp / (2 * gamma) * p_s / p_r + gm / (2 * gamma))
        post = right_side & (xi < s_r)
        pre = right_side & ~post
        rho[pre], u[pre], p[pre] = rho_r, u_r, p_r
        rho[post], u[post], p[post] = rho_sr, u_s, p_s
    else:
        rho_sr = rho_r * (p_s / p_r) ** (1.0 / gamma)
        c_sr = c_r * (p_s / p_r) ** (gm / (2 * gamma))
        head, tail = u_r + c_r, u_s + c_sr
        pre = right_side & (xi > head)
        fan = right_side & (xi <= head) & (xi > tail)
        post = right_side & (xi <= tail)
        rho[pre], u[pre], p[pre] = rho_r, u_r, p_r
        u[fan] = 2.0 / gp * (-c_r + gm / 2.0 * u_r + xi[fan])
        cf = c_r + gm / 2.0 * (u[fan] - u_r)
        rho[fan] = rho_r * (cf / c_r) ** (2.0 / gm)
        p[fan] = p_r * (cf / c_r) ** (2.0 * gamma / gm)
        rho[post], u[post], p[post] = rho_sr, u_s, p_s

    return rho, u, p


def shock_tube_solution(x, t, left=SOD_LEFT, right=SOD_RIGHT, x0=0.5,
                        gamma=1.4):
    """Exact (rho, u, p) at positions ``x`` and time ``t > 0``."""
    xi = (np.asarray(x, dtype=np.float64) - x0) / t
    return sample(xi, left, right, gamma)
