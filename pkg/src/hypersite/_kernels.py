"""Serial per-site sweep kernels (numba-compiled when enabled).

Kernels mutate ``spins`` in place. Random numbers are drawn by the caller
so the compiled and interpreted paths follow identical trajectories.
"""
import math

import numpy as np

from . import _accel


def _align_sweep(spins, offsets, nbrs, order, nu):
    for t in range(order.shape[0]):
        i = order[t]
        hx = 0.0
        hy = 0.0
        hz = 0.0
        for q in range(offsets[i], offsets[i + 1]):
            j = nbrs[q]
            hx += spins[j, 0]
            hy += spins[j, 1]
            hz += spins[j, 2]
        h = math.sqrt(hx * hx + hy * hy + hz * hz)
        if h > 0.0:
            spins[i, 0] = -nu * hx / h
            spins[i, 1] = -nu * hy / h
            spins[i, 2] = -nu * hz / h


def _metropolis_sweep(spins, offsets, nbrs, order, axes, angles, uniforms, beta, J, nu):
    accepted = 0
    for t in range(order.shape[0]):
        i = order[t]
        hx = 0.0
        hy = 0.0
        hz = 0.0
        for q in range(offsets[i], offsets[i + 1]):
            j = nbrs[q]
            hx += spins[j, 0]
            hy += spins[j, 1]
            hz += spins[j, 2]
        sx = spins[i, 0]
        sy = spins[i, 1]
        sz = spins[i, 2]
        kx = axes[t, 0]
        ky = axes[t, 1]
        kz = axes[t, 2]
        c = math.cos(angles[t])
        s = math.sin(angles[t])
        kd = kx * sx + ky * sy + kz * sz
        # Rodrigues rotation of S about the unit axis k
        nx = sx * c + (ky * sz - kz * sy) * s + kx * kd * (1.0 - c)
        ny = sy * c + (kz * sx - kx * sz) * s + ky * kd * (1.0 - c)
        nz = sz * c + (kx * sy - ky * sx) * s + kz * kd * (1.0 - c)
        norm = math.sqrt(nx * nx + ny * ny + nz * nz)
        nx *= nu / norm
        ny *= nu / norm
        nz *= nu / norm
        dE = J * ((nx - sx) * hx + (ny - sy) * hy + (nz - sz) * hz)
        if dE <= 0.0 or uniforms[t] < math.exp(-beta * dE):
            spins[i, 0] = nx
            spins[i, 1] = ny
            spins[i, 2] = nz
            accepted += 1
    return accepted


align_sweep_numba, align_sweep_python = _accel.maybe_njit(_align_sweep)
metropolis_sweep_numba, metropolis_sweep_python = _accel.maybe_njit(_metropolis_sweep)


def align_sweep(*args):
    return (align_sweep_numba if _accel.USE_NUMBA else align_sweep_python)(*args)


def metropolis_sweep(*args):
    return (metropolis_sweep_numba if _accel.USE_NUMBA else metropolis_sweep_python)(*args)


def align_colour_groups(spins, nbr_table, groups, nu):
    """Vectorized checkerboard update: each group holds mutually non-adjacent sites."""
    for idx in groups:
        h = spins[nbr_table[idx]].sum(axis=1)
        norm = np.linalg.norm(h, axis=1)
        live = norm > 0
        spins[idx[live]] = -nu * h[live] / norm[live, None]


def metropolis_colour_groups(spins, nbr_table, groups, axes, angles, uniforms, beta, J, nu):
    accepted = 0
    for idx, k, ang, u in zip(groups, axes, angles, uniforms):
        h = spins[nbr_table[idx]].sum(axis=1)
        s = spins[idx]
        c, sn = np.cos(ang)[:, None], np.sin(ang)[:, None]
        kd = np.sum(k * s, axis=1)[:, None]
        new = s * c + np.cross(k, s) * sn + k * kd * (1 - c)
        new *= nu / np.linalg.norm(new, axis=1)[:, None]
        dE = J * np.sum((new - s) * h, axis=1)
        with np.errstate(over="ignore"):
            ok = (dE <= 0) | (u < np.exp(-beta * dE))
        spins[idx[ok]] = new[ok]
        accepted += int(ok.sum())
    return accepted
