"""Numba-compiled Yee update kernels.

E-edge material response is table-driven: each edge carries a uint16 index
into (ca, cb) coefficient tables, so vacuum-dominated grids stream one small
index array instead of two full coefficient fields. Index 0 is reserved for
PEC edges (ca = cb = 0). Permeability is uniform (mu0) across the grid.

All loops are serial and order-deterministic: repeated runs with identical
inputs produce bit-identical fields.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def update_e(ex, ey, ez, hx, hy, hz, ix, iy, iz, ca, cb, rdx, rdy, rdz):
    nx, ny1, nz1 = ex.shape
    for i in range(nx):
        for j in range(1, ny1 - 1):
            for k in range(1, nz1 - 1):
                m = ix[i, j, k]
                ex[i, j, k] = ca[m] * ex[i, j, k] + cb[m] * (
                    (hz[i, j, k] - hz[i, j - 1, k]) * rdy
                    - (hy[i, j, k] - hy[i, j, k - 1]) * rdz
                )
    nx1, ny, nz1 = ey.shape
    for i in range(1, nx1 - 1):
        for j in range(ny):
            for k in range(1, nz1 - 1):
                m = iy[i, j, k]
                ey[i, j, k] = ca[m] * ey[i, j, k] + cb[m] * (
                    (hx[i, j, k] - hx[i, j, k - 1]) * rdz
                    - (hz[i, j, k] - hz[i - 1, j, k]) * rdx
                )
    nx1, ny1, nz = ez.shape
    for i in range(1, nx1 - 1):
        for j in range(1, ny1 - 1):
            for k in range(nz):
                m = iz[i, j, k]
                ez[i, j, k] = ca[m] * ez[i, j, k] + cb[m] * (
                    (hy[i, j, k] - hy[i - 1, j, k]) * rdx
                    - (hx[i, j, k] - hx[i, j - 1, k]) * rdy
                )


@njit(cache=True)
def update_h(ex, ey, ez, hx, hy, hz, ch, rdx, rdy, rdz):
    nx1, ny, nz = hx.shape
    for i in range(nx1):
        for j in range(ny):
            for k in range(nz):
                hx[i, j, k] -= ch * (
                    (ez[i, j + 1, k] - ez[i, j, k]) * rdy
                    - (ey[i, j, k + 1] - ey[i, j, k]) * rdz
                )
    nx, ny1, nz = hy.shape
    for i in range(nx):
        for j in range(ny1):
            for k in range(nz):
                hy[i, j, k] -= ch * (
                    (ex[i, j, k + 1] - ex[i, j, k]) * rdz
                    - (ez[i + 1, j, k] - ez[i, j, k]) * rdx
                )
    nx, ny, nz1 = hz.shape
    for i in range(nx):
        for j in range(ny):
            for k in range(nz1):
                hz[i, j, k] -= ch * (
                    (ey[i + 1, j, k] - ey[i, j, k]) * rdx
                    - (ex[i, j + 1, k] - ex[i, j, k]) * rdy
                )


# CPML corrections. psi arrays are full-size; only slab indices are touched.
# Signs mirror how each derivative enters the main updates above.


@njit(cache=True)
def cpml_e_x(ey, ez, hy, hz, iy, iz, cb, psi_eyx, psi_ezx, be, ae, rdx, idx_lo, idx_hi):
    nx1, ny, nz1 = ey.shape
    for ii in range(idx_lo.size + idx_hi.size):
        i = idx_lo[ii] if ii < idx_lo.size else idx_hi[ii - idx_lo.size]
        b = be[i]
        a = ae[i]
        for j in range(ny):
            for k in range(1, nz1 - 1):
                d = (hz[i, j, k] - hz[i - 1, j, k]) * rdx
                p = b * psi_eyx[i, j, k] + a * d
                psi_eyx[i, j, k] = p
                ey[i, j, k] -= cb[iy[i, j, k]] * p
        for j in range(1, ez.shape[1] - 1):
            for k in range(ez.shape[2]):
                d = (hy[i, j, k] - hy[i - 1, j, k]) * rdx
                p = b * psi_ezx[i, j, k] + a * d
                psi_ezx[i, j, k] = p
                ez[i, j, k] += cb[iz[i, j, k]] * p


@njit(cache=True)
def cpml_e_y(ex, ez, hx, hz, ix, iz, cb, psi_exy, psi_ezy, be, ae, rdy, idx_lo, idx_hi):
    nx, ny1, nz1 = ex.shape
    for jj in range(idx_lo.size + idx_hi.size):
        j = idx_lo[jj] if jj < idx_lo.size else idx_hi[jj - idx_lo.size]
        b = be[j]
        a = ae[j]
        for i in range(nx):
            for k in range(1, nz1 - 1):
                d = (hz[i, j, k] - hz[i, j - 1, k]) * rdy
                p = b * psi_exy[i, j, k] + a * d
                psi_exy[i, j, k] = p
                ex[i, j, k] += cb[ix[i, j, k]] * p
        for i in range(1, ez.shape[0] - 1):
            for k in range(ez.shape[2]):
                d = (hx[i, j, k] - hx[i, j - 1, k]) * rdy
                p = b * psi_ezy[i, j, k] + a * d
                psi_ezy[i, j, k] = p
                ez[i, j, k] -= cb[iz[i, j, k]] * p


@njit(cache=True)
def cpml_e_z(ex, ey, hx, hy, ix, iy, cb, psi_exz, psi_eyz, be, ae, rdz, idx_lo, idx_hi):
    nx, ny1, nz1 = ex.shape
    for kk in range(idx_lo.size + idx_hi.size):
        k = idx_lo[kk] if kk < idx_lo.size else idx_hi[kk - idx_lo.size]
        b = be[k]
        a = ae[k]
        for i in range(nx):
            for j in range(1, ny1 - 1):
                d = (hy[i, j, k] - hy[i, j, k - 1]) * rdz
                p = b * psi_exz[i, j, k] + a * d
                psi_exz[i, j, k] = p
                ex[i, j, k] -= cb[ix[i, j, k]] * p
        for i in range(1, ey.shape[0] - 1):
            for j in range(ey.shape[1]):
                d = (hx[i, j, k] - hx[i, j, k - 1]) * rdz
                p = b * psi_eyz[i, j, k] + a * d
                psi_eyz[i, j, k] = p
                ey[i, j, k] += cb[iy[i, j, k]] * p


@njit(cache=True)
def cpml_h_x(hy, hz, ey, ez, ch, psi_hyx, psi_hzx, bh, ah, rdx, idx_lo, idx_hi):
    nx, ny1, nz = hy.shape
    for ii in range(idx_lo.size + idx_hi.size):
        i = idx_lo[ii] if ii < idx_lo.size else idx_hi[ii - idx_lo.size]
        b = bh[i]
        a = ah[i]
        for j in range(ny1):
            for k in range(nz):
                d = (ez[i + 1, j, k] - ez[i, j, k]) * rdx
                p = b * psi_hyx[i, j, k] + a * d
                psi_hyx[i, j, k] = p
                hy[i, j, k] += ch * p
        for j in range(hz.shape[1]):
            for k in range(hz.shape[2]):
                d = (ey[i + 1, j, k] - ey[i, j, k]) * rdx
                p = b * psi_hzx[i, j, k] + a * d
                psi_hzx[i, j, k] = p
                hz[i, j, k] -= ch * p


@njit(cache=True)
def cpml_h_y(hx, hz, ex, ez, ch, psi_hxy, psi_hzy, bh, ah, rdy, idx_lo, idx_hi):
    nx1, ny, nz = hx.shape
    for jj in range(idx_lo.size + idx_hi.size):
        j = idx_lo[jj] if jj < idx_lo.size else idx_hi[jj - idx_lo.size]
        b = bh[j]
        a = ah[j]
        for i in range(nx1):
            for k in range(nz):
                d = (ez[i, j + 1, k] - ez[i, j, k]) * rdy
                p = b * psi_hxy[i, j, k] + a * d
                psi_hxy[i, j, k] = p
                hx[i, j, k] -= ch * p
        for i in range(hz.shape[0]):
            for k in range(hz.shape[2]):
                d = (ex[i, j + 1, k] - ex[i, j, k]) * rdy
                p = b * psi_hzy[i, j, k] + a * d
                psi_hzy[i, j, k] = p
                hz[i, j, k] += ch * p


@njit(cache=True)
def cpml_h_z(hx, hy, ex, ey, ch, psi_hxz, psi_hyz, bh, ah, rdz, idx_lo, idx_hi):
    nx1, ny, nz = hx.shape
    for kk in range(idx_lo.size + idx_hi.size):
        k = idx_lo[kk] if kk < idx_lo.size else idx_hi[kk - idx_lo.size]
        b = bh[k]
        a = ah[k]
        for i in range(nx1):
            for j in range(ny):
                d = (ey[i, j, k + 1] - ey[i, j, k]) * rdz
                p = b * psi_hxz[i, j, k] + a * d
                psi_hxz[i, j, k] = p
                hx[i, j, k] += ch * p
        for i in range(hy.shape[0]):
            for j in range(hy.shape[1]):
                d = (ex[i, j, k + 1] - ex[i, j, k]) * rdz
                p = b * psi_hyz[i, j, k] + a * d
                psi_hyz[i, j, k] = p
                hy[i, j, k] -= ch * p


@njit(cache=True)
def field_peak(ex, ey, ez):
    """Max |E| over the grid (blow-up detector)."""
    peak = 0.0
    for arr in (ex, ey, ez):
        flat = arr.ravel()
        for v in flat:
            av = abs(v)
            if av > peak:
                peak = av
    return peak


@njit(cache=True)
def energy_sums(ex, ey, ez, hx_prev, hx, hy_prev, hy, hz_prev, hz):
    """Raw quadratic sums for the conserved leapfrog energy: sum(E^2) per E
    component and sum(H(n-1/2) * H(n+1/2)) per H component."""
    se = 0.0
    for arr in (ex, ey, ez):
        flat = arr.ravel()
        for v in flat:
            se += float(v) * float(v)
    sh = 0.0
    for prev, cur in ((hx_prev, hx), (hy_prev, hy), (hz_prev, hz)):
        fp = prev.ravel()
        fc = cur.ravel()
        for idx in range(fp.size):
            sh += float(fp[idx]) * float(fc[idx])
    return se, sh
