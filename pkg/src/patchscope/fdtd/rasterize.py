"""Scene rasterization onto Yee E-edges.

Dielectric volumes are painted onto cell centers in primitive order (later
primitives override earlier ones) and averaged onto each E edge over its four
adjoining cells. Loss tangents map to a frequency-independent equivalent
conductivity sigma = 2 pi f_ref eps0 eps_r tan_delta evaluated at the source
center frequency. PEC is resolved directly at edge level: an edge is PEC when
its midpoint lies inside a PEC volume or on a PEC sheet, which keeps the
staircased surface centered on the true one.

The result is a uint16 index per edge into shared (ca, cb) update-coefficient
tables; index 0 is PEC. Lumped resistive elements (ports, loads) append
dedicated table rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..constants import EPS0
from ..errors import GridFitError
from ..scene import Scene
from .grid import GridSpec

_AXIS_INDEX = {"x": 0, "y": 1, "z": 2}


def _edge_axis_coords(grid: GridSpec, comp: int):
    """Midpoint coordinate vectors (x, y, z) for E edges of one component."""
    out = []
    for a in range(3):
        n = grid.shape[a]
        d = grid.deltas[a]
        if a == comp:
            v = grid.origin[a] + d * (np.arange(n) + 0.5)
        else:
            v = grid.origin[a] + d * np.arange(n + 1)
        out.append(v)
    return out


def _range_of(v: np.ndarray, lo: float, hi: float, tol: float):
    i0 = int(np.searchsorted(v, lo - tol, side="left"))
    i1 = int(np.searchsorted(v, hi + tol, side="right"))
    return i0, i1


@dataclass
class MaterialGrid:
    """Per-edge update coefficients in table form."""

    grid: GridSpec
    f_ref: float
    idx: tuple[np.ndarray, np.ndarray, np.ndarray]
    eps_table: list[float] = field(default_factory=list)
    sigma_table: list[float] = field(default_factory=list)

    def coefficient_tables(self, dt: float, dtype):
        """(ca, cb) arrays from the eps/sigma table rows; row 0 is PEC."""
        eps = np.asarray(self.eps_table, dtype=np.float64)
        sig = np.asarray(self.sigma_table, dtype=np.float64)
        den = eps * EPS0 / dt + sig / 2.0
        ca = np.empty_like(den)
        cb = np.empty_like(den)
        ca[0] = 0.0
        cb[0] = 0.0
        ca[1:] = (eps[1:] * EPS0 / dt - sig[1:] / 2.0) / den[1:]
        cb[1:] = 1.0 / den[1:]
        return ca.astype(dtype), cb.astype(dtype)

    def add_lumped_edge(self, comp: int, ijk: tuple[int, int, int], ohms: float) -> int:
        """Fold a lumped resistance across one edge into a new table row and
        point that edge at it. Returns the row index."""
        arr = self.idx[comp]
        row = arr[ijk]
        if row == 0:
            raise GridFitError(f"lumped element on a PEC edge at {ijk}")
        d = self.grid.deltas
        along = d[comp]
        area = d[(comp + 1) % 3] * d[(comp + 2) % 3]
        sigma_lumped = along / (ohms * area)
        self.eps_table.append(self.eps_table[row])
        self.sigma_table.append(self.sigma_table[row] + sigma_lumped)
        new_row = len(self.eps_table) - 1
        if new_row > np.iinfo(arr.dtype).max:
            raise GridFitError("material table overflow")
        arr[ijk] = new_row
        return new_row


def rasterize(scene: Scene, grid: GridSpec, f_ref: float) -> MaterialGrid:
    """Build per-edge material indices and tables for a validated scene."""
    nx, ny, nz = grid.shape
    deltas = grid.deltas
    tol = 1e-6 * min(deltas)

    lo_dom = np.asarray(grid.origin)
    hi_dom = lo_dom + np.asarray(grid.shape) * np.asarray(deltas)
    for i, p in enumerate(scene.primitives):
        if p.shape in ("box", "sheet"):
            pl, ph = np.asarray(p.min_corner), np.asarray(p.max_corner)
        else:
            pl = np.asarray(p.center) - p.radius
            ph = np.asarray(p.center) + p.radius
        if np.any(pl < lo_dom - tol) or np.any(ph > hi_dom + tol):
            raise GridFitError(f"primitives[{i}] extends outside the grid domain")

    materials = {m.name: m for m in scene.materials}
    for m in scene.materials:
        if not m.pec and abs(m.relative_permeability - 1.0) > 1e-12:
            raise GridFitError(
                f"material {m.name!r}: the time-domain solver only supports "
                "relative permeability 1"
            )

    # Cell-center permittivity/conductivity, painted in order.
    eps_c = np.ones((nx, ny, nz), dtype=np.float64)
    sig_c = np.zeros((nx, ny, nz), dtype=np.float64)
    centers = [
        grid.origin[a] + deltas[a] * (np.arange(grid.shape[a]) + 0.5) for a in range(3)
    ]
    omega_ref = 2.0 * math.pi * f_ref
    for p in scene.primitives:
        mat = materials[p.material]
        if p.shape == "sheet":
            if not mat.pec:
                raise GridFitError(
                    f"sheet with material {p.material!r}: zero-thickness "
                    "primitives must be PEC"
                )
            continue
        if p.shape == "box":
            rngs = [
                _range_of(centers[a], p.min_corner[a], p.max_corner[a], tol)
                for a in range(3)
            ]
            sl = tuple(slice(r0, r1) for r0, r1 in rngs)
            if mat.pec:
                eps_c[sl] = 1.0
                sig_c[sl] = 0.0
            else:
                eps_c[sl] = mat.relative_permittivity
                sig_c[sl] = omega_ref * EPS0 * mat.relative_permittivity * mat.loss_tangent
        else:
            c = np.asarray(p.center)
            rngs = [
                _range_of(centers[a], c[a] - p.radius, c[a] + p.radius, tol)
                for a in range(3)
            ]
            sl = tuple(slice(r0, r1) for r0, r1 in rngs)
            xx = centers[0][rngs[0][0]:rngs[0][1]][:, None, None]
            yy = centers[1][rngs[1][0]:rngs[1][1]][None, :, None]
            zz = centers[2][rngs[2][0]:rngs[2][1]][None, None, :]
            inside = (xx - c[0]) ** 2 + (yy - c[1]) ** 2 + (zz - c[2]) ** 2 <= p.radius**2
            if mat.pec:
                eps_c[sl] = np.where(inside, 1.0, eps_c[sl])
                sig_c[sl] = np.where(inside, 0.0, sig_c[sl])
            else:
                eps_c[sl] = np.where(inside, mat.relative_permittivity, eps_c[sl])
                sig_c[sl] = np.where(
                    inside,
                    omega_ref * EPS0 * mat.relative_permittivity * mat.loss_tangent,
                    sig_c[sl],
                )

    # Edge-averaged material plus edge-level PEC masks.
    edge_eps = []
    edge_sig = []
    edge_pec = []
    for comp in range(3):
        t1, t2 = (comp + 1) % 3, (comp + 2) % 3
        pad = [(0, 0)] * 3
        pad[t1] = (1, 1)
        pad[t2] = (1, 1)
        ep = np.pad(eps_c, pad, mode="edge")
        sp = np.pad(sig_c, pad, mode="edge")
        sl0 = [slice(None)] * 3
        sl1 = [slice(None)] * 3
        sl0[t1] = slice(0, -1)
        sl1[t1] = slice(1, None)
        e_a = ep[tuple(sl0)] + ep[tuple(sl1)]
        s_a = sp[tuple(sl0)] + sp[tuple(sl1)]
        sl0 = [slice(None)] * 3
        sl1 = [slice(None)] * 3
        sl0[t2] = slice(0, -1)
        sl1[t2] = slice(1, None)
        edge_eps.append(0.25 * (e_a[tuple(sl0)] + e_a[tuple(sl1)]))
        edge_sig.append(0.25 * (s_a[tuple(sl0)] + s_a[tuple(sl1)]))

        coords = _edge_axis_coords(grid, comp)
        pec = np.zeros(edge_eps[comp].shape, dtype=bool)
        for p in scene.primitives:
            mat = materials[p.material]
            if p.shape in ("box", "sheet"):
                if p.shape == "sheet":
                    flat = [a for a in range(3) if p.min_corner[a] == p.max_corner[a]][0]
                    if flat == comp:
                        continue  # no tangential edge runs normal to its own plane
                if mat.pec:
                    rngs = [
                        _range_of(coords[a], p.min_corner[a], p.max_corner[a], tol)
                        for a in range(3)
                    ]
                    sl = tuple(slice(r0, r1) for r0, r1 in rngs)
                    pec[sl] = True
                else:
                    # Dielectric overrides clear PEC only strictly inside the
                    # box, so coplanar metal sheets survive.
                    rngs = [
                        _range_of(coords[a], p.min_corner[a] + 2 * tol,
                                  p.max_corner[a] - 2 * tol, tol)
                        for a in range(3)
                    ]
                    sl = tuple(slice(r0, r1) for r0, r1 in rngs)
                    pec[sl] = False
            else:
                c = np.asarray(p.center)
                rngs = [
                    _range_of(coords[a], c[a] - p.radius, c[a] + p.radius, tol)
                    for a in range(3)
                ]
                sl = tuple(slice(r0, r1) for r0, r1 in rngs)
                xx = coords[0][rngs[0][0]:rngs[0][1]][:, None, None]
                yy = coords[1][rngs[1][0]:rngs[1][1]][None, :, None]
                zz = coords[2][rngs[2][0]:rngs[2][1]][None, None, :]
                inside = (
                    (xx - c[0]) ** 2 + (yy - c[1]) ** 2 + (zz - c[2]) ** 2
                    <= p.radius**2
                )
                if mat.pec:
                    pec[sl] |= inside
                else:
                    pec[sl] &= ~inside
        edge_pec.append(pec)

    # Shared coefficient table over the distinct (eps, sigma) pairs.
    pairs = np.concatenate(
        [
            np.stack([edge_eps[c].ravel(), edge_sig[c].ravel()], axis=1)
            for c in range(3)
        ]
    )
    uniq, inverse = np.unique(pairs, axis=0, return_inverse=True)
    if uniq.shape[0] + 1 > np.iinfo(np.uint16).max:
        raise GridFitError("too many distinct edge materials")
    inverse = (inverse + 1).astype(np.uint16)  # 0 stays reserved for PEC
    sizes = [edge_eps[c].size for c in range(3)]
    splits = np.cumsum(sizes)[:-1]
    parts = np.split(inverse, splits)
    idx = []
    for c in range(3):
        arr = parts[c].reshape(edge_eps[c].shape)
        arr[edge_pec[c]] = 0
        idx.append(arr)

    return MaterialGrid(
        grid=grid,
        f_ref=f_ref,
        idx=tuple(idx),
        eps_table=[1.0] + [float(v) for v in uniq[:, 0]],
        sigma_table=[0.0] + [float(v) for v in uniq[:, 1]],
    )


def equivalent_conductivity(eps_r: float, tan_delta: float, f_hz: float) -> float:
    """sigma = 2 pi f eps0 eps_r tan_delta (loss pinned at one frequency)."""
    return 2.0 * math.pi * f_hz * EPS0 * eps_r * tan_delta
