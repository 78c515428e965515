"""Total-field/scattered-field plane-wave injection.

The incident wave is marched on an auxiliary 1-D Yee grid sharing the 3-D
time step and the cell size along the propagation axis, so its numerical
dispersion matches the 3-D grid exactly for axis-aligned incidence and the
scattered region stays clean to near the field dtype's rounding floor.
Propagation must be along +/-x, +/-y or +/-z; polarization may be any
transverse unit vector. The 1-D grid is terminated by its own CPML.
"""

from __future__ import annotations

import numpy as np

from ..constants import EPS0, MU0
from ..errors import GridFitError
from ..scene import IlluminationSpec
from .grid import GridSpec
from .sources import SineGaussian, cpml_profiles

_PML_1D = 32
_SRC_GAP = 8


def direction_axis(direction) -> tuple[int, int]:
    """(axis, sign) of an axis-aligned unit vector; raises otherwise."""
    d = np.asarray(direction, dtype=float)
    axis = int(np.argmax(np.abs(d)))
    if abs(abs(d[axis]) - 1.0) > 1e-9 or np.any(np.abs(np.delete(d, axis)) > 1e-9):
        raise GridFitError(
            "plane-wave injection supports axis-aligned incidence only; "
            f"got direction {tuple(direction)}"
        )
    return axis, (1 if d[axis] > 0 else -1)


class PlaneWaveInjector:
    """Drives one axis-aligned plane-wave pulse into a rectangular
    total-field box and records the incident waveform at the entry face.

    box_lo/box_hi are E-node index bounds of the total-field region
    (inclusive), strictly inside the domain.
    """

    def __init__(
        self,
        grid: GridSpec,
        box_lo: tuple[int, int, int],
        box_hi: tuple[int, int, int],
        illumination: IlluminationSpec,
        dt: float,
        dtype,
    ):
        self.grid = grid
        self.lo = tuple(box_lo)
        self.hi = tuple(box_hi)
        self.dt = dt
        self.dtype = np.dtype(dtype).type
        self.axis, self.sign = direction_axis(illumination.direction)
        pol = np.asarray(illumination.polarization, dtype=float)
        if abs(pol[self.axis]) > 1e-9:
            raise GridFitError("polarization must be transverse to the direction")
        self.pol = pol / np.linalg.norm(pol)
        s_hat = np.zeros(3)
        s_hat[self.axis] = self.sign
        self.hvec = np.cross(s_hat, self.pol)
        wf = illumination.waveform
        self.waveform = SineGaussian(center_hz=wf.center_hz, bandwidth_hz=wf.bandwidth_hz)

        for a in range(3):
            if not 0 < self.lo[a] < self.hi[a] < grid.shape[a]:
                raise GridFitError("total-field box must lie strictly inside the domain")

        self.delta = grid.deltas[self.axis]
        span = self.hi[self.axis] - self.lo[self.axis]
        self.entry = self.lo[self.axis] if self.sign > 0 else self.hi[self.axis]
        # 1-D layout: [CPML][gap][source][gap][entry ... box span][gap][CPML]
        self.m_src = _PML_1D + _SRC_GAP
        self.m_entry = self.m_src + _SRC_GAP
        n1d = self.m_entry + span + _SRC_GAP + _PML_1D
        self.n1d = n1d
        self.e1 = np.zeros(n1d + 1, dtype=dtype)
        self.h1 = np.zeros(n1d, dtype=dtype)
        self.psi_e = np.zeros(n1d + 1, dtype=dtype)
        self.psi_h = np.zeros(n1d, dtype=dtype)
        (be, ae), (bh, ah) = cpml_profiles(
            n1d + 1, _PML_1D, self.delta, dt, order=3.0, sigma_scale=1.0,
            alpha_max=0.05,
        )
        self.be = be.astype(dtype)
        self.ae = ae.astype(dtype)
        self.bh = bh.astype(dtype)
        self.ah = ah.astype(dtype)
        self.e_ref: list[float] = []
        self.n = 0

    # --- incident-field sampling ------------------------------------------

    def _me(self, q):
        """1-D E index for prop-axis node q."""
        return self.m_entry + self.sign * (np.asarray(q) - self.entry)

    def _mh(self, q):
        """1-D H index for prop-axis position q + 1/2."""
        q = np.asarray(q)
        if self.sign > 0:
            return self.m_entry + (q - self.entry)
        return self.m_entry + (self.entry - q) - 1

    def e_inc(self, q):
        return self.e1[self._me(q)]

    def h_inc(self, q):
        return self.h1[self._mh(q)]

    # --- 1-D marching ------------------------------------------------------

    def advance_e(self):
        """Advance the 1-D E line to the 3-D E time level; returns the entry
        incident sample recorded for normalization."""
        e1, h1 = self.e1, self.h1
        d = h1[1:] - h1[:-1]
        self.psi_e[1:-1] = self.be[1:-1] * self.psi_e[1:-1] + self.ae[1:-1] * (
            d / self.dtype(self.delta)
        )
        e1[1:-1] -= self.dtype(self.dt / (EPS0 * self.delta)) * d
        e1[1:-1] -= self.dtype(self.dt / EPS0) * self.psi_e[1:-1]
        self.n += 1
        e1[self.m_src] += self.dtype(self.waveform(self.n * self.dt))
        ref = float(e1[self.m_entry])
        self.e_ref.append(ref)
        return ref

    def advance_h(self):
        e1, h1 = self.e1, self.h1
        d = e1[1:] - e1[:-1]
        self.psi_h[:] = self.bh * self.psi_h + self.ah * (d / self.dtype(self.delta))
        h1 -= self.dtype(self.dt / (MU0 * self.delta)) * d
        h1 -= self.dtype(self.dt / MU0) * self.psi_h

    # --- 3-D face corrections ---------------------------------------------

    def _face_slices(self, f: int, c: int, g: int, e_like: bool):
        """Index slices over a face for component arrays.

        For the corrected E_c (or the H_g just outside), the face spans half
        positions along c (slice lo_c..hi_c) and nodes along g
        (slice lo_g..hi_g inclusive).
        """
        sl = [None, None, None]
        sl[c] = slice(self.lo[c], self.hi[c])
        sl[g] = slice(self.lo[g], self.hi[g] + 1)
        return sl

    def _profile(self, values, f: int, c: int, g: int, shape3):
        """Broadcast incident samples over the face plane."""
        if np.ndim(values) == 0:
            return values
        # Vector along whichever in-face axis is the propagation axis.
        shape = [1, 1, 1]
        shape[self.axis] = len(values)
        return np.asarray(values).reshape(tuple(shape[a] for a in range(3) if a != f))

    def correct_e(self, e_fields, cb_vac: float):
        """Add the missing incident-H contribution to tangential E on the six
        total-field box faces (called right after the main E update)."""
        for f in range(3):
            rdf = 1.0 / self.grid.deltas[f]
            for c in range(3):
                if c == f:
                    continue
                g = 3 - f - c
                c1, c2 = (c + 1) % 3, (c + 2) % 3
                sign_term = 1.0 if f == c1 else -1.0
                if abs(self.hvec[g]) < 1e-15:
                    continue
                ec = e_fields[c]
                for side, q in ((0, self.lo[f]), (1, self.hi[f])):
                    if self.axis == f:
                        hval = self.hvec[g] * float(self.h_inc(q - 1 if side == 0 else q))
                    elif self.axis == c:
                        idx = np.arange(self.lo[c], self.hi[c])
                        hval = self.hvec[g] * self.h_inc(idx)
                        hval = self._profile(hval, f, c, g, None)
                    else:  # axis == g would mean hvec[g] == 0 (skipped above)
                        continue
                    sl = self._face_slices(f, c, g, True)
                    sl[f] = q
                    outer_sign = -1.0 if side == 0 else 1.0
                    ec[tuple(sl)] += self.dtype(cb_vac * rdf * sign_term * outer_sign) * (
                        np.asarray(hval, dtype=ec.dtype)
                        if np.ndim(hval)
                        else self.dtype(hval)
                    )

    def correct_h(self, h_fields, ch_vac: float):
        """Remove the incident-E contribution seen by scattered-field H nodes
        just outside the box (called right after the main H update)."""
        for f in range(3):
            rdf = 1.0 / self.grid.deltas[f]
            for g in range(3):
                if g == f:
                    continue
                c = 3 - f - g
                g1, g2 = (g + 1) % 3, (g + 2) % 3
                sign_h = 1.0 if f == g1 else -1.0
                if abs(self.pol[c]) < 1e-15:
                    continue
                hg = h_fields[g]
                for side, q in ((0, self.lo[f]), (1, self.hi[f])):
                    if self.axis == f:
                        eval_ = self.pol[c] * float(self.e_inc(q))
                    elif self.axis == g:
                        idx = np.arange(self.lo[g], self.hi[g] + 1)
                        eval_ = self.pol[c] * self.e_inc(idx)
                        eval_ = self._profile(eval_, f, c, g, None)
                    else:  # axis == c: pol[c] == 0, skipped
                        continue
                    sl = self._face_slices(f, c, g, False)
                    sl[f] = q - 1 if side == 0 else q
                    inner_sign = 1.0 if side == 0 else -1.0
                    hg[tuple(sl)] += self.dtype(ch_vac * rdf * sign_h * inner_sign) * (
                        np.asarray(eval_, dtype=hg.dtype)
                        if np.ndim(eval_)
                        else self.dtype(eval_)
                    )
