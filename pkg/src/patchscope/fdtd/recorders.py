"""Running-DFT recorder for the tangential fields on a closed Huygens box.

Tangential E and H are collocated at face-cell centers (edge pairs averaged
for E, the four straddling samples for H), block-averaged onto coarser
quadrature patches, and accumulated against exp(+i*omega*t) at the exact
staggered sample times. Accumulation may run on a step stride well above the
band's Nyquist needs; stride and patch size only trade quadrature cost.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class FaceData:
    """One box face: geometry plus DFT accumulators.

    acc_e/acc_h have shape (nfreq, 2, na, nb); component index 0 is the
    tangential component along axis ta, 1 along tb, with in-plane array axes
    ordered (ta, tb). side 0/1 marks the low/high face along `normal`.
    """

    normal: int
    side: int
    ta: int
    tb: int
    centers: np.ndarray
    area: float
    acc_e: np.ndarray
    acc_h: np.ndarray

    @property
    def outward_sign(self) -> int:
        return 1 if self.side == 1 else -1


def _avg_pairs(arr: np.ndarray, axis: int) -> np.ndarray:
    lo = [slice(None)] * arr.ndim
    hi = [slice(None)] * arr.ndim
    lo[axis] = slice(0, -1)
    hi[axis] = slice(1, None)
    return 0.5 * (arr[tuple(lo)] + arr[tuple(hi)])


class HuygensRecorder:
    def __init__(self, grid, box_lo, box_hi, freqs, dt, decimate=1, stride=1):
        self.grid = grid
        self.lo = tuple(int(v) for v in box_lo)
        self.hi = tuple(int(v) for v in box_hi)
        self.freqs = np.asarray(freqs, dtype=float)
        self.dt = dt
        self.stride = max(1, int(stride))
        self.decimate = max(1, int(decimate))
        self.faces: list[FaceData] = []
        self.samples = 0
        self.peak_history: list[tuple[int, float]] = []
        for a in range(3):
            if self.hi[a] <= self.lo[a]:
                raise ValueError("degenerate Huygens box")
            if (self.hi[a] - self.lo[a]) % self.decimate:
                raise ValueError(
                    f"box span along axis {a} must be divisible by decimate"
                )
        nf = len(self.freqs)
        for normal in range(3):
            ta, tb = (normal + 1) % 3, (normal + 2) % 3
            for side in (0, 1):
                k = self.lo[normal] if side == 0 else self.hi[normal]
                na = (self.hi[ta] - self.lo[ta]) // self.decimate
                nb = (self.hi[tb] - self.lo[tb]) // self.decimate
                da = grid.deltas[ta] * self.decimate
                db = grid.deltas[tb] * self.decimate
                ca = (
                    grid.origin[ta]
                    + grid.deltas[ta] * self.lo[ta]
                    + da * (np.arange(na) + 0.5)
                )
                cb = (
                    grid.origin[tb]
                    + grid.deltas[tb] * self.lo[tb]
                    + db * (np.arange(nb) + 0.5)
                )
                centers = np.zeros((na, nb, 3))
                centers[..., ta] = ca[:, None]
                centers[..., tb] = cb[None, :]
                centers[..., normal] = grid.origin[normal] + grid.deltas[normal] * k
                self.faces.append(
                    FaceData(
                        normal=normal,
                        side=side,
                        ta=ta,
                        tb=tb,
                        centers=centers,
                        area=da * db,
                        acc_e=np.zeros((nf, 2, na, nb), dtype=np.complex128),
                        acc_h=np.zeros((nf, 2, na, nb), dtype=np.complex128),
                    )
                )

    def _block(self, arr: np.ndarray) -> np.ndarray:
        d = self.decimate
        if d == 1:
            return arr
        na, nb = arr.shape[0] // d, arr.shape[1] // d
        return arr.reshape(na, d, nb, d).mean(axis=(1, 3))

    def _face_fields(self, face: FaceData, e_fields, h_fields):
        """Collocated tangential (e_a, e_b, h_a, h_b) on the fine face grid,
        in-plane axes ordered (ta, tb)."""
        n, ta, tb = face.normal, face.ta, face.tb
        k = self.lo[n] if face.side == 0 else self.hi[n]
        lo, hi = self.lo, self.hi

        # E along ta: already at ta half positions; average node pairs on tb.
        ea = e_fields[ta][_index3({ta: (lo[ta], hi[ta]), tb: (lo[tb], hi[tb] + 1)}, n, k)]
        e_a = _avg_pairs(ea, _plane_axis(n, tb))
        eb = e_fields[tb][_index3({tb: (lo[tb], hi[tb]), ta: (lo[ta], hi[ta] + 1)}, n, k)]
        e_b = _avg_pairs(eb, _plane_axis(n, ta))

        # H along ta: average the two planes straddling the face on n, then
        # node pairs along ta (h is already half on tb).
        ha = h_fields[ta][
            _index3({ta: (lo[ta], hi[ta] + 1), tb: (lo[tb], hi[tb]), n: (k - 1, k + 1)})
        ]
        ha = _avg_pairs(ha, n).squeeze(axis=n)
        h_a = _avg_pairs(ha, _plane_axis(n, ta))
        hb = h_fields[tb][
            _index3({tb: (lo[tb], hi[tb] + 1), ta: (lo[ta], hi[ta]), n: (k - 1, k + 1)})
        ]
        hb = _avg_pairs(hb, n).squeeze(axis=n)
        h_b = _avg_pairs(hb, _plane_axis(n, tb))

        if ta > tb:  # storage order is (x, y, z); present as (ta, tb)
            e_a, e_b, h_a, h_b = e_a.T, e_b.T, h_a.T, h_b.T
        return e_a, e_b, h_a, h_b

    def accumulate(self, step_index, t_e, t_h, e_fields, h_fields):
        """Add one sample if this step is on the stride; t_e/t_h are the exact
        E and H sample times."""
        if step_index % self.stride:
            return
        w = 2.0 * np.pi * self.freqs
        ph_e = np.exp(1j * w * t_e) * (self.dt * self.stride)
        ph_h = np.exp(1j * w * t_h) * (self.dt * self.stride)
        peak = 0.0
        for face in self.faces:
            e_a, e_b, h_a, h_b = self._face_fields(face, e_fields, h_fields)
            ea = self._block(np.asarray(e_a, dtype=np.float64))
            eb = self._block(np.asarray(e_b, dtype=np.float64))
            ha = self._block(np.asarray(h_a, dtype=np.float64))
            hb = self._block(np.asarray(h_b, dtype=np.float64))
            face.acc_e[:, 0] += ph_e[:, None, None] * ea[None]
            face.acc_e[:, 1] += ph_e[:, None, None] * eb[None]
            face.acc_h[:, 0] += ph_h[:, None, None] * ha[None]
            face.acc_h[:, 1] += ph_h[:, None, None] * hb[None]
            peak = max(peak, float(np.max(np.abs(ea))), float(np.max(np.abs(eb))))
        self.samples += 1
        self.peak_history.append((step_index, peak))


def _index3(spans: dict, fixed_axis: int | None = None, fixed_index: int | None = None):
    idx = [slice(None)] * 3
    for a, span in spans.items():
        idx[a] = slice(span[0], span[1])
    if fixed_axis is not None:
        idx[fixed_axis] = fixed_index
    return tuple(idx)


def _plane_axis(dropped_axis: int, target: int) -> int:
    """Array-axis position of `target` after integer-indexing dropped_axis."""
    remaining = [a for a in range(3) if a != dropped_axis]
    return remaining.index(target)
