"""Time-marching driver: builds a simulation from a scene, runs the leapfrog
loop with CPML and excitation, and collects raw records.

Update order per iteration n (E at t=n dt, H at t=(n+1/2) dt on entry):
E update -> CPML E -> TF/SF E corrections -> lumped sources -> 1-D incident E
march -> H update -> CPML H -> TF/SF H corrections -> 1-D incident H march ->
recorders. Port voltage samples therefore sit at (n+1) dt and current samples
at (n+3/2) dt; every DFT uses those exact times.

Runs are deterministic: identical inputs produce bit-identical records.
"""

from __future__ import annotations

import json
import struct
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..constants import C0, EPS0, MU0
from ..errors import (
    ExcitationError,
    GridFitError,
    RingdownWarning,
    SceneValidationError,
    StabilityError,
)
from ..scene import Scene, validate
from . import kernels
from .grid import GridSpec, courant_dt, scene_bounds
from .rasterize import rasterize
from .recorders import HuygensRecorder
from .sources import DifferentiatedGaussian, cpml_profiles
from .tfsf import PlaneWaveInjector

_AXIS = {"x": 0, "y": 1, "z": 2}


@dataclass(frozen=True)
class RecorderSpec:
    """What a run records.

    huygens_freqs enables the surface DFT; the box defaults to the domain
    interior inset huygens_gap cells from the CPML, and the quadrature patch
    size / sampling stride default to band-safe values.
    """

    port: bool = True
    huygens_freqs: tuple[float, ...] = ()
    huygens_box: tuple[tuple[int, int, int], tuple[int, int, int]] | None = None
    huygens_gap: int = 6
    huygens_decimate: int | None = None
    huygens_stride: int | None = None
    probes: tuple[tuple[int, tuple[int, int, int]], ...] = ()


@dataclass
class SoftSource:
    """Additive E-field excitation on one edge (test instrumentation)."""

    component: int
    index: tuple[int, int, int]
    waveform: object
    amplitude: float = 1.0


@dataclass
class LumpedResistor:
    """Resistive load across one grid edge."""

    axis: str
    location: tuple[float, float, float]
    ohms: float


@dataclass
class RawRecords:
    """Raw simulation outputs (SI units, float64 time series)."""

    dt: float
    steps: int
    port_z0: float | None = None
    port_v: np.ndarray | None = None
    port_i: np.ndarray | None = None
    drive_kind: str = "port"
    source_meta: dict = field(default_factory=dict)
    huygens: HuygensRecorder | None = None
    probes: dict = field(default_factory=dict)
    incident_e: np.ndarray | None = None
    ringdown_db: float | None = None
    ringdown_met: bool = True
    f_ref: float = 0.0

    @property
    def v_times(self) -> np.ndarray:
        return self.dt * (np.arange(self.steps) + 1.0)

    @property
    def i_times(self) -> np.ndarray:
        return self.dt * (np.arange(self.steps) + 1.5)

    def port_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("time_s,v_volts,i_amps\n")
            for t, v, i in zip(self.v_times, self.port_v, self.port_i):
                fh.write(f"{t!r},{v!r},{i!r}\n")

    def dump(self, path) -> None:
        """Binary dump: magic, JSON header (lengths/fields), then raw
        little-endian float64 arrays in header order."""
        arrays: dict[str, np.ndarray] = {}
        if self.port_v is not None:
            arrays["port_v"] = self.port_v
            arrays["port_i"] = self.port_i
        if self.incident_e is not None:
            arrays["incident_e"] = self.incident_e
        for key, series in self.probes.items():
            arrays[f"probe_{key[0]}_{key[1][0]}_{key[1][1]}_{key[1][2]}"] = series
        header = {
            "dt": self.dt,
            "steps": self.steps,
            "port_z0": self.port_z0,
            "drive_kind": self.drive_kind,
            "arrays": [[k, int(v.size)] for k, v in arrays.items()],
        }
        blob = json.dumps(header, sort_keys=True).encode("utf-8")
        with open(path, "wb") as fh:
            fh.write(b"PSRR\x01")
            fh.write(struct.pack("<I", len(blob)))
            fh.write(blob)
            for _, v in arrays.items():
                fh.write(np.asarray(v, dtype="<f8").tobytes())

    @classmethod
    def load(cls, path) -> "RawRecords":
        with open(path, "rb") as fh:
            magic = fh.read(5)
            if magic != b"PSRR\x01":
                raise ValueError("not a patchscope raw-record dump")
            (n,) = struct.unpack("<I", fh.read(4))
            header = json.loads(fh.read(n).decode("utf-8"))
            out = cls(
                dt=header["dt"],
                steps=header["steps"],
                port_z0=header["port_z0"],
                drive_kind=header["drive_kind"],
            )
            for name, size in header["arrays"]:
                arr = np.frombuffer(fh.read(8 * size), dtype="<f8").copy()
                if name == "port_v":
                    out.port_v = arr
                elif name == "port_i":
                    out.port_i = arr
                elif name == "incident_e":
                    out.incident_e = arr
                else:
                    out.probes[name] = arr
        return out


class Simulation:
    """One configured FDTD run over a validated scene."""

    def __init__(
        self,
        scene: Scene,
        grid: GridSpec,
        *,
        recorders: RecorderSpec | None = None,
        drive: str = "auto",
        port_waveform=None,
        f_ref: float | None = None,
        safety: float = 0.99,
        lumped: tuple[LumpedResistor, ...] = (),
        soft_sources: tuple[SoftSource, ...] = (),
        tf_margin_cells: int = 4,
        blowup_ceiling: float = 1e9,
    ):
        violations = validate(scene)
        if drive != "auto":
            # Monostatic RCS runs terminate the port under illumination, and
            # instrumentation runs (drive="none") use bare soft sources; the
            # scene-level excitation-exclusivity rule is waived when the
            # caller picks the excitation explicitly.
            violations = [v for v in violations if v.path != "port" or "exactly one" not in v.message and "needs a port" not in v.message]
        if violations:
            raise SceneValidationError(violations)
        self.scene = scene
        self.grid = grid
        self.recorders = recorders or RecorderSpec()
        self.dtype = np.float32 if grid.dtype == "float32" else np.float64
        self.dt = courant_dt(grid, safety)
        self.blowup_ceiling = blowup_ceiling

        if drive == "auto":
            drive = "port" if scene.port is not None else "illumination"
        if drive == "port" and scene.port is None:
            raise ExcitationError("scene has no port to drive")
        if drive == "illumination" and scene.illumination is None:
            raise ExcitationError("scene has no illumination to drive")
        if drive not in ("port", "illumination", "none"):
            raise ExcitationError(f"unknown drive mode {drive!r}")
        self.drive = drive

        self.port_waveform = port_waveform or DifferentiatedGaussian()
        if f_ref is None:
            if drive == "illumination":
                f_ref = scene.illumination.waveform.center_hz
            else:
                f_ref = self.port_waveform.peak_hz
        self.f_ref = f_ref

        self.mat = rasterize(scene, grid, f_ref)
        nx, ny, nz = grid.shape
        dtype = self.dtype
        self.ex = np.zeros((nx, ny + 1, nz + 1), dtype)
        self.ey = np.zeros((nx + 1, ny, nz + 1), dtype)
        self.ez = np.zeros((nx + 1, ny + 1, nz), dtype)
        self.hx = np.zeros((nx + 1, ny, nz), dtype)
        self.hy = np.zeros((nx, ny + 1, nz), dtype)
        self.hz = np.zeros((nx, ny, nz + 1), dtype)

        # Port: lumped Thevenin row plus a PEC pin up to the patch metal.
        self.has_port = scene.port is not None
        if self.has_port:
            self._setup_port()

        for lump in lumped:
            comp = _AXIS[lump.axis]
            ijk = self._edge_index(comp, lump.location)
            self.mat.add_lumped_edge(comp, ijk, lump.ohms)

        self.ca, self.cb = self.mat.coefficient_tables(self.dt, dtype)
        self.soft_sources = tuple(soft_sources)

        # CPML state.
        self.cpml = grid.cpml_layers > 0
        if self.cpml:
            self._setup_cpml()

        # Plane-wave injection.
        self.tfsf = None
        if drive == "illumination":
            self._setup_tfsf(tf_margin_cells)

        # Recorders.
        self.port_v: list[float] = []
        self.port_i: list[float] = []
        self.probe_series = {
            (comp, tuple(ijk)): [] for comp, ijk in self.recorders.probes
        }
        self.huygens = None
        if self.recorders.huygens_freqs:
            self._setup_huygens()
        self.n = 0

    # ---- setup helpers -----------------------------------------------------

    def _edge_index(self, comp: int, location) -> tuple[int, int, int]:
        g = self.grid
        idx = []
        for a in range(3):
            f = (location[a] - g.origin[a]) / g.deltas[a]
            i = int(np.floor(f + 1e-6)) if a == comp else int(round(f))
            if not 0 <= i <= g.shape[a] - (1 if a == comp else 0):
                raise GridFitError(f"edge location {location} outside domain")
            idx.append(i)
        return tuple(idx)

    def _setup_port(self):
        port = self.scene.port
        comp = _AXIS[port.axis]
        ijk = self._edge_index(comp, port.location)
        self.port_comp = comp
        self.port_ijk = ijk
        row = self.mat.add_lumped_edge(comp, ijk, port.reference_impedance)
        self.port_row = row
        d = self.grid.deltas
        area = d[(comp + 1) % 3] * d[(comp + 2) % 3]
        self.port_area = area
        self.port_rs = port.reference_impedance

        # Complete the probe with PEC edges up to the first metal plane above
        # (within one substrate thickness); without metal above, the bare
        # source edge is left as-is.
        h = self.scene.substrate_thickness
        n_pin = int(round(h / d[comp]))
        idx_arr = self.mat.idx[comp]
        tang1 = self.mat.idx[(comp + 1) % 3]
        top = list(ijk)
        top[comp] += n_pin
        has_metal = False
        probe = list(top)
        if probe[comp] <= self.grid.shape[comp] and all(
            probe[a] < tang1.shape[a] for a in range(3)
        ):
            has_metal = tang1[tuple(probe)] == 0
        if has_metal:
            pin = list(ijk)
            for k in range(ijk[comp] + 1, ijk[comp] + n_pin):
                pin[comp] = k
                idx_arr[tuple(pin)] = 0

    def _setup_cpml(self):
        g = self.grid
        self.psi = {}
        self.cpml_idx = {}
        self.cpml_prof = {}
        for a, n in enumerate(g.shape):
            (be, ae), (bh, ah) = cpml_profiles(
                n + 1,
                g.cpml_layers,
                g.deltas[a],
                self.dt,
                order=g.cpml_order,
                sigma_scale=g.cpml_sigma_scale,
                alpha_max=g.cpml_alpha_max,
            )
            self.cpml_prof[a] = (
                be.astype(self.dtype),
                ae.astype(self.dtype),
                bh.astype(self.dtype),
                ah.astype(self.dtype),
            )
            L = g.cpml_layers
            self.cpml_idx[a] = (
                np.arange(1, L + 1, dtype=np.int64),
                np.arange(n - L, n, dtype=np.int64),
                np.arange(0, L, dtype=np.int64),
                np.arange(n - L, n, dtype=np.int64),
            )
        shp = {
            "ex": self.ex.shape,
            "ey": self.ey.shape,
            "ez": self.ez.shape,
            "hx": self.hx.shape,
            "hy": self.hy.shape,
            "hz": self.hz.shape,
        }
        mk = lambda s: np.zeros(s, self.dtype)
        self.psi_eyx = mk(shp["ey"])
        self.psi_ezx = mk(shp["ez"])
        self.psi_exy = mk(shp["ex"])
        self.psi_ezy = mk(shp["ez"])
        self.psi_exz = mk(shp["ex"])
        self.psi_eyz = mk(shp["ey"])
        self.psi_hyx = mk(shp["hy"])
        self.psi_hzx = mk(shp["hz"])
        self.psi_hxy = mk(shp["hx"])
        self.psi_hzy = mk(shp["hz"])
        self.psi_hxz = mk(shp["hx"])
        self.psi_hyz = mk(shp["hy"])

    def _setup_tfsf(self, margin_cells: int):
        g = self.grid
        lo_m, hi_m = scene_bounds(self.scene)
        lo = []
        hi = []
        for a in range(3):
            if np.isfinite(lo_m[a]) and hi_m[a] > lo_m[a] or self.scene.primitives:
                i0 = int(np.floor((lo_m[a] - g.origin[a]) / g.deltas[a])) - margin_cells
                i1 = int(np.ceil((hi_m[a] - g.origin[a]) / g.deltas[a])) + margin_cells
            else:
                mid = g.shape[a] // 2
                i0, i1 = mid - margin_cells, mid + margin_cells
            lo.append(max(i0, g.cpml_layers + 3))
            hi.append(min(i1, g.shape[a] - g.cpml_layers - 3))
        self.tfsf = PlaneWaveInjector(
            g, tuple(lo), tuple(hi), self.scene.illumination, self.dt, self.dtype
        )
        vac = self._vacuum_row()
        for f in range(3):
            for q in (lo[f], hi[f]):
                for c in range(3):
                    if c == f:
                        continue
                    sl = [slice(self.tfsf.lo[a], self.tfsf.hi[a] + 1) for a in range(3)]
                    sl[c] = slice(self.tfsf.lo[c], self.tfsf.hi[c])
                    sl[f] = q
                    band = self.mat.idx[c][tuple(sl)]
                    if not np.all(band == vac):
                        raise GridFitError(
                            "total-field box faces must lie in vacuum"
                        )

    def _vacuum_row(self) -> int:
        eps = np.asarray(self.mat.eps_table)
        sig = np.asarray(self.mat.sigma_table)
        rows = np.where((eps == 1.0) & (sig == 0.0))[0]
        rows = rows[rows > 0]
        if len(rows) == 0:
            raise GridFitError("no vacuum row in material table")
        return int(rows[0])

    def _setup_huygens(self):
        g = self.grid
        r = self.recorders
        if r.huygens_box is not None:
            lo, hi = r.huygens_box
        else:
            gap = g.cpml_layers + r.huygens_gap
            lo = [gap] * 3
            hi = [g.shape[a] - gap for a in range(3)]
        if self.tfsf is not None:
            for a in range(3):
                if not (lo[a] < self.tfsf.lo[a] and hi[a] > self.tfsf.hi[a]):
                    raise GridFitError(
                        "Huygens box must enclose the total-field box "
                        "(scattered-field recording)"
                    )
        decim = r.huygens_decimate
        if decim is None:
            fmax = max(r.huygens_freqs)
            lam_min = C0 / fmax
            decim = max(1, int(np.floor(lam_min / (12.0 * max(g.deltas)))))
            decim = min(decim, 4)
        lo = list(lo)
        hi = list(hi)
        for a in range(3):
            span = hi[a] - lo[a]
            hi[a] = lo[a] + span - (span % decim)
        if self.tfsf is not None:
            for a in range(3):
                if hi[a] <= self.tfsf.hi[a]:
                    raise GridFitError(
                        "Huygens box collapsed onto the total-field box; "
                        "enlarge the domain margins"
                    )
        stride = r.huygens_stride
        if stride is None:
            fmax = max(r.huygens_freqs)
            stride = max(1, int(np.floor(1.0 / (8.0 * fmax * self.dt))))
            stride = min(stride, 8)
        self.huygens = HuygensRecorder(
            g, lo, hi, r.huygens_freqs, self.dt, decimate=decim, stride=stride
        )

    # ---- stepping ----------------------------------------------------------

    def step(self):
        g = self.grid
        dtype = self.dtype
        rdx = dtype(1.0 / g.dx)
        rdy = dtype(1.0 / g.dy)
        rdz = dtype(1.0 / g.dz)
        ch = dtype(self.dt / MU0)
        kernels.update_e(
            self.ex, self.ey, self.ez, self.hx, self.hy, self.hz,
            self.mat.idx[0], self.mat.idx[1], self.mat.idx[2],
            self.ca, self.cb, rdx, rdy, rdz,
        )
        if self.cpml:
            bex, aex, bhx, ahx = self.cpml_prof[0]
            bey, aey, bhy, ahy = self.cpml_prof[1]
            bez, aez, bhz, ahz = self.cpml_prof[2]
            elox, ehix, hlox, hhix = self.cpml_idx[0]
            eloy, ehiy, hloy, hhiy = self.cpml_idx[1]
            eloz, ehiz, hloz, hhiz = self.cpml_idx[2]
            kernels.cpml_e_x(
                self.ey, self.ez, self.hy, self.hz, self.mat.idx[1], self.mat.idx[2],
                self.cb, self.psi_eyx, self.psi_ezx, bex, aex, rdx, elox, ehix,
            )
            kernels.cpml_e_y(
                self.ex, self.ez, self.hx, self.hz, self.mat.idx[0], self.mat.idx[2],
                self.cb, self.psi_exy, self.psi_ezy, bey, aey, rdy, eloy, ehiy,
            )
            kernels.cpml_e_z(
                self.ex, self.ey, self.hx, self.hy, self.mat.idx[0], self.mat.idx[1],
                self.cb, self.psi_exz, self.psi_eyz, bez, aez, rdz, eloz, ehiz,
            )
        if self.tfsf is not None:
            self.tfsf.correct_e(
                (self.ex, self.ey, self.ez), self.dt / EPS0
            )
        if self.drive == "port":
            t_mid = (self.n + 0.5) * self.dt
            vs = float(self.port_waveform(t_mid))
            e_arr = (self.ex, self.ey, self.ez)[self.port_comp]
            cbv = float(self.cb[self.port_row])
            e_arr[self.port_ijk] -= dtype(
                cbv * vs / (self.port_rs * self.port_area)
            )
        for src in self.soft_sources:
            arr = (self.ex, self.ey, self.ez)[src.component]
            arr[src.index] += dtype(src.amplitude * float(src.waveform((self.n + 1) * self.dt)))
        if self.tfsf is not None:
            self.tfsf.advance_e()

        kernels.update_h(
            self.ex, self.ey, self.ez, self.hx, self.hy, self.hz, ch, rdx, rdy, rdz
        )
        if self.cpml:
            kernels.cpml_h_x(
                self.hy, self.hz, self.ey, self.ez, ch,
                self.psi_hyx, self.psi_hzx, bhx, ahx, rdx, hlox, hhix,
            )
            kernels.cpml_h_y(
                self.hx, self.hz, self.ex, self.ez, ch,
                self.psi_hxy, self.psi_hzy, bhy, ahy, rdy, hloy, hhiy,
            )
            kernels.cpml_h_z(
                self.hx, self.hy, self.ex, self.ey, ch,
                self.psi_hxz, self.psi_hyz, bhz, ahz, rdz, hloz, hhiz,
            )
        if self.tfsf is not None:
            self.tfsf.correct_h((self.hx, self.hy, self.hz), self.dt / MU0)
            self.tfsf.advance_h()

        # Records.
        if self.scene.port is not None and self.recorders.port:
            comp = self.port_comp
            i, j, k = self.port_ijk
            e_arr = (self.ex, self.ey, self.ez)[comp]
            v = -float(e_arr[i, j, k]) * g.deltas[comp]
            self.port_v.append(v)
            self.port_i.append(self._port_loop_current())
        for (comp, ijk), series in self.probe_series.items():
            arr = (self.ex, self.ey, self.ez)[comp]
            series.append(float(arr[ijk]))
        if self.huygens is not None:
            self.huygens.accumulate(
                self.n,
                (self.n + 1.0) * self.dt,
                (self.n + 1.5) * self.dt,
                (self.ex, self.ey, self.ez),
                (self.hx, self.hy, self.hz),
            )
        self.n += 1

    def _port_loop_current(self) -> float:
        comp = self.port_comp
        i, j, k = self.port_ijk
        d = self.grid.deltas
        if comp == 2:
            return float(
                (self.hy[i, j, k] - self.hy[i - 1, j, k]) * d[1]
                - (self.hx[i, j, k] - self.hx[i, j - 1, k]) * d[0]
            )
        if comp == 0:
            return float(
                (self.hz[i, j, k] - self.hz[i, j - 1, k]) * d[2]
                - (self.hy[i, j, k] - self.hy[i, j, k - 1]) * d[1]
            )
        return float(
            (self.hx[i, j, k] - self.hx[i, j, k - 1]) * d[0]
            - (self.hz[i - 1, j, k] - self.hz[i, j, k]) * d[2]
        )

    def field_peak(self) -> float:
        return float(kernels.field_peak(self.ex, self.ey, self.ez))

    def run(
        self,
        nsteps: int,
        *,
        ringdown_db: float = -60.0,
        check_interval: int = 250,
        min_steps: int | None = None,
    ) -> RawRecords:
        """March nsteps (stopping early once the monitored energy has decayed
        by ringdown_db below its peak) and package the records."""
        source_end = self._source_end_step()
        for _ in range(nsteps):
            self.step()
            if self.n % check_interval == 0:
                peak = self.field_peak()
                if not np.isfinite(peak) or peak > self.blowup_ceiling:
                    raise StabilityError(
                        f"field peak {peak:.3g} exceeded ceiling at step {self.n}"
                    )
                if self.n > source_end and self._ringdown() <= ringdown_db:
                    break
        met = self._ringdown() <= ringdown_db
        if not met:
            warnings.warn(
                f"run ended at {self._ringdown():.1f} dB ring-down "
                f"(target {ringdown_db:.1f} dB)",
                RingdownWarning,
            )
        rec = RawRecords(
            dt=self.dt,
            steps=self.n,
            drive_kind=self.drive,
            f_ref=self.f_ref,
            ringdown_db=self._ringdown(),
            ringdown_met=met,
        )
        if self.scene.port is not None and self.recorders.port:
            rec.port_z0 = self.scene.port.reference_impedance
            rec.port_v = np.asarray(self.port_v)
            rec.port_i = np.asarray(self.port_i)
        if self.drive == "port":
            rec.source_meta = {
                "kind": "differentiated-gaussian",
                "peak_hz": self.port_waveform.peak_hz,
            }
        else:
            wf = self.scene.illumination.waveform
            rec.source_meta = {
                "kind": wf.kind,
                "center_hz": wf.center_hz,
                "bandwidth_hz": wf.bandwidth_hz,
            }
            rec.incident_e = np.asarray(self.tfsf.e_ref)
        rec.huygens = self.huygens
        rec.probes = {
            key: np.asarray(series) for key, series in self.probe_series.items()
        }
        return rec

    def _source_end_step(self) -> int:
        if self.drive == "port":
            dur = self.port_waveform.duration
        elif self.drive == "illumination":
            dur = self.tfsf.waveform.duration + (
                (self.tfsf.hi[self.tfsf.axis] - self.tfsf.lo[self.tfsf.axis])
                * self.grid.deltas[self.tfsf.axis]
                / C0
            )
        else:
            dur = max(
                (getattr(s.waveform, "duration", 0.0) for s in self.soft_sources),
                default=0.0,
            )
        return int(np.ceil(dur / self.dt)) + 1

    def _ringdown(self) -> float:
        """Monitored energy decay (dB) relative to the run's peak."""
        if self.drive == "port" and self.port_v:
            v = np.square(self.port_v)
            peak = float(np.max(v))
            if peak == 0.0:
                return 0.0
            tail = float(np.max(v[-200:]))
            return 10.0 * np.log10(max(tail / peak, 1e-300))
        if self.huygens is not None and self.huygens.peak_history:
            hist = np.asarray([p for _, p in self.huygens.peak_history])
            peak = float(hist.max())
            if peak == 0.0:
                return 0.0
            tail = float(hist[-3:].max())
            return 20.0 * np.log10(max(tail / peak, 1e-300))
        return 0.0


def run(
    scene: Scene,
    grid: GridSpec,
    nsteps: int,
    recorders: RecorderSpec | None = None,
    **kwargs,
) -> RawRecords:
    """Build and march a simulation; see Simulation for options."""
    ringdown_db = kwargs.pop("ringdown_db", -60.0)
    sim = Simulation(scene, grid, recorders=recorders, **kwargs)
    if nsteps == 0:
        return RawRecords(
            dt=sim.dt,
            steps=0,
            drive_kind=sim.drive,
            port_z0=scene.port.reference_impedance if scene.port else None,
            port_v=np.zeros(0) if scene.port else None,
            port_i=np.zeros(0) if scene.port else None,
            f_ref=sim.f_ref,
        )
    return sim.run(nsteps, ringdown_db=ringdown_db)
