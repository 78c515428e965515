"""Parametric scene generators for the bundled antenna family: a probe-fed
reference patch and three metamaterial-loaded variants built around it.

The metamaterial artwork is axis-aligned sheet metal on the substrate top,
tiled on a centered lattice around the patch. Adjacent board quadrants
alternate the unit-cell orientation (or presence) so their specular
reflections are close to antiphase near the operating frequency; the shipped
default dimensions were tuned with the unit-cell solver in this package.
"""

from __future__ import annotations

from .design import (
    patch_edge_resistance,
    patch_resonant_frequency,
    probe_inset,
    size_patch,
)
from .errors import FormulaDomainError, TilingOverflowError
from .scene import Material, PortSpec, Primitive, Scene

PEC = Material(name="PEC", pec=True)

KIND_PCM = "pcm-chessboard"
KIND_L = "l-fractal"
KIND_SQUARE = "square-fractal"

# Unit-cell and lattice defaults per kind; the bundled scene files are
# generated from exactly these numbers (see tools/make_scenes.py).
DEFAULT_PARAMS: dict[str, dict] = {
    KIND_PCM: {
        "pitch_m": 20.0e-3,
        "count": 4,
        "cell_size_m": 17.0e-3,
        "notch_m": 8.0e-3,
        "clearance_m": 1.5e-3,
        "patch_length_m": None,
    },
    KIND_L: {
        "pitch_m": 20.0e-3,
        "count": 4,
        "arm_len_m": 17.0e-3,
        "arm_wid_m": 4.0e-3,
        "clearance_m": 1.5e-3,
        "patch_length_m": 14.5e-3,
    },
    KIND_SQUARE: {
        "pitch_m": 20.0e-3,
        "count": 4,
        "outer_m": 17.0e-3,
        "strip_m": 3.0e-3,
        "iterations": 1,
        "clearance_m": 1.5e-3,
        "patch_length_m": 14.8e-3,
    },
}


def _sheet(material: str, x0, y0, x1, y1, z) -> Primitive:
    return Primitive(
        shape="sheet",
        material=material,
        min_corner=(min(x0, x1), min(y0, y1), z),
        max_corner=(max(x0, x1), max(y0, y1), z),
    )


def generate_reference_patch(
    f0_hz: float,
    substrate: Material,
    h_m: float,
    footprint_m: float,
    *,
    patch_width_m: float | None = None,
    patch_length_m: float | None = None,
    name: str = "reference_patch",
) -> Scene:
    """Probe-fed rectangular patch centered on a square ground plane.

    Dimensions default to the transmission-line model at f0; explicit
    overrides allow reproducing externally tuned artwork. The probe sits on
    the patch centerline, inset from the radiating edge to the 50-ohm point
    of the cavity-model resistance profile.
    """
    if f0_hz <= 0:
        raise FormulaDomainError("f0 must be positive")
    if h_m <= 0:
        raise FormulaDomainError("substrate height must be positive")
    if footprint_m <= 0:
        raise FormulaDomainError("footprint must be positive")
    dims = size_patch(f0_hz, substrate.relative_permittivity, h_m)
    w = patch_width_m if patch_width_m is not None else dims.width
    length = patch_length_m if patch_length_m is not None else dims.length

    r_edge = patch_edge_resistance(f0_hz, w)
    inset = probe_inset(length, r_edge, 50.0)
    feed_x = -length / 2.0 + inset

    half = footprint_m / 2.0
    primitives = (
        Primitive(
            shape="box",
            material=substrate.name,
            min_corner=(-half, -half, 0.0),
            max_corner=(half, half, h_m),
        ),
        _sheet("PEC", -half, -half, half, half, 0.0),
        _sheet("PEC", -length / 2.0, -w / 2.0, length / 2.0, w / 2.0, h_m),
    )
    return Scene(
        name=name,
        description=(
            f"patch {length * 1e3:.3f} x {w * 1e3:.3f} mm (L x W) on "
            f"{footprint_m * 1e3:.0f} mm {substrate.name}, f0 {f0_hz / 1e9:.3g} GHz"
        ),
        footprint=(footprint_m, footprint_m),
        substrate_thickness=h_m,
        materials=(PEC, substrate),
        primitives=primitives,
        port=PortSpec(location=(feed_x, 0.0, 0.0), axis="z", reference_impedance=50.0),
    )


def _find_center_patch(base: Scene) -> tuple[int, Primitive]:
    """Locate the radiating patch: a top-metal sheet covering the origin."""
    h = base.substrate_thickness
    for i, p in enumerate(base.primitives):
        if p.shape != "sheet" or p.min_corner is None:
            continue
        if abs(p.min_corner[2] - h) > 1e-12 or abs(p.max_corner[2] - h) > 1e-12:
            continue
        if p.min_corner[0] < 0 < p.max_corner[0] and p.min_corner[1] < 0 < p.max_corner[1]:
            return i, p
    raise FormulaDomainError("base scene has no center patch sheet on the substrate top")


def _cell_pcm(cx: float, cy: float, z: float, flip: bool, params: dict) -> list[Primitive]:
    """Corner-truncated square: a full-width lower rectangle plus a partial
    upper one. The missing corner swaps side between quadrants, rotating the
    cell's diagonal anisotropy by 90 degrees."""
    s = params["cell_size_m"]
    c = params["notch_m"]
    x0, y0 = cx - s / 2.0, cy - s / 2.0
    lower = _sheet("PEC", x0, y0, x0 + s, y0 + s - c, z)
    if flip:
        upper = _sheet("PEC", x0 + c, y0 + s - c, x0 + s, y0 + s, z)
    else:
        upper = _sheet("PEC", x0, y0 + s - c, x0 + s - c, y0 + s, z)
    return [lower, upper]


def _cell_l(cx: float, cy: float, z: float, flip: bool, params: dict) -> list[Primitive]:
    """Two equal arms meeting in a corner; mirrored between quadrants."""
    a = params["arm_len_m"]
    w = params["arm_wid_m"]
    x0, y0 = cx - a / 2.0, cy - a / 2.0
    vert_x0 = x0 if not flip else cx + a / 2.0 - w
    horiz = _sheet("PEC", x0, y0, x0 + a, y0 + w, z)
    vert = _sheet("PEC", vert_x0, y0, vert_x0 + w, y0 + a, z)
    return [horiz, vert]


def _cell_square(cx: float, cy: float, z: float, flip: bool, params: dict) -> list[Primitive]:
    """Square ring, optionally with a centered inner ring iteration. The ring
    is isotropic, so quadrants alternate presence instead of orientation."""
    if flip:
        return []
    out: list[Primitive] = []
    size = params["outer_m"]
    w = params["strip_m"]
    for _ in range(int(params.get("iterations", 1)) + 1):
        x0, y0 = cx - size / 2.0, cy - size / 2.0
        out.append(_sheet("PEC", x0, y0, x0 + size, y0 + w, z))
        out.append(_sheet("PEC", x0, y0 + size - w, x0 + size, y0 + size, z))
        out.append(_sheet("PEC", x0, y0 + w, x0 + w, y0 + size - w, z))
        out.append(_sheet("PEC", x0 + size - w, y0 + w, x0 + size, y0 + size - w, z))
        size = size / 2.0
        if size < 3.0 * w:
            break
    return out


_CELL_BUILDERS = {KIND_PCM: _cell_pcm, KIND_L: _cell_l, KIND_SQUARE: _cell_square}


def generate_metamaterial_antenna(kind: str, params: dict | None, base: Scene) -> Scene:
    """Surround the base antenna's center patch with a lattice of unit-cell
    sheets; adjacent quadrants alternate cell orientation (or presence).

    The center patch length may be overridden via params["patch_length_m"]
    (the bundled variants use the published per-kind lengths), in which case
    the probe inset is recomputed for the new length.
    """
    if kind not in _CELL_BUILDERS:
        raise ValueError(f"unknown metamaterial kind {kind!r}; expected one of "
                         f"{sorted(_CELL_BUILDERS)}")
    merged = dict(DEFAULT_PARAMS[kind])
    merged.update(params or {})
    count = int(merged["count"])
    pitch = float(merged["pitch_m"])
    clearance = float(merged["clearance_m"])

    patch_idx, patch = _find_center_patch(base)
    primitives = list(base.primitives)
    port = base.port
    h = base.substrate_thickness

    new_length = merged.get("patch_length_m")
    if new_length is not None:
        width = patch.max_corner[1] - patch.min_corner[1]
        primitives[patch_idx] = _sheet(
            patch.material, -new_length / 2.0, -width / 2.0,
            new_length / 2.0, width / 2.0, h,
        )
        patch = primitives[patch_idx]
        if port is not None:
            # Re-derive the probe point for the altered resonant length.
            substrate = next(m for m in base.materials if not m.pec)
            f0 = patch_resonant_frequency(
                new_length, width, substrate.relative_permittivity, h
            )
            r_edge = patch_edge_resistance(f0, width)
            inset = probe_inset(new_length, r_edge, port.reference_impedance)
            port = PortSpec(
                location=(-new_length / 2.0 + inset, 0.0, port.location[2]),
                axis=port.axis,
                reference_impedance=port.reference_impedance,
            )

    if count == 0:
        return base

    extent = count * pitch
    if extent > min(base.footprint) + 1e-12:
        raise TilingOverflowError(
            f"{count} cells at {pitch * 1e3:.3g} mm pitch span "
            f"{extent * 1e3:.3g} mm, exceeding the "
            f"{min(base.footprint) * 1e3:.3g} mm footprint"
        )

    clear_x0 = patch.min_corner[0] - clearance
    clear_x1 = patch.max_corner[0] + clearance
    clear_y0 = patch.min_corner[1] - clearance
    clear_y1 = patch.max_corner[1] + clearance

    build = _CELL_BUILDERS[kind]
    added = 0
    for ix in range(count):
        for iy in range(count):
            cx = (ix - (count - 1) / 2.0) * pitch
            cy = (iy - (count - 1) / 2.0) * pitch
            half = pitch / 2.0
            if (
                cx + half > clear_x0
                and cx - half < clear_x1
                and cy + half > clear_y0
                and cy - half < clear_y1
            ):
                continue
            flip = (cx < 0) != (cy < 0)
            cells = build(cx, cy, h, flip, merged)
            primitives.extend(cells)
            added += len(cells)

    return Scene(
        name=f"{kind.replace('-', '_')}",
        description=(
            f"{base.description}; {kind} lattice {count}x{count} at "
            f"{pitch * 1e3:.3g} mm pitch"
        ),
        footprint=base.footprint,
        substrate_thickness=base.substrate_thickness,
        materials=base.materials,
        primitives=tuple(primitives),
        port=port,
        illumination=base.illumination,
    )
