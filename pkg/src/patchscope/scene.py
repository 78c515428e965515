"""Scene model: materials, primitives, excitation, JSON (de)serialization,
and invariant validation.

Scene files use SI units throughout (meters, hertz, ohms) and carry a
versioned ``"schema": 1`` field. A scene is the single source of truth for a
simulation; all value types are immutable and safe to share across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import SceneParseError, SceneSchemaError, SceneValidationError

SCHEMA_VERSION = 1

_AXES = ("x", "y", "z")
_SHAPES = ("box", "sheet", "sphere")
_WAVEFORM_TYPES = ("gaussian-pulse",)


@dataclass(frozen=True)
class Material:
    """Electromagnetic material. PEC materials carry no permittivity."""

    name: str
    relative_permittivity: float | None = None
    loss_tangent: float = 0.0
    relative_permeability: float = 1.0
    pec: bool = False


@dataclass(frozen=True)
class Primitive:
    """Axis-aligned geometric primitive referencing a material by name.

    Boxes and sheets use min/max corners (a sheet has exactly one collapsed
    axis); spheres use center/radius.
    """

    shape: str
    material: str
    min_corner: tuple[float, float, float] | None = None
    max_corner: tuple[float, float, float] | None = None
    center: tuple[float, float, float] | None = None
    radius: float | None = None


@dataclass(frozen=True)
class PortSpec:
    """Vertical lumped feed: Thevenin source edge location and axis."""

    location: tuple[float, float, float]
    axis: str = "z"
    reference_impedance: float = 50.0


@dataclass(frozen=True)
class Waveform:
    """Band-limited excitation pulse (zero-DC modulated Gaussian)."""

    kind: str = "gaussian-pulse"
    center_hz: float = 4.5e9
    bandwidth_hz: float = 5.0e9


@dataclass(frozen=True)
class IlluminationSpec:
    """Incident plane wave: unit propagation direction, orthogonal unit
    polarization, and pulse waveform."""

    direction: tuple[float, float, float]
    polarization: tuple[float, float, float]
    waveform: Waveform = field(default_factory=Waveform)


@dataclass(frozen=True)
class Scene:
    """Complete simulation target; later primitives override earlier ones."""

    name: str
    footprint: tuple[float, float]
    substrate_thickness: float
    materials: tuple[Material, ...] = ()
    primitives: tuple[Primitive, ...] = ()
    port: PortSpec | None = None
    illumination: IlluminationSpec | None = None
    description: str = ""

    def material_by_name(self, name: str) -> Material:
        for m in self.materials:
            if m.name == name:
                return m
        raise KeyError(name)


@dataclass(frozen=True)
class Violation:
    """One broken invariant: JSON-style path plus a human-readable message."""

    path: str
    message: str


def _vec3(value, path, errs):
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 3
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        errs.append(f"{path}: expected a 3-vector of numbers")
        return (0.0, 0.0, 0.0)
    return tuple(float(v) for v in value)


def validate(scene: Scene) -> list[Violation]:
    """Check every scene invariant; returns violations in deterministic order
    (empty list means the scene is valid)."""
    out: list[Violation] = []
    names = set()
    for i, m in enumerate(scene.materials):
        base = f"materials[{i}]"
        if m.name in names:
            out.append(Violation(f"{base}.name", f"duplicate material name {m.name!r}"))
        names.add(m.name)
        if m.loss_tangent < 0:
            out.append(Violation(f"{base}.loss_tangent", "loss tangent must be >= 0"))
        if m.pec:
            if m.relative_permittivity is not None:
                out.append(
                    Violation(
                        f"{base}.relative_permittivity",
                        "PEC material must not carry a permittivity",
                    )
                )
        else:
            if m.relative_permittivity is None:
                out.append(
                    Violation(
                        f"{base}.relative_permittivity",
                        "non-PEC material requires a permittivity",
                    )
                )
            elif m.relative_permittivity < 1:
                out.append(
                    Violation(
                        f"{base}.relative_permittivity",
                        "relative permittivity must be >= 1",
                    )
                )

    for i, p in enumerate(scene.primitives):
        base = f"primitives[{i}]"
        if p.shape not in _SHAPES:
            out.append(Violation(f"{base}.shape", f"unknown shape {p.shape!r}"))
            continue
        if p.material not in names:
            out.append(
                Violation(f"{base}.material", f"unknown material {p.material!r}")
            )
        if p.shape in ("box", "sheet"):
            if p.min_corner is None or p.max_corner is None:
                out.append(Violation(base, f"{p.shape} requires min/max corners"))
                continue
            ext = [p.max_corner[a] - p.min_corner[a] for a in range(3)]
            zero = sum(1 for e in ext if e == 0.0)
            if any(e < 0 for e in ext):
                out.append(Violation(base, "max corner must not precede min corner"))
            if p.shape == "box" and (zero > 0 or any(e <= 0 for e in ext)):
                out.append(Violation(base, "box extents must be strictly positive"))
            if p.shape == "sheet" and zero != 1:
                out.append(
                    Violation(base, "sheet must collapse exactly one axis to zero")
                )
            if p.shape == "sheet" and any(
                e <= 0 for e in ext if e != 0.0
            ):
                out.append(Violation(base, "sheet in-plane extents must be positive"))
        else:
            if p.center is None or p.radius is None:
                out.append(Violation(base, "sphere requires center and radius"))
            elif p.radius <= 0:
                out.append(Violation(f"{base}.radius", "sphere radius must be positive"))

    if scene.footprint[0] <= 0 or scene.footprint[1] <= 0:
        out.append(Violation("footprint_m", "footprint must be positive"))
    if scene.substrate_thickness <= 0:
        out.append(Violation("substrate_thickness_m", "thickness must be positive"))

    if scene.port is not None and scene.illumination is not None:
        out.append(
            Violation("port", "exactly one of port/illumination may be active")
        )
    if scene.port is None and scene.illumination is None:
        out.append(
            Violation("port", "scene needs a port or an illumination to be runnable")
        )

    if scene.port is not None and scene.port.reference_impedance <= 0:
        out.append(
            Violation("port.reference_impedance_ohm", "impedance must be positive")
        )
    if scene.port is not None and scene.port.axis not in _AXES:
        out.append(Violation("port.axis", f"axis must be one of {_AXES}"))

    ill = scene.illumination
    if ill is not None:
        dnorm = math.sqrt(sum(c * c for c in ill.direction))
        pnorm = math.sqrt(sum(c * c for c in ill.polarization))
        if abs(dnorm - 1.0) > 1e-9:
            out.append(
                Violation("illumination.direction", "direction must be a unit vector")
            )
        if abs(pnorm - 1.0) > 1e-9:
            out.append(
                Violation(
                    "illumination.polarization", "polarization must be a unit vector"
                )
            )
        dot = sum(d * p for d, p in zip(ill.direction, ill.polarization))
        if abs(dot) > 1e-12:
            out.append(
                Violation(
                    "illumination.polarization",
                    "polarization must be orthogonal to direction (within 1e-12)",
                )
            )
        if ill.waveform.kind not in _WAVEFORM_TYPES:
            out.append(
                Violation(
                    "illumination.waveform.kind",
                    f"waveform must be one of {_WAVEFORM_TYPES}",
                )
            )
        elif ill.waveform.center_hz <= 0 or ill.waveform.bandwidth_hz <= 0:
            out.append(
                Violation(
                    "illumination.waveform",
                    "pulse center and bandwidth must be positive",
                )
            )
    return out


_TOP_KEYS = {
    "schema",
    "name",
    "description",
    "footprint_m",
    "substrate_thickness_m",
    "materials",
    "primitives",
    "port",
    "illumination",
}
_MATERIAL_KEYS = {
    "name",
    "relative_permittivity",
    "loss_tangent",
    "relative_permeability",
    "pec",
}
_PRIMITIVE_KEYS = {"shape", "material", "min_m", "max_m", "center_m", "radius_m"}
_PORT_KEYS = {"location_m", "axis", "reference_impedance_ohm"}
_ILLUM_KEYS = {"direction", "polarization", "waveform"}
_WAVEFORM_KEYS = {"kind", "center_hz", "bandwidth_hz"}


def _check_keys(obj, allowed, required, path, errs):
    if not isinstance(obj, dict):
        errs.append(f"{path}: expected an object")
        return False
    for key in obj:
        if key not in allowed:
            errs.append(f"{path}.{key}: unknown field")
    for key in required:
        if key not in obj:
            errs.append(f"{path}.{key}: missing field")
    return all(key in obj for key in required)


def _number(obj, key, path, errs, default=None):
    if key not in obj:
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        errs.append(f"{path}.{key}: expected a number")
        return default
    return float(v)


def scene_from_dict(data: dict, source: str = "<dict>") -> Scene:
    """Build and validate a Scene from parsed JSON; raises SceneSchemaError or
    SceneValidationError naming the offending path."""
    errs: list[str] = []
    if not isinstance(data, dict):
        raise SceneSchemaError(f"{source}: top level must be an object")
    _check_keys(
        data,
        _TOP_KEYS,
        {"schema", "name", "footprint_m", "substrate_thickness_m", "materials", "primitives"},
        "scene",
        errs,
    )
    if errs:
        raise SceneSchemaError("; ".join(errs))
    if data["schema"] != SCHEMA_VERSION:
        raise SceneSchemaError(
            f"scene.schema: expected {SCHEMA_VERSION}, got {data['schema']!r}"
        )

    fp = data["footprint_m"]
    if not isinstance(fp, (list, tuple)) or len(fp) != 2:
        errs.append("scene.footprint_m: expected [length, width]")
        fp = [0.0, 0.0]
    footprint = tuple(float(v) for v in fp)
    thickness = _number(data, "substrate_thickness_m", "scene", errs, 0.0)

    materials = []
    if not isinstance(data["materials"], list):
        errs.append("scene.materials: expected a list")
    else:
        for i, m in enumerate(data["materials"]):
            path = f"materials[{i}]"
            if not _check_keys(m, _MATERIAL_KEYS, {"name"}, path, errs):
                continue
            materials.append(
                Material(
                    name=str(m["name"]),
                    relative_permittivity=_number(m, "relative_permittivity", path, errs),
                    loss_tangent=_number(m, "loss_tangent", path, errs, 0.0),
                    relative_permeability=_number(m, "relative_permeability", path, errs, 1.0),
                    pec=bool(m.get("pec", False)),
                )
            )

    primitives = []
    if not isinstance(data["primitives"], list):
        errs.append("scene.primitives: expected a list")
    else:
        for i, p in enumerate(data["primitives"]):
            path = f"primitives[{i}]"
            if not _check_keys(p, _PRIMITIVE_KEYS, {"shape", "material"}, path, errs):
                continue
            shape = str(p["shape"])
            kwargs = {}
            if "min_m" in p:
                kwargs["min_corner"] = _vec3(p["min_m"], f"{path}.min_m", errs)
            if "max_m" in p:
                kwargs["max_corner"] = _vec3(p["max_m"], f"{path}.max_m", errs)
            if "center_m" in p:
                kwargs["center"] = _vec3(p["center_m"], f"{path}.center_m", errs)
            if "radius_m" in p:
                kwargs["radius"] = _number(p, "radius_m", path, errs)
            primitives.append(Primitive(shape=shape, material=str(p["material"]), **kwargs))

    port = None
    if data.get("port") is not None:
        path = "port"
        if _check_keys(data["port"], _PORT_KEYS, {"location_m"}, path, errs):
            port = PortSpec(
                location=_vec3(data["port"]["location_m"], f"{path}.location_m", errs),
                axis=str(data["port"].get("axis", "z")),
                reference_impedance=_number(
                    data["port"], "reference_impedance_ohm", path, errs, 50.0
                ),
            )

    illumination = None
    if data.get("illumination") is not None:
        path = "illumination"
        if _check_keys(data["illumination"], _ILLUM_KEYS, {"direction", "polarization"}, path, errs):
            wf = Waveform()
            raw_wf = data["illumination"].get("waveform")
            if raw_wf is not None and _check_keys(
                raw_wf, _WAVEFORM_KEYS, set(), f"{path}.waveform", errs
            ):
                wf = Waveform(
                    kind=str(raw_wf.get("kind", "gaussian-pulse")),
                    center_hz=_number(raw_wf, "center_hz", f"{path}.waveform", errs, 4.5e9),
                    bandwidth_hz=_number(raw_wf, "bandwidth_hz", f"{path}.waveform", errs, 5.0e9),
                )
            illumination = IlluminationSpec(
                direction=_vec3(data["illumination"]["direction"], f"{path}.direction", errs),
                polarization=_vec3(
                    data["illumination"]["polarization"], f"{path}.polarization", errs
                ),
                waveform=wf,
            )

    if errs:
        raise SceneSchemaError("; ".join(errs))

    scene = Scene(
        name=str(data["name"]),
        footprint=footprint,
        substrate_thickness=thickness,
        materials=tuple(materials),
        primitives=tuple(primitives),
        port=port,
        illumination=illumination,
        description=str(data.get("description", "")),
    )
    violations = validate(scene)
    if violations:
        raise SceneValidationError(violations)
    return scene


def scene_to_dict(scene: Scene) -> dict:
    data: dict = {
        "schema": SCHEMA_VERSION,
        "name": scene.name,
        "description": scene.description,
        "footprint_m": list(scene.footprint),
        "substrate_thickness_m": scene.substrate_thickness,
        "materials": [],
        "primitives": [],
        "port": None,
        "illumination": None,
    }
    for m in scene.materials:
        entry: dict = {"name": m.name}
        if m.pec:
            entry["pec"] = True
        else:
            entry["relative_permittivity"] = m.relative_permittivity
            entry["loss_tangent"] = m.loss_tangent
            entry["relative_permeability"] = m.relative_permeability
        data["materials"].append(entry)
    for p in scene.primitives:
        entry = {"shape": p.shape, "material": p.material}
        if p.shape in ("box", "sheet"):
            entry["min_m"] = list(p.min_corner)
            entry["max_m"] = list(p.max_corner)
        else:
            entry["center_m"] = list(p.center)
            entry["radius_m"] = p.radius
        data["primitives"].append(entry)
    if scene.port is not None:
        data["port"] = {
            "location_m": list(scene.port.location),
            "axis": scene.port.axis,
            "reference_impedance_ohm": scene.port.reference_impedance,
        }
    if scene.illumination is not None:
        ill = scene.illumination
        data["illumination"] = {
            "direction": list(ill.direction),
            "polarization": list(ill.polarization),
            "waveform": {
                "kind": ill.waveform.kind,
                "center_hz": ill.waveform.center_hz,
                "bandwidth_hz": ill.waveform.bandwidth_hz,
            },
        }
    return data


def load_scene(path) -> Scene:
    """Load, schema-check, and validate a scene file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneParseError(f"{path}: {exc}") from exc
    return scene_from_dict(data, source=str(path))


def save_scene(scene: Scene, path) -> None:
    """Write a scene file (stable key order, trailing newline)."""
    Path(path).write_text(
        json.dumps(scene_to_dict(scene), indent=2) + "\n", encoding="utf-8"
    )


def bundled_scene_path(name: str) -> Path:
    """Path of a scene shipped with the package, e.g. 'reference_patch'."""
    p = Path(__file__).parent / "scenes" / f"{name}.json"
    if not p.exists():
        raise FileNotFoundError(f"no bundled scene named {name!r}")
    return p


def load_bundled_scene(name: str) -> Scene:
    return load_scene(bundled_scene_path(name))
