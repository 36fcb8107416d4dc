"""Scene description and its JSON file format.

A scene bundles everything needed to synthesize or interpret a
measurement: the two array layouts, the reflecting walls, the receive
point used for power transfer, the frequency bands, the carrier, the
transmit power, and optional additive-noise settings. Files are UTF-8
JSON with a ``schema_version`` field; loading validates field by field
and reports the path of the offending entry.
"""

from __future__ import annotations

from dataclasses import dataclass

import json

import numpy as np

from .channel import C0, FrequencyGrid
from .geometry import ArrayLayout, WallSegment, as_point, ula_layout, ura_layout

SCHEMA_VERSION = 1


class SceneFormatError(ValueError):
    """Scene file violates the schema; the message names the field path."""


@dataclass(frozen=True)
class UlaSpec:
    """Descriptor of a uniform linear array."""

    n: int
    spacing: float
    center: tuple
    axis: tuple
    label: str = "ula"

    def build(self) -> ArrayLayout:
        return ula_layout(self.n, self.spacing, self.center, self.axis,
                          label=self.label)


@dataclass(frozen=True)
class UraSpec:
    """Descriptor of a uniform rectangular array."""

    rows: int
    cols: int
    spacing: float
    center: tuple
    normal: tuple
    label: str = "ura"

    def build(self) -> ArrayLayout:
        return ura_layout(self.rows, self.cols, self.spacing, self.center,
                          self.normal, label=self.label)


@dataclass(frozen=True)
class NoiseSpec:
    snr_db: float
    seed: int = 0


@dataclass(frozen=True)
class Scene:
    """Complete measurement configuration.

    ``tx_array`` is the wall-mounted linear array (the imaging receiver);
    ``rx_array`` is the horizontal array whose elements double as receive
    probes. ``ue`` is the power-transfer target, by convention the center
    of gravity of the rx array.
    """

    tx_array: UlaSpec | UraSpec
    rx_array: UlaSpec | UraSpec
    walls: tuple
    ue: np.ndarray
    bands: tuple
    f_c: float
    pt: float = 1.0
    noise: NoiseSpec | None = None

    def __post_init__(self):
        object.__setattr__(self, "ue", as_point(self.ue))
        object.__setattr__(self, "walls", tuple(self.walls))
        bands = tuple(tuple(b) for b in self.bands)
        if not bands:
            raise ValueError("at least one frequency band is required")
        object.__setattr__(self, "bands", bands)
        if not any(lo <= self.f_c <= hi for lo, hi, _ in bands):
            raise ValueError("f_c must lie within one of the bands")
        if not self.pt > 0:
            raise ValueError("transmit power must be positive")

    def tx_layout(self) -> ArrayLayout:
        return self.tx_array.build()

    def rx_layout(self) -> ArrayLayout:
        return self.rx_array.build()

    def grid(self) -> FrequencyGrid:
        return FrequencyGrid.from_bands(self.bands)


def _vec(x) -> tuple:
    return tuple(float(v) for v in np.asarray(x, dtype=float))


def _array_to_json(spec) -> dict:
    if isinstance(spec, UlaSpec):
        return {"kind": "ula", "n": spec.n, "spacing_m": spec.spacing,
                "center_m": list(spec.center), "axis": list(spec.axis),
                "label": spec.label}
    if isinstance(spec, UraSpec):
        return {"kind": "ura", "rows": spec.rows, "cols": spec.cols,
                "spacing_m": spec.spacing, "center_m": list(spec.center),
                "normal": list(spec.normal), "label": spec.label}
    raise TypeError(f"unsupported array spec {type(spec)!r}")


def _get(obj: dict, key: str, path: str, kind=None):
    if not isinstance(obj, dict):
        raise SceneFormatError(f"{path}: expected an object")
    if key not in obj:
        raise SceneFormatError(f"{path}.{key}: missing field")
    val = obj[key]
    if kind is not None and not isinstance(val, kind):
        raise SceneFormatError(f"{path}.{key}: wrong type {type(val).__name__}")
    return val


def _get_vec3(obj: dict, key: str, path: str) -> tuple:
    v = _get(obj, key, path, list)
    if len(v) != 3 or not all(isinstance(x, (int, float)) for x in v):
        raise SceneFormatError(f"{path}.{key}: expected three numbers")
    return tuple(float(x) for x in v)


def _array_from_json(obj, path: str):
    kind = _get(obj, "kind", path, str)
    if kind == "ula":
        return UlaSpec(n=int(_get(obj, "n", path, int)),
                       spacing=float(_get(obj, "spacing_m", path, (int, float))),
                       center=_get_vec3(obj, "center_m", path),
                       axis=_get_vec3(obj, "axis", path),
                       label=str(obj.get("label", "ula")))
    if kind == "ura":
        return UraSpec(rows=int(_get(obj, "rows", path, int)),
                       cols=int(_get(obj, "cols", path, int)),
                       spacing=float(_get(obj, "spacing_m", path, (int, float))),
                       center=_get_vec3(obj, "center_m", path),
                       normal=_get_vec3(obj, "normal", path),
                       label=str(obj.get("label", "ura")))
    raise SceneFormatError(f"{path}.kind: unknown array kind {kind!r}")


def wall_to_json(w: WallSegment) -> dict:
    return {"a_m": [float(v) for v in w.a], "b_m": [float(v) for v in w.b],
            "height_m": None if w.height_m is None else float(w.height_m),
            "reflection_coeff": [w.reflection_coeff.real, w.reflection_coeff.imag]}


def wall_from_json(obj, path: str) -> WallSegment:
    a = _get_vec3(obj, "a_m", path)
    b = _get_vec3(obj, "b_m", path)
    h = obj.get("height_m")
    if h is not None and not isinstance(h, (int, float)):
        raise SceneFormatError(f"{path}.height_m: expected a number or null")
    g = obj.get("reflection_coeff", [1.0, 0.0])
    if (not isinstance(g, list) or len(g) != 2
            or not all(isinstance(x, (int, float)) for x in g)):
        raise SceneFormatError(f"{path}.reflection_coeff: expected [re, im]")
    try:
        return WallSegment(a=a, b=b, height_m=None if h is None else float(h),
                           reflection_coeff=complex(g[0], g[1]))
    except ValueError as exc:
        raise SceneFormatError(f"{path}: {exc}") from exc


def scene_to_json(scene: Scene) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "tx_array": _array_to_json(scene.tx_array),
        "rx_array": _array_to_json(scene.rx_array),
        "walls": [wall_to_json(w) for w in scene.walls],
        "ue_m": [float(v) for v in scene.ue],
        "bands": [[float(lo), float(hi), int(n)] for lo, hi, n in scene.bands],
        "f_c_hz": float(scene.f_c),
        "pt_w": float(scene.pt),
        "noise": None if scene.noise is None else
                 {"snr_db": float(scene.noise.snr_db), "seed": int(scene.noise.seed)},
    }
    return doc


def scene_from_json(doc) -> Scene:
    path = "scene"
    version = _get(doc, "schema_version", path, int)
    if version != SCHEMA_VERSION:
        raise SceneFormatError(f"{path}.schema_version: unsupported {version}")
    walls_doc = _get(doc, "walls", path, list)
    walls = [wall_from_json(w, f"{path}.walls[{i}]")
             for i, w in enumerate(walls_doc)]
    bands_doc = _get(doc, "bands", path, list)
    bands = []
    for i, b in enumerate(bands_doc):
        if not isinstance(b, list) or len(b) != 3:
            raise SceneFormatError(f"{path}.bands[{i}]: expected [lo, hi, count]")
        bands.append((float(b[0]), float(b[1]), int(b[2])))
    noise_doc = doc.get("noise")
    noise = None
    if noise_doc is not None:
        noise = NoiseSpec(snr_db=float(_get(noise_doc, "snr_db", f"{path}.noise",
                                            (int, float))),
                          seed=int(noise_doc.get("seed", 0)))
    try:
        return Scene(
            tx_array=_array_from_json(_get(doc, "tx_array", path), f"{path}.tx_array"),
            rx_array=_array_from_json(_get(doc, "rx_array", path), f"{path}.rx_array"),
            walls=tuple(walls),
            ue=_get_vec3(doc, "ue_m", path),
            bands=tuple(bands),
            f_c=float(_get(doc, "f_c_hz", path, (int, float))),
            pt=float(_get(doc, "pt_w", path, (int, float))),
            noise=noise,
        )
    except ValueError as exc:
        raise SceneFormatError(f"{path}: {exc}") from exc


def save_scene(scene: Scene, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(scene_to_json(scene), f, indent=2, sort_keys=True)
        f.write("\n")


def load_scene(path) -> Scene:
    with open(path, "r", encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise SceneFormatError(f"scene: invalid JSON ({exc})") from exc
    return scene_from_json(doc)


def paper_scene() -> Scene:
    """Measurement-scale default: 51-element half-wave ULA, 13x13
    quarter-wave URA, 1000 frequencies over 3-10 GHz, two metal walls."""
    f_c = 3.79e9
    lam = C0 / f_c
    ula = UlaSpec(n=51, spacing=lam / 2, center=(0.0, 0.0, 1.4),
                  axis=(1.0, 0.0, 0.0), label="ula")
    ura = UraSpec(rows=13, cols=13, spacing=lam / 4, center=(0.0, 2.0, 1.3),
                  normal=(0.0, 0.0, 1.0), label="ura")
    walls = (
        WallSegment(a=(-1.5, 0.6, 0.0), b=(-1.5, 3.2, 0.0), height_m=2.0),
        WallSegment(a=(1.5, 0.6, 0.0), b=(1.5, 3.2, 0.0), height_m=2.0),
    )
    return Scene(tx_array=ula, rx_array=ura, walls=walls, ue=(0.0, 2.0, 1.3),
                 bands=((3e9, 10e9, 1000),), f_c=f_c, pt=1.0)


def desk_scene() -> Scene:
    """Reduced default sized for quick end-to-end runs."""
    f_c = 3.79e9
    lam = C0 / f_c
    ula = UlaSpec(n=25, spacing=lam / 2, center=(0.0, 0.0, 1.0),
                  axis=(1.0, 0.0, 0.0), label="ula")
    ura = UraSpec(rows=7, cols=7, spacing=lam / 4, center=(0.0, 1.6, 0.9),
                  normal=(0.0, 0.0, 1.0), label="ura")
    walls = (
        WallSegment(a=(-1.2, 0.4, 0.0), b=(-1.2, 2.6, 0.0), height_m=2.0),
        WallSegment(a=(1.2, 0.4, 0.0), b=(1.2, 2.6, 0.0), height_m=2.0),
    )
    return Scene(tx_array=ula, rx_array=ura, walls=walls, ue=(0.0, 1.6, 0.9),
                 bands=((3e9, 10e9, 200),), f_c=f_c, pt=1.0)
