"""Deterministic synthetic scene pairs with a planted high-texture anomaly.

A scene is a before/after raster pair plus dual ground-truth masks.  The
"before" image is a smooth correlated background; the "after" image is a
pervasively changed copy (global gain/offset, optional disjoint gain
patches, optional per-epoch speckle) with one rectangle that additionally
receives a brightness step and/or extra zero-mean high-frequency noise.
The texture anomaly multiplies the local high-frequency variance inside
the rectangle by anomaly_texture_gain**2: independent noise with standard
deviation local_sigma * sqrt(gain^2 - 1) is added there, so gains of 0 or
1 plant nothing.

Every random draw comes from the counter-based generator in acdkit.rng,
keyed by (seed, field stream, pixel index), so generate_scene is a pure
function of its config: same config, same bytes, on any platform.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import rng
from .errors import BadConfig, IoError
from .raster import GroundTruth, Raster

BG_LEVEL = 4.0
BG_SIGMA = 1.0

# half-width of the window used for the local high-frequency std estimate
LOCAL_STD_RADIUS = 2

# erosion/dilation margin separating the inner and outer truth masks
MASK_BAND = 2

# RNG stream ids, one per random field
STREAM_BACKGROUND = 0
STREAM_SPECKLE_T0 = 1
STREAM_SPECKLE_T1 = 2
STREAM_NOISE_T0 = 3
STREAM_NOISE_T1 = 4
STREAM_ANOMALY = 5


@dataclass(frozen=True)
class SceneConfig:
    """Full description of one synthetic scene; JSON round-trippable."""

    width: int = 512
    height: int = 512
    seed: int = 0
    background_corr_len: int = 8
    pervasive_gain: float = 1.0
    pervasive_offset: float = 0.0
    anomaly_rect: tuple[int, int, int, int] = (208, 176, 80, 64)
    anomaly_texture_gain: float = 1.0
    anomaly_offset: float = 0.0
    noise_sigma: float = 0.1
    speckle: bool = False
    # extra (x, y, w, h, gain) regions of uninteresting change at t1
    pervasive_patches: tuple[tuple[int, int, int, int, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "anomaly_rect", tuple(int(v) for v in self.anomaly_rect)
        )
        object.__setattr__(
            self,
            "pervasive_patches",
            tuple(tuple(p) for p in self.pervasive_patches),
        )

    def validate(self) -> None:
        if self.width < 1 or self.height < 1:
            raise BadConfig(f"grid {self.width}x{self.height} is empty")
        if self.seed < 0:
            raise BadConfig("seed must be non-negative")
        if self.background_corr_len < 0:
            raise BadConfig("background_corr_len must be >= 0")
        if self.background_corr_len > min(self.width, self.height) - 1:
            raise BadConfig("background_corr_len too large for the grid")
        if self.pervasive_gain <= 0:
            raise BadConfig("pervasive_gain must be > 0")
        if self.anomaly_texture_gain < 0:
            raise BadConfig("anomaly_texture_gain must be >= 0")
        if self.noise_sigma < 0:
            raise BadConfig("noise_sigma must be >= 0")
        x, y, w, h = self.anomaly_rect
        if w < 2 * MASK_BAND + 1 or h < 2 * MASK_BAND + 1:
            raise BadConfig(
                f"anomaly_rect {self.anomaly_rect} too small for a non-empty inner mask"
            )
        if x < 0 or y < 0 or x + w > self.width or y + h > self.height:
            raise BadConfig(f"anomaly_rect {self.anomaly_rect} not inside the grid")
        for p in self.pervasive_patches:
            px, py, pw, ph, pgain = p
            if pw < 1 or ph < 1 or px < 0 or py < 0 or px + pw > self.width or py + ph > self.height:
                raise BadConfig(f"pervasive patch {p} not inside the grid")
            if pgain <= 0:
                raise BadConfig(f"pervasive patch gain must be > 0, got {pgain}")


def _box_mean(a: np.ndarray, radius: int) -> np.ndarray:
    """Mean over (2*radius+1)^2 mirror-padded windows, via summed-area table."""
    if radius == 0:
        return a.astype(np.float64, copy=True)
    p = np.pad(a, radius, mode="reflect")
    sat = np.zeros((p.shape[0] + 1, p.shape[1] + 1))
    sat[1:, 1:] = p
    np.cumsum(sat, axis=0, out=sat)
    np.cumsum(sat, axis=1, out=sat)
    side = 2 * radius + 1
    h, w = a.shape
    total = (
        sat[side : side + h, side : side + w]
        - sat[side : side + h, :w]
        - sat[:h, side : side + w]
        + sat[:h, :w]
    )
    return total / float(side * side)


def _field(seed: int, stream: int, h: int, w: int, kind: str) -> np.ndarray:
    n = h * w
    if kind == "normal":
        return rng.normal(seed, stream, n).reshape(h, w)
    return rng.exponential(seed, stream, n).reshape(h, w)


def _rect_slices(rect: tuple[int, int, int, int]) -> tuple[slice, slice]:
    x, y, w, h = rect
    return slice(y, y + h), slice(x, x + w)


def generate_scene(cfg: SceneConfig) -> tuple[Raster, Raster, GroundTruth]:
    """Deterministically generate (t0, t1, ground truth) from a config."""
    cfg.validate()
    h, w = cfg.height, cfg.width
    r = cfg.background_corr_len

    bg = _field(cfg.seed, STREAM_BACKGROUND, h, w, "normal")
    smooth = _box_mean(bg, r) * float(2 * r + 1)  # restore roughly unit variance
    t0_clean = BG_LEVEL + BG_SIGMA * smooth

    t1_base = cfg.pervasive_gain * t0_clean + cfg.pervasive_offset
    for px, py, pw, ph, pgain in cfg.pervasive_patches:
        t1_base[py : py + ph, px : px + pw] *= pgain
    rect = _rect_slices(cfg.anomaly_rect)
    if cfg.anomaly_offset:
        t1_base[rect] += cfg.anomaly_offset

    if cfg.speckle:
        t0 = t0_clean * _field(cfg.seed, STREAM_SPECKLE_T0, h, w, "exponential")
        t1 = t1_base * _field(cfg.seed, STREAM_SPECKLE_T1, h, w, "exponential")
    else:
        t0 = t0_clean.copy()
        t1 = t1_base.copy()

    if cfg.noise_sigma:
        t0 += cfg.noise_sigma * _field(cfg.seed, STREAM_NOISE_T0, h, w, "normal")
        t1 += cfg.noise_sigma * _field(cfg.seed, STREAM_NOISE_T1, h, w, "normal")

    amp = float(np.sqrt(max(cfg.anomaly_texture_gain**2 - 1.0, 0.0)))
    if amp > 0.0:
        hf = t1 - _box_mean(t1, LOCAL_STD_RADIUS)
        local_sigma = np.sqrt(_box_mean(hf * hf, LOCAL_STD_RADIUS))
        noise = _field(cfg.seed, STREAM_ANOMALY, h, w, "normal")
        t1[rect] += amp * local_sigma[rect] * noise[rect]

    x, y, rw, rh = cfg.anomaly_rect
    inner = np.zeros((h, w), dtype=bool)
    inner[y + MASK_BAND : y + rh - MASK_BAND, x + MASK_BAND : x + rw - MASK_BAND] = True
    outer = np.zeros((h, w), dtype=bool)
    outer[max(0, y - MASK_BAND) : min(h, y + rh + MASK_BAND),
          max(0, x - MASK_BAND) : min(w, x + rw + MASK_BAND)] = True

    return (
        Raster(t0.astype(np.float32)),
        Raster(t1.astype(np.float32)),
        GroundTruth(inner, outer),
    )


def scene_suite() -> dict[str, SceneConfig]:
    """The three fixed benchmark scenes used by the acceptance tests.

    simple-additive: a bright rectangle appears over an otherwise static
        scene (no texture change).
    textured: the rectangle keeps its mean brightness but its fine-scale
        intensity variations grow; only texture distinguishes it.
    cluttered: textured anomaly on top of a strong global gain/offset,
        speckle, and several disjoint uninteresting gain patches.
    """
    base = SceneConfig(width=512, height=512, background_corr_len=8,
                       anomaly_rect=(208, 176, 80, 64))
    return {
        "simple-additive": replace(
            base, seed=101, anomaly_offset=2.0, anomaly_texture_gain=1.0,
            noise_sigma=0.15,
        ),
        "textured": replace(
            base, seed=202, anomaly_offset=0.0, anomaly_texture_gain=2.5,
            noise_sigma=0.15,
        ),
        "cluttered": replace(
            base, seed=303, anomaly_offset=0.0, anomaly_texture_gain=3.0,
            noise_sigma=0.1, speckle=True,
            pervasive_gain=1.6, pervasive_offset=0.4,
            pervasive_patches=(
                (48, 64, 72, 56, 1.8),
                (384, 320, 64, 88, 0.55),
                (96, 392, 88, 48, 1.45),
            ),
        ),
    }


def config_to_json(cfg: SceneConfig, path: str) -> None:
    """Write a config as JSON."""
    doc = asdict(cfg)
    doc["anomaly_rect"] = list(doc["anomaly_rect"])
    doc["pervasive_patches"] = [list(p) for p in doc["pervasive_patches"]]
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def config_from_json(path: str) -> SceneConfig:
    """Read a config written by config_to_json (unknown keys rejected)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise BadConfig(f"{path}: invalid JSON: {exc}") from exc
    known = {f.name for f in SceneConfig.__dataclass_fields__.values()}
    unknown = set(doc) - known
    if unknown:
        raise BadConfig(f"{path}: unknown config fields {sorted(unknown)}")
    if "anomaly_rect" in doc:
        doc["anomaly_rect"] = tuple(doc["anomaly_rect"])
    if "pervasive_patches" in doc:
        doc["pervasive_patches"] = tuple(tuple(p) for p in doc["pervasive_patches"])
    try:
        return SceneConfig(**doc)
    except TypeError as exc:
        raise BadConfig(f"{path}: {exc}") from exc
