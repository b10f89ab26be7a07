"""Per-pixel feature extraction: raw intensities, local patches, GLCM texture.

Every extractor maps a Raster (or QuantizedRaster) to a FeatureStack of
float64 vectors, one vector per pixel on the same grid.  Borders are
handled by mirror padding (reflection without repeating the edge sample),
so the output grid always equals the input grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadOffset, BadPatchSize
from .raster import Raster

DEFAULT_PATCH = 11
DEFAULT_LEVELS = 8
DEFAULT_OFFSETS = ((0, 1), (1, 0), (1, 1), (1, -1))


@dataclass(frozen=True, eq=False)
class FeatureStack:
    """Per-pixel feature vectors; ``data`` has shape (height, width, dim)."""

    data: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.data, dtype=np.float64)
        if a.ndim != 3 or a.shape[2] < 1:
            raise ValueError(f"feature data must be (h, w, dim), got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("feature stack contains non-finite values")
        a = np.ascontiguousarray(a)
        a.setflags(write=False)
        object.__setattr__(self, "data", a)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True, eq=False)
class QuantizedRaster:
    """Integer level map in [0, levels); ``data`` has shape (height, width)."""

    levels: int
    data: np.ndarray

    def __post_init__(self):
        if self.levels < 1:
            raise ValueError("levels must be >= 1")
        a = np.ascontiguousarray(np.asarray(self.data, dtype=np.int32))
        if a.ndim != 2:
            raise ValueError(f"level data must be 2-D, got {a.shape}")
        if a.size and (a.min() < 0 or a.max() >= self.levels):
            raise ValueError("level values must lie in [0, levels)")
        a.setflags(write=False)
        object.__setattr__(self, "data", a)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]


def identity_features(r: Raster) -> FeatureStack:
    """dim-1 stack holding each pixel's own intensity."""
    return FeatureStack(r.data.astype(np.float64)[:, :, np.newaxis])


def _check_patch(patch: int, height: int, width: int) -> int:
    if patch < 1 or patch % 2 == 0:
        raise BadPatchSize(f"patch side must be odd and >= 1, got {patch}")
    if patch > 2 * min(width, height) - 1:
        raise BadPatchSize(
            f"patch {patch} too large for {width}x{height} grid (mirror padding undefined)"
        )
    return (patch - 1) // 2


def patch_features(r: Raster, patch: int = DEFAULT_PATCH) -> FeatureStack:
    """Row-major flattening of the mirror-padded patch centered at each pixel."""
    pad = _check_patch(patch, r.height, r.width)
    src = r.data.astype(np.float64)
    if pad == 0:
        return FeatureStack(src[:, :, np.newaxis])
    padded = np.pad(src, pad, mode="reflect")
    windows = np.lib.stride_tricks.sliding_window_view(padded, (patch, patch))
    return FeatureStack(windows.reshape(r.height, r.width, patch * patch))


def quantize(r: Raster, levels: int = DEFAULT_LEVELS) -> QuantizedRaster:
    """Equal-probability (quantile) binning of the whole raster into ``levels``.

    Level assignment is done in rank space: a pixel's level is
    floor(levels * count_less / n), capped at levels-1, where count_less is
    the number of strictly smaller pixel values in the raster.  All equal
    values share a level, the result depends only on the rank order of the
    intensities, and requantizing a level map reproduces it.
    """
    if levels < 1:
        raise ValueError("levels must be >= 1")
    flat = r.data.ravel()
    n = flat.size
    sorted_vals = np.sort(flat)
    count_less = np.searchsorted(sorted_vals, flat, side="left").astype(np.int64)
    lev = np.minimum(levels * count_less // n, levels - 1).astype(np.int32)
    return QuantizedRaster(levels, lev.reshape(r.data.shape))


def _window_sums(indicator: np.ndarray, win_h: int, win_w: int, out_h: int, out_w: int) -> np.ndarray:
    """Sum of ``indicator`` over every win_h x win_w window whose top-left
    corner is (r, c), for r < out_h, c < out_w.  Exact integer arithmetic."""
    sat = np.zeros((indicator.shape[0] + 1, indicator.shape[1] + 1), dtype=np.int64)
    sat[1:, 1:] = indicator
    np.cumsum(sat, axis=0, out=sat)
    np.cumsum(sat, axis=1, out=sat)
    return (
        sat[win_h : win_h + out_h, win_w : win_w + out_w]
        - sat[win_h : win_h + out_h, :out_w]
        - sat[:out_h, win_w : win_w + out_w]
        + sat[:out_h, :out_w]
    )


def glcm_features(
    q: QuantizedRaster,
    patch: int = DEFAULT_PATCH,
    offsets: tuple[tuple[int, int], ...] = DEFAULT_OFFSETS,
) -> FeatureStack:
    """Per-pixel symmetric gray-level co-occurrence matrix, flattened row-major.

    For each pixel the mirror-padded level patch centered there is scanned
    once per offset (dy, dx): every ordered in-patch pair
    (level[i, j], level[i+dy, j+dx]) is counted.  Counts are symmetrized by
    adding the transpose, summed over offsets, and normalized to sum to 1,
    giving an L*L probability vector (dim = levels**2).

    Args:
        q: quantized raster with L = q.levels.
        patch: odd patch side length.
        offsets: non-empty (dy, dx) displacements, each component smaller
            than ``patch`` in magnitude.

    Raises:
        BadPatchSize: even/zero patch or patch too large for the grid.
        BadOffset: empty offset list or an offset that leaves no in-patch pairs.
    """
    pad = _check_patch(patch, q.height, q.width)
    if not offsets:
        raise BadOffset("at least one (dy, dx) offset is required")
    for dy, dx in offsets:
        if abs(dy) >= patch or abs(dx) >= patch:
            raise BadOffset(f"offset ({dy}, {dx}) does not fit in a {patch}x{patch} patch")

    lvl = q.levels
    h, w = q.height, q.width
    padded = np.pad(q.data, pad, mode="reflect") if pad else q.data

    # Ordered pair counts per pixel, accumulated code by code.  The window
    # of pair positions for the patch at (r, c) is the (patch-|dy|) x
    # (patch-|dx|) block of the shifted-code image whose top-left corner is
    # (r, c), so each code reduces to one summed-area-table pass.
    counts = np.zeros((h, w, lvl, lvl), dtype=np.int64)
    total = 0
    for dy, dx in offsets:
        r0, c0 = max(0, -dy), max(0, -dx)
        r1 = padded.shape[0] - max(0, dy)
        c1 = padded.shape[1] - max(0, dx)
        first = padded[r0:r1, c0:c1]
        second = padded[r0 + dy : r1 + dy, c0 + dx : c1 + dx]
        codes = first.astype(np.int64) * lvl + second
        win_h, win_w = patch - abs(dy), patch - abs(dx)
        total += 2 * win_h * win_w
        for code in np.unique(codes):
            hits = _window_sums(codes == code, win_h, win_w, h, w)
            counts[:, :, code // lvl, code % lvl] += hits

    sym = counts + counts.transpose(0, 1, 3, 2)
    # Every pixel sees the same pair geometry (mirror padding), so the
    # normalizer is the constant 2 * sum_offsets (patch-|dy|)(patch-|dx|).
    out = sym.reshape(h, w, lvl * lvl).astype(np.float64) / float(total)
    return FeatureStack(out)
