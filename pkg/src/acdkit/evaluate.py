"""Dual-mask ROC curves, partial AUC, CSV export, and log-log SVG plots.

A detector is evaluated against both ground-truth masks at once.  The
outer curve treats every outer-mask pixel as positive; the inner curve
treats only inner-mask pixels as positive and drops the ambiguous
outer-minus-inner band entirely.  Negatives are the complement of the
outer mask for both curves, so the two curves bracket the ROC curve of
the unknown exact truth.
"""

from __future__ import annotations

from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .errors import EmptyClass, GridMismatch, IoError
from .hacd import AnomalyMap
from .raster import GroundTruth

DEFAULT_FPR_MAX = 0.01
DEFAULT_FPR_FLOOR = 1e-5

# cap on polyline vertices per curve when rendering
_SVG_MAX_POINTS = 4096

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


@dataclass(frozen=True, eq=False)
class RocCurve:
    """Operating points sorted by descending threshold.

    ``thresholds[0]`` is +inf (nothing detected, fpr = tpr = 0); each later
    threshold is a distinct score value and detection means score >=
    threshold, so all equally-scored pixels change class together.  The
    final point is always (1, 1).
    """

    thresholds: np.ndarray
    fpr: np.ndarray
    tpr: np.ndarray

    def __post_init__(self):
        t = np.ascontiguousarray(np.asarray(self.thresholds, dtype=np.float64))
        f = np.ascontiguousarray(np.asarray(self.fpr, dtype=np.float64))
        p = np.ascontiguousarray(np.asarray(self.tpr, dtype=np.float64))
        if not (t.shape == f.shape == p.shape) or t.ndim != 1 or t.size < 2:
            raise ValueError("thresholds/fpr/tpr must be 1-D, equal length >= 2")
        if np.any(np.diff(f) < 0) or np.any(np.diff(p) < 0):
            raise ValueError("fpr and tpr must be non-decreasing")
        for a in (t, f, p):
            a.setflags(write=False)
        object.__setattr__(self, "thresholds", t)
        object.__setattr__(self, "fpr", f)
        object.__setattr__(self, "tpr", p)

    @property
    def points(self) -> list[tuple[float, float, float]]:
        return list(zip(self.thresholds.tolist(), self.fpr.tolist(), self.tpr.tolist()))


@dataclass(frozen=True, eq=False)
class RocBand:
    """Inner- and outer-truth curves of one anomaly map, with partial AUCs."""

    inner_curve: RocCurve
    outer_curve: RocCurve
    pauc_inner: float
    pauc_outer: float
    fpr_max: float


def _curve(
    sorted_scores: np.ndarray,
    group_ends: np.ndarray,
    positive: np.ndarray,
    negative: np.ndarray,
    label: str,
) -> RocCurve:
    n_pos = int(np.count_nonzero(positive))
    n_neg = int(np.count_nonzero(negative))
    if n_pos == 0:
        raise EmptyClass(f"{label} curve has no positive pixels")
    if n_neg == 0:
        raise EmptyClass(f"{label} curve has no negative pixels")
    cum_pos = np.cumsum(positive)[group_ends]
    cum_neg = np.cumsum(negative)[group_ends]
    thresholds = np.concatenate([[np.inf], sorted_scores[group_ends]])
    fpr = np.concatenate([[0.0], cum_neg / n_neg])
    tpr = np.concatenate([[0.0], cum_pos / n_pos])
    return RocCurve(thresholds, fpr, tpr)


def roc(amap: AnomalyMap, gt: GroundTruth, fpr_max: float = DEFAULT_FPR_MAX) -> RocBand:
    """Compute the dual-mask ROC band of an anomaly map.

    Thresholds are the distinct score values of the map (shared by both
    curves).  Raises GridMismatch when map and masks disagree and
    EmptyClass when a curve would have no positives or no negatives.
    """
    if amap.scores.shape != gt.shape:
        raise GridMismatch(
            f"anomaly map {amap.scores.shape} does not match masks {gt.shape}"
        )
    scores = amap.scores.ravel()
    inner = gt.inner.ravel()
    outer = gt.outer.ravel()

    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    # last index of each tie group of equal scores
    group_ends = np.nonzero(np.append(s[1:] != s[:-1], True))[0]

    # Negatives are the complement of the OUTER mask for both curves; the
    # ambiguous outer-minus-inner ring is therefore in neither class of the
    # inner curve (not inner-positive, not a negative).
    negatives = ~outer[order]
    inner_curve = _curve(s, group_ends, inner[order], negatives, "inner")
    outer_curve = _curve(s, group_ends, outer[order], negatives, "outer")
    return RocBand(
        inner_curve,
        outer_curve,
        pauc(inner_curve, fpr_max),
        pauc(outer_curve, fpr_max),
        float(fpr_max),
    )


def pauc(curve: RocCurve, fpr_max: float = DEFAULT_FPR_MAX) -> float:
    """Trapezoidal area under the curve on fpr in [0, fpr_max].

    The polyline is linearly interpolated at the right edge, so a perfect
    detector scores exactly fpr_max.
    """
    if not 0.0 < fpr_max <= 1.0:
        raise ValueError(f"fpr_max must be in (0, 1], got {fpr_max}")
    f, t = curve.fpr, curve.tpr
    idx = int(np.searchsorted(f, fpr_max, side="right"))
    ff, tt = f[:idx], t[:idx]
    if idx < f.size and (ff.size == 0 or ff[-1] < fpr_max):
        w = (fpr_max - f[idx - 1]) / (f[idx] - f[idx - 1])
        ff = np.append(ff, fpr_max)
        tt = np.append(tt, t[idx - 1] + w * (t[idx] - t[idx - 1]))
    return float(np.trapezoid(tt, ff))


def auc(curve: RocCurve) -> float:
    """Full trapezoidal area under the curve."""
    return pauc(curve, 1.0)


def write_roc_csv(band: RocBand, path: str) -> None:
    """Write both curves, aligned on their shared threshold grid.

    Columns: threshold,fpr_inner,tpr_inner,fpr_outer,tpr_outer.  Floats
    use shortest round-trip decimals, so parsing the file re-yields the
    band's points exactly.
    """
    ic, oc = band.inner_curve, band.outer_curve
    lines = ["threshold,fpr_inner,tpr_inner,fpr_outer,tpr_outer"]
    for i in range(ic.thresholds.size):
        lines.append(
            ",".join(
                repr(v)
                for v in (ic.thresholds[i].item(), ic.fpr[i].item(), ic.tpr[i].item(),
                          oc.fpr[i].item(), oc.tpr[i].item())
            )
        )
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _decimate(n: int) -> np.ndarray:
    stride = max(1, -(-n // _SVG_MAX_POINTS))
    idx = np.arange(0, n, stride)
    if idx[-1] != n - 1:
        idx = np.append(idx, n - 1)
    return idx


def _polyline_points(
    curve: RocCurve, floor: float, to_px
) -> str:
    lf = np.log10(np.maximum(curve.fpr, floor))
    lt = np.log10(np.maximum(curve.tpr, floor))
    idx = _decimate(lf.size)
    return " ".join(f"{to_px(lf[i], lt[i])[0]:.2f},{to_px(lf[i], lt[i])[1]:.2f}" for i in idx)


def render_loglog_svg(bands, path: str, fpr_floor: float = DEFAULT_FPR_FLOOR) -> None:
    """Render named ROC bands as a standalone log-log SVG plot.

    ``bands`` is a mapping or sequence of (name, RocBand); each band draws
    two polylines (inner solid, outer dashed) in one color.  Rates below
    ``fpr_floor`` are clipped to the floor so zero never reaches log10.
    Output bytes are a pure function of the inputs.
    """
    items = list(bands.items()) if hasattr(bands, "items") else list(bands)
    if not items:
        raise ValueError("at least one band is required")

    width, height = 720, 540
    ml, mr, mt, mb = 80, 24, 24, 56
    pw, ph = width - ml - mr, height - mt - mb
    lmin = np.log10(fpr_floor)

    def to_px(lx: float, ly: float) -> tuple[float, float]:
        return (ml + (lx - lmin) / (0.0 - lmin) * pw,
                mt + ph - (ly - lmin) / (0.0 - lmin) * ph)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    # decade grid and tick labels
    exps = range(int(round(lmin)), 1)
    for e in exps:
        x, _ = to_px(float(e), 0.0)
        _, y = to_px(0.0, float(e))
        parts.append(
            f'<line x1="{x:.2f}" y1="{mt}" x2="{x:.2f}" y2="{mt + ph}" '
            'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<line x1="{ml}" y1="{y:.2f}" x2="{ml + pw}" y2="{y:.2f}" '
            'stroke="#dddddd" stroke-width="1"/>'
        )
        label = "1" if e == 0 else f"1e{e}"
        parts.append(
            f'<text x="{x:.2f}" y="{mt + ph + 18}" font-size="12" '
            f'text-anchor="middle" font-family="sans-serif">{label}</text>'
        )
        parts.append(
            f'<text x="{ml - 8}" y="{y + 4:.2f}" font-size="12" '
            f'text-anchor="end" font-family="sans-serif">{label}</text>'
        )
    # axes
    parts.append(
        f'<line x1="{ml}" y1="{mt + ph}" x2="{ml + pw}" y2="{mt + ph}" '
        'stroke="black" stroke-width="1.5"/>'
    )
    parts.append(
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ph}" '
        'stroke="black" stroke-width="1.5"/>'
    )
    parts.append(
        f'<text x="{ml + pw / 2:.2f}" y="{height - 14}" font-size="13" '
        'text-anchor="middle" font-family="sans-serif">false positive rate</text>'
    )
    parts.append(
        f'<text x="18" y="{mt + ph / 2:.2f}" font-size="13" text-anchor="middle" '
        f'font-family="sans-serif" transform="rotate(-90 18 {mt + ph / 2:.2f})">'
        "true positive rate</text>"
    )

    for i, (name, band) in enumerate(items):
        color = _PALETTE[i % len(_PALETTE)]
        inner_pts = _polyline_points(band.inner_curve, fpr_floor, to_px)
        outer_pts = _polyline_points(band.outer_curve, fpr_floor, to_px)
        parts.append(
            f'<polyline points="{inner_pts}" fill="none" stroke="{color}" '
            'stroke-width="1.8"/>'
        )
        parts.append(
            f'<polyline points="{outer_pts}" fill="none" stroke="{color}" '
            'stroke-width="1.8" stroke-dasharray="6 4"/>'
        )
        ly = mt + 16 + 18 * i
        parts.append(
            f'<line x1="{ml + 12}" y1="{ly}" x2="{ml + 44}" y2="{ly}" '
            f'stroke="{color}" stroke-width="3"/>'
        )
        parts.append(
            f'<text x="{ml + 50}" y="{ly + 4}" font-size="12" '
            f'font-family="sans-serif">{escape(str(name))}</text>'
        )
    parts.append("</svg>")
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(parts) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
