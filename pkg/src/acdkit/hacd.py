"""Joint-Gaussian anomalous change scoring and the image-differencing baseline.

The detector models the per-pixel feature pair (x, y) of the two epochs as
jointly Gaussian and scores a pixel by the negative log ratio of the joint
density to the product of the marginals.  With C the fitted joint
covariance (x block first) and z the mean-centered stacked vector, the
score is

    score(x, y) = 0.5 * z' Q z + k
    Q = inv(C) - blockdiag(inv(C_xx), inv(C_yy))
    k = 0.5 * (logdet C - logdet C_xx - logdet C_yy)

which is the exact value of the log density ratio, normalization constants
included, so scores are directly comparable against density oracles and
across detectors.  Independent x and y give Q = 0, k = 0, score = 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, GridMismatch, IoError, SingularCovariance
from .features import FeatureStack
from .raster import CoregisteredPair

# Covariance accumulation and scoring walk the image in fixed 256-row tiles,
# combined in ascending order, so results are independent of worker count.
TILE_ROWS = 256

DEFAULT_RIDGE_SCALE = 1e-6


@dataclass(frozen=True, eq=False)
class AnomalyMap:
    """Per-pixel anomalousness, higher = more anomalous; shape (height, width)."""

    scores: np.ndarray

    def __post_init__(self):
        a = np.ascontiguousarray(np.asarray(self.scores, dtype=np.float64))
        if a.ndim != 2:
            raise ValueError(f"scores must be 2-D, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("anomaly map contains non-finite scores")
        a.setflags(write=False)
        object.__setattr__(self, "scores", a)

    @property
    def width(self) -> int:
        return self.scores.shape[1]

    @property
    def height(self) -> int:
        return self.scores.shape[0]


def _cholesky(c: np.ndarray, what: str):
    try:
        return scipy.linalg.cho_factor(c, lower=True)
    except np.linalg.LinAlgError as exc:
        lo = float(np.linalg.eigvalsh(c).min())
        raise SingularCovariance(
            f"{what} is not positive definite (smallest eigenvalue {lo:.6g}); "
            "increase the ridge"
        ) from exc


@dataclass(frozen=True, eq=False)
class HacdModel:
    """Fitted joint-Gaussian parameters plus precomputed scoring terms.

    ``cov`` is the ridge-regularized joint covariance actually used for
    scoring; ``ridge`` records the epsilon that was added to its diagonal
    at fit time.  The marginal blocks are its top-left d_x x d_x and
    bottom-right d_y x d_y submatrices.
    """

    mean_x: np.ndarray
    mean_y: np.ndarray
    cov: np.ndarray
    ridge: float = 0.0
    quad: np.ndarray = field(init=False, repr=False)
    log_det_const: float = field(init=False, repr=False)

    def __post_init__(self):
        mx = np.ascontiguousarray(np.asarray(self.mean_x, dtype=np.float64).ravel())
        my = np.ascontiguousarray(np.asarray(self.mean_y, dtype=np.float64).ravel())
        c = np.asarray(self.cov, dtype=np.float64)
        d = mx.size + my.size
        if mx.size < 1 or my.size < 1:
            raise DimensionMismatch("feature dimensions must each be >= 1")
        if c.shape != (d, d):
            raise DimensionMismatch(f"covariance shape {c.shape} does not match d={d}")
        scale = float(np.abs(c).max()) or 1.0
        if float(np.abs(c - c.T).max()) > 1e-10 * scale:
            raise SingularCovariance("covariance is not symmetric within 1e-10 relative")
        c = np.ascontiguousarray((c + c.T) / 2.0)

        dx = mx.size
        cho = _cholesky(c, "joint covariance")
        cho_xx = _cholesky(c[:dx, :dx], "x-marginal covariance")
        cho_yy = _cholesky(c[dx:, dx:], "y-marginal covariance")
        quad = scipy.linalg.cho_solve(cho, np.eye(d))
        quad[:dx, :dx] -= scipy.linalg.cho_solve(cho_xx, np.eye(dx))
        quad[dx:, dx:] -= scipy.linalg.cho_solve(cho_yy, np.eye(d - dx))
        logdet = 2.0 * np.sum(np.log(np.diag(cho[0])))
        logdet_xx = 2.0 * np.sum(np.log(np.diag(cho_xx[0])))
        logdet_yy = 2.0 * np.sum(np.log(np.diag(cho_yy[0])))

        for name, val in (("mean_x", mx), ("mean_y", my), ("cov", c), ("quad", quad)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)
        object.__setattr__(self, "log_det_const", 0.5 * float(logdet - logdet_xx - logdet_yy))

    @property
    def d_x(self) -> int:
        return self.mean_x.size

    @property
    def d_y(self) -> int:
        return self.mean_y.size

    @property
    def cov_xx(self) -> np.ndarray:
        return self.cov[: self.d_x, : self.d_x]

    @property
    def cov_yy(self) -> np.ndarray:
        return self.cov[self.d_x :, self.d_x :]

    @property
    def cov_xy(self) -> np.ndarray:
        return self.cov[: self.d_x, self.d_x :]

    @classmethod
    def from_covariance(
        cls, mean_x: np.ndarray, mean_y: np.ndarray, cov: np.ndarray, ridge: float = 0.0
    ) -> "HacdModel":
        """Build a model from explicit Gaussian parameters, adding ridge*I."""
        c = np.asarray(cov, dtype=np.float64)
        if ridge:
            c = c + ridge * np.eye(c.shape[0])
        return cls(mean_x, mean_y, c, ridge=float(ridge))


def _check_grids(x: FeatureStack, y: FeatureStack) -> None:
    if (x.height, x.width) != (y.height, y.width):
        raise GridMismatch(
            f"x grid {x.width}x{x.height} != y grid {y.width}x{y.height}"
        )


def _tiles(height: int):
    for r0 in range(0, height, TILE_ROWS):
        yield r0, min(r0 + TILE_ROWS, height)


def fit_hacd(
    x: FeatureStack,
    y: FeatureStack,
    ridge: float | None = None,
    fit_mask: np.ndarray | None = None,
) -> HacdModel:
    """Fit the joint Gaussian over all pixels of the scene (in-sample).

    Mean and covariance are the sample mean and population covariance
    (denominator N) of the stacked per-pixel vectors [x; y].  ``ridge`` is
    the epsilon added to the covariance diagonal before inversion; None
    selects the default 1e-6 * trace(C) / (d_x + d_y).  ``fit_mask``
    optionally restricts the fit to a boolean pixel subset (scoring still
    covers every pixel).

    Raises GridMismatch when the stacks disagree and SingularCovariance
    when the regularized covariance cannot be factorized (e.g. fewer
    pixels than d_x + d_y with ridge 0).
    """
    _check_grids(x, y)
    dx, dy = x.dim, y.dim
    d = dx + dy
    if fit_mask is not None:
        fit_mask = np.asarray(fit_mask, dtype=bool)
        if fit_mask.shape != (x.height, x.width):
            raise GridMismatch(
                f"fit mask shape {fit_mask.shape} does not match grid "
                f"{x.height}x{x.width}"
            )

    def tile_vectors(r0: int, r1: int) -> np.ndarray:
        xs = x.data[r0:r1].reshape(-1, dx)
        ys = y.data[r0:r1].reshape(-1, dy)
        if fit_mask is not None:
            keep = fit_mask[r0:r1].ravel()
            xs, ys = xs[keep], ys[keep]
        return np.concatenate([xs, ys], axis=1)

    # Two passes over fixed tiles: means first, then centered products.
    n = 0
    total = np.zeros(d)
    for r0, r1 in _tiles(x.height):
        z = tile_vectors(r0, r1)
        n += z.shape[0]
        total += z.sum(axis=0)
    if n == 0:
        raise SingularCovariance("fit mask selects no pixels")
    mean = total / n

    scatter = np.zeros((d, d))
    for r0, r1 in _tiles(x.height):
        z = tile_vectors(r0, r1) - mean
        scatter += z.T @ z
    cov = scatter / n

    eps = DEFAULT_RIDGE_SCALE * float(np.trace(cov)) / d if ridge is None else float(ridge)
    return HacdModel.from_covariance(mean[:dx], mean[dx:], cov, ridge=eps)


def hacd_score(m: HacdModel, x: np.ndarray, y: np.ndarray) -> float:
    """Score one (x, y) feature pair; the exact log density ratio value."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.size != m.d_x or y.size != m.d_y:
        raise DimensionMismatch(
            f"input dims ({x.size}, {y.size}) do not match model ({m.d_x}, {m.d_y})"
        )
    z = np.concatenate([x - m.mean_x, y - m.mean_y])
    return 0.5 * float(z @ m.quad @ z) + m.log_det_const


def score_map(m: HacdModel, x: FeatureStack, y: FeatureStack) -> AnomalyMap:
    """Apply hacd_score at every pixel of a co-registered stack pair."""
    _check_grids(x, y)
    if x.dim != m.d_x or y.dim != m.d_y:
        raise DimensionMismatch(
            f"stack dims ({x.dim}, {y.dim}) do not match model ({m.d_x}, {m.d_y})"
        )
    out = np.empty((x.height, x.width))
    for r0, r1 in _tiles(x.height):
        xs = x.data[r0:r1].reshape(-1, x.dim) - m.mean_x
        ys = y.data[r0:r1].reshape(-1, y.dim) - m.mean_y
        z = np.concatenate([xs, ys], axis=1)
        s = 0.5 * np.einsum("nd,nd->n", z @ m.quad, z) + m.log_det_const
        out[r0:r1] = s.reshape(r1 - r0, x.width)
    return AnomalyMap(out)


def diff_score(pair: CoregisteredPair) -> AnomalyMap:
    """Absolute pixelwise difference |t1 - t0|; the baseline detector."""
    d = np.abs(pair.t1.data.astype(np.float64) - pair.t0.data.astype(np.float64))
    return AnomalyMap(d)


def save_model(m: HacdModel, path: str) -> None:
    """Serialize a model to JSON (dims, means, covariance row-major, ridge)."""
    doc = {
        "d_x": m.d_x,
        "d_y": m.d_y,
        "mean_x": m.mean_x.tolist(),
        "mean_y": m.mean_y.tolist(),
        "cov": m.cov.ravel().tolist(),
        "ridge": m.ridge,
    }
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, separators=(",", ":"))
            fh.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write model {path}: {exc}") from exc


def load_model(path: str) -> HacdModel:
    """Load a model saved by save_model; the stored covariance is used as is."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read model {path}: {exc}") from exc
    d = int(doc["d_x"]) + int(doc["d_y"])
    cov = np.array(doc["cov"], dtype=np.float64).reshape(d, d)
    return HacdModel(
        np.array(doc["mean_x"]), np.array(doc["mean_y"]), cov, ridge=float(doc["ridge"])
    )
