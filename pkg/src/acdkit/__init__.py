"""Anomalous change detection for co-registered single-band image pairs.

Detection of rare, significant changes between two images of the same
scene, ignoring pervasive scene-wide changes.  Provides a pixelwise
differencing baseline, a joint-Gaussian log density ratio detector with
patch and co-occurrence-texture feature augmentation, dual-mask ROC
evaluation, and a deterministic synthetic scene generator for benchmarks.
"""

import os

from .detectors import DETECTOR_NAMES, run_detector
from .errors import (
    AcdError,
    BadConfig,
    BadOffset,
    BadPatchSize,
    DimensionMismatch,
    EmptyClass,
    FormatError,
    GridMismatch,
    IoError,
    MaskInconsistent,
    NotFound,
    SingularCovariance,
)
from .evaluate import (
    RocBand,
    RocCurve,
    auc,
    pauc,
    render_loglog_svg,
    roc,
    write_roc_csv,
)
from .features import (
    FeatureStack,
    QuantizedRaster,
    glcm_features,
    identity_features,
    patch_features,
    quantize,
)
from .hacd import (
    AnomalyMap,
    HacdModel,
    diff_score,
    fit_hacd,
    hacd_score,
    load_model,
    save_model,
    score_map,
)
from .raster import (
    CoregisteredPair,
    GroundTruth,
    Raster,
    load_ground_truth,
    load_raster,
    make_pair,
    save_raster,
)
from .synth import SceneConfig, config_from_json, config_to_json, generate_scene, scene_suite

__version__ = "0.1.0"

THREADS_ENV_VAR = "ACDKIT_THREADS"


def worker_cap() -> int:
    """Upper bound on internal worker count, from ACDKIT_THREADS (default 1).

    All library operations are bitwise deterministic regardless of this
    value; it only caps parallelism.
    """
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None:
        return 1
    try:
        cap = int(raw)
    except ValueError:
        raise BadConfig(f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}")
    if cap < 1:
        raise BadConfig(f"{THREADS_ENV_VAR} must be >= 1, got {cap}")
    return cap
