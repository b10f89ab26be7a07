#!/usr/bin/env python3
"""Raster data model and the R32 on-disk format.

Walks through creating a raster, saving it as an R32 sidecar pair,
reloading it bit-for-bit, and the validation that guards co-registered
pairs and ground-truth masks.
"""

import os
import tempfile

import numpy as np

from acdkit import (
    DimensionMismatch,
    MaskInconsistent,
    GroundTruth,
    Raster,
    load_raster,
    make_pair,
    save_raster,
)

work = tempfile.mkdtemp(prefix="acdkit-demo-")
print(f"writing to {work}\n")

# A raster is just a float32 grid.  Values must be finite.
r = Raster(np.linspace(0, 1, 12, dtype=np.float32).reshape(3, 4))
print(f"raster: {r.width}x{r.height}")
print(r.data, "\n")

# Saving produces two files: a tiny JSON header and a raw float32 payload.
base = os.path.join(work, "demo")
save_raster(r, base)
for ext in (".json", ".r32"):
    size = os.path.getsize(base + ext)
    print(f"{base + ext}  ({size} bytes)")
with open(base + ".json") as fh:
    print("header:", fh.read().strip())

# The round trip is exact: same dimensions, same payload bits.
back = load_raster(base)
print("round-trip equal:", back == r)
print("payload bits equal:", back.data.tobytes() == r.data.tobytes(), "\n")

# Change detection needs two images on the same grid.
pair = make_pair(r, Raster(r.data * np.float32(2.0)))
print(f"pair grid: {pair.t0.width}x{pair.t0.height}")
try:
    make_pair(r, Raster(np.zeros((4, 4), np.float32)))
except DimensionMismatch as exc:
    print("mismatched pair rejected:", exc)

# Ground truth is a pair of masks: inner (certainly anomalous) must be a
# subset of outer (everything possibly anomalous).
inner = np.zeros((3, 4), bool)
inner[1, 1] = True
outer = inner.copy()
outer[1, 2] = True
gt = GroundTruth(inner, outer)
print("ground truth pixels: inner", int(gt.inner.sum()), "outer", int(gt.outer.sum()))
try:
    GroundTruth(outer, inner)  # reversed: inner pokes outside outer
except MaskInconsistent as exc:
    print("inconsistent masks rejected:", exc)
