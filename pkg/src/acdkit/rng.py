"""Counter-based deterministic random number generation.

All randomness in acdkit flows through a tiny counter-based generator so
that output is bitwise reproducible across platforms, runs, and worker
counts.  The construction is the splitmix64 finalizer applied to an
explicit counter:

    key(seed, stream) = mix64(seed + (stream + 1) * GAMMA)
    u64(seed, stream, i) = mix64(key + (i + 1) * GAMMA)

where mix64 is the splitmix64 output function and GAMMA its Weyl
increment.  Draw i of stream s is a pure function of (seed, s, i): any
pixel's value can be generated independently of any other, in any order.

Constants (64-bit, from the splitmix64 reference implementation):

    GAMMA = 0x9E3779B97F4A7C15
    MIX1  = 0xBF58476D1CE4E5B9
    MIX2  = 0x94D049BB133111EB
"""

from __future__ import annotations

import numpy as np

GAMMA = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)

_U53 = float(1 << 53)


def _mix64(z: np.ndarray) -> np.ndarray:
    """splitmix64 output function on uint64 values (vectorized)."""
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * MIX1
        z = (z ^ (z >> np.uint64(27))) * MIX2
        return z ^ (z >> np.uint64(31))


def stream_key(seed: int, stream: int) -> np.uint64:
    """Derive the 64-bit key of sub-stream `stream` under `seed`."""
    with np.errstate(over="ignore"):
        s = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
        return _mix64(s + np.uint64(stream + 1) * GAMMA)


def raw_u64(seed: int, stream: int, counters: np.ndarray) -> np.ndarray:
    """uint64 draws at the given counters of one stream."""
    key = stream_key(seed, stream)
    with np.errstate(over="ignore"):
        c = counters.astype(np.uint64, copy=False)
        return _mix64(key + (c + np.uint64(1)) * GAMMA)


def uniform(seed: int, stream: int, n: int, start: int = 0) -> np.ndarray:
    """n doubles in [0, 1), one per counter start..start+n-1."""
    counters = np.arange(start, start + n, dtype=np.uint64)
    u = raw_u64(seed, stream, counters)
    # top 53 bits -> full-precision double in [0, 1)
    return (u >> np.uint64(11)).astype(np.float64) / _U53


def normal(seed: int, stream: int, n: int) -> np.ndarray:
    """n standard normal draws via Box-Muller; draw i uses counters 2i, 2i+1."""
    even = np.arange(0, 2 * n, 2, dtype=np.uint64)
    u1 = (raw_u64(seed, stream, even) >> np.uint64(11)).astype(np.float64) / _U53
    u2 = (raw_u64(seed, stream, even + np.uint64(1)) >> np.uint64(11)).astype(np.float64) / _U53
    # 1 - u1 is in (0, 1], so the log is finite
    r = np.sqrt(-2.0 * np.log1p(-u1))
    return r * np.cos(2.0 * np.pi * u2)


def exponential(seed: int, stream: int, n: int) -> np.ndarray:
    """n unit-mean exponential draws (inverse CDF)."""
    u = uniform(seed, stream, n)
    return -np.log1p(-u)
