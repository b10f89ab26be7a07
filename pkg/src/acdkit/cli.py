"""Command-line pipeline runner.

Subcommands:
    detect   run one detector on a raster pair, write the anomaly map
    eval     score an anomaly map against ground-truth masks
    synth    generate a named or configured synthetic scene
    run      detect + eval for several detectors, with a combined plot
    convert  R32 raster <-> plain-text pixel dump

Exit codes: 0 success, 2 user/data error (the diagnostic names the
originating error class), 3 internal invariant violation.  Option
precedence is flags > config file > defaults.  ACDKIT_THREADS caps the
worker count and never changes output bytes.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import traceback

import numpy as np

from . import worker_cap
from .detectors import DETECTOR_NAMES, run_detector
from .errors import AcdError, BadConfig, FormatError, IoError, NotFound
from .evaluate import DEFAULT_FPR_MAX, auc, render_loglog_svg, roc, write_roc_csv
from .features import DEFAULT_LEVELS, DEFAULT_OFFSETS, DEFAULT_PATCH
from .hacd import AnomalyMap, save_model
from .raster import Raster, load_ground_truth, load_raster, make_pair, save_raster
from .synth import config_from_json, config_to_json, generate_scene, scene_suite

_DETECT_DEFAULTS = {
    "detector": None,
    "patch": DEFAULT_PATCH,
    "glcm_levels": DEFAULT_LEVELS,
    "glcm_offsets": [list(o) for o in DEFAULT_OFFSETS],
    "ridge": None,
    "roc_fpr_max": DEFAULT_FPR_MAX,
    "t0": None,
    "t1": None,
    "inner": None,
    "outer": None,
    "out": None,
}


def _parse_offsets(text: str) -> list[list[int]]:
    """Parse '0,1;1,0;1,-1' into offset pairs."""
    try:
        pairs = [[int(v) for v in part.split(",")] for part in text.split(";") if part]
    except ValueError as exc:
        raise BadConfig(f"bad --offsets value {text!r}: {exc}") from exc
    if not pairs or any(len(p) != 2 for p in pairs):
        raise BadConfig(f"bad --offsets value {text!r}: expected dy,dx pairs")
    return pairs


def _load_json_config(path: str, allowed: set[str]) -> dict:
    if not os.path.isfile(path):
        raise NotFound(f"config file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise BadConfig(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise BadConfig(f"{path}: config must be a JSON object")
    unknown = set(doc) - allowed
    if unknown:
        raise BadConfig(f"{path}: unknown config fields {sorted(unknown)}")
    return doc


def _merge(defaults: dict, config: dict, flags: dict) -> dict:
    merged = dict(defaults)
    merged.update(config)
    merged.update({k: v for k, v in flags.items() if v is not None})
    return merged


def _require(cfg: dict, key: str) -> object:
    if cfg.get(key) is None:
        raise BadConfig(f"required option {key!r} missing (flag or config)")
    return cfg[key]


def _offsets_tuple(value) -> tuple[tuple[int, int], ...]:
    return tuple((int(dy), int(dx)) for dy, dx in value)


def _write_map(amap: AnomalyMap, path: str) -> None:
    save_raster(Raster(amap.scores.astype(np.float32)), path)


def _load_map(path: str) -> AnomalyMap:
    r = load_raster(path)
    return AnomalyMap(r.data.astype(np.float64))


def _summary(band) -> dict:
    return {
        "pauc_inner": band.pauc_inner,
        "pauc_outer": band.pauc_outer,
        "auc_inner": auc(band.inner_curve),
        "auc_outer": auc(band.outer_curve),
        "fpr_max": band.fpr_max,
    }


def _write_json(doc: dict, path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _detect(cfg: dict, out_dir: str) -> None:
    detector = _require(cfg, "detector")
    if detector not in DETECTOR_NAMES:
        raise BadConfig(f"unknown detector {detector!r}, expected one of {DETECTOR_NAMES}")
    pair = make_pair(load_raster(str(_require(cfg, "t0"))), load_raster(str(_require(cfg, "t1"))))
    ridge = cfg["ridge"]
    amap, model = run_detector(
        detector,
        pair,
        patch=int(cfg["patch"]),
        levels=int(cfg["glcm_levels"]),
        offsets=_offsets_tuple(cfg["glcm_offsets"]),
        ridge=None if ridge is None else float(ridge),
    )
    os.makedirs(out_dir, exist_ok=True)
    _write_map(amap, os.path.join(out_dir, "anomaly"))
    if model is not None:
        save_model(model, os.path.join(out_dir, "model.json"))


def cmd_detect(args: argparse.Namespace) -> int:
    config = _load_json_config(args.config, set(_DETECT_DEFAULTS)) if args.config else {}
    flags = {
        "detector": args.detector,
        "patch": args.patch,
        "glcm_levels": args.levels,
        "glcm_offsets": _parse_offsets(args.offsets) if args.offsets else None,
        "ridge": args.ridge,
        "t0": args.t0,
        "t1": args.t1,
        "out": args.out,
    }
    cfg = _merge(_DETECT_DEFAULTS, config, flags)
    _detect(cfg, str(_require(cfg, "out")))
    return 0


def _eval_one(amap: AnomalyMap, gt, fpr_max: float, name: str, out_dir: str) -> "dict":
    band = roc(amap, gt, fpr_max=fpr_max)
    os.makedirs(out_dir, exist_ok=True)
    write_roc_csv(band, os.path.join(out_dir, "roc.csv"))
    render_loglog_svg({name: band}, os.path.join(out_dir, "roc.svg"))
    summary = _summary(band)
    summary.update(
        {
            "n_pos_inner": int(np.count_nonzero(gt.inner)),
            "n_pos_outer": int(np.count_nonzero(gt.outer)),
            "n_neg": int(np.count_nonzero(~gt.outer)),
        }
    )
    _write_json(summary, os.path.join(out_dir, "summary.json"))
    return {"band": band, "summary": summary}


def cmd_eval(args: argparse.Namespace) -> int:
    amap = _load_map(args.map)
    gt = load_ground_truth(args.inner, args.outer, (amap.width, amap.height))
    name = os.path.basename(os.path.normpath(args.map))
    for ext in (".r32", ".json"):
        if name.endswith(ext):
            name = name[: -len(ext)]
    _eval_one(amap, gt, args.fpr_max, name or "map", args.out)
    return 0


def _write_scene(cfg: SceneConfig, out_dir: str) -> None:
    t0, t1, gt = generate_scene(cfg)
    os.makedirs(out_dir, exist_ok=True)
    save_raster(t0, os.path.join(out_dir, "t0"))
    save_raster(t1, os.path.join(out_dir, "t1"))
    save_raster(Raster(gt.inner.astype(np.float32)), os.path.join(out_dir, "inner"))
    save_raster(Raster(gt.outer.astype(np.float32)), os.path.join(out_dir, "outer"))
    config_to_json(cfg, os.path.join(out_dir, "scene.json"))


def _resolve_scene_config(name_or_none: str | None, config_path: str | None) -> SceneConfig:
    if (name_or_none is None) == (config_path is None):
        raise BadConfig("give exactly one of a scene name or --config")
    if config_path is not None:
        return config_from_json(config_path)
    suite = scene_suite()
    if name_or_none not in suite:
        raise BadConfig(
            f"unknown scene {name_or_none!r}, expected one of {sorted(suite)}"
        )
    return suite[name_or_none]


def cmd_synth(args: argparse.Namespace) -> int:
    cfg = _resolve_scene_config(args.scene, args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    _write_scene(cfg, args.out)
    return 0


_RUN_KEYS = set(_DETECT_DEFAULTS) | {"detectors", "scene", "seed"}


def cmd_run(args: argparse.Namespace) -> int:
    config = _load_json_config(args.config, _RUN_KEYS)
    cfg = _merge(_DETECT_DEFAULTS, config, {"out": args.out})
    out_dir = str(_require(cfg, "out"))
    detectors = config.get("detectors")
    if not detectors or not isinstance(detectors, list):
        raise BadConfig("run config must list one or more detectors")
    for d in detectors:
        if d not in DETECTOR_NAMES:
            raise BadConfig(f"unknown detector {d!r}, expected one of {DETECTOR_NAMES}")

    scene = config.get("scene")
    if isinstance(scene, str):
        scene_cfg = _resolve_scene_config(scene, None)
        if config.get("seed") is not None:
            scene_cfg = dataclasses.replace(scene_cfg, seed=int(config["seed"]))
        scene_dir = os.path.join(out_dir, "scene")
        _write_scene(scene_cfg, scene_dir)
        paths = {k: os.path.join(scene_dir, k) for k in ("t0", "t1", "inner", "outer")}
    elif isinstance(scene, dict):
        unknown = set(scene) - {"t0", "t1", "inner", "outer"}
        if unknown:
            raise BadConfig(f"unknown scene path keys {sorted(unknown)}")
        paths = {k: scene.get(k) for k in ("t0", "t1", "inner", "outer")}
    elif scene is None:
        paths = {k: cfg.get(k) for k in ("t0", "t1", "inner", "outer")}
    else:
        raise BadConfig("scene must be a suite name or a path object")
    for key in ("t0", "t1", "inner"):
        if not paths.get(key):
            raise BadConfig(f"run config missing path {key!r}")

    pair = make_pair(load_raster(paths["t0"]), load_raster(paths["t1"]))
    gt = load_ground_truth(paths["inner"], paths.get("outer"), (pair.t0.width, pair.t0.height))
    fpr_max = float(cfg["roc_fpr_max"])

    bands = {}
    rows = []
    for name in detectors:
        det_dir = os.path.join(out_dir, name)
        os.makedirs(det_dir, exist_ok=True)
        ridge = cfg["ridge"]
        amap, model = run_detector(
            name,
            pair,
            patch=int(cfg["patch"]),
            levels=int(cfg["glcm_levels"]),
            offsets=_offsets_tuple(cfg["glcm_offsets"]),
            ridge=None if ridge is None else float(ridge),
        )
        map_base = os.path.join(det_dir, "anomaly")
        _write_map(amap, map_base)
        if model is not None:
            save_model(model, os.path.join(det_dir, "model.json"))
        # evaluate the persisted f32 map, labeled by its stem, so the
        # per-detector outputs are byte-identical to detect + eval composed
        result = _eval_one(_load_map(map_base), gt, fpr_max, "anomaly", det_dir)
        bands[name] = result["band"]
        s = result["summary"]
        rows.append((name, s["pauc_inner"], s["pauc_outer"], s["auc_inner"], s["auc_outer"]))

    render_loglog_svg(bands, os.path.join(out_dir, "roc.svg"))
    rows.sort(key=lambda r: (-r[1], r[0]))
    lines = ["detector,pauc_inner,pauc_outer,auc_inner,auc_outer"]
    lines += [f"{r[0]},{r[1]!r},{r[2]!r},{r[3]!r},{r[4]!r}" for r in rows]
    try:
        with open(os.path.join(out_dir, "league.csv"), "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write league.csv: {exc}") from exc
    return 0


def _dump_text(r: Raster, path: str) -> None:
    lines = [f"{r.width} {r.height}"]
    for row in r.data:
        lines.append(" ".join(repr(float(v)) for v in row))
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _parse_text(path: str) -> Raster:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    if not lines:
        raise FormatError(f"{path}: empty pixel dump")
    try:
        width, height = (int(v) for v in lines[0].split())
        rows = [[float(v) for v in ln.split()] for ln in lines[1:]]
    except ValueError as exc:
        raise FormatError(f"{path}: bad pixel dump: {exc}") from exc
    if len(rows) != height or any(len(row) != width for row in rows):
        raise FormatError(f"{path}: dump does not match declared {width}x{height}")
    return Raster(np.array(rows, dtype=np.float32))


def cmd_convert(args: argparse.Namespace) -> int:
    base = args.src
    for ext in (".r32", ".json"):
        if base.endswith(ext):
            base = base[: -len(ext)]
    if os.path.isfile(base + ".r32") and os.path.isfile(base + ".json"):
        _dump_text(load_raster(args.src), args.dst)
    elif os.path.isfile(args.src):
        save_raster(_parse_text(args.src), args.dst)
    else:
        raise NotFound(f"no raster or pixel dump at {args.src}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="acdkit",
        description="Anomalous change detection on co-registered single-band image pairs.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("detect", help="run one detector on a raster pair")
    d.add_argument("--config", help="JSON config; flags override its fields")
    d.add_argument("--t0", help="base-epoch raster (R32 base path)")
    d.add_argument("--t1", help="second-epoch raster")
    d.add_argument("--detector", choices=DETECTOR_NAMES)
    d.add_argument("--patch", type=int, help="odd patch side length (default 11)")
    d.add_argument("--levels", type=int, help="GLCM quantization levels (default 8)")
    d.add_argument("--offsets", help="GLCM offsets as 'dy,dx;dy,dx;...'")
    d.add_argument("--ridge", type=float, help="covariance ridge epsilon")
    d.add_argument("--out", help="output directory")
    d.set_defaults(func=cmd_detect)

    e = sub.add_parser("eval", help="evaluate an anomaly map against masks")
    e.add_argument("--map", required=True, help="anomaly map (R32 base path)")
    e.add_argument("--inner", required=True, help="inner truth mask")
    e.add_argument("--outer", help="outer truth mask (defaults to inner)")
    e.add_argument("--fpr-max", type=float, default=DEFAULT_FPR_MAX, dest="fpr_max")
    e.add_argument("--out", required=True, help="output directory")
    e.set_defaults(func=cmd_eval)

    s = sub.add_parser("synth", help="generate a synthetic benchmark scene")
    s.add_argument("scene", nargs="?", help="suite scene name")
    s.add_argument("--config", help="SceneConfig JSON instead of a name")
    s.add_argument("--seed", type=int, help="override the config seed")
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_synth)

    r = sub.add_parser("run", help="full pipeline: detect + eval per detector")
    r.add_argument("config", help="run config JSON")
    r.add_argument("--out", help="output directory (overrides config)")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("convert", help="R32 <-> plain-text pixel dump")
    c.add_argument("src")
    c.add_argument("dst")
    c.set_defaults(func=cmd_convert)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        worker_cap()  # validate ACDKIT_THREADS before doing any work
        return args.func(args)
    except AcdError as exc:
        print(f"error {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 3


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
