"""Command-line front end: batch scoring, corpus generation, evaluation,
diagnostics, and config management.

Commands (see README for the full flag reference):

    mmiqa score IMAGES...      one CSV/JSON row of cues + Q per image
    mmiqa distort CLEAN OUT    six distorted variants per clean image
    mmiqa eval PRED_CSV        SRCC/PLCC with bootstrap intervals
    mmiqa diagnose MANIFEST    paired cue-direction diagnostic metrics
    mmiqa config-dump          effective config in config-file syntax

Exit codes: 0 = success, 1 = partial failure (some input files failed),
2 = usage or config error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import distort as distort_mod
from .cues import CannyParams, ExposureThresholds
from .errors import (
    BadWeights,
    DecodeError,
    EmptyInput,
    InvalidWeights,
    MissingFile,
    NoInputs,
    ParseError,
    SchemaError,
)
from .evaluate import (
    PredictionRecord,
    bootstrap_ci,
    classification_metrics,
    delta_diagnostic,
)
from .image_io import load_rgb, resize_rgb
from .score import FusionConfig, QualityBreakdown, score_image

CONFIG_ENV_VAR = "MMIQA_CONFIG"

SCORE_COLUMNS = (
    "path",
    "lap_var", "tenengrad", "edge_density", "fft_energy",
    "noise", "under_pct", "over_pct", "haze",
    "blur_pct", "lowres_pct",
    "q_blur", "q_lowres", "q_noise", "q_under", "q_over", "q_haze", "q_edge", "q_fft",
    "q_total", "elapsed_ms",
)

REPORT_COLUMNS = (
    "srcc", "plcc", "srcc_lo", "srcc_hi", "plcc_lo", "plcc_hi",
    "n", "n_bootstrap", "seed",
)

DIAGNOSE_COLUMNS = (
    "class", "n", "tp", "fp", "fn", "precision", "recall", "f1",
    "accuracy", "weighted_f1",
    "undefined_precision", "undefined_recall", "undefined_f1",
)

_IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg"}


# --- config files ---------------------------------------------------------

_FLOAT_KEYS = (
    "ref_lapvar", "ref_tenengrad", "ref_edge_blur", "ref_fft_lowres",
    "ref_noise", "ref_haze", "ref_edge_q", "ref_fft_q",
)


def load_config(path) -> FusionConfig:
    """Parse a flat key = value config file (# starts a comment).

    Unspecified keys keep their defaults; unknown keys are errors.
    """
    values: dict[str, object] = {}
    lines: dict[str, int] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            try:
                if key in _FLOAT_KEYS or key in ("canny_low", "canny_high"):
                    values[key] = float(value)
                elif key in ("t_under", "t_over", "haze_side"):
                    values[key] = int(value)
                elif key == "weights":
                    values[key] = tuple(float(v) for v in value.split(","))
                else:
                    raise ParseError(f"{path}:{lineno}: unknown key {key!r}")
            except ParseError:
                raise
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
            lines[key] = lineno
    return _build_config(values, lines, str(path))


def _build_config(values: dict, lines: dict, source: str) -> FusionConfig:
    kwargs = {k: values[k] for k in _FLOAT_KEYS if k in values}
    if "weights" in values:
        kwargs["weights"] = values["weights"]
    if "haze_side" in values:
        kwargs["haze_side"] = values["haze_side"]
    try:
        if "canny_low" in values or "canny_high" in values:
            kwargs["canny"] = CannyParams(
                t_low=values.get("canny_low", 100.0),
                t_high=values.get("canny_high", 200.0),
            )
        if "t_under" in values or "t_over" in values:
            kwargs["exposure"] = ExposureThresholds(
                t_under=values.get("t_under", 30),
                t_over=values.get("t_over", 225),
            )
        return FusionConfig(**kwargs)
    except BadWeights as exc:
        lineno = lines.get("weights", "?")
        raise InvalidWeights(f"{source}:{lineno}: {exc}") from exc
    except ValueError as exc:
        raise ParseError(f"{source}: {exc}") from exc


def config_text(cfg: FusionConfig) -> str:
    """Serialize a config in the syntax load_config reads back."""
    out = []
    for key in _FLOAT_KEYS:
        out.append(f"{key} = {getattr(cfg, key)!r}")
    out.append("weights = " + ",".join(repr(w) for w in cfg.weights))
    out.append(f"canny_low = {cfg.canny.t_low!r}")
    out.append(f"canny_high = {cfg.canny.t_high!r}")
    out.append(f"t_under = {cfg.exposure.t_under}")
    out.append(f"t_over = {cfg.exposure.t_over}")
    out.append(f"haze_side = {cfg.haze_side}")
    return "\n".join(out) + "\n"


def _effective_config(args) -> FusionConfig:
    path = getattr(args, "config", None) or os.environ.get(CONFIG_ENV_VAR)
    return load_config(path) if path else FusionConfig()


# --- batch scoring --------------------------------------------------------

def _breakdown_row(path: str, bd: QualityBreakdown, elapsed_ms: float) -> dict:
    c = bd.cues
    q = dict(zip(
        ("q_blur", "q_lowres", "q_noise", "q_under", "q_over",
         "q_haze", "q_edge", "q_fft"),
        bd.q_terms,
    ))
    row = {
        "path": path,
        "lap_var": c.lap_var,
        "tenengrad": c.tenengrad,
        "edge_density": c.edge_density,
        "fft_energy": c.fft_energy,
        "noise": c.noise,
        "under_pct": c.under_pct,
        "over_pct": c.over_pct,
        "haze": c.haze,
        "blur_pct": bd.composites.blur_pct,
        "lowres_pct": bd.composites.lowres_pct,
        **q,
        "q_total": bd.q_total,
        "elapsed_ms": elapsed_ms,
    }
    return row


def _score_path_task(task):
    path, cfg, resize = task
    start = time.perf_counter()
    try:
        img = load_rgb(path)
        if resize is not None:
            img = resize_rgb(img, resize[0], resize[1])
        bd = score_image(img, cfg)
    except (DecodeError, ValueError) as exc:
        return ("err", str(path), str(exc))
    elapsed_ms = 1000.0 * (time.perf_counter() - start)
    return ("ok", _breakdown_row(str(path), bd, elapsed_ms))


def _score_array_task(task):
    img, cfg = task
    return score_image(img, cfg)


def _pool_map(func, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [func(t) for t in tasks]
    chunksize = max(1, len(tasks) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, tasks, chunksize=chunksize))


def iter_input_files(inputs) -> list[Path]:
    """Expand files and directories into a sorted list of image paths."""
    paths: list[Path] = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            paths.extend(
                q for q in p.iterdir()
                if q.is_file() and q.suffix.lower() in _IMAGE_SUFFIXES
            )
        else:
            paths.append(p)
    return sorted(paths)


def score_paths(paths, cfg: FusionConfig, workers: int = 1, resize=None):
    """Score image files; returns (rows, errors) with rows in path order."""
    tasks = [(str(p), cfg, resize) for p in paths]
    results = _pool_map(_score_path_task, tasks, workers)
    rows, errors = [], []
    for res in results:
        if res[0] == "ok":
            rows.append(res[1])
        else:
            errors.append((res[1], res[2]))
    return rows, errors


def score_images(images, cfg: FusionConfig | None = None, workers: int = 1):
    """Score in-memory RGB arrays; returns QualityBreakdown per image."""
    cfg = cfg or FusionConfig()
    return _pool_map(_score_array_task, [(img, cfg) for img in images], workers)


# --- output helpers -------------------------------------------------------

def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _format_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_table(out_path, fmt: str, columns, rows: list[dict]) -> None:
    fh, close = _open_out(out_path)
    try:
        if fmt == "json":
            json.dump(rows, fh, indent=2)
            fh.write("\n")
        else:
            writer = csv.writer(fh)
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_format_cell(row.get(c, "")) for c in columns])
    finally:
        if close:
            fh.close()


# --- commands -------------------------------------------------------------

def cmd_score(args) -> int:
    cfg = _effective_config(args)
    paths = iter_input_files(args.inputs)
    if not paths:
        raise NoInputs("no input images found")
    resize = _parse_resize(args.resize) if args.resize else None
    rows, errors = score_paths(paths, cfg, workers=args.workers, resize=resize)
    _write_table(args.out, args.format, SCORE_COLUMNS, rows)
    for path, message in errors:
        print(f"error: {path}: {message}", file=sys.stderr)
    return 1 if errors else 0


def cmd_distort(args) -> int:
    family = distort_mod.Family(args.family) if args.family else None
    manifest = distort_mod.build_corpus(
        args.clean_dir,
        args.out_dir,
        seed=args.seed,
        strict_levels=args.strict_levels,
        family=family,
        level=args.level,
    )
    manifest_path = Path(args.out_dir) / "manifest.csv"
    print(f"wrote {len(manifest.records)} distorted images; manifest: {manifest_path}")
    return 0


def read_predictions(path) -> list[PredictionRecord]:
    """Read an id,predicted,mos CSV; schema problems name the bad line."""
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path}:1: empty file")
        header = [h.strip() for h in header]
        try:
            idx = {col: header.index(col) for col in ("id", "predicted", "mos")}
        except ValueError as exc:
            missing = str(exc).split("'")[1] if "'" in str(exc) else str(exc)
            raise SchemaError(f"{path}:1: missing column {missing!r}") from exc
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                records.append(
                    PredictionRecord(
                        id=row[idx["id"]],
                        predicted=float(row[idx["predicted"]]),
                        mos=float(row[idx["mos"]]),
                    )
                )
            except (ValueError, IndexError) as exc:
                raise SchemaError(f"{path}:{lineno}: {exc}") from exc
    return records


def cmd_eval(args) -> int:
    records = read_predictions(args.pred_csv)
    report = bootstrap_ci(
        records, n_iter=args.bootstrap, seed=args.seed, workers=args.workers
    )
    row = {
        "srcc": report.srcc,
        "plcc": report.plcc,
        "srcc_lo": report.srcc_ci95[0],
        "srcc_hi": report.srcc_ci95[1],
        "plcc_lo": report.plcc_ci95[0],
        "plcc_hi": report.plcc_ci95[1],
        "n": report.n,
        "n_bootstrap": report.n_bootstrap,
        "seed": report.seed,
    }
    if args.format == "json":
        _write_table(args.out, "json", REPORT_COLUMNS, [row])
    else:
        _write_table(args.out, "csv", REPORT_COLUMNS, [row])
    if args.out not in (None, "-"):
        print(f"srcc={report.srcc!r} plcc={report.plcc!r}")
    return 0


def _manifest_pairs(manifest: distort_mod.CorpusManifest):
    for rec in manifest.records:
        for p in (rec.clean_path, rec.distorted_path):
            if not Path(p).is_file():
                raise MissingFile(p)
        yield load_rgb(rec.clean_path), load_rgb(rec.distorted_path), rec.family


def cmd_diagnose(args) -> int:
    cfg = _effective_config(args)
    manifest = distort_mod.CorpusManifest.read_csv(args.manifest)
    if not manifest.records:
        raise EmptyInput(f"{args.manifest}: manifest has no records")
    table = delta_diagnostic(_manifest_pairs(manifest), cfg, mode=args.delta_mode)
    metrics = classification_metrics(table)
    rows = [
        {
            "class": r.name, "n": r.n, "tp": r.tp, "fp": r.fp, "fn": r.fn,
            "precision": r.precision, "recall": r.recall, "f1": r.f1,
        }
        for r in metrics.per_class
    ]
    rows.append(
        {
            "class": "macro", "n": metrics.n,
            "precision": metrics.macro_precision,
            "recall": metrics.macro_recall,
            "f1": metrics.macro_f1,
            "accuracy": metrics.accuracy,
            "weighted_f1": metrics.weighted_f1,
            "undefined_precision": metrics.undefined_precision,
            "undefined_recall": metrics.undefined_recall,
            "undefined_f1": metrics.undefined_f1,
        }
    )
    _write_table(args.out, args.format, DIAGNOSE_COLUMNS, rows)
    if args.out not in (None, "-"):
        print(f"accuracy={metrics.accuracy!r} macro_f1={metrics.macro_f1!r}")
    return 0


def cmd_config_dump(args) -> int:
    cfg = _effective_config(args)
    fh, close = _open_out(args.out)
    try:
        fh.write(config_text(cfg))
    finally:
        if close:
            fh.close()
    return 0


# --- argument parsing -----------------------------------------------------

def _parse_resize(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError as exc:
        raise ParseError(f"--resize expects WxH, got {text!r}") from exc


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _nonnegative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmiqa",
        description="No-reference image quality scoring from interpretable cues.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="score images and emit one row per image")
    p.add_argument("inputs", nargs="+", help="image files and/or directories")
    p.add_argument("--config", help=f"config file (or ${CONFIG_ENV_VAR})")
    p.add_argument("--out", default="-", help="output path, - for stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--resize", help="resize input to WxH before scoring")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("distort", help="generate six distorted variants per image")
    p.add_argument("clean_dir")
    p.add_argument("out_dir")
    p.add_argument("--seed", type=_nonnegative_int, default=0)
    p.add_argument("--strict-levels", type=_parse_bool, default=True,
                   help="restrict levels to the standard sets (default true)")
    p.add_argument("--family", choices=[f.value for f in distort_mod.Family],
                   help="apply one family at a fixed level instead of all six")
    p.add_argument("--level", type=float, help="level for --family")
    p.set_defaults(func=cmd_distort)

    p = sub.add_parser("eval", help="correlation report from an id,predicted,mos CSV")
    p.add_argument("pred_csv")
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--bootstrap", type=_positive_int, default=100)
    p.add_argument("--seed", type=_nonnegative_int, default=0)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("diagnose", help="paired cue-direction diagnostic")
    p.add_argument("manifest", help="manifest.csv from the distort command")
    p.add_argument("--config", help=f"config file (or ${CONFIG_ENV_VAR})")
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--delta-mode", choices=("literal", "argmax"), default="literal")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("config-dump", help="print the effective config")
    p.add_argument("--config", help=f"config file (or ${CONFIG_ENV_VAR})")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_config_dump)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
