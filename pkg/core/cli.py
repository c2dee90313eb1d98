"""unprop コマンドラインツール

Exit codes: 0 成功 / 1 検証失敗 / 2 使い方の誤り / 3 I/O・デコードエラー
"""

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from pydantic import ValidationError

from core import __version__, config
from core.augment import shuffle_grid_cells, unprop
from core.bench import render_svg, run_p_sweep
from core.exceptions import (
    ImageFormatError,
    ImageIOError,
    InfeasiblePartitionError,
    ManifestError,
    UnpropError,
)
from core.imgio import ImageFileFormat, load_image, save_image
from core.logging_config import logger, set_verbose
from core.manifest import export_schemas, pixel_digest, read_manifest, replay_manifest, write_manifest
from core.rng import hash64, make_rng
from core.schemas import GridSpec, ManifestEntry, RunManifest, UnpropParams
from core.verify import run_verification
from core.viz import draw_border_overlay, side_by_side

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3


# ------------------------------------------------------------
# Helpers
# ------------------------------------------------------------

def resolve_seed(seed: Optional[int]) -> int:
    """--seed > UNPROP_SEED > 既定値 の順で決める。"""
    if seed is not None:
        return seed
    env = config.env_seed()
    return env if env is not None else config.DEFAULT_SEED


def resolve_params(
    seed: Optional[int] = None,
    prob: Optional[float] = None,
    rects: Optional[int] = None,
    aspect: Optional[float] = None,
    refine_steps: Optional[int] = None,
    preset: Optional[str] = None,
) -> UnpropParams:
    """プリセット（任意）にフラグを上書きして UnpropParams を作る。"""
    overrides = {
        "apply_prob": prob,
        "target_rects": rects,
        "aspect_ratio": aspect,
        "refine_steps": refine_steps,
        "seed": resolve_seed(seed),
    }
    if preset:
        return UnpropParams.from_preset(preset, **overrides)
    return UnpropParams(**{k: v for k, v in overrides.items() if v is not None})


def expand_inputs(inputs: Sequence[str]) -> List[Path]:
    """ディレクトリは直下の画像ファイル（名前順）に展開する。"""
    files: List[Path] = []
    for raw in inputs:
        p = Path(raw)
        if p.is_dir():
            files.extend(sorted(f for f in p.iterdir() if f.suffix.lower() in config.INPUT_SUFFIXES))
        else:
            files.append(p)
    return files


def _output_stems(files: Sequence[Path]) -> List[str]:
    # 同名ファイル（a.png と a.ppm など）は index を付けて衝突を避ける
    stems = [f.stem for f in files]
    return [s if stems.count(s) == 1 else f"{s}_{i}" for i, s in enumerate(stems)]


def _output_format(path: Path, fmt: Optional[ImageFileFormat]) -> ImageFileFormat:
    if fmt is not None:
        return fmt
    try:
        return ImageFileFormat.from_path(path)
    except ValueError:
        return ImageFileFormat.PNG


def _augment_file(
    index: int,
    path: Path,
    out_dir: Path,
    stem: str,
    params: UnpropParams,
    fmt: Optional[ImageFileFormat],
    grid: Optional[GridSpec],
) -> ManifestEntry:
    stream_seed = hash64(params.seed, index)
    rng = make_rng(stream_seed)
    img = load_image(path)

    if grid is not None:
        out, partition, permutation = shuffle_grid_cells(img, grid.rows, grid.cols, rng)
        applied = True
    else:
        out, record = unprop(img, params, rng)
        applied, partition, permutation = record.applied, record.partition, record.permutation

    out_fmt = _output_format(path, fmt)
    target = out_dir / f"{stem}{out_fmt.suffix_for(out.channels)}"
    save_image(out, target, out_fmt)
    logger.info("[%d] %s -> %s (applied=%s)", index, path, target, applied)

    return ManifestEntry(
        index=index,
        input_path=str(path),
        output_path=str(target),
        stream_seed=stream_seed,
        applied=applied,
        image_width=img.width,
        image_height=img.height,
        rects=list(partition.rects) if applied else None,
        permutation=list(permutation.mapping) if applied else None,
        output_sha256=pixel_digest(out),
    )


# ------------------------------------------------------------
# Commands
# ------------------------------------------------------------

def cmd_apply(
    inputs: Sequence[str],
    out_dir,
    params: UnpropParams,
    manifest_path=None,
    fmt: Optional[ImageFileFormat] = None,
    skip_errors: bool = config.SKIP_ERRORS,
    workers: int = config.MAX_WORKERS,
    grid: Optional[GridSpec] = None,
    command: str = "apply",
) -> int:
    """
    画像ごとに (seed, index) から導いた乱数列で拡張を適用し、out_dir に書き出します。

    出力とマニフェストのエントリは完了順ではなく入力順に並ぶ。
    """
    files = expand_inputs(inputs)
    if not files:
        logger.error("入力画像がありません: %s", list(inputs))
        return EXIT_USAGE
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        logger.error("出力ディレクトリを作成できません: %s: %s", out, e)
        return EXIT_IO

    stems = _output_stems(files)

    def process(item: Tuple[int, Path]) -> ManifestEntry:
        index, path = item
        try:
            return _augment_file(index, path, out, stems[index], params, fmt, grid)
        except (UnpropError, OSError) as e:
            if not skip_errors:
                raise
            logger.exception("[%d] %s をスキップします", index, path)
            return ManifestEntry(
                index=index,
                input_path=str(path),
                stream_seed=hash64(params.seed, index),
                error=str(e),
            )

    status = EXIT_OK
    entries: List[ManifestEntry] = []
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        try:
            entries = list(pool.map(process, enumerate(files)))
        except (ImageIOError, ImageFormatError, OSError) as e:
            logger.error("処理を中断しました: %s", e)
            status = EXIT_IO
        except (InfeasiblePartitionError, ValueError) as e:
            logger.error("処理を中断しました: %s", e)
            status = EXIT_USAGE

    if manifest_path is not None and status == EXIT_OK:
        manifest = RunManifest(
            tool_version=__version__,
            command=command,
            mode="grid" if grid else "unprop",
            params=params,
            grid=grid,
            entries=entries,
        )
        write_manifest(manifest, manifest_path)
        logger.info("マニフェストを書き出しました: %s", manifest_path)

    failed = sum(1 for e in entries if e.error)
    if status == EXIT_OK:
        print(f"{len(entries) - failed}/{len(files)} images written to {out}")
    return status


def cmd_viz(
    input_path,
    params: UnpropParams,
    out,
    grid: Optional[GridSpec] = None,
    manifest_path=None,
    color: Sequence[int] = config.VIZ_BORDER_COLOR,
    command: str = "viz",
) -> int:
    """元画像と、枠線を重ねた拡張後の画像を左右に並べて保存します（P は 1 に固定）。"""
    params = params.model_copy(update={"apply_prob": 1.0})
    img = load_image(input_path)
    stream_seed = hash64(params.seed, 0)
    rng = make_rng(stream_seed)

    try:
        if grid is not None:
            augmented, partition, permutation = shuffle_grid_cells(img, grid.rows, grid.cols, rng)
        else:
            augmented, record = unprop(img, params, rng)
            partition, permutation = record.partition, record.permutation
    except InfeasiblePartitionError as e:
        logger.error("画像 %dx%d は最小矩形数 N=%d を下回ります: %s", img.width, img.height, params.target_rects, e)
        return EXIT_USAGE

    overlay = draw_border_overlay(augmented, partition, color)
    save_image(side_by_side(img, overlay), out)

    if manifest_path is not None:
        entry = ManifestEntry(
            index=0,
            input_path=str(input_path),
            output_path=str(out),
            stream_seed=stream_seed,
            applied=True,
            image_width=img.width,
            image_height=img.height,
            rects=list(partition.rects),
            permutation=list(permutation.mapping),
            output_sha256=pixel_digest(augmented),
        )
        write_manifest(
            RunManifest(
                tool_version=__version__,
                command=command,
                mode="grid" if grid else "unprop",
                params=params,
                grid=grid,
                entries=[entry],
            ),
            manifest_path,
        )
    print(f"{len(partition)} rects -> {out}")
    return EXIT_OK


def cmd_bench(
    size: int = config.BENCH_DEFAULT_SIZE,
    probes: Sequence[float] = config.BENCH_DEFAULT_PROBES,
    reps: int = config.BENCH_DEFAULT_REPS,
    out=None,
    svg=None,
    params: Optional[UnpropParams] = None,
    warmup: int = config.BENCH_WARMUP_REPS,
) -> int:
    """run_p_sweep を実行し、JSON（と任意で SVG）を書き出します。"""
    if reps < 1:
        logger.error("--reps は1以上である必要があります: %d", reps)
        return EXIT_USAGE
    if size < 1:
        logger.error("--size は1以上である必要があります: %d", size)
        return EXIT_USAGE
    if reps == 1:
        logger.warning("reps=1 では標準偏差が定義できないため null として出力します")
    elif reps < config.BENCH_MIN_REPS:
        logger.warning("reps=%d は推奨値 %d 未満です", reps, config.BENCH_MIN_REPS)

    report = run_p_sweep(size, params, probes, reps, warmup=warmup)

    if out is not None:
        p = Path(out)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(report.model_dump_json(indent=2), encoding="utf-8")
    if svg is not None:
        render_svg(report, svg)

    print(f"{'P':>5} {'mean [ms]':>12} {'std [ms]':>12}")
    for pt in report.probes:
        std = "null" if pt.std_ms is None else f"{pt.std_ms:.4f}"
        print(f"{pt.p:5.2f} {pt.mean_ms:12.4f} {std:>12}")
    print(f"slope={report.slope:.4f} ms/P intercept={report.intercept:.4f} ms r^2={report.r_squared:.4f}")
    print(f"baseline (no unprop call) = {report.baseline_ms:.6f} ms")
    return EXIT_OK


def cmd_verify(trials: int, params: UnpropParams, seed: Optional[int] = None) -> int:
    """分割の不変条件と不整合性のモンテカルロを実行し、結果を表示します。"""
    if trials < 1:
        logger.error("--trials は1以上である必要があります: %d", trials)
        return EXIT_USAGE

    summary = run_verification(trials, params, seed)
    valid = summary.trials - summary.tiling_failures
    print(f"partitions : {summary.trials} trials, tiling failures={summary.tiling_failures}, "
          f"count failures={summary.count_failures}")
    print(f"tiling-valid : {100.0 * max(valid, 0) / summary.trials:.1f}%")
    print(f"inconsistent : {summary.inconsistent_fraction:.4f} (required > {summary.min_inconsistent_fraction})")
    print(f"applied      : {summary.applied_fraction:.4f} (P={params.apply_prob})")
    if summary.first_failure:
        print(f"first failure: {summary.first_failure}")
    print("PASS" if summary.passed else "FAIL")
    return EXIT_OK if summary.passed else EXIT_VERIFY_FAILED


def cmd_replay(manifest_path, out_dir=None) -> int:
    """マニフェストを再生し、記録された出力と一致しなければ 1 を返します。"""
    manifest = read_manifest(manifest_path)
    results = replay_manifest(manifest, out_dir)
    mismatched = [r.index for r in results if r.matches is False]
    print(f"replayed {len(results)} entries, mismatches: {mismatched or 'none'}")
    return EXIT_VERIFY_FAILED if mismatched else EXIT_OK


def cmd_schema(out_dir) -> int:
    for p in export_schemas(out_dir):
        print(p)
    return EXIT_OK


# ------------------------------------------------------------
# Argument parsing
# ------------------------------------------------------------

def _int_auto(value: str) -> int:
    return int(value, 0)


def _probe_list(value: str) -> List[float]:
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"カンマ区切りの数値が必要です: {value!r}")


def _params_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--seed", type=_int_auto, default=None, help="global seed (fallback: $UNPROP_SEED)")
    parent.add_argument("--prob", type=float, default=None, help="application probability P (default 0.1)")
    parent.add_argument("--rects", type=int, default=None, help="target number of rectangles N (default 5)")
    parent.add_argument("--aspect", type=float, default=None, help="aspect ratio G (default 1.18)")
    parent.add_argument("--refine-steps", type=int, default=None, help="refinement steps J (default 7)")
    parent.add_argument("--preset", choices=sorted(config.PRESETS), default=None)
    parent.add_argument("-v", "--verbose", action="store_true")
    return parent


def _grid_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--baseline", choices=["unprop", "grid"], default="unprop")
    p.add_argument("--rows", type=int, default=3)
    p.add_argument("--cols", type=int, default=3)


def _grid_from(args) -> Optional[GridSpec]:
    return GridSpec(rows=args.rows, cols=args.cols) if args.baseline == "grid" else None


def _params_from(args) -> UnpropParams:
    return resolve_params(args.seed, args.prob, args.rects, args.aspect, args.refine_steps, args.preset)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="unprop", description="Unproportional mosaicing augmentation")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    parent = _params_parent()

    p_apply = sub.add_parser("apply", parents=[parent], help="augment images / directories")
    p_apply.add_argument("inputs", nargs="+")
    p_apply.add_argument("-o", "--out-dir", default="out")
    p_apply.add_argument("--format", choices=[f.value for f in ImageFileFormat], default=None)
    p_apply.add_argument("--manifest", default=None)
    p_apply.add_argument("--skip-errors", action="store_true", default=config.SKIP_ERRORS)
    p_apply.add_argument("--workers", type=int, default=config.MAX_WORKERS)
    _grid_args(p_apply)
    p_apply.set_defaults(handler=lambda a: cmd_apply(
        a.inputs, a.out_dir, _params_from(a),
        manifest_path=a.manifest,
        fmt=ImageFileFormat(a.format) if a.format else None,
        skip_errors=a.skip_errors,
        workers=a.workers,
        grid=_grid_from(a),
        command=" ".join(["apply", *a.raw_argv]),
    ))

    p_viz = sub.add_parser("viz", parents=[parent], help="draw the partition next to the original")
    p_viz.add_argument("input")
    p_viz.add_argument("-o", "--out", required=True)
    p_viz.add_argument("--manifest", default=None)
    _grid_args(p_viz)
    p_viz.set_defaults(handler=lambda a: cmd_viz(
        a.input, _params_from(a), a.out,
        grid=_grid_from(a),
        manifest_path=a.manifest,
        command=" ".join(["viz", *a.raw_argv]),
    ))

    p_bench = sub.add_parser("bench", parents=[parent], help="execution time vs P")
    p_bench.add_argument("--size", type=int, default=config.BENCH_DEFAULT_SIZE)
    p_bench.add_argument("--probes", type=_probe_list, default=list(config.BENCH_DEFAULT_PROBES))
    p_bench.add_argument("--reps", type=int, default=config.BENCH_DEFAULT_REPS)
    p_bench.add_argument("--warmup", type=int, default=config.BENCH_WARMUP_REPS)
    p_bench.add_argument("-o", "--out", default=None, help="JSON report path")
    p_bench.add_argument("--svg", default=None, help="optional SVG chart path")
    p_bench.set_defaults(handler=lambda a: cmd_bench(
        a.size, a.probes, a.reps, a.out, a.svg, _params_from(a), warmup=a.warmup,
    ))

    p_verify = sub.add_parser("verify", parents=[parent], help="partition invariants + inconsistency check")
    p_verify.add_argument("--trials", type=int, default=config.VERIFY_DEFAULT_TRIALS)
    p_verify.set_defaults(handler=lambda a: cmd_verify(a.trials, _params_from(a)))

    p_replay = sub.add_parser("replay", help="re-apply a run manifest and compare outputs")
    p_replay.add_argument("manifest")
    p_replay.add_argument("-o", "--out-dir", default=None)
    p_replay.add_argument("-v", "--verbose", action="store_true")
    p_replay.set_defaults(handler=lambda a: cmd_replay(a.manifest, a.out_dir))

    p_schema = sub.add_parser("schema", help="export JSON schemas for manifests and bench reports")
    p_schema.add_argument("-o", "--out-dir", default="schemas")
    p_schema.add_argument("-v", "--verbose", action="store_true")
    p_schema.set_defaults(handler=lambda a: cmd_schema(a.out_dir))

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        if e.code is None:
            return EXIT_OK
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    args.raw_argv = argv[1:]
    set_verbose(args.verbose)

    try:
        return args.handler(args)
    except (ValidationError, ValueError, InfeasiblePartitionError) as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except (ImageIOError, ImageFormatError, ManifestError, OSError) as e:
        logger.error("%s", e)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
