"""Execution time of unprop against the application probability P.

Each probe runs ``reps`` fresh-seeded calls on one synthetic image after a warm-up,
then a least-squares line is fitted to mean time vs P.
"""

from __future__ import annotations

import time
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from matplotlib.figure import Figure

from core import __version__, config
from core.augment import unprop
from core.logging_config import logger
from core.rng import RandomStream, hash64, make_rng
from core.schemas import BenchReport, Image, ProbePoint, UnpropParams

Clock = Callable[[], float]
UnpropCall = Callable[[Image, UnpropParams, RandomStream], object]


def synthetic_image(size: int, channels: int = config.BENCH_DEFAULT_CHANNELS, seed: int = 0) -> Image:
    """Uniform-noise square test image."""
    rng = make_rng(seed)
    return Image(pixels=rng.integers(0, 256, size=(size, size, channels), dtype=np.uint8))


def linear_fit(xs: Sequence[float], ys: Sequence[float]) -> Tuple[float, float, float]:
    """Least-squares line through (xs, ys); returns (slope, intercept, r_squared)."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if len(x) < 2:
        return 0.0, float(y.mean()) if len(y) else 0.0, 1.0
    if np.ptp(y) == 0:
        return 0.0, float(y[0]), 1.0
    slope, intercept = np.polyfit(x, y, 1)
    residuals = y - (slope * x + intercept)
    ss_res = float(np.sum(residuals ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    # polyfit の残差は丸め誤差で 0 にならないので、y の大きさに対する相対許容で判定する
    atol = 1e-12 * max(1.0, float(y @ y))
    if np.isclose(ss_tot, 0.0, atol=atol):
        r_squared = 1.0 if np.isclose(ss_res, 0.0, atol=atol) else 0.0
    else:
        r_squared = 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r_squared


def _passthrough(img: Image, params: UnpropParams, rng: RandomStream) -> Image:
    return img


def _time_calls(
    call: UnpropCall,
    img: Image,
    params: UnpropParams,
    seeds: Sequence[int],
    clock: Clock,
) -> List[float]:
    times = []
    for s in seeds:
        rng = make_rng(s)
        start = clock()
        call(img, params, rng)
        times.append((clock() - start) * 1000.0)
    return times


def run_p_sweep(
    size: int = config.BENCH_DEFAULT_SIZE,
    params: Optional[UnpropParams] = None,
    probes: Sequence[float] = config.BENCH_DEFAULT_PROBES,
    reps: int = config.BENCH_DEFAULT_REPS,
    *,
    channels: int = config.BENCH_DEFAULT_CHANNELS,
    warmup: int = config.BENCH_WARMUP_REPS,
    clock: Clock = time.perf_counter,
    call: UnpropCall = unprop,
    image: Optional[Image] = None,
) -> BenchReport:
    """
    Time ``call`` at every probe P (params.apply_prob is overridden per probe).

    Every timed rep gets its own stream seeded with hash64(params.seed, rep counter),
    so partitions vary from call to call. The stream is built outside the timed region.
    """
    if reps < 1:
        raise ValueError(f"reps must be >= 1 (got {reps})")
    probes = list(probes)
    if any(not 0.0 <= p <= 1.0 for p in probes):
        raise ValueError(f"probes must lie in [0, 1]: {probes}")

    params = params or UnpropParams()
    img = image if image is not None else synthetic_image(size, channels, params.seed)
    counter = 0

    def next_seeds(n: int) -> List[int]:
        nonlocal counter
        seeds = [hash64(params.seed, counter + i) for i in range(n)]
        counter += n
        return seeds

    baseline = _time_calls(_passthrough, img, params, next_seeds(reps), clock)

    points = []
    for p in probes:
        probe_params = params.model_copy(update={"apply_prob": p})
        _time_calls(call, img, probe_params, next_seeds(warmup), clock)
        times = np.asarray(_time_calls(call, img, probe_params, next_seeds(reps), clock))
        std = float(times.std(ddof=1)) if reps > 1 else None
        points.append(ProbePoint(p=p, mean_ms=float(times.mean()), std_ms=std, reps=reps))
        logger.info("P=%.2f mean=%.4f ms std=%s ms", p, points[-1].mean_ms, "n/a" if std is None else f"{std:.4f}")

    slope, intercept, r_squared = linear_fit([pt.p for pt in points], [pt.mean_ms for pt in points])
    return BenchReport(
        tool_version=__version__,
        image_size=img.width,
        channels=img.channels,
        warmup=warmup,
        probes=points,
        slope=slope,
        intercept=intercept,
        r_squared=r_squared,
        baseline_ms=float(np.mean(baseline)),
    )


def render_svg(report: BenchReport, path: str | Path) -> Path:
    """Bar chart of mean time per P with std error bars."""
    p = Path(path)
    fig = Figure(figsize=(6.0, 2.4))
    ax = fig.add_subplot(1, 1, 1)
    xs = [pt.p for pt in report.probes]
    ys = [pt.mean_ms for pt in report.probes]
    errs = [pt.std_ms or 0.0 for pt in report.probes]
    width = 0.6 * min((b - a for a, b in zip(xs, xs[1:])), default=0.1)
    ax.bar(xs, ys, width=width, yerr=errs, capsize=2)
    ax.plot(xs, [report.slope * x + report.intercept for x in xs], linestyle="--", linewidth=1)
    ax.set_xlabel("P")
    ax.set_ylabel("Time [ms]")
    ax.set_title(f"unprop {report.image_size}x{report.image_size}, r^2={report.r_squared:.3f}")
    fig.tight_layout()
    p.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(p, format="svg")
    return p
