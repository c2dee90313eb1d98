from typing import Optional

from core import config
from core.augment import inconsistency_rate, plan_unprop
from core.geometry import validate_partition
from core.logging_config import logger
from core.partitioner import generate_partition, refine_partition
from core.rng import RandomStream, randbelow, stream_for
from core.schemas import UnpropParams, VerifySummary


def random_case_size(rng: RandomStream, n: int, max_side: int) -> tuple[int, int]:
    """w, h を [1, max_side] から選ぶ。w*h >= n になるよう h を底上げする。"""
    w = 1 + randbelow(rng, max_side)
    h = 1 + randbelow(rng, max_side)
    return w, max(h, -(-n // w))


def run_verification(
    trials: int,
    params: UnpropParams,
    seed: Optional[int] = None,
    max_side: int = config.VERIFY_MAX_SIDE,
    min_inconsistent_fraction: float = config.VERIFY_MIN_INCONSISTENT_FRACTION,
) -> VerifySummary:
    """
    分割の不変条件と不整合性のモンテカルロを trials 回ずつ実行します。

    - generate_partition: 矩形数がちょうど N、タイル張り
    - refine_partition: 矩形数が [N, N+J]、タイル張り
    - P=1 の記録のうち幾何的に不整合なものの割合
    """
    if trials < 1:
        raise ValueError(f"trials は1以上である必要があります: {trials}")
    seed = params.seed if seed is None else seed
    n, j = params.target_rects, params.refine_steps

    tiling_failures = 0
    count_failures = 0
    first_failure = None
    applied = 0

    for t in range(trials):
        rng = stream_for(seed, t)
        w, h = random_case_size(rng, n, max_side)

        generated = generate_partition(w, h, n, rng)
        refined = refine_partition(generated, params.aspect_ratio, j, rng)

        for label, p, lo, hi in (("generate", generated, n, n), ("refine", refined, n, n + j)):
            report = validate_partition(p)
            if not report.ok:
                tiling_failures += 1
                first_failure = first_failure or f"trial {t} {label} {w}x{h}: {report.message}"
            if not lo <= len(p) <= hi:
                count_failures += 1
                first_failure = first_failure or f"trial {t} {label} {w}x{h}: {len(p)} rects (expected {lo}..{hi})"

        applied += plan_unprop(w, h, params, stream_for(seed ^ 0x5EED, t)).applied

    summary = VerifySummary(
        trials=trials,
        tiling_failures=tiling_failures,
        count_failures=count_failures,
        first_failure=first_failure,
        inconsistent_fraction=inconsistency_rate(trials, params, seed),
        applied_fraction=applied / trials,
        min_inconsistent_fraction=min_inconsistent_fraction,
    )
    logger.debug("verify: %s", summary.model_dump())
    return summary
