import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.exceptions import InfeasiblePartitionError, InvalidOffsetError
from core.geometry import coverage_raster, validate_partition
from core.partitioner import (
    SplitDirection,
    generate_partition,
    normalized_ratio,
    refine_partition,
    sample_offset,
    satisfies_aspect,
    split_rect,
)
from core.rng import make_rng, random_unit, stream_for
from core.schemas import Partition, Rect


class TestSplitRect:
    def test_vertical_split_divides_width(self):
        a, b = split_rect(Rect.of(2, 3, 10, 4), SplitDirection.VERTICAL, 3)
        assert a == Rect.of(2, 3, 3, 4)
        assert b == Rect.of(5, 3, 7, 4)

    def test_horizontal_split_divides_height(self):
        a, b = split_rect(Rect.of(0, 0, 5, 6), SplitDirection.HORIZONTAL, 2)
        assert a == Rect.of(0, 0, 5, 2)
        assert b == Rect.of(0, 2, 5, 4)

    @pytest.mark.parametrize("offset", [0, 10, -1])
    def test_degenerate_offsets_rejected(self, offset):
        with pytest.raises(InvalidOffsetError):
            split_rect(Rect.of(0, 0, 10, 4), SplitDirection.VERTICAL, offset)


class TestSampleOffset:
    def test_extent_two_always_splits_in_half(self):
        rng = make_rng(0)
        assert {sample_offset(2, rng) for _ in range(50)} == {1}

    def test_range_and_no_midpoint_for_even_extent(self):
        rng = make_rng(1)
        offsets = [sample_offset(8, rng) for _ in range(2000)]
        assert min(offsets) >= 1 and max(offsets) <= 7
        assert 4 not in offsets

    def test_odd_extent_children_always_differ(self):
        rng = make_rng(2)
        for extent in (3, 5, 9, 101):
            for _ in range(100):
                o = sample_offset(extent, rng)
                assert o != extent - o


class TestGeneratePartition:
    @settings(max_examples=200, deadline=None)
    @given(
        w=st.integers(1, 96),
        h=st.integers(1, 96),
        n=st.integers(2, 32),
        seed=st.integers(0, 2**64 - 1),
    )
    def test_exact_count_and_tiling(self, w, h, n, seed):
        if w * h < n:
            n = w * h
        if n < 2:
            return
        p = generate_partition(w, h, n, make_rng(seed))
        assert len(p) == n
        assert all(r.w >= 1 and r.h >= 1 for r in p.rects)
        assert np.all(coverage_raster(p) == 1)

    def test_single_pixel_rects_when_n_equals_area(self):
        p = generate_partition(3, 2, 6, make_rng(0))
        assert sorted(r.as_tuple() for r in p.rects) == sorted((x, y, 1, 1) for y in range(2) for x in range(3))

    def test_one_pixel_wide_image(self):
        p = generate_partition(1, 10, 4, make_rng(5))
        assert len(p) == 4
        assert all(r.w == 1 for r in p.rects)
        assert validate_partition(p).ok

    def test_infeasible(self):
        with pytest.raises(InfeasiblePartitionError):
            generate_partition(2, 2, 5, make_rng(0))

    def test_n_below_two_rejected(self):
        with pytest.raises(ValueError):
            generate_partition(8, 8, 1, make_rng(0))

    def test_same_seed_same_partition(self):
        a = generate_partition(64, 48, 7, make_rng(9))
        b = generate_partition(64, 48, 7, make_rng(9))
        assert a == b


class TestRefinePartition:
    def test_normalized_ratio_is_orientation_free(self):
        assert normalized_ratio(2.0) == normalized_ratio(0.5) == 0.5
        assert satisfies_aspect(Rect.of(0, 0, 10, 5), 0.5)
        assert not satisfies_aspect(Rect.of(0, 0, 11, 5), 0.5)

    def test_splits_first_violator_at_long_axis_midpoint(self):
        p = Partition(image_width=100, image_height=10, rects=[Rect.of(0, 0, 10, 10), Rect.of(10, 0, 90, 10)])
        refined = refine_partition(p, 1.18, 2)
        assert [r.as_tuple() for r in refined.rects] == [
            (0, 0, 10, 10),
            (10, 0, 24, 10),
            (34, 0, 22, 10),
            (56, 0, 44, 10),
        ]

    def test_no_steps_or_no_violators_returns_input(self):
        p = Partition(image_width=20, image_height=10, rects=[Rect.of(0, 0, 10, 10), Rect.of(10, 0, 10, 10)])
        assert refine_partition(p, 1.18, 5) is p
        skinny = Partition(image_width=20, image_height=1, rects=[Rect.of(0, 0, 10, 1), Rect.of(10, 0, 10, 1)])
        assert refine_partition(skinny, 1.18, 0) is skinny

    def test_does_not_consume_random_draws(self):
        p = generate_partition(200, 20, 3, make_rng(4))
        rng = make_rng(11)
        refine_partition(p, 1.18, 7, rng)
        assert random_unit(rng) == random_unit(make_rng(11))

    def test_negative_steps_rejected(self):
        p = generate_partition(8, 8, 2, make_rng(0))
        with pytest.raises(ValueError):
            refine_partition(p, 1.18, -1)

    @settings(max_examples=150, deadline=None)
    @given(
        w=st.integers(2, 128),
        h=st.integers(2, 128),
        n=st.integers(2, 12),
        j=st.integers(0, 16),
        g=st.floats(0.1, 4.0),
        seed=st.integers(0, 2**32),
    )
    def test_count_bound_and_tiling(self, w, h, n, j, g, seed):
        n = min(n, w * h)
        p = generate_partition(w, h, n, make_rng(seed))
        refined = refine_partition(p, g, j)
        assert n <= len(refined) <= n + j
        assert validate_partition(refined).ok


@pytest.mark.slow
def test_tiling_acceptance_10k_cases():
    rng = make_rng(2024)
    failures = 0
    for t in range(10_000):
        w = 1 + int(rng.integers(0, 512))
        h = 1 + int(rng.integers(0, 512))
        n = 2 + int(rng.integers(0, 63))
        if w * h < n:
            continue
        p = generate_partition(w, h, n, stream_for(2024, t))
        if len(p) != n or not np.all(coverage_raster(p) == 1):
            failures += 1
    assert failures == 0


@pytest.mark.slow
def test_refine_acceptance_1k_cases():
    rng = make_rng(7)
    for t in range(1000):
        w = 1 + int(rng.integers(0, 512))
        h = 1 + int(rng.integers(0, 512))
        n = 2 + int(rng.integers(0, 15))
        j = int(rng.integers(0, 17))
        if w * h < n:
            continue
        p = generate_partition(w, h, n, stream_for(7, t))
        refined = refine_partition(p, 1.18, j)
        assert n <= len(refined) <= n + j
        assert validate_partition(refined).ok


class TestDocumentedExamples:
    def test_split_examples(self):
        assert split_rect(Rect.of(0, 0, 10, 7), SplitDirection.VERTICAL, 4) == (Rect.of(0, 0, 4, 7), Rect.of(4, 0, 6, 7))
        assert split_rect(Rect.of(2, 3, 5, 8), SplitDirection.HORIZONTAL, 3) == (Rect.of(2, 3, 5, 3), Rect.of(2, 6, 5, 5))
        with pytest.raises(InvalidOffsetError):
            split_rect(Rect.of(0, 0, 2, 2), SplitDirection.VERTICAL, 2)

    def test_single_row_gives_columns(self):
        p = generate_partition(4, 1, 4, make_rng(0))
        assert sorted(r.as_tuple() for r in p.rects) == [(x, 0, 1, 1) for x in range(4)]

    def test_three_by_one_splits_unequally(self):
        for seed in range(20):
            p = generate_partition(3, 1, 2, make_rng(seed))
            assert sorted(r.w for r in p.rects) == [1, 2]

    def test_512_square_is_reproducible(self):
        a = generate_partition(512, 512, 5, stream_for(1, 0))
        assert len(a) == 5 and validate_partition(a).ok
        assert a == generate_partition(512, 512, 5, stream_for(1, 0))

    def test_long_strip_is_refined(self):
        p = Partition(image_width=16, image_height=2, rects=[Rect.of(0, 0, 16, 1), Rect.of(0, 1, 16, 1)])
        refined = refine_partition(p, 1.18, 7)
        assert len(refined) <= len(p) + 7
        assert validate_partition(refined).ok
        assert refined.rects[0].w < 16
