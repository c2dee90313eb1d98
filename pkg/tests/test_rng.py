from collections import Counter

from core.rng import fisher_yates, hash64, make_rng, randbelow, random_unit, stream_for


class TestHash64:
    def test_deterministic_and_64bit(self):
        assert hash64(7, 3) == hash64(7, 3)
        assert 0 <= hash64(2**64 - 1, 10**6) < 2**64

    def test_indices_give_distinct_streams(self):
        seeds = {hash64(0, i) for i in range(1000)}
        assert len(seeds) == 1000
        assert hash64(0, 0) != hash64(1, 0)

    def test_stream_for_matches_make_rng(self):
        a = stream_for(5, 2)
        b = make_rng(hash64(5, 2))
        assert [random_unit(a) for _ in range(5)] == [random_unit(b) for _ in range(5)]


def test_randbelow_range():
    rng = make_rng(0)
    values = {randbelow(rng, 3) for _ in range(200)}
    assert values == {0, 1, 2}


class TestFisherYates:
    def test_bijection(self):
        rng = make_rng(1)
        for n in range(1, 20):
            assert sorted(fisher_yates(n, rng).mapping) == list(range(n))

    def test_single_element_draws_nothing(self):
        rng = make_rng(3)
        ref = make_rng(3)
        assert fisher_yates(1, rng).mapping == [0]
        assert random_unit(rng) == random_unit(ref)

    def test_roughly_uniform_over_permutations(self):
        rng = make_rng(42)
        counts = Counter(tuple(fisher_yates(3, rng).mapping) for _ in range(6000))
        assert len(counts) == 6
        # 期待値 1000 に対して ±15% 以内
        assert all(850 <= c <= 1150 for c in counts.values())
