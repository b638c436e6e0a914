from seipcover import Rng
from seipcover.rng import mix64

from oracles import splitmix64_stream

SEED42 = [
    0xBDD732262FEB6E95, 0x28EFE333B266F103, 0x47526757130F9F52, 0x581CE1FF0E4AE394,
    0x09BC585A244823F2, 0xDE4431FA3C80DB06, 0x37E9671C45376D5D, 0xCCF635EE9E9E2FA4,
    0x5705B8770B3D7DD5, 0x9E54D738297F77AE,
]


def test_reference_stream_seed_42():
    rng = Rng(42)
    assert [rng.next_u64() for _ in range(10)] == SEED42
    assert splitmix64_stream(42, 10) == SEED42


def test_block_boundaries_match_scalar_stream():
    rng = Rng(2024)
    words = [rng.next_u64() for _ in range(3000)] + rng.take(5000)
    assert words == splitmix64_stream(2024, 8000)


def test_take_interleaves_with_next():
    a, b = Rng(3), Rng(3)
    mixed = [a.next_u64()] + a.take(2050) + [a.next_u64()]
    assert mixed == [b.next_u64() for _ in range(2052)]


def test_below_range_and_determinism():
    rng = Rng(9)
    draws = [rng.below(7) for _ in range(5000)]
    assert set(draws) == set(range(7))
    again = Rng(9)
    assert draws == [again.below(7) for _ in range(5000)]


def test_negative_and_large_seeds_wrap():
    assert Rng(-1).next_u64() == Rng((1 << 64) - 1).next_u64()
    assert Rng(1 << 64).next_u64() == Rng(0).next_u64()


def test_spawn_is_stable_and_distinct():
    base = Rng(5)
    assert base.spawn(1).seed == mix64(5 ^ mix64(1))
    assert base.spawn(1).next_u64() != base.spawn(2).next_u64()


def test_sample_and_shuffle():
    rng = Rng(4)
    s = rng.sample(range(10), 4)
    assert len(set(s)) == 4
    items = list(range(20))
    rng.shuffle(items)
    assert sorted(items) == list(range(20))
