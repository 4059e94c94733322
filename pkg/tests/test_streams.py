import numpy as np
import pytest

from swapsim.streams import (
    SHARD_ROUNDS,
    StreamCursor,
    default_seed,
    derive_seed,
    shard_spans,
    substream,
)


def test_same_key_same_numbers():
    assert np.array_equal(substream(1, "x").random(10), substream(1, "x").random(10))


def test_names_runs_and_shards_differ():
    base = substream(1, "x").random(5)
    for other in (substream(1, "y"), substream(1, "x", run=1), substream(1, "x", shard=1), substream(2, "x")):
        assert not np.array_equal(base, other.random(5))


def test_cursor_scalar_and_batch_agree():
    n = SHARD_ROUNDS + 100
    batch = StreamCursor(3, "lambdaAR").take(n)
    c = StreamCursor(3, "lambdaAR")
    head = np.array([c.next() for _ in range(50)])
    rest = c.take(n - 50)
    np.testing.assert_array_equal(np.concatenate([head, rest]), batch)


def test_cursor_start_offset():
    full = StreamCursor(3, "bobU").take(SHARD_ROUNDS + 10)
    part = StreamCursor(3, "bobU", start=SHARD_ROUNDS - 5).take(15)
    np.testing.assert_array_equal(part, full[SHARD_ROUNDS - 5 :])


def test_shard_spans():
    spans = list(shard_spans(2 * SHARD_ROUNDS + 3))
    assert spans == [(0, SHARD_ROUNDS), (SHARD_ROUNDS, SHARD_ROUNDS), (2 * SHARD_ROUNDS, 3)]


def test_seed_range():
    with pytest.raises(ValueError):
        substream(-1, "x")
    with pytest.raises(ValueError):
        substream(2**64, "x")


def test_env_seed(monkeypatch):
    monkeypatch.setenv("SWAPSIM_SEED", "99")
    assert default_seed() == 99


def test_derive_seed_deterministic():
    assert derive_seed(5, 1, 2) == derive_seed(5, 1, 2) != derive_seed(5, 2, 1)
