import math
from dataclasses import fields

import numpy as np
import pytest

from acsync.channel import (
    NOISE_FREE,
    ChannelConfig,
    ChannelError,
    apply_channel,
    awgn,
    build_stream,
    fir,
)
from acsync.modem import ModemConfig, Scheme
from acsync.sync import gen_training


def _stream(seed: int):
    config = ModemConfig(Scheme.ACO, 256, 32, 4)
    rng = np.random.default_rng(seed)
    training = gen_training(rng, config)
    return training, build_stream(config, training, rng)


def test_stream_layout():
    training, layout = _stream(0)
    assert len(layout) == 864
    assert layout.true_start == 320
    np.testing.assert_array_equal(
        layout.samples[layout.true_start : layout.true_start + 256], training.body
    )
    assert layout.samples.min() >= 0


def test_flanking_frames_follow_the_seed():
    _, a = _stream(1)
    _, b = _stream(2)
    _, c = _stream(1)
    assert not np.array_equal(a.samples[:288], b.samples[:288])
    np.testing.assert_array_equal(a.samples, c.samples)


def test_awgn_noise_free_is_identity():
    x = np.arange(8.0)
    out = awgn(x, NOISE_FREE, np.random.default_rng(0))
    np.testing.assert_array_equal(out, x)
    assert out is not x


@pytest.mark.parametrize("snr_db", [0.0, 10.0])
def test_awgn_variance_matches_snr(snr_db):
    out = awgn(np.zeros(1_000_000), snr_db, np.random.default_rng(1))
    expected = 10 ** (-snr_db / 10)
    assert 0.99 * expected <= np.var(out) <= 1.01 * expected


def test_awgn_reproducible():
    a = awgn(np.ones(100), 5.0, np.random.default_rng(3))
    b = awgn(np.ones(100), 5.0, np.random.default_rng(3))
    np.testing.assert_array_equal(a, b)


def test_fir_hand_examples():
    x = np.array([0.3, -1.0, 2.0])
    np.testing.assert_array_equal(fir(x, [1]), x)
    np.testing.assert_allclose(fir([2, 4], [0.5]), [1, 2])
    np.testing.assert_allclose(fir([1, 0, 0], [1, 0.5]), [1, 0.5, 0])


def test_fir_is_linear():
    rng = np.random.default_rng(4)
    x, y = rng.normal(size=50), rng.normal(size=50)
    taps = [1.0, -0.3, 0.2]
    np.testing.assert_allclose(
        fir(2 * x + 3 * y, taps), 2 * fir(x, taps) + 3 * fir(y, taps), atol=1e-12
    )


def test_fir_rejects_bad_taps():
    with pytest.raises(ChannelError, match="at least one tap"):
        fir([1, 2], [])
    with pytest.raises(ChannelError, match="First FIR tap"):
        ChannelConfig(taps=(0.0, 1.0))


def test_channel_config():
    assert ChannelConfig().noise_variance == 0.0
    assert ChannelConfig(snr_db=10).noise_variance == pytest.approx(0.1)
    with pytest.raises(ChannelError):
        ChannelConfig(snr_db=math.nan)
    with pytest.raises(ChannelError):
        ChannelConfig(snr_db=-math.inf)
    assert ChannelConfig(taps=[1, 0.5]).taps == (1.0, 0.5)


def test_channel_config_holds_no_randomness():
    assert [f.name for f in fields(ChannelConfig)] == ["snr_db", "taps"]
    x = np.ones(32)
    channel = ChannelConfig(snr_db=10)
    first = apply_channel(x, channel, np.random.default_rng(3))
    np.testing.assert_array_equal(first, apply_channel(x, channel, np.random.default_rng(3)))
    assert not np.array_equal(first, apply_channel(x, channel, np.random.default_rng(4)))


def test_apply_channel_filters_then_adds_noise():
    x = np.array([1.0, 0.0, 0.0, 0.0])
    clean = apply_channel(x, ChannelConfig(taps=(1.0, 0.5)), np.random.default_rng(0))
    np.testing.assert_allclose(clean, [1, 0.5, 0, 0])
    noisy = apply_channel(
        x, ChannelConfig(snr_db=20, taps=(1.0, 0.5)), np.random.default_rng(5)
    )
    expected = clean + np.random.default_rng(5).normal(0, 0.1, size=4)
    np.testing.assert_allclose(noisy, expected)
