"""
LSB baseline channel
"""

import numpy as np
import pytest

from ganash.baselines import (
    LsbConfig,
    lsb_capacity,
    lsb_decode,
    lsb_embed_text,
    lsb_encode,
    lsb_extract_text,
    lsb_max_deviation,
    max_payload,
)
from ganash.codec import BitMessage
from ganash.errors import CapacityError, DecodeError, ValidationError
from ganash.metrics import psnr
from ganash.utils.images import ImageBuffer
from ganash.utils.samples import synthetic_cover


def flat_image(value, height=1, width=1):
    return ImageBuffer(np.full((height, width, 3), value, dtype=np.uint8))


class TestLsbConfig:
    def test_planes(self):
        with pytest.raises(ValidationError):
            LsbConfig(planes=3)

    def test_fixed_traversal(self):
        with pytest.raises(ValidationError):
            LsbConfig(channel_order="BGR")


class TestCapacity:
    def test_reference_size(self):
        assert lsb_capacity(360, 360) == 388800
        assert lsb_capacity(360, 360, LsbConfig(2)) == 777600

    def test_payload_conventions(self):
        assert max_payload() == 3.0
        assert max_payload(per_channel=True) == 1.0
        assert max_payload(LsbConfig(2)) == 6.0

    def test_overflow(self, cover):
        with pytest.raises(CapacityError) as info:
            lsb_encode(cover, np.ones(lsb_capacity(16, 16) + 1, dtype=np.uint8))
        assert info.value.available == 768


class TestEncodeDecode:
    def test_sets_low_bit(self):
        stego = lsb_encode(flat_image(0b10110010), np.array([1]))
        assert stego.pixels[0, 0, 0] == 0b10110011
        assert stego.pixels[0, 0, 1] == 0b10110010

    def test_channel_order(self):
        stego = lsb_encode(flat_image(0, 1, 2), np.array([1, 0, 0, 0, 0, 1]))
        assert stego.pixels.reshape(-1).tolist() == [1, 0, 0, 0, 0, 1]

    def test_two_planes_msb_first(self):
        stego = lsb_encode(flat_image(0b11111100), np.array([1, 0, 0, 1]), LsbConfig(2))
        assert stego.pixels[0, 0, 0] == 0b11111110
        assert stego.pixels[0, 0, 1] == 0b11111101

    def test_untouched_bits_and_deviation(self, rng, cover):
        for planes in (1, 2):
            cfg = LsbConfig(planes)
            bits = rng.integers(0, 2, size=lsb_capacity(16, 16, cfg))
            stego = lsb_encode(cover, bits, cfg)
            keep = 0xFF ^ ((1 << planes) - 1)
            np.testing.assert_array_equal(stego.pixels & keep, cover.pixels & keep)
            deviation = np.abs(stego.pixels.astype(int) - cover.pixels.astype(int)).max()
            assert deviation <= lsb_max_deviation(cfg)

    def test_cover_not_modified(self, cover):
        before = cover.pixels.copy()
        lsb_encode(cover, np.ones(100, dtype=np.uint8))
        np.testing.assert_array_equal(cover.pixels, before)

    def test_random_round_trips(self):
        rng = np.random.default_rng(0)
        image = synthetic_cover(8, 8, seed=0)
        for trial in range(10000):
            cfg = LsbConfig(1 + trial % 2)
            bits = rng.integers(0, 2, size=int(rng.integers(0, lsb_capacity(8, 8, cfg) + 1)))
            assert lsb_decode(lsb_encode(image, bits, cfg), bits.size, cfg) == BitMessage(bits)

    def test_zero_bits(self, cover):
        assert len(lsb_decode(cover, 0)) == 0

    def test_pristine_image_reads_low_bits(self, cover):
        decoded = lsb_decode(cover, 30)
        np.testing.assert_array_equal(decoded.bits, cover.pixels.reshape(-1)[:30] & 1)

    def test_decode_over_capacity(self, cover):
        with pytest.raises(CapacityError):
            lsb_decode(cover, 769)

    def test_psnr_floor(self):
        rng = np.random.default_rng(1)
        for seed in range(20):
            cover = synthetic_cover(128, 128, seed=seed)
            bits = rng.integers(0, 2, size=lsb_capacity(128, 128))
            assert psnr(cover, lsb_encode(cover, bits)) >= 51.0


class TestText:
    def test_plain_round_trip(self, cover):
        stego, message = lsb_embed_text(cover, b"hello world")
        assert len(message) == 88
        assert lsb_extract_text(stego) == b"hello world"

    def test_reed_solomon_round_trip(self, cover):
        stego, message = lsb_embed_text(cover, "hello", parity_symbols=4)
        assert len(message) == 72
        assert lsb_extract_text(stego, parity_symbols=4) == b"hello"

    def test_reed_solomon_repairs_damage(self, cover):
        stego, _ = lsb_embed_text(cover, b"repair me", parity_symbols=4)
        pixels = stego.pixels.copy().reshape(-1)
        # flip one low bit inside the first coded byte, after the 32-bit header
        pixels[32] ^= 1
        damaged = ImageBuffer(pixels.reshape(stego.shape))
        assert lsb_extract_text(damaged, parity_symbols=4) == b"repair me"

    def test_two_planes(self, cover):
        cfg = LsbConfig(2)
        stego, _ = lsb_embed_text(cover, b"two planes", cfg)
        assert lsb_extract_text(stego, cfg) == b"two planes"

    def test_empty_text(self, cover):
        with pytest.raises(ValidationError):
            lsb_embed_text(cover, b"")

    def test_too_long(self, cover):
        with pytest.raises(CapacityError):
            lsb_embed_text(cover, b"x" * 100)

    def test_pristine_header_rejected(self):
        # all-ones low bits read as a length far beyond capacity
        with pytest.raises(DecodeError):
            lsb_extract_text(flat_image(255, 8, 8))
