"""
Payload, MSE, PSNR, correlation, timing and report formatting
"""

import math

import numpy as np
import pytest

from ganash.codec import BitMessage
from ganash.engine import mse_loss
from ganash.errors import DimensionError, ValidationError
from ganash.metrics import (
    PSNR_INFINITY,
    ROW_NAMES,
    MetricsReport,
    bit_accuracy,
    build_report,
    cross_correlation,
    mean_report,
    mse_metric,
    payload,
    psnr,
    psnr_from_mse,
    read_reports_csv,
    report_table,
    timed,
    write_reports_csv,
)
from ganash.metrics.report import format_value
from ganash.utils.images import ImageBuffer


def random_image(rng, size=8):
    return ImageBuffer(rng.integers(0, 256, size=(size, size, 3)).astype(np.uint8))


def oracle_mse(a, b):
    total, count = 0.0, 0
    for x, y in zip(a.pixels.reshape(-1).tolist(), b.pixels.reshape(-1).tolist()):
        total += (x - y) ** 2
        count += 1
    return total / count


def oracle_r(a, b):
    xs = a.pixels.reshape(-1).astype(float).tolist()
    ys = b.pixels.reshape(-1).astype(float).tolist()
    mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
    sxy = sxx = syy = 0.0
    for x, y in zip(xs, ys):
        sxy += (x - mx) * (y - my)
        sxx += (x - mx) ** 2
        syy += (y - my) ** 2
    return sxy / math.sqrt(sxx * syy)


class TestPayload:
    @pytest.mark.parametrize("bits,expected", [(518400, 4.0), (0, 0.0), (129600, 1.0)])
    def test_examples(self, bits, expected):
        assert payload(bits, 360, 360) == expected

    def test_zero_area(self):
        with pytest.raises(ValidationError):
            payload(10, 0, 5)


class TestMse:
    def test_identical(self, rng):
        image = random_image(rng)
        assert mse_metric(image, image) == 0.0

    def test_unit_scale_arrays(self):
        assert mse_metric(np.zeros((2, 2)), np.full((2, 2), 0.5), scale="unit") == pytest.approx(0.25)

    def test_matches_tensor_loss(self, rng):
        a, b = random_image(rng), random_image(rng)
        expected = mse_loss(a.to_tensor(np.float64), b.to_tensor(np.float64)).item()
        assert mse_metric(a, b, scale="signed") == pytest.approx(expected, abs=1e-7)

    def test_scales_relate(self, rng):
        a, b = random_image(rng), random_image(rng)
        assert mse_metric(a, b, "unit") == pytest.approx(mse_metric(a, b, "byte") / 255.0 ** 2)

    def test_brute_force_and_symmetry(self):
        for seed in range(100):
            rng = np.random.default_rng(seed)
            a, b = random_image(rng), random_image(rng)
            assert abs(mse_metric(a, b) - oracle_mse(a, b)) < 1e-9
            assert mse_metric(a, b) == mse_metric(b, a)

    def test_size_mismatch(self, rng):
        with pytest.raises(DimensionError):
            mse_metric(random_image(rng, 8), random_image(rng, 9))

    def test_unknown_scale(self, rng):
        image = random_image(rng)
        with pytest.raises(ValidationError):
            mse_metric(image, image, scale="percent")


class TestPsnr:
    def test_peak_error_is_zero_db(self):
        assert psnr_from_mse(255.0 ** 2) == pytest.approx(0.0)

    def test_unit_mse(self):
        assert psnr_from_mse(1.0) == pytest.approx(48.131, abs=1e-3)

    def test_identical_is_infinite(self, rng):
        image = random_image(rng)
        assert psnr(image, image) == PSNR_INFINITY

    def test_one_level_everywhere(self, rng):
        cover = ImageBuffer(rng.integers(0, 255, size=(8, 8, 3)).astype(np.uint8))
        stego = ImageBuffer(cover.pixels + 1)
        assert psnr(cover, stego) == pytest.approx(10 * math.log10(65025))

    def test_brute_force(self):
        for seed in range(100):
            rng = np.random.default_rng(seed)
            a, b = random_image(rng), random_image(rng)
            expected = 10 * math.log10(255.0 ** 2 / oracle_mse(a, b))
            assert abs(psnr(a, b) - expected) < 1e-9

    def test_monotone_in_mse(self):
        values = [psnr_from_mse(m) for m in np.linspace(0.01, 5000, 200)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_negative_mse(self):
        with pytest.raises(ValidationError):
            psnr_from_mse(-1.0)


class TestCrossCorrelation:
    def test_self(self, rng):
        image = random_image(rng)
        assert cross_correlation(image, image) == pytest.approx(1.0)

    def test_inverted(self, rng):
        image = random_image(rng)
        assert cross_correlation(image, ImageBuffer(255 - image.pixels)) == pytest.approx(-1.0)

    def test_affine_invariance(self, rng):
        a = rng.uniform(0, 100, size=(8, 8, 3))
        b = rng.uniform(0, 100, size=(8, 8, 3))
        assert abs(cross_correlation(a, 2.5 * b + 7.0) - cross_correlation(a, b)) < 1e-9

    def test_brute_force_and_symmetry(self):
        for seed in range(100):
            rng = np.random.default_rng(seed)
            a, b = random_image(rng), random_image(rng)
            assert abs(cross_correlation(a, b) - oracle_r(a, b)) < 1e-9
            assert cross_correlation(a, b) == pytest.approx(cross_correlation(b, a), abs=1e-15)

    def test_constant_image(self, rng):
        with pytest.raises(ValidationError):
            cross_correlation(ImageBuffer(np.full((4, 4, 3), 9, dtype=np.uint8)), random_image(rng, 4))


class TestTiming:
    def test_trivial_call_is_fast(self):
        result, seconds = timed(lambda x: x, 5)
        assert result == 5
        assert 0.0 <= seconds < 1e-3

    def test_result_stable_while_timing_varies(self):
        data = np.arange(20000.0)
        runs = [timed(np.sort, data[::-1]) for _ in range(5)]
        for result, seconds in runs:
            np.testing.assert_array_equal(result, data)
            assert seconds > 0

    def test_seconds_keep_significant_digits(self):
        assert format_value("t2e", 0.000123456) == "0.0001235"
        assert format_value("t2d", 0.129) == "0.129"


class TestBitAccuracy:
    def test_identical(self):
        bits = np.array([1, 0, 1, 1, 0, 0, 1, 0])
        assert bit_accuracy(bits, bits) == 1.0

    def test_inverted(self):
        bits = np.array([1, 0, 1, 1, 0, 0, 1, 0])
        assert bit_accuracy(bits, 1 - bits) == 0.0

    def test_one_wrong(self):
        sent = BitMessage(np.array([1, 0, 1, 1, 0, 0, 1, 0]))
        received = BitMessage(np.array([1, 0, 1, 1, 0, 0, 1, 1]))
        assert bit_accuracy(sent, received) == 0.875

    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            bit_accuracy(np.ones(8), np.ones(16))


class TestReports:
    @pytest.fixture
    def report(self, rng):
        cover = random_image(rng, 16)
        stego = ImageBuffer(cover.pixels ^ rng.integers(0, 2, size=cover.shape).astype(np.uint8))
        sent = BitMessage(rng.integers(0, 2, size=64))
        return build_report(cover, stego, 64, sent, sent, t2e=0.0123, t2d=0.00456)

    def test_build(self, report):
        assert report.payload == 64 / 256
        assert report.bit_accuracy == 1.0
        assert 0.0 < report.mse <= 1.0
        assert report.mse_unit == pytest.approx(report.mse / 255.0 ** 2)
        assert report.psnr == pytest.approx(psnr_from_mse(report.mse))
        assert report.security == "not assessed"

    def test_row_names(self, report):
        rows = report.rows()
        assert list(rows) == list(ROW_NAMES.values())
        assert rows["Max. payload (bits/pixels)"] == "0.2500"
        assert rows["Time to Encode (secs)"] == "0.0123"
        assert rows["Security"] == "not assessed"

    def test_csv_round_trip(self, report, tmp_path):
        path = write_reports_csv(tmp_path / "bench.csv", {"GANash": report}, comment="OS: Linux\nCores: 4")
        text = path.read_text().splitlines()
        assert text[:2] == ["# OS: Linux", "# Cores: 4"]
        assert text[2].startswith("Method,")
        assert read_reports_csv(path) == {"GANash": report}

    def test_table_columns(self, report):
        table = report_table({"GANash": report, "LSB": report})
        assert len(table.columns) == 3
        assert table.row_count == len(ROW_NAMES)

    def test_infinite_psnr_formats(self):
        assert format_value("psnr", math.inf) == "inf"
        assert format_value("bit_accuracy", None) == "-"

    def test_mean(self):
        a = MetricsReport(payload=1.0, mse=2.0, mse_unit=0.1, psnr=40.0, r=0.9, t2e=1.0, bit_accuracy=1.0)
        b = MetricsReport(payload=3.0, mse=4.0, mse_unit=0.3, psnr=50.0, r=0.7, t2e=None, bit_accuracy=0.5)
        mean = mean_report([a, b])
        assert (mean.payload, mean.mse, mean.psnr, mean.r) == (2.0, 3.0, 45.0, pytest.approx(0.8))
        assert mean.t2e is None
        assert mean.bit_accuracy == 0.75

    def test_mean_of_nothing(self):
        with pytest.raises(ValidationError):
            mean_report([])

    def test_out_of_range_fields(self):
        with pytest.raises(ValidationError):
            MetricsReport(payload=1.0, mse=1.0, mse_unit=0.0, psnr=48.0, r=1.5)
