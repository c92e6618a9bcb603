"""
Network shapes, weight files, the weights inventory and the GAN text channel
"""

import struct

import numpy as np
import pytest

from ganash.codec import BitMessage
from ganash.engine import Tensor4
from ganash.errors import (
    CapacityError,
    CorruptionError,
    DecodeError,
    DimensionError,
    FormatError,
    StateError,
    ValidationError,
)
from ganash.models import (
    MAGIC,
    GanChannel,
    ModelManager,
    StegoPair,
    critic_forward,
    decoder_forward,
    encoder_forward,
    init_params,
    load_params,
    parameter_shapes,
    read_header,
    save_params,
    stage_plan,
)
from ganash.utils.images import ImageBuffer
from ganash.utils.samples import synthetic_cover


def images(rng, batch=2, size=8):
    return Tensor4(rng.uniform(-1, 1, size=(batch, size, size, 3)).astype(np.float32))


class TestShapes:
    def test_critic_scores_one_per_image(self, rng):
        params = init_params("critic", 4, seed=0, hidden_dims=8)
        assert critic_forward(params, images(rng, batch=3)).shape == (3, 1, 1, 1)

    @pytest.mark.parametrize("depth", [1, 3, 4, 5])
    def test_encoder_decoder_keep_spatial_size(self, rng, depth):
        encoder = init_params("encoder", depth, seed=0, hidden_dims=8)
        decoder = init_params("decoder", depth, seed=0, hidden_dims=8)
        cover = images(rng, size=10)
        message = Tensor4(rng.integers(0, 2, size=(2, 10, 10, depth)).astype(np.float32))
        stego = encoder_forward(encoder, cover, message)
        assert stego.shape == cover.shape
        assert decoder_forward(decoder, stego).shape == (2, 10, 10, depth)

    def test_encoder_output_in_open_interval(self, rng):
        encoder = init_params("encoder", 2, seed=1, hidden_dims=8)
        cover = Tensor4(np.full((1, 6, 6, 3), 1.0, dtype=np.float32))
        message = Tensor4(np.ones((1, 6, 6, 2), dtype=np.float32))
        stego = encoder_forward(encoder, cover, message, training=True)
        assert np.all(np.abs(stego.data) < 1.0)

    def test_zero_parameters_score_zero(self, rng):
        params = init_params("critic", 1, seed=0, hidden_dims=4)
        for tensor in params.trainable().values():
            tensor.data[...] = 0.0
        np.testing.assert_array_equal(critic_forward(params, images(rng)).data, 0.0)

    def test_message_depth_mismatch(self, rng):
        encoder = init_params("encoder", 4, seed=0, hidden_dims=4)
        message = Tensor4(np.zeros((2, 8, 8, 3), dtype=np.float32))
        with pytest.raises(DimensionError):
            encoder_forward(encoder, images(rng), message)

    def test_cover_message_size_mismatch(self, rng):
        encoder = init_params("encoder", 1, seed=0, hidden_dims=4)
        message = Tensor4(np.zeros((2, 4, 4, 1), dtype=np.float32))
        with pytest.raises(DimensionError):
            encoder_forward(encoder, images(rng), message)

    def test_wrong_network_rejected(self, rng):
        decoder = init_params("decoder", 1, seed=0, hidden_dims=4)
        with pytest.raises(ValidationError):
            critic_forward(decoder, images(rng))

    def test_grayscale_rejected(self, rng):
        critic = init_params("critic", 1, seed=0, hidden_dims=4)
        with pytest.raises(DimensionError):
            critic_forward(critic, Tensor4(np.zeros((1, 4, 4, 1), dtype=np.float32)))

    def test_stage_plan(self):
        critic = stage_plan("critic", 4)
        assert [s.kernel for s in critic] == [3, 3, 3, 1]
        assert critic[-1].out_channels == 1
        encoder = stage_plan("encoder", 4)
        assert encoder[0].in_channels == 7
        assert encoder[-1].out_channels == 3
        assert stage_plan("decoder", 5)[-1].out_channels == 5
        with pytest.raises(ValidationError):
            stage_plan("generator", 4)

    def test_stego_pair_sizes(self):
        with pytest.raises(DimensionError):
            StegoPair(synthetic_cover(8, 8, 0), synthetic_cover(8, 9, 0), BitMessage(np.ones(8)))


class TestParameters:
    def test_encoder_parameter_count(self):
        # regression value for hidden_dims=32, D=4
        assert init_params("encoder", 4, seed=0).parameter_count() == 21603

    def test_shapes_match_plan(self):
        params = init_params("decoder", 3, seed=0, hidden_dims=6)
        for name, shape in parameter_shapes("decoder", 3, 6).items():
            assert params[name].shape == shape
        params.check_consistency()

    def test_buffers_not_trainable(self):
        params = init_params("critic", 1, seed=0, hidden_dims=4)
        assert all(n.endswith(("running_mean", "running_var")) for n in params.buffers())
        assert len(params.buffers()) == 6

    def test_deterministic_per_seed(self):
        a = init_params("encoder", 2, seed=11, hidden_dims=8)
        b = init_params("encoder", 2, seed=11, hidden_dims=8)
        c = init_params("encoder", 2, seed=12, hidden_dims=8)
        for name in a.tensors:
            np.testing.assert_array_equal(a[name].data, b[name].data)
        assert not np.array_equal(a["stage2.conv.weight"].data, c["stage2.conv.weight"].data)

    def test_kernel_variance_follows_fan_in(self):
        params = init_params("critic", 1, seed=0, hidden_dims=64)
        weights = params["stage2.conv.weight"].data
        fan_in = 3 * 3 * 64
        assert weights.var() == pytest.approx(2.0 / fan_in, rel=0.05)

    def test_bad_depth(self):
        with pytest.raises(ValidationError):
            init_params("encoder", 0, seed=0)

    def test_check_consistency_detects_bad_shape(self):
        params = init_params("decoder", 2, seed=0, hidden_dims=4)
        params.tensors["stage2.conv.weight"].data = np.zeros((3, 3, 5, 4), dtype=np.float32)
        with pytest.raises(DimensionError):
            params.check_consistency()


class TestWeightFiles:
    def test_round_trip_bit_exact(self, tmp_path, rng):
        params = init_params("encoder", 3, seed=4, hidden_dims=8)
        params["stage1.bn.running_mean"].data[...] = rng.normal(size=8)
        path = save_params(params, tmp_path / "encoder.gnsh")
        loaded = load_params(path)
        assert loaded.arch == "encoder"
        assert loaded.data_depth == 3
        assert loaded.hidden_dims == 8
        assert loaded.leaky_alpha == 0.2
        assert list(loaded.tensors) == list(params.tensors)
        for name, tensor in params.tensors.items():
            np.testing.assert_array_equal(loaded[name].data, tensor.data)
            assert loaded[name].requires_grad == tensor.requires_grad

    def test_header_fields(self, tmp_path):
        path = save_params(init_params("critic", 2, seed=0, hidden_dims=4), tmp_path / "critic.gnsh")
        header = read_header(path)
        assert (header.arch, header.data_depth, header.hidden_dims) == ("critic", 2, 4)
        assert header.record_count == len(parameter_shapes("critic", 2, 4))
        assert path.read_bytes()[:6] == MAGIC

    def test_header_prefix_layout(self, tmp_path):
        params = init_params("decoder", 3, seed=0, hidden_dims=4, leaky_alpha=0.15)
        data = save_params(params, tmp_path / "decoder.gnsh").read_bytes()
        assert struct.unpack("<6sBBHH", data[:12]) == (MAGIC, 1, 2, 3, 4)
        assert struct.unpack("<d", data[12:20]) == (0.15,)
        assert load_params(tmp_path / "decoder.gnsh").leaky_alpha == 0.15

    def test_wrong_magic(self, tmp_path):
        path = save_params(init_params("critic", 1, seed=0, hidden_dims=4), tmp_path / "critic.gnsh")
        data = bytearray(path.read_bytes())
        data[:6] = b"NOTGAN"
        path.write_bytes(bytes(data))
        with pytest.raises(FormatError):
            load_params(path)

    def test_wrong_version(self, tmp_path):
        path = save_params(init_params("critic", 1, seed=0, hidden_dims=4), tmp_path / "critic.gnsh")
        data = bytearray(path.read_bytes())
        data[6] = 9
        path.write_bytes(bytes(data))
        with pytest.raises(FormatError):
            load_params(path)

    def test_cross_architecture_load(self, tmp_path):
        path = save_params(init_params("decoder", 1, seed=0, hidden_dims=4), tmp_path / "decoder.gnsh")
        with pytest.raises(FormatError):
            load_params(path, expected_arch="encoder")

    def test_truncated(self, tmp_path):
        path = save_params(init_params("decoder", 1, seed=0, hidden_dims=4), tmp_path / "decoder.gnsh")
        data = path.read_bytes()
        path.write_bytes(data[:-10])
        with pytest.raises(CorruptionError):
            load_params(path)

    def test_trailing_bytes(self, tmp_path):
        path = save_params(init_params("decoder", 1, seed=0, hidden_dims=4), tmp_path / "decoder.gnsh")
        path.write_bytes(path.read_bytes() + b"\x00")
        with pytest.raises(CorruptionError):
            load_params(path)

    def test_record_count_mismatch(self, tmp_path):
        path = save_params(init_params("decoder", 1, seed=0, hidden_dims=4), tmp_path / "decoder.gnsh")
        data = bytearray(path.read_bytes())
        # record count is the trailing u32 of the 24-byte header
        data[20:24] = struct.pack("<I", 3)
        path.write_bytes(bytes(data))
        with pytest.raises(CorruptionError):
            load_params(path)


class TestModelManager:
    def test_inventory(self, tmp_path):
        manager = ModelManager(tmp_path)
        assert manager.available == []
        assert manager.data_depth() is None
        for arch in ("encoder", "decoder"):
            manager.save(init_params(arch, 3, seed=0, hidden_dims=4))
        assert manager.available == ["encoder", "decoder"]
        assert manager.data_depth() == 3
        assert manager.list_models().row_count == 3

    def test_depth_disagreement(self, tmp_path):
        manager = ModelManager(tmp_path)
        manager.save(init_params("encoder", 3, seed=0, hidden_dims=4))
        manager.save(init_params("decoder", 4, seed=0, hidden_dims=4))
        with pytest.raises(ValidationError):
            manager.data_depth()

    def test_expected_depth(self, tmp_path):
        manager = ModelManager(tmp_path)
        manager.save(init_params("decoder", 4, seed=0, hidden_dims=4))
        assert manager.load("decoder", expected_depth=4).data_depth == 4
        with pytest.raises(FormatError):
            manager.load("decoder", expected_depth=3)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ValidationError):
            ModelManager(tmp_path).load("critic")

    def test_misplaced_file_reported(self, tmp_path):
        save_params(init_params("decoder", 1, seed=0, hidden_dims=4), tmp_path / "encoder.gnsh")
        manager = ModelManager(tmp_path)
        assert "encoder" in manager.problems
        with pytest.raises(FormatError):
            manager.load("encoder")


class TestGanChannel:
    @pytest.fixture
    def weights(self, tmp_path):
        manager = ModelManager(tmp_path)
        for arch in ("encoder", "decoder"):
            manager.save(init_params(arch, 2, seed=0, hidden_dims=4))
        return tmp_path

    def test_embed_shapes_and_timing(self, weights):
        channel = GanChannel.from_weights(weights, depth=2)
        cover = synthetic_cover(16, 16, 0)
        result = channel.embed(cover, b"hi", parity_symbols=4)
        assert isinstance(result.stego, ImageBuffer)
        assert result.stego.shape == cover.shape
        assert result.packed.shape == (1, 16, 16, 2)
        assert len(result.message) == 48
        assert result.seconds > 0

    def test_embed_extract_round_trip(self, wired_weights):
        channel = GanChannel.from_weights(wired_weights, depth=2)
        embedded = channel.embed(synthetic_cover(16, 16, 0), b"meet at noon", parity_symbols=4)
        result = channel.extract(embedded.stego, parity_symbols=4)
        assert result.text == b"meet at noon"
        np.testing.assert_array_equal(result.message.bits, embedded.message.bits)
        assert result.logits.shape == (1, 16, 16, 2)

    def test_round_trip_survives_png(self, wired_weights, tmp_path):
        channel = GanChannel.from_weights(wired_weights)
        channel.embed(synthetic_cover(16, 16, 2), "snow", parity_symbols=4).stego.save(tmp_path / "s.png")
        assert channel.extract(ImageBuffer.load(tmp_path / "s.png"), parity_symbols=4).text == b"snow"

    def test_extract_reports_undecodable(self, weights):
        channel = GanChannel.from_weights(weights, encoder=False)
        # constant per-channel logits: every header window reads 0xAAAAAAAA or 0x55555555
        for name, tensor in channel.decoder.trainable().items():
            if name.endswith("conv.weight") or name.endswith("conv.bias"):
                tensor.data[...] = 0.0
        channel.decoder["stage4.conv.bias"].data[...] = [1.0, -1.0]
        with pytest.raises(DecodeError):
            channel.extract(synthetic_cover(16, 16, 1), parity_symbols=4)

    def test_capacity_error(self, weights):
        channel = GanChannel.from_weights(weights)
        with pytest.raises(CapacityError):
            channel.embed(synthetic_cover(4, 4, 0), b"this cannot fit", parity_symbols=4)

    def test_missing_networks(self):
        channel = GanChannel()
        with pytest.raises(StateError):
            channel.embed(synthetic_cover(4, 4, 0), b"x")

    def test_depth_disagreement(self):
        with pytest.raises(FormatError):
            GanChannel(init_params("encoder", 2, seed=0, hidden_dims=4), init_params("decoder", 3, seed=0, hidden_dims=4))
