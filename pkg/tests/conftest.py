"""
Shared fixtures for the GANash test suite
"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from ganash.models import ModelManager, init_params  # noqa: E402
from ganash.training import TrainConfig  # noqa: E402
from ganash.utils.samples import synthetic_cover, write_sample_set  # noqa: E402


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run desk-scale training tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long training runs, enabled with --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def cover():
    return synthetic_cover(16, 16, seed=3)


@pytest.fixture
def image_dir(tmp_path):
    directory = tmp_path / "covers"
    write_sample_set(directory, 10, 20, 20, seed=0)
    return directory


@pytest.fixture
def tiny_config(image_dir, tmp_path):
    """Small enough for a few triplet steps in well under a second each"""
    return TrainConfig(
        hidden_dims=4,
        data_depth=2,
        batch_size=2,
        crop_height=8,
        crop_width=8,
        coworkers=2,
        buffer=2,
        steps=3,
        checkpoint_every=2,
        log_every=1,
        seed=5,
        image_dir=str(image_dir),
        checkpoint_dir=str(tmp_path / "run"),
    )


def _route(params, stage, pairs, scale=1.0, bias=None):
    """Centre-tap kernel copying channel src to channel dst for each (src, dst)"""
    weight = params[f"{stage}.conv.weight"].data
    weight[...] = 0.0
    centre = weight.shape[0] // 2
    for src, dst in pairs:
        weight[centre, centre, src, dst] = scale
    params[f"{stage}.conv.bias"].data[...] = 0.0 if bias is None else bias


@pytest.fixture
def wired_weights(tmp_path):
    """D=2 weights whose encoder writes each bit into a colour channel and whose decoder reads it back"""
    manager = ModelManager(tmp_path / "wired")
    encoder = init_params("encoder", 2, seed=0, hidden_dims=4)
    _route(encoder, "stage1", [(3, 0), (4, 1)])
    for stage in ("stage2", "stage3"):
        _route(encoder, stage, [(0, 0), (1, 1)])
    # bit b -> tanh(2b - 1), about +-0.76 in the red and green channels
    _route(encoder, "stage4", [(0, 0), (1, 1)], scale=2.0, bias=[-1.0, -1.0, 0.0])

    decoder = init_params("decoder", 2, seed=0, hidden_dims=4)
    for stage in ("stage1", "stage2", "stage3", "stage4"):
        _route(decoder, stage, [(0, 0), (1, 1)])

    manager.save(init_params("critic", 2, seed=0, hidden_dims=4))
    manager.save(encoder)
    manager.save(decoder)
    return manager.weights_dir
