"""
Triplet training: critic update, decoder update, then the joint update on the summed loss
"""

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Union

import numpy as np
import yaml
from rich.console import Console
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn, TimeElapsedColumn

from ..engine import (
    GradientTape,
    OptimizerState,
    Tensor,
    Tensor4,
    apply_update,
    mse_loss,
    reduce_mean,
    sce_loss,
    square,
    sub,
    sum_all,
)
from ..errors import DimensionError, DivergenceError, ValidationError
from ..models import ModelManager, NetworkParams, critic_forward, decoder_forward, encoder_forward, init_params
from .config import TrainConfig
from .loader import BatchSource, LoaderStats, load_batches

console = Console()

MANIFEST_NAME = "manifest.yaml"
MANIFEST_VERSION = 1
LOSS_COLUMNS = ("step", "l_enc", "l_dec", "l_critic", "l_T")


class StepLosses(NamedTuple):
    step: int
    l_enc: float
    l_dec: float
    l_critic: float
    l_T: float


@dataclass
class TrainState:
    """Networks, optimizer moments and loss history of a run"""

    config: TrainConfig
    critic: NetworkParams
    encoder: NetworkParams
    decoder: NetworkParams
    critic_opt: OptimizerState
    encoder_opt: OptimizerState
    decoder_opt: OptimizerState
    step: int = 0
    history: List[StepLosses] = field(default_factory=list)
    # sub-step names of the latest step in execution order, e.g. critic, decoder, joint
    phase_log: List[str] = field(default_factory=list)

    def networks(self) -> Dict[str, NetworkParams]:
        return {"critic": self.critic, "encoder": self.encoder, "decoder": self.decoder}

    def optimizers(self) -> Dict[str, OptimizerState]:
        return {"critic": self.critic_opt, "encoder": self.encoder_opt, "decoder": self.decoder_opt}


def init_state(config: TrainConfig, dtype=np.float32) -> TrainState:
    nets = {
        arch: init_params(arch, config.data_depth, config.seed, config.hidden_dims, config.leaky_alpha, dtype)
        for arch in ("critic", "encoder", "decoder")
    }

    def optimizer(lr: float) -> OptimizerState:
        return OptimizerState(lr=lr, clip=config.clip, method=config.optimizer)

    return TrainState(
        config=config,
        critic=nets["critic"],
        encoder=nets["encoder"],
        decoder=nets["decoder"],
        critic_opt=optimizer(config.lr_critic),
        encoder_opt=optimizer(config.lr_total),
        decoder_opt=optimizer(config.lr_decoder),
    )


def critic_loss(p_stego: Tensor, p_cover: Tensor, mode: str = "mean_diff") -> Tensor:
    """Squared gap between stego and cover critic scores.

    ``mean_diff`` squares the difference of the batch-mean scores;
    ``per_sample`` averages the squared per-image differences.
    """
    if p_stego.shape != p_cover.shape:
        raise DimensionError(f"critic_loss needs equal score shapes, got {p_stego.shape} and {p_cover.shape}")
    if mode == "mean_diff":
        gap = sub(reduce_mean(p_stego, axes=range(p_stego.ndim), keepdims=False),
                  reduce_mean(p_cover, axes=range(p_cover.ndim), keepdims=False))
        return square(gap)
    if mode == "per_sample":
        return mse_loss(p_stego, p_cover)
    raise ValidationError(f"Unknown critic loss mode '{mode}'")


def sample_messages(seed: int, step: int, batch: int, height: int, width: int, depth: int,
                    dtype=np.float32) -> Tensor4:
    """Uniform random bits for one training step, reproducible from (seed, step)"""
    rng = np.random.default_rng([seed, step])
    return Tensor4(rng.integers(0, 2, size=(batch, height, width, depth)).astype(dtype))


def _check_finite(term: str, value: Tensor, step: int) -> float:
    number = value.item()
    if not math.isfinite(number):
        raise DivergenceError(term, number, step)
    return number


def _stego(state: TrainState, cover: Tensor4, messages: Tensor4, bypass_encoder: bool) -> Tensor4:
    if bypass_encoder:
        return cover
    return encoder_forward(state.encoder, cover, messages, training=True)


def triplet_step(
    state: TrainState,
    batch: Tensor4,
    messages: Tensor4,
    bypass_encoder: bool = False,
) -> StepLosses:
    """Run one critic / decoder / joint update triple and return the joint-step losses.

    ``bypass_encoder`` replaces the encoder output with the cover itself
    (stego := cover) and leaves the encoder untouched.
    """
    config = state.config
    if messages.shape[:3] != batch.shape[:3] or messages.shape[3] != config.data_depth:
        raise DimensionError(
            f"messages need shape {batch.shape[:3] + (config.data_depth,)}, got {messages.shape}"
        )
    step = state.step + 1
    move_encoder = not bypass_encoder
    state.phase_log.clear()

    # 1. critic (and, unless frozen, the encoder through the critic gap)
    for _ in range(config.critic_iters):
        with GradientTape() as tape:
            stego = _stego(state, batch, messages, bypass_encoder)
            l_critic = critic_loss(
                critic_forward(state.critic, stego, training=True),
                critic_forward(state.critic, batch, training=True),
                config.critic_loss_mode,
            )
        _check_finite("l_critic", l_critic, step)
        grads = tape.backward(l_critic)
        apply_update(state.critic, grads, state.critic_opt, lr=config.lr_critic)
        if move_encoder and not config.freeze_encoder_in_critic_step:
            apply_update(state.encoder, grads, state.encoder_opt, lr=config.lr_critic)
        state.phase_log.append("critic")

    # 2. decoder on a detached stego
    stego = _stego(state, batch, messages, bypass_encoder).detach()
    with GradientTape() as tape:
        l_dec = sce_loss(decoder_forward(state.decoder, stego, training=True), messages)
    _check_finite("l_dec", l_dec, step)
    apply_update(state.decoder, tape.backward(l_dec), state.decoder_opt, lr=config.lr_decoder)
    state.phase_log.append("decoder")

    # 3. joint update on l_T = l_enc + l_dec + l_critic
    with GradientTape() as tape:
        stego = _stego(state, batch, messages, bypass_encoder)
        l_enc = mse_loss(stego, batch)
        l_dec = sce_loss(decoder_forward(state.decoder, stego, training=True), messages)
        l_critic = critic_loss(
            critic_forward(state.critic, stego, training=True),
            critic_forward(state.critic, batch, training=True),
            config.critic_loss_mode,
        )
        l_total = sum_all([l_enc, l_dec, l_critic])
    values = {
        "l_enc": _check_finite("l_enc", l_enc, step),
        "l_dec": _check_finite("l_dec", l_dec, step),
        "l_critic": _check_finite("l_critic", l_critic, step),
        "l_T": _check_finite("l_T", l_total, step),
    }
    grads = tape.backward(l_total)
    if move_encoder:
        apply_update(state.encoder, grads, state.encoder_opt, lr=config.lr_total)
    apply_update(state.decoder, grads, state.decoder_opt, lr=config.lr_total)
    apply_update(state.critic, grads, state.critic_opt, lr=config.lr_total)
    state.phase_log.append("joint")

    state.step = step
    losses = StepLosses(step, values["l_enc"], values["l_dec"], values["l_critic"], values["l_T"])
    state.history.append(losses)
    return losses


def _npz_key(name: str) -> str:
    return name.replace("/", "|")


def save_checkpoint(state: TrainState, directory: Union[str, Path]) -> Path:
    """Weight files for all three networks, optimizer moments and a YAML manifest"""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manager = ModelManager(directory)
    files = {}
    for arch, params in state.networks().items():
        files[arch] = manager.save(params).name

    arrays = {}
    for arch, opt in state.optimizers().items():
        for key, value in opt.state_arrays().items():
            arrays[_npz_key(f"{arch}/{key}")] = value
    np.savez(directory / "optimizer.npz", **arrays)

    manifest = {
        "format_version": MANIFEST_VERSION,
        "step": state.step,
        "seed": state.config.seed,
        "files": {**files, "optimizer": "optimizer.npz"},
        "config": state.config.to_dict(),
    }
    with open(directory / MANIFEST_NAME, 'w') as f:
        yaml.safe_dump(manifest, f, sort_keys=False)
    return directory / MANIFEST_NAME


def load_checkpoint(directory: Union[str, Path], config: TrainConfig) -> TrainState:
    """Rebuild a TrainState from :func:`save_checkpoint` output"""
    directory = Path(directory)
    manifest_path = directory / MANIFEST_NAME
    if not manifest_path.exists():
        raise ValidationError(f"No checkpoint manifest in {directory}")
    with open(manifest_path, 'r') as f:
        manifest = yaml.safe_load(f) or {}
    if manifest.get("format_version") != MANIFEST_VERSION:
        raise ValidationError(f"Unsupported checkpoint manifest version {manifest.get('format_version')}")

    manager = ModelManager(directory)
    state = init_state(config)
    for arch in ("critic", "encoder", "decoder"):
        params = manager.load(arch, expected_depth=config.data_depth)
        if params.hidden_dims != config.hidden_dims:
            raise ValidationError(
                f"Checkpoint {arch} has hidden_dims={params.hidden_dims}, config asks for {config.hidden_dims}"
            )
        setattr(state, arch, params)

    with np.load(directory / manifest["files"]["optimizer"]) as stored:
        for arch, opt in state.optimizers().items():
            prefix = _npz_key(f"{arch}/")
            opt.restore_arrays({
                key[len(prefix):].replace("|", "/"): stored[key]
                for key in stored.files if key.startswith(prefix)
            })
    state.step = int(manifest["step"])
    return state


def _read_loss_log(path: Path, up_to: int) -> List[StepLosses]:
    if not path.exists():
        return []
    with open(path, newline='') as f:
        rows = [StepLosses(int(r["step"]), float(r["l_enc"]), float(r["l_dec"]), float(r["l_critic"]), float(r["l_T"]))
                for r in csv.DictReader(f)]
    return [row for row in rows if row.step <= up_to]


def _write_loss_log(path: Path, rows: List[StepLosses]) -> None:
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f)
        writer.writerow(LOSS_COLUMNS)
        writer.writerows(rows)


def train(config: TrainConfig, resume: bool = False, show_progress: bool = True) -> TrainState:
    """Run triplet steps over shuffled mini-batches until ``config.steps``.

    Checkpoints go to ``config.checkpoint_dir`` every
    ``config.checkpoint_every`` steps and after the last step, next to the
    loss CSV. With ``resume`` the latest checkpoint there is continued.
    """
    if not config.image_dir:
        raise ValidationError("No training images given (set image_dir or pass --image-dir)")
    source = BatchSource.from_directory(
        config.image_dir,
        seed=config.seed,
        coworkers=config.coworkers,
        buffer=config.buffer,
        batch_size=config.batch_size,
    )
    checkpoint_dir = Path(config.checkpoint_dir)
    checkpoint_dir.mkdir(parents=True, exist_ok=True)
    loss_path = checkpoint_dir / config.loss_log

    if resume:
        state = load_checkpoint(checkpoint_dir, config)
        state.history = _read_loss_log(loss_path, state.step)
        console.print(f"[green]✓[/green] Resumed from step {state.step}")
    else:
        state = init_state(config)
    _write_loss_log(loss_path, state.history)

    stats = LoaderStats()
    batches = load_batches(source, config.crop, epochs=None, start_batch=state.step, stats=stats)
    progress = Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TextColumn("{task.completed}/{task.total}"),
        TimeElapsedColumn(),
        console=console,
        disable=not show_progress,
    )
    try:
        with progress, open(loss_path, 'a', newline='') as log_file:
            writer = csv.writer(log_file)
            task = progress.add_task("Training", total=config.steps, completed=state.step)
            while state.step < config.steps:
                batch = next(batches)
                messages = sample_messages(config.seed, state.step, batch.batch, batch.height, batch.width,
                                           config.data_depth, batch.dtype)
                losses = triplet_step(state, batch, messages)
                writer.writerow(losses)
                log_file.flush()
                progress.update(task, advance=1)
                if state.step % config.log_every == 0:
                    progress.console.print(
                        f"step {losses.step}: l_enc={losses.l_enc:.5f} l_dec={losses.l_dec:.5f} "
                        f"l_critic={losses.l_critic:.6f} l_T={losses.l_T:.5f}"
                    )
                if state.step % config.checkpoint_every == 0:
                    save_checkpoint(state, checkpoint_dir)
    finally:
        batches.close()

    save_checkpoint(state, checkpoint_dir)
    if stats.skipped:
        console.print(f"[yellow]{len(stats.skipped)} image(s) were skipped[/yellow]")
    console.print(f"[green]✓[/green] Training finished at step {state.step}; checkpoints in {checkpoint_dir}")
    return state
