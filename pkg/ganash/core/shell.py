"""
GANash command-line shell: train, encode, decode, evaluate, bench, models, presets
"""

import argparse
import traceback
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
from rich.console import Console
from rich.panel import Panel

from .. import __version__
from ..baselines.lsb import LsbConfig, lsb_decode, lsb_embed_text, lsb_extract_text
from ..codec.message import HEADER_BITS
from ..codec.reed_solomon import DEFAULT_PARITY, BitMessage
from ..errors import GanashError, ValidationError
from ..metrics import (
    MetricsReport,
    build_report,
    mean_report,
    payload,
    timed_decode,
    timed_encode,
    write_reports_csv,
)
from ..models import GanChannel, ModelManager
from ..presets import PresetManager
from ..rendering.renderer import ResponseRenderer
from ..training import TrainConfig, train
from ..utils.images import ImageBuffer
from .system_info import SystemInfo

console = Console()

METHODS = ("gan", "lsb")
EXIT_OK = 0


def _load_image(path: str, flag: str) -> ImageBuffer:
    if not Path(path).is_file():
        raise ValidationError(f"{flag}: file not found: {path}")
    try:
        return ImageBuffer.load(path)
    except OSError as e:
        raise ValidationError(f"{flag}: cannot read {path} as an image ({e})") from e


def _to_text(data: bytes) -> str:
    return data.decode("utf-8", errors="replace")


class StegoShell:
    """Parses a command line and dispatches it to one subcommand"""

    def __init__(self):
        self.renderer = ResponseRenderer()
        self.parser = self._build_parser()

    def _build_parser(self) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(
            prog="ganash",
            description="Adversarially trained image steganography with a Reed-Solomon coded text channel",
        )
        parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
        sub = parser.add_subparsers(dest="command", metavar="COMMAND")
        sub.required = True

        p = sub.add_parser("train", help="Train critic, encoder and decoder on a directory of images")
        source = p.add_mutually_exclusive_group()
        source.add_argument("--config", help="YAML config file (keys are TrainConfig field names)")
        source.add_argument("--preset", help="Bundled preset name (see 'ganash presets')")
        p.add_argument("--image-dir", help="Directory of training images")
        p.add_argument("--checkpoint-dir", help="Where weights, manifest and loss CSV are written")
        p.add_argument("--steps", type=int, help="Number of triplet steps")
        p.add_argument("--seed", type=int, help="Seed for initialization, shuffling, crops and messages")
        p.add_argument("--depth", type=int, help="Data depth D (message planes per pixel)")
        p.add_argument("--batch-size", type=int, help="Images per mini-batch")
        p.add_argument("--resume", action="store_true", help="Continue from the checkpoint in --checkpoint-dir")
        p.set_defaults(handler=self.cmd_train)

        p = sub.add_parser("encode", help="Hide text in a cover PNG")
        p.add_argument("cover", help="Cover image")
        p.add_argument("out", help="Stego PNG to write")
        message = p.add_mutually_exclusive_group(required=True)
        message.add_argument("--text", help="Message text")
        message.add_argument("--message-file", help="File whose bytes are the message")
        self._add_channel_flags(p)
        p.set_defaults(handler=self.cmd_encode)

        p = sub.add_parser("decode", help="Recover text from a stego PNG")
        p.add_argument("stego", help="Stego image")
        self._add_channel_flags(p)
        p.add_argument("--output", help="Write the recovered bytes to this file as well")
        p.set_defaults(handler=self.cmd_decode)

        p = sub.add_parser("evaluate", help="Quality report for a cover/stego pair")
        p.add_argument("cover", help="Cover image")
        p.add_argument("stego", help="Stego image")
        p.add_argument("--sent", required=True, help="Text that was embedded")
        p.add_argument("--received", required=True, help="Text that was recovered")
        p.add_argument("--t2e", type=float, help="Time to encode in seconds")
        p.add_argument("--t2d", type=float, help="Time to decode in seconds")
        p.add_argument("--csv", help="Also write the report to this CSV file")
        p.set_defaults(handler=self.cmd_evaluate)

        p = sub.add_parser("bench", help="Compare methods over a directory of covers")
        p.add_argument("image_dir", help="Directory of cover PNGs")
        p.add_argument("--methods", default="gan,lsb", help="Comma-separated methods from: gan, lsb")
        p.add_argument("--weights", help="Weights directory for the gan method")
        p.add_argument("--depth", type=int, help="Expected data depth of the weights")
        p.add_argument("--message-bytes", type=int, default=64, help="Random message length per image")
        p.add_argument("--parity", type=int, help="Reed-Solomon parity symbols per block")
        p.add_argument("--seed", type=int, default=0, help="Seed for the random messages")
        p.add_argument("--csv", help="Write the aggregate rows to this CSV file")
        p.set_defaults(handler=self.cmd_bench)

        p = sub.add_parser("models", help="List the weight files in a weights directory")
        p.add_argument("weights_dir", help="Weights directory")
        p.set_defaults(handler=self.cmd_models)

        p = sub.add_parser("presets", help="List bundled training presets")
        p.set_defaults(handler=self.cmd_presets)
        return parser

    @staticmethod
    def _add_channel_flags(p: argparse.ArgumentParser):
        p.add_argument("--weights", help="Weights directory with encoder/decoder files (gan method)")
        p.add_argument("--method", choices=METHODS, default="gan", help="Embedding method (default: gan)")
        p.add_argument("--depth", type=int, help="Expected data depth D of the weights")
        p.add_argument("--parity", type=int,
                       help=f"Reed-Solomon parity symbols per block (gan default {DEFAULT_PARITY}, lsb default 0)")
        p.add_argument("--planes", type=int, choices=(1, 2), default=1, help="LSB planes per channel byte")

    def run(self, argv: Optional[Sequence[str]] = None) -> int:
        """Parse ``argv`` and execute the command; returns the process exit code"""
        try:
            args = self.parser.parse_args(argv)
        except SystemExit as e:
            return int(e.code or 0)
        try:
            return args.handler(args)
        except GanashError as e:
            self.renderer.render_error(str(e), title=type(e).__name__)
            return e.exit_code
        except KeyboardInterrupt:
            console.print("\n[yellow]Interrupted[/yellow]")
            return 130
        except Exception as e:
            console.print(f"[red]Unexpected error: {e}[/red]")
            traceback.print_exc()
            return 1

    # train

    def cmd_train(self, args) -> int:
        if args.config:
            config = TrainConfig.from_file(args.config)
        elif args.preset:
            config = PresetManager().get_config(args.preset)
        else:
            config = TrainConfig()
        config = config.with_overrides(
            image_dir=args.image_dir,
            checkpoint_dir=args.checkpoint_dir,
            steps=args.steps,
            seed=args.seed,
            data_depth=args.depth,
            batch_size=args.batch_size,
        )
        if not config.image_dir:
            raise ValidationError("--image-dir is required (no image_dir in the config)")
        if not Path(config.image_dir).is_dir():
            raise ValidationError(f"--image-dir: directory not found: {config.image_dir}")

        console.print(Panel(
            f"[bold]Images:[/bold] {config.image_dir}\n"
            f"[bold]Checkpoints:[/bold] {config.checkpoint_dir}\n"
            f"[bold]D:[/bold] {config.data_depth}  [bold]Steps:[/bold] {config.steps}  "
            f"[bold]Batch:[/bold] {config.batch_size}  [bold]Seed:[/bold] {config.seed}",
            title="[cyan]Training[/cyan]", border_style="blue"))
        state = train(config, resume=args.resume)
        self.renderer.render_losses(state.history)
        console.print(f"[dim]Resident memory: {SystemInfo.resident_memory_mb():.0f} MiB[/dim]")
        return EXIT_OK

    # encode / decode

    @staticmethod
    def _message_bytes(args) -> bytes:
        if args.message_file:
            path = Path(args.message_file)
            if not path.is_file():
                raise ValidationError(f"--message-file: file not found: {path}")
            return path.read_bytes()
        return args.text.encode("utf-8")

    def cmd_encode(self, args) -> int:
        cover = _load_image(args.cover, "COVER")
        data = self._message_bytes(args)
        if not data:
            raise ValidationError("Message is empty")
        out = Path(args.out)
        if out.resolve() == Path(args.cover).resolve():
            raise ValidationError("OUT must differ from COVER; input files are never overwritten")

        if args.method == "lsb":
            (stego, message), seconds = timed_encode(
                lsb_embed_text, cover, data, LsbConfig(args.planes), args.parity or 0
            )
        else:
            if not args.weights:
                raise ValidationError("--weights is required for --method gan")
            channel = GanChannel.from_weights(args.weights, depth=args.depth, decoder=False)
            parity = DEFAULT_PARITY if args.parity is None else args.parity
            result = channel.embed(cover, data, parity)
            stego, message, seconds = result.stego, result.message, result.seconds

        out.parent.mkdir(parents=True, exist_ok=True)
        stego.save(out)
        bits = len(message) + HEADER_BITS
        console.print(f"[green]✓[/green] Wrote {out}")
        console.print(f"T2E: {seconds:.4g} s")
        console.print(f"Payload: {payload(bits, cover.height, cover.width):.6g} bits/pixel ({bits} bits)")
        return EXIT_OK

    def cmd_decode(self, args) -> int:
        stego = _load_image(args.stego, "STEGO")
        if args.method == "lsb":
            text, seconds = timed_decode(lsb_extract_text, stego, LsbConfig(args.planes), args.parity or 0)
        else:
            if not args.weights:
                raise ValidationError("--weights is required for --method gan")
            channel = GanChannel.from_weights(args.weights, depth=args.depth, encoder=False)
            parity = DEFAULT_PARITY if args.parity is None else args.parity
            result = channel.extract(stego, parity)
            text, seconds = result.text, result.seconds

        if args.output:
            Path(args.output).write_bytes(text)
        self.renderer.render_result(_to_text(text), title="Recovered message")
        console.print(f"T2D: {seconds:.4g} s")
        return EXIT_OK

    # evaluate

    def cmd_evaluate(self, args) -> int:
        cover = _load_image(args.cover, "COVER")
        stego = _load_image(args.stego, "STEGO")
        sent = BitMessage.from_bytes(args.sent.encode("utf-8"))
        received = BitMessage.from_bytes(args.received.encode("utf-8"))
        report = build_report(cover, stego, len(sent), sent, received, t2e=args.t2e, t2d=args.t2d)
        reports = {"stego": report}
        self.renderer.render_reports(reports)
        if args.csv:
            write_reports_csv(args.csv, reports)
            console.print(f"[green]✓[/green] Report written to {args.csv}")
        return EXIT_OK

    # bench

    @staticmethod
    def _random_text(seed: int, index: int, size: int) -> bytes:
        rng = np.random.default_rng([seed, index])
        return bytes(rng.integers(32, 127, size=size).astype(np.uint8))

    def _bench_lsb(self, cover: ImageBuffer, data: bytes, parity: int) -> MetricsReport:
        cfg = LsbConfig(1)
        (stego, message), t2e = timed_encode(lsb_embed_text, cover, data, cfg, parity)
        recovered, t2d = timed_decode(lsb_extract_text, stego, cfg, parity)
        received = lsb_decode(stego, HEADER_BITS + len(message), cfg).bits[HEADER_BITS:]
        if recovered != data:
            raise ValidationError("LSB round trip returned different text")
        return build_report(cover, stego, len(message) + HEADER_BITS, message, BitMessage(received), t2e, t2d)

    def _bench_gan(self, channel: GanChannel, cover: ImageBuffer, data: bytes, parity: int) -> MetricsReport:
        embedded = channel.embed(cover, data, parity)
        extracted = channel.extract(embedded.stego, parity)
        sent = BitMessage(embedded.packed.reshape(-1))
        received = BitMessage((extracted.logits.reshape(-1) >= 0).astype(np.uint8))
        return build_report(cover, embedded.stego, len(embedded.message) + HEADER_BITS, sent, received,
                            embedded.seconds, extracted.seconds)

    def cmd_bench(self, args) -> int:
        methods = [m.strip() for m in args.methods.split(",") if m.strip()]
        unknown = [m for m in methods if m not in METHODS]
        if not methods or unknown:
            raise ValidationError(f"--methods must list some of {', '.join(METHODS)}, got '{args.methods}'")
        if args.message_bytes < 1:
            raise ValidationError("--message-bytes must be at least 1")
        directory = Path(args.image_dir)
        if not directory.is_dir():
            raise ValidationError(f"IMAGE_DIR: directory not found: {directory}")
        paths = sorted(directory.glob("*.png"))
        if not paths:
            raise ValidationError(f"IMAGE_DIR: no PNG files in {directory}")

        channel = None
        if "gan" in methods:
            if not args.weights:
                raise ValidationError("--weights is required when --methods includes gan")
            channel = GanChannel.from_weights(args.weights, depth=args.depth)

        host = SystemInfo()
        aggregates: Dict[str, MetricsReport] = {}
        for method in methods:
            parity = (DEFAULT_PARITY if method == "gan" else 0) if args.parity is None else args.parity
            reports: List[MetricsReport] = []
            failures = 0
            with console.status(f"[yellow]Benchmarking {method} on {len(paths)} image(s)...", spinner="dots"):
                for index, path in enumerate(paths):
                    data = self._random_text(args.seed, index, args.message_bytes)
                    try:
                        cover = ImageBuffer.load(path)
                        if method == "lsb":
                            reports.append(self._bench_lsb(cover, data, parity))
                        else:
                            reports.append(self._bench_gan(channel, cover, data, parity))
                    except (GanashError, OSError) as e:
                        failures += 1
                        console.print(f"[yellow]{method}: {path.name} excluded ({e})[/yellow]")
            if failures:
                console.print(f"[yellow]{method}: {failures} of {len(paths)} image(s) excluded[/yellow]")
            if reports:
                aggregates[method] = mean_report(reports)
            else:
                console.print(f"[red]✗ {method}: no image succeeded[/red]")

        self.renderer.render_section_divider("Bench")
        self.renderer.render_table(host.table())
        if aggregates:
            self.renderer.render_reports(aggregates, title=f"Mean over {len(paths)} cover(s)")
            if args.csv:
                write_reports_csv(args.csv, aggregates, comment=host.get_context_string())
                console.print(f"[green]✓[/green] Bench rows written to {args.csv}")
        return EXIT_OK

    # inventories

    def cmd_models(self, args) -> int:
        directory = Path(args.weights_dir)
        if not directory.is_dir():
            raise ValidationError(f"WEIGHTS_DIR: directory not found: {directory}")
        manager = ModelManager(directory)
        self.renderer.render_table(manager.list_models())
        depth = manager.data_depth()
        if depth is not None:
            console.print(f"[dim]Encoder/decoder data depth: D={depth}[/dim]")
        return EXIT_OK

    def cmd_presets(self, args) -> int:
        manager = PresetManager()
        self.renderer.render_table(manager.list_table())
        categories = manager.get_presets_by_category()
        categories_text = " | ".join(f"[cyan]{cat}[/cyan] ({len(names)})" for cat, names in categories.items())
        console.print(f"\n[dim]Categories: {categories_text}[/dim]")
        return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    return StegoShell().run(argv)
