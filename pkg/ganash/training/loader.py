"""
Parallel image ingestion with a bounded prefetch buffer
"""

import queue
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, List, Optional, Sequence, Set, Tuple, Union

import numpy as np
from PIL import Image, UnidentifiedImageError
from rich.console import Console

from ..engine import Tensor4
from ..errors import DataError, ValidationError
from ..utils.images import ImageBuffer, stack_images

console = Console()

IMAGE_PATTERNS = ("*.png", "*.PNG", "*.jpg", "*.jpeg", "*.bmp")

_DONE = object()


@dataclass
class LoaderStats:
    """Instrumentation shared between the producer and the consumer"""

    resident: int = 0
    peak_resident: int = 0
    batches: int = 0
    skipped: List[str] = field(default_factory=list)
    broken: Set[str] = field(default_factory=set)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def acquire(self):
        with self._lock:
            self.resident += 1
            self.peak_resident = max(self.peak_resident, self.resident)

    def release(self):
        with self._lock:
            self.resident -= 1

    def mark_broken(self, path: Path) -> bool:
        """Record a path whose pixels failed to decode; False if it was already known"""
        with self._lock:
            if str(path) in self.broken:
                return False
            self.broken.add(str(path))
            self.skipped.append(str(path))
            return True

    def is_broken(self, path: Path) -> bool:
        with self._lock:
            return str(path) in self.broken


@dataclass
class BatchSource:
    """Image paths plus the shuffling and parallelism settings of the pipeline"""

    paths: Sequence[Path]
    seed: int = 0
    coworkers: int = 4
    buffer: int = 8
    batch_size: int = 4

    def __post_init__(self):
        self.paths = [Path(p) for p in self.paths]
        if len(set(self.paths)) != len(self.paths):
            raise ValidationError("BatchSource paths must be unique")
        for name in ("coworkers", "buffer", "batch_size"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be at least 1, got {getattr(self, name)}")

    @classmethod
    def from_directory(cls, directory: Union[str, Path], **settings) -> "BatchSource":
        directory = Path(directory)
        if not directory.is_dir():
            raise DataError(f"Image directory not found: {directory}")
        paths = sorted({p for pattern in IMAGE_PATTERNS for p in directory.glob(pattern)})
        if not paths:
            raise DataError(f"No images found in {directory}")
        return cls(paths, **settings)

    def usable_paths(self, crop: Tuple[int, int], stats: Optional[LoaderStats] = None) -> List[Path]:
        """Paths whose header decodes and whose size covers ``crop``; the rest are skipped with a warning"""
        crop_h, crop_w = crop
        usable = []
        for path in self.paths:
            try:
                with Image.open(path) as image:
                    width, height = image.size
            except (OSError, UnidentifiedImageError) as e:
                self._skip(path, f"unreadable ({e})", stats)
                continue
            if height < crop_h or width < crop_w:
                self._skip(path, f"{width}x{height} is smaller than the {crop_w}x{crop_h} crop", stats)
                continue
            usable.append(path)
        if not usable:
            raise DataError(f"None of the {len(self.paths)} images can be used for {crop_h}x{crop_w} crops")
        return usable

    @staticmethod
    def _skip(path: Path, reason: str, stats: Optional[LoaderStats]):
        console.print(f"[yellow]Skipping {path.name}: {reason}[/yellow]")
        if stats is not None:
            stats.skipped.append(str(path))

    def batches_per_epoch(self, image_count: int) -> int:
        return -(-image_count // self.batch_size)


def _crop_image(
    path: Path, crop: Tuple[int, int], seed: Sequence[int], stats: LoaderStats
) -> Optional[ImageBuffer]:
    if stats.is_broken(path):
        return None
    try:
        image = ImageBuffer.load(path)
    except (OSError, ValueError, SyntaxError) as e:
        if stats.mark_broken(path):
            console.print(f"[yellow]Skipping {path.name}: decode failed ({e})[/yellow]")
        return None
    crop_h, crop_w = crop
    rng = np.random.default_rng(seed)
    top = int(rng.integers(0, image.height - crop_h + 1))
    left = int(rng.integers(0, image.width - crop_w + 1))
    return image.crop(top, left, crop_h, crop_w)


def _batch_plan(src: BatchSource, count: int, epochs: Optional[int], start_batch: int):
    """(epoch, image indices) per batch in consumption order"""
    per_epoch = src.batches_per_epoch(count)
    epoch, offset = divmod(start_batch, per_epoch)
    while epochs is None or epoch < epochs:
        order = np.random.default_rng([src.seed, epoch]).permutation(count)
        for b in range(offset, per_epoch):
            yield epoch, order[b * src.batch_size:(b + 1) * src.batch_size]
        offset = 0
        epoch += 1


def load_batches(
    src: BatchSource,
    crop: Tuple[int, int],
    epochs: Optional[int] = 1,
    start_batch: int = 0,
    stats: Optional[LoaderStats] = None,
) -> Iterator[Tensor4]:
    """Yield B x H x W x 3 batches in [-1, 1], decoded and cropped by ``src.coworkers`` threads.

    The batch sequence depends only on ``src.seed`` (shuffle per epoch,
    crop offsets per image and epoch), never on worker timing. At most
    ``src.buffer + 1`` decoded batches are resident at once, counting the
    one the caller holds. ``epochs=None`` streams forever.
    """
    stats = stats if stats is not None else LoaderStats()
    paths = src.usable_paths(crop, stats)
    slots = threading.Semaphore(src.buffer + 1)
    ready: "queue.Queue" = queue.Queue(maxsize=src.buffer)
    stop = threading.Event()

    def put(item) -> bool:
        while not stop.is_set():
            try:
                ready.put(item, timeout=0.05)
                return True
            except queue.Full:
                continue
        return False

    def produce():
        try:
            with ThreadPoolExecutor(max_workers=src.coworkers, thread_name_prefix="ganash-loader") as pool:
                for epoch, indices in _batch_plan(src, len(paths), epochs, start_batch):
                    while not slots.acquire(timeout=0.05):
                        if stop.is_set():
                            return
                    if stop.is_set():
                        return
                    stats.acquire()
                    images = list(pool.map(
                        lambda i: _crop_image(paths[i], crop, [src.seed, epoch, int(i)], stats),
                        indices,
                    ))
                    images = [image for image in images if image is not None]
                    if not images:
                        stats.release()
                        slots.release()
                        if all(stats.is_broken(path) for path in paths):
                            raise DataError(f"All {len(paths)} usable images failed to decode")
                        continue
                    if not put(stack_images(images)):
                        return
            put(_DONE)
        except BaseException as e:
            put(e)

    producer = threading.Thread(target=produce, name="ganash-batches", daemon=True)
    producer.start()
    holding = False
    try:
        while True:
            item = ready.get()
            if holding:
                stats.release()
                slots.release()
                holding = False
            if item is _DONE:
                return
            if isinstance(item, BaseException):
                raise item
            holding = True
            stats.batches += 1
            yield item
    finally:
        stop.set()
        producer.join()
