"""
Trained weight inventory with architecture and compatibility checks
"""

from pathlib import Path
from typing import Dict, List, Optional, Union

from rich.console import Console
from rich.table import Table

from ..errors import FormatError, GanashError, ValidationError
from .networks import ARCHITECTURES, NetworkParams
from .weights import WEIGHT_SUFFIX, WeightHeader, load_params, read_header, save_params

console = Console()


class ModelManager:
    """Manages the critic/encoder/decoder weight files of one weights directory"""

    def __init__(self, weights_dir: Union[str, Path]):
        self.weights_dir = Path(weights_dir)
        self.headers: Dict[str, WeightHeader] = {}
        self.problems: Dict[str, str] = {}
        self._detect_weights()

    def path_for(self, arch: str) -> Path:
        return self.weights_dir / f"{arch}{WEIGHT_SUFFIX}"

    def _detect_weights(self):
        """Read the header of every weight file present"""
        self.headers.clear()
        self.problems.clear()
        if not self.weights_dir.is_dir():
            return
        for arch in ARCHITECTURES:
            path = self.path_for(arch)
            if not path.exists():
                continue
            try:
                header = read_header(path)
            except (GanashError, OSError) as e:
                self.problems[arch] = str(e)
                continue
            if header.arch != arch:
                self.problems[arch] = f"file holds a {header.arch} network"
                continue
            self.headers[arch] = header

    @property
    def available(self) -> List[str]:
        return list(self.headers)

    def data_depth(self) -> Optional[int]:
        """Shared D of the encoder/decoder pair, or None when neither is present"""
        depths = {h.data_depth for a, h in self.headers.items() if a in ("encoder", "decoder")}
        if len(depths) > 1:
            raise ValidationError(f"Encoder and decoder in {self.weights_dir} disagree on data depth: {sorted(depths)}")
        return depths.pop() if depths else None

    def load(self, arch: str, expected_depth: Optional[int] = None) -> NetworkParams:
        path = self.path_for(arch)
        if not path.exists():
            raise ValidationError(f"No {arch} weights in {self.weights_dir} (expected {path.name})")
        params = load_params(path, expected_arch=arch)
        if expected_depth is not None and params.data_depth != expected_depth:
            raise FormatError(f"{arch} weights were trained with D={params.data_depth}, requested D={expected_depth}")
        return params

    def save(self, params: NetworkParams) -> Path:
        path = save_params(params, self.path_for(params.arch))
        self._detect_weights()
        return path

    def list_models(self) -> Table:
        """Create a table of the weight files and their hyperparameters"""
        table = Table(title=f"Weights in {self.weights_dir}")
        table.add_column("Network", style="cyan", no_wrap=True)
        table.add_column("D", style="magenta", justify="right")
        table.add_column("Hidden", style="yellow", justify="right")
        table.add_column("Leaky alpha", style="green", justify="right")
        table.add_column("Tensors", justify="right")
        table.add_column("Size", style="white", justify="right")
        table.add_column("Status", justify="center")

        for arch in ARCHITECTURES:
            path = self.path_for(arch)
            header = self.headers.get(arch)
            if header is not None:
                table.add_row(
                    arch,
                    str(header.data_depth),
                    str(header.hidden_dims),
                    f"{header.leaky_alpha:g}",
                    str(header.record_count),
                    f"{path.stat().st_size / 1024:.1f} KiB",
                    "[green]ok[/green]",
                )
            elif arch in self.problems:
                table.add_row(arch, "-", "-", "-", "-", "-", f"[red]{self.problems[arch]}[/red]")
            else:
                table.add_row(arch, "-", "-", "-", "-", "-", "[dim]missing[/dim]")
        return table
