"""
Preset management for bundled and user YAML training configurations
"""

from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml
from rich.console import Console
from rich.table import Table

from ..errors import ValidationError
from ..training.config import TrainConfig

console = Console()

BUNDLED_DIR = Path(__file__).parent


class PresetManager:
    """Loads named training presets from YAML files"""

    def __init__(self, presets_dir: Optional[Union[str, Path]] = None, verbose: bool = False):
        self.presets_dir = Path(presets_dir) if presets_dir is not None else BUNDLED_DIR
        self.verbose = verbose
        self.presets: Dict[str, Dict[str, Any]] = {}
        self._load_presets()

    def _load_presets(self):
        """Load all YAML preset files"""
        for preset_file in sorted(self.presets_dir.glob("*.y*ml")):
            try:
                with open(preset_file, 'r') as f:
                    preset_data = yaml.safe_load(f)
                if not self.validate_preset(preset_data):
                    console.print(f"[red]✗[/red] {preset_file.name} has no 'config' mapping")
                    continue
                self.presets[preset_file.stem] = preset_data
                if self.verbose:
                    console.print(f"[green]✓[/green] Loaded preset: {preset_file.stem}")
            except (OSError, yaml.YAMLError) as e:
                console.print(f"[red]✗[/red] Failed to load {preset_file}: {e}")

    def get_preset(self, name: str) -> Optional[Dict[str, Any]]:
        return self.presets.get(name)

    def list_presets(self) -> List[str]:
        return list(self.presets.keys())

    def get_config(self, name: str) -> TrainConfig:
        """TrainConfig built from the preset's ``config`` mapping"""
        preset = self.get_preset(name)
        if preset is None:
            available = ", ".join(self.list_presets()) or "none"
            raise ValidationError(f"Unknown preset '{name}' (available: {available})")
        return TrainConfig.from_dict(preset["config"])

    def get_presets_by_category(self) -> Dict[str, List[str]]:
        categories: Dict[str, List[str]] = {}
        for name, preset in self.presets.items():
            categories.setdefault(preset.get('category', 'general'), []).append(name)
        return categories

    @staticmethod
    def validate_preset(preset_data: Any) -> bool:
        return isinstance(preset_data, dict) and isinstance(preset_data.get('config'), dict)

    def list_table(self) -> Table:
        table = Table(title="Training presets")
        table.add_column("Preset", style="cyan", no_wrap=True)
        table.add_column("Category", style="magenta")
        table.add_column("D", justify="right", style="yellow")
        table.add_column("Steps", justify="right", style="green")
        table.add_column("Description", style="white")
        for name, preset in self.presets.items():
            config = preset['config']
            table.add_row(
                name,
                preset.get('category', 'general'),
                str(config.get('data_depth', TrainConfig.data_depth)),
                str(config.get('steps', TrainConfig.steps)),
                preset.get('description', 'No description'),
            )
        return table
