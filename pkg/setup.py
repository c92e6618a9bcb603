#!/usr/bin/env python3
"""
Setup script to create sample covers and a desk-scale training config in the current directory
"""

import sys
from pathlib import Path

from rich.console import Console

sys.path.insert(0, str(Path(__file__).parent.resolve()))

from ganash.presets import PresetManager  # noqa: E402
from ganash.utils.samples import write_sample_set  # noqa: E402

console = Console()

COVER_COUNT = 8
COVER_SIZE = 64


def create_sample_data():
    """Write synthetic covers and a config that trains on them"""
    samples_dir = Path.cwd() / "samples"
    covers_dir = samples_dir / "covers"
    console.print(f"[cyan]Creating sample data in: {samples_dir}[/cyan]")

    paths = write_sample_set(covers_dir, COVER_COUNT, COVER_SIZE, COVER_SIZE, seed=0)
    for path in paths:
        console.print(f"[green]✓[/green] Created: {path.relative_to(Path.cwd())}")

    config = PresetManager().get_config("desk").with_overrides(
        image_dir=str(covers_dir),
        checkpoint_dir=str(samples_dir / "weights"),
    )
    config_path = samples_dir / "desk.yaml"
    config.save(config_path)
    console.print(f"[green]✓[/green] Created: {config_path.relative_to(Path.cwd())}")

    console.print(f"\n[green]Created {len(paths)} sample covers![/green]")
    console.print("\nYou can now run:")
    console.print(f"  ./ganash.sh train --config {config_path.relative_to(Path.cwd())}")
    console.print("  ./ganash.sh encode samples/covers/cover_000.png stego.png --weights samples/weights --text 'hello'")


if __name__ == "__main__":
    create_sample_data()
