#!/usr/bin/env python3
"""
GANash - Main entry point
"""

import sys
from pathlib import Path

from rich.console import Console

# Add the current directory to Python path so we can import ganash
current_dir = Path(__file__).parent.resolve()
sys.path.insert(0, str(current_dir))

console = Console()


def main() -> int:
    """Entry point"""
    try:
        # Import here to avoid import issues
        from ganash.core.shell import StegoShell

        return StegoShell().run(sys.argv[1:])
    except KeyboardInterrupt:
        console.print("\n[yellow]Interrupted[/yellow]")
        return 130
    except ImportError as e:
        console.print(f"[red]Import error: {e}[/red]")
        console.print("[yellow]Make sure all dependencies are installed:[/yellow]")
        console.print("pip install -r requirements.txt")
        console.print(f"[yellow]Current directory: {current_dir}[/yellow]")

        package_dir = current_dir / "ganash"
        if package_dir.exists():
            console.print(f"[green]✓ ganash directory found at: {package_dir}[/green]")
        else:
            console.print(f"[red]✗ ganash directory not found at: {package_dir}[/red]")
        return 1


if __name__ == "__main__":
    sys.exit(main())
