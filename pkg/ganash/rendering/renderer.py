"""
Console rendering of reports, inventories and results
"""

from typing import Dict, Iterable, Optional

from rich.console import Console
from rich.panel import Panel
from rich.rule import Rule
from rich.table import Table

from ..metrics.report import MetricsReport, report_table

console = Console()


class ResponseRenderer:
    """Handles rendering command results as rich panels and tables"""

    @staticmethod
    def render_result(content: str, title: str = "Result", border_style: str = "green") -> None:
        console.print(Panel(content, title=f"[bold]{title}[/bold]", border_style=border_style))

    @staticmethod
    def render_error(message: str, title: str = "Error") -> None:
        console.print(Panel(f"[red]✗ {message}[/red]", title=f"[bold]{title}[/bold]", border_style="red"))

    @staticmethod
    def render_table(table: Table) -> None:
        console.print(table)

    @staticmethod
    def render_reports(reports: Dict[str, MetricsReport], title: str = "Quantitative result") -> None:
        console.print(report_table(reports, title))

    @staticmethod
    def render_losses(rows: Iterable, limit: int = 10) -> None:
        """Last ``limit`` loss-log rows"""
        rows = list(rows)[-limit:]
        table = Table(title="Training losses")
        for column in ("step", "l_enc", "l_dec", "l_critic", "l_T"):
            table.add_column(column, justify="right", style="cyan" if column == "step" else None)
        for row in rows:
            table.add_row(str(row.step), *(f"{v:.6g}" for v in (row.l_enc, row.l_dec, row.l_critic, row.l_T)))
        console.print(table)

    @staticmethod
    def render_section_divider(text: Optional[str] = None) -> None:
        """Render a section divider"""
        if text:
            console.print(Rule(f"[bold cyan]{text}[/bold cyan]"))
        else:
            console.print(Rule())
