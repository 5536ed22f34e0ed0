from contextlib import contextmanager
from typing import TYPE_CHECKING, Any, Dict, Iterable, Iterator, Optional

from rich.console import Console
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table
from rich.text import Text

if TYPE_CHECKING:
    from blowup_lab.core.schedule_constants import ScheduleConstants
    from blowup_lab.core.solver import RunReport
    from blowup_lab.utils.acceptance import AcceptanceReport

console = Console()


@contextmanager
def loading_spinner(description: str = "計算中") -> Iterator[None]:
    """
    創建一個方便使用的進度動畫上下文管理器。

    Args:
        description (str): 要顯示的描述文字

    Examples:
        with loading_spinner("正在校準常數"):
            calibrate()
    """
    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        console=console,
        transient=True,  # 完成後自動移除進度顯示
    ) as progress:
        task = progress.add_task(description, total=None)
        try:
            yield None
        finally:
            progress.update(task, completed=True)


def format_value(value: Any) -> str:
    """數值以 10 位有效數字顯示，其他型別直接轉字串"""
    if isinstance(value, bool) or value is None:
        return str(value)
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def key_value_table(title: str, rows: Dict[str, Any]) -> Table:
    table = Table(title=title, show_header=True, header_style="bold cyan")
    table.add_column("key", style="cyan")
    table.add_column("value", justify="right")
    for key, value in rows.items():
        table.add_row(key, format_value(value))
    return table


def display_constants(constants: "ScheduleConstants") -> None:
    """以表格顯示排程常數"""
    rows = {k: v for k, v in constants.as_dict().items() if k != "notes"}
    console.print(key_value_table(f"ScheduleConstants ({constants.mode.value})", rows))
    for note in constants.notes:
        console.print(f"[yellow] {note}[/yellow]")


def display_run_summary(report: "RunReport", title: Optional[str] = None) -> None:
    """以面板顯示一次模擬的結論"""
    color = "red" if report.verdict.value == "blowup" else "green"
    lines = [
        Text(f"verdict: {report.verdict.value}", style=f"bold {color}"),
        Text(f"final time: {format_value(report.final_time)}"),
        Text(f"M(final): {format_value(float(report.M[-1]))}  (M0 = {format_value(report.M0)})"),
        Text(f"steps: {report.accepted_steps} accepted / {report.rejected_steps} rejected"),
    ]
    if report.T_star_estimate is not None:
        lines.append(Text(f"T* estimate: {format_value(report.T_star_estimate)}"))
    if report.T_star_extrapolated is not None:
        lines.append(Text(f"T* extrapolated: {format_value(report.T_star_extrapolated)}"))
    body = Text("\n").join(lines)
    console.print(Panel(body, title=title or "RunReport", border_style=color, expand=False))


def display_acceptance(report: "AcceptanceReport") -> None:
    """以表格顯示驗收結果"""
    table = Table(title=f"Acceptance ({report.suite.value}, {report.scale.value})", header_style="bold cyan")
    table.add_column("#", justify="right")
    table.add_column("criterion")
    table.add_column("result")
    table.add_column("measured")
    table.add_column("seconds", justify="right")
    for entry in report.entries:
        mark = "[green]✓ pass[/green]" if entry.passed else "[red]✗ fail[/red]"
        measured = ", ".join(f"{k}={format_value(v)}" for k, v in entry.measured.items())
        table.add_row(str(entry.number), entry.name, mark, measured, f"{entry.seconds:.1f}")
    console.print(table)


def display_rows(title: str, rows: Iterable[Dict[str, Any]]) -> None:
    """顯示一組欄位相同的資料列"""
    rows = list(rows)
    table = Table(title=title, header_style="bold cyan")
    if not rows:
        console.print(table)
        return
    for column in rows[0]:
        table.add_column(column)
    for row in rows:
        table.add_row(*[format_value(row.get(column)) for column in rows[0]])
    console.print(table)


def display_error(error: Exception) -> None:
    """以模組錯誤名稱回報例外"""
    name = getattr(error, "error_name", type(error).__name__)
    console.print(f"[red] 錯誤：{name}: {error}[/red]")
