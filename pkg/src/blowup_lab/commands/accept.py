import sys
from pathlib import Path
from typing import Optional, Tuple

import click

from blowup_lab.enums.exit_code import ExitCode
from blowup_lab.enums.run_status import AcceptanceScale, AcceptanceSuite
from blowup_lab.utils.acceptance import AcceptanceEntry, accept as run_acceptance
from blowup_lab.utils.config_utils import get_seed, load_config
from blowup_lab.utils.console_utils import console, display_acceptance
from blowup_lab.utils.report_utils import prepare_directory, run_directory, write_report


def _announce(entry: AcceptanceEntry) -> None:
    mark = "[green]✓[/green]" if entry.passed else "[red]✗[/red]"
    console.print(f"{mark} #{entry.number} {entry.name}（{entry.seconds:.1f}s）")


@click.command()
@click.option(
    "--suite",
    type=click.Choice([s.value for s in AcceptanceSuite]),
    default=AcceptanceSuite.ALL.value,
    show_default=True,
    help="Acceptance suite",
)
@click.option(
    "--scale",
    type=click.Choice([s.value for s in AcceptanceScale]),
    default=AcceptanceScale.FULL.value,
    show_default=True,
    help="full: acceptance sizes, desk: reduced sizes",
)
@click.option("--only", "numbers", type=int, multiple=True, help="Run only these criterion numbers")
@click.option("--seed", type=int, default=None, help="Random seed (default from config)")
@click.option("--output", "output_root", type=click.Path(path_type=Path), default=None, help="Output root directory")
@click.option("--yes", "-y", "assume_yes", is_flag=True, help="Overwrite an existing run directory without asking")
def accept(
    suite: str,
    scale: str,
    numbers: Tuple[int, ...],
    seed: Optional[int],
    output_root: Optional[Path],
    assume_yes: bool,
) -> None:
    """執行驗收套件，結果寫入 report.yaml；有項目未通過時結束碼為 3"""
    load_config()
    seed = get_seed() if seed is None else seed

    directory = run_directory(f"accept-{suite}-{scale}", output_root)
    if not prepare_directory(directory, assume_yes):
        console.print("[yellow] 操作已取消 [/yellow]")
        sys.exit(ExitCode.CANCEL)

    console.print(f"[cyan] 驗收套件 {suite}（{scale}，seed = {seed}）[/cyan]")
    try:
        report = run_acceptance(
            AcceptanceSuite(suite), AcceptanceScale(scale), seed, list(numbers) or None, on_entry=_announce
        )
    except KeyboardInterrupt:
        console.print("\n[yellow] 操作已取消 [/yellow]")
        sys.exit(ExitCode.CANCEL)

    display_acceptance(report)
    write_report(directory, report.as_dict())
    console.print(f"結果已寫入 {directory}")
    if not report.passed:
        sys.exit(ExitCode.ACCEPTANCE_FAILED)
