import sys
from pathlib import Path
from typing import Optional, Tuple

import click

from blowup_lab.core.errors import BlowupLabError
from blowup_lab.core.project_config import ProjectInfo
from blowup_lab.enums.exit_code import ExitCode
from blowup_lab.utils.config_utils import get_workers, load_config
from blowup_lab.utils.console_utils import console, display_error, display_rows, key_value_table, loading_spinner
from blowup_lab.utils.report_utils import prepare_directory, run_directory, write_csv, write_report, write_snapshot
from blowup_lab.utils.scenario_utils import (
    SweepPlan,
    load_scenario,
    override,
    parse_assignments,
    serialize_scenario,
)
from blowup_lab.utils.sweep_runner import run_sweep


@click.command("lifespan-scan")
@click.option("--scenario", "scenario_name", required=True, help="Built-in scenario name or path to a .cfg file")
@click.option("--axis", default="schedule.gamma1", show_default=True, help="Scenario key to sweep")
@click.option("--values", "values", required=True, help="Comma-separated values, e.g. 0.4,0.2,0.1,0.05")
@click.option("--set", "assignments", multiple=True, help="Override a scenario key before sweeping")
@click.option("--parallel", "parallelism", type=int, default=None, help="Worker processes (default from config)")
@click.option("--levels", type=int, default=1, show_default=True, help="1, or >= 3 for extrapolated T* per point")
@click.option("--no-regression", is_flag=True, help="Skip the log-log power-law fit")
@click.option("--output", "output_root", type=click.Path(path_type=Path), default=None, help="Output root directory")
@click.option("--yes", "-y", "assume_yes", is_flag=True, help="Overwrite an existing run directory without asking")
def lifespan_scan(
    scenario_name: str,
    axis: str,
    values: str,
    assignments: Tuple[str, ...],
    parallelism: Optional[int],
    levels: int,
    no_regression: bool,
    output_root: Optional[Path],
    assume_yes: bool,
) -> None:
    """沿一個情境鍵掃描爆破時間 T*，輸出 scan.csv（param, T_star, uncertainty）"""
    load_config()

    try:
        base = override(load_scenario(scenario_name), parse_assignments(assignments))
        plan = SweepPlan(
            base=base,
            axis=axis,
            values=tuple(v.strip() for v in values.split(",") if v.strip()),
            parallelism=parallelism or get_workers(),
            levels=levels,
            regression=not no_regression,
        )
        with loading_spinner(f"掃描 {axis}（{len(plan.values)} 點，{plan.parallelism} 個程序）..."):
            result = run_sweep(plan)

        frame = result.frame()
        display_rows(f"lifespan-scan {axis}", frame.to_dict("records"))
        if result.fit is not None:
            console.print(key_value_table("power-law fit", result.fit.as_dict()))
        if result.plateau_value is not None:
            console.print(f"T*·(q−1) → {result.plateau_value:.6g}（穩定：{result.plateau_stable}）")
        if result.partial:
            console.print("[yellow] 部分掃描點失敗或沒有爆破，彙整結果為部分結果 [/yellow]")

        directory = run_directory(f"{base.name}-scan-{axis}", output_root)
        if not prepare_directory(directory, assume_yes):
            console.print("[yellow] 操作已取消 [/yellow]")
            sys.exit(ExitCode.CANCEL)
        write_csv(directory / ProjectInfo.SCAN_FILE, frame)
        write_report(directory, {"scenario": base.name, "levels": levels, **result.as_dict()})
        write_snapshot(directory, serialize_scenario(base))
        console.print(f"[green]✓[/green] 結果已寫入 {directory}")
    except BlowupLabError as e:
        display_error(e)
        sys.exit(ExitCode.ERROR)
