import sys
import warnings
from pathlib import Path
from typing import Optional, Tuple

import click

from blowup_lab.core.errors import BlowupLabError
from blowup_lab.core.solver import run
from blowup_lab.enums.exit_code import ExitCode
from blowup_lab.utils.config_utils import load_config
from blowup_lab.utils.console_utils import (
    console,
    display_constants,
    display_error,
    display_run_summary,
    loading_spinner,
)
from blowup_lab.utils.report_utils import (
    prepare_directory,
    run_directory,
    write_report,
    write_snapshot,
    write_trace,
)
from blowup_lab.utils.scenario_utils import (
    load_scenario,
    override,
    parse_assignments,
    prepare_run,
    serialize_scenario,
)


@click.command()
@click.option("--scenario", "scenario_name", required=True, help="Built-in scenario name or path to a .cfg file")
@click.option("--set", "assignments", multiple=True, help="Override a scenario key, e.g. --set solver.q=3")
@click.option("--chat", "c_hat", type=float, default=None, help="Calibrated constant C_hat for global/capped schedules")
@click.option("--output", "output_root", type=click.Path(path_type=Path), default=None, help="Output root directory")
@click.option("--yes", "-y", "assume_yes", is_flag=True, help="Overwrite an existing run directory without asking")
def simulate(
    scenario_name: str,
    assignments: Tuple[str, ...],
    c_hat: Optional[float],
    output_root: Optional[Path],
    assume_yes: bool,
) -> None:
    """依情境執行一次模擬，輸出 report.yaml、trace.csv 與 config.snapshot"""
    load_config()

    try:
        scenario = override(load_scenario(scenario_name), parse_assignments(assignments))
        with loading_spinner("準備排程與常數..."):
            prepared = prepare_run(scenario, c_hat)
        if prepared.constants is not None:
            display_constants(prepared.constants)

        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            with loading_spinner(f"模擬 {scenario.name}（horizon = {prepared.horizon:.6g}）..."):
                report = run(
                    prepared.u0,
                    prepared.schedule,
                    prepared.config,
                    prepared.horizon,
                    constants=prepared.constants.as_dict() if prepared.constants else None,
                )
        for message in dict.fromkeys(str(warning.message) for warning in caught):
            console.print(f"[yellow] {message}[/yellow]")

        directory = run_directory(scenario.name, output_root)
        if not prepare_directory(directory, assume_yes):
            console.print("[yellow] 操作已取消 [/yellow]")
            sys.exit(ExitCode.CANCEL)

        if "report" in scenario.outputs:
            write_report(
                directory,
                {
                    "scenario": scenario.name,
                    "horizon": prepared.horizon,
                    "C_hat_source": prepared.c_hat_source,
                    "run": report.as_dict(),
                },
            )
        if "trace" in scenario.outputs:
            write_trace(directory, report.trace_frame())
        if "snapshot" in scenario.outputs:
            write_snapshot(directory, serialize_scenario(scenario))

        display_run_summary(report, title=scenario.name)
        console.print(f"[green]✓[/green] 結果已寫入 {directory}")
    except BlowupLabError as e:
        display_error(e)
        sys.exit(ExitCode.ERROR)
    except KeyboardInterrupt:
        console.print("\n[yellow] 操作已取消 [/yellow]")
        sys.exit(ExitCode.CANCEL)
