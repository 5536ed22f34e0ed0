import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import click

from blowup_lab.core.errors import BlowupLabError
from blowup_lab.core.seqlab import (
    builtin_sequences,
    elementary_bound_check,
    reciprocal_recursion_check,
    running_min_jLambda,
    sharpness_scan,
)
from blowup_lab.enums.exit_code import ExitCode
from blowup_lab.utils.console_utils import console, display_error, display_rows, key_value_table, loading_spinner
from blowup_lab.utils.report_utils import prepare_directory, run_directory, write_csv, write_report

J_SMALL = 1000


@click.command("sequence-check")
@click.option("--J", "J", type=click.IntRange(min=J_SMALL + 1), default=1_000_000, show_default=True, help="Trace length")
@click.option("--q", "q", type=float, default=2.0, show_default=True, help="Nonlinearity exponent q > 1")
@click.option("--eps", type=float, default=0.1, show_default=True, help="Exponent excess of the sharpness scan")
@click.option("--sharpness-J", "sharpness_J", type=float, default=1e12, show_default=True, help="Sharpness scan end")
@click.option("--recursion-eps", type=float, default=1e-3, show_default=True, help="Lower bound used by the recursion check")
@click.option("--output", "output_root", type=click.Path(path_type=Path), default=None, help="Output root directory")
@click.option("--yes", "-y", "assume_yes", is_flag=True, help="Overwrite an existing run directory without asking")
def sequence_check(
    J: int,  # noqa: N803
    q: float,
    eps: float,
    sharpness_J: float,  # noqa: N803
    recursion_eps: float,
    output_root: Optional[Path],
    assume_yes: bool,
) -> None:
    """內建數列的 jΛ_j 累積最小值軌跡、尖銳性探針與遞迴檢查，每個數列輸出一個 CSV"""
    try:
        directory = run_directory(f"sequence-check-J{J}", output_root)
        if not prepare_directory(directory, assume_yes):
            console.print("[yellow] 操作已取消 [/yellow]")
            sys.exit(ExitCode.CANCEL)

        rows: List[Dict[str, Any]] = []
        details: Dict[str, Any] = {}
        with loading_spinner(f"計算 j ≤ {J} 的軌跡..."):
            for spec in builtin_sequences(q):
                trace = running_min_jLambda(spec, J)
                trace.to_csv(directory / f"{spec.label}.csv")
                bound = elementary_bound_check(spec, min(J, 100_000))
                check = reciprocal_recursion_check(spec, recursion_eps, 1, min(J, 100_000))
                rows.append(
                    {
                        "sequence": spec.label,
                        f"min@{J_SMALL}": trace.min_at(J_SMALL),
                        f"min@{J}": trace.final_min,
                        "decreased": trace.log_min_at(J) < trace.log_min_at(J_SMALL),
                        "elementary bound": bound.passed,
                    }
                )
                details[spec.label] = {**trace.summary(), "recursion_check": check.as_dict()}
            sharpness = sharpness_scan(eps, sharpness_J, q)
        write_csv(directory / "sharpness.csv", sharpness.frame())

        display_rows(f"running min of jΛ_j (q = {q:g})", rows)
        console.print(key_value_table(f"sharpness j^(1+{eps:g})Λ_j", sharpness.summary()))
        passed = all(row["decreased"] for row in rows) and sharpness.eventually_increasing
        write_report(directory, {"passed": passed, "suite": rows, "sequences": details, "sharpness": sharpness.summary()})
    except BlowupLabError as e:
        display_error(e)
        sys.exit(ExitCode.ERROR)

    if not passed:
        console.print("[red]✗[/red] 數列檢查未通過")
        sys.exit(ExitCode.ACCEPTANCE_FAILED)
    console.print(f"[green]✓[/green] 結果已寫入 {directory}")
