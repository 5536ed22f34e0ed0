import sys
from pathlib import Path
from typing import Any, Dict, Optional

import click

from blowup_lab.core.calibration import calibrate_bti_constant
from blowup_lab.core.errors import BlowupLabError
from blowup_lab.core.geometry import Domain
from blowup_lab.core.kernel import KernelEvaluator
from blowup_lab.core.schedule_constants import (
    build_constants,
    divergence_check,
    exponents,
    verify_schedule_end_behavior,
)
from blowup_lab.enums.exit_code import ExitCode
from blowup_lab.enums.run_status import ConstantsMode
from blowup_lab.utils.config_utils import get_c_hat, load_config
from blowup_lab.utils.console_utils import (
    console,
    display_constants,
    display_error,
    display_rows,
    key_value_table,
    loading_spinner,
)
from blowup_lab.utils.report_utils import prepare_directory, run_directory, write_report


def _c_hat_for(mode: ConstantsMode, n: int, beta: float, alpha: Optional[float]) -> float:
    """未指定 C_hat 時：先讀設定，再以單位長方體即時校準"""
    configured = get_c_hat()
    if configured is not None:
        return configured
    domain = Domain.box2d() if n == 2 else Domain.box3d()
    value = exponents(mode, n, beta, alpha)[0]
    with loading_spinner(f"校準 C_hat（α = {value:.6g}）..."):
        return calibrate_bti_constant(KernelEvaluator(domain), value).C_hat


@click.command()
@click.option("--mode", type=click.Choice([m.value for m in ConstantsMode]), required=True, help="Constants mode")
@click.option("--n", "n", type=click.IntRange(2, 3), default=2, help="Spatial dimension")
@click.option("--q", "q", type=float, default=2.0, help="Nonlinearity exponent q > 1")
@click.option("--beta", type=float, required=True, help="Decay exponent beta > n-1")
@click.option("--M0", "M0", type=float, default=1.0, help="Initial maximum M0")
@click.option("--gamma1", type=float, required=True, help="Initial radiating area |Gamma_1|")
@click.option("--B", "B", type=float, default=None, help="Temperature cap (capped mode)")
@click.option("--chat", "c_hat", type=float, default=None, help="Calibrated constant C_hat")
@click.option("--alpha", type=float, default=None, help="Override the default alpha")
@click.option("--milestones", "k_max", type=int, default=0, help="Print the first K milestones")
@click.option("--end-behavior", is_flag=True, help="Sweep B/M0 and check the end behavior of C_B*")
@click.option("--divergence", is_flag=True, help="Check that the kappa sequence grows between 1e3 and 1e6")
@click.option("--output", "output_root", type=click.Path(path_type=Path), default=None, help="Write report.yaml here")
@click.option("--yes", "-y", "assume_yes", is_flag=True, help="Overwrite an existing run directory without asking")
def schedule(
    mode: str,
    n: int,
    q: float,
    beta: float,
    M0: float,  # noqa: N803
    gamma1: float,
    B: Optional[float],  # noqa: N803
    c_hat: Optional[float],
    alpha: Optional[float],
    k_max: int,
    end_behavior: bool,
    divergence: bool,
    output_root: Optional[Path],
    assume_yes: bool,
) -> None:
    """計算防止爆破（global）或溫度上限（capped）排程的常數"""
    load_config()

    try:
        constants_mode = ConstantsMode(mode)
        if c_hat is None:
            c_hat = _c_hat_for(constants_mode, n, beta, alpha)
        constants = build_constants(constants_mode, n, q, beta, M0, gamma1, c_hat, B=B, alpha_override=alpha)
        display_constants(constants)
        report: Dict[str, Any] = {"constants": constants.as_dict()}
        passed = True

        if k_max > 0:
            sequence = constants.milestones(k_max)
            rows = [{"k": k, "M_k": sequence[k]} for k in range(k_max + 1)]
            display_rows("milestones", rows)
            report["milestones"] = {**sequence.as_dict(), "values": sequence.values}

        if end_behavior:
            with loading_spinner("掃描 B/M₀..."):
                ends = verify_schedule_end_behavior(n, q, beta, M0, gamma1, c_hat)
            shown = {k: v for k, v in ends.as_dict().items() if k not in ("ratios", "log_C_star")}
            console.print(key_value_table("end behavior of C_B*", shown))
            report["end_behavior"] = ends.as_dict()
            passed = passed and ends.passed

        if divergence:
            check = divergence_check(constants_mode, n, q, beta, alpha_override=alpha)
            console.print(key_value_table("kappa sequence", check.as_dict()))
            report["divergence"] = check.as_dict()
            passed = passed and check.eventually_increasing

        if output_root is not None:
            directory = run_directory(f"schedule-{mode}-n{n}-beta{beta:g}", output_root)
            if not prepare_directory(directory, assume_yes):
                console.print("[yellow] 操作已取消 [/yellow]")
                sys.exit(ExitCode.CANCEL)
            write_report(directory, report)
            console.print(f"[green]✓[/green] 結果已寫入 {directory}")
    except BlowupLabError as e:
        display_error(e)
        sys.exit(ExitCode.ERROR)

    if not passed:
        console.print("[red]✗[/red] 常數的端點行為檢查未通過")
        sys.exit(ExitCode.ACCEPTANCE_FAILED)
