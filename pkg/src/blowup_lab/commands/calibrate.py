import sys
from pathlib import Path
from typing import Any, Dict, Optional

import click

from blowup_lab.core.calibration import (
    SamplingPlan,
    bti_bound_violations,
    calibrate_bti_constant,
    calibrate_gaussian_constant,
)
from blowup_lab.core.errors import BlowupLabError
from blowup_lab.core.geometry import Domain
from blowup_lab.core.kernel import KernelEvaluator
from blowup_lab.core.schedule_constants import exponents
from blowup_lab.enums.config_key import ConfigKey
from blowup_lab.enums.exit_code import ExitCode
from blowup_lab.enums.geometry_kind import DomainKind
from blowup_lab.enums.run_status import ConstantsMode
from blowup_lab.utils.config_utils import get_seed, load_config, write_config_value
from blowup_lab.utils.console_utils import console, display_error, key_value_table, loading_spinner
from blowup_lab.utils.report_utils import prepare_directory, run_directory, write_report


def _resolve_alpha(alpha: Optional[float], mode: Optional[str], beta: Optional[float], n: int) -> float:
    if alpha is not None:
        return alpha
    if mode is None or beta is None:
        raise click.UsageError("需要 --alpha，或同時給 --mode 與 --beta 由常數管線推得 α")
    return exponents(ConstantsMode(mode), n, beta)[0]


@click.command()
@click.option(
    "--domain",
    "domain_kind",
    type=click.Choice([DomainKind.BOX2D.value, DomainKind.BOX3D.value]),
    default=DomainKind.BOX2D.value,
    help="Box domain kind (unit side lengths)",
)
@click.option("--alpha", type=float, default=None, help="Exponent alpha of the boundary-time integral bound")
@click.option(
    "--mode", type=click.Choice([m.value for m in ConstantsMode]), default=None, help="Derive alpha from this mode"
)
@click.option("--beta", type=float, default=None, help="Decay exponent used with --mode")
@click.option("--refined", is_flag=True, help="Use the refined sampling plan")
@click.option("--held-out/--no-held-out", default=True, help="Verify the constant on a disjoint sample set")
@click.option("--gaussian", is_flag=True, help="Also estimate the Gaussian domination constant")
@click.option("--seed", type=int, default=None, help="Random seed (default from config)")
@click.option("--save", is_flag=True, help="Store C_hat in the project config file")
@click.option("--output", "output_root", type=click.Path(path_type=Path), default=None, help="Output root directory")
@click.option("--yes", "-y", "assume_yes", is_flag=True, help="Overwrite an existing run directory without asking")
def calibrate(
    domain_kind: str,
    alpha: Optional[float],
    mode: Optional[str],
    beta: Optional[float],
    refined: bool,
    held_out: bool,
    gaussian: bool,
    seed: Optional[int],
    save: bool,
    output_root: Optional[Path],
    assume_yes: bool,
) -> None:
    """校準邊界-時間積分估計式的常數 C_hat"""
    load_config()
    seed = get_seed() if seed is None else seed

    try:
        domain = Domain.box2d() if domain_kind == DomainKind.BOX2D.value else Domain.box3d()
        value = _resolve_alpha(alpha, mode, beta, domain.n)
        evaluator = KernelEvaluator(domain)
        plan = SamplingPlan.default(seed)
        if refined:
            plan = plan.refined()

        with loading_spinner(f"校準 C_hat（α = {value:.6g}）..."):
            result = calibrate_bti_constant(evaluator, value, plan)
        report: Dict[str, Any] = {"domain": domain.kind.value, "seed": seed, "bti": result.as_dict()}
        rows: Dict[str, Any] = {"alpha": value, "C_hat": result.C_hat, "samples": result.sample_count}

        if held_out:
            with loading_spinner("在驗證集合上檢查..."):
                violations = bti_bound_violations(evaluator, value, result.C_hat, SamplingPlan.held_out(seed + 1))
            report["held_out_violations"] = violations
            rows["held-out violations"] = len(violations)

        if gaussian:
            with loading_spinner("估計 Gaussian 控制常數..."):
                dominance = calibrate_gaussian_constant(evaluator, seed=seed)
            report["gaussian"] = dominance.as_dict()
            rows["gaussian C"] = dominance.C_hat

        console.print(key_value_table("calibration", rows))

        directory = run_directory(f"calibrate-{domain.kind.value}-alpha{value:.6g}", output_root)
        if not prepare_directory(directory, assume_yes):
            console.print("[yellow] 操作已取消 [/yellow]")
            sys.exit(ExitCode.CANCEL)
        write_report(directory, report)

        if save:
            path = write_config_value(ConfigKey.C_HAT, repr(result.C_hat))
            console.print(f"[green]✓[/green] {ConfigKey.C_HAT.value} 已寫入 {path}")
    except BlowupLabError as e:
        display_error(e)
        sys.exit(ExitCode.ERROR)

    if held_out and report["held_out_violations"]:
        console.print("[red]✗[/red] 驗證集合上有違反估計式的取樣")
        sys.exit(ExitCode.ACCEPTANCE_FAILED)
    console.print(f"[green]✓[/green] 結果已寫入 {directory}")
