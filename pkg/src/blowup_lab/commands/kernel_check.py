import sys
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import click

from blowup_lab.core.errors import BlowupLabError
from blowup_lab.core.geometry import Domain, make_schedule
from blowup_lab.core.kernel import KernelEvaluator
from blowup_lab.core.kernel_checks import (
    boundary_flux,
    corner_multiplicity,
    heat_residual,
    images_vs_eigen,
    normalization_error,
    quadrature_cross_check,
    sample_boundary_points,
    sample_points,
    symmetry_error,
)
from blowup_lab.enums.exit_code import ExitCode
from blowup_lab.enums.geometry_kind import DomainKind
from blowup_lab.utils.config_utils import get_seed, load_config
from blowup_lab.utils.console_utils import console, display_error, display_rows, loading_spinner
from blowup_lab.utils.report_utils import prepare_directory, run_directory, write_report

NORMALIZATION_TIMES = (0.01, 0.1, 0.5, 1.0)


def _parse_lengths(text: str) -> Tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as e:
        raise click.BadParameter(f"lengths 必須是以逗號分隔的數字：{text}") from e


def run_kernel_checks(domain: Domain, points: int, boundary_samples: int, seed: int) -> List[Dict]:
    """對熱核做所有定義性質的檢查，每列為 (check, measured, threshold, passed)"""
    evaluator = KernelEvaluator(domain)
    x = sample_points(domain, points, seed)
    y = sample_points(domain, points, seed + 1)

    normalization = max(normalization_error(evaluator, p, t) for t in NORMALIZATION_TIMES for p in x)
    symmetry = max(symmetry_error(evaluator, x, y, t) for t in NORMALIZATION_TIMES)
    flux = max(
        abs(boundary_flux(evaluator, edge_id, point, y[0], t))
        for edge_id, point in sample_boundary_points(domain, boundary_samples, seed + 2)
        for t in (0.05, 0.5)
    )
    residual = max(heat_residual(evaluator, x[i], y[i], t) for i in range(min(points, 5)) for t in (0.05, 0.5))
    spectral = images_vs_eigen(domain.lengths[0], (0.01, 0.1, 1.0))
    corner = abs(corner_multiplicity(evaluator, 1e-4) / 2**domain.n - 1.0)
    arc = make_schedule(domain, 0.2 * domain.edge_measure(0)).gamma1_initial
    assert arc is not None
    cross = quadrature_cross_check(evaluator, arc, x[: min(points, 5)], 0.1)

    checks = [
        ("normalization", normalization, 1e-8),
        ("symmetry", symmetry, 1e-12),
        ("boundary flux", flux, 1e-5),
        ("heat residual", residual, 1e-4),
        ("images vs eigen", spectral, 1e-10),
        ("corner multiplicity", corner, 1e-3),
        ("quadrature cross-check", cross, 1e-8),
    ]
    return [
        {"check": name, "measured": float(value), "threshold": limit, "passed": bool(value <= limit)}
        for name, value, limit in checks
    ]


@click.command("kernel-check")
@click.option(
    "--domain",
    "domain_kind",
    type=click.Choice([DomainKind.BOX2D.value, DomainKind.BOX3D.value, DomainKind.DISK2D.value]),
    default=DomainKind.BOX2D.value,
    help="Domain kind",
)
@click.option("--lengths", default=None, help="Comma-separated side lengths, default 1 per axis")
@click.option("--points", type=int, default=20, help="Number of sampled interior points")
@click.option("--boundary-samples", type=int, default=100, help="Number of sampled boundary points")
@click.option("--seed", type=int, default=None, help="Random seed (default from config)")
@click.option("--output", "output_root", type=click.Path(path_type=Path), default=None, help="Output root directory")
@click.option("--yes", "-y", "assume_yes", is_flag=True, help="Overwrite an existing run directory without asking")
def kernel_check(
    domain_kind: str,
    lengths: Optional[str],
    points: int,
    boundary_samples: int,
    seed: Optional[int],
    output_root: Optional[Path],
    assume_yes: bool,
) -> None:
    """檢查 Neumann 熱核的正規化、對稱性、零通量與其他性質"""
    load_config()
    seed = get_seed() if seed is None else seed

    try:
        kind = DomainKind(domain_kind)
        if lengths is None:
            axis_count = {DomainKind.BOX2D: 2, DomainKind.BOX3D: 3, DomainKind.DISK2D: 0}[kind]
            sides: Tuple[float, ...] = (1.0,) * axis_count
        else:
            sides = _parse_lengths(lengths)
        domain = Domain(kind, sides)

        with loading_spinner("檢查熱核..."):
            rows = run_kernel_checks(domain, points, boundary_samples, seed)
        display_rows(f"kernel-check ({kind.value} {domain.lengths})", rows)

        directory = run_directory(f"kernel-check-{kind.value}", output_root)
        if not prepare_directory(directory, assume_yes):
            console.print("[yellow] 操作已取消 [/yellow]")
            sys.exit(ExitCode.CANCEL)
        passed = all(row["passed"] for row in rows)
        summary = {"domain": kind.value, "lengths": list(domain.lengths), "seed": seed, "passed": passed}
        write_report(directory, {**summary, "checks": rows})
    except BlowupLabError as e:
        display_error(e)
        sys.exit(ExitCode.ERROR)

    if not passed:
        failed = ", ".join(row["check"] for row in rows if not row["passed"])
        console.print(f"[red]✗[/red] 未通過：{failed}")
        sys.exit(ExitCode.ACCEPTANCE_FAILED)
    console.print(f"[green]✓[/green] 全部通過，結果已寫入 {directory}")

