"""驗收套件：每個項目回傳是否通過與量測值，錯誤也記成失敗的項目"""

import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from blowup_lab.core.calibration import (
    SamplingPlan,
    bti_bound_violations,
    calibrate_bti_constant,
    calibrate_gaussian_constant,
)
from blowup_lab.core.errors import BlowupLabError
from blowup_lab.core.geometry import Domain, make_schedule
from blowup_lab.core.initial_data import InitialData
from blowup_lab.core.kernel import KernelEvaluator
from blowup_lab.core.kernel_checks import (
    boundary_flux,
    normalization_error,
    sample_boundary_points,
    sample_points,
    symmetry_error,
)
from blowup_lab.core.representation import representation_solve
from blowup_lab.core.schedule_constants import (
    closed_form_exponents,
    exponents,
    verify_schedule_end_behavior,
)
from blowup_lab.core.seqlab import sharpness_scan, suite_check
from blowup_lab.core.series import g_s_log, log_lambda_B
from blowup_lab.core.solver import RunReport, SolverConfig, growth_rate_check, run
from blowup_lab.enums.default_value import DefaultValue
from blowup_lab.enums.geometry_kind import DomainKind
from blowup_lab.enums.run_status import (
    AcceptanceScale,
    AcceptanceSuite,
    ConstantsMode,
    ScheduleMode,
    Verdict,
)
from blowup_lab.utils.scenario_utils import (
    DomainSpec,
    InitialSpec,
    Scenario,
    ScheduleSpec,
    SolverSpec,
    SweepPlan,
    prepare_run,
)
from blowup_lab.utils.sweep_runner import run_sweep

# (mode, n, β) → (α, α̃, s)，手算的閉式值
HAND_DERIVED_EXPONENTS: Dict[Tuple[ConstantsMode, int, float], Tuple[float, float, float]] = {
    (ConstantsMode.GLOBAL, 2, 2.0): (0.75, 0.125, 0.0),
    (ConstantsMode.GLOBAL, 3, 3.0): (5.0 / 12.0, 1.0 / 12.0, 0.0),
    (ConstantsMode.GLOBAL, 3, 4.0): (0.375, 0.125, 0.0),
    (ConstantsMode.CAPPED, 2, 2.0): (0.875, 0.0625, 0.5),
    (ConstantsMode.CAPPED, 3, 3.0): (11.0 / 24.0, 1.0 / 24.0, 0.25),
    (ConstantsMode.CAPPED, 3, 4.0): (0.4375, 0.0625, 0.5),
}

SCALING_GAMMAS = ("0.4", "0.2", "0.1", "0.05")
SHARPNESS_J = 1e12


@dataclass(frozen=True)
class AcceptanceSizes:
    """各項驗收的規模；DESK 用於單元測試與快速檢查"""

    boundary_samples: int
    gaussian_points: int
    gaussian_times: int
    oracle_resolution: int
    oracle_panels: int
    oracle_steps: int
    oracle_tol: float
    solver_resolution: int
    solver_dt: float
    prevention_steps: int
    seq_J_large: int  # noqa: N815

    @classmethod
    def for_scale(cls, scale: AcceptanceScale) -> "AcceptanceSizes":
        if scale is AcceptanceScale.FULL:
            return cls(100, 50, 8, 128, 32, 50, 2e-3, 32, 5e-3, 2000, 1_000_000)
        return cls(40, 20, 4, 24, 12, 20, 2e-2, 12, 2e-2, 300, 100_000)


@dataclass
class AcceptanceEntry:
    number: int
    name: str
    suite: AcceptanceSuite
    passed: bool
    measured: Dict[str, Any] = field(default_factory=dict)
    seconds: float = 0.0

    def as_dict(self) -> Dict[str, Any]:
        return {
            "number": self.number,
            "name": self.name,
            "suite": self.suite.value,
            "passed": self.passed,
            "seconds": self.seconds,
            "measured": self.measured,
        }


@dataclass
class AcceptanceReport:
    suite: AcceptanceSuite
    scale: AcceptanceScale
    seed: int
    entries: List[AcceptanceEntry] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(entry.passed for entry in self.entries)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "suite": self.suite.value,
            "scale": self.scale.value,
            "seed": self.seed,
            "passed": self.passed,
            "entries": [entry.as_dict() for entry in self.entries],
        }


class AcceptanceContext:
    """驗收項目共用的昂貴中間結果（校準常數、爆破模擬）"""

    def __init__(self, scale: AcceptanceScale, seed: int) -> None:
        self.scale = scale
        self.seed = seed
        self.sizes = AcceptanceSizes.for_scale(scale)
        self.domain = Domain.box2d(1.0, 1.0)
        self.evaluator = KernelEvaluator(self.domain)
        self._c_hat: Dict[float, float] = {}
        self._blowup: Dict[float, RunReport] = {}

    def c_hat(self, alpha: float) -> float:
        if alpha not in self._c_hat:
            plan = SamplingPlan.default(self.seed).refined()
            self._c_hat[alpha] = calibrate_bti_constant(self.evaluator, alpha, plan).C_hat
        return self._c_hat[alpha]

    def solver_config(self, **overrides: Any) -> SolverConfig:
        options: Dict[str, Any] = {"q": 2.0, "resolution": self.sizes.solver_resolution, "dt_init": self.sizes.solver_dt}
        options.update(overrides)
        return SolverConfig(**options)

    def blowup_run(self, gamma1: float) -> RunReport:
        """u₀ ≡ 1、q = 2、固定 Γ₁ 的爆破模擬，horizon 為上界的 1.2 倍"""
        if gamma1 not in self._blowup:
            schedule = make_schedule(self.domain, gamma1)
            horizon = 1.2 / gamma1
            self._blowup[gamma1] = run(InitialData.constant(1.0), schedule, self.solver_config(), horizon)
        return self._blowup[gamma1]


# ---------------------------------------------------------------------------
# kernel
# ---------------------------------------------------------------------------


def _kernel_normalization(ctx: AcceptanceContext) -> Tuple[bool, Dict[str, Any]]:
    points = sample_points(ctx.domain, 20, ctx.seed)
    worst = max(
        normalization_error(ctx.evaluator, x, t) for t in (0.01, 0.1, 0.5, 1.0) for x in points
    )
    return worst <= 1e-8, {"max_error": worst}


def _kernel_symmetry_flux(ctx: AcceptanceContext) -> Tuple[bool, Dict[str, Any]]:
    x = sample_points(ctx.domain, 40, ctx.seed)
    y = sample_points(ctx.domain, 40, ctx.seed + 1)
    asymmetry = max(symmetry_error(ctx.evaluator, x, y, t) for t in (0.01, 0.1, 1.0))

    interior = sample_points(ctx.domain, 1, ctx.seed + 2)[0]
    flux = 0.0
    for edge_id, point in sample_boundary_points(ctx.domain, ctx.sizes.boundary_samples, ctx.seed + 3):
        for t in (0.05, 0.5):
            flux = max(flux, abs(boundary_flux(ctx.evaluator, edge_id, point, interior, t)))
    return asymmetry <= 1e-12 and flux <= 1e-5, {"max_asymmetry": asymmetry, "max_flux": flux}


def _gaussian_domination(ctx: AcceptanceContext) -> Tuple[bool, Dict[str, Any]]:
    size = ctx.sizes
    coarse = calibrate_gaussian_constant(ctx.evaluator, size.gaussian_points, size.gaussian_times, ctx.seed)
    fine = calibrate_gaussian_constant(ctx.evaluator, 2 * size.gaussian_points, 2 * size.gaussian_times, ctx.seed)
    drift = abs(fine.C_hat - coarse.C_hat) / coarse.C_hat
    passed = math.isfinite(coarse.C_hat) and drift <= 0.15
    return passed, {"C_hat": coarse.C_hat, "C_hat_refined": fine.C_hat, "relative_drift": drift}


def _bti_bound(ctx: AcceptanceContext) -> Tuple[bool, Dict[str, Any]]:
    alpha = closed_form_exponents(ConstantsMode.GLOBAL, 2, 2.0)[0]
    c_hat = ctx.c_hat(alpha)
    violations = bti_bound_violations(ctx.evaluator, alpha, c_hat, SamplingPlan.held_out(ctx.seed + 1))
    return not violations, {"alpha": alpha, "C_hat": c_hat, "violations": len(violations)}


# ---------------------------------------------------------------------------
# solver
# ---------------------------------------------------------------------------


def _oracle_equivalence(ctx: AcceptanceContext) -> Tuple[bool, Dict[str, Any]]:
    size = ctx.sizes
    horizon = 0.05
    u0 = InitialData.constant(1.0)
    schedule = make_schedule(ctx.domain, 0.2)
    config = ctx.solver_config(resolution=size.oracle_resolution, dt_init=horizon / size.oracle_steps)
    report = run(u0, schedule, config, horizon)
    final = report.final_field
    assert final is not None

    # 輻射邊上的節點加上均勻抽樣的內部節點
    nodes = final.discretization.nodes
    on_edge = np.flatnonzero(np.isclose(nodes[:, 1], 0.0))
    stride = max(1, nodes.shape[0] // 64)
    picks = np.unique(np.concatenate((on_edge, np.arange(0, nodes.shape[0], stride))))

    trace = representation_solve(
        ctx.evaluator,
        u0,
        schedule,
        horizon,
        2.0,
        panels=size.oracle_panels,
        steps=size.oracle_steps,
        eval_points=nodes[picks],
    )
    difference = float(np.max(np.abs(trace.eval_values - final.values[picks])))
    return difference <= size.oracle_tol, {"sup_difference": difference, "points": int(picks.size)}


def _blowup_upper_bound(ctx: AcceptanceContext) -> Tuple[bool, Dict[str, Any]]:
    small = ctx.blowup_run(0.1)
    large = ctx.blowup_run(0.2)
    t_small, t_large = small.T_star_estimate, large.T_star_estimate
    passed = t_small is not None and t_large is not None and t_small <= 10.0 and t_large < t_small
    return passed, {"T_star_gamma_0.1": t_small, "T_star_gamma_0.2": t_large}


def _scaling_law(ctx: AcceptanceContext) -> Tuple[bool, Dict[str, Any]]:
    base = Scenario(
        name="scaling",
        domain=DomainSpec(DomainKind.BOX2D, (1.0, 1.0)),
        u0=InitialSpec(M0=1.0),
        schedule=ScheduleSpec(mode=ScheduleMode.FIXED),
        solver=SolverSpec(q=2.0, resolution=ctx.sizes.solver_resolution, dt_init=ctx.sizes.solver_dt),
        horizon=30.0,
    )
    result = run_sweep(SweepPlan(base, "schedule.gamma1", SCALING_GAMMAS))
    if result.fit is None:
        return False, {"partial": result.partial}
    fit = result.fit
    passed = -1.3 <= fit.exponent <= -0.8 and fit.r_squared >= 0.95 and not result.partial
    return passed, {"exponent": fit.exponent, "r_squared": fit.r_squared, "partial": result.partial}


def _growth_rate(ctx: AcceptanceContext) -> Tuple[bool, Dict[str, Any]]:
    alpha = closed_form_exponents(ConstantsMode.GLOBAL, 2, 2.0)[0]
    c_hat = ctx.c_hat(alpha)
    report = ctx.blowup_run(0.1)
    schedule = make_schedule(ctx.domain, 0.1)
    violations = growth_rate_check(report, schedule, alpha, c_hat, slack=0.05)
    return not violations, {"alpha": alpha, "C_hat": c_hat, "violations": len(violations)}


# ---------------------------------------------------------------------------
# schedule
# ---------------------------------------------------------------------------


def _scheduled_scenario(ctx: AcceptanceContext, mode: ScheduleMode, B: Optional[float] = None) -> Scenario:  # noqa: N803
    return Scenario(
        name=f"accept-{mode.value}",
        u0=InitialSpec(M0=1.0),
        schedule=ScheduleSpec(mode=mode, gamma1=0.1, beta=2.0, B=B),
        solver=SolverSpec(q=2.0, resolution=ctx.sizes.solver_resolution),
        t_star_multiple=50.0,
    )


def _scheduled_run(ctx: AcceptanceContext, scenario: Scenario) -> Tuple[RunReport, Any]:
    mode = scenario.schedule.constants_mode
    assert mode is not None and scenario.schedule.beta is not None
    alpha = exponents(mode, 2, scenario.schedule.beta)[0]
    prepared = prepare_run(scenario, c_hat=ctx.c_hat(alpha))
    dt = prepared.horizon / ctx.sizes.prevention_steps
    config = SolverConfig(
        q=prepared.config.q,
        resolution=prepared.config.resolution,
        dt_init=dt,
        dt_min=min(prepared.config.dt_min, 1e-3 * dt),
    )
    constants = prepared.constants
    assert constants is not None
    report = run(prepared.u0, prepared.schedule, config, prepared.horizon, constants=constants.as_dict())
    return report, constants


def _prevention(ctx: AcceptanceContext) -> Tuple[bool, Dict[str, Any]]:
    report, constants = _scheduled_run(ctx, _scheduled_scenario(ctx, ScheduleMode.GLOBAL))
    milestones = constants.milestones(50)
    crossings = milestones.crossing_times(report.times, report.M)
    k = np.arange(crossings.size)
    reached = np.isfinite(crossings)
    late_enough = bool(np.all(crossings[reached] >= k[reached] * constants.t_star - 1e-12))
    passed = report.verdict is Verdict.COMPLETED and late_enough
    return passed, {
        "verdict": report.verdict.value,
        "t_star": constants.t_star,
        "horizon": report.final_time,
        "M_final": float(report.M[-1]),
        "milestones_crossed": int(np.count_nonzero(reached)),
    }


def _cap(ctx: AcceptanceContext) -> Tuple[bool, Dict[str, Any]]:
    report, constants = _scheduled_run(ctx, _scheduled_scenario(ctx, ScheduleMode.CAPPED, B=5.0))
    peak = float(np.max(report.M))
    alpha = exponents(ConstantsMode.CAPPED, 2, 2.0)[0]
    ends = verify_schedule_end_behavior(2, 2.0, 2.0, 1.0, 0.1, ctx.c_hat(alpha))
    passed = report.verdict is Verdict.COMPLETED and peak <= constants.B and ends.passed
    return passed, {
        "M_peak": peak,
        "B": constants.B,
        "plateau_ratio": ends.plateau_ratio,
        "divergence_ratio": ends.divergence_ratio,
        "monotone": ends.monotone,
    }


def _closed_forms(ctx: AcceptanceContext) -> Tuple[bool, Dict[str, Any]]:
    worst = 0.0
    for (mode, n, beta), expected in HAND_DERIVED_EXPONENTS.items():
        actual = closed_form_exponents(mode, n, beta)
        worst = max(worst, max(abs(a - e) for a, e in zip(actual, expected)))

    residual = 0.0
    for ratio in (1.5, 5.0, 50.0):
        for s in (0.25, 0.5, 1.0):
            ell = log_lambda_B(ratio, 1.0, s)
            residual = max(residual, abs(g_s_log(ell, s) - ratio))
    return worst <= 1e-14 and residual < 1e-8, {"max_exponent_error": worst, "g_s_residual": residual}


# ---------------------------------------------------------------------------
# seqlab
# ---------------------------------------------------------------------------


def _sequence_suite(ctx: AcceptanceContext) -> Tuple[bool, Dict[str, Any]]:
    results = suite_check(1000, ctx.sizes.seq_J_large)
    scan = sharpness_scan(0.1, SHARPNESS_J)
    measured: Dict[str, Any] = {f"{r.label}_decreased": r.decreased for r in results}
    measured.update(
        {
            "sharpness_turning_point": scan.turning_point,
            "sharpness_eventually_increasing": scan.eventually_increasing,
            "sharpness_1e3": scan.value_at(1e3),
            "sharpness_1e6": scan.value_at(1e6),
        }
    )
    passed = all(r.decreased for r in results) and scan.eventually_increasing
    return passed, measured


Criterion = Tuple[int, str, AcceptanceSuite, Callable[[AcceptanceContext], Tuple[bool, Dict[str, Any]]]]

CRITERIA: List[Criterion] = [
    (1, "kernel normalization", AcceptanceSuite.KERNEL, _kernel_normalization),
    (2, "kernel symmetry and boundary flux", AcceptanceSuite.KERNEL, _kernel_symmetry_flux),
    (3, "gaussian domination", AcceptanceSuite.KERNEL, _gaussian_domination),
    (4, "boundary-time integral bound", AcceptanceSuite.KERNEL, _bti_bound),
    (5, "oracle equivalence", AcceptanceSuite.SOLVER, _oracle_equivalence),
    (6, "blowup upper bound", AcceptanceSuite.SOLVER, _blowup_upper_bound),
    (7, "2D scaling law", AcceptanceSuite.SOLVER, _scaling_law),
    (8, "prevention schedule", AcceptanceSuite.E2E, _prevention),
    (9, "temperature cap", AcceptanceSuite.E2E, _cap),
    (10, "growth-rate check", AcceptanceSuite.SOLVER, _growth_rate),
    (11, "sequence suite", AcceptanceSuite.SEQLAB, _sequence_suite),
    (12, "schedule closed forms", AcceptanceSuite.SCHEDULE, _closed_forms),
]


def select(suite: AcceptanceSuite, numbers: Optional[List[int]] = None) -> List[Criterion]:
    chosen = [c for c in CRITERIA if suite is AcceptanceSuite.ALL or c[2] is suite]
    if numbers:
        chosen = [c for c in chosen if c[0] in numbers]
    return chosen


def accept(
    suite: AcceptanceSuite = AcceptanceSuite.ALL,
    scale: AcceptanceScale = AcceptanceScale.FULL,
    seed: int = DefaultValue.SEED.value,
    numbers: Optional[List[int]] = None,
    on_entry: Optional[Callable[[AcceptanceEntry], None]] = None,
) -> AcceptanceReport:
    """
    執行驗收項目

    Args:
        suite (AcceptanceSuite): 套件
        scale (AcceptanceScale): 規模
        seed (int): 亂數種子
        numbers (Optional[List[int]]): 只執行這些編號
        on_entry (Optional[Callable[[AcceptanceEntry], None]]): 每完成一項呼叫一次

    Returns:
        AcceptanceReport: 每個項目的結果；數值錯誤記為失敗，不會拋出
    """
    ctx = AcceptanceContext(scale, seed)
    report = AcceptanceReport(suite, scale, seed)
    for number, name, criterion_suite, check in select(suite, numbers):
        start = time.perf_counter()
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                passed, measured = check(ctx)
        except (BlowupLabError, ArithmeticError) as e:
            passed, measured = False, {"error": f"{type(e).__name__}: {e}"}
        entry = AcceptanceEntry(number, name, criterion_suite, passed, measured, time.perf_counter() - start)
        report.entries.append(entry)
        if on_entry is not None:
            on_entry(entry)
    return report
