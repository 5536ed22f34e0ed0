"""隨時間縮小的輻射邊界上的熱方程求解器

u_t = Δu，Γ₁,ₜ 上 ∂u/∂n = u^q，其餘邊界絕熱，交界處取 ½u^q。
時間離散使用 θ 法（隱式 Euler 或 Crank–Nicolson），非線性只出現在邊界節點，
Newton 迭代的 Jacobian 為 A₀ − P·diag(g)·Pᵀ，以 Woodbury 公式重用 A₀ 的 LU 分解。

爆破判定需同時滿足：
- M(t) ≥ U_max
- 時間步在 dt < dt_min 時仍被拒絕
"""

import warnings
from collections import OrderedDict
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from blowup_lab.core.discretization import Discretization, build_discretization
from blowup_lab.core.errors import (
    BlowupSuspectedError,
    DomainError,
    LowConfidenceWarning,
    StepRejectedError,
    ValidationError,
)
from blowup_lab.core.geometry import BoundarySchedule, Domain
from blowup_lab.core.initial_data import InitialData
from blowup_lab.enums.default_value import DefaultValue
from blowup_lab.enums.numerics import InterfaceRule, TimeScheme
from blowup_lab.enums.run_status import Verdict

# dt_min 以下繼續減半的下限（相對於 dt_min）
_SUB_MIN_FLOOR = 1e-4

# 連續接受多少步後放大 dt
_GROW_AFTER = 5
_GROW_FACTOR = 1.2


@dataclass
class GridField:
    """網格上的溫度分佈

    Attributes:
        domain (Domain): 計算區域
        resolution (int): 解析度（見 Discretization）
        values (np.ndarray): 節點值
        time (float): 時間
    """

    domain: Domain
    resolution: int
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("網格值必須為有限值")
        if self.time < 0:
            raise DomainError(f"時間不可為負：{self.time}")

    @property
    def maximum(self) -> float:
        return float(np.max(self.values))

    @property
    def discretization(self) -> Discretization:
        return build_discretization(self.domain, self.resolution)

    def mass(self) -> float:
        return self.discretization.integrate(self.values)


@dataclass(frozen=True)
class SolverConfig:
    """求解器設定

    Attributes:
        q (float): 非線性指數，> 1
        scheme (TimeScheme): 時間離散
        dt_init (float): 初始（也是最大）時間步
        dt_min (float): 最小時間步
        U_max_factor (float): 爆破門檻 U_max = U_max_factor·M₀
        blowup_threshold (Optional[float]): 直接指定 U_max，優先於 U_max_factor
        newton_tol (float): Newton 收斂門檻（相對於 max(1, ‖u‖∞)）
        newton_max_iter (int): Newton 最大迭代次數
        resolution (int): 空間解析度
        interface_rule (InterfaceRule): 輻射弧與網格交界的處理方式
        refine_levels (int): ≥ 2（預設）時爆破後以 N/2 再跑一次並做 Richardson 外插
    """

    q: float = 2.0
    scheme: TimeScheme = TimeScheme.IMPLICIT_EULER
    dt_init: float = 1e-3
    dt_min: float = DefaultValue.DT_MIN.value
    U_max_factor: float = DefaultValue.U_MAX_FACTOR.value  # noqa: N815
    blowup_threshold: Optional[float] = None
    newton_tol: float = 1e-10
    newton_max_iter: int = 30
    resolution: int = 32
    interface_rule: InterfaceRule = InterfaceRule.SNAPPED
    refine_levels: int = 2

    def __post_init__(self) -> None:
        if not self.q > 1:
            raise DomainError(f"q 必須 > 1，收到 {self.q}")
        if not 0 < self.dt_min < self.dt_init:
            raise ValidationError(f"需要 0 < dt_min < dt_init，收到 dt_min={self.dt_min}, dt_init={self.dt_init}")
        if self.blowup_threshold is not None and not self.blowup_threshold > 0:
            raise ValidationError(f"U_max 必須為正，收到 {self.blowup_threshold}")
        if not self.U_max_factor > 1:
            raise ValidationError(f"U_max_factor 必須 > 1，收到 {self.U_max_factor}")
        if self.newton_max_iter < 1 or not self.newton_tol > 0:
            raise ValidationError("Newton 設定不合法")

    def u_max(self, M0: float) -> float:  # noqa: N803
        if self.blowup_threshold is not None:
            return self.blowup_threshold
        return self.U_max_factor * M0

    def with_resolution(self, resolution: int, scale_dt: bool = False) -> "SolverConfig":
        """改變解析度；scale_dt 為 True 時 dt_init 與網格間距等比例縮放"""
        dt_init = self.dt_init * self.resolution / resolution if scale_dt else self.dt_init
        return replace(self, resolution=resolution, dt_init=max(dt_init, 2.0 * self.dt_min))

    def as_dict(self) -> Dict[str, Any]:
        return {
            "q": self.q,
            "scheme": self.scheme.value,
            "dt_init": self.dt_init,
            "dt_min": self.dt_min,
            "U_max_factor": self.U_max_factor,
            "blowup_threshold": self.blowup_threshold,
            "newton_tol": self.newton_tol,
            "newton_max_iter": self.newton_max_iter,
            "resolution": self.resolution,
            "interface_rule": self.interface_rule.value,
            "refine_levels": self.refine_levels,
        }


class Stepper:
    """單一區域、排程與設定下的時間推進器，快取每個 dt 的 LU 分解"""

    def __init__(self, schedule: BoundarySchedule, config: SolverConfig, cache_size: int = 8) -> None:
        self.schedule = schedule
        self.config = config
        self.disc = build_discretization(schedule.domain, config.resolution)
        self.theta = config.scheme.theta
        arc = schedule.gamma1_initial
        self.candidates = (
            np.empty(0, dtype=int) if arc is None else self.disc.boundary_candidates(arc.edge_id)
        )
        self._cache: "OrderedDict[float, Tuple[Any, np.ndarray]]" = OrderedDict()
        self._cache_size = cache_size

    def flux_measure(self, t: float) -> np.ndarray:
        return self.disc.flux_measure(self.schedule.arc_at(t), self.config.interface_rule)

    def _factor(self, dt: float) -> Tuple[Any, np.ndarray]:
        if dt in self._cache:
            self._cache.move_to_end(dt)
            return self._cache[dt]

        a0 = (sp.diags(self.disc.mass) + (self.theta * dt) * self.disc.stiffness).tocsc()
        lu = splu(a0)
        if self.candidates.size:
            rhs = np.zeros((self.disc.size, self.candidates.size))
            rhs[self.candidates, np.arange(self.candidates.size)] = 1.0
            z = lu.solve(rhs)
        else:
            z = np.zeros((self.disc.size, 0))

        self._cache[dt] = (lu, z)
        if len(self._cache) > self._cache_size:
            self._cache.popitem(last=False)
        return lu, z

    def step(self, field: GridField, dt: float) -> GridField:
        """推進一個時間步

        Raises:
            DomainError: dt 不在 (0, dt_init]
            ValidationError: field 含負值或不在同一網格上
            StepRejectedError: Newton 迭代失敗
            BlowupSuspectedError: dt < dt_min 時 Newton 迭代失敗

        Returns:
            GridField: t + dt 時的分佈
        """
        config = self.config
        if not 0 < dt <= config.dt_init * (1.0 + 1e-12):
            raise DomainError(f"dt 必須在 (0, dt_init={config.dt_init}]，收到 {dt}")
        if field.values.shape != (self.disc.size,):
            raise ValidationError("網格值的長度與離散化不符")
        if np.any(field.values < 0):
            raise ValidationError("網格值不可為負")

        q = config.q
        theta = self.theta
        u_old = field.values
        mass = self.disc.mass
        stiffness = self.disc.stiffness
        e_new = self.flux_measure(field.time + dt)
        e_old = self.flux_measure(field.time) if theta < 1.0 else e_new

        explicit = (1.0 - theta) * dt * (stiffness @ u_old - e_old * u_old**q)
        lu, z = self._factor(dt)
        e_cand = e_new[self.candidates]
        z_cand = z[self.candidates, :] if self.candidates.size else z[:0, :]

        u = u_old.copy()
        with np.errstate(over="ignore", invalid="ignore"):
            for _ in range(config.newton_max_iter):
                residual = mass * (u - u_old) + theta * dt * (stiffness @ u - e_new * u**q) + explicit
                base = lu.solve(residual)
                if self.candidates.size:
                    g = theta * dt * q * e_cand * u[self.candidates] ** (q - 1.0)
                    small = np.eye(self.candidates.size) - g[:, None] * z_cand
                    correction = np.linalg.solve(small, g * base[self.candidates])
                    delta = base + z @ correction
                else:
                    delta = base

                if not np.all(np.isfinite(delta)):
                    break
                u = u - delta
                if np.max(np.abs(delta)) <= config.newton_tol * max(1.0, float(np.max(np.abs(u)))):
                    if np.all(u > 0) and np.all(np.isfinite(u)):
                        return GridField(field.domain, field.resolution, u, field.time + dt)
                    break

        message = f"t={field.time:.6g} 的時間步 dt={dt:.3g} 無法收斂"
        if dt < config.dt_min:
            raise BlowupSuspectedError(message, dt)
        raise StepRejectedError(message, dt)


@lru_cache(maxsize=8)
def stepper_for(schedule: BoundarySchedule, config: SolverConfig) -> Stepper:
    """同一排程與設定共用一個 Stepper 及其 LU 快取"""
    return Stepper(schedule, config)


def step(field: GridField, schedule: BoundarySchedule, config: SolverConfig, dt: float) -> GridField:
    """以 config 推進 field 一個時間步 dt"""
    if field.domain != schedule.domain or field.resolution != config.resolution:
        raise ValidationError("field 與排程或設定的網格不一致")
    return stepper_for(schedule, config).step(field, dt)


@dataclass
class RunReport:
    """一次模擬的結果

    Attributes:
        times (np.ndarray): 取樣時間
        M (np.ndarray): M(t) = sup_{τ≤t} max u(·,τ)，非遞減
        A (np.ndarray): 輻射邊界面積 A(t)
        mass (np.ndarray): ∫_Ω u
        verdict (Verdict): completed 或 blowup
        T_star_estimate (Optional[float]): 爆破時為最後一個成功步的時間
        T_star_extrapolated (Optional[float]): 跨解析度的 Richardson 外插
        refinement_history (List[Dict[str, Any]]): 每個解析度的 (resolution, dt_min, T_star)
        schedule_used (Dict[str, Any]): 排程摘要
        constants (Optional[Dict[str, Any]]): 產生排程的常數（若有）
        config (Dict[str, Any]): 求解器設定
        q (float): 非線性指數
        n (int): 空間維度
        M0 (float): 初始最大值
        U_max (float): 爆破門檻
        accepted_steps (int): 接受的時間步數
        rejected_steps (int): 被拒絕的時間步數
        final_field (Optional[GridField]): 最後的分佈
    """

    times: np.ndarray
    M: np.ndarray
    A: np.ndarray
    mass: np.ndarray
    verdict: Verdict
    T_star_estimate: Optional[float]  # noqa: N815
    schedule_used: Dict[str, Any]
    config: Dict[str, Any]
    q: float
    n: int
    M0: float  # noqa: N815
    U_max: float  # noqa: N815
    accepted_steps: int = 0
    rejected_steps: int = 0
    T_star_extrapolated: Optional[float] = None  # noqa: N815
    refinement_history: List[Dict[str, Any]] = field(default_factory=list)
    constants: Optional[Dict[str, Any]] = None
    final_field: Optional[GridField] = None

    @property
    def M_trace(self) -> List[Tuple[float, float]]:  # noqa: N802
        return list(zip(self.times.tolist(), self.M.tolist()))

    @property
    def final_time(self) -> float:
        return float(self.times[-1])

    def M_at(self, t: float) -> float:  # noqa: N802
        """t 之前（含）最後一個取樣的 M"""
        index = int(np.searchsorted(self.times, t, side="right")) - 1
        return float(self.M[max(index, 0)])

    def trace_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"t": self.times, "M": self.M, "A": self.A, "mass": self.mass})

    def as_dict(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "T_star_estimate": self.T_star_estimate,
            "T_star_extrapolated": self.T_star_extrapolated,
            "refinement_history": self.refinement_history,
            "final_time": self.final_time,
            "M_final": float(self.M[-1]),
            "M0": self.M0,
            "U_max": self.U_max,
            "q": self.q,
            "n": self.n,
            "accepted_steps": self.accepted_steps,
            "rejected_steps": self.rejected_steps,
            "schedule_used": self.schedule_used,
            "constants": self.constants,
            "solver": self.config,
        }


def initial_field(u0: Union[InitialData, np.ndarray], schedule: BoundarySchedule, config: SolverConfig) -> GridField:
    """在網格上建立初始分佈

    Raises:
        ValidationError: u₀ 含負值、恆為 0 或長度不符
    """
    disc = build_discretization(schedule.domain, config.resolution)
    if isinstance(u0, InitialData):
        values = u0.evaluate(schedule.domain, disc.nodes)
    else:
        values = np.asarray(u0, dtype=float)
        if values.shape != (disc.size,):
            raise ValidationError(f"u₀ 的長度 {values.shape} 與網格節點數 {disc.size} 不符")

    if np.any(values < 0):
        raise ValidationError("u₀ 不可有負值")
    if not np.any(values > 0):
        raise ValidationError("u₀ 不可恆為 0")
    return GridField(schedule.domain, config.resolution, values, 0.0)


def _integrate(
    stepper: Stepper, start: GridField, horizon: float
) -> Tuple[GridField, Verdict, Dict[str, List[float]], int, int, float]:
    config = stepper.config
    schedule = stepper.schedule
    M0 = start.maximum  # noqa: N806
    u_max = config.u_max(M0)

    current = start
    running = M0
    trace: Dict[str, List[float]] = {"t": [0.0], "M": [M0], "A": [float(schedule.area(0.0))], "mass": [start.mass()]}
    dt = config.dt_init
    streak = 0
    accepted = rejected = 0

    while current.time < horizon * (1.0 - 1e-14):
        trial = min(dt, horizon - current.time)
        try:
            current = stepper.step(current, trial)
        except StepRejectedError as exc:
            rejected += 1
            streak = 0
            dt = 0.5 * trial
            if isinstance(exc, BlowupSuspectedError):
                if running >= u_max:
                    return current, Verdict.BLOWUP, trace, accepted, rejected, u_max
                if dt < config.dt_min * _SUB_MIN_FLOOR:
                    raise
            continue

        accepted += 1
        running = max(running, current.maximum)
        trace["t"].append(current.time)
        trace["M"].append(running)
        trace["A"].append(float(schedule.area(current.time)))
        trace["mass"].append(current.mass())

        streak += 1
        if streak >= _GROW_AFTER:
            dt = min(config.dt_init, _GROW_FACTOR * dt)
            streak = 0

    return current, Verdict.COMPLETED, trace, accepted, rejected, u_max


def run(
    u0: Union[InitialData, np.ndarray],
    schedule: BoundarySchedule,
    config: SolverConfig,
    horizon: float,
    constants: Optional[Dict[str, Any]] = None,
) -> RunReport:
    """由 u₀ 積分到 horizon 或判定爆破

    Args:
        u0 (Union[InitialData, np.ndarray]): 初始資料或網格值
        schedule (BoundarySchedule): 輻射邊界排程
        config (SolverConfig): 求解器設定
        horizon (float): 積分終點
        constants (Optional[Dict[str, Any]]): 產生排程的常數，原樣記入報告

    Raises:
        ValidationError: u₀ 含負值或恆為 0
        DomainError: horizon ≤ 0
        BlowupSuspectedError: dt 遠低於 dt_min 仍失敗，但 M 未達 U_max

    Returns:
        RunReport: 模擬結果
    """
    if not horizon > 0:
        raise DomainError(f"horizon 必須為正，收到 {horizon}")

    start = initial_field(u0, schedule, config)
    stepper = Stepper(schedule, config)
    final, verdict, trace, accepted, rejected, u_max = _integrate(stepper, start, horizon)

    t_star = final.time if verdict is Verdict.BLOWUP else None
    report = RunReport(
        times=np.asarray(trace["t"]),
        M=np.asarray(trace["M"]),
        A=np.asarray(trace["A"]),
        mass=np.asarray(trace["mass"]),
        verdict=verdict,
        T_star_estimate=t_star,
        schedule_used=schedule.summary(),
        config=config.as_dict(),
        q=config.q,
        n=schedule.domain.n,
        M0=start.maximum,
        U_max=u_max,
        accepted_steps=accepted,
        rejected_steps=rejected,
        constants=constants,
        final_field=final,
    )

    if t_star is not None:
        report.refinement_history.append(
            {"resolution": config.resolution, "dt_min": config.dt_min, "T_star": t_star}
        )
        if config.refine_levels >= 2:
            _attach_refinement(report, u0, schedule, config, horizon)
    return report


def _attach_refinement(
    report: RunReport,
    u0: Union[InitialData, np.ndarray],
    schedule: BoundarySchedule,
    config: SolverConfig,
    horizon: float,
) -> None:
    if config.resolution < 4:
        warnings.warn(f"解析度 {config.resolution} 太粗，無法以 N/2 做外插", LowConfidenceWarning, stacklevel=3)
        return
    coarse_config = replace(config.with_resolution(config.resolution // 2), refine_levels=1)
    if isinstance(u0, InitialData):
        coarse_u0: Union[InitialData, np.ndarray] = u0
    else:
        fine = build_discretization(schedule.domain, config.resolution)
        coarse_u0 = fine.restrict(u0, build_discretization(schedule.domain, coarse_config.resolution))

    entry: Dict[str, Any] = {"resolution": coarse_config.resolution, "dt_min": coarse_config.dt_min, "T_star": None}
    report.refinement_history.insert(0, entry)
    try:
        coarse = run(coarse_u0, schedule, coarse_config, horizon)
    except StepRejectedError as e:
        warnings.warn(f"解析度 {coarse_config.resolution} 的對照執行失敗：{e}", LowConfidenceWarning, stacklevel=3)
        return
    if coarse.T_star_estimate is None:
        warnings.warn(
            f"解析度 {coarse_config.resolution} 的對照執行在 horizon={horizon} 內沒有爆破，無法外插 T*",
            LowConfidenceWarning,
            stacklevel=3,
        )
        return

    fine_t = report.T_star_estimate
    assert fine_t is not None
    entry["T_star"] = coarse.T_star_estimate
    # 空間二階，網格比 2
    report.T_star_extrapolated = fine_t + (fine_t - coarse.T_star_estimate) / 3.0


def growth_rate_check(
    report: RunReport,
    schedule: BoundarySchedule,
    alpha: float,
    C_hat: float,  # noqa: N803
    slack: float = 0.05,
    max_points: int = 200,
) -> List[Dict[str, float]]:
    """檢查 (M(T+t) − M(T)) / M(T+t)^q ≤ C_hat·A(T)^α·t^{(1−(n−1)α)/2}

    在最多 max_points 個取樣時間上檢查所有 0 < t < min(1, 剩餘時間) 的配對。

    Raises:
        DomainError: α 不在 [0, 1/(n−1))

    Returns:
        List[Dict[str, float]]: 超出 slack 的配對，空串列表示通過
    """
    n = report.n
    if not 0 <= alpha < 1.0 / (n - 1):
        raise DomainError(f"α 必須滿足 0 ≤ α < 1/(n−1)，收到 {alpha}")

    picks = np.unique(np.linspace(0, report.times.size - 1, min(max_points, report.times.size)).astype(int))
    times = report.times[picks]
    values = report.M[picks]
    areas = np.asarray(schedule.area(times), dtype=float)
    exponent = 0.5 * (1.0 - (n - 1) * alpha)

    i, j = np.triu_indices(times.size, k=1)
    gap = times[j] - times[i]
    keep = (gap > 0) & (gap < 1.0)
    i, j, gap = i[keep], j[keep], gap[keep]

    lhs = (values[j] - values[i]) / values[j] ** report.q
    rhs = C_hat * areas[i] ** alpha * gap**exponent
    bad = lhs > rhs * (1.0 + slack) + 1e-12
    return [
        {"T": float(times[a]), "t": float(g), "lhs": float(left), "rhs": float(right)}
        for a, g, left, right in zip(i[bad], gap[bad], lhs[bad], rhs[bad])
    ]


def comparison_pair(
    u0: InitialData,
    smaller: BoundarySchedule,
    larger: BoundarySchedule,
    config: SolverConfig,
    horizon: float,
) -> Tuple[Optional[float], Optional[float]]:
    """在較小與較大的輻射邊界上各跑一次，回傳兩者的 T*"""
    first = run(u0, smaller, replace(config, refine_levels=1), horizon)
    second = run(u0, larger, replace(config, refine_levels=1), horizon)
    return first.T_star_estimate, second.T_star_estimate


def radiated_power(field: GridField, schedule: BoundarySchedule, config: SolverConfig) -> float:
    """Σ E·u^q，即 d/dt ∫u 的離散值"""
    disc = field.discretization
    measure = disc.flux_measure(schedule.arc_at(field.time), config.interface_rule)
    return float(np.dot(measure, field.values**config.q))

