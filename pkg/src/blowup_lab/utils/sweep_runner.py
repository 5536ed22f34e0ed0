"""沿一個情境鍵掃描 T*，並以 log-log 最小平方法擬合冪次"""

import math
import multiprocessing
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from blowup_lab.core.errors import BlowupLabError, DomainError
from blowup_lab.core.lifespan import estimate_lifespan
from blowup_lab.core.solver import run
from blowup_lab.utils.scenario_utils import (
    PreparedRun,
    Scenario,
    SweepPlan,
    parse_scenario,
    prepare_run,
    resolve_c_hat,
    serialize_scenario,
)

Q_AXIS = "solver.q"
PLATEAU_TOL = 0.05


@dataclass
class PowerLawFit:
    """T* ≈ prefactor·param^exponent

    Attributes:
        exponent (float): log-log 斜率
        prefactor (float): e^{截距}
        r_squared (float): 決定係數
        count (int): 參與擬合的點數
    """

    exponent: float
    prefactor: float
    r_squared: float
    count: int

    def as_dict(self) -> Dict[str, Any]:
        return {
            "exponent": self.exponent,
            "prefactor": self.prefactor,
            "r_squared": self.r_squared,
            "count": self.count,
        }


def fit_power_law(params: np.ndarray, values: np.ndarray) -> PowerLawFit:
    """
    log values = exponent·log params + c 的最小平方擬合

    Raises:
        DomainError: 正值的點少於 2 個
    """
    params = np.asarray(params, dtype=float)
    values = np.asarray(values, dtype=float)
    keep = np.isfinite(params) & np.isfinite(values) & (params > 0) & (values > 0)
    if np.count_nonzero(keep) < 2:
        raise DomainError("擬合至少需要 2 個正值的點")

    x = np.log(params[keep])
    y = np.log(values[keep])
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (slope * x + intercept)
    total = np.sum((y - y.mean()) ** 2)
    r_squared = 1.0 - float(np.sum(residual**2)) / float(total) if total > 0 else 1.0
    return PowerLawFit(float(slope), float(math.exp(intercept)), r_squared, int(np.count_nonzero(keep)))


def plateau(q_values: np.ndarray, t_star: np.ndarray, tol: float = PLATEAU_TOL) -> Tuple[Optional[float], bool]:
    """
    依 q 由大到小排列 T*·(q−1)，最後兩個值的相對差 ≤ tol 視為穩定

    Returns:
        Tuple[Optional[float], bool]: 最接近 1 的 q 對應的 T*·(q−1) 與是否穩定
    """
    keep = np.isfinite(t_star)
    q = np.asarray(q_values, dtype=float)[keep]
    scaled = np.asarray(t_star, dtype=float)[keep] * (q - 1.0)
    if scaled.size == 0:
        return None, False
    order = np.argsort(-q)
    scaled = scaled[order]
    if scaled.size < 2:
        return float(scaled[-1]), False
    stable = abs(scaled[-1] - scaled[-2]) <= tol * abs(scaled[-1])
    return float(scaled[-1]), bool(stable)


def _run_point(task: Tuple[str, str, int, Optional[float]]) -> Dict[str, Any]:
    """單一掃描點（在工作程序中執行，只接受可 pickle 的文字參數）"""
    value, scenario_text, levels, c_hat = task
    row: Dict[str, Any] = {"param": value, "T_star": math.nan, "uncertainty": math.nan, "verdict": None, "error": None}
    try:
        prepared = prepare_run(parse_scenario(scenario_text), c_hat=c_hat)
        row.update(_solve(prepared, levels))
    except (BlowupLabError, ArithmeticError) as e:
        row["error"] = f"{type(e).__name__}: {e}"
    return row


def _solve(prepared: PreparedRun, levels: int) -> Dict[str, Any]:
    if levels >= 3:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            estimate = estimate_lifespan(prepared.u0, prepared.schedule, prepared.config, prepared.horizon, levels)
        return {
            "T_star": estimate.T_star,
            "uncertainty": estimate.uncertainty,
            "verdict": "blowup",
            "low_confidence": estimate.low_confidence,
        }

    report = run(prepared.u0, prepared.schedule, prepared.config, prepared.horizon)
    if report.T_star_estimate is None:
        return {"verdict": report.verdict.value}
    t_star = report.T_star_extrapolated if report.T_star_extrapolated is not None else report.T_star_estimate
    uncertainty = abs(t_star - report.T_star_estimate) if report.T_star_extrapolated is not None else math.nan
    return {"T_star": t_star, "uncertainty": uncertainty, "verdict": report.verdict.value}


@dataclass
class SweepResult:
    """掃描結果

    Attributes:
        axis (str): 掃描的鍵
        rows (List[Dict[str, Any]]): 每個點的結果（含錯誤訊息）
        fit (Optional[PowerLawFit]): 冪次擬合
        partial (bool): 有點失敗或沒有爆破
        plateau_value (Optional[float]): q 掃描時 T*·(q−1) 最接近 q=1 的值
        plateau_stable (bool): 上述值是否已穩定
    """

    axis: str
    rows: List[Dict[str, Any]] = field(default_factory=list)
    fit: Optional[PowerLawFit] = None
    partial: bool = False
    plateau_value: Optional[float] = None
    plateau_stable: bool = False

    def frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.rows)
        frame["param"] = pd.to_numeric(frame["param"], errors="coerce")
        if self.axis == Q_AXIS:
            frame["T_star_q_minus_1"] = frame["T_star"] * (frame["param"] - 1.0)
        leading = ["param", "T_star", "uncertainty"]
        return frame[leading + [c for c in frame.columns if c not in leading]]

    def as_dict(self) -> Dict[str, Any]:
        return {
            "axis": self.axis,
            "partial": self.partial,
            "fit": self.fit.as_dict() if self.fit else None,
            "plateau_value": self.plateau_value,
            "plateau_stable": self.plateau_stable,
            "points": self.rows,
        }


def run_sweep(plan: SweepPlan) -> SweepResult:
    """
    執行掃描

    parallelism > 1 時以程序池平行執行；結果依掃描值的順序彙整，與平行度無關。
    global / capped 排程的 C_hat 在主程序決定一次，所有點共用。

    Raises:
        ValidationError: 任一掃描點的情境不合法

    Returns:
        SweepResult: 掃描結果
    """
    scenarios: List[Scenario] = plan.instantiate()
    c_hat: Optional[float] = None
    if plan.base.schedule.constants_mode is not None:
        c_hat, _ = resolve_c_hat(plan.base)
        scenarios = [replace(s, schedule=replace(s.schedule, C_hat=c_hat)) for s in scenarios]

    tasks = [(value, serialize_scenario(s), plan.levels, c_hat) for value, s in zip(plan.values, scenarios)]
    if plan.parallelism > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(
            max_workers=min(plan.parallelism, len(tasks)), mp_context=multiprocessing.get_context("spawn")
        ) as pool:
            rows = list(pool.map(_run_point, tasks))
    else:
        rows = [_run_point(task) for task in tasks]

    result = SweepResult(plan.axis, rows)
    t_star = np.array([row["T_star"] for row in rows], dtype=float)
    result.partial = bool(np.any(~np.isfinite(t_star)))

    params = pd.to_numeric(pd.Series(plan.values), errors="coerce").to_numpy(dtype=float)
    if plan.regression:
        try:
            result.fit = fit_power_law(params, t_star)
        except DomainError:
            result.fit = None
    if plan.axis == Q_AXIS:
        result.plateau_value, result.plateau_stable = plateau(params, t_star)
    return result
