"""跨解析度的爆破時間估計"""

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional

from blowup_lab.core.errors import DomainError, LowConfidenceWarning
from blowup_lab.core.geometry import BoundarySchedule
from blowup_lab.core.initial_data import InitialData
from blowup_lab.core.solver import SolverConfig, run


@dataclass
class LifespanEstimate:
    """爆破時間 T* 的估計

    Attributes:
        T_star (float): 外插後的 T*（信心度低時為最細網格的值）
        uncertainty (float): 估計的不確定度
        history (List[Dict[str, Any]]): 由粗到細每個解析度的結果
        observed_order (Optional[float]): 觀測到的收斂階數
        low_confidence (bool): 收斂序列不單調
    """

    T_star: float  # noqa: N815
    uncertainty: float
    history: List[Dict[str, Any]] = field(default_factory=list)
    observed_order: Optional[float] = None
    low_confidence: bool = False

    def as_dict(self) -> Dict[str, Any]:
        return {
            "T_star": self.T_star,
            "uncertainty": self.uncertainty,
            "observed_order": self.observed_order,
            "low_confidence": self.low_confidence,
            "history": self.history,
        }


def richardson(coarse: float, medium: float, fine: float, ratio: float = 2.0) -> LifespanEstimate:
    """三個解析度（網格比 ratio）的 Richardson 外插

    兩段差值同號且遞減時視為單調收斂，以觀測階數外插；否則標記為低信心度。
    """
    d1 = medium - coarse
    d2 = fine - medium
    history = [{"T_star": coarse}, {"T_star": medium}, {"T_star": fine}]

    if d2 == 0.0:
        return LifespanEstimate(fine, abs(d1), history, math.inf if d1 else None, False)

    monotone = d1 * d2 > 0 and abs(d2) < abs(d1)
    if not monotone:
        warnings.warn(
            f"T* 跨解析度不單調收斂：{coarse:.6g}, {medium:.6g}, {fine:.6g}", LowConfidenceWarning, stacklevel=2
        )
        return LifespanEstimate(fine, max(abs(d1), abs(d2)), history, None, True)

    order = math.log(abs(d1) / abs(d2)) / math.log(ratio)
    extrapolated = fine + d2 / (ratio**order - 1.0)
    uncertainty = max(abs(extrapolated - fine), abs(d2))
    return LifespanEstimate(extrapolated, uncertainty, history, order, False)


def estimate_lifespan(
    u0: InitialData,
    schedule: BoundarySchedule,
    config: SolverConfig,
    horizon: float,
    levels: int = 3,
) -> LifespanEstimate:
    """在 N/4、N/2、N 三個解析度（dt 與網格間距成比例）重跑並外插 T*

    Args:
        u0 (InitialData): 初始資料
        schedule (BoundarySchedule): 輻射邊界排程
        config (SolverConfig): 最細解析度的設定
        horizon (float): 每次模擬的積分終點
        levels (int): 解析度層數，至少 3

    Raises:
        DomainError: 最粗解析度沒有爆破，或層數不足

    Returns:
        LifespanEstimate: 估計結果
    """
    if levels < 3:
        raise DomainError(f"至少需要 3 個解析度，收到 {levels}")

    resolutions = [config.resolution // 2**k for k in range(levels - 1, -1, -1)]
    if resolutions[0] < 2:
        raise DomainError(f"解析度 {config.resolution} 太粗，無法再分 {levels} 層")

    results: List[Dict[str, Any]] = []
    for resolution in resolutions:
        level_config = replace(config.with_resolution(resolution, scale_dt=True), refine_levels=1)
        report = run(u0, schedule, level_config, horizon)
        if report.T_star_estimate is None:
            if not results:
                raise DomainError(f"最粗解析度 {resolution} 在 horizon={horizon} 內沒有爆破")
            raise DomainError(f"解析度 {resolution} 在 horizon={horizon} 內沒有爆破")
        results.append(
            {"resolution": resolution, "dt_init": level_config.dt_init, "T_star": report.T_star_estimate}
        )

    values = [r["T_star"] for r in results]
    estimate = richardson(values[-3], values[-2], values[-1])
    estimate.history = results
    return estimate
