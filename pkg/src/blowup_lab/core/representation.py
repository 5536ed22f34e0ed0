"""以熱核表示式求解，作為有限體積求解器的獨立對照

    u(x,t) = ∫_Ω N(x,y,t) u₀(y) dy + ∫₀^t ∫_{Γ₁,τ} N(x,y,t−τ) u^q(y,τ) dS(y) dτ

未知數為輻射弧上各面板中心的邊界值。空間上每個面板的值為常數，
面板積分 ∫_panel N dS 以 erf 閉式計算；時間上源項 χ·u^q 取分段線性（乘積梯形法），
每個時間層解一個 Picard 不動點問題，最後在指定的觀測點上求值一次。

給定 t_offset = T 時，u₀ 視為時刻 T 的狀態，輻射弧使用 Γ₁,T+τ。
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from blowup_lab.core.errors import ConvergenceError, DomainError, UnsupportedDomainError, ValidationError
from blowup_lab.core.geometry import BoundaryArc, BoundarySchedule
from blowup_lab.core.initial_data import InitialData
from blowup_lab.core.kernel import KernelEvaluator, surface_integral
from blowup_lab.core.quadrature import gauss_legendre, graded_gauss
from blowup_lab.enums.numerics import BoundaryQuadrature


@dataclass
class RepresentationTrace:
    """表示式求解的結果

    Attributes:
        times (np.ndarray): 時間層 (L+1,)，相對於 t_offset
        panel_centers (np.ndarray): 面板中心 (P, n)
        boundary_values (np.ndarray): 各時間層的面板中心值 (L+1, P)
        eval_points (np.ndarray): 觀測點 (m, n)
        eval_values (np.ndarray): 觀測點在 horizon 的值 (m,)
        horizon (float): 積分終點
        t_offset (float): 起始時刻
        iterations (List[int]): 每個時間層的 Picard 迭代次數
    """

    times: np.ndarray
    panel_centers: np.ndarray
    boundary_values: np.ndarray
    eval_points: np.ndarray
    eval_values: np.ndarray
    horizon: float
    t_offset: float = 0.0
    iterations: List[int] = field(default_factory=list)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "horizon": self.horizon,
            "t_offset": self.t_offset,
            "levels": int(self.times.size - 1),
            "panels": int(self.panel_centers.shape[0]),
            "max_boundary_value": float(np.max(self.boundary_values)) if self.boundary_values.size else None,
            "max_iterations": max(self.iterations) if self.iterations else 0,
        }


def make_panels(arc: BoundaryArc, panels: int) -> List[BoundaryArc]:
    """把弧等分成 panels 段；3D 區塊分成 panels × panels 塊"""
    if panels < 1:
        raise DomainError(f"面板數至少為 1，收到 {panels}")
    cuts = [np.linspace(lo, hi, panels + 1) for lo, hi in arc.bounds]
    if not arc.is_patch:
        return [BoundaryArc(arc.edge_id, a, b) for a, b in zip(cuts[0][:-1], cuts[0][1:])]
    return [
        BoundaryArc(arc.edge_id, a, b, c, d)
        for a, b in zip(cuts[0][:-1], cuts[0][1:])
        for c, d in zip(cuts[1][:-1], cuts[1][1:])
    ]


def _panel_matrix(evaluator: KernelEvaluator, panels: List[BoundaryArc], points: np.ndarray, sigma: float) -> np.ndarray:
    return np.stack(
        [surface_integral(evaluator, panel, points, sigma, BoundaryQuadrature.EXACT) for panel in panels], axis=1
    )


def lag_weights(
    evaluator: KernelEvaluator,
    panels: List[BoundaryArc],
    points: np.ndarray,
    h: float,
    lags: int,
    levels: int = 16,
) -> Tuple[np.ndarray, np.ndarray]:
    """乘積梯形法的權重

    a_j = ∫_{jh}^{(j+1)h} (σ−jh)/h·S(σ) dσ，b_j = ∫_{jh}^{(j+1)h} ((j+1)h−σ)/h·S(σ) dσ，
    S(σ) 為 (m, P) 的面板積分矩陣。第一段以 σ = r² 換元並往 0 加密。

    Returns:
        Tuple[np.ndarray, np.ndarray]: a 與 b，形狀皆為 (lags, m, P)
    """
    m, count = points.shape[0], len(panels)
    a = np.zeros((lags, m, count))
    b = np.zeros((lags, m, count))

    roots, root_weights = graded_gauss(0.0, math.sqrt(h), levels=levels)
    for r, w in zip(roots, root_weights):
        sigma = r * r
        matrix = _panel_matrix(evaluator, panels, points, sigma) * (2.0 * r * w)
        a[0] += (sigma / h) * matrix
        b[0] += (1.0 - sigma / h) * matrix

    nodes, weights = gauss_legendre()
    for j in range(1, lags):
        for x, w in zip(nodes, weights):
            frac = 0.5 * (x + 1.0)
            matrix = _panel_matrix(evaluator, panels, points, (j + frac) * h) * (0.5 * h * w)
            a[j] += frac * matrix
            b[j] += (1.0 - frac) * matrix
    return a, b


def _overlap(panel: BoundaryArc, arc: Optional[BoundaryArc]) -> float:
    if arc is None:
        return 0.0
    fraction = 1.0
    for (lo, hi), (a, b) in zip(panel.bounds, arc.bounds):
        fraction *= max(0.0, min(hi, b) - max(lo, a)) / (hi - lo)
    return fraction


def _history(a: np.ndarray, b: np.ndarray, sources: np.ndarray, level: int) -> np.ndarray:
    """Σ_{k<level} (a_{level−1−k} + b_{level−k}) g^k，b_{level} 只在 k ≥ 1 時出現"""
    total = np.zeros(a.shape[1])
    for k in range(level):
        weight = a[level - 1 - k]
        if k >= 1:
            weight = weight + b[level - k]
        total += weight @ sources[k]
    return total


def representation_solve(
    evaluator: KernelEvaluator,
    u0: InitialData,
    schedule: BoundarySchedule,
    horizon: float,
    q: float,
    fixed_point_tol: float = 1e-12,
    panels: int = 32,
    steps: int = 50,
    eval_points: Optional[np.ndarray] = None,
    t_offset: float = 0.0,
    max_iter: int = 200,
) -> RepresentationTrace:
    """以 Picard 迭代求表示式在邊界上的不動點，再於觀測點求值

    Args:
        evaluator (KernelEvaluator): 熱核
        u0 (InitialData): 初始（或 t_offset 時刻的）資料
        schedule (BoundarySchedule): 輻射邊界排程
        horizon (float): 積分長度
        q (float): 非線性指數
        fixed_point_tol (float): Picard 迭代的收斂門檻（相對）
        panels (int): 每個切向座標的面板數
        steps (int): 時間層數
        eval_points (Optional[np.ndarray]): 觀測點 (m, n)，預設為面板中心
        t_offset (float): 起始時刻 T
        max_iter (int): 每層的最大迭代次數

    Raises:
        UnsupportedDomainError: 區域不是長方體
        DomainError: 參數超出範圍
        ConvergenceError: Picard 迭代的殘差上升或用盡迭代次數

    Returns:
        RepresentationTrace: 邊界值的時間軌跡與觀測點的值
    """
    domain = schedule.domain
    if domain != evaluator.domain:
        raise UnsupportedDomainError("熱核與排程的區域不同")
    if not horizon > 0 or t_offset < 0:
        raise DomainError(f"需要 horizon > 0 且 t_offset ≥ 0，收到 horizon={horizon}, t_offset={t_offset}")
    if not q > 1:
        raise DomainError(f"q 必須 > 1，收到 {q}")
    if steps < 1:
        raise DomainError(f"時間層數至少為 1，收到 {steps}")

    h = horizon / steps
    times = np.arange(steps + 1) * h
    start_arc = schedule.arc_at(t_offset)
    panel_list = [] if start_arc is None else make_panels(start_arc, panels)

    centers = np.array(
        [
            domain.boundary_point(p.edge_id, *[0.5 * (lo + hi) for lo, hi in p.bounds])
            for p in panel_list
        ]
    ).reshape(len(panel_list), domain.n)
    observe = centers if eval_points is None else np.atleast_2d(np.asarray(eval_points, dtype=float))
    if not np.all(domain.contains(observe)):
        raise ValidationError("觀測點必須位於區域內")

    if not panel_list:
        values = np.zeros((steps + 1, 0))
        final = u0.exact_diffusion(domain, observe, horizon)
        return RepresentationTrace(times, centers, values, observe, final, horizon, t_offset, [0] * steps)

    chi = np.array([[_overlap(p, schedule.arc_at(t_offset + t)) for p in panel_list] for t in times])
    a, b = lag_weights(evaluator, panel_list, centers, h, steps)

    boundary = np.zeros((steps + 1, len(panel_list)))
    boundary[0] = u0.evaluate(domain, centers)
    sources = np.zeros_like(boundary)
    sources[0] = chi[0] * boundary[0] ** q
    iterations: List[int] = []

    for level in range(1, steps + 1):
        known = u0.exact_diffusion(domain, centers, times[level]) + _history(a, b, sources, level)
        u = boundary[level - 1].copy()
        previous = math.inf
        for count in range(1, max_iter + 1):
            updated = known + b[0] @ (chi[level] * u**q)
            change = float(np.max(np.abs(updated - u)))
            u = updated
            scale = max(1.0, float(np.max(np.abs(u))))
            if not math.isfinite(change):
                raise ConvergenceError(f"horizon={horizon} 的 Picard 迭代在 t={times[level]:.6g} 發散")
            if change <= fixed_point_tol * scale:
                break
            if change > previous and change > 100.0 * fixed_point_tol * scale:
                raise ConvergenceError(
                    f"horizon={horizon} 太長：t={times[level]:.6g} 的 Picard 迭代殘差上升（{previous:.3g} → {change:.3g}）"
                )
            previous = change
        else:
            raise ConvergenceError(f"horizon={horizon} 的 Picard 迭代在 t={times[level]:.6g} 用盡 {max_iter} 次")

        iterations.append(count)
        boundary[level] = u
        sources[level] = chi[level] * u**q

    if eval_points is None:
        final = boundary[-1].copy()
    else:
        a_eval, b_eval = lag_weights(evaluator, panel_list, observe, h, steps)
        final = (
            u0.exact_diffusion(domain, observe, horizon)
            + _history(a_eval, b_eval, sources, steps)
            + b_eval[0] @ sources[steps]
        )

    return RepresentationTrace(times, centers, boundary, observe, final, horizon, t_offset, iterations)
