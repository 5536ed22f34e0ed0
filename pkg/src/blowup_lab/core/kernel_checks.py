"""Neumann 熱核定義性質的數值檢查

每個函式回傳量測到的誤差（最大值），門檻的判斷交給測試或驗收套件。
"""

import math
from typing import Iterable, List, Tuple

import numpy as np

from blowup_lab.core.geometry import BoundaryArc, Domain
from blowup_lab.core.kernel import KernelEvaluator, boundary_time_integral, interval_kernel
from blowup_lab.core.quadrature import composite_gauss
from blowup_lab.enums.numerics import BoundaryQuadrature, KernelMethod


def sample_points(domain: Domain, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(size=(count, domain.n)) * np.asarray(domain.lengths)


def sample_boundary_points(domain: Domain, count: int, seed: int) -> List[Tuple[int, np.ndarray]]:
    """在各邊（面）上均勻輪流取點，回傳 (邊編號, 點)"""
    rng = np.random.default_rng(seed)
    samples: List[Tuple[int, np.ndarray]] = []
    for i in range(count):
        edge_id = i % domain.edge_count
        coords = [rng.uniform(0.0, length) for length in domain.edge_extent(edge_id)]
        samples.append((edge_id, domain.boundary_point(edge_id, *coords)))
    return samples


def normalization_error(evaluator: KernelEvaluator, x: np.ndarray, t: float) -> float:
    """|∫_Ω N(x,y,t) dy − 1|

    以張量複合 Gauss–Legendre 積分，每軸的區段寬度 ≤ √t/2。
    """
    domain = evaluator.domain
    value = 1.0
    for axis, length in enumerate(domain.lengths):
        nodes, weights = composite_gauss(0.0, length, 0.5 * math.sqrt(t))
        values = evaluator.axis_kernel(axis, np.full_like(nodes, x[axis]), nodes, t)
        value *= float(np.dot(weights, values))
    return abs(value - 1.0)


def symmetry_error(evaluator: KernelEvaluator, x: np.ndarray, y: np.ndarray, t: float) -> float:
    """max |N(x,y,t) − N(y,x,t)|，x 與 y 的形狀為 (m, n)"""
    forward = np.asarray(evaluator(x, y, t))
    backward = np.asarray(evaluator(y, x, t))
    return float(np.max(np.abs(forward - backward)))


def boundary_flux(
    evaluator: KernelEvaluator, edge_id: int, x: np.ndarray, y: np.ndarray, t: float, h: float = 1e-4
) -> float:
    """邊界點 x 上的法向導數 ∂N/∂n(x)，以往內的二階單側差分估計"""
    domain = evaluator.domain
    inward = -domain.outward_normal(edge_id)
    f0, f1, f2 = (float(evaluator(x + k * h * inward, y, t)) for k in range(3))
    # 往內的導數取負號即為外法向導數
    return -(-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h)


def heat_residual(evaluator: KernelEvaluator, x: np.ndarray, y: np.ndarray, t: float) -> float:
    """(∂_t − Δ_x)N 的相對殘差，以中央差分估計

    時間步長 1e-4·t、空間步長 1e-3·√t，殘差相對於 max(|∂_t N|, N/t)。
    """
    dt = 1e-4 * t
    h = 1e-3 * math.sqrt(t)
    center = float(evaluator(x, y, t))
    d_t = (float(evaluator(x, y, t + dt)) - float(evaluator(x, y, t - dt))) / (2.0 * dt)

    laplacian = 0.0
    for axis in range(evaluator.domain.n):
        offset = np.zeros_like(x)
        offset[axis] = h
        laplacian += (float(evaluator(x + offset, y, t)) - 2.0 * center + float(evaluator(x - offset, y, t))) / h**2

    scale = max(abs(d_t), center / t)
    return abs(d_t - laplacian) / scale if scale > 0 else 0.0


def images_vs_eigen(L: float, times: Iterable[float], grid: int = 41) -> float:  # noqa: N803
    """鏡像法與特徵函數展開在網格點上的最大差"""
    coords = np.linspace(0.0, L, grid)
    x, y = np.meshgrid(coords, coords, indexing="ij")
    worst = 0.0
    for t in times:
        images = interval_kernel(x, y, t, L, KernelMethod.IMAGES)
        eigen = interval_kernel(x, y, t, L, KernelMethod.EIGEN)
        worst = max(worst, float(np.max(np.abs(np.asarray(images) - np.asarray(eigen)))))
    return worst


def quadrature_cross_check(
    evaluator: KernelEvaluator, gamma: BoundaryArc, x: np.ndarray, t: float
) -> float:
    """Gauss–Legendre 與 erf 閉式兩種切向積分所得邊界-時間積分的最大差"""
    gauss = np.asarray(boundary_time_integral(evaluator, gamma, x, t, BoundaryQuadrature.GAUSS_LEGENDRE))
    exact = np.asarray(boundary_time_integral(evaluator, gamma, x, t, BoundaryQuadrature.EXACT))
    return float(np.max(np.abs(gauss - exact)))


def bti_scaling_slope(
    evaluator: KernelEvaluator, arcs: List[BoundaryArc], x: np.ndarray, t: float
) -> float:
    """固定 x 與 t 時，log(bti) 對 log|Γ| 的最小二乘斜率"""
    measures = np.array([arc.measure for arc in arcs])
    values = np.array(
        [float(boundary_time_integral(evaluator, arc, x, t, BoundaryQuadrature.EXACT)) for arc in arcs]
    )
    slope, _ = np.polyfit(np.log(measures), np.log(values), 1)
    return float(slope)


def corner_multiplicity(evaluator: KernelEvaluator, t: float) -> float:
    """原點角落 N(0,0,t)·(4πt)^{n/2}，t → 0⁺ 時趨近 2ⁿ"""
    origin = np.zeros(evaluator.domain.n)
    return float(evaluator(origin, origin, t)) * (4.0 * math.pi * t) ** (0.5 * evaluator.domain.n)
