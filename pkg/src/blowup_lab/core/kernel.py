"""自由熱核 Φ 與長方體上的 Neumann 熱核 N

一維區間 [0, L] 上的 Neumann 熱核有兩種等價的級數：
- 鏡像法：N_L(x,y,t) = Σ_k [Φ₁(x−y−2kL, t) + Φ₁(x+y−2kL, t)]，小 t 時收斂快
- 特徵函數展開：1/L + (2/L) Σ_m cos(mπx/L) cos(mπy/L) e^{−(mπ/L)² t}，大 t 時收斂快

長方體的熱核為各軸一維熱核的乘積。鏡像法以 |x−y| 與 x+y 求和，
因此 N(x,y,t) 與 N(y,x,t) 逐位元相等。
"""

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from scipy.special import erf

from blowup_lab.core.errors import DomainError, OutOfValidityWarning, UnsupportedDomainError
from blowup_lab.core.geometry import BoundaryArc, Domain
from blowup_lab.core.quadrature import graded_gauss, windowed_gauss
from blowup_lab.enums.default_value import DefaultValue
from blowup_lab.enums.numerics import BoundaryQuadrature, KernelMethod

ArrayLike = Union[float, np.ndarray]

TRUNCATION_EPS: float = DefaultValue.TRUNCATION_EPS.value

# 與邊界座標比較時容許的捨入誤差（相對於邊長）
_COORD_TOL = 1e-12


def _squared_norm(x: ArrayLike, n: Optional[int]) -> Tuple[np.ndarray, int]:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        return arr * arr, n or 1
    if n == 1 and arr.shape[-1] != 1:
        return arr * arr, 1
    dim = n or arr.shape[-1]
    if arr.shape[-1] != dim:
        raise DomainError(f"位移向量的維度 {arr.shape[-1]} 與 n={dim} 不符")
    return np.sum(arr * arr, axis=-1), dim


def phi(x: ArrayLike, t: float, n: Optional[int] = None) -> ArrayLike:
    """自由空間熱核 Φ(x,t) = (4πt)^{−n/2} exp(−|x|²/4t)

    Args:
        x (ArrayLike): 位移向量，最後一維為空間維度；純量代表 |x|
        t (float): 時間
        n (Optional[int]): 空間維度，預設由 x 的形狀推得（純量為 1）

    Raises:
        DomainError: t ≤ 0

    Returns:
        ArrayLike: Φ(x,t)
    """
    if not t > 0:
        raise DomainError(f"Φ 只定義在 t > 0，收到 t={t}")
    r2, dim = _squared_norm(x, n)
    value = (4.0 * math.pi * t) ** (-0.5 * dim) * np.exp(-r2 / (4.0 * t))
    return float(value) if np.ndim(value) == 0 else value


def log_phi(x: ArrayLike, t: float, n: Optional[int] = None) -> ArrayLike:
    """ln Φ(x,t)，Φ 下溢時仍有限"""
    if not t > 0:
        raise DomainError(f"Φ 只定義在 t > 0，收到 t={t}")
    r2, dim = _squared_norm(x, n)
    value = -0.5 * dim * math.log(4.0 * math.pi * t) - r2 / (4.0 * t)
    return float(value) if np.ndim(value) == 0 else value


def image_count_for(t: float, L: float, eps: float = TRUNCATION_EPS) -> int:  # noqa: N803
    """鏡像項數 K：第一個被省略的鏡像距離平方 ≥ 4t·ln(1/ε)"""
    return max(1, math.ceil(math.sqrt(t * math.log(1.0 / eps)) / L))


def eigen_count_for(t: float, L: float, eps: float = TRUNCATION_EPS) -> int:  # noqa: N803
    """特徵函數項數 M：e^{−(Mπ/L)² t} < ε"""
    return max(1, math.ceil(L / math.pi * math.sqrt(math.log(1.0 / eps) / t)))


def _check_interval_args(t: float, L: float, *coords: ArrayLike) -> None:  # noqa: N803
    if not t > 0:
        raise DomainError(f"熱核只定義在 t > 0，收到 t={t}")
    if not L > 0:
        raise DomainError(f"區間長度必須為正，收到 L={L}")
    tol = _COORD_TOL * L
    for coord in coords:
        arr = np.asarray(coord, dtype=float)
        if arr.size and (np.min(arr) < -tol or np.max(arr) > L + tol):
            raise DomainError(f"座標超出區間 [0, {L}]")


def _resolve_method(method: KernelMethod, t: float, t_switch: float) -> KernelMethod:
    if method is KernelMethod.AUTO:
        return KernelMethod.IMAGES if t <= t_switch else KernelMethod.EIGEN
    return method


def _images(x: np.ndarray, y: np.ndarray, t: float, L: float, K: int) -> np.ndarray:  # noqa: N803
    d = np.abs(x - y)
    s = x + y
    total = np.zeros(np.broadcast(d, s).shape)
    inv = 1.0 / (4.0 * t)
    for k in range(-K, K + 1):
        shift = 2.0 * k * L
        total += np.exp(-((d - shift) ** 2) * inv) + np.exp(-((s - shift) ** 2) * inv)
    return total / math.sqrt(4.0 * math.pi * t)


def _eigen(x: np.ndarray, y: np.ndarray, t: float, L: float, M: int) -> np.ndarray:  # noqa: N803
    total = np.zeros(np.broadcast(x, y).shape)
    for m in range(M, 0, -1):
        k = m * math.pi / L
        total += np.cos(k * x) * np.cos(k * y) * math.exp(-k * k * t)
    return (1.0 + 2.0 * total) / L


def interval_kernel(
    x: ArrayLike,
    y: ArrayLike,
    t: float,
    L: float,  # noqa: N803
    method: KernelMethod = KernelMethod.AUTO,
    image_count: Optional[int] = None,
    eigen_count: Optional[int] = None,
    t_switch: Optional[float] = None,
    eps: float = TRUNCATION_EPS,
) -> ArrayLike:
    """一維區間 [0, L] 上的 Neumann 熱核 N_L(x,y,t)

    Args:
        x (ArrayLike): 觀測點
        y (ArrayLike): 源點
        t (float): 時間
        L (float): 區間長度
        method (KernelMethod): 鏡像法、特徵函數展開或依 t 自動選擇
        image_count (Optional[int]): 指定鏡像項數 K
        eigen_count (Optional[int]): 指定特徵函數項數 M
        t_switch (Optional[float]): 自動選擇時的切換時間，預設 0.25·L²
        eps (float): 自動決定截斷項數時的誤差門檻

    Raises:
        DomainError: t ≤ 0 或座標超出 [0, L]

    Returns:
        ArrayLike: N_L(x,y,t)
    """
    _check_interval_args(t, L, x, y)
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    switch = 0.25 * L * L if t_switch is None else t_switch

    if _resolve_method(method, t, switch) is KernelMethod.IMAGES:
        value = _images(xa, ya, t, L, image_count or image_count_for(t, L, eps))
    else:
        value = _eigen(xa, ya, t, L, eigen_count or eigen_count_for(t, L, eps))
    return float(value) if value.ndim == 0 else value


def interval_kernel_integral(
    x: ArrayLike,
    a: float,
    b: float,
    t: float,
    L: float,  # noqa: N803
    method: KernelMethod = KernelMethod.AUTO,
    image_count: Optional[int] = None,
    eigen_count: Optional[int] = None,
    t_switch: Optional[float] = None,
    eps: float = TRUNCATION_EPS,
) -> ArrayLike:
    """閉式計算 ∫_a^b N_L(x,y,t) dy（鏡像法用 erf，特徵函數展開用 sin）"""
    _check_interval_args(t, L, x, a, b)
    xa = np.asarray(x, dtype=float)
    switch = 0.25 * L * L if t_switch is None else t_switch

    if _resolve_method(method, t, switch) is KernelMethod.IMAGES:
        K = image_count or image_count_for(t, L, eps)  # noqa: N806
        scale = 1.0 / (2.0 * math.sqrt(t))
        total = np.zeros_like(xa)
        for k in range(-K, K + 1):
            shift = 2.0 * k * L
            total += erf((xa - a - shift) * scale) - erf((xa - b - shift) * scale)
            total += erf((xa + b - shift) * scale) - erf((xa + a - shift) * scale)
        value = 0.5 * total
    else:
        M = eigen_count or eigen_count_for(t, L, eps)  # noqa: N806
        total = np.zeros_like(xa)
        for m in range(M, 0, -1):
            k = m * math.pi / L
            total += np.cos(k * xa) * math.exp(-k * k * t) * (math.sin(k * b) - math.sin(k * a)) / k
        value = ((b - a) + 2.0 * total) / L
    return float(value) if np.ndim(value) == 0 else value


@dataclass(frozen=True)
class KernelEvaluator:
    """長方體上的 Neumann 熱核 N(x,y,t) = Π_i N_{L_i}(x_i, y_i, t)

    Attributes:
        domain (Domain): 長方體區域（圓盤不支援）
        method (KernelMethod): 級數選擇方式
        image_count (Optional[int]): 固定鏡像項數，None 表示依誤差門檻自動決定
        eigen_count (Optional[int]): 固定特徵函數項數
        t_switch (Optional[float]): 自動模式的切換時間，預設 0.25·L²_min
        eps (float): 截斷誤差門檻
    """

    domain: Domain
    method: KernelMethod = KernelMethod.AUTO
    image_count: Optional[int] = None
    eigen_count: Optional[int] = None
    t_switch: Optional[float] = None
    eps: float = TRUNCATION_EPS

    def __post_init__(self) -> None:
        if not self.domain.is_box:
            raise UnsupportedDomainError(f"{self.domain.kind.value} 沒有精確的 Neumann 熱核")
        for name in ("image_count", "eigen_count"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise DomainError(f"{name} 必須 ≥ 1，收到 {value}")

    @property
    def switch_time(self) -> float:
        if self.t_switch is not None:
            return self.t_switch
        return 0.25 * min(self.domain.lengths) ** 2

    def _options(self) -> dict:
        return {
            "method": self.method,
            "image_count": self.image_count,
            "eigen_count": self.eigen_count,
            "t_switch": self.switch_time,
            "eps": self.eps,
        }

    def axis_kernel(self, axis: int, x: ArrayLike, y: ArrayLike, t: float) -> ArrayLike:
        return interval_kernel(x, y, t, self.domain.lengths[axis], **self._options())

    def axis_integral(self, axis: int, x: ArrayLike, a: float, b: float, t: float) -> ArrayLike:
        return interval_kernel_integral(x, a, b, t, self.domain.lengths[axis], **self._options())

    def __call__(self, x: np.ndarray, y: np.ndarray, t: float) -> ArrayLike:
        xa = np.asarray(x, dtype=float)
        ya = np.asarray(y, dtype=float)
        n = self.domain.n
        if xa.shape[-1] != n or ya.shape[-1] != n:
            raise DomainError(f"點的維度必須為 {n}")

        value: ArrayLike = 1.0
        for axis in range(n):
            value = value * self.axis_kernel(axis, xa[..., axis], ya[..., axis], t)
        return value

    def green(self, x: np.ndarray, t: float, y: np.ndarray, s: float) -> ArrayLike:
        """Neumann Green 函數 G(x,t,y,s) = N(x,y,t−s)"""
        if not t > s:
            raise DomainError(f"Green 函數需要 t > s，收到 t={t}, s={s}")
        return self(x, y, t - s)


def box_kernel(evaluator: KernelEvaluator, x: np.ndarray, y: np.ndarray, t: float) -> ArrayLike:
    """長方體上的 Neumann 熱核"""
    return evaluator(x, y, t)


def surface_integral(
    evaluator: KernelEvaluator,
    gamma: BoundaryArc,
    x: np.ndarray,
    t: float,
    quadrature: BoundaryQuadrature = BoundaryQuadrature.GAUSS_LEGENDRE,
) -> np.ndarray:
    """∫_Γ N(x,y,t) dS(y)，x 的形狀為 (m, n)

    Γ 位於長方體的一個面上，熱核在法向為常數因子，切向各自積分。
    """
    domain = evaluator.domain
    face = domain.face(gamma.edge_id)
    y_normal = domain.lengths[face.normal_axis] if face.upper else 0.0

    value = np.asarray(evaluator.axis_kernel(face.normal_axis, x[:, face.normal_axis], y_normal, t))
    for axis, (lo, hi) in zip(face.tangent_axes, gamma.bounds):
        if quadrature is BoundaryQuadrature.EXACT:
            factor = np.asarray(evaluator.axis_integral(axis, x[:, axis], lo, hi, t))
        else:
            factor = np.array([_gauss_axis_integral(evaluator, axis, xi, lo, hi, t) for xi in x[:, axis]])
        value = value * factor
    return value


def _gauss_axis_integral(
    evaluator: KernelEvaluator, axis: int, x: float, lo: float, hi: float, t: float
) -> float:
    """以複合 Gauss–Legendre 計算 ∫_lo^hi N_L(x,y,t) dy

    區段寬度 ≤ min(√t, (hi−lo)/4)，只在 x 及其鏡像附近的窗口內取點。
    """
    L = evaluator.domain.lengths[axis]  # noqa: N806
    K = image_count_for(t, L, evaluator.eps) + 1  # noqa: N806
    centers = [c + 2.0 * k * L for k in range(-K, K + 1) for c in (x, -x)]
    half_width = 2.0 * math.sqrt(t * math.log(1.0 / evaluator.eps))
    nodes, weights = windowed_gauss(lo, hi, centers, half_width, min(math.sqrt(t), 0.25 * (hi - lo)))
    if nodes.size == 0:
        return 0.0
    values = evaluator.axis_kernel(axis, np.full_like(nodes, x), nodes, t)
    return float(np.dot(weights, values))


def boundary_time_integral(
    evaluator: KernelEvaluator,
    gamma: Optional[BoundaryArc],
    x: np.ndarray,
    t: float,
    quadrature: BoundaryQuadrature = BoundaryQuadrature.GAUSS_LEGENDRE,
    levels: int = 24,
) -> ArrayLike:
    """邊界-時間積分 ∫₀^t ∫_Γ N(x,y,t−τ) dS(y) dτ

    以 t−τ = σ² 換元消去 τ → t 端的 (t−τ)^{−1/2} 奇異性，σ 方向使用往 0 加密的
    Gauss–Legendre 積分。

    Args:
        evaluator (KernelEvaluator): 熱核
        gamma (Optional[BoundaryArc]): 邊界弧，None 視為空集合
        x (np.ndarray): 觀測點，形狀 (n,) 或 (m, n)
        t (float): 時間上限
        quadrature (BoundaryQuadrature): 切向積分方式
        levels (int): σ 方向的加密層數

    Raises:
        DomainError: t ≤ 0

    Returns:
        ArrayLike: 積分值（x 為單點時回傳 float）
    """
    if not t > 0:
        raise DomainError(f"邊界-時間積分需要 t > 0，收到 t={t}")
    if t > 1.0:
        warnings.warn(f"t={t} > 1，估計式只在 t ≤ 1 成立", OutOfValidityWarning, stacklevel=2)

    points = np.atleast_2d(np.asarray(x, dtype=float))
    if gamma is None or gamma.measure <= 0:
        result = np.zeros(points.shape[0])
    else:
        gamma.validate_on(evaluator.domain)
        sigmas, weights = graded_gauss(0.0, math.sqrt(t), levels=levels)
        result = np.zeros(points.shape[0])
        for sigma, weight in zip(sigmas, weights):
            result += weight * 2.0 * sigma * surface_integral(evaluator, gamma, points, sigma * sigma, quadrature)

    if np.ndim(x) == 1:
        return float(result[0])
    return result
