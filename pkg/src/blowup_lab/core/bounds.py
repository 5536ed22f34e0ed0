"""固定輻射邊界下已知的爆破時間上下界與尺度律"""

import math
from typing import Tuple

import numpy as np

from blowup_lab.core.errors import DomainError


def upper_bound(u0_values: np.ndarray, weights: np.ndarray, q: float, gamma1_area: float) -> float:
    """T* ≤ (1/((q−1)|Γ₁|)) ∫_Ω u₀^{1−q}

    Args:
        u0_values (np.ndarray): u₀ 在積分節點上的值
        weights (np.ndarray): 積分權重（例如對偶格體積）
        q (float): 非線性指數
        gamma1_area (float): |Γ₁|

    Returns:
        float: 上界；u₀ 有零點時為 ∞
    """
    if not q > 1 or not gamma1_area > 0:
        raise DomainError(f"需要 q > 1 且 |Γ₁| > 0，收到 q={q}, |Γ₁|={gamma1_area}")
    values = np.asarray(u0_values, dtype=float)
    if np.any(values <= 0):
        return math.inf
    return float(np.dot(weights, values ** (1.0 - q))) / ((q - 1.0) * gamma1_area)


def lower_bound_old(C: float, q: float, M0: float, gamma1_area: float, n: int) -> float:  # noqa: N803
    """(C/(q−1))·ln(1 + (2M₀)^{−4(q−1)}·|Γ₁|^{−2/(n−1)})"""
    if not q > 1 or not gamma1_area > 0 or not M0 > 0 or n < 2:
        raise DomainError("需要 q > 1、|Γ₁| > 0、M₀ > 0 且 n ≥ 2")
    log_term = -4.0 * (q - 1.0) * math.log(2.0 * M0) - 2.0 / (n - 1) * math.log(gamma1_area)
    return C / (q - 1.0) * math.log1p(math.exp(log_term)) if log_term < 700 else C / (q - 1.0) * log_term


def scaling_envelope(gamma1_area: float, n: int) -> Tuple[float, float]:
    """|Γ₁| → 0 時 T* 的上下界階數（不含常數）

    2D 為 (|Γ₁|^{−1} / ln|Γ₁|^{−1}, |Γ₁|^{−1})，n ≥ 3 為 (|Γ₁|^{−1/(n−1)}, |Γ₁|^{−1})。
    """
    if not 0 < gamma1_area < 1:
        raise DomainError(f"尺度律只對 0 < |Γ₁| < 1 有意義，收到 {gamma1_area}")
    inverse = 1.0 / gamma1_area
    if n == 2:
        return inverse / math.log(inverse), inverse
    return inverse ** (1.0 / (n - 1)), inverse


def q_asymptotic_order(q: float) -> float:
    """q → 1⁺ 時 T* 的階數 1/(q−1)"""
    if not q > 1:
        raise DomainError(f"q 必須 > 1，收到 {q}")
    return 1.0 / (q - 1.0)
