"""數值積分與補償加總的共用工具"""

import math
from functools import lru_cache
from typing import Iterable, List, Sequence, Tuple

import numpy as np

GAUSS_ORDER = 8


@lru_cache(maxsize=32)
def gauss_legendre(order: int = GAUSS_ORDER) -> Tuple[np.ndarray, np.ndarray]:
    """[-1, 1] 上的 Gauss–Legendre 節點與權重"""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def composite_gauss(
    a: float, b: float, max_width: float, order: int = GAUSS_ORDER
) -> Tuple[np.ndarray, np.ndarray]:
    """將 [a, b] 切成寬度不超過 max_width 的等寬區段，每段使用 order 點 Gauss–Legendre

    Returns:
        Tuple[np.ndarray, np.ndarray]: 節點與權重
    """
    if b <= a:
        return np.empty(0), np.empty(0)
    panels = max(1, math.ceil((b - a) / max_width))
    edges = np.linspace(a, b, panels + 1)
    return _panels_to_nodes(edges[:-1], edges[1:], order)


def graded_gauss(
    a: float, b: float, levels: int = 24, ratio: float = 0.5, order: int = GAUSS_ORDER
) -> Tuple[np.ndarray, np.ndarray]:
    """往左端點 a 幾何加密的 Gauss–Legendre 積分

    區段為 [a + (b−a)rᵏ⁺¹, a + (b−a)rᵏ]，最後一段為 [a, a + (b−a)r^levels]。
    """
    if b <= a:
        return np.empty(0), np.empty(0)
    breaks = a + (b - a) * ratio ** np.arange(levels, -1, -1, dtype=float)
    edges = np.concatenate(([a], breaks))
    return _panels_to_nodes(edges[:-1], edges[1:], order)


def windowed_gauss(
    a: float,
    b: float,
    centers: Iterable[float],
    half_width: float,
    max_width: float,
    order: int = GAUSS_ORDER,
) -> Tuple[np.ndarray, np.ndarray]:
    """只在 centers 附近 ±half_width 的窗口內積分 [a, b]

    被積函數在窗口外可忽略時（例如窄高斯函數與其鏡像）使用，
    窗口會先與 [a, b] 取交集並合併重疊部分。
    """
    windows: List[Tuple[float, float]] = []
    for c in sorted(centers):
        lo, hi = max(a, c - half_width), min(b, c + half_width)
        if lo >= hi:
            continue
        if windows and lo <= windows[-1][1]:
            windows[-1] = (windows[-1][0], max(windows[-1][1], hi))
        else:
            windows.append((lo, hi))

    nodes: List[np.ndarray] = []
    weights: List[np.ndarray] = []
    for lo, hi in windows:
        x, w = composite_gauss(lo, hi, max_width, order)
        nodes.append(x)
        weights.append(w)

    if not nodes:
        return np.empty(0), np.empty(0)
    return np.concatenate(nodes), np.concatenate(weights)


def _panels_to_nodes(lo: np.ndarray, hi: np.ndarray, order: int) -> Tuple[np.ndarray, np.ndarray]:
    ref_nodes, ref_weights = gauss_legendre(order)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = mid[:, None] + half[:, None] * ref_nodes[None, :]
    weights = half[:, None] * ref_weights[None, :]
    return nodes.ravel(), weights.ravel()


class CompensatedSum:
    """Kahan 補償加總，維持比直接 += 更精確的累加值"""

    def __init__(self) -> None:
        self.total = 0.0
        self.carry = 0.0

    def add(self, value: float) -> None:
        value += self.carry
        previous = self.total
        self.total += value
        # 記錄這次加總遺失的低位
        self.carry = value - (self.total - previous)

    def extend(self, values: Iterable[float]) -> None:
        for value in values:
            self.add(value)

    @property
    def value(self) -> float:
        return self.total + self.carry


def compensated_cumsum(values: Sequence[float]) -> np.ndarray:
    """以 Kahan 加總計算累積和

    分段以 math.fsum 精確加總後再串接，每段內部的累積和以段落起點為基準，
    使大量微小增量疊加在大數上時不失去精度。
    """
    array = np.asarray(values, dtype=float)
    out = np.empty_like(array)
    chunk = 4096
    running = CompensatedSum()
    for start in range(0, array.size, chunk):
        block = array[start : start + chunk]
        base = running.value
        local = _kahan_prefix(block)
        out[start : start + block.size] = base + local
        running.add(math.fsum(block))
    return out


def _kahan_prefix(block: np.ndarray) -> np.ndarray:
    out = np.empty_like(block)
    total = 0.0
    carry = 0.0
    for i, value in enumerate(block.tolist()):
        y = value - carry
        t = total + y
        carry = (t - total) - y
        total = t
        out[i] = total
    return out
