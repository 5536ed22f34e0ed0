"""遞增數列的 Λ_j = (M_j − M_{j−1}) / M_j^q 實驗

有限 J 只能提供證據：回報 jΛ_j 的累積最小值與每十倍的比值，不宣稱極限。
所有量都以對數形式計算，幾何或對數數列在大 j 時不會下溢。
"""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from blowup_lab.core.errors import DomainError, ValidationError
from blowup_lab.core.quadrature import compensated_cumsum

LogFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SequenceSpec:
    """正且遞增的數列 M_j（j ≥ 1）

    Attributes:
        label (str): 名稱
        q (float): 指數，> 1
        log_value (LogFunction): j ↦ ln M_j
        log_increment (LogFunction): j ↦ ln(M_j − M_{j−1})
    """

    label: str
    q: float
    log_value: LogFunction
    log_increment: LogFunction

    def __post_init__(self) -> None:
        if not self.q > 1:
            raise DomainError(f"q 必須 > 1，收到 {self.q}")

    def log_lambda(self, j: np.ndarray) -> np.ndarray:
        """ln Λ_j，數列不是正且遞增時拋出 ValidationError"""
        j = np.asarray(j, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_inc = np.asarray(self.log_increment(j), dtype=float)
            log_val = np.asarray(self.log_value(j), dtype=float)
        bad = ~np.isfinite(log_inc) | ~np.isfinite(log_val)
        if np.any(bad):
            first = float(j[np.argmax(bad)])
            raise ValidationError(f"數列 {self.label} 在 j={first:.6g} 不是正且嚴格遞增")
        return log_inc - self.q * log_val

    def values(self, j: np.ndarray) -> np.ndarray:
        return np.exp(self.log_value(np.asarray(j, dtype=float)))

    @classmethod
    def from_values(cls, label: str, q: float, values: Sequence[float]) -> "SequenceSpec":
        """由 M_0, M_1, ..., M_J 建立（只在 j ≤ J 有定義）"""
        array = np.asarray(values, dtype=float)
        if array.size < 2:
            raise ValidationError("至少需要 M_0 與 M_1")
        increments = np.diff(array)
        if np.any(increments <= 0) or np.any(array[1:] <= 0):
            raise ValidationError(f"數列 {label} 必須正且嚴格遞增")
        return cls._tabulated(label, q, array, np.concatenate(([math.nan], increments)))

    @classmethod
    def from_partial_sums(
        cls, label: str, q: float, increments: Sequence[float], start: float = 0.0
    ) -> "SequenceSpec":
        """M_j = start + Σ_{i≤j} d_i，以補償加總累積，差值直接使用 d_j"""
        steps = np.asarray(increments, dtype=float)
        if np.any(steps <= 0):
            raise ValidationError(f"數列 {label} 的增量必須為正")
        values = np.concatenate(([start], start + compensated_cumsum(steps)))
        if np.any(values[1:] <= 0):
            raise ValidationError(f"數列 {label} 必須為正")
        return cls._tabulated(label, q, values, np.concatenate(([math.nan], steps)))

    @classmethod
    def _tabulated(cls, label: str, q: float, values: np.ndarray, increments: np.ndarray) -> "SequenceSpec":
        last = values.size - 1

        def index(j: np.ndarray) -> np.ndarray:
            j = np.asarray(j)
            if np.any(j < 1) or np.any(j > last):
                raise DomainError(f"數列 {label} 只在 1 ≤ j ≤ {last} 有定義")
            return j.astype(int)

        return cls(
            label,
            q,
            lambda j: np.log(values[index(j)]),
            lambda j: np.log(increments[index(j)]),
        )


def linear(q: float = 2.0) -> SequenceSpec:
    """M_j = j"""
    return SequenceSpec("linear", q, np.log, lambda j: np.zeros_like(j, dtype=float))


def polynomial(p: float = 2.0, q: float = 2.0) -> SequenceSpec:
    """M_j = j^p，增量 j^p(1 − (1−1/j)^p)"""
    if not p > 0:
        raise DomainError(f"p 必須 > 0，收到 {p}")

    def log_increment(j: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return p * np.log(j) + np.log(-np.expm1(p * np.log1p(-1.0 / j)))

    return SequenceSpec(f"polynomial(p={p:g})", q, lambda j: p * np.log(j), log_increment)


def geometric(ratio: float = 2.0, q: float = 2.0) -> SequenceSpec:
    """M_j = r^j"""
    if not ratio > 1:
        raise DomainError(f"公比必須 > 1，收到 {ratio}")
    log_r = math.log(ratio)
    return SequenceSpec(
        f"geometric(r={ratio:g})",
        q,
        lambda j: j * log_r,
        lambda j: j * log_r + math.log1p(-1.0 / ratio),
    )


def saturating(q: float = 2.0) -> SequenceSpec:
    """M_j = 2 − 2^{−j}（有界），增量 2^{−j}"""
    log2 = math.log(2.0)
    return SequenceSpec(
        "saturating",
        q,
        lambda j: log2 + np.log1p(-np.exp2(-j - 1.0)),
        lambda j: -j * log2,
    )


def logarithmic(q: float = 2.0) -> SequenceSpec:
    """M_j = ln(j+1)，增量 ln(1 + 1/j)"""
    return SequenceSpec("logarithmic", q, lambda j: np.log(np.log1p(j)), lambda j: np.log(np.log1p(1.0 / j)))


def builtin_sequences(q: float = 2.0) -> List[SequenceSpec]:
    return [linear(q), polynomial(2.0, q), geometric(2.0, q), saturating(q), logarithmic(q)]


@dataclass
class SequenceTrace:
    """jΛ_j 的軌跡與累積最小值（皆為對數）"""

    label: str
    q: float
    j: np.ndarray
    log_lambda: np.ndarray
    log_j_lambda: np.ndarray
    log_running_min: np.ndarray

    @property
    def J(self) -> int:  # noqa: N802
        return int(self.j[-1])

    @property
    def final_min(self) -> float:
        return float(np.exp(self.log_running_min[-1]))

    def log_min_at(self, j: int) -> float:
        if not 1 <= j <= self.J:
            raise DomainError(f"j={j} 超出軌跡範圍 [1, {self.J}]")
        return float(self.log_running_min[int(j) - 1])

    def min_at(self, j: int) -> float:
        return float(np.exp(self.log_min_at(j)))

    def decade_ratios(self) -> Dict[int, float]:
        """running_min(10^{k+1}) / running_min(10^k)，k ≥ 0"""
        ratios: Dict[int, float] = {}
        k = 0
        while 10 ** (k + 1) <= self.J:
            ratios[k] = float(np.exp(self.log_min_at(10 ** (k + 1)) - self.log_min_at(10**k)))
            k += 1
        return ratios

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "j": self.j,
                "Lambda": np.exp(self.log_lambda),
                "jLambda": np.exp(self.log_j_lambda),
                "running_min": np.exp(self.log_running_min),
            }
        )

    def to_csv(self, path: Path) -> Path:
        self.frame().to_csv(path, index=False, float_format="%.17g")
        return path

    def summary(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "q": self.q,
            "J": self.J,
            "final_min": self.final_min,
            "decade_ratios": self.decade_ratios(),
        }


def running_min_jLambda(spec: SequenceSpec, J: int) -> SequenceTrace:  # noqa: N802, N803
    """j = 1..J 的 jΛ_j 與 min_{i≤j} iΛ_i

    Raises:
        DomainError: J < 2
        ValidationError: 數列不是正且嚴格遞增
    """
    if J < 2:
        raise DomainError(f"J 必須 ≥ 2，收到 {J}")
    j = np.arange(1, int(J) + 1, dtype=float)
    log_lam = spec.log_lambda(j)
    log_jl = np.log(j) + log_lam
    return SequenceTrace(spec.label, spec.q, j.astype(np.int64), log_lam, log_jl, np.minimum.accumulate(log_jl))


def log_sharpness_value(j: np.ndarray, eps: float, q: float = 2.0) -> np.ndarray:
    """ln(j^{1+ε}Λ_j)，M_j = ln(j+1)"""
    j = np.asarray(j, dtype=float)
    return (1.0 + eps) * np.log(j) + np.log(np.log1p(1.0 / j)) - q * np.log(np.log1p(j))


@dataclass
class SharpnessTrace:
    """j^{1+ε}Λ_j 在對數等距 j 格點上的軌跡

    turning_point 為最小值所在的 j；之後的值非遞減時 eventually_increasing 為真。
    """

    eps: float
    q: float
    j: np.ndarray
    log_values: np.ndarray

    @property
    def turning_point(self) -> float:
        return float(self.j[int(np.argmin(self.log_values))])

    @property
    def eventually_increasing(self) -> bool:
        k = int(np.argmin(self.log_values))
        after = self.log_values[k:]
        return bool(after.size > 1 and np.all(np.diff(after) >= -1e-12) and after[-1] > after[0])

    @property
    def final_exceeds_initial(self) -> bool:
        return bool(self.log_values[-1] > self.log_values[0])

    def value_at(self, j: float) -> float:
        return float(np.exp(log_sharpness_value(np.array([j]), self.eps, self.q)[0]))

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame({"j": self.j, "value": np.exp(self.log_values)})

    def summary(self) -> Dict[str, Any]:
        return {
            "eps": self.eps,
            "q": self.q,
            "J": float(self.j[-1]),
            "turning_point": self.turning_point,
            "eventually_increasing": self.eventually_increasing,
            "final_exceeds_initial": self.final_exceeds_initial,
        }


def sharpness_scan(eps: float, J: float, q: float = 2.0, points: int = 4000) -> SharpnessTrace:  # noqa: N803
    """M_j = ln(j+1) 時 j^{1+ε}Λ_j 的軌跡

    j ≤ 10⁴ 逐一取整數，之後取對數等距點，J 可遠大於記憶體能容納的項數。
    ε = 0 時與 running_min_jLambda 的行為一致（趨於 0）。

    Raises:
        DomainError: ε < 0 或 J < 2
    """
    if eps < 0:
        raise DomainError(f"ε 必須 ≥ 0，收到 {eps}")
    if J < 2:
        raise DomainError(f"J 必須 ≥ 2，收到 {J}")
    dense = np.arange(1, min(float(J), 1e4) + 1, dtype=float)
    sparse = np.geomspace(1e4, float(J), points) if J > 1e4 else np.empty(0)
    j = np.unique(np.concatenate((dense, np.floor(sparse))))
    return SharpnessTrace(eps, q, j, log_sharpness_value(j, eps, q))


@dataclass
class ElementaryBoundReport:
    """Λ_j ≤ min{(M_j − M_{j−1})/M_1^q, M_j^{1−q}} 的檢查結果"""

    label: str
    J: int  # noqa: N815
    violations: int
    worst_log_excess: float

    @property
    def passed(self) -> bool:
        return self.violations == 0


def elementary_bound_check(spec: SequenceSpec, J: int, tol: float = 1e-12) -> ElementaryBoundReport:  # noqa: N803
    if J < 2:
        raise DomainError(f"J 必須 ≥ 2，收到 {J}")
    j = np.arange(1, int(J) + 1, dtype=float)
    log_lam = spec.log_lambda(j)
    log_val = spec.log_value(j)
    log_first = float(spec.log_value(np.array([1.0]))[0])
    bound = np.minimum(spec.log_increment(j) - spec.q * log_first, (1.0 - spec.q) * log_val)
    excess = log_lam - bound
    return ElementaryBoundReport(spec.label, int(J), int(np.sum(excess > tol)), float(np.max(excess)))


@dataclass
class RecursionCheck:
    """反證法中倒數遞迴的數值檢查

    hypothesis_holds 為 [N, J] 上 jΛ_j ≥ ε 是否成立；不成立時不做遞迴檢查。
    成立時 x_j = ε·M_j^{q̃−1}（q̃ = min{q, 2}），檢查
    1/x_{j−1} ≥ 1/x_j + (q̃−1)/j 逐項成立，以及加總後的形式。
    contradiction_horizon 為加總形式必然失敗的 J（超過此值假設不可能成立）。
    """

    label: str
    eps: float
    N: int  # noqa: N815
    J: int  # noqa: N815
    hypothesis_holds: bool
    first_failure: Optional[int] = None
    start: Optional[int] = None
    termwise_ok: Optional[bool] = None
    summed_lhs: Optional[float] = None
    summed_rhs: Optional[float] = None
    contradiction_horizon: Optional[float] = None

    @property
    def summed_ok(self) -> Optional[bool]:
        if self.summed_lhs is None or self.summed_rhs is None:
            return None
        return self.summed_lhs >= self.summed_rhs * (1.0 - 1e-12)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "eps": self.eps,
            "N": self.N,
            "J": self.J,
            "hypothesis_holds": self.hypothesis_holds,
            "first_failure": self.first_failure,
            "start": self.start,
            "termwise_ok": self.termwise_ok,
            "summed_lhs": self.summed_lhs,
            "summed_rhs": self.summed_rhs,
            "summed_ok": self.summed_ok,
            "contradiction_horizon": self.contradiction_horizon,
        }


def reciprocal_recursion_check(spec: SequenceSpec, eps: float, N: int, J: int) -> RecursionCheck:  # noqa: N803
    """若 [N, J] 上 jΛ_j ≥ ε，驗證倒數遞迴不等式"""
    if not eps > 0:
        raise DomainError(f"ε 必須 > 0，收到 {eps}")
    if not 1 <= N < J:
        raise DomainError(f"需要 1 ≤ N < J，收到 N={N}, J={J}")

    j = np.arange(N, J + 1, dtype=float)
    log_jl = np.log(j) + spec.log_lambda(j)
    below = log_jl < math.log(eps)
    if np.any(below):
        return RecursionCheck(spec.label, eps, N, J, False, first_failure=int(j[np.argmax(below)]))

    log_val = spec.log_value(j)
    reached = log_val >= 0.0
    if not np.any(reached[:-1]):
        return RecursionCheck(spec.label, eps, N, J, True)
    offset = int(np.argmax(reached))
    start = int(j[offset])

    q_tilde = min(spec.q, 2.0)
    # 1/x_j = ε^{−1} M_j^{1−q̃}
    inverse = np.exp(-math.log(eps) + (1.0 - q_tilde) * log_val[offset:])
    steps = (q_tilde - 1.0) / j[offset + 1 :]
    termwise = bool(np.all(inverse[:-1] >= (inverse[1:] + steps) * (1.0 - 1e-12)))
    harmonic = math.fsum(steps)
    lhs = float(inverse[0])
    rhs = float(inverse[-1]) + harmonic
    horizon = start * math.exp(lhs / (q_tilde - 1.0)) if q_tilde > 1 and lhs / (q_tilde - 1.0) < 700 else math.inf
    return RecursionCheck(
        spec.label,
        eps,
        N,
        J,
        True,
        start=start,
        termwise_ok=termwise,
        summed_lhs=lhs,
        summed_rhs=rhs,
        contradiction_horizon=horizon,
    )


@dataclass
class SuiteResult:
    """內建數列在 J_small 與 J_large 的累積最小值比較"""

    label: str
    min_small: float
    min_large: float
    log_min_small: float
    log_min_large: float

    @property
    def decreased(self) -> bool:
        return self.log_min_large < self.log_min_small


def suite_check(
    J_small: int = 1000, J_large: int = 1_000_000, q: float = 2.0  # noqa: N803
) -> List[SuiteResult]:
    results: List[SuiteResult] = []
    for spec in builtin_sequences(q):
        trace = running_min_jLambda(spec, J_large)
        small, large = trace.log_min_at(J_small), trace.log_min_at(J_large)
        results.append(SuiteResult(spec.label, math.exp(small), math.exp(large), small, large))
    return results
