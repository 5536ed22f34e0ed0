"""衰減排程的常數管線

兩種模式：
- global：里程碑 M_k = ln[(k+1)e]·M₀，保證解整體存在
- capped：里程碑 M_k = M₀·Σ_{m≤k} 1/((1+m)(1+λ_B m)^s)，保證 sup M(t) ≤ B

所有常數都先在對數尺度計算（C* 可能遠超過浮點數範圍），再轉回實數欄位。
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from blowup_lab.core.errors import DomainError, HypothesisViolationError
from blowup_lab.core.geometry import DecayProfile
from blowup_lab.core.quadrature import compensated_cumsum
from blowup_lab.core.series import log_lambda_B, log_terms
from blowup_lab.enums.run_status import ConstantsMode

END_BEHAVIOR_RATIOS: Tuple[float, ...] = (
    1.0 + 1e-6,
    1.0 + 1e-4,
    1.01,
    1.1,
    2.0,
    5.0,
    10.0,
    1e2,
    1e3,
    1e4,
    1e5,
    1e6,
)

_INTEGER_SCAN = 10_000
_LOG_SCAN_POINTS = 20_001
_MAX_LOG_J = 1e7


def _exp(value: float) -> float:
    if value > 709.0:
        return math.inf
    return math.exp(value)


def _log1p_exp(u: np.ndarray) -> np.ndarray:
    """ln(1 + eᵘ)，u 很大時不溢位"""
    return np.logaddexp(0.0, u)


def _log_log1p_exp(u: np.ndarray) -> np.ndarray:
    """ln ln(1 + eᵘ)；u < −30 時 ln(1+eᵘ) ≈ eᵘ"""
    u = np.asarray(u, dtype=float)
    safe = np.where(u < -30.0, 0.0, u)
    return np.where(u < -30.0, u, np.log(np.log1p(np.exp(np.minimum(safe, 700.0)))))


def _log_shift(log_j: np.ndarray, shift: float) -> np.ndarray:
    """ln(j + shift)，以 ln j 表示"""
    log_j = np.asarray(log_j, dtype=float)
    return log_j + np.log1p(shift * np.exp(-log_j))


# ---------------------------------------------------------------------------
# 指數
# ---------------------------------------------------------------------------


def check_hypothesis(n: int, beta: float) -> None:
    """β > n−1 是兩個定理共同的前提"""
    if n < 2:
        raise DomainError(f"維度 n 必須 ≥ 2，收到 {n}")
    if not beta > n - 1:
        raise HypothesisViolationError(f"β 必須大於 n−1 = {n - 1}，收到 β={beta}")


def closed_form_exponents(mode: ConstantsMode, n: int, beta: float) -> Tuple[float, float, float]:
    """預設的中點選擇 (α, α̃, s)，global 模式的 s 為 0"""
    check_hypothesis(n, beta)
    if mode is ConstantsMode.GLOBAL:
        return 0.5 * (1.0 / beta + 1.0 / (n - 1)), 0.25 * (1.0 - (n - 1) / beta), 0.0
    s = 0.5 * (beta / (n - 1) - 1.0)
    return 0.25 * (1.0 / beta + 3.0 / (n - 1)), 0.125 * (1.0 - (n - 1) / beta), s


def alpha_tilde_from_alpha(n: int, alpha: float) -> float:
    """α̃ = (1 − (n−1)α)/2，即邊界時間積分上界中 t 的指數"""
    return 0.5 * (1.0 - (n - 1) * alpha)


def alpha_range(mode: ConstantsMode, n: int, beta: float) -> Tuple[float, float]:
    """α 的容許開區間"""
    check_hypothesis(n, beta)
    if mode is ConstantsMode.GLOBAL:
        return 1.0 / beta, 1.0 / (n - 1)
    s = 0.5 * (beta / (n - 1) - 1.0)
    return (1.0 + s) / beta, 1.0 / (n - 1)


def exponents(
    mode: ConstantsMode, n: int, beta: float, alpha_override: Optional[float] = None
) -> Tuple[float, float, float]:
    """(α, α̃, s)；給定 alpha_override 時改用該 α，α̃ 由 α 推得

    Raises:
        HypothesisViolationError: β ≤ n−1
        DomainError: alpha_override 不在容許區間內
    """
    alpha, alpha_tilde, s = closed_form_exponents(mode, n, beta)
    if alpha_override is None:
        return alpha, alpha_tilde, s
    lo, hi = alpha_range(mode, n, beta)
    if not lo < alpha_override < hi:
        raise DomainError(f"α 必須位於 ({lo:.6g}, {hi:.6g})，收到 {alpha_override}")
    return alpha_override, alpha_tilde_from_alpha(n, alpha_override), s


# ---------------------------------------------------------------------------
# 下確界 κ
# ---------------------------------------------------------------------------


def log_kappa_sequence(
    mode: ConstantsMode, log_j: np.ndarray, beta_alpha: float, q: float, s: float = 0.0
) -> np.ndarray:
    """C₂ 下確界中的序列（以 ln j 為變數，回傳對數值）

    global: j^{βα}·ln((j+2)/(j+1)) / ln^q((j+2)e)
    capped: j^{βα} / (ln^q((j+2)e)·(j+2)^{1+s})
    """
    log_j = np.asarray(log_j, dtype=float)
    log_j2 = _log_shift(log_j, 2.0)
    value = beta_alpha * log_j - q * np.log1p(log_j2)
    if mode is ConstantsMode.GLOBAL:
        # ln((j+2)/(j+1)) = log1p(1/(j+1))
        return value + _log_log1p_exp(-_log_shift(log_j, 1.0))
    return value - (1.0 + s) * log_j2


@dataclass(frozen=True)
class KappaInfimum:
    """序列下確界及其位置

    Attributes:
        log_kappa (float): ln κ
        argmin (float): 取得最小值的 j（超出整數掃描範圍時為連續值）
    """

    log_kappa: float
    argmin: float

    @property
    def kappa(self) -> float:
        return _exp(self.log_kappa)


def kappa_infimum(mode: ConstantsMode, beta_alpha: float, q: float, s: float = 0.0) -> KappaInfimum:
    """min_{j≥1} 的序列值

    序列趨於無窮，因此最小值在有限 j 取得。j ≤ 10⁴ 逐一掃描整數；
    更大的 j 以 ln j 等距掃描後用有界純量最小化細修（連續最小值不大於整數最小值）。
    """
    exponent = beta_alpha - (1.0 if mode is ConstantsMode.GLOBAL else 1.0 + s)
    if not exponent > 0:
        raise DomainError(f"序列不發散（有效指數 {exponent:.6g} ≤ 0），請檢查 α 與 s")

    integers = np.arange(1, _INTEGER_SCAN + 1, dtype=float)
    values = log_kappa_sequence(mode, np.log(integers), beta_alpha, q, s)
    index = int(np.argmin(values))
    best = KappaInfimum(float(values[index]), float(integers[index]))

    lower = math.log(_INTEGER_SCAN)
    upper = min(max(lower + 10.0, 4.0 * q / exponent + 50.0), _MAX_LOG_J)
    grid = np.linspace(lower, upper, _LOG_SCAN_POINTS)
    scanned = log_kappa_sequence(mode, grid, beta_alpha, q, s)
    k = int(np.argmin(scanned))
    if scanned[k] < best.log_kappa:
        left, right = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
        result = minimize_scalar(
            lambda ell: float(log_kappa_sequence(mode, np.array([ell]), beta_alpha, q, s)[0]),
            bounds=(left, right),
            method="bounded",
            options={"xatol": 1e-10},
        )
        log_value = min(float(result.fun), float(scanned[k]))
        ell = float(result.x) if result.fun <= scanned[k] else float(grid[k])
        best = KappaInfimum(log_value, math.exp(ell) if ell < 709 else math.inf)
    return best


@dataclass(frozen=True)
class DivergenceReport:
    """證明中要求趨於無窮的序列在兩個 j 的比較

    有限 j 下序列可能仍在下降段；turning_point 為最小值所在的 j。
    """

    mode: ConstantsMode
    log_value_small: float
    log_value_large: float
    j_small: float
    j_large: float
    turning_point: float
    eventually_increasing: bool

    @property
    def increasing_between(self) -> bool:
        return self.log_value_large > self.log_value_small

    def as_dict(self) -> Dict[str, Any]:
        return {
            "mode": self.mode.value,
            "j_small": self.j_small,
            "j_large": self.j_large,
            "log_value_small": self.log_value_small,
            "log_value_large": self.log_value_large,
            "turning_point": self.turning_point,
            "increasing_between": self.increasing_between,
            "eventually_increasing": self.eventually_increasing,
        }


def divergence_check(
    mode: ConstantsMode,
    n: int,
    q: float,
    beta: float,
    j_small: float = 1e3,
    j_large: float = 1e6,
    alpha_override: Optional[float] = None,
) -> DivergenceReport:
    """比較序列在 j_small 與 j_large 的值，並回報最小值位置與之後是否遞增"""
    alpha, _, s = exponents(mode, n, beta, alpha_override)
    beta_alpha = beta * alpha
    infimum = kappa_infimum(mode, beta_alpha, q, s)
    small, large = log_kappa_sequence(mode, np.log([j_small, j_large]), beta_alpha, q, s)

    start = math.log(max(infimum.argmin, 1.0))
    tail = log_kappa_sequence(mode, start + np.linspace(0.0, 200.0, 401), beta_alpha, q, s)
    eventually = bool(np.all(np.diff(tail) >= -1e-12) and tail[-1] > tail[0])
    return DivergenceReport(mode, float(small), float(large), j_small, j_large, infimum.argmin, eventually)


# ---------------------------------------------------------------------------
# 里程碑
# ---------------------------------------------------------------------------


@dataclass
class MilestoneSequence:
    """證明中歸納法使用的溫度門檻 M_0 < M_1 < ...

    Attributes:
        mode (ConstantsMode): 模式
        M0 (float): 初始最大值
        values (np.ndarray): M_0, ..., M_{k_max}
        s (float): capped 模式的指數
        log_lambda_B (Optional[float]): capped 模式的 ln λ_B
        B (Optional[float]): capped 模式的溫度上限
    """

    mode: ConstantsMode
    M0: float  # noqa: N815
    values: np.ndarray
    s: float = 0.0
    log_lambda_B: Optional[float] = None  # noqa: N815
    B: Optional[float] = None  # noqa: N815

    @property
    def k_max(self) -> int:
        return int(self.values.size - 1)

    @property
    def lambda_B(self) -> Optional[float]:  # noqa: N802
        if self.log_lambda_B is None:
            return None
        return _exp(self.log_lambda_B)

    @property
    def supremum(self) -> float:
        return math.inf if self.mode is ConstantsMode.GLOBAL else float(self.B)

    def __getitem__(self, k: int) -> float:
        return float(self.values[k])

    def crossing_times(self, times: Sequence[float], M: Sequence[float]) -> np.ndarray:  # noqa: N803
        """T_k = 第一個 M(t) ≥ M_k 的時刻；從未達到時為 nan"""
        times = np.asarray(times, dtype=float)
        trace = np.asarray(M, dtype=float)
        running = np.maximum.accumulate(trace)
        index = np.searchsorted(running, self.values, side="left")
        out = np.full(self.values.size, np.nan)
        reached = index < trace.size
        out[reached] = times[index[reached]]
        return out

    def as_dict(self) -> Dict[str, Any]:
        return {
            "mode": self.mode.value,
            "M0": self.M0,
            "k_max": self.k_max,
            "s": self.s,
            "log_lambda_B": self.log_lambda_B,
            "B": self.B,
            "last": float(self.values[-1]),
        }


def milestones(
    mode: ConstantsMode,
    M0: float,  # noqa: N803
    k_max: int,
    s: float = 0.0,
    log_lam: Optional[float] = None,
    B: Optional[float] = None,  # noqa: N803
) -> MilestoneSequence:
    """建立 M_0, ..., M_{k_max}

    capped 模式需要 s 與 ln λ_B，部分和以補償加總累積。

    Raises:
        DomainError: M₀ ≤ 0、k_max < 0 或 capped 模式缺少參數
    """
    if not M0 > 0:
        raise DomainError(f"M₀ 必須 > 0，收到 {M0}")
    if k_max < 0:
        raise DomainError(f"k_max 必須 ≥ 0，收到 {k_max}")

    k = np.arange(k_max + 1, dtype=float)
    if mode is ConstantsMode.GLOBAL:
        return MilestoneSequence(mode, M0, M0 * (1.0 + np.log1p(k)))

    if log_lam is None or not s > 0:
        raise DomainError("capped 里程碑需要 s > 0 與 ln λ_B")
    values = np.empty(k_max + 1)
    values[0] = M0
    if k_max > 0:
        terms = np.exp(log_terms(k[1:], log_lam, s))
        values[1:] = M0 * (1.0 + compensated_cumsum(terms))
    return MilestoneSequence(mode, M0, values, s, log_lam, B)


# ---------------------------------------------------------------------------
# 常數管線
# ---------------------------------------------------------------------------


@dataclass
class ScheduleConstants:
    """一種模式下完整的排程常數

    C1、C2、C3、Y、C_star 也以對數形式保存（log_*），實數欄位在溢位時為 inf。
    """

    mode: ConstantsMode
    n: int
    q: float
    beta: float
    M0: float  # noqa: N815
    gamma1_area: float
    C_hat: float  # noqa: N815
    alpha: float
    alpha_tilde: float
    s: float
    B: Optional[float]  # noqa: N815
    log_lambda_B: Optional[float]  # noqa: N815
    log_Y: float  # noqa: N815
    log_t_star: float
    log_C1: float  # noqa: N815
    log_C2: float  # noqa: N815
    log_C3: float  # noqa: N815
    log_C_star: float  # noqa: N815
    kappa: KappaInfimum
    alpha_overridden: bool = False
    notes: List[str] = field(default_factory=list)

    @property
    def lambda_B(self) -> Optional[float]:  # noqa: N802
        return None if self.log_lambda_B is None else _exp(self.log_lambda_B)

    @property
    def Y(self) -> float:  # noqa: N802
        return _exp(self.log_Y)

    @property
    def t_star(self) -> float:
        return _exp(self.log_t_star)

    @property
    def C1(self) -> float:  # noqa: N802
        return _exp(self.log_C1)

    @property
    def C2(self) -> float:  # noqa: N802
        return _exp(self.log_C2)

    @property
    def C3(self) -> float:  # noqa: N802
        return _exp(self.log_C3)

    @property
    def C_star(self) -> float:  # noqa: N802
        return _exp(self.log_C_star)

    @property
    def beta_alpha(self) -> float:
        return self.beta * self.alpha

    def profile(self) -> DecayProfile:
        """排程使用的 polynomial(C*, β) 衰減"""
        if not math.isfinite(self.C_star):
            raise DomainError(f"C* 溢位（ln C* = {self.log_C_star:.6g}），無法建立衰減型式")
        return DecayProfile.polynomial(self.C_star, self.beta)

    def milestones(self, k_max: int) -> MilestoneSequence:
        return milestones(self.mode, self.M0, k_max, self.s, self.log_lambda_B, self.B)

    def induction_margin(self) -> float:
        return induction_margin(self)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "mode": self.mode.value,
            "n": self.n,
            "q": self.q,
            "beta": self.beta,
            "M0": self.M0,
            "gamma1_area": self.gamma1_area,
            "B": self.B,
            "C_hat": self.C_hat,
            "alpha": self.alpha,
            "alpha_tilde": self.alpha_tilde,
            "alpha_overridden": self.alpha_overridden,
            "s": self.s,
            "lambda_B": self.lambda_B,
            "log_lambda_B": self.log_lambda_B,
            "Y": self.Y,
            "t_star": self.t_star,
            "C1": self.C1,
            "C2": self.C2,
            "C3": self.C3,
            "C_star": self.C_star,
            "log_C_star": self.log_C_star,
            "kappa": self.kappa.kappa,
            "kappa_argmin": self.kappa.argmin,
            "induction_margin": self.induction_margin(),
            "notes": list(self.notes),
        }


def _log_C1(  # noqa: N802
    mode: ConstantsMode, q: float, alpha_tilde: float, log_C_hat: float, s: float, log_lam: Optional[float]  # noqa: N803
) -> float:
    if mode is ConstantsMode.GLOBAL:
        # (ln2 / (Ĉ·ln^q(2e)))^{1/α̃}
        return (math.log(math.log(2.0)) - log_C_hat - q * math.log1p(math.log(2.0))) / alpha_tilde
    # ((2^{q−1}/Ĉ)·(1+λ)^{(q−1)s} / [1 + 2(1+λ)^s]^q)^{1/α̃}
    log_one_plus = float(_log1p_exp(np.array(log_lam)))
    log_bracket = float(np.logaddexp(0.0, math.log(2.0) + s * log_one_plus))
    return ((q - 1.0) * math.log(2.0) - log_C_hat + (q - 1.0) * s * log_one_plus - q * log_bracket) / alpha_tilde


def build_constants(
    mode: ConstantsMode,
    n: int,
    q: float,
    beta: float,
    M0: float,  # noqa: N803
    gamma1_area: float,
    C_hat: float,  # noqa: N803
    B: Optional[float] = None,  # noqa: N803
    alpha_override: Optional[float] = None,
    series_tol: float = 1e-10,
) -> ScheduleConstants:
    """計算排程常數 α, α̃, s, λ_B, Y, t*, C₁, C₂, C₃, C*

    Args:
        mode (ConstantsMode): global 或 capped
        n (int): 空間維度
        q (float): 非線性指數，> 1
        beta (float): 衰減指數，> n−1
        M0 (float): 初始資料的最大值
        gamma1_area (float): |Γ₁|
        C_hat (float): 校準後的邊界時間積分常數
        B (Optional[float]): capped 模式的溫度上限，> M₀
        alpha_override (Optional[float]): 取代預設中點的 α
        series_tol (float): λ_B 的容許誤差

    Raises:
        HypothesisViolationError: β ≤ n−1
        DomainError: 其他參數超出範圍

    Returns:
        ScheduleConstants: 全部常數
    """
    alpha, alpha_tilde, s = exponents(mode, n, beta, alpha_override)
    if not q > 1:
        raise DomainError(f"q 必須 > 1，收到 {q}")
    if not M0 > 0:
        raise DomainError(f"M₀ 必須 > 0，收到 {M0}")
    if not gamma1_area > 0:
        raise DomainError(f"|Γ₁| 必須 > 0，收到 {gamma1_area}")
    if not C_hat > 0 or not math.isfinite(C_hat):
        raise DomainError(f"C_hat 必須為正的有限值，收到 {C_hat}")

    log_lam: Optional[float] = None
    if mode is ConstantsMode.CAPPED:
        if B is None or not B > M0:
            raise DomainError(f"capped 模式需要 B > M₀，收到 B={B}, M₀={M0}")
        log_lam = log_lambda_B(B, M0, s, series_tol)
    else:
        B = None

    beta_alpha = beta * alpha
    log_C_hat = math.log(C_hat)  # noqa: N806
    log_Y = (q - 1.0) * math.log(M0) + alpha * math.log(gamma1_area)  # noqa: N806
    log_C1 = _log_C1(mode, q, alpha_tilde, log_C_hat, s, log_lam)  # noqa: N806
    log_t_star = min(0.0, log_C1 - log_Y / alpha_tilde)

    kappa = kappa_infimum(mode, beta_alpha, q, s)
    log_C2 = kappa.log_kappa - log_C_hat  # noqa: N806
    if mode is ConstantsMode.CAPPED:
        log_C2 -= s * float(_log1p_exp(np.array(log_lam)))  # noqa: N806
    log_C3 = -log_C2 / beta_alpha + max(0.0, (alpha_tilde / beta_alpha - 1.0) * log_C1)  # noqa: N806
    log_C_star = log_C3 + max(log_Y / beta_alpha, log_Y / alpha_tilde)  # noqa: N806

    notes: List[str] = []
    if log_C_star > 709.0:
        notes.append("C* 超出浮點數範圍，僅保留 ln C*")
    if log_lam is not None and log_lam < -745.0:
        notes.append("λ_B 下溢，僅保留 ln λ_B")

    return ScheduleConstants(
        mode=mode,
        n=n,
        q=q,
        beta=beta,
        M0=M0,
        gamma1_area=gamma1_area,
        C_hat=C_hat,
        alpha=alpha,
        alpha_tilde=alpha_tilde,
        s=s,
        B=B,
        log_lambda_B=log_lam,
        log_Y=log_Y,
        log_t_star=log_t_star,
        log_C1=log_C1,
        log_C2=log_C2,
        log_C3=log_C3,
        log_C_star=log_C_star,
        kappa=kappa,
        alpha_overridden=alpha_override is not None,
        notes=notes,
    )


def induction_margin(constants: ScheduleConstants) -> float:
    """ln[C₂·(C*·t*)^{βα} / (Y·t*^{α̃})]，歸納步驟成立時 ≥ 0"""
    c = constants
    return (
        c.log_C2
        + c.beta_alpha * (c.log_C_star + c.log_t_star)
        - c.log_Y
        - c.alpha_tilde * c.log_t_star
    )


@dataclass
class EndBehaviorReport:
    """capped 模式 C_B* 對 B 的掃描結果"""

    ratios: List[float]
    log_C_star: List[float]  # noqa: N815
    monotone: bool
    plateau_ratio: float
    divergence_ratio: float
    plateau_band: Tuple[float, float] = (0.99, 1.01)
    divergence_factor: float = 1e3

    @property
    def plateau_ok(self) -> bool:
        return self.plateau_band[0] <= self.plateau_ratio <= self.plateau_band[1]

    @property
    def divergence_ok(self) -> bool:
        return self.divergence_ratio > self.divergence_factor

    @property
    def passed(self) -> bool:
        return self.monotone and self.plateau_ok and self.divergence_ok

    def as_dict(self) -> Dict[str, Any]:
        return {
            "ratios": self.ratios,
            "log_C_star": self.log_C_star,
            "monotone": self.monotone,
            "plateau_ratio": self.plateau_ratio,
            "plateau_ok": self.plateau_ok,
            "divergence_ratio": self.divergence_ratio,
            "divergence_ok": self.divergence_ok,
            "passed": self.passed,
        }


def verify_schedule_end_behavior(
    n: int,
    q: float,
    beta: float,
    M0: float,  # noqa: N803
    gamma1_area: float,
    C_hat: float,  # noqa: N803
    ratios: Sequence[float] = END_BEHAVIOR_RATIOS,
) -> EndBehaviorReport:
    """掃描 B/M₀，檢查 C_B* 單調遞減、B → ∞ 時趨於平台、B → M₀⁺ 時發散

    平台比為 C*(最大比值)/C*(次大比值)，發散比為 C*(最小比值)/C*(2M₀)。
    比值序列需包含 2 且至少三個點。
    """
    ordered = sorted(float(r) for r in ratios)
    if len(ordered) < 3 or ordered[0] <= 1.0 or 2.0 not in ordered:
        raise DomainError("B/M₀ 掃描需要至少三個 > 1 的比值且包含 2")

    logs = [
        build_constants(ConstantsMode.CAPPED, n, q, beta, M0, gamma1_area, C_hat, B=M0 * r).log_C_star
        for r in ordered
    ]
    monotone = all(b <= a + 1e-12 for a, b in zip(logs[:-1], logs[1:]))
    plateau = math.exp(logs[-1] - logs[-2])
    divergence = _exp(logs[0] - logs[ordered.index(2.0)])
    return EndBehaviorReport(ordered, logs, monotone, plateau, divergence)
