"""輔助級數 g_s(λ) = Σ_{m≥0} 1/((1+m)(1+λm)^s) 與其反函數 λ_B

所有計算以 ℓ = ln λ 進行，λ 極大或極小時不會溢位；
g_s − 1（去掉 m=0 的項）單獨計算，B/M₀ 接近 1 時仍保有相對精度。

尾端的處理方式：
- direct：直接加總到 f(M) ≤ tol，尾端以 [∫_M^∞ f, f(M) + ∫_M^∞ f] 夾住並取中點
- euler-maclaurin：加總到 a 項，尾端以 ∫_a^∞ f + f(a)/2 − f′(a)/12 近似
- auto：需要的項數不超過上限時用 direct，否則用 euler-maclaurin
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from blowup_lab.core.errors import ConvergenceError, DomainError
from blowup_lab.core.quadrature import CompensatedSum
from blowup_lab.enums.numerics import TailStrategy

DIRECT_TERM_LIMIT = 1_000_000
_DIRECT_HARD_LIMIT = 50_000_000
_CHUNK = 100_000
_EM_START = 1000


@dataclass(frozen=True)
class SeriesValue:
    """g_s − 1 的數值與誤差估計

    Attributes:
        excess (float): g_s(λ) − 1
        error (float): 誤差上界（direct）或估計（euler-maclaurin）
        terms (int): 直接加總的項數
        strategy (TailStrategy): 實際使用的方式
    """

    excess: float
    error: float
    terms: int
    strategy: TailStrategy

    @property
    def value(self) -> float:
        return 1.0 + self.excess


def _check(s: float) -> None:
    if not s > 0:
        raise DomainError(f"s 必須 > 0（s ≤ 0 時級數發散），收到 s={s}")


def log_terms(m: np.ndarray, log_lam: float, s: float) -> np.ndarray:
    """m ≥ 1 時 ln f(m) = −ln(1+m) − s·ln(1+λm)"""
    m = np.asarray(m, dtype=float)
    return -np.log1p(m) - s * np.logaddexp(0.0, log_lam + np.log(m))


def _log_term(m: float, log_lam: float, s: float) -> float:
    return -math.log1p(m) - s * float(np.logaddexp(0.0, log_lam + math.log(m)))


def tail_integral(start: float, log_lam: float, s: float) -> float:
    """∫_start^∞ dm / ((1+m)(1+λm)^s)

    以 x = ln(1+m) 換元後被積函數為 (1 + λ(eˣ−1))^{−s}，在 x ≈ ln(1/λ) 之前近似常數、之後指數衰減，
    因此在該處切成兩段積分。
    """

    def integrand(x: float) -> float:
        log_expm1 = x + math.log1p(-math.exp(-x))
        return math.exp(-s * float(np.logaddexp(0.0, log_lam + log_expm1)))

    lower = math.log1p(start)
    knee = max(lower, -log_lam)
    head = 0.0
    if knee > lower:
        head, _ = quad(integrand, lower, knee, epsabs=0.0, epsrel=1e-12, limit=200)
    tail, _ = quad(integrand, knee, math.inf, epsabs=0.0, epsrel=1e-12, limit=200)
    return head + tail


def required_terms(log_lam: float, s: float, tol: float) -> float:
    """使 f(M) ≤ tol 的最小 M（以 ln M 二分搜尋，可能超過整數範圍）"""
    log_tol = math.log(tol)
    if _log_term(1.0, log_lam, s) <= log_tol:
        return 1.0
    lo, hi = 0.0, 1.0
    while _log_term(math.exp(hi), log_lam, s) > log_tol:
        lo, hi = hi, 2.0 * hi
        if hi > 1e4:
            return math.inf
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if _log_term(math.exp(mid), log_lam, s) > log_tol:
            lo = mid
        else:
            hi = mid
    return math.ceil(math.exp(hi))


def _partial_sum(log_lam: float, s: float, stop: int) -> float:
    """Σ_{m=1}^{stop−1} f(m)，分段以 fsum 加總後再做補償加總"""
    total = CompensatedSum()
    for begin in range(1, stop, _CHUNK):
        m = np.arange(begin, min(begin + _CHUNK, stop), dtype=float)
        total.add(math.fsum(np.exp(log_terms(m, log_lam, s))))
    return total.value


def _direct(log_lam: float, s: float, tol: float, limit: int) -> SeriesValue:
    needed = required_terms(log_lam, s, tol)
    if needed > limit:
        raise ConvergenceError(f"直接加總需要 {needed:.3g} 項，超過上限 {limit}")
    stop = max(2, int(needed))
    head = _partial_sum(log_lam, s, stop)
    last = math.exp(_log_term(float(stop), log_lam, s))
    integral = tail_integral(float(stop), log_lam, s)
    return SeriesValue(head + integral + 0.5 * last, 0.5 * last, stop - 1, TailStrategy.DIRECT)


def _euler_maclaurin(log_lam: float, s: float, start: int = _EM_START) -> SeriesValue:
    a = float(start)
    head = _partial_sum(log_lam, s, start)
    f_a = math.exp(_log_term(a, log_lam, s))
    # sλ/(1+λa) = s/(a + 1/λ)
    inv_lam = math.exp(-log_lam) if -log_lam < 700 else math.inf
    derivative = -f_a * (1.0 / (1.0 + a) + s / (a + inv_lam))
    tail = tail_integral(a, log_lam, s) + 0.5 * f_a - derivative / 12.0
    error = f_a * (1.0 + s) ** 3 / (120.0 * a**3)
    return SeriesValue(head + tail, error, start - 1, TailStrategy.EULER_MACLAURIN)


def g_s_excess(
    log_lam: float, s: float, tol: float = 1e-10, strategy: TailStrategy = TailStrategy.AUTO
) -> SeriesValue:
    """以 ℓ = ln λ 計算 g_s(λ) − 1

    Args:
        log_lam (float): ln λ
        s (float): 指數 s > 0
        tol (float): 直接加總的截斷門檻
        strategy (TailStrategy): 尾端處理方式

    Raises:
        DomainError: s ≤ 0 或 ℓ 不是有限值
        ConvergenceError: 指定 direct 但需要的項數超過上限

    Returns:
        SeriesValue: 數值與誤差
    """
    _check(s)
    if not math.isfinite(log_lam):
        raise DomainError(f"ln λ 必須為有限值，收到 {log_lam}")
    if not tol > 0:
        raise DomainError(f"tol 必須為正，收到 {tol}")

    if strategy is TailStrategy.DIRECT:
        return _direct(log_lam, s, tol, _DIRECT_HARD_LIMIT)
    if strategy is TailStrategy.EULER_MACLAURIN:
        return _euler_maclaurin(log_lam, s)
    if required_terms(log_lam, s, tol) <= DIRECT_TERM_LIMIT:
        return _direct(log_lam, s, tol, DIRECT_TERM_LIMIT)
    return _euler_maclaurin(log_lam, s)


def g_s(lam: float, s: float, tol: float = 1e-10, strategy: TailStrategy = TailStrategy.AUTO) -> float:
    """g_s(λ) = Σ_{m=0}^∞ 1/((1+m)(1+λm)^s)

    Raises:
        DomainError: λ ≤ 0 或 s ≤ 0
    """
    _check(s)
    if not lam > 0:
        raise DomainError(f"λ 必須 > 0，收到 {lam}")
    return g_s_excess(math.log(lam), s, tol, strategy).value


def g_s_log(log_lam: float, s: float, tol: float = 1e-10, strategy: TailStrategy = TailStrategy.AUTO) -> float:
    """以 ln λ 為參數的 g_s"""
    return g_s_excess(log_lam, s, tol, strategy).value


def log_lambda_B(  # noqa: N802
    B: float, M0: float, s: float, tol: float = 1e-10, max_iter: int = 200  # noqa: N803
) -> float:
    """ln λ_B，其中 g_s(λ_B) = B/M₀

    以 ℓ = 0 為起點往兩側倍增找出括號，再以二分法求解，
    回傳 g_s ≤ B/M₀ 的一端（因此由 λ_B 建立的里程碑嚴格小於 B）。

    Raises:
        DomainError: B ≤ M₀ 或 s ≤ 0
        ConvergenceError: 用盡迭代次數
    """
    _check(s)
    if not M0 > 0 or not B > M0:
        raise DomainError(f"需要 B > M₀ > 0，收到 B={B}, M₀={M0}")

    target = (B - M0) / M0
    eval_tol = min(tol, 1e-3 * target) * 1e-2

    def excess(ell: float) -> float:
        return g_s_excess(ell, s, eval_tol).excess

    # excess 對 ℓ 嚴格遞減
    lo = hi = 0.0
    if excess(0.0) > target:
        step = 1.0
        while excess(hi) > target:
            lo, hi = hi, hi + step
            step *= 2.0
    else:
        step = 1.0
        while excess(lo) < target:
            lo, hi = lo - step, lo
            step *= 2.0

    scale = min(1.0, target)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        value = excess(mid)
        if abs(value - target) < tol * scale or (hi - lo) <= 1e-15 * max(1.0, abs(mid)):
            return mid if value <= target else hi
        if value > target:
            lo = mid
        else:
            hi = mid
    raise ConvergenceError(f"λ_B 的二分法在 {max_iter} 次內沒有收斂（B={B}, M₀={M0}, s={s}）")


def lambda_B(B: float, M0: float, s: float, tol: float = 1e-10) -> float:  # noqa: N802, N803
    """λ_B = g_s^{−1}(B/M₀)；B/M₀ 大到 λ_B 下溢時回傳 0.0，此時請改用 log_lambda_B"""
    ell = log_lambda_B(B, M0, s, tol)
    return math.exp(ell) if ell > -745.0 else 0.0
