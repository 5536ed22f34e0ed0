import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blowup_lab.core.errors import DomainError
from blowup_lab.core.series import g_s, g_s_excess, g_s_log, lambda_B, log_lambda_B
from blowup_lab.enums.numerics import TailStrategy

APERY = 1.2020569031595942


@pytest.mark.parametrize("strategy", list(TailStrategy))
def test_zeta_values(strategy: TailStrategy) -> None:
    """測試 λ = 1 時 g_s(1) = ζ(s+1)"""
    assert g_s(1.0, 1.0, strategy=strategy) == pytest.approx(math.pi**2 / 6.0, rel=1e-9)
    assert g_s(1.0, 2.0, strategy=strategy) == pytest.approx(APERY, rel=1e-9)


def test_large_lambda() -> None:
    """測試 λ 很大時 g_1 − 1 ≈ Σ 1/(λm(m+1)) = 1/λ"""
    value = g_s_excess(math.log(1e8), 1.0)

    assert value.excess == pytest.approx(1e-8, rel=1e-3)
    assert value.value == pytest.approx(1.0 + value.excess)


def test_direct_and_euler_maclaurin_agree() -> None:
    """測試兩種尾端處理方式一致"""
    log_lam = math.log(1e-2)
    direct = g_s_excess(log_lam, 1.0, strategy=TailStrategy.DIRECT)
    em = g_s_excess(log_lam, 1.0, strategy=TailStrategy.EULER_MACLAURIN)

    assert direct.strategy is TailStrategy.DIRECT
    assert em.strategy is TailStrategy.EULER_MACLAURIN
    assert direct.excess == pytest.approx(em.excess, rel=1e-7)


def test_tiny_lambda_uses_euler_maclaurin() -> None:
    """測試 λ 極小時自動改用 Euler–Maclaurin"""
    value = g_s_excess(-500.0, 1.0)

    assert value.strategy is TailStrategy.EULER_MACLAURIN
    assert math.isfinite(value.excess)
    assert g_s_log(-500.0, 1.0) > 400.0


@settings(max_examples=30, deadline=None)
@given(
    ell=st.floats(min_value=-20.0, max_value=20.0),
    gap=st.floats(min_value=0.1, max_value=5.0),
    s=st.floats(min_value=0.2, max_value=3.0),
)
def test_g_s_decreasing_in_lambda(ell: float, gap: float, s: float) -> None:
    """測試 g_s 對 λ 嚴格遞減"""
    assert g_s_log(ell + gap, s) < g_s_log(ell, s)


@pytest.mark.parametrize(
    "call",
    [
        lambda: g_s(1.0, 0.0),
        lambda: g_s(0.0, 1.0),
        lambda: g_s_log(math.inf, 1.0),
        lambda: g_s_excess(0.0, 1.0, tol=0.0),
        lambda: log_lambda_B(1.0, 1.0, 1.0),
        lambda: log_lambda_B(2.0, 0.0, 1.0),
    ],
)
def test_invalid_arguments(call) -> None:  # type: ignore[no-untyped-def]
    """測試 s ≤ 0、λ ≤ 0、非有限 ln λ 與 B ≤ M₀"""
    with pytest.raises(DomainError):
        call()


@pytest.mark.parametrize("ratio, s", [(1.0001, 0.5), (1.5, 0.25), (5.0, 1.0), (50.0, 0.5)])
def test_log_lambda_B_inverts_g_s(ratio: float, s: float) -> None:
    """測試 g_s(λ_B) = B/M₀ 且不超過 B/M₀"""
    ell = log_lambda_B(2.0 * ratio, 2.0, s)
    value = g_s_log(ell, s, tol=1e-12)

    assert value == pytest.approx(ratio, rel=1e-8)
    assert value <= ratio * (1.0 + 1e-12)


def test_lambda_B_at_known_point() -> None:
    """測試 B/M₀ = π²/6、s = 1 時 λ_B = 1"""
    assert lambda_B(math.pi**2 / 6.0, 1.0, 1.0) == pytest.approx(1.0, rel=1e-6)


def test_lambda_B_underflow() -> None:
    """測試 B/M₀ 極大時 λ_B 下溢為 0，ln λ_B 仍為有限值"""
    ell = log_lambda_B(1000.0, 1.0, 1.0)

    assert ell < -745.0
    assert lambda_B(1000.0, 1.0, 1.0) == 0.0
