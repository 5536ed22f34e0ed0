import math

import numpy as np
import pytest

from blowup_lab.core.calibration import (
    SamplingPlan,
    bti_bound,
    bti_bound_violations,
    calibrate_bti_constant,
    calibrate_gaussian_constant,
    gaussian_sample_points,
)
from blowup_lab.core.errors import DomainError, ValidationError
from blowup_lab.core.geometry import Domain
from blowup_lab.core.kernel import KernelEvaluator


@pytest.fixture
def evaluator() -> KernelEvaluator:
    return KernelEvaluator(Domain.box2d())


@pytest.fixture
def small_plan() -> SamplingPlan:
    return SamplingPlan(arc_fractions=(0.1, 0.4), times=(0.01, 0.1), random_count=2, seed=11)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"arc_fractions": (), "times": (0.1,)},
        {"arc_fractions": (0.1,), "times": ()},
        {"arc_fractions": (1.0,), "times": (0.1,)},
        {"arc_fractions": (0.1,), "times": (1.5,)},
        {"arc_fractions": (0.1,), "times": (0.0,)},
    ],
)
def test_invalid_plan(kwargs: dict) -> None:
    """測試不合法的取樣計畫"""
    with pytest.raises(ValidationError):
        SamplingPlan(**kwargs)


def test_held_out_plan_is_disjoint() -> None:
    """測試驗證集合與預設取樣集合不相交"""
    default = SamplingPlan.default()
    held_out = SamplingPlan.held_out()

    assert not set(default.arc_fractions) & set(held_out.arc_fractions)
    assert not set(default.times) & set(held_out.times)


def test_refined_plan_is_superset() -> None:
    """測試加密的取樣計畫包含原計畫"""
    plan = SamplingPlan.default()
    refined = plan.refined()

    assert set(plan.arc_fractions) <= set(refined.arc_fractions)
    assert set(plan.times) <= set(refined.times)
    assert refined.random_count == 2 * plan.random_count
    assert refined.size_hint > plan.size_hint


def test_samples_yield_points_for_each_time(small_plan: SamplingPlan) -> None:
    """測試每個弧與時間都產生一組觀測點"""
    domain = Domain.box2d()
    samples = list(small_plan.samples(domain))

    assert len(samples) == small_plan.size_hint
    for arc, points, t in samples:
        assert any(arc.measure == pytest.approx(f * domain.edge_measure(0)) for f in small_plan.arc_fractions)
        assert domain.contains(points).all()
        assert t in small_plan.times


def test_bti_bound() -> None:
    """測試估計式右側 |Γ|^α t^{(1−(n−1)α)/2}"""
    assert bti_bound(0.5, 2, 0.25, 0.04) == pytest.approx(0.5 * 0.04**0.25)
    assert bti_bound(0.0, 3, 0.25, 0.04) == pytest.approx(0.2)


def test_calibrate_alpha_out_of_range(evaluator: KernelEvaluator, small_plan: SamplingPlan) -> None:
    """測試 α 超出 [0, 1/(n−1))"""
    with pytest.raises(DomainError):
        calibrate_bti_constant(evaluator, 1.0, small_plan)
    with pytest.raises(DomainError):
        bti_bound_violations(evaluator, -0.1, 1.0, small_plan)


def test_calibrated_constant_has_no_violations(evaluator: KernelEvaluator, small_plan: SamplingPlan) -> None:
    """測試校準的常數在同一取樣集合上沒有違反，減半後則有違反"""
    result = calibrate_bti_constant(evaluator, 0.5, small_plan)

    assert math.isfinite(result.C_hat) and result.C_hat > 0
    assert result.sample_count > 0
    assert set(result.as_dict()) == {"alpha", "C_hat", "samples", "argmax"}
    assert bti_bound_violations(evaluator, 0.5, result.C_hat * (1.0 + 1e-12), small_plan) == []
    assert bti_bound_violations(evaluator, 0.5, 0.5 * result.C_hat, small_plan)


def test_refined_plan_does_not_lower_constant(evaluator: KernelEvaluator, small_plan: SamplingPlan) -> None:
    """測試取樣集合變大時估計值不會變小"""
    coarse = calibrate_bti_constant(evaluator, 0.3, small_plan)
    fine = calibrate_bti_constant(evaluator, 0.3, small_plan.refined())

    assert fine.C_hat >= coarse.C_hat
    assert fine.sample_count > coarse.sample_count


def test_gaussian_sample_points_are_nested() -> None:
    """測試點數加倍時前段的點不變，且包含所有角點"""
    domain = Domain.box2d(1.0, 2.0)
    small = gaussian_sample_points(domain, 10, seed=5)
    large = gaussian_sample_points(domain, 20, seed=5)

    assert small.shape == (10, 2)
    np.testing.assert_array_equal(large[:4], small[:4])
    assert {tuple(p) for p in small[:4]} == {(0.0, 0.0), (0.0, 2.0), (1.0, 0.0), (1.0, 2.0)}


def test_gaussian_constant(evaluator: KernelEvaluator) -> None:
    """測試 Gaussian 控制常數至少為角落的倍數 2ⁿ·2^{n/2}"""
    result = calibrate_gaussian_constant(evaluator, n_points=10, n_times=4, seed=3)

    assert math.isfinite(result.C_hat)
    assert result.C_hat >= 7.9
    assert result.sample_count == 10 * 10 * 4
    assert "argmax" in result.as_dict()


class _FlatKernel:
    """不隨距離衰減的假熱核，用來檢查 Φ 下溢的取樣沒有被略過"""

    def __init__(self, domain: Domain) -> None:
        self.domain = domain

    def __call__(self, x: np.ndarray, y: np.ndarray, t: float) -> np.ndarray:
        return np.ones(np.broadcast_shapes(x.shape, y.shape)[:-1])


def test_gaussian_constant_keeps_underflowing_samples() -> None:
    """測試 Φ(x−y, 2t) 下溢的取樣仍以對數比值納入最大值"""
    result = calibrate_gaussian_constant(_FlatKernel(Domain.box2d()), n_points=4, n_times=2, seed=1, t_min=1e-6)

    assert result.C_hat == math.inf
    assert result.log_C_hat > 1e4
    assert result.argmax["t"] == pytest.approx(1e-6)
    assert result.kernel_underflow == 0
    assert result.as_dict()["log_C_hat"] == result.log_C_hat


def test_gaussian_constant_counts_kernel_underflow(evaluator: KernelEvaluator) -> None:
    """測試熱核下溢為 0 的取樣會被計數"""
    result = calibrate_gaussian_constant(evaluator, n_points=4, n_times=2, seed=1, t_min=1e-5)

    assert result.kernel_underflow > 0
    assert math.isfinite(result.C_hat)
    assert result.log_C_hat == pytest.approx(math.log(result.C_hat))
