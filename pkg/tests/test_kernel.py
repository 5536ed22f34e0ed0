import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from blowup_lab.core.errors import DomainError, OutOfValidityWarning, UnsupportedDomainError
from blowup_lab.core.geometry import BoundaryArc, Domain
from blowup_lab.core.kernel import (
    KernelEvaluator,
    boundary_time_integral,
    box_kernel,
    eigen_count_for,
    image_count_for,
    interval_kernel,
    interval_kernel_integral,
    log_phi,
    phi,
    surface_integral,
)
from blowup_lab.enums.numerics import BoundaryQuadrature, KernelMethod


def test_phi_scalar_and_vector() -> None:
    """測試自由空間熱核的數值"""
    assert phi(0.0, 0.25) == pytest.approx(1.0 / math.sqrt(math.pi))
    assert phi(np.array([0.0, 0.0]), 0.25) == pytest.approx(1.0 / math.pi)
    assert phi(np.array([0.0, 0.0, 0.0]), 0.25) == pytest.approx(math.pi**-1.5)


def test_phi_normalization() -> None:
    """測試一維自由熱核的積分為 1"""
    value, _ = quad(lambda x: phi(x, 0.3), -np.inf, np.inf)

    assert value == pytest.approx(1.0, rel=1e-10)


def test_phi_invalid_arguments() -> None:
    """測試 t ≤ 0 與維度不符"""
    with pytest.raises(DomainError):
        phi(0.0, 0.0)
    with pytest.raises(DomainError):
        phi(np.array([0.0, 0.0]), 1.0, n=3)


def test_truncation_counts() -> None:
    """測試截斷項數隨 t 的變化方向"""
    assert image_count_for(1e-4, 1.0) == 1
    assert image_count_for(10.0, 1.0) > image_count_for(0.1, 1.0)
    assert eigen_count_for(1e-4, 1.0) > eigen_count_for(1.0, 1.0)


@pytest.mark.parametrize("t", [1e-3, 0.05, 0.25, 1.0])
def test_images_match_eigen_expansion(t: float) -> None:
    """測試鏡像法與特徵函數展開一致"""
    x = np.linspace(0.0, 1.0, 11)
    y = 0.37
    images = interval_kernel(x, y, t, 1.0, method=KernelMethod.IMAGES)
    eigen = interval_kernel(x, y, t, 1.0, method=KernelMethod.EIGEN)

    np.testing.assert_allclose(images, eigen, rtol=1e-10, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(
    x=st.floats(min_value=0.0, max_value=2.0),
    y=st.floats(min_value=0.0, max_value=2.0),
    t=st.floats(min_value=1e-4, max_value=0.5),
)
def test_interval_kernel_symmetric(x: float, y: float, t: float) -> None:
    """測試 N(x,y,t) 與 N(y,x,t) 逐位元相等"""
    assert interval_kernel(x, y, t, 2.0, method=KernelMethod.IMAGES) == interval_kernel(
        y, x, t, 2.0, method=KernelMethod.IMAGES
    )


@pytest.mark.parametrize("method", [KernelMethod.IMAGES, KernelMethod.EIGEN])
def test_interval_kernel_integral_is_one(method: KernelMethod) -> None:
    """測試熱核在整個區間上的積分為 1"""
    x = np.linspace(0.0, 2.0, 9)
    np.testing.assert_allclose(interval_kernel_integral(x, 0.0, 2.0, 0.3, 2.0, method=method), 1.0, rtol=1e-12)


def test_interval_kernel_integral_matches_quad() -> None:
    """測試 erf 閉式解與數值積分一致"""
    expected, _ = quad(lambda y: interval_kernel(0.2, y, 0.01, 1.0), 0.1, 0.6, epsabs=1e-13)

    assert interval_kernel_integral(0.2, 0.1, 0.6, 0.01, 1.0) == pytest.approx(expected, rel=1e-10)


def test_interval_kernel_invalid_arguments() -> None:
    """測試 t ≤ 0、L ≤ 0 與座標超出範圍"""
    with pytest.raises(DomainError):
        interval_kernel(0.5, 0.5, 0.0, 1.0)
    with pytest.raises(DomainError):
        interval_kernel(0.5, 0.5, 0.1, -1.0)
    with pytest.raises(DomainError):
        interval_kernel(1.5, 0.5, 0.1, 1.0)


def test_evaluator_rejects_disk() -> None:
    """測試圓盤沒有精確熱核"""
    with pytest.raises(UnsupportedDomainError):
        KernelEvaluator(Domain.disk2d())


def test_evaluator_rejects_invalid_counts() -> None:
    """測試項數必須 ≥ 1"""
    with pytest.raises(DomainError):
        KernelEvaluator(Domain.box2d(), image_count=0)


def test_box_kernel_is_product_of_axes() -> None:
    """測試長方體熱核為各軸熱核的乘積"""
    evaluator = KernelEvaluator(Domain.box2d(1.0, 2.0))
    x = np.array([0.3, 1.2])
    y = np.array([0.6, 0.4])
    expected = interval_kernel(0.3, 0.6, 0.1, 1.0) * interval_kernel(1.2, 0.4, 0.1, 2.0)

    assert box_kernel(evaluator, x, y, 0.1) == pytest.approx(expected, rel=1e-12)
    assert evaluator(x, y, 0.1) == evaluator(y, x, 0.1)


def test_box_kernel_dimension_mismatch() -> None:
    """測試點的維度與區域不符"""
    with pytest.raises(DomainError):
        KernelEvaluator(Domain.box3d())(np.zeros(2), np.zeros(2), 0.1)


def test_green_function() -> None:
    """測試 Green 函數 G(x,t,y,s) = N(x,y,t−s)，且需要 t > s"""
    evaluator = KernelEvaluator(Domain.box2d())
    x = np.array([0.2, 0.3])
    y = np.array([0.5, 0.5])

    assert evaluator.green(x, 0.5, y, 0.3) == pytest.approx(evaluator(x, y, 0.2))
    with pytest.raises(DomainError):
        evaluator.green(x, 0.3, y, 0.3)


def test_large_time_kernel_tends_to_inverse_volume() -> None:
    """測試熱核在大時間趨近 1/|Ω|"""
    evaluator = KernelEvaluator(Domain.box3d(1.0, 2.0, 0.5))
    value = evaluator(np.array([0.1, 0.2, 0.3]), np.array([0.9, 1.8, 0.1]), 50.0)

    assert value == pytest.approx(1.0, rel=1e-10)


@pytest.mark.parametrize("domain", [Domain.box2d(), Domain.box3d()])
def test_surface_integral_gauss_matches_exact(domain: Domain) -> None:
    """測試切向 Gauss–Legendre 積分與 erf 閉式解一致"""
    evaluator = KernelEvaluator(domain)
    gamma = BoundaryArc(0, 0.3, 0.6) if domain.n == 2 else BoundaryArc(0, 0.3, 0.6, 0.2, 0.5)
    rng = np.random.default_rng(1)
    x = rng.uniform(0.0, 1.0, size=(5, domain.n))

    for t in (1e-3, 0.1):
        gauss = surface_integral(evaluator, gamma, x, t, BoundaryQuadrature.GAUSS_LEGENDRE)
        exact = surface_integral(evaluator, gamma, x, t, BoundaryQuadrature.EXACT)
        np.testing.assert_allclose(gauss, exact, rtol=1e-8, atol=1e-12)


def test_boundary_time_integral_small_time_on_edge() -> None:
    """測試邊中點在小時間的邊界-時間積分約為 2√(t/π)"""
    evaluator = KernelEvaluator(Domain.box2d())
    gamma = BoundaryArc(0, 0.0, 1.0)
    t = 1e-3

    value = boundary_time_integral(evaluator, gamma, np.array([0.5, 0.0]), t, BoundaryQuadrature.EXACT)

    assert value == pytest.approx(2.0 * math.sqrt(t / math.pi), rel=1e-6)


def test_boundary_time_integral_shapes_and_empty_arc() -> None:
    """測試單點回傳 float、多點回傳陣列，空集合積分為 0"""
    evaluator = KernelEvaluator(Domain.box2d())
    points = np.array([[0.5, 0.1], [0.5, 0.5]])

    assert boundary_time_integral(evaluator, None, np.array([0.5, 0.5]), 0.1) == 0.0
    values = boundary_time_integral(evaluator, BoundaryArc(0, 0.4, 0.6), points, 0.1)
    assert isinstance(values, np.ndarray)
    assert values[0] > values[1] > 0


def test_boundary_time_integral_invalid_time() -> None:
    """測試 t ≤ 0 與 t > 1 的情況"""
    evaluator = KernelEvaluator(Domain.box2d())
    gamma = BoundaryArc(0, 0.4, 0.6)

    with pytest.raises(DomainError):
        boundary_time_integral(evaluator, gamma, np.array([0.5, 0.5]), 0.0)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        boundary_time_integral(evaluator, gamma, np.array([0.5, 0.5]), 1.5)
    assert any(issubclass(w.category, OutOfValidityWarning) for w in caught)


def test_log_phi_matches_phi_and_stays_finite() -> None:
    """測試 ln Φ 與 Φ 一致，且在 Φ 下溢時仍為有限值"""
    x = np.array([0.3, -0.2])

    assert log_phi(x, 0.1) == pytest.approx(math.log(phi(x, 0.1)))
    assert phi(np.array([1.0, 1.0]), 1e-6) == 0.0
    assert log_phi(np.array([1.0, 1.0]), 1e-6) == pytest.approx(-math.log(4e-6 * math.pi) - 2.0 / 4e-6)
    with pytest.raises(DomainError):
        log_phi(x, 0.0)
