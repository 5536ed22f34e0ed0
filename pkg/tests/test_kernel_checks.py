import numpy as np
import pytest

from blowup_lab.core.geometry import BoundaryArc, Domain
from blowup_lab.core.kernel import KernelEvaluator
from blowup_lab.core.kernel_checks import (
    boundary_flux,
    bti_scaling_slope,
    corner_multiplicity,
    heat_residual,
    images_vs_eigen,
    normalization_error,
    quadrature_cross_check,
    sample_boundary_points,
    sample_points,
    symmetry_error,
)


@pytest.fixture
def evaluator() -> KernelEvaluator:
    return KernelEvaluator(Domain.box2d(1.0, 0.7))


def test_sample_points_inside_domain() -> None:
    """測試取樣點落在區域內且可重現"""
    domain = Domain.box3d(1.0, 2.0, 0.5)
    points = sample_points(domain, 20, seed=3)

    assert points.shape == (20, 3)
    assert domain.contains(points).all()
    np.testing.assert_array_equal(points, sample_points(domain, 20, seed=3))


def test_sample_boundary_points_cycle_edges() -> None:
    """測試邊界取樣輪流落在每條邊上"""
    domain = Domain.box2d()
    samples = sample_boundary_points(domain, 8, seed=1)

    assert [edge_id for edge_id, _ in samples] == [0, 1, 2, 3, 0, 1, 2, 3]
    for edge_id, point in samples:
        face = domain.face(edge_id)
        assert point[face.normal_axis] == (1.0 if face.upper else 0.0)


@pytest.mark.parametrize("t", [1e-3, 0.05, 0.5])
def test_normalization(evaluator: KernelEvaluator, t: float) -> None:
    """測試熱核對 y 積分為 1"""
    for x in sample_points(evaluator.domain, 5, seed=2):
        assert normalization_error(evaluator, x, t) < 1e-10


def test_symmetry(evaluator: KernelEvaluator) -> None:
    """測試熱核對 x, y 對稱"""
    x = sample_points(evaluator.domain, 10, seed=4)
    y = sample_points(evaluator.domain, 10, seed=5)

    assert symmetry_error(evaluator, x, y, 0.01) == 0.0
    assert symmetry_error(evaluator, x, y, 0.8) < 1e-12


def test_zero_boundary_flux(evaluator: KernelEvaluator) -> None:
    """測試熱核在邊界上的法向導數為 0"""
    y = np.array([0.4, 0.3])
    for edge_id, x in sample_boundary_points(evaluator.domain, 8, seed=6):
        assert abs(boundary_flux(evaluator, edge_id, x, y, 0.05)) < 1e-5


def test_heat_equation_residual(evaluator: KernelEvaluator) -> None:
    """測試熱核滿足熱方程式"""
    x = np.array([0.3, 0.2])
    y = np.array([0.5, 0.4])

    assert heat_residual(evaluator, x, y, 0.05) < 1e-4


def test_images_vs_eigen() -> None:
    """測試兩種級數在整個網格上一致"""
    assert images_vs_eigen(1.0, [0.01, 0.1, 1.0], grid=21) < 1e-10


def test_quadrature_cross_check(evaluator: KernelEvaluator) -> None:
    """測試兩種切向積分方式一致"""
    points = sample_points(evaluator.domain, 4, seed=7)

    assert quadrature_cross_check(evaluator, BoundaryArc(0, 0.3, 0.5), points, 0.05) < 1e-8


def test_bti_scales_linearly_with_small_far_arcs() -> None:
    """測試遠離觀測點的小弧，邊界-時間積分與弧長成正比"""
    evaluator = KernelEvaluator(Domain.box2d())
    arcs = [BoundaryArc(0, 0.5 - 0.5 * w, 0.5 + 0.5 * w) for w in (0.005, 0.01, 0.02)]

    slope = bti_scaling_slope(evaluator, arcs, np.array([0.5, 0.5]), 0.1)

    assert slope == pytest.approx(1.0, abs=0.01)


@pytest.mark.parametrize("domain, expected", [(Domain.box2d(), 4.0), (Domain.box3d(), 8.0)])
def test_corner_multiplicity(domain: Domain, expected: float) -> None:
    """測試角落的熱核在 t → 0⁺ 時為自由熱核的 2ⁿ 倍"""
    assert corner_multiplicity(KernelEvaluator(domain), 1e-4) == pytest.approx(expected, rel=1e-3)
