import math

import numpy as np
import pytest

from blowup_lab.core.errors import UnsupportedDomainError, ValidationError
from blowup_lab.core.geometry import Domain
from blowup_lab.core.initial_data import InitialData
from blowup_lab.enums.run_status import InitialDataKind


def test_constant_initial_data() -> None:
    """測試常數初始資料"""
    u0 = InitialData.constant(2.5)
    values = u0.evaluate(Domain.box2d(), np.array([[0.1, 0.2], [0.9, 0.9]]))

    np.testing.assert_array_equal(values, [2.5, 2.5])
    assert u0.as_dict() == {"kind": "constant", "M0": 2.5}


def test_constant_initial_data_on_disk() -> None:
    """測試常數初始資料可用於圓盤"""
    values = InitialData.constant(1.0).evaluate(Domain.disk2d(), np.zeros((3, 2)))

    assert values.tolist() == [1.0, 1.0, 1.0]


def test_neumann_mode_maximum_is_M0() -> None:
    """測試 neumann_mode 的最大值為 M₀ 且恆非負"""
    domain = Domain.box2d(1.0, 2.0)
    u0 = InitialData.neumann_mode(3.0, 1.0, (1, 2))
    axes = [np.linspace(0.0, length, 41) for length in domain.lengths]
    grid = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    values = u0.evaluate(domain, grid)

    assert values.max() == pytest.approx(3.0)
    assert values.min() >= 0.0
    assert u0.as_dict()["modes"] == [1, 2]


def test_neumann_mode_exact_diffusion() -> None:
    """測試純擴散的精確解以 e^{−λt} 衰減"""
    domain = Domain.box2d()
    u0 = InitialData.neumann_mode(2.0, 0.5, (1, 0))
    point = np.array([[0.0, 0.3]])

    assert u0.decay_rate(domain) == pytest.approx(math.pi**2)
    assert u0.exact_diffusion(domain, point, 0.1)[0] == pytest.approx(1.5 + 0.5 * math.exp(-0.1 * math.pi**2))
    assert u0.exact_diffusion(domain, point, 10.0)[0] == pytest.approx(1.5, abs=1e-12)


@pytest.mark.parametrize("M0", [0.0, -1.0, float("nan")])
def test_invalid_M0(M0: float) -> None:
    """測試 M₀ 必須為正"""
    with pytest.raises(ValidationError):
        InitialData.constant(M0)


def test_neumann_mode_negative_values_rejected() -> None:
    """測試振幅過大使 u₀ 出現負值"""
    with pytest.raises(ValidationError):
        InitialData.neumann_mode(1.0, 0.6, (1, 1))
    with pytest.raises(ValidationError):
        InitialData.neumann_mode(1.0, 0.1, (-1, 1))


def test_neumann_mode_domain_checks() -> None:
    """測試 neumann_mode 只支援長方體且模態數需與維度相符"""
    u0 = InitialData.neumann_mode(1.0, 0.2, (1, 1))

    with pytest.raises(UnsupportedDomainError):
        u0.evaluate(Domain.disk2d(), np.zeros((1, 2)))
    with pytest.raises(ValidationError):
        u0.evaluate(Domain.box3d(), np.zeros((1, 3)))


def test_default_kind() -> None:
    """測試預設為常數初始資料"""
    assert InitialData().kind is InitialDataKind.CONSTANT
