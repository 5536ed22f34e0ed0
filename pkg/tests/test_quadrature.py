import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blowup_lab.core.quadrature import (
    CompensatedSum,
    compensated_cumsum,
    composite_gauss,
    gauss_legendre,
    graded_gauss,
    windowed_gauss,
)


def test_gauss_legendre_is_cached_and_read_only() -> None:
    """測試節點與權重會被快取且不可修改"""
    nodes, weights = gauss_legendre(8)

    assert gauss_legendre(8)[0] is nodes
    assert weights.sum() == pytest.approx(2.0)
    with pytest.raises(ValueError):
        nodes[0] = 0.0


def test_composite_gauss_integrates_polynomial() -> None:
    """測試複合 Gauss–Legendre 對多項式精確"""
    x, w = composite_gauss(0.0, 3.0, 0.5)

    assert x.size == 6 * 8
    assert np.dot(w, x**5) == pytest.approx(3.0**6 / 6.0, rel=1e-13)


def test_empty_interval() -> None:
    """測試 b ≤ a 時沒有節點"""
    for rule in (composite_gauss(1.0, 1.0, 0.1), graded_gauss(1.0, 0.0)):
        assert rule[0].size == 0
        assert rule[1].size == 0


def test_graded_gauss_handles_endpoint_singularity() -> None:
    """測試往左端點加密的積分可處理 x^{−1/2} 奇異性"""
    x, w = graded_gauss(0.0, 1.0, levels=40)

    assert np.dot(w, 1.0 / np.sqrt(x)) == pytest.approx(2.0, rel=1e-6)


def test_windowed_gauss_merges_windows() -> None:
    """測試重疊的窗口會合併，窗口外不取點"""
    x, w = windowed_gauss(0.0, 10.0, [2.0, 2.5, 8.0], half_width=1.0, max_width=0.5)

    assert np.all(((x > 1.0) & (x < 3.5)) | ((x > 7.0) & (x < 9.0)))
    assert w.sum() == pytest.approx(2.5 + 2.0)


def test_windowed_gauss_no_overlap() -> None:
    """測試窗口完全落在區間外"""
    x, w = windowed_gauss(0.0, 1.0, [5.0], half_width=1.0, max_width=0.5)

    assert x.size == 0 and w.size == 0


def test_windowed_gauss_gaussian() -> None:
    """測試只在中心附近積分窄高斯函數"""
    t = 1e-4
    x, w = windowed_gauss(0.0, 1.0, [0.3], 2.0 * math.sqrt(t * math.log(1e14)), math.sqrt(t))
    values = np.exp(-((x - 0.3) ** 2) / (4.0 * t)) / math.sqrt(4.0 * math.pi * t)

    assert np.dot(w, values) == pytest.approx(1.0, rel=1e-12)


def test_compensated_sum() -> None:
    """測試補償加總保留微小增量"""
    total = CompensatedSum()
    total.add(1.0)
    total.extend([1e-16] * 10_000)

    assert total.value == pytest.approx(1.0 + 1e-12, rel=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(min_value=-1e6, max_value=1e6), min_size=1, max_size=300))
def test_compensated_cumsum_matches_fsum(values: list) -> None:
    """測試累積和的最後一項與 math.fsum 一致"""
    out = compensated_cumsum(values)

    assert out.shape == (len(values),)
    assert out[-1] == pytest.approx(math.fsum(values), abs=1e-6)


def test_compensated_cumsum_across_chunks() -> None:
    """測試跨越分段時累積和仍然精確"""
    values = np.full(10_000, 0.1)
    out = compensated_cumsum(values)

    assert out[4095] == pytest.approx(409.6, rel=1e-15)
    assert out[-1] == pytest.approx(1000.0, rel=1e-15)
