from typing import Any, Dict, Tuple
from unittest.mock import MagicMock, patch

import pytest

from blowup_lab.core.errors import ConvergenceError
from blowup_lab.enums.run_status import AcceptanceScale, AcceptanceSuite, ConstantsMode
from blowup_lab.utils.acceptance import (
    CRITERIA,
    HAND_DERIVED_EXPONENTS,
    AcceptanceContext,
    AcceptanceSizes,
    accept,
    select,
)


def test_criteria_numbering() -> None:
    """測試驗收項目編號連續且唯一"""
    assert [c[0] for c in CRITERIA] == sorted(c[0] for c in CRITERIA)
    assert {c[0] for c in CRITERIA} == set(range(1, 13))


def test_select() -> None:
    """測試依套件與編號選擇項目"""
    assert len(select(AcceptanceSuite.ALL)) == 12
    assert [c[0] for c in select(AcceptanceSuite.KERNEL)] == [1, 2, 3, 4]
    assert [c[0] for c in select(AcceptanceSuite.E2E)] == [8, 9]
    assert [c[0] for c in select(AcceptanceSuite.ALL, [3, 12])] == [3, 12]
    assert select(AcceptanceSuite.SEQLAB, [1]) == []


def test_sizes() -> None:
    """測試桌面規模小於完整規模"""
    full = AcceptanceSizes.for_scale(AcceptanceScale.FULL)
    desk = AcceptanceSizes.for_scale(AcceptanceScale.DESK)

    assert full.boundary_samples == 100
    assert full.seq_J_large == 1_000_000
    assert desk.solver_resolution < full.solver_resolution
    assert desk.oracle_tol > full.oracle_tol


def test_hand_derived_table_covers_both_modes() -> None:
    """測試手算表涵蓋兩種模式"""
    assert {key[0] for key in HAND_DERIVED_EXPONENTS} == {ConstantsMode.GLOBAL, ConstantsMode.CAPPED}


def test_schedule_suite_passes() -> None:
    """測試閉式指數與 λ_B 反解的驗收項目"""
    entries = []
    report = accept(AcceptanceSuite.SCHEDULE, AcceptanceScale.DESK, on_entry=entries.append)

    assert report.passed
    assert [entry.number for entry in entries] == [12]
    assert entries[0].measured["max_exponent_error"] <= 1e-14


def test_seqlab_suite_passes() -> None:
    """測試數列套件在桌面規模通過"""
    report = accept(AcceptanceSuite.SEQLAB, AcceptanceScale.DESK)
    measured = report.entries[0].measured

    assert report.passed
    assert measured["sharpness_eventually_increasing"] is True
    assert 1e8 < measured["sharpness_turning_point"] < 1e9


def test_error_becomes_failed_entry() -> None:
    """測試數值錯誤記成失敗的項目，其他項目照常執行"""

    def broken(ctx: AcceptanceContext) -> Tuple[bool, Dict[str, Any]]:
        raise ConvergenceError("Newton 沒有收斂")

    def fine(ctx: AcceptanceContext) -> Tuple[bool, Dict[str, Any]]:
        return True, {"scale": ctx.scale.value}

    criteria = [
        (1, "broken", AcceptanceSuite.SOLVER, broken),
        (2, "fine", AcceptanceSuite.SOLVER, fine),
    ]
    on_entry = MagicMock()
    with patch("blowup_lab.utils.acceptance.CRITERIA", criteria):
        report = accept(AcceptanceSuite.SOLVER, AcceptanceScale.DESK, seed=7, on_entry=on_entry)

    assert not report.passed
    assert report.entries[0].measured == {"error": "ConvergenceError: Newton 沒有收斂"}
    assert report.entries[1].passed
    assert report.entries[1].measured == {"scale": "desk"}
    assert on_entry.call_count == 2
    data = report.as_dict()
    assert data["seed"] == 7
    assert data["entries"][0]["suite"] == "solver"


def test_context_caches_c_hat() -> None:
    """測試同一個 α 只校準一次"""
    ctx = AcceptanceContext(AcceptanceScale.DESK, 1)
    with patch("blowup_lab.utils.acceptance.calibrate_bti_constant") as mock_calibrate:
        mock_calibrate.return_value.C_hat = 2.5
        assert ctx.c_hat(0.75) == 2.5
        assert ctx.c_hat(0.75) == 2.5

    mock_calibrate.assert_called_once()


@pytest.mark.slow
def test_kernel_suite_desk() -> None:
    """測試核函數套件在桌面規模通過"""
    report = accept(AcceptanceSuite.KERNEL, AcceptanceScale.DESK, numbers=[1, 2])

    assert report.passed
