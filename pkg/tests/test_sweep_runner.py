import math
from typing import Any, Dict, Tuple
from unittest.mock import patch

import numpy as np
import pytest

from blowup_lab.core.errors import DomainError
from blowup_lab.enums.run_status import ScheduleMode
from blowup_lab.utils.scenario_utils import Scenario, ScheduleSpec, SolverSpec, SweepPlan, serialize_scenario
from blowup_lab.utils.sweep_runner import _run_point, fit_power_law, plateau, run_sweep


@pytest.fixture
def base() -> Scenario:
    return Scenario(name="sweep", solver=SolverSpec(resolution=4, dt_init=0.05), horizon=0.2)


def _fake_point(task: Tuple[str, str, int, Any]) -> Dict[str, Any]:
    """T* = 1/γ₁ 的假掃描點"""
    value = task[0]
    return {"param": value, "T_star": 1.0 / float(value), "uncertainty": 0.0, "verdict": "blowup", "error": None}


def test_fit_power_law() -> None:
    """測試精確冪次的擬合"""
    params = np.array([0.05, 0.1, 0.2, 0.4])
    fit = fit_power_law(params, 3.0 * params**-1.0)

    assert fit.exponent == pytest.approx(-1.0)
    assert fit.prefactor == pytest.approx(3.0)
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.count == 4


def test_fit_power_law_skips_invalid_points() -> None:
    """測試略過非有限或非正的點，剩不到 2 點時拋出錯誤"""
    fit = fit_power_law(np.array([1.0, 2.0, 4.0, -1.0]), np.array([1.0, 4.0, math.nan, 2.0]))

    assert fit.count == 2
    assert fit.exponent == pytest.approx(2.0)
    with pytest.raises(DomainError):
        fit_power_law(np.array([1.0, 2.0]), np.array([1.0, math.nan]))


def test_plateau() -> None:
    """測試 T*·(q−1) 在 q → 1⁺ 時是否穩定"""
    q = np.array([2.0, 1.5, 1.1, 1.05])
    stable_value, stable = plateau(q, np.array([1.0, 2.1, 10.2, 20.3]))

    assert stable_value == pytest.approx(20.3 * 0.05)
    assert stable
    assert plateau(q, np.array([1.0, 2.0, 4.0, 20.0]))[1] is False
    assert plateau(q, np.full(4, math.nan)) == (None, False)
    assert plateau(q[:1], np.array([1.0])) == (1.0, False)


def test_run_sweep_collects_rows_in_order(base: Scenario) -> None:
    """測試結果依掃描值排列並擬合冪次"""
    plan = SweepPlan(base, "schedule.gamma1", ("0.4", "0.2", "0.1"))
    with patch("blowup_lab.utils.sweep_runner._run_point", side_effect=_fake_point):
        result = run_sweep(plan)

    assert [row["param"] for row in result.rows] == ["0.4", "0.2", "0.1"]
    assert not result.partial
    assert result.fit is not None
    assert result.fit.exponent == pytest.approx(-1.0)
    frame = result.frame()
    assert list(frame.columns[:3]) == ["param", "T_star", "uncertainty"]
    assert frame["param"].tolist() == [0.4, 0.2, 0.1]


def test_run_sweep_q_axis(base: Scenario) -> None:
    """測試 q 掃描額外輸出 T*·(q−1)"""
    plan = SweepPlan(base, "solver.q", ("2.0", "1.5"), regression=False)
    with patch("blowup_lab.utils.sweep_runner._run_point", side_effect=_fake_point):
        result = run_sweep(plan)

    assert result.fit is None
    assert result.plateau_value == pytest.approx(1.0 / 1.5 * 0.5)
    assert result.frame()["T_star_q_minus_1"].tolist() == pytest.approx([0.5, 1.0 / 3.0])
    assert result.as_dict()["axis"] == "solver.q"


def test_run_sweep_resolves_c_hat_once(base: Scenario) -> None:
    """測試 global 排程的 C_hat 在主程序決定一次並傳給每個點"""
    scheduled = Scenario(
        name="prevent",
        schedule=ScheduleSpec(mode=ScheduleMode.GLOBAL, beta=2.0),
        solver=base.solver,
        t_star_multiple=2.0,
    )
    plan = SweepPlan(scheduled, "schedule.gamma1", ("0.1", "0.2"), regression=False)
    with patch("blowup_lab.utils.sweep_runner.resolve_c_hat", return_value=(3.0, "config")) as mock_resolve, patch(
        "blowup_lab.utils.sweep_runner._run_point", side_effect=_fake_point
    ) as mock_point:
        run_sweep(plan)

    mock_resolve.assert_called_once()
    for call in mock_point.call_args_list:
        task = call.args[0]
        assert task[3] == 3.0
        assert "schedule.C_hat = 3.0" in task[1]


def test_run_point_insulated(base: Scenario) -> None:
    """測試全絕熱的掃描點沒有爆破"""
    scenario = Scenario(name="cold", schedule=ScheduleSpec(mode=ScheduleMode.INSULATED), solver=base.solver, horizon=0.2)
    row = _run_point(("0", serialize_scenario(scenario), 1, None))

    assert row["error"] is None
    assert row["verdict"] == "completed"
    assert math.isnan(row["T_star"])


def test_run_point_records_error() -> None:
    """測試掃描點的錯誤記錄在結果中而不拋出"""
    row = _run_point(("1", "horizon = -1\n", 1, None))

    assert row["error"].startswith("ValidationError")
    assert math.isnan(row["T_star"])


def test_run_sweep_partial(base: Scenario) -> None:
    """測試有點失敗時標記為 partial"""

    def flaky(task: Tuple[str, str, int, Any]) -> Dict[str, Any]:
        row = _fake_point(task)
        if task[0] == "0.2":
            row.update({"T_star": math.nan, "error": "ConvergenceError: Newton"})
        return row

    plan = SweepPlan(base, "schedule.gamma1", ("0.4", "0.2", "0.1"))
    with patch("blowup_lab.utils.sweep_runner._run_point", side_effect=flaky):
        result = run_sweep(plan)

    assert result.partial
    assert result.fit is not None and result.fit.count == 2
