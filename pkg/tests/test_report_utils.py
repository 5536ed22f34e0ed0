import math
from pathlib import Path
from unittest.mock import MagicMock, patch

import numpy as np
import pandas as pd
import pytest

from blowup_lab.enums.numerics import TimeScheme
from blowup_lab.utils.report_utils import (
    prepare_directory,
    read_report,
    run_directory,
    to_plain,
    write_report,
    write_snapshot,
    write_trace,
)


def test_to_plain() -> None:
    """測試 numpy 型別、列舉與非有限浮點數的轉換"""
    plain = to_plain(
        {
            "array": np.array([1.0, 2.0]),
            "count": np.int64(3),
            "flag": np.bool_(True),
            "inf": math.inf,
            "nan": np.float64("nan"),
            "scheme": TimeScheme.CRANK_NICOLSON,
            1: (0.5, None),
        }
    )

    assert plain == {
        "array": [1.0, 2.0],
        "count": 3,
        "flag": True,
        "inf": "inf",
        "nan": "nan",
        "scheme": TimeScheme.CRANK_NICOLSON.value,
        "1": [0.5, None],
    }
    assert type(plain["count"]) is int


def test_run_directory(tmp_path: Path) -> None:
    """測試輸出目錄名稱中的特殊字元"""
    assert run_directory("sweep[solver.q=2]", tmp_path) == tmp_path / "sweep_solver.q=2"
    assert run_directory("///", tmp_path) == tmp_path / "run"


def test_run_directory_uses_config(tmp_path: Path) -> None:
    """測試未指定時使用設定中的輸出根目錄"""
    with patch("blowup_lab.utils.report_utils.get_output_root", return_value=tmp_path):
        assert run_directory("demo") == tmp_path / "demo"


def test_prepare_new_directory(tmp_path: Path) -> None:
    """測試建立新的輸出目錄"""
    target = tmp_path / "a" / "b"

    assert prepare_directory(target)
    assert target.is_dir()


@patch("blowup_lab.utils.report_utils.questionary.confirm")
def test_prepare_existing_directory_cancel(mock_confirm: MagicMock, tmp_path: Path) -> None:
    """測試目錄已存在時使用者取消覆寫"""
    (tmp_path / "old.txt").write_text("keep", encoding="utf-8")
    mock_confirm.return_value.ask.return_value = False

    assert not prepare_directory(tmp_path)
    assert (tmp_path / "old.txt").exists()


@patch("blowup_lab.utils.report_utils.questionary.confirm")
def test_prepare_existing_directory_overwrite(mock_confirm: MagicMock, tmp_path: Path) -> None:
    """測試確認後清空既有目錄；assume_yes 時不詢問"""
    target = tmp_path / "run"
    target.mkdir()
    (target / "old.txt").write_text("x", encoding="utf-8")
    mock_confirm.return_value.ask.return_value = True

    assert prepare_directory(target)
    assert not (target / "old.txt").exists()

    (target / "old.txt").write_text("x", encoding="utf-8")
    mock_confirm.reset_mock()
    assert prepare_directory(target, assume_yes=True)
    mock_confirm.assert_not_called()
    assert list(target.iterdir()) == []


def test_write_outputs(tmp_path: Path) -> None:
    """測試 report.yaml、trace.csv、config.snapshot 的寫出"""
    report_path = write_report(tmp_path, {"verdict": "blowup", "T_star": 4.25, "history": np.arange(3)})
    trace_path = write_trace(tmp_path, pd.DataFrame({"t": [0.0, 0.1], "M": [1.0, 1.0 + 1e-15]}))
    snapshot_path = write_snapshot(tmp_path, "name = demo\n")

    assert report_path.name == "report.yaml"
    assert read_report(report_path) == {"verdict": "blowup", "T_star": 4.25, "history": [0, 1, 2]}
    frame = pd.read_csv(trace_path, float_precision="round_trip")
    assert frame["M"].iloc[1] == 1.0 + 1e-15
    assert snapshot_path.read_text(encoding="utf-8") == "name = demo\n"


def test_report_keeps_key_order(tmp_path: Path) -> None:
    """測試報告依插入順序寫出"""
    path = write_report(tmp_path, {"z": 1, "a": 2})

    assert path.read_text(encoding="utf-8").splitlines()[0].startswith("z:")


@pytest.mark.parametrize("value", [math.inf, -math.inf])
def test_infinite_values_in_report(tmp_path: Path, value: float) -> None:
    """測試非有限值寫成字串"""
    path = write_report(tmp_path, {"C_star": value})

    assert read_report(path)["C_star"] == str(value)
