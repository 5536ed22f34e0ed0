import importlib
from pathlib import Path
from typing import Generator
from unittest.mock import MagicMock, patch

import pytest
import yaml
from click.testing import CliRunner

from blowup_lab.commands import calibrate
from blowup_lab.enums.config_key import ConfigKey
from blowup_lab.enums.exit_code import ExitCode

calibrate_module = importlib.import_module("blowup_lab.commands.calibrate")


@pytest.fixture(autouse=True)
def skip_load_config() -> Generator[None, None, None]:
    with patch.object(calibrate_module, "load_config"):
        yield


@pytest.fixture
def mock_calibration() -> Generator[MagicMock, None, None]:
    """以固定結果取代實際校準"""
    result = MagicMock(C_hat=2.5, sample_count=12)
    result.as_dict.return_value = {"C_hat": 2.5, "samples": 12}
    with patch.object(calibrate_module, "calibrate_bti_constant", return_value=result) as mock_calibrate:
        yield mock_calibrate


def test_calibrate_with_alpha(mock_calibration: MagicMock, tmp_path: Path) -> None:
    """測試指定 α 校準並寫出報告"""
    with patch.object(calibrate_module, "bti_bound_violations", return_value=[]):
        result = CliRunner().invoke(calibrate, ["--alpha", "0.75", "--seed", "3", "--output", str(tmp_path), "--yes"])

    assert result.exit_code == ExitCode.SUCCESS, result.output
    assert mock_calibration.call_args.args[1] == 0.75
    report = yaml.safe_load((tmp_path / "calibrate-box2d-alpha0.75" / "report.yaml").read_text(encoding="utf-8"))
    assert report["bti"]["C_hat"] == 2.5
    assert report["held_out_violations"] == []


def test_calibrate_alpha_from_mode(mock_calibration: MagicMock, tmp_path: Path) -> None:
    """測試由 --mode 與 --beta 推得 α"""
    result = CliRunner().invoke(
        calibrate, ["--mode", "capped", "--beta", "2", "--no-held-out", "--output", str(tmp_path), "--yes"]
    )

    assert result.exit_code == ExitCode.SUCCESS, result.output
    assert mock_calibration.call_args.args[1] == pytest.approx(0.875)


def test_calibrate_requires_alpha(tmp_path: Path) -> None:
    """測試缺少 α 與模式時的使用錯誤"""
    result = CliRunner().invoke(calibrate, ["--output", str(tmp_path)])

    assert result.exit_code == 2
    assert "--alpha" in result.output


def test_calibrate_held_out_violation(mock_calibration: MagicMock, tmp_path: Path) -> None:
    """測試驗證集合上有違反時結束碼為 3"""
    with patch.object(calibrate_module, "bti_bound_violations", return_value=[{"t": 0.1, "ratio": 1.2}]):
        result = CliRunner().invoke(calibrate, ["--alpha", "0.75", "--output", str(tmp_path), "--yes"])

    assert result.exit_code == ExitCode.ACCEPTANCE_FAILED
    assert "驗證集合" in result.output


def test_calibrate_save(mock_calibration: MagicMock, tmp_path: Path) -> None:
    """測試 --save 將 C_hat 寫入專案設定"""
    with patch.object(calibrate_module, "write_config_value", return_value=tmp_path / "config") as mock_write:
        result = CliRunner().invoke(
            calibrate, ["--alpha", "0.75", "--no-held-out", "--save", "--output", str(tmp_path), "--yes"]
        )

    assert result.exit_code == ExitCode.SUCCESS, result.output
    mock_write.assert_called_once_with(ConfigKey.C_HAT, "2.5")
