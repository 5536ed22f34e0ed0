import importlib
from pathlib import Path
from typing import Generator
from unittest.mock import patch

import pytest
import yaml
from click.testing import CliRunner

from blowup_lab.commands import kernel_check
from blowup_lab.core.geometry import Domain
from blowup_lab.enums.exit_code import ExitCode

kernel_check_module = importlib.import_module("blowup_lab.commands.kernel_check")

PASSING = [{"check": "normalization", "measured": 1e-12, "threshold": 1e-8, "passed": True}]
FAILING = PASSING + [{"check": "symmetry", "measured": 1e-3, "threshold": 1e-12, "passed": False}]


@pytest.fixture(autouse=True)
def skip_load_config() -> Generator[None, None, None]:
    with patch.object(kernel_check_module, "load_config"):
        yield


def test_kernel_check_passes(tmp_path: Path) -> None:
    """測試全部通過時寫出報告"""
    with patch.object(kernel_check_module, "run_kernel_checks", return_value=PASSING) as mock_checks:
        result = CliRunner().invoke(kernel_check, ["--seed", "5", "--output", str(tmp_path), "--yes"])

    assert result.exit_code == ExitCode.SUCCESS, result.output
    domain, points, samples, seed = mock_checks.call_args.args
    assert domain == Domain.box2d(1.0, 1.0)
    assert (points, samples, seed) == (20, 100, 5)
    report = yaml.safe_load((tmp_path / "kernel-check-box2d" / "report.yaml").read_text(encoding="utf-8"))
    assert report["passed"] is True
    assert report["seed"] == 5


def test_kernel_check_failure_exit_code(tmp_path: Path) -> None:
    """測試有檢查未通過時結束碼為 3"""
    with patch.object(kernel_check_module, "run_kernel_checks", return_value=FAILING):
        result = CliRunner().invoke(kernel_check, ["--output", str(tmp_path), "--yes"])

    assert result.exit_code == ExitCode.ACCEPTANCE_FAILED
    assert "symmetry" in result.output


def test_kernel_check_lengths(tmp_path: Path) -> None:
    """測試 --lengths 與 3D 區域"""
    with patch.object(kernel_check_module, "run_kernel_checks", return_value=PASSING) as mock_checks:
        result = CliRunner().invoke(
            kernel_check, ["--domain", "box3d", "--lengths", "1,2,0.5", "--output", str(tmp_path), "--yes"]
        )

    assert result.exit_code == ExitCode.SUCCESS, result.output
    assert mock_checks.call_args.args[0].lengths == (1.0, 2.0, 0.5)


def test_kernel_check_bad_lengths(tmp_path: Path) -> None:
    """測試長度數量與維度不符"""
    result = CliRunner().invoke(kernel_check, ["--lengths", "1,1,1", "--output", str(tmp_path)])

    assert result.exit_code == ExitCode.ERROR
    assert "錯誤" in result.output


@pytest.mark.slow
def test_kernel_check_real_box(tmp_path: Path) -> None:
    """測試實際在單位正方形上執行所有檢查"""
    result = CliRunner().invoke(
        kernel_check, ["--points", "4", "--boundary-samples", "8", "--output", str(tmp_path), "--yes"]
    )

    assert result.exit_code == ExitCode.SUCCESS, result.output
