import importlib
from pathlib import Path
from typing import Generator
from unittest.mock import patch

import pytest
import yaml
from click.testing import CliRunner

from blowup_lab.commands import accept
from blowup_lab.enums.exit_code import ExitCode
from blowup_lab.enums.run_status import AcceptanceScale, AcceptanceSuite
from blowup_lab.utils.acceptance import AcceptanceEntry, AcceptanceReport

accept_module = importlib.import_module("blowup_lab.commands.accept")


@pytest.fixture(autouse=True)
def skip_load_config() -> Generator[None, None, None]:
    with patch.object(accept_module, "load_config"):
        yield


def test_accept_schedule_suite(tmp_path: Path) -> None:
    """測試 schedule 套件在桌面規模通過"""
    result = CliRunner().invoke(
        accept, ["--suite", "schedule", "--scale", "desk", "--seed", "1", "--output", str(tmp_path), "--yes"]
    )

    assert result.exit_code == ExitCode.SUCCESS, result.output
    assert "#12" in result.output
    report = yaml.safe_load((tmp_path / "accept-schedule-desk" / "report.yaml").read_text(encoding="utf-8"))
    assert report["passed"] is True
    assert report["seed"] == 1
    assert [entry["number"] for entry in report["entries"]] == [12]


def test_accept_failure_exit_code(tmp_path: Path) -> None:
    """測試有項目未通過時結束碼為 3"""
    failed = AcceptanceReport(
        AcceptanceSuite.SOLVER,
        AcceptanceScale.DESK,
        1,
        [AcceptanceEntry(6, "blowup upper bound", AcceptanceSuite.SOLVER, False, {"T_star": None})],
    )
    with patch.object(accept_module, "run_acceptance", return_value=failed) as mock_accept:
        result = CliRunner().invoke(
            accept, ["--suite", "solver", "--scale", "desk", "--only", "6", "--output", str(tmp_path), "--yes"]
        )

    assert result.exit_code == ExitCode.ACCEPTANCE_FAILED
    args = mock_accept.call_args.args
    assert args[0] is AcceptanceSuite.SOLVER
    assert args[3] == [6]


def test_accept_cancel(tmp_path: Path) -> None:
    """測試拒絕覆寫時不執行驗收"""
    with patch.object(accept_module, "prepare_directory", return_value=False), patch.object(
        accept_module, "run_acceptance"
    ) as mock_accept:
        result = CliRunner().invoke(accept, ["--output", str(tmp_path)])

    assert result.exit_code == ExitCode.CANCEL
    mock_accept.assert_not_called()
