from pathlib import Path

import pandas as pd
import yaml
from click.testing import CliRunner

from blowup_lab.commands import sequence_check
from blowup_lab.core.seqlab import builtin_sequences
from blowup_lab.enums.exit_code import ExitCode


def test_sequence_check_writes_traces(tmp_path: Path) -> None:
    """測試每個內建數列輸出一個 CSV，並寫出尖銳性探針"""
    result = CliRunner().invoke(sequence_check, ["--J", "2000", "--output", str(tmp_path), "--yes"])

    assert result.exit_code == ExitCode.SUCCESS, result.output
    directory = tmp_path / "sequence-check-J2000"
    for spec in builtin_sequences():
        assert len(pd.read_csv(directory / f"{spec.label}.csv")) == 2000
    assert (directory / "sharpness.csv").exists()
    report = yaml.safe_load((directory / "report.yaml").read_text(encoding="utf-8"))
    assert report["passed"] is True
    assert report["sharpness"]["eventually_increasing"] is True
    assert all(row["elementary bound"] for row in report["suite"])


def test_sequence_check_eps_zero_fails(tmp_path: Path) -> None:
    """測試 ε = 0 時尖銳性探針不會回升，結束碼為 3"""
    result = CliRunner().invoke(
        sequence_check, ["--J", "2000", "--eps", "0", "--sharpness-J", "1e6", "--output", str(tmp_path), "--yes"]
    )

    assert result.exit_code == ExitCode.ACCEPTANCE_FAILED
    assert "未通過" in result.output


def test_sequence_check_invalid_q(tmp_path: Path) -> None:
    """測試 q ≤ 1"""
    result = CliRunner().invoke(sequence_check, ["--J", "2000", "--q", "1", "--output", str(tmp_path), "--yes"])

    assert result.exit_code == ExitCode.ERROR
    assert "DomainError" in result.output


def test_sequence_check_rejects_short_trace(tmp_path: Path) -> None:
    """測試 J 必須大於比較點"""
    result = CliRunner().invoke(sequence_check, ["--J", "10", "--output", str(tmp_path)])

    assert result.exit_code == 2
