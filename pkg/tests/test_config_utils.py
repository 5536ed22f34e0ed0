import os
from pathlib import Path
from typing import Any, Dict, Generator
from unittest.mock import patch

import pytest

from blowup_lab.core.project_config import ProjectInfo
from blowup_lab.enums.config_key import ConfigKey
from blowup_lab.enums.default_value import DefaultValue
from blowup_lab.utils.config_utils import (
    _load_config_from_config_file,
    get_c_hat,
    get_output_root,
    get_seed,
    get_workers,
    load_config,
    write_config_value,
)


@pytest.fixture
def mock_project_paths(tmp_path: Path) -> Generator[Path, None, None]:
    """模擬專案路徑，提供設定檔範本"""
    package_dir = tmp_path / "package"
    config_dir = package_dir / "resources" / "config"
    config_dir.mkdir(parents=True)

    example_file = config_dir / ProjectInfo.CONFIG_EXAMPLE_NAME
    example_file.write_text(
        "# test example config\nBLOWUP_LAB_SEED=7\n# BLOWUP_LAB_C_HAT=\n",
        encoding="utf-8",
    )

    with (
        patch("blowup_lab.core.paths.ProjectPaths.PACKAGE_DIR", package_dir),
        patch("blowup_lab.core.paths.ProjectPaths.CONFIG_DIR", config_dir),
    ):
        yield tmp_path


def _write_project_config(work_dir: Path, content: str) -> Path:
    config_dir = work_dir / ProjectInfo.REPO_CONFIG_DIR
    config_dir.mkdir(exist_ok=True)
    config_file = config_dir / ProjectInfo.CONFIG_TEMPLATE_NAME
    config_file.write_text(content, encoding="utf-8")
    return config_file


def test_load_config_from_config_file(tmp_path: Path) -> None:
    """測試從設定檔載入設定"""
    _write_project_config(
        tmp_path,
        """
            # 這是註解
            BLOWUP_LAB_SEED=42
            BLOWUP_LAB_OUTPUT=results
        """,
    )

    config: Dict[str, Any] = {}
    _load_config_from_config_file(config, str(tmp_path))

    assert config["BLOWUP_LAB_SEED"] == "42"
    assert config["BLOWUP_LAB_OUTPUT"] == "results"
    assert "#" not in str(config)


def test_load_config_from_env(tmp_path: Path) -> None:
    """測試從 .env 載入設定"""
    (tmp_path / ".env").write_text("BLOWUP_LAB_WORKERS=4\n", encoding="utf-8")

    with patch("blowup_lab.core.paths.ProjectPaths.PACKAGE_DIR", tmp_path):
        with patch.dict(os.environ, {}, clear=True):
            load_config(str(tmp_path))

            assert os.environ[ConfigKey.WORKERS.value] == "4"
            assert get_workers() == 4


def test_load_config_default_values(tmp_path: Path) -> None:
    """測試載入預設值"""
    with patch("blowup_lab.core.paths.ProjectPaths.PACKAGE_DIR", tmp_path):
        with patch.dict(os.environ, {}, clear=True):
            load_config(str(tmp_path))

            assert get_output_root() == Path(DefaultValue.OUTPUT_ROOT.value)
            assert get_seed() == DefaultValue.SEED.value
            assert get_workers() == DefaultValue.WORKERS.value
            assert ConfigKey.C_HAT.value not in os.environ
            assert get_c_hat() is None


def test_load_config_priority(tmp_path: Path) -> None:
    """測試設定的優先順序：專案設定檔高於 .env"""
    (tmp_path / ".env").write_text("BLOWUP_LAB_SEED=1\n", encoding="utf-8")
    _write_project_config(tmp_path, "BLOWUP_LAB_SEED=2\n")

    with patch("blowup_lab.core.paths.ProjectPaths.PACKAGE_DIR", tmp_path):
        with patch.dict(os.environ, {}, clear=True):
            load_config(str(tmp_path))

            assert get_seed() == 2


def test_load_config_file_error(tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
    """測試載入設定檔出錯的情況"""
    with patch("blowup_lab.utils.config_utils._load_config_from_config_file", side_effect=Exception):
        with patch.dict(os.environ, {}, clear=True):
            load_config(str(tmp_path))

    console_output = capsys.readouterr().out
    assert "載入 blowup-lab config 失敗" in console_output


@pytest.mark.parametrize(
    "raw, expected",
    [
        ("0.25", 0.25),
        ("", None),
        ("  ", None),
        ("abc", None),
        ("-1", None),
    ],
)
def test_get_c_hat(raw: str, expected: Any) -> None:
    """測試解析預先校準的 C_hat"""
    with patch.dict(os.environ, {ConfigKey.C_HAT.value: raw}, clear=True):
        assert get_c_hat() == expected


def test_get_workers_at_least_one() -> None:
    """測試工作程序數量至少為 1"""
    with patch.dict(os.environ, {ConfigKey.WORKERS.value: "0"}, clear=True):
        assert get_workers() == 1


def test_write_config_value_copies_template(tmp_path: Path, mock_project_paths: Path) -> None:
    """測試設定檔不存在時先複製範本再寫入"""
    path = write_config_value(ConfigKey.C_HAT, "0.5", str(tmp_path))

    assert path == tmp_path / ProjectInfo.REPO_CONFIG_DIR / ProjectInfo.CONFIG_TEMPLATE_NAME
    content = path.read_text(encoding="utf-8")
    assert "# test example config" in content
    assert "BLOWUP_LAB_SEED=7" in content
    assert content.rstrip().endswith("BLOWUP_LAB_C_HAT=0.5")
    # 註解中的同名鍵不會被取代
    assert "# BLOWUP_LAB_C_HAT=" in content


def test_write_config_value_replaces_existing(tmp_path: Path, mock_project_paths: Path) -> None:
    """測試已存在的鍵會被取代而不是重複"""
    config_file = _write_project_config(tmp_path, "BLOWUP_LAB_C_HAT=1.0\nBLOWUP_LAB_SEED=3\n")

    write_config_value(ConfigKey.C_HAT, "2.0", str(tmp_path))

    lines = config_file.read_text(encoding="utf-8").splitlines()
    assert lines == ["BLOWUP_LAB_C_HAT=2.0", "BLOWUP_LAB_SEED=3"]
