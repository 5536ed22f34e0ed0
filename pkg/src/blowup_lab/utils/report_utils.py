"""每次執行一個輸出目錄：report.yaml、trace.csv、config.snapshot"""

import math
import shutil
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd
import questionary
import yaml

from blowup_lab.core.project_config import ProjectInfo
from blowup_lab.utils.config_utils import get_output_root

CSV_FLOAT_FORMAT = "%.17g"


def to_plain(value: Any) -> Any:
    """轉成 yaml.safe_dump 可寫出的純 Python 型別；非有限浮點數寫成字串"""
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_plain(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if hasattr(value, "value") and hasattr(value, "name"):
        return value.value
    return value


def run_directory(name: str, output_root: Optional[Path] = None) -> Path:
    """輸出目錄 <output_root>/<name>；名稱中的路徑分隔字元改為底線"""
    safe = "".join(c if c.isalnum() or c in "-_.=" else "_" for c in name).strip("_") or "run"
    return (output_root or get_output_root()) / safe


def prepare_directory(path: Path, assume_yes: bool = False) -> bool:
    """
    建立輸出目錄

    目錄已存在且非空時詢問是否覆寫；assume_yes 為 True 時直接覆寫。

    Returns:
        bool: False 表示使用者取消
    """
    if path.exists() and any(path.iterdir()):
        if not assume_yes and not questionary.confirm(f"{path} 已存在，是否覆寫？", default=False).ask():
            return False
        shutil.rmtree(path)
    path.mkdir(parents=True, exist_ok=True)
    return True


def write_report(directory: Path, report: Dict[str, Any]) -> Path:
    path = directory / ProjectInfo.REPORT_FILE
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(to_plain(report), f, allow_unicode=True, sort_keys=False)
    return path


def read_report(path: Path) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        return yaml.safe_load(f)


def write_csv(path: Path, frame: pd.DataFrame) -> Path:
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    return path


def write_trace(directory: Path, frame: pd.DataFrame) -> Path:
    return write_csv(directory / ProjectInfo.TRACE_FILE, frame)


def write_snapshot(directory: Path, text: str) -> Path:
    path = directory / ProjectInfo.SNAPSHOT_FILE
    path.write_text(text, encoding="utf-8")
    return path
