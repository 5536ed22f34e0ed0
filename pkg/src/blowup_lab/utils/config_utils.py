import os
import shutil
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv

from blowup_lab.core.paths import ProjectPaths
from blowup_lab.core.project_config import ProjectInfo
from blowup_lab.enums.config_key import ConfigKey
from blowup_lab.enums.default_value import DefaultValue
from blowup_lab.utils.console_utils import console


def project_config_file(work_dir: str = ".") -> Path:
    return Path(work_dir) / ProjectInfo.REPO_CONFIG_DIR / ProjectInfo.CONFIG_TEMPLATE_NAME


def _load_config_from_config_file(config: Dict[str, Any], work_dir: str) -> None:
    """
    從專案配置文件載入配置

    Args:
        config (Dict[str, Any]): 設定
        work_dir (str): 工作目錄
    """
    config_file = project_config_file(work_dir)

    if not config_file.exists():
        return

    with open(config_file, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()

            # '#' 開頭的行為註解，忽略
            if line and not line.startswith("#"):
                key, value = line.split("=", 1)
                config[key.strip()] = value.strip()


def load_config(work_dir: str = ".") -> None:
    """
    載入配置並寫入環境變數

    優先順序:
    1. 專案配置文件 (.blowup-lab/.blowup-lab-config)
    2. 環境變數 (.env)
    3. 默認值

    Args:
        work_dir (str, optional): 工作目錄。Defaults to ".".
    """
    config: Dict[str, Any] = {
        ConfigKey.OUTPUT_ROOT.value: DefaultValue.OUTPUT_ROOT.value,
        ConfigKey.SEED.value: DefaultValue.SEED.value,
        ConfigKey.WORKERS.value: DefaultValue.WORKERS.value,
        ConfigKey.C_HAT.value: None,
    }

    # 從 .env 載入，覆蓋默認配置
    dotenv_path = ProjectPaths.PACKAGE_DIR / ".env"
    load_dotenv(dotenv_path)
    for key in config:
        env_value = os.getenv(key)
        if env_value is not None:
            config[key] = env_value

    try:
        _load_config_from_config_file(config, work_dir)
    except Exception as e:
        console.print(f"[yellow] 載入 blowup-lab config 失敗：{e}[/yellow]")

    for key, value in config.items():
        if value is not None:
            os.environ[key] = str(value)


def get_output_root() -> Path:
    return Path(os.getenv(ConfigKey.OUTPUT_ROOT.value, DefaultValue.OUTPUT_ROOT.value))


def get_seed() -> int:
    return int(os.getenv(ConfigKey.SEED.value, str(DefaultValue.SEED.value)))


def get_workers() -> int:
    return max(1, int(os.getenv(ConfigKey.WORKERS.value, str(DefaultValue.WORKERS.value))))


def get_c_hat() -> Optional[float]:
    """環境中預先校準的 C_hat；未設定或無法解析時回傳 None"""
    raw = os.getenv(ConfigKey.C_HAT.value)
    if raw is None or not raw.strip():
        return None
    try:
        value = float(raw)
    except ValueError:
        console.print(f"[yellow] 忽略無法解析的 {ConfigKey.C_HAT.value}={raw}[/yellow]")
        return None
    return value if value > 0 else None


def write_config_value(key: ConfigKey, value: Any, work_dir: str = ".") -> Path:
    """
    在專案配置文件中寫入（或取代）一個設定值

    檔案不存在時先複製設定檔範本作為開頭。
    """
    config_file = project_config_file(work_dir)
    config_file.parent.mkdir(parents=True, exist_ok=True)
    if not config_file.exists():
        shutil.copy(ProjectPaths.get_config_template(ProjectInfo.CONFIG_EXAMPLE_NAME), config_file)

    lines = config_file.read_text(encoding="utf-8").splitlines()
    entry = f"{key.value}={value}"
    replaced = False
    for index, line in enumerate(lines):
        stripped = line.strip()
        if not stripped.startswith("#") and "=" in stripped and stripped.split("=", 1)[0].strip() == key.value:
            lines[index] = entry
            replaced = True
    if not replaced:
        lines.append(entry)
    config_file.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return config_file
