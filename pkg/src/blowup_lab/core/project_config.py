"""此模組用來統一管理專案的基本資訊，包括版本號、相依套件、專案名稱等。

這些資訊主要用於：
1. 產生 pyproject.toml 設定檔
2. 提供其他模組存取專案資訊（CLI 版本、設定檔位置）
"""

from enum import Enum
from typing import List


class ProjectInfo:
    NAME: str = "blowup-lab"
    VERSION: str = "0.3.0"
    DESCRIPTION: str = "Blowup Lab - 縮小輻射邊界的熱方程式爆破與防止爆破數值實驗室"
    PYTHON_REQUIRES: str = ">=3.10"
    LICENSE: str = "Apache-2.0"

    # 專案的相依套件
    class Dependencies(Enum):
        CLICK = "click>=8.0.0"
        PYTHON_DOTENV = "python-dotenv>=1.0.1"
        QUESTIONARY = "questionary>=2.1.0"
        RICH = "rich>=13.9.4"
        TOMLW = "tomli-w>=1.2.0"
        YAML = "PyYAML>=6.0.2"
        NUMPY = "numpy>=1.26.0"
        SCIPY = "scipy>=1.11.0"
        PANDAS = "pandas>=2.1.0"

    # 專案開發的相依套件
    # 僅有開發時才需要的套件
    class DevDependencies(Enum):
        PRE_COMMIT = "pre-commit>=4.1.0"
        PYTEST = "pytest>=8.3.4"
        PYTEST_COV = "pytest-cov>=6.0.0"
        HYPOTHESIS = "hypothesis>=6.98.0"
        YAML_TYPE = "types-PyYAML>=6.0.12.20241230"
        TOMLI = "tomli>=2.2.1"

    # 專案的 package 路徑
    PACKAGE_PATH = "src"
    PACKAGE_INCLUDE = ["blowup_lab*"]

    # 專案的主要指令
    CLI_MAIN_COMMAND = "blowup-lab"
    SHORT_CLI_MAIN_COMMAND = "bl-lab"

    # 專案入口
    ENTRY_POINTS = "blowup_lab.cli:cli"

    # 設定專案的靜態檔案，此裡面包含的檔案，會在安裝時一併被安裝到專案中
    PACKAGE_DATA = {
        "blowup_lab": [
            "resources/**/*",
            "resources/scenarios/*.cfg",
            "resources/config/*",
            "resources/config/.blowup-lab-config.example",
        ]
    }

    # 設定檔名稱（使用者在工作目錄下建立）
    CONFIG_TEMPLATE_NAME = ".blowup-lab-config"

    # 設定檔 example 名稱
    CONFIG_EXAMPLE_NAME = ".blowup-lab-config.example"

    # 工作目錄底下的專案設定目錄名稱
    REPO_CONFIG_DIR = ".blowup-lab"

    # 每次執行輸出的檔名
    REPORT_FILE = "report.yaml"
    TRACE_FILE = "trace.csv"
    SNAPSHOT_FILE = "config.snapshot"
    SCAN_FILE = "scan.csv"

    # unit test 相關
    TEST_DIRS = ["blowup_lab"]
    TEST_PATHS = ["tests"]
    TEST_COMMAND = "--cov=blowup_lab --cov-branch --cov-report=term-missing --cov-report=xml -v"
    TEST_MARKERS = ["slow: 以接近驗收規模執行的數值測試"]

    # 要忽略的檔案
    OMIT_FILES = [
        "tests/*",
        "*/__init__.py",
    ]

    # 最低的測試覆蓋率要求
    COVERAGE_THRESHOLD = 85
    EXCLUDE_LINES = [
        "pragma: no cover",
        "def __repr__",
        "if TYPE_CHECKING",
        "if __name__ == '__main__'",
    ]

    @classmethod
    def get_dependencies(cls) -> List[str]:
        """取得專案的相依套件清單"""
        return [dep.value for dep in cls.Dependencies]

    @classmethod
    def get_dev_dependencies(cls) -> List[str]:
        """取得專案的開發相依套件清單"""
        return [dep.value for dep in cls.DevDependencies]
