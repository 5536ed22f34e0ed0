"""blowup-lab 的執行環境工具：設定、輸出、情境、掃描與驗收"""

from .config_utils import load_config
from .console_utils import console, loading_spinner
from .scenario_utils import Scenario, SweepPlan, load_scenario, parse_scenario, serialize_scenario

__all__ = [
    "console",
    "loading_spinner",
    "load_config",
    "Scenario",
    "SweepPlan",
    "load_scenario",
    "parse_scenario",
    "serialize_scenario",
]
