"""blowup-lab CLI 工具中的各項 commands"""

from .accept import accept
from .calibrate import calibrate
from .kernel_check import kernel_check
from .lifespan_scan import lifespan_scan
from .schedule import schedule
from .sequence_check import sequence_check
from .simulate import simulate

__all__ = ["simulate", "kernel_check", "calibrate", "schedule", "lifespan_scan", "sequence_check", "accept"]
