"""blowup-lab 相關的枚舉類型"""

from .config_key import ConfigKey
from .default_value import DefaultValue
from .exit_code import ExitCode
from .geometry_kind import Anchor, BoundaryPart, DomainKind, ProfileKind
from .numerics import BoundaryQuadrature, InterfaceRule, KernelMethod, TailStrategy, TimeScheme
from .run_status import (
    AcceptanceScale,
    AcceptanceSuite,
    ConstantsMode,
    InitialDataKind,
    ScheduleMode,
    Verdict,
)

__all__ = [
    "ExitCode",
    "ConfigKey",
    "DefaultValue",
    "Anchor",
    "BoundaryPart",
    "DomainKind",
    "ProfileKind",
    "BoundaryQuadrature",
    "InterfaceRule",
    "KernelMethod",
    "TailStrategy",
    "TimeScheme",
    "AcceptanceScale",
    "AcceptanceSuite",
    "ConstantsMode",
    "InitialDataKind",
    "ScheduleMode",
    "Verdict",
]
