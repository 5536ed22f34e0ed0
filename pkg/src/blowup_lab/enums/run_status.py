from enum import Enum


class Verdict(Enum):
    COMPLETED = "completed"
    BLOWUP = "blowup"


class ScheduleMode(Enum):
    """情境設定中輻射邊界的排程方式

    - FIXED: 固定的 Γ₁（不縮小）
    - PROFILE: 直接指定衰減型式
    - GLOBAL: 依全域存在定理的常數建構多項式排程
    - CAPPED: 依溫度上限定理的常數建構多項式排程
    - INSULATED: 全部邊界絕熱
    """

    FIXED = "fixed"
    PROFILE = "profile"
    GLOBAL = "global"
    CAPPED = "capped"
    INSULATED = "insulated"


class ConstantsMode(Enum):
    GLOBAL = "global"
    CAPPED = "capped"


class InitialDataKind(Enum):
    CONSTANT = "constant"
    NEUMANN_MODE = "neumann_mode"


class AcceptanceSuite(Enum):
    KERNEL = "kernel"
    SOLVER = "solver"
    SCHEDULE = "schedule"
    SEQLAB = "seqlab"
    E2E = "e2e"
    ALL = "all"


class AcceptanceScale(Enum):
    FULL = "full"  # 依驗收標準的完整規模
    DESK = "desk"  # 縮小規模，供單元測試與快速檢查
