"""此模組定義 blowup-lab 所有數值模組共用的例外與警告類別

每個例外同時繼承對應的內建例外（ValueError / RuntimeError），
呼叫端可以只捕捉內建例外，CLI 則透過 ``error_name`` 回報模組錯誤名稱。
"""


class BlowupLabError(Exception):
    """blowup-lab 的根例外"""

    @property
    def error_name(self) -> str:
        return type(self).__name__


class DomainError(BlowupLabError, ValueError):
    """參數超出數學定義域，例如 t ≤ 0、面積超出範圍、B ≤ M₀"""


class ValidationError(BlowupLabError, ValueError):
    """輸入資料格式或內容不合法，例如非單調的表格 profile、負的初始值"""


class UnsupportedDomainError(DomainError):
    """要求的計算區域不支援此操作（例如圓盤上的精確熱核）"""


class HypothesisViolationError(DomainError):
    """違反定理假設，例如 β ≤ n−1"""


class ConvergenceError(BlowupLabError, RuntimeError):
    """迭代無法收斂（Picard 迭代殘差上升、二分法用盡迭代次數）"""


class StepRejectedError(BlowupLabError, RuntimeError):
    """單一時間步的 Newton 迭代失敗，呼叫端應將 dt 減半後重試"""

    def __init__(self, message: str, dt: float) -> None:
        super().__init__(message)
        self.dt = dt


class BlowupSuspectedError(StepRejectedError):
    """時間步在 dt < dt_min 時仍被拒絕"""


class OutOfValidityWarning(UserWarning):
    """在估計式只對 t ≤ 1 成立的範圍之外求值"""


class LowConfidenceWarning(UserWarning):
    """多解析度外插信心度低：收斂序列不單調，或對照解析度沒有給出 T*"""


class UnderResolvedArcWarning(UserWarning):
    """輻射弧窄於一個網格間距，snapped 規則無法表示"""
