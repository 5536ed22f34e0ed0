from enum import IntEnum


class ExitCode(IntEnum):
    SUCCESS = 0  # 執行成功
    CANCEL = 1  # 使用者取消操作
    ERROR = 2  # 發生錯誤（數值失敗、設定不合法）
    ACCEPTANCE_FAILED = 3  # 驗收項目未通過
