from enum import Enum


class DefaultValue(Enum):
    OUTPUT_ROOT = "runs"
    SEED = 20240101
    WORKERS = 1
    U_MAX_FACTOR = 1e8
    DT_MIN = 1e-10
    TRUNCATION_EPS = 1e-14
