from enum import Enum


class ConfigKey(Enum):
    OUTPUT_ROOT = "BLOWUP_LAB_OUTPUT"
    SEED = "BLOWUP_LAB_SEED"
    WORKERS = "BLOWUP_LAB_WORKERS"
    C_HAT = "BLOWUP_LAB_C_HAT"
