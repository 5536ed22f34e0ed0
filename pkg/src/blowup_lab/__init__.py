"""Blowup Lab - 縮小輻射邊界的熱方程式爆破與防止爆破數值實驗室"""

from blowup_lab.cli import cli

__all__ = ["cli"]
