from enum import Enum


class KernelMethod(Enum):
    IMAGES = "images"
    EIGEN = "eigen"
    AUTO = "auto"


class BoundaryQuadrature(Enum):
    """邊界-時間積分的空間積分方式"""

    GAUSS_LEGENDRE = "gauss-legendre"
    EXACT = "exact"  # 以 erf 閉式解計算


class TimeScheme(Enum):
    IMPLICIT_EULER = "implicit-euler"
    CRANK_NICOLSON = "crank-nicolson"

    @property
    def theta(self) -> float:
        return 1.0 if self is TimeScheme.IMPLICIT_EULER else 0.5


class InterfaceRule(Enum):
    """網格節點與輻射弧交界的處理方式

    - SNAPPED: 弧端點取最近節點，端點節點取 ½ 權重
    - FRACTIONAL: 以對偶格與弧的重疊比例作為權重
    """

    SNAPPED = "snapped"
    FRACTIONAL = "fractional"


class TailStrategy(Enum):
    """級數尾端的處理方式"""

    DIRECT = "direct"  # 直接加總並以積分上下界夾住尾端
    EULER_MACLAURIN = "euler-maclaurin"
    AUTO = "auto"
