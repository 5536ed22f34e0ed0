from enum import Enum


class DomainKind(Enum):
    """計算區域種類

    - BOX2D: 平面上的長方形 [0,a]×[0,b]
    - BOX3D: 空間中的長方體 [0,a]×[0,b]×[0,c]
    - DISK2D: 平面單位圓盤（僅供求解器使用）
    """

    BOX2D = "box2d"
    BOX3D = "box3d"
    DISK2D = "disk2d"


class ProfileKind(Enum):
    """輻射邊界面積的衰減型式 f(t)"""

    CONSTANT = "constant"
    POLYNOMIAL = "polynomial"
    EXPONENTIAL = "exponential"
    CAP = "cap"
    TABLE = "table"


class Anchor(Enum):
    """輻射弧縮小時的固定方式"""

    CENTER = "center"
    LEFT_END = "left-end"


class BoundaryPart(Enum):
    """某時刻邊界上的一點屬於哪一部分"""

    RADIATING = "radiating"  # Γ₁,ₜ 內部
    INSULATED = "insulated"  # Γ₂,ₜ 內部
    INTERFACE = "interface"  # 兩者的交界 Γ̃ₜ
