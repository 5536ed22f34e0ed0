"""此模組定義計算區域、邊界弧與隨時間縮小的輻射邊界排程

支援的區域：
- box2d(a, b)：長方形 [0,a]×[0,b]，四條邊依序為 y=0、x=a、y=b、x=0
- box3d(a, b, c)：長方體，六個面依序為 z=0、z=c、y=0、y=b、x=0、x=a
- disk2d：單位圓盤，唯一的邊以角度 θ ∈ [0, 2π] 參數化（單位圓上角度即弧長）

邊上的座標一律以弧長（或面上的兩個切向座標）表示，網格對齊只在求解器中處理。
所有物件建立後皆不可變更，可在多個執行緒間共用。
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from blowup_lab.core.errors import DomainError, ValidationError
from blowup_lab.enums.geometry_kind import Anchor, BoundaryPart, DomainKind, ProfileKind

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class BoxFace:
    """長方體（長方形）的一個邊界面

    Attributes:
        normal_axis (int): 法向量所在的座標軸
        upper (bool): True 表示位於該軸的上端（座標 = 邊長），False 表示位於 0
        tangent_axes (Tuple[int, ...]): 面上的切向座標軸，依序對應弧長座標 s 與 r
    """

    normal_axis: int
    upper: bool
    tangent_axes: Tuple[int, ...]


_BOX2D_FACES = (
    BoxFace(1, False, (0,)),
    BoxFace(0, True, (1,)),
    BoxFace(1, True, (0,)),
    BoxFace(0, False, (1,)),
)

_BOX3D_FACES = (
    BoxFace(2, False, (0, 1)),
    BoxFace(2, True, (0, 1)),
    BoxFace(1, False, (0, 2)),
    BoxFace(1, True, (0, 2)),
    BoxFace(0, False, (1, 2)),
    BoxFace(0, True, (1, 2)),
)


@dataclass(frozen=True)
class Domain:
    """計算區域

    Attributes:
        kind (DomainKind): 區域種類
        lengths (Tuple[float, ...]): 各軸邊長；圓盤為 (1.0,)（半徑）
    """

    kind: DomainKind
    lengths: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        lengths = tuple(float(v) for v in self.lengths)

        if self.kind is DomainKind.DISK2D:
            if lengths not in ((), (1.0,)):
                raise DomainError(f"圓盤半徑固定為 1，收到 {lengths}")
            lengths = (1.0,)
        else:
            expected = 2 if self.kind is DomainKind.BOX2D else 3
            if len(lengths) != expected:
                raise DomainError(f"{self.kind.value} 需要 {expected} 個邊長，收到 {len(lengths)} 個")

        if any(not math.isfinite(v) or v <= 0 for v in lengths):
            raise DomainError(f"邊長必須為正的有限值：{lengths}")

        object.__setattr__(self, "lengths", lengths)

    @classmethod
    def box2d(cls, a: float = 1.0, b: float = 1.0) -> "Domain":
        return cls(DomainKind.BOX2D, (a, b))

    @classmethod
    def box3d(cls, a: float = 1.0, b: float = 1.0, c: float = 1.0) -> "Domain":
        return cls(DomainKind.BOX3D, (a, b, c))

    @classmethod
    def disk2d(cls) -> "Domain":
        return cls(DomainKind.DISK2D)

    @property
    def n(self) -> int:
        """空間維度"""
        return 3 if self.kind is DomainKind.BOX3D else 2

    @property
    def is_box(self) -> bool:
        return self.kind is not DomainKind.DISK2D

    @property
    def volume(self) -> float:
        if self.kind is DomainKind.DISK2D:
            return math.pi
        return math.prod(self.lengths)

    @property
    def boundary_measure(self) -> float:
        """邊界長度（2D）或表面積（3D）"""
        if self.kind is DomainKind.DISK2D:
            return 2.0 * math.pi
        if self.kind is DomainKind.BOX2D:
            a, b = self.lengths
            return 2.0 * (a + b)
        a, b, c = self.lengths
        return 2.0 * (a * b + b * c + c * a)

    @property
    def edge_count(self) -> int:
        return {DomainKind.BOX2D: 4, DomainKind.BOX3D: 6, DomainKind.DISK2D: 1}[self.kind]

    def face(self, edge_id: int) -> BoxFace:
        """取得長方體（長方形）的邊界面資訊"""
        if not self.is_box:
            raise DomainError("圓盤沒有長方體邊界面")
        self._check_edge(edge_id)
        faces = _BOX2D_FACES if self.kind is DomainKind.BOX2D else _BOX3D_FACES
        return faces[edge_id]

    def edge_extent(self, edge_id: int) -> Tuple[float, ...]:
        """邊（面）上每個切向座標的範圍長度"""
        self._check_edge(edge_id)
        if self.kind is DomainKind.DISK2D:
            return (2.0 * math.pi,)
        return tuple(self.lengths[axis] for axis in self.face(edge_id).tangent_axes)

    def edge_measure(self, edge_id: int) -> float:
        return math.prod(self.edge_extent(edge_id))

    def boundary_point(self, edge_id: int, s: float, r: Optional[float] = None) -> np.ndarray:
        """由邊上的座標 (s[, r]) 計算空間中的點"""
        if self.kind is DomainKind.DISK2D:
            return np.array([math.cos(s), math.sin(s)])

        face = self.face(edge_id)
        point = np.zeros(self.n)
        point[face.normal_axis] = self.lengths[face.normal_axis] if face.upper else 0.0
        coords = (s,) if r is None else (s, r)
        if len(coords) != len(face.tangent_axes):
            raise DomainError(f"邊 {edge_id} 需要 {len(face.tangent_axes)} 個切向座標")
        for axis, value in zip(face.tangent_axes, coords):
            point[axis] = value
        return point

    def outward_normal(self, edge_id: int, s: float = 0.0) -> np.ndarray:
        if self.kind is DomainKind.DISK2D:
            return np.array([math.cos(s), math.sin(s)])

        face = self.face(edge_id)
        normal = np.zeros(self.n)
        normal[face.normal_axis] = 1.0 if face.upper else -1.0
        return normal

    def contains(self, points: np.ndarray, tol: float = 1e-12) -> np.ndarray:
        """判斷點是否位於閉區域內"""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.kind is DomainKind.DISK2D:
            return np.einsum("ij,ij->i", pts, pts) <= (1.0 + tol) ** 2
        upper = np.asarray(self.lengths)
        return np.all((pts >= -tol) & (pts <= upper + tol), axis=1)

    def _check_edge(self, edge_id: int) -> None:
        if not 0 <= edge_id < self.edge_count:
            raise DomainError(f"{self.kind.value} 沒有編號 {edge_id} 的邊")


@dataclass(frozen=True)
class BoundaryArc:
    """邊界上的一段弧（2D）或一塊長方形區塊（3D）

    Attributes:
        edge_id (int): 所在的邊（面）編號
        start (float): 弧長座標起點
        end (float): 弧長座標終點
        cross_start (Optional[float]): 3D 區塊第二個切向座標的起點
        cross_end (Optional[float]): 3D 區塊第二個切向座標的終點
    """

    edge_id: int
    start: float
    end: float
    cross_start: Optional[float] = None
    cross_end: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.start < self.end:
            raise DomainError(f"弧的起點必須小於終點：[{self.start}, {self.end}]")
        if self.start < 0:
            raise DomainError(f"弧的起點不可為負：{self.start}")
        if (self.cross_start is None) != (self.cross_end is None):
            raise DomainError("3D 區塊必須同時指定 cross_start 與 cross_end")
        if self.cross_start is not None and not 0 <= self.cross_start < self.cross_end:  # type: ignore[operator]
            raise DomainError(f"區塊的第二座標範圍不合法：[{self.cross_start}, {self.cross_end}]")

    @property
    def is_patch(self) -> bool:
        return self.cross_start is not None

    @property
    def length(self) -> float:
        return self.end - self.start

    @property
    def width(self) -> float:
        if self.cross_start is None or self.cross_end is None:
            return 1.0
        return self.cross_end - self.cross_start

    @property
    def measure(self) -> float:
        """弧長（2D）或面積（3D）"""
        return self.length * self.width

    @property
    def bounds(self) -> Tuple[Tuple[float, float], ...]:
        """每個切向座標的 (起點, 終點)"""
        if self.cross_start is None or self.cross_end is None:
            return ((self.start, self.end),)
        return ((self.start, self.end), (self.cross_start, self.cross_end))

    def contains(self, other: "BoundaryArc") -> bool:
        """判斷 other 是否包含於此弧內"""
        if other.edge_id != self.edge_id or other.is_patch != self.is_patch:
            return False
        return all(lo <= o_lo and o_hi <= hi for (lo, hi), (o_lo, o_hi) in zip(self.bounds, other.bounds))

    def validate_on(self, domain: Domain) -> None:
        """確認弧落在區域的指定邊上"""
        extent = domain.edge_extent(self.edge_id)
        if len(extent) != len(self.bounds):
            raise DomainError(f"邊 {self.edge_id} 需要 {len(extent)} 個切向座標範圍")
        for (lo, hi), length in zip(self.bounds, extent):
            if lo < 0 or hi > length * (1.0 + 1e-14):
                raise DomainError(f"弧 [{lo}, {hi}] 超出邊 {self.edge_id} 的範圍 [0, {length}]")


@dataclass(frozen=True)
class DecayProfile:
    """輻射邊界面積的相對衰減 f(t)，滿足 f(0)=1、非遞增且恆正

    Attributes:
        kind (ProfileKind): 衰減型式
        C (Optional[float]): polynomial 的速率常數
        beta (Optional[float]): polynomial 的指數
        rate (Optional[float]): exponential / cap 的速率
        samples (Tuple[Tuple[float, float], ...]): table 的 (t, f) 取樣點
    """

    kind: ProfileKind = ProfileKind.CONSTANT
    C: Optional[float] = None
    beta: Optional[float] = None
    rate: Optional[float] = None
    samples: Tuple[Tuple[float, float], ...] = ()

    def __post_init__(self) -> None:
        if self.kind is ProfileKind.POLYNOMIAL:
            if self.C is None or self.beta is None or not (self.C > 0 and self.beta > 0):
                raise ValidationError(f"polynomial profile 需要 C > 0 與 β > 0，收到 C={self.C}, β={self.beta}")
        elif self.kind in (ProfileKind.EXPONENTIAL, ProfileKind.CAP):
            if self.rate is None or not self.rate > 0:
                raise ValidationError(f"{self.kind.value} profile 需要 rate > 0，收到 {self.rate}")
        elif self.kind is ProfileKind.TABLE:
            samples = tuple((float(t), float(f)) for t, f in self.samples)
            object.__setattr__(self, "samples", samples)
            self._validate_table(samples)

    @staticmethod
    def _validate_table(samples: Tuple[Tuple[float, float], ...]) -> None:
        if len(samples) < 2:
            raise ValidationError("table profile 至少需要兩個取樣點")
        times = np.array([t for t, _ in samples])
        values = np.array([f for _, f in samples])
        if times[0] != 0.0 or values[0] != 1.0:
            raise ValidationError("table profile 必須從 (0, 1) 開始")
        if np.any(np.diff(times) <= 0):
            raise ValidationError("table profile 的時間必須嚴格遞增")
        if np.any(np.diff(values) > 0):
            raise ValidationError("table profile 必須非遞增")
        if np.any(values <= 0):
            raise ValidationError("table profile 的值必須恆正")

    @classmethod
    def constant(cls) -> "DecayProfile":
        return cls(ProfileKind.CONSTANT)

    @classmethod
    def polynomial(cls, C: float, beta: float) -> "DecayProfile":  # noqa: N803
        return cls(ProfileKind.POLYNOMIAL, C=float(C), beta=float(beta))

    @classmethod
    def exponential(cls, rate: float) -> "DecayProfile":
        return cls(ProfileKind.EXPONENTIAL, rate=float(rate))

    @classmethod
    def cap(cls, rate: float = 1.0) -> "DecayProfile":
        """單位圓上的球冠 {|x̃| < e^{−rate·t}}，相對弧長為 arcsin(e^{−rate·t}) / (π/2)"""
        return cls(ProfileKind.CAP, rate=float(rate))

    @classmethod
    def table(cls, samples: Any) -> "DecayProfile":
        return cls(ProfileKind.TABLE, samples=tuple(tuple(pair) for pair in samples))

    def __call__(self, t: ArrayLike) -> ArrayLike:
        times = np.asarray(t, dtype=float)
        if np.any(times < 0):
            raise DomainError("f(t) 只定義在 t ≥ 0")

        if self.kind is ProfileKind.CONSTANT:
            values = np.ones_like(times)
        elif self.kind is ProfileKind.POLYNOMIAL:
            values = (1.0 + self.C * times) ** (-self.beta)  # type: ignore[operator]
        elif self.kind is ProfileKind.EXPONENTIAL:
            values = np.exp(-self.rate * times)  # type: ignore[operator]
        elif self.kind is ProfileKind.CAP:
            values = np.arcsin(np.exp(-self.rate * times)) / (0.5 * math.pi)  # type: ignore[operator]
        else:
            grid = np.array([s[0] for s in self.samples])
            table = np.array([s[1] for s in self.samples])
            values = np.interp(times, grid, table)

        if np.ndim(t) == 0:
            return float(values)
        return values

    def as_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind.value}
        for key in ("C", "beta", "rate"):
            value = getattr(self, key)
            if value is not None:
                data[key] = value
        if self.samples:
            data["samples"] = [list(pair) for pair in self.samples]
        return data


@dataclass(frozen=True)
class BoundarySchedule:
    """隨時間縮小的輻射邊界 Γ₁,ₜ

    Γ₁,ₜ 永遠是單一連通的弧（2D）或單一長方形區塊（3D），
    其面積為 |Γ₁|·f(t)，且 t₁ ≥ t₂ 時 Γ₁,ₜ₁ ⊆ Γ₁,ₜ₂。
    gamma1_initial 為 None 表示整個邊界絕熱。
    """

    domain: Domain
    gamma1_initial: Optional[BoundaryArc]
    profile: DecayProfile = DecayProfile()
    anchor: Anchor = Anchor.CENTER

    def __post_init__(self) -> None:
        if self.gamma1_initial is not None:
            self.gamma1_initial.validate_on(self.domain)

    @classmethod
    def insulated(cls, domain: Domain) -> "BoundarySchedule":
        return cls(domain, None)

    @property
    def gamma1_area(self) -> float:
        return 0.0 if self.gamma1_initial is None else self.gamma1_initial.measure

    def area(self, t: ArrayLike) -> ArrayLike:
        """A(t) = |Γ₁|·f(t)"""
        if self.gamma1_initial is None:
            return 0.0 if np.ndim(t) == 0 else np.zeros_like(np.asarray(t, dtype=float))
        return self.gamma1_area * self.profile(t)  # type: ignore[operator]

    def arc_at(self, t: float) -> Optional[BoundaryArc]:
        """取得時刻 t 的輻射弧 Γ₁,ₜ"""
        if t < 0:
            raise DomainError(f"時間不可為負：t={t}")
        arc = self.gamma1_initial
        if arc is None:
            return None

        fraction = float(self.profile(t))
        if fraction == 1.0:
            return arc

        # 3D 區塊兩個方向各縮小 √f，面積恰為 |Γ₁|·f
        scale = math.sqrt(fraction) if arc.is_patch else fraction
        bounds = [self._shrink(lo, hi, scale) for lo, hi in arc.bounds]
        if arc.is_patch:
            return BoundaryArc(arc.edge_id, bounds[0][0], bounds[0][1], bounds[1][0], bounds[1][1])
        return BoundaryArc(arc.edge_id, bounds[0][0], bounds[0][1])

    def _shrink(self, lo: float, hi: float, scale: float) -> Tuple[float, float]:
        if self.anchor is Anchor.LEFT_END:
            return lo, lo + (hi - lo) * scale
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo) * scale
        return mid - half, mid + half

    def classify(self, edge_id: int, s: float, t: float, r: Optional[float] = None) -> BoundaryPart:
        """判斷時刻 t 邊上的點屬於 Γ₁,ₜ、Γ₂,ₜ 或兩者的交界"""
        arc = self.arc_at(t)
        if arc is None or arc.edge_id != edge_id:
            return BoundaryPart.INSULATED

        coords = (s,) if r is None else (s, r)
        inside = True
        on_edge = False
        for value, (lo, hi) in zip(coords, arc.bounds):
            if value < lo or value > hi:
                inside = False
            elif value == lo or value == hi:
                on_edge = True

        if not inside:
            return BoundaryPart.INSULATED
        return BoundaryPart.INTERFACE if on_edge else BoundaryPart.RADIATING

    def summary(self) -> Dict[str, Any]:
        """排程的結構化摘要，寫入 RunReport"""
        arc = self.gamma1_initial
        return {
            "domain": {"kind": self.domain.kind.value, "lengths": list(self.domain.lengths)},
            "gamma1_area": self.gamma1_area,
            "edge_id": None if arc is None else arc.edge_id,
            "bounds": None if arc is None else [list(b) for b in arc.bounds],
            "anchor": self.anchor.value,
            "profile": self.profile.as_dict(),
        }


def make_schedule(
    domain: Domain,
    gamma1_area: float,
    profile: Optional[DecayProfile] = None,
    anchor: Anchor = Anchor.CENTER,
    edge_id: int = 0,
    center: Optional[Tuple[float, ...]] = None,
) -> BoundarySchedule:
    """建立初始面積為 gamma1_area 的輻射邊界排程

    2D 的弧以 center（預設為邊的中點，圓盤為 θ = π/2）為中心；
    3D 的區塊與所在面等比例，以面的中心為中心。

    Args:
        domain (Domain): 計算區域
        gamma1_area (float): |Γ₁|
        profile (Optional[DecayProfile]): 衰減型式，預設為常數
        anchor (Anchor): 縮小方式
        edge_id (int): 所在的邊（面）
        center (Optional[Tuple[float, ...]]): 弧（區塊）中心的切向座標

    Raises:
        DomainError: 面積超出範圍或弧超出所在的邊

    Returns:
        BoundarySchedule: 輻射邊界排程
    """
    if not 0 < gamma1_area < domain.boundary_measure:
        raise DomainError(f"|Γ₁| 必須介於 0 與邊界總量 {domain.boundary_measure} 之間，收到 {gamma1_area}")

    extent = domain.edge_extent(edge_id)
    if center is None:
        center = (0.5 * math.pi,) if domain.kind is DomainKind.DISK2D else tuple(0.5 * e for e in extent)

    if len(extent) == 1:
        sides: Tuple[float, ...] = (gamma1_area,)
    else:
        ratio = math.sqrt(gamma1_area / math.prod(extent))
        sides = tuple(e * ratio for e in extent)

    bounds = [(c - 0.5 * side, c + 0.5 * side) for c, side in zip(center, sides)]
    for (lo, hi), length in zip(bounds, extent):
        if lo < 0 or hi > length:
            raise DomainError(f"|Γ₁|={gamma1_area} 的弧無法放在邊 {edge_id} 上（範圍 [0, {length}]）")

    if len(bounds) == 1:
        arc = BoundaryArc(edge_id, bounds[0][0], bounds[0][1])
    else:
        arc = BoundaryArc(edge_id, bounds[0][0], bounds[0][1], bounds[1][0], bounds[1][1])

    return BoundarySchedule(domain, arc, profile or DecayProfile.constant(), anchor)
