"""初始資料 u₀

- constant：u₀ ≡ M₀
- neumann_mode：u₀ = (M₀ − |A|) + A·Π_i cos(m_i π x_i / L_i)，法向導數在邊界上為 0，
  最大值為 M₀，純擴散下有閉式解 (M₀ − |A|) + A·e^{−λt}·Π_i cos(m_i π x_i / L_i)
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, Tuple

import numpy as np

from blowup_lab.core.errors import UnsupportedDomainError, ValidationError
from blowup_lab.core.geometry import Domain
from blowup_lab.enums.run_status import InitialDataKind


@dataclass(frozen=True)
class InitialData:
    """初始資料

    Attributes:
        kind (InitialDataKind): 種類
        M0 (float): 最大值 M₀ = max u₀
        amplitude (float): neumann_mode 的振幅 A
        modes (Tuple[int, ...]): neumann_mode 每軸的模態數 m_i
    """

    kind: InitialDataKind = InitialDataKind.CONSTANT
    M0: float = 1.0  # noqa: N815
    amplitude: float = 0.0
    modes: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not (math.isfinite(self.M0) and self.M0 > 0):
            raise ValidationError(f"M₀ 必須為正，收到 {self.M0}")
        if self.kind is InitialDataKind.NEUMANN_MODE:
            if self.M0 - 2.0 * abs(self.amplitude) < 0:
                raise ValidationError(f"u₀ 會出現負值：M₀={self.M0}, A={self.amplitude}")
            if any(m < 0 for m in self.modes):
                raise ValidationError(f"模態數不可為負：{self.modes}")

    @classmethod
    def constant(cls, M0: float) -> "InitialData":  # noqa: N803
        return cls(InitialDataKind.CONSTANT, float(M0))

    @classmethod
    def neumann_mode(cls, M0: float, amplitude: float, modes: Tuple[int, ...]) -> "InitialData":  # noqa: N803
        return cls(InitialDataKind.NEUMANN_MODE, float(M0), float(amplitude), tuple(int(m) for m in modes))

    def _check_domain(self, domain: Domain) -> None:
        if self.kind is InitialDataKind.NEUMANN_MODE:
            if not domain.is_box:
                raise UnsupportedDomainError("neumann_mode 初始資料只支援長方體")
            if len(self.modes) != domain.n:
                raise ValidationError(f"需要 {domain.n} 個模態數，收到 {self.modes}")

    def _mode_shape(self, domain: Domain, points: np.ndarray) -> np.ndarray:
        shape = np.ones(points.shape[0])
        for axis, (m, length) in enumerate(zip(self.modes, domain.lengths)):
            shape = shape * np.cos(m * math.pi * points[:, axis] / length)
        return shape

    def decay_rate(self, domain: Domain) -> float:
        """模態的特徵值 Σ (m_i π / L_i)²"""
        return sum((m * math.pi / length) ** 2 for m, length in zip(self.modes, domain.lengths))

    def evaluate(self, domain: Domain, points: np.ndarray) -> np.ndarray:
        """在點集 (m, n) 上求 u₀"""
        return self.exact_diffusion(domain, points, 0.0)

    def exact_diffusion(self, domain: Domain, points: np.ndarray, t: float) -> np.ndarray:
        """Γ₁ 為空時的精確解"""
        self._check_domain(domain)
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.kind is InitialDataKind.CONSTANT:
            return np.full(pts.shape[0], self.M0)
        base = self.M0 - abs(self.amplitude)
        decay = math.exp(-self.decay_rate(domain) * t)
        return base + self.amplitude * decay * self._mode_shape(domain, pts)

    def as_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind.value, "M0": self.M0}
        if self.kind is InitialDataKind.NEUMANN_MODE:
            data["amplitude"] = self.amplitude
            data["modes"] = list(self.modes)
        return data
