"""以取樣估計熱核估計式中只知存在、不知數值的常數

- calibrate_bti_constant：邊界-時間積分 ≤ C|Γ|^α t^{(1−(n−1)α)/2} 中的 C
- calibrate_gaussian_constant：N(x,y,t) ≤ C Φ(x−y, 2t) 中的 C

估計值為取樣集合上比值的最大值，因此取樣集合變大時估計值不會變小。
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Tuple

import numpy as np

from blowup_lab.core.errors import DomainError, ValidationError
from blowup_lab.core.geometry import BoundaryArc, Domain, make_schedule
from blowup_lab.core.kernel import KernelEvaluator, boundary_time_integral, log_phi
from blowup_lab.enums.default_value import DefaultValue
from blowup_lab.enums.numerics import BoundaryQuadrature


@dataclass(frozen=True)
class SamplingPlan:
    """邊界-時間積分的取樣計畫

    Attributes:
        arc_fractions (Tuple[float, ...]): 弧面積佔所在邊（面）的比例
        times (Tuple[float, ...]): 取樣時間，皆在 (0, 1]
        random_count (int): 每個弧額外取的隨機內部點數
        seed (int): 隨機點的亂數種子
        edge_id (int): 弧所在的邊
        offsets (Tuple[float, ...]): 由弧中心往內偏移的距離（相對於法向邊長）
    """

    arc_fractions: Tuple[float, ...]
    times: Tuple[float, ...]
    random_count: int = 8
    seed: int = DefaultValue.SEED.value
    edge_id: int = 0
    offsets: Tuple[float, ...] = (0.02, 0.1)

    def __post_init__(self) -> None:
        if not self.arc_fractions or not self.times:
            raise ValidationError("取樣計畫至少需要一個弧與一個時間")
        if any(not 0 < f < 1 for f in self.arc_fractions):
            raise ValidationError(f"弧面積比例必須介於 0 與 1：{self.arc_fractions}")
        if any(not 0 < t <= 1 for t in self.times):
            raise ValidationError(f"取樣時間必須在 (0, 1]：{self.times}")

    @classmethod
    def default(cls, seed: int = DefaultValue.SEED.value) -> "SamplingPlan":
        return cls(
            arc_fractions=(0.05, 0.1, 0.2, 0.4, 0.8),
            times=(0.01, 0.03, 0.1, 0.3, 1.0),
            seed=seed,
        )

    @classmethod
    def held_out(cls, seed: int = DefaultValue.SEED.value + 1) -> "SamplingPlan":
        """與 default() 不相交的驗證集合"""
        return cls(
            arc_fractions=(0.07, 0.15, 0.3, 0.6),
            times=(0.02, 0.05, 0.2, 0.5, 0.8),
            random_count=6,
            seed=seed,
            offsets=(0.05,),
        )

    def refined(self) -> "SamplingPlan":
        """原計畫的超集合：弧與時間加入幾何中點，隨機點數加倍"""
        return SamplingPlan(
            arc_fractions=_with_midpoints(self.arc_fractions),
            times=_with_midpoints(self.times),
            random_count=2 * self.random_count,
            seed=self.seed,
            edge_id=self.edge_id,
            offsets=self.offsets,
        )

    def samples(self, domain: Domain) -> Iterator[Tuple[BoundaryArc, np.ndarray, float]]:
        """逐一產生 (弧, 觀測點, 時間)"""
        rng = np.random.default_rng(self.seed)
        random_points = rng.uniform(size=(self.random_count, domain.n)) * np.asarray(domain.lengths)
        corners = np.array(np.meshgrid(*[(0.0, L) for L in domain.lengths], indexing="ij")).reshape(
            domain.n, -1
        ).T

        for fraction in self.arc_fractions:
            schedule = make_schedule(domain, fraction * domain.edge_measure(self.edge_id), edge_id=self.edge_id)
            arc = schedule.gamma1_initial
            assert arc is not None
            points = np.vstack([self._arc_points(domain, arc), corners, random_points])
            for t in self.times:
                yield arc, points, t

    def _arc_points(self, domain: Domain, arc: BoundaryArc) -> np.ndarray:
        face = domain.face(arc.edge_id)
        mids = [0.5 * (lo + hi) for lo, hi in arc.bounds]
        cross = None if len(mids) == 1 else mids[1]
        points = [
            domain.boundary_point(arc.edge_id, mids[0], cross),
            domain.boundary_point(arc.edge_id, arc.start, cross),
            domain.boundary_point(arc.edge_id, arc.end, cross),
            domain.boundary_point(arc.edge_id, 0.75 * arc.start + 0.25 * arc.end, cross),
        ]
        inward = -domain.outward_normal(arc.edge_id)
        depth = domain.lengths[face.normal_axis]
        for offset in self.offsets:
            points.append(points[0] + offset * depth * inward)
        return np.array(points)

    @property
    def size_hint(self) -> int:
        return len(self.arc_fractions) * len(self.times)


def _with_midpoints(values: Tuple[float, ...]) -> Tuple[float, ...]:
    ordered = sorted(values)
    mids = [math.sqrt(a * b) for a, b in zip(ordered[:-1], ordered[1:])]
    return tuple(sorted(set(ordered) | set(mids)))


@dataclass
class CalibrationResult:
    """邊界-時間積分常數的估計結果

    Attributes:
        alpha (float): 使用的指數 α
        C_hat (float): 取樣集合上比值的最大值
        sample_count (int): 比值的取樣數
        argmax (Dict[str, Any]): 最大值發生的位置（弧面積、觀測點、時間）
    """

    alpha: float
    C_hat: float  # noqa: N815
    sample_count: int
    argmax: Dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "alpha": self.alpha,
            "C_hat": self.C_hat,
            "samples": self.sample_count,
            "argmax": self.argmax,
        }


def _check_alpha(alpha: float, n: int) -> None:
    limit = 1.0 / (n - 1)
    if not 0 <= alpha < limit:
        raise DomainError(f"α 必須滿足 0 ≤ α < 1/(n−1) = {limit}，收到 α={alpha}")


def bti_bound(alpha: float, n: int, measure: float, t: float) -> float:
    """|Γ|^α t^{(1−(n−1)α)/2}"""
    return measure**alpha * t ** (0.5 * (1.0 - (n - 1) * alpha))


def calibrate_bti_constant(
    evaluator: KernelEvaluator,
    alpha: float,
    plan: SamplingPlan = SamplingPlan.default(),
    quadrature: BoundaryQuadrature = BoundaryQuadrature.EXACT,
) -> CalibrationResult:
    """估計邊界-時間積分估計式中的常數

    Args:
        evaluator (KernelEvaluator): 熱核
        alpha (float): 指數 α，需滿足 0 ≤ α < 1/(n−1)
        plan (SamplingPlan): 取樣計畫
        quadrature (BoundaryQuadrature): 切向積分方式

    Raises:
        DomainError: α 超出範圍

    Returns:
        CalibrationResult: 估計結果
    """
    n = evaluator.domain.n
    _check_alpha(alpha, n)

    best = -math.inf
    argmax: Dict[str, Any] = {}
    count = 0
    for arc, points, t in plan.samples(evaluator.domain):
        values = np.asarray(boundary_time_integral(evaluator, arc, points, t, quadrature))
        ratios = values / bti_bound(alpha, n, arc.measure, t)
        count += ratios.size
        index = int(np.argmax(ratios))
        if ratios[index] > best:
            best = float(ratios[index])
            argmax = {"measure": arc.measure, "x": points[index].tolist(), "t": t}

    return CalibrationResult(alpha=alpha, C_hat=best, sample_count=count, argmax=argmax)


def bti_bound_violations(
    evaluator: KernelEvaluator,
    alpha: float,
    C_hat: float,  # noqa: N803
    plan: SamplingPlan,
    quadrature: BoundaryQuadrature = BoundaryQuadrature.EXACT,
) -> List[Dict[str, Any]]:
    """在 plan 的取樣上檢查 bti ≤ C_hat·|Γ|^α t^{(1−(n−1)α)/2}，回傳所有違反的取樣"""
    n = evaluator.domain.n
    _check_alpha(alpha, n)

    violations: List[Dict[str, Any]] = []
    for arc, points, t in plan.samples(evaluator.domain):
        values = np.asarray(boundary_time_integral(evaluator, arc, points, t, quadrature))
        bound = C_hat * bti_bound(alpha, n, arc.measure, t)
        for point, value in zip(points, values):
            if value > bound:
                violations.append({"measure": arc.measure, "x": point.tolist(), "t": t, "bti": float(value)})
    return violations


@dataclass
class GaussianCalibration:
    """N(x,y,t) ≤ C Φ(x−y, 2t) 的常數估計

    Attributes:
        C_hat (float): max N / Φ(x−y, 2t)，超出浮點數範圍時為 inf
        sample_count (int): 取樣數
        log_C_hat (float): ln C_hat
        kernel_underflow (int): N 下溢為 0 的取樣數（比值為 0，不影響最大值）
        argmax (Dict[str, Any]): 最大值所在的 (x, y, t)
    """

    C_hat: float  # noqa: N815
    sample_count: int
    log_C_hat: float = -math.inf  # noqa: N815
    kernel_underflow: int = 0
    argmax: Dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "C_hat": self.C_hat,
            "log_C_hat": self.log_C_hat,
            "samples": self.sample_count,
            "kernel_underflow": self.kernel_underflow,
            "argmax": self.argmax,
        }


def gaussian_sample_points(domain: Domain, count: int, seed: int) -> np.ndarray:
    """區域的所有角點加上隨機點，共 count 個；count 加倍時前段的點不變"""
    corners = np.array(np.meshgrid(*[(0.0, L) for L in domain.lengths], indexing="ij")).reshape(domain.n, -1).T
    rng = np.random.default_rng(seed)
    extra = max(0, count - corners.shape[0])
    return np.vstack([corners, rng.uniform(size=(extra, domain.n)) * np.asarray(domain.lengths)])


def calibrate_gaussian_constant(
    evaluator: KernelEvaluator,
    n_points: int = 50,
    n_times: int = 8,
    seed: int = DefaultValue.SEED.value,
    t_min: float = 1e-3,
) -> GaussianCalibration:
    """在 n_points × n_points × n_times 的 (x, y, t ≤ 1) 取樣上估計 max N / Φ(x−y, 2t)"""
    domain = evaluator.domain
    points = gaussian_sample_points(domain, n_points, seed)
    times = np.geomspace(t_min, 1.0, n_times)

    x = points[:, None, :]
    y = points[None, :, :]
    best = -math.inf
    underflow = 0
    argmax: Dict[str, Any] = {}
    for t in times:
        kernel = np.asarray(evaluator(x, y, float(t)))
        underflow += int(np.count_nonzero(kernel <= 0))
        # 比值在對數尺度上計算，Φ 下溢的取樣也會被比較
        with np.errstate(divide="ignore"):
            log_ratios = np.log(np.clip(kernel, 0.0, None)) - np.asarray(log_phi(x - y, 2.0 * float(t), domain.n))
        i, j = np.unravel_index(int(np.argmax(log_ratios)), log_ratios.shape)
        if log_ratios[i, j] > best:
            best = float(log_ratios[i, j])
            argmax = {"x": points[i].tolist(), "y": points[j].tolist(), "t": float(t)}

    c_hat = math.exp(best) if best < 709.0 else math.inf
    return GaussianCalibration(
        C_hat=c_hat,
        sample_count=points.shape[0] ** 2 * times.size,
        log_C_hat=best,
        kernel_underflow=underflow,
        argmax=argmax,
    )
