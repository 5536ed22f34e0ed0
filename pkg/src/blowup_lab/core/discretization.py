"""空間離散化：以節點為中心的有限體積法

長方體每軸切成 N 格、共 N+1 個節點，邊界節點的對偶格為半格，
等價於以 ghost node 封閉 Neumann 邊界條件。半離散系統為

    D du/dt = −K u + E ⊙ u^q

D 為對偶格體積（集中質量），K 為對稱且列和為 0 的剛度矩陣，
E 為每個邊界節點的輻射邊界量（對偶邊長乘上輻射權重）。
因此 d/dt Σ D u = Σ E u^q 在離散層級精確成立。

圓盤使用極座標網格：中心節點、N_r 圈半徑 r_i = i/N_r 的節點，每圈 N_θ = 4N_r 個角度。
"""

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.interpolate import RegularGridInterpolator, griddata

from blowup_lab.core.errors import DomainError, UnderResolvedArcWarning, UnsupportedDomainError, ValidationError
from blowup_lab.core.geometry import BoundaryArc, Domain
from blowup_lab.enums.geometry_kind import DomainKind
from blowup_lab.enums.numerics import InterfaceRule


@dataclass(frozen=True)
class EdgeNodes:
    """位於某一條邊（面）上的節點

    Attributes:
        edge_id (int): 邊編號
        indices (np.ndarray): 節點在全域向量中的索引 (m,)
        coords (np.ndarray): 節點的切向座標 (m, k)
        lower (np.ndarray): 對偶格在各切向座標往下的半寬 (m, k)
        upper (np.ndarray): 對偶格在各切向座標往上的半寬 (m, k)
        spacing (Tuple[float, ...]): 各切向座標的網格間距
        period (Optional[float]): 週期座標的週期（圓盤為 2π）
    """

    edge_id: int
    indices: np.ndarray
    coords: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    spacing: Tuple[float, ...]
    period: Optional[float] = None

    @property
    def dual_measure(self) -> np.ndarray:
        return np.prod(self.lower + self.upper, axis=1)


@dataclass(frozen=True)
class Discretization:
    """網格、集中質量、剛度矩陣與邊界節點

    Attributes:
        domain (Domain): 計算區域
        resolution (int): 長方體每軸格數；圓盤的徑向格數
        nodes (np.ndarray): 節點座標 (N, n)
        mass (np.ndarray): 對偶格體積 (N,)
        stiffness (sp.csr_matrix): 剛度矩陣 K
        edges (Tuple[EdgeNodes, ...]): 每條邊（面）上的節點
        shape (Tuple[int, ...]): 長方體的節點陣列形狀；圓盤為 (N_r, N_θ)
    """

    domain: Domain
    resolution: int
    nodes: np.ndarray
    mass: np.ndarray
    stiffness: sp.csr_matrix
    edges: Tuple[EdgeNodes, ...]
    shape: Tuple[int, ...]

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    @property
    def h(self) -> float:
        """最大網格間距"""
        if self.domain.is_box:
            return max(length / self.resolution for length in self.domain.lengths)
        return 1.0 / self.resolution

    def edge(self, edge_id: int) -> EdgeNodes:
        return self.edges[edge_id]

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.mass, values))

    def flux_measure(self, arc: Optional[BoundaryArc], rule: InterfaceRule = InterfaceRule.SNAPPED) -> np.ndarray:
        """每個節點的輻射邊界量 E，arc 為 None 時全為 0"""
        measure = np.zeros(self.size)
        if arc is None:
            return measure
        edge = self.edge(arc.edge_id)
        weights = np.ones(edge.indices.size)
        for axis, (lo, hi) in enumerate(arc.bounds):
            if rule is InterfaceRule.FRACTIONAL:
                weights *= _overlap_weights(edge, axis, lo, hi)
            elif round(lo / edge.spacing[axis]) == round(hi / edge.spacing[axis]):
                warnings.warn(
                    f"輻射弧窄於網格間距 {edge.spacing[axis]:.3g}，兩端點落在同一節點，改用重疊比例權重",
                    UnderResolvedArcWarning,
                    stacklevel=2,
                )
                weights *= _overlap_weights(edge, axis, lo, hi)
            else:
                weights *= _snapped_weights(edge, axis, lo, hi)
        measure[edge.indices] = weights * edge.dual_measure
        return measure

    def boundary_candidates(self, edge_id: int) -> np.ndarray:
        return self.edge(edge_id).indices

    def interpolator(self, values: np.ndarray) -> RegularGridInterpolator:
        """長方體上網格函數的多線性內插"""
        if not self.domain.is_box:
            raise UnsupportedDomainError("圓盤網格不提供內插")
        axes = [np.linspace(0.0, length, self.resolution + 1) for length in self.domain.lengths]
        return RegularGridInterpolator(axes, values.reshape(self.shape))

    def restrict(self, values: np.ndarray, target: "Discretization") -> np.ndarray:
        """把網格函數搬到同一區域的另一個網格上

        長方體用多線性內插；圓盤用三角化線性內插，凸包外的節點取最近節點。

        Raises:
            DomainError: 兩個網格的區域不同
            ValidationError: values 的長度與節點數不符
        """
        if target.domain != self.domain:
            raise DomainError("兩個網格的區域不同")
        values = np.asarray(values, dtype=float)
        if values.shape != (self.size,):
            raise ValidationError(f"網格值的長度 {values.shape} 與節點數 {self.size} 不符")
        if self.domain.is_box:
            return self.interpolator(values)(target.nodes)
        linear = griddata(self.nodes, values, target.nodes, method="linear")
        nearest = griddata(self.nodes, values, target.nodes, method="nearest")
        return np.where(np.isnan(linear), nearest, linear)

    def grid_axes(self) -> List[np.ndarray]:
        return [np.linspace(0.0, length, self.resolution + 1) for length in self.domain.lengths]


def _overlap_weights(edge: EdgeNodes, axis: int, lo: float, hi: float) -> np.ndarray:
    left = edge.coords[:, axis] - edge.lower[:, axis]
    right = edge.coords[:, axis] + edge.upper[:, axis]
    shifts = (0.0,) if edge.period is None else (-edge.period, 0.0, edge.period)
    overlap = np.zeros(edge.indices.size)
    for shift in shifts:
        overlap += np.clip(np.minimum(right, hi + shift) - np.maximum(left, lo + shift), 0.0, None)
    width = right - left
    return np.divide(overlap, width, out=np.zeros_like(overlap), where=width > 0)


def _snapped_weights(edge: EdgeNodes, axis: int, lo: float, hi: float) -> np.ndarray:
    h = edge.spacing[axis]
    k_lo = round(lo / h)
    k_hi = round(hi / h)
    weights = np.zeros(edge.indices.size)
    k = np.rint(edge.coords[:, axis] / h).astype(int)
    candidates = [k] if edge.period is None else [k, k + round(edge.period / h)]
    for kk in candidates:
        inside = np.where((kk > k_lo) & (kk < k_hi), 1.0, 0.0)
        ends = np.where((kk == k_lo) | (kk == k_hi), 0.5, 0.0)
        weights = np.maximum(weights, inside + ends)
    return weights


def _axis_operators(length: float, cells: int) -> Tuple[np.ndarray, sp.csr_matrix]:
    h = length / cells
    dual = np.full(cells + 1, h)
    dual[[0, -1]] = 0.5 * h
    main = np.full(cells + 1, 2.0)
    main[[0, -1]] = 1.0
    off = -np.ones(cells)
    stiffness = sp.diags([off, main, off], [-1, 0, 1], format="csr") / h
    return dual, stiffness


def _box_discretization(domain: Domain, resolution: int) -> Discretization:
    n = domain.n
    duals: List[np.ndarray] = []
    stiff: List[sp.csr_matrix] = []
    for length in domain.lengths:
        dual, k1 = _axis_operators(length, resolution)
        duals.append(dual)
        stiff.append(k1)

    mass = duals[0]
    for dual in duals[1:]:
        mass = np.kron(mass, dual)

    stiffness = sp.csr_matrix((mass.size, mass.size))
    for axis in range(n):
        term: sp.spmatrix = sp.identity(1, format="csr")
        for other in range(n):
            factor = stiff[other] if other == axis else sp.diags(duals[other])
            term = sp.kron(term, factor, format="csr")
        stiffness = stiffness + term

    shape = tuple(resolution + 1 for _ in range(n))
    axes = [np.linspace(0.0, length, resolution + 1) for length in domain.lengths]
    grids = np.meshgrid(*axes, indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=1)

    edges: List[EdgeNodes] = []
    for edge_id in range(domain.edge_count):
        face = domain.face(edge_id)
        index = [slice(None)] * n
        index[face.normal_axis] = resolution if face.upper else 0
        flat = np.arange(mass.size).reshape(shape)[tuple(index)].ravel()
        coords = nodes[flat][:, list(face.tangent_axes)]
        lower = np.empty_like(coords)
        upper = np.empty_like(coords)
        spacing = []
        for j, axis in enumerate(face.tangent_axes):
            h = domain.lengths[axis] / resolution
            spacing.append(h)
            lower[:, j] = np.where(coords[:, j] > 0.5 * h, 0.5 * h, 0.0)
            upper[:, j] = np.where(coords[:, j] < domain.lengths[axis] - 0.5 * h, 0.5 * h, 0.0)
        edges.append(EdgeNodes(edge_id, flat, coords, lower, upper, tuple(spacing)))

    return Discretization(domain, resolution, nodes, mass, stiffness.tocsr(), tuple(edges), shape)


def _disk_discretization(resolution: int) -> Discretization:
    n_r = resolution
    n_theta = 4 * resolution
    h = 1.0 / n_r
    d_theta = 2.0 * math.pi / n_theta
    size = 1 + n_r * n_theta

    def index(i: int, j: int) -> int:
        return 1 + (i - 1) * n_theta + (j % n_theta)

    radii = np.arange(1, n_r + 1) * h
    thetas = np.arange(n_theta) * d_theta
    nodes = np.zeros((size, 2))
    mass = np.zeros(size)
    mass[0] = math.pi * (0.5 * h) ** 2

    conductances: Dict[Tuple[int, int], float] = {}
    for i, r in enumerate(radii, start=1):
        outer = r if i == n_r else r + 0.5 * h
        inner = r - 0.5 * h
        radial_width = outer - inner
        area = 0.5 * (outer**2 - inner**2) * d_theta
        for j, theta in enumerate(thetas):
            p = index(i, j)
            nodes[p] = (r * math.cos(theta), r * math.sin(theta))
            mass[p] = area
            conductances[(p, index(i, j + 1))] = radial_width / (r * d_theta)
            if i == 1:
                conductances[(0, p)] = 0.5 * d_theta
            if i < n_r:
                conductances[(p, index(i + 1, j))] = (r + 0.5 * h) * d_theta / h

    rows: List[int] = []
    cols: List[int] = []
    vals: List[float] = []
    for (a, b), c in conductances.items():
        rows += [a, b, a, b]
        cols += [a, b, b, a]
        vals += [c, c, -c, -c]
    stiffness = sp.coo_matrix((vals, (rows, cols)), shape=(size, size)).tocsr()

    boundary = np.array([index(n_r, j) for j in range(n_theta)])
    half = np.full((n_theta, 1), 0.5 * d_theta)
    edge = EdgeNodes(0, boundary, thetas[:, None], half, half.copy(), (d_theta,), period=2.0 * math.pi)

    return Discretization(Domain.disk2d(), resolution, nodes, mass, stiffness, (edge,), (n_r, n_theta))


@lru_cache(maxsize=16)
def build_discretization(domain: Domain, resolution: int) -> Discretization:
    """建立（並快取）區域的離散化

    Args:
        domain (Domain): 計算區域
        resolution (int): 長方體每軸格數；圓盤的徑向格數

    Raises:
        DomainError: resolution < 2

    Returns:
        Discretization: 離散化結果
    """
    if resolution < 2:
        raise DomainError(f"解析度至少為 2，收到 {resolution}")
    if domain.kind is DomainKind.DISK2D:
        return _disk_discretization(resolution)
    return _box_discretization(domain, resolution)
