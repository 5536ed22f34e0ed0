"""情境設定檔（flat key = value，以點號表示層級）的解析、序列化與建構

每個欄位的鍵由 dataclass 的層級自動產生，例如 Scenario.schedule.profile.beta 對應
`schedule.profile.beta`；欄位 metadata 的 "key" 可覆寫完整的鍵名。
浮點數以 repr 寫出，parse(serialize(s)) == s 對所有合法情境成立。
"""

import math
import types
from dataclasses import dataclass, field, fields, is_dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union, get_args, get_origin, get_type_hints

from blowup_lab.core.calibration import calibrate_bti_constant
from blowup_lab.core.errors import DomainError, UnsupportedDomainError, ValidationError
from blowup_lab.core.geometry import BoundarySchedule, DecayProfile, Domain, make_schedule
from blowup_lab.core.initial_data import InitialData
from blowup_lab.core.kernel import KernelEvaluator
from blowup_lab.core.paths import ProjectPaths
from blowup_lab.core.schedule_constants import ScheduleConstants, build_constants, exponents
from blowup_lab.core.solver import SolverConfig
from blowup_lab.enums.default_value import DefaultValue
from blowup_lab.enums.geometry_kind import Anchor, DomainKind, ProfileKind
from blowup_lab.enums.numerics import InterfaceRule, TimeScheme
from blowup_lab.enums.run_status import ConstantsMode, InitialDataKind, ScheduleMode
from blowup_lab.utils.config_utils import get_c_hat

OUTPUT_KINDS = ("report", "trace", "snapshot")


@dataclass(frozen=True)
class DomainSpec:
    kind: DomainKind = DomainKind.BOX2D
    lengths: Tuple[float, ...] = (1.0, 1.0)

    def build(self) -> Domain:
        lengths = () if self.kind is DomainKind.DISK2D else self.lengths
        return Domain(self.kind, lengths)


@dataclass(frozen=True)
class InitialSpec:
    kind: InitialDataKind = InitialDataKind.CONSTANT
    M0: float = 1.0  # noqa: N815
    amplitude: float = 0.0
    modes: Tuple[int, ...] = ()

    def build(self) -> InitialData:
        if self.kind is InitialDataKind.CONSTANT:
            return InitialData.constant(self.M0)
        return InitialData.neumann_mode(self.M0, self.amplitude, self.modes)


@dataclass(frozen=True)
class ProfileSpec:
    kind: ProfileKind = ProfileKind.CONSTANT
    C: Optional[float] = None
    beta: Optional[float] = None
    rate: Optional[float] = None
    samples: Tuple[Tuple[float, float], ...] = ()

    def build(self) -> DecayProfile:
        return DecayProfile(self.kind, self.C, self.beta, self.rate, self.samples)


@dataclass(frozen=True)
class ScheduleSpec:
    """排程設定；mode 為 global / capped 時由常數管線產生 polynomial(C*, β)

    C_hat 為 None 表示 auto（環境變數或即時校準）。
    """

    mode: ScheduleMode = ScheduleMode.FIXED
    gamma1: float = 0.1
    edge: int = 0
    anchor: Anchor = Anchor.CENTER
    profile: ProfileSpec = field(default_factory=ProfileSpec)
    beta: Optional[float] = None
    B: Optional[float] = None  # noqa: N815
    C_hat: Optional[float] = None  # noqa: N815
    alpha: Optional[float] = None

    @property
    def constants_mode(self) -> Optional[ConstantsMode]:
        if self.mode is ScheduleMode.GLOBAL:
            return ConstantsMode.GLOBAL
        if self.mode is ScheduleMode.CAPPED:
            return ConstantsMode.CAPPED
        return None


@dataclass(frozen=True)
class SolverSpec:
    q: float = 2.0
    scheme: TimeScheme = TimeScheme.IMPLICIT_EULER
    resolution: int = 32
    dt_init: float = 1e-3
    dt_min: float = DefaultValue.DT_MIN.value
    U_max_factor: float = DefaultValue.U_MAX_FACTOR.value  # noqa: N815
    blowup_threshold: Optional[float] = None
    newton_tol: float = 1e-10
    newton_max_iter: int = 30
    interface_rule: InterfaceRule = InterfaceRule.SNAPPED
    refine_levels: int = 2

    def build(self) -> SolverConfig:
        return SolverConfig(
            q=self.q,
            scheme=self.scheme,
            dt_init=self.dt_init,
            dt_min=self.dt_min,
            U_max_factor=self.U_max_factor,
            blowup_threshold=self.blowup_threshold,
            newton_tol=self.newton_tol,
            newton_max_iter=self.newton_max_iter,
            resolution=self.resolution,
            interface_rule=self.interface_rule,
            refine_levels=self.refine_levels,
        )


@dataclass(frozen=True)
class Scenario:
    """一次模擬的完整設定

    horizon 與 t_star_multiple 至少給一個；兩者都有時取較晚者。
    """

    name: str = "scenario"
    domain: DomainSpec = field(default_factory=DomainSpec)
    u0: InitialSpec = field(default_factory=InitialSpec)
    schedule: ScheduleSpec = field(default_factory=ScheduleSpec)
    solver: SolverSpec = field(default_factory=SolverSpec)
    horizon: Optional[float] = None
    t_star_multiple: Optional[float] = field(default=None, metadata={"key": "horizon.t_star_multiple"})
    outputs: Tuple[str, ...] = OUTPUT_KINDS

    def validate(self) -> None:
        """檢查參照與物理參數；不合法時拋出 ValidationError 或 DomainError"""
        domain = self.domain.build()
        self.u0.build()
        self.solver.build()
        if self.schedule.mode is ScheduleMode.PROFILE:
            self.schedule.profile.build()
        if self.schedule.constants_mode is not None:
            if self.schedule.beta is None:
                raise ValidationError(f"schedule.mode={self.schedule.mode.value} 需要 schedule.beta")
            if self.schedule.mode is ScheduleMode.CAPPED and self.schedule.B is None:
                raise ValidationError("schedule.mode=capped 需要 schedule.B")
            exponents(self.schedule.constants_mode, domain.n, self.schedule.beta, self.schedule.alpha)
        elif self.t_star_multiple is not None:
            raise ValidationError("horizon.t_star_multiple 只能用於 global / capped 排程")
        if self.horizon is None and self.t_star_multiple is None:
            raise ValidationError("需要 horizon 或 horizon.t_star_multiple")
        if self.horizon is not None and not self.horizon > 0:
            raise ValidationError(f"horizon 必須為正，收到 {self.horizon}")
        unknown = set(self.outputs) - set(OUTPUT_KINDS)
        if unknown:
            raise ValidationError(f"未知的輸出種類：{sorted(unknown)}")


# ---------------------------------------------------------------------------
# 鍵與值的轉換
# ---------------------------------------------------------------------------


def _key_map(cls: type, prefix: str = "") -> Dict[str, Tuple[Tuple[str, ...], Any]]:
    """dotted key → (欄位路徑, 型別)"""
    hints = get_type_hints(cls)
    out: Dict[str, Tuple[Tuple[str, ...], Any]] = {}
    for item in fields(cls):
        hint = hints[item.name]
        key = item.metadata.get("key", prefix + item.name)
        if is_dataclass(hint):
            for sub_key, (path, sub_hint) in _key_map(hint, key + ".").items():
                out[sub_key] = ((item.name,) + path, sub_hint)
        else:
            out[key] = ((item.name,), hint)
    return out


SCENARIO_KEYS = _key_map(Scenario)


def _is_optional(hint: Any) -> bool:
    return get_origin(hint) in (Union, types.UnionType) and type(None) in get_args(hint)


def _parse_value(text: str, hint: Any, key: str) -> Any:
    try:
        if _is_optional(hint):
            if text.lower() in ("", "none", "auto"):
                return None
            inner = next(arg for arg in get_args(hint) if arg is not type(None))
            return _parse_value(text, inner, key)
        if get_origin(hint) is tuple:
            item_hint = get_args(hint)[0]
            parts = [p.strip() for p in text.split(",") if p.strip()]
            if get_origin(item_hint) is tuple:
                return tuple(tuple(float(v) for v in p.split(":")) for p in parts)
            return tuple(_parse_value(p, item_hint, key) for p in parts)
        if isinstance(hint, type) and issubclass(hint, Enum):
            return hint(text)
        if hint is float:
            return float(text)
        if hint is int:
            return int(text)
        return text
    except (ValueError, TypeError) as e:
        raise ValidationError(f"{key} 的值 {text!r} 無法解析：{e}") from e


def _format_value(value: Any) -> str:
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        if value and isinstance(value[0], tuple):
            return ", ".join(":".join(repr(float(v)) for v in pair) for pair in value)
        return ", ".join(_format_value(v) for v in value)
    return str(value)


def _get(obj: Any, path: Tuple[str, ...]) -> Any:
    for name in path:
        obj = getattr(obj, name)
    return obj


def _build(cls: type, values: Dict[Tuple[str, ...], Any]) -> Any:
    hints = get_type_hints(cls)
    kwargs: Dict[str, Any] = {}
    for item in fields(cls):
        hint = hints[item.name]
        if is_dataclass(hint):
            nested = {path[1:]: v for path, v in values.items() if path[0] == item.name}
            if nested:
                kwargs[item.name] = _build(hint, nested)
        elif (item.name,) in values:
            kwargs[item.name] = values[(item.name,)]
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as e:
        if isinstance(e, ValidationError):
            raise
        raise ValidationError(f"{cls.__name__} 設定不合法：{e}") from e


def flatten(scenario: Scenario) -> Dict[str, str]:
    """情境 → {dotted key: 文字值}，None 的欄位省略"""
    flat: Dict[str, str] = {}
    for key, (path, _) in SCENARIO_KEYS.items():
        value = _get(scenario, path)
        if value is not None:
            flat[key] = _format_value(value)
    return flat


def unflatten(flat: Dict[str, str]) -> Scenario:
    values: Dict[Tuple[str, ...], Any] = {}
    for key, text in flat.items():
        if key not in SCENARIO_KEYS:
            raise ValidationError(f"未知的設定鍵：{key}")
        path, hint = SCENARIO_KEYS[key]
        values[path] = _parse_value(text, hint, key)
    return _build(Scenario, values)


def parse_scenario(text: str) -> Scenario:
    """解析情境設定文字

    Raises:
        ValidationError: 格式錯誤、未知或重複的鍵、值無法解析
    """
    flat: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()

        # '#' 開頭的行為註解
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValidationError(f"第 {lineno} 行缺少 '='：{raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in flat:
            raise ValidationError(f"第 {lineno} 行的鍵 {key} 重複")
        flat[key] = value
    return unflatten(flat)


def serialize_scenario(scenario: Scenario) -> str:
    lines = [f"# blowup-lab scenario: {scenario.name}"]
    lines += [f"{key} = {value}" for key, value in flatten(scenario).items()]
    return "\n".join(lines) + "\n"


def override(scenario: Scenario, assignments: Dict[str, str]) -> Scenario:
    """以 dotted key = 文字值 覆寫部分欄位"""
    flat = flatten(scenario)
    flat.update(assignments)
    return unflatten(flat)


def parse_assignments(items: Tuple[str, ...]) -> Dict[str, str]:
    """命令列的 --set key=value"""
    out: Dict[str, str] = {}
    for item in items:
        if "=" not in item:
            raise ValidationError(f"--set 需要 key=value，收到 {item!r}")
        key, value = (part.strip() for part in item.split("=", 1))
        out[key] = value
    return out


# ---------------------------------------------------------------------------
# 內建情境
# ---------------------------------------------------------------------------


def builtin_scenarios() -> List[str]:
    return sorted(path.stem for path in ProjectPaths.SCENARIOS_DIR.glob("*.cfg"))


def load_scenario(name_or_path: str) -> Scenario:
    """讀取情境檔；先找實際路徑，再找同名的內建情境"""
    path = Path(name_or_path)
    if not path.is_file():
        path = ProjectPaths.get_scenario(name_or_path)
    if not path.is_file():
        raise ValidationError(f"找不到情境 {name_or_path}（內建情境：{', '.join(builtin_scenarios())}）")
    return parse_scenario(path.read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# 建構求解所需的物件
# ---------------------------------------------------------------------------


def resolve_c_hat(scenario: Scenario, explicit: Optional[float] = None) -> Tuple[float, str]:
    """C_hat 的來源優先序：命令列 > 情境檔 > 環境設定 > 即時校準

    Returns:
        Tuple[float, str]: 數值與來源名稱
    """
    if explicit is not None:
        return explicit, "cli"
    if scenario.schedule.C_hat is not None:
        return scenario.schedule.C_hat, "scenario"
    from_env = get_c_hat()
    if from_env is not None:
        return from_env, "config"

    domain = scenario.domain.build()
    mode = scenario.schedule.constants_mode
    if mode is None or scenario.schedule.beta is None:
        raise ValidationError("只有 global / capped 排程需要 C_hat")
    if not domain.is_box:
        raise UnsupportedDomainError(f"{domain.kind.value} 無法自動校準 C_hat，請明確指定")
    alpha, _, _ = exponents(mode, domain.n, scenario.schedule.beta, scenario.schedule.alpha)
    return calibrate_bti_constant(KernelEvaluator(domain), alpha).C_hat, "calibrated"


@dataclass
class PreparedRun:
    """由情境建構出的求解輸入"""

    scenario: Scenario
    domain: Domain
    u0: InitialData
    schedule: BoundarySchedule
    config: SolverConfig
    horizon: float
    constants: Optional[ScheduleConstants] = None
    c_hat_source: Optional[str] = None


def prepare_run(scenario: Scenario, c_hat: Optional[float] = None) -> PreparedRun:
    """建構區域、初始資料、排程（必要時先算常數）與求解器設定"""
    scenario.validate()
    domain = scenario.domain.build()
    u0 = scenario.u0.build()
    config = scenario.solver.build()
    spec = scenario.schedule

    constants: Optional[ScheduleConstants] = None
    source: Optional[str] = None
    if spec.mode is ScheduleMode.INSULATED:
        schedule = BoundarySchedule.insulated(domain)
    else:
        if spec.mode is ScheduleMode.FIXED:
            profile = DecayProfile.constant()
        elif spec.mode is ScheduleMode.PROFILE:
            profile = spec.profile.build()
        else:
            assert spec.constants_mode is not None and spec.beta is not None
            value, source = resolve_c_hat(scenario, c_hat)
            constants = build_constants(
                spec.constants_mode,
                domain.n,
                config.q,
                spec.beta,
                u0.M0,
                spec.gamma1,
                value,
                B=spec.B,
                alpha_override=spec.alpha,
            )
            profile = constants.profile()
        schedule = make_schedule(domain, spec.gamma1, profile, spec.anchor, spec.edge)

    candidates = []
    if scenario.horizon is not None:
        candidates.append(scenario.horizon)
    if scenario.t_star_multiple is not None and constants is not None:
        candidates.append(scenario.t_star_multiple * constants.t_star)
    horizon = max(candidates)
    if not math.isfinite(horizon) or not horizon > 0:
        raise DomainError(f"horizon 不合法：{horizon}")
    return PreparedRun(scenario, domain, u0, schedule, config, horizon, constants, source)


# ---------------------------------------------------------------------------
# 掃描計畫
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepPlan:
    """沿一個設定鍵掃描

    Attributes:
        base (Scenario): 基準情境
        axis (str): 掃描的 dotted key
        values (Tuple[str, ...]): 各點的文字值
        parallelism (int): 平行程序數
        levels (int): 1 為單次模擬；≥ 3 時每點做跨解析度外插
        regression (bool): 是否做 log-log 迴歸
    """

    base: Scenario
    axis: str
    values: Tuple[str, ...]
    parallelism: int = 1
    levels: int = 1
    regression: bool = True

    def __post_init__(self) -> None:
        if not self.values:
            raise ValidationError("掃描值不可為空")
        if self.axis not in SCENARIO_KEYS:
            raise ValidationError(f"未知的掃描鍵：{self.axis}")
        if self.parallelism < 1:
            raise ValidationError(f"parallelism 必須 ≥ 1，收到 {self.parallelism}")
        if self.levels != 1 and self.levels < 3:
            raise ValidationError(f"levels 必須為 1 或 ≥ 3，收到 {self.levels}")

    def instantiate(self) -> List[Scenario]:
        """每個掃描點的情境；任何一點不合法時拋出錯誤"""
        scenarios = []
        for value in self.values:
            scenario = override(self.base, {self.axis: value})
            scenario = replace(scenario, name=f"{self.base.name}[{self.axis}={value}]")
            scenario.validate()
            scenarios.append(scenario)
        return scenarios
