"""
实验模块基础组件

包含:
- Action 路由常量与子命令 → 节点的映射
- ExperimentConfig: 实验配置（默认值 < 配置文件 < 命令行）
- Check / ExperimentResult: 检查记录与实验结果
- 命名驱动路径
"""

import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Callable

import numpy as np
import yaml
from dotenv import dotenv_values

from pocketflow import Node

from exceptions import ConfigError
from increments import Grid, Inc1
from logging_config import log_check, log_node_enter, log_node_exit
from utils import default_seed, inc2_max_n, kdv_max_k


# ============================================================================
# 路由动作常量
# ============================================================================

class Action:
    """节点路由动作常量"""
    VERIFY = "verify"
    ROUGH = "rough"
    BSERIES = "bseries"
    KDV = "kdv"
    COMBINATORICS = "combinatorics"
    REPORT = "report"


EXPERIMENT_ROUTES = {
    "verify-trees": Action.VERIFY,
    "verify-hopf": Action.VERIFY,
    "verify-increments": Action.VERIFY,
    "verify-sewing": Action.VERIFY,
    "rough-converge": Action.ROUGH,
    "rough-solve": Action.ROUGH,
    "bseries": Action.BSERIES,
    "kdv-run": Action.KDV,
    "kdv-verify": Action.KDV,
    "ns-majorant": Action.COMBINATORICS,
    "tree-report": Action.COMBINATORICS,
}


# ============================================================================
# 配置常量
# ============================================================================

# 物化 Inc3 的验证实验使用的最大网格
VERIFY_INC3_N = 128

# 树报告允许的最大顶点数
MAX_TREE_REPORT_N = 16

# tree-report 未指定 α 时使用的短树比例
DEFAULT_SHORT_ALPHA = 0.5


# ============================================================================
# 命名驱动路径
# ============================================================================

@dataclass(frozen=True)
class Driver:
    """解析驱动路径 x: [0,T] → R^d"""

    name: str
    d: int
    fn: Callable[[np.ndarray], np.ndarray]

    def sample(self, grid: Grid) -> Inc1:
        t = grid.times
        return Inc1(grid, np.asarray(self.fn(t), dtype=float).reshape(len(t), self.d))


DRIVERS = {
    "linear": Driver("linear", 1, lambda t: t[:, None]),
    "sin": Driver("sin", 1, lambda t: np.sin(t)[:, None]),
    "parabola": Driver("parabola", 2, lambda t: np.stack([t, t ** 2], axis=1)),
    "circle": Driver("circle", 2, lambda t: np.stack([np.cos(2 * np.pi * t), np.sin(2 * np.pi * t)], axis=1)),
}

# 非解析驱动: 带种子的随机游走插值、纯面积粗糙路径
ROUGH_DRIVERS = ("walk", "area")


# ============================================================================
# 检查与结果
# ============================================================================

@dataclass(frozen=True)
class Check:
    """单项检查: value 与 threshold 的比较结果"""

    name: str
    value: float
    threshold: float | str | None
    passed: bool

    @classmethod
    def at_most(cls, name: str, value: float, threshold: float) -> "Check":
        value = float(value)
        return cls(name, value, threshold, bool(value <= threshold))

    @classmethod
    def at_least(cls, name: str, value: float, threshold: float) -> "Check":
        value = float(value)
        return cls(name, value, threshold, bool(value >= threshold))

    @classmethod
    def within(cls, name: str, value: float, lo: float, hi: float) -> "Check":
        value = float(value)
        return cls(name, value, f"[{lo}, {hi}]", bool(lo <= value <= hi))

    @classmethod
    def holds(cls, name: str, ok: bool) -> "Check":
        return cls(name, 1.0 if ok else 0.0, None, bool(ok))

    def to_dict(self) -> dict:
        return {"name": self.name, "value": _json_float(self.value), "threshold": self.threshold, "passed": self.passed}


def _json_float(x: float):
    return x if math.isfinite(x) else str(x)


@dataclass
class ExperimentResult:
    """实验节点的输出: 检查、CSV 表格与 JSON 负载"""

    checks: list[Check] = field(default_factory=list)
    tables: dict[str, tuple[list[str], list[list]]] = field(default_factory=dict)
    payload: dict = field(default_factory=dict)
    # 文件名 → 写出函数（复用各模块自带的 to_csv）
    artifacts: dict[str, Callable[[Path], None]] = field(default_factory=dict)

    def add(self, check: Check):
        self.checks.append(check)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


# ============================================================================
# 实验配置
# ============================================================================

@dataclass
class ExperimentConfig:
    """
    实验配置

    alpha 为 None 时: KdV 使用 0，tree-report 使用 DEFAULT_SHORT_ALPHA。
    """

    experiment: str = "verify-hopf"
    grid: int = 256
    grids: tuple[int, ...] = (64, 128, 256, 512)
    gamma: float = 0.5
    path: str = "sin"
    seed: int = field(default_factory=default_seed)
    out: str = "out"
    max_weight: int = 4
    K: int = 8
    T: float = 0.5
    h: float = 1e-3
    alpha: float | None = None
    tol: float = 1e-6
    eps: float = 0.0
    B: float = 0.1
    norm: float = 0.1
    t: float = 1.0
    k_abs: float = 1.0
    n_max: int = 20
    max_n: int = 12
    oversample: int = 8
    d: int = 2

    @property
    def out_dir(self) -> Path:
        return Path(self.out) / self.experiment

    def to_dict(self) -> dict:
        data = asdict(self)
        data["grids"] = list(self.grids)
        return data

    def driver(self) -> Driver:
        """命名解析驱动；walk 使用 cfg.d 维随机游走"""
        if self.path in DRIVERS:
            return DRIVERS[self.path]
        raise ConfigError("path", f"{self.path!r} is not an analytic driver")


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _convert(name: str, raw):
    kind = _FIELD_TYPES[name]
    try:
        if name == "grids":
            if isinstance(raw, str):
                return tuple(int(x) for x in raw.replace(" ", "").split(",") if x)
            return tuple(int(x) for x in raw)
        if name == "alpha":
            return None if raw in (None, "", "none", "None") else float(raw)
        if kind in (int, "int"):
            return int(raw)
        if kind in (float, "float"):
            return float(raw)
        return str(raw)
    except (TypeError, ValueError) as e:
        raise ConfigError(name, f"cannot parse value {raw!r}: {e}")


def read_config_file(path: str | Path) -> dict:
    """
    读取配置文件

    .yaml/.yml 用 yaml.safe_load；其余按 key=value 文本（dotenv 格式）解析。

    Raises:
        ConfigError: 文件不存在、格式错误或包含未知键
    """
    p = Path(path)
    if not p.exists():
        raise ConfigError(str(p), "config file not found")
    if p.suffix in (".yaml", ".yml"):
        try:
            data = yaml.safe_load(p.read_text(encoding="utf-8")) or {}
        except yaml.YAMLError as e:
            raise ConfigError(str(p), f"invalid YAML: {e}")
        if not isinstance(data, dict):
            raise ConfigError(str(p), "YAML config must be a mapping")
    else:
        data = dict(dotenv_values(p))
    unknown = sorted(set(data) - set(_FIELD_TYPES))
    if unknown:
        raise ConfigError(str(p), f"unknown keys: {', '.join(unknown)}")
    return {k: _convert(k, v) for k, v in data.items() if v is not None}


def load_config(config_file: str | Path | None = None, overrides: dict | None = None) -> ExperimentConfig:
    """
    合并配置: 默认值 → 配置文件 → 覆盖项（命令行），然后校验

    Raises:
        ConfigError: 任一来源无效
    """
    values: dict = {}
    if config_file:
        values.update(read_config_file(config_file))
    for key, raw in (overrides or {}).items():
        if raw is None:
            continue
        if key not in _FIELD_TYPES:
            raise ConfigError(key, "unknown option")
        values[key] = _convert(key, raw)
    config = ExperimentConfig(**values)
    validate_config(config)
    return config


def validate_config(cfg: ExperimentConfig):
    """检查所有数值参数是否在模块上限之内"""
    if cfg.experiment not in EXPERIMENT_ROUTES:
        raise ConfigError("experiment", f"unknown experiment {cfg.experiment!r}")
    for n in (cfg.grid, *cfg.grids):
        if not 2 <= n <= inc2_max_n():
            raise ConfigError("grid", f"grid size {n} outside 2..{inc2_max_n()}")
    if not cfg.grids or len(cfg.grids) < 2 and cfg.experiment in ("rough-converge", "rough-solve", "bseries"):
        raise ConfigError("grids", "convergence studies need at least two grid sizes")
    if not 0 < cfg.gamma < 1:
        raise ConfigError("gamma", "must lie in (0, 1)")
    if cfg.path not in DRIVERS and cfg.path not in ROUGH_DRIVERS:
        raise ConfigError("path", f"unknown driver {cfg.path!r}")
    if cfg.max_weight < 1:
        raise ConfigError("max_weight", "must be positive")
    if not 1 <= cfg.K <= kdv_max_k():
        raise ConfigError("K", f"must lie in 1..{kdv_max_k()}")
    if cfg.T <= 0 or cfg.h <= 0 or cfg.h > cfg.T:
        raise ConfigError("h", "need 0 < h <= T")
    if cfg.tol <= 0:
        raise ConfigError("tol", "must be positive")
    if not 0 <= cfg.eps < 1:
        raise ConfigError("eps", "must lie in [0, 1)")
    if cfg.oversample < 1:
        raise ConfigError("oversample", "must be at least 1")
    if cfg.d < 1:
        raise ConfigError("d", "must be positive")
    if not 1 <= cfg.max_n <= MAX_TREE_REPORT_N:
        raise ConfigError("max_n", f"must lie in 1..{MAX_TREE_REPORT_N}")
    if cfg.n_max < 1:
        raise ConfigError("n_max", "must be positive")
    if cfg.k_abs <= 0 or cfg.norm < 0 or cfg.B < 0 or cfg.t < 0:
        raise ConfigError("ns", "need k_abs > 0 and non-negative B, norm, t")
    if cfg.experiment == "tree-report" and cfg.alpha is not None and not 0 < cfg.alpha <= 0.5:
        raise ConfigError("alpha", "short-tree proportion must lie in (0, 1/2]")


# ============================================================================
# 实验节点基类
# ============================================================================

class ExperimentNode(Node):
    """
    实验节点的公共 prep/post

    子类只实现 exec(config) -> ExperimentResult；post 把结果交给 ReportNode。
    """

    name = "experiment"

    def prep(self, shared):
        log_node_enter(self.name)
        return shared["config"]

    def post(self, shared, prep_res, exec_res):
        shared["result"] = exec_res
        for check in exec_res.checks:
            log_check(check.name, check.passed, check.value, check.threshold)
        log_node_exit(self.name, Action.REPORT)
        return Action.REPORT
