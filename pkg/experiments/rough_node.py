"""
RoughNode - 粗糙路径实验节点

职责:
- rough-converge: 粗糙积分对网格的收敛、Chen/洗牌/Itô 检查、三阶与分支扩展
- rough-solve: RDE 的 Davie 格式与 Picard 迭代、阶数、受控路径
"""

import math
from dataclasses import dataclass

import numpy as np
import sympy

from exceptions import ConfigError
from increments import Grid
from logging_config import get_logger
from roughpath import (
    ControlledPath,
    RoughPath,
    base_levels,
    branched_growth_report,
    branched_residual,
    check_chen,
    check_controlled,
    extend_branched,
    extend_level3,
    growth_report,
    integrate_controlled,
    ito_shift,
    lift_smooth,
    pure_area,
    random_walk,
    rde_solve,
    rough_integral,
    shuffle_defect,
)
from sewing import sew_limit
from trees import enumerate_trees
from utils import fit_loglog_slope, make_rng
from vector_fields import OneForm, SmoothFunction, VectorFieldSet

from .base import DRIVERS, Check, ExperimentNode, ExperimentResult

logger = get_logger(__name__)

# 收敛斜率的允许区间（取绝对值）
SLOPE_RANGE = (0.9, 2.2)
# RDE 一阶向量场 f(y) = y 的阶数区间
RDE_SLOPE_RANGE = (1.8, 2.3)
# 误差随 N 基本不变时视为精确格式
DECREASE_RATIO = 2.0
ROUNDOFF = 1e-13

CHEN_TOL = 1e-10
SHUFFLE_TOL = 1e-7
ITO_TOL = 1e-9
BRANCHED_TOL = 1e-9
ITO_SHIFT = 0.25
PURE_AREA = ((0.0, 1.0), (-1.0, 0.0))


# ============================================================================
# 积分问题: 一形式与解析值
# ============================================================================

@dataclass(frozen=True)
class IntegralProblem:
    """∫_0^1 φ(x) dx 及其解析值（None 表示无解析值）"""

    phi: OneForm
    oracle: float | None
    linear_form: bool


def _area_form(d: int) -> OneForm:
    """½(x¹dx² − x²dx¹)，d = 1 时退化为 x dx"""
    xs = sympy.symbols(f"x1:{d + 1}")
    if d == 1:
        return OneForm.from_sympy([[xs[0]]], xs)
    row = [sympy.Integer(0)] * d
    row[0] = -xs[1] / 2
    row[1] = xs[0] / 2
    return OneForm.from_sympy([row], xs)


def integral_problem(path: str, d: int) -> IntegralProblem:
    """各驱动对应的一形式与积分真值"""
    if path == "sin":
        x = sympy.symbols("x1:2")
        return IntegralProblem(OneForm.from_sympy([[x[0] ** 2]], x), math.sin(1.0) ** 3 / 3, False)
    if path == "linear":
        x = sympy.symbols("x1:2")
        return IntegralProblem(OneForm.from_sympy([[x[0]]], x), 0.5, True)
    if path == "parabola":
        x = sympy.symbols("x1:3")
        return IntegralProblem(OneForm.from_sympy([[x[1], 0]], x), 1.0 / 3.0, True)
    if path == "circle":
        return IntegralProblem(_area_form(2), math.pi, True)
    if path == "area":
        # x 恒为起点，只剩面积项: ½(X^{12} − X^{21}) = t − s
        return IntegralProblem(_area_form(2), 1.0, True)
    return IntegralProblem(_area_form(d), None, True)


def _fine_size(cfg) -> int:
    fine = max(cfg.grids) * cfg.oversample
    if any(fine % n for n in cfg.grids):
        raise ConfigError("grids", f"every grid size must divide {fine}")
    return fine


def _sample_fine(cfg, grid: Grid):
    if cfg.path == "walk":
        return random_walk(grid, cfg.d, make_rng(cfg.seed))
    return DRIVERS[cfg.path].sample(grid)


def build_paths(cfg) -> dict[int, RoughPath]:
    """
    每个 N 上的粗糙路径

    光滑驱动只在最细网格上采样一次，再按 fine/N 的倍数提升；
    area 为纯面积路径；walk 为带种子的随机游走插值。
    """
    if cfg.path == "area":
        return {n: pure_area(Grid.uniform(n), PURE_AREA, gamma=cfg.gamma) for n in cfg.grids}
    fine = _fine_size(cfg)
    x = _sample_fine(cfg, Grid.uniform(fine))
    return {n: lift_smooth(x, level=2, oversample=fine // n, gamma=cfg.gamma) for n in cfg.grids}


def _relative(value: float, oracle: float) -> float:
    return abs(value - oracle) / max(1.0, abs(oracle))


# ============================================================================
# rough-converge
# ============================================================================

def rough_converge(cfg) -> ExperimentResult:
    result = ExperimentResult()
    paths = build_paths(cfg)
    grids = sorted(paths)
    finest = paths[grids[-1]]
    problem = integral_problem(cfg.path, finest.d)

    values = {}
    for n in grids:
        integral = rough_integral(problem.phi, paths[n], report_obstruction=(n == grids[-1]))
        values[n] = float(integral.f.values[-1, 0])
        if n == grids[-1]:
            result.payload["obstruction_exponent"] = integral.obstruction_exponent

    reference = problem.oracle if problem.oracle is not None else values[grids[-1]]
    compared = grids if problem.oracle is not None else grids[:-1]
    errors = [_relative(values[n], reference) for n in compared]
    rows = [[n, values[n], _relative(values[n], reference)] for n in grids]
    result.tables["convergence"] = (["N", "integral", "error"], rows)
    result.payload["reference"] = reference

    if problem.oracle is not None:
        result.add(Check.at_most(f"integral error at N={grids[-1]}", errors[-1], cfg.tol))
    decreasing = len(errors) >= 2 and errors[-1] > ROUNDOFF and errors[0] / errors[-1] >= DECREASE_RATIO
    if decreasing:
        slope = abs(fit_loglog_slope(compared, errors))
        result.payload["slope"] = slope
        result.add(Check.within("integral error slope", slope, *SLOPE_RANGE))
    else:
        # 线性一形式的补偿和在提升上是精确的，误差只来自细网格插值
        result.payload["slope"] = None
        result.payload["exact_germ"] = problem.linear_form

    chen = check_chen(finest, rng=make_rng(cfg.seed))
    result.add(Check.at_most("Chen level1", chen["level1"], CHEN_TOL))
    result.add(Check.at_most("Chen level2", chen["level2"], CHEN_TOL))
    defect = shuffle_defect(finest).values
    result.add(Check.at_most("shuffle defect", np.max(np.abs(defect)), SHUFFLE_TOL))

    t = finest.grid.times
    shifted = shuffle_defect(ito_shift(finest, ITO_SHIFT)).values - defect
    expected = -2 * ITO_SHIFT * (t[:, None] - t[None, :])[:, :, None, None] * np.eye(finest.d)
    result.add(Check.at_most("Itô shift changes shuffle defect by 2c(t−s)δ", np.max(np.abs(shifted - expected)), ITO_TOL))

    if cfg.path != "area":
        # 纯面积路径的一阶增量为零，增长拟合无意义
        if 3 * cfg.gamma > 1:
            _level3_checks(cfg, paths[grids[0]], result)
        _branched_checks(cfg, paths[grids[0]], result)
    return result


def _level3_checks(cfg, X: RoughPath, result: ExperimentResult):
    """三阶扩展与直接提升只差最细划分上的值"""
    ext = extend_level3(X)
    fine = _fine_size(cfg)
    x = _sample_fine(cfg, Grid.uniform(fine))
    direct = lift_smooth(x, level=3, oversample=fine // X.grid.N, gamma=cfg.gamma).level3
    gap = ext.level3 + sew_limit(direct) - direct
    scale = max(1.0, float(np.max(np.abs(direct.values))))
    result.add(Check.at_most("level3 extension vs direct lift", np.max(np.abs(gap.values)) / scale, 1e-10))
    chen = check_chen(ext, rng=make_rng(cfg.seed))
    result.add(Check.at_most("Chen level3 (extension)", chen["level3"], CHEN_TOL))
    report = growth_report(ext)
    result.payload["growth"] = {k: report[k] for k in ("norms", "C1", "C2", "residual")}


def _branched_checks(cfg, X: RoughPath, result: ExperimentResult):
    """γ|τ| > 1 的树由缝合映射递归构造，检查乘法关系"""
    levels = dict(base_levels(X))
    weight = min(cfg.max_weight, int(1 / cfg.gamma) + 1)
    cache: dict = {}
    for tau in enumerate_trees(X.d, weight):
        if tau not in levels and cfg.gamma * tau.weight > 1:
            extend_branched(levels, tau, cfg.gamma, cache=cache)
    levels.update(cache)
    rng = make_rng(cfg.seed)
    worst = max((branched_residual(levels, tau, rng) for tau in cache), default=0.0)
    scale = max(1.0, max(float(np.max(np.abs(v.values))) for v in levels.values()))
    result.add(Check.at_most("branched extension δX^τ = X^{Δ′τ}", worst / scale, BRANCHED_TOL))
    report = branched_growth_report(levels, cfg.gamma)
    result.tables["branched_growth"] = (
        ["tree", "weight", "norm", "q", "ratio"],
        [[r["tree"], r["weight"], r["norm"], r["q"], r["ratio"]] for r in report["rows"]],
    )
    result.payload["branched_fit"] = {k: report[k] for k in ("C1", "C2", "residual")}


# ============================================================================
# rough-solve
# ============================================================================

def _linear_fields(d: int) -> VectorFieldSet:
    """d = 1: f(y) = y；否则 R² 上互不交换的线性场"""
    if d == 1:
        return VectorFieldSet.linear([[[1.0]]], order=2)
    mats = [[[0.0, 0.5], [-0.5, 0.0]], [[0.3, 0.0], [0.0, -0.2]]]
    mats += [[[0.1 * a, 0.0], [0.0, 0.1 * a]] for a in range(2, d)]
    return VectorFieldSet.linear(mats, order=2)


def rough_solve(cfg) -> ExperimentResult:
    result = ExperimentResult()
    paths = build_paths(cfg)
    grids = sorted(paths)
    d = paths[grids[0]].d
    f = _linear_fields(d)
    y0 = np.ones(f.n)

    finals = {n: rde_solve(f, paths[n], y0).values[-1] for n in grids}
    if d == 1:
        x = paths[grids[-1]].level1.values[-1, 0, 0]
        reference = np.exp(x) * y0
        compared = grids
    else:
        reference = finals[grids[-1]]
        compared = grids[:-1]
    errors = [float(np.max(np.abs(finals[n] - reference))) for n in compared]
    result.tables["rde"] = (
        ["N", "y_final", "error"],
        [[n, float(finals[n][0]), float(np.max(np.abs(finals[n] - reference)))] for n in grids],
    )
    # 随机游走不光滑，阶数与受控性只作报告
    smooth = cfg.path != "walk"
    if len(compared) >= 2 and min(errors) > ROUNDOFF:
        slope = abs(fit_loglog_slope(compared, errors))
        result.payload["slope"] = slope
        if smooth and d == 1:
            result.add(Check.within("RDE order", slope, *RDE_SLOPE_RANGE))
        elif smooth:
            result.add(Check.at_least("RDE self-convergence order", slope, SLOPE_RANGE[0]))

    X = paths[grids[0]]
    davie = rde_solve(f, X, y0, method="davie").values
    picard = rde_solve(f, X, y0, method="picard").values
    result.add(Check.at_most("Davie and Picard agree", np.max(np.abs(davie - picard)), 1e-10))

    xs = sympy.symbols(f"x1:{d + 1}")
    psi = SmoothFunction.from_sympy(sum(s ** 2 for s in xs) / 2, xs)
    h = ControlledPath.from_function(psi, X)
    controlled = check_controlled_path(h, X)
    if smooth:
        result.add(Check.holds("ψ(x) is controlled", controlled["passed"]))
    result.payload["controlled"] = controlled

    integral = integrate_controlled(h, X, 0)
    result.payload["controlled_integral"] = float(integral.f.values[-1])
    return result


def check_controlled_path(h: ControlledPath, X: RoughPath) -> dict:
    report = check_controlled(h, X)
    return {
        "passed": report.passed,
        "remainder_exponent": report.remainder_exponent,
        "derivative_exponents": {str(t): v for t, v in report.derivative_exponents.items()},
    }


SUITES = {
    "rough-converge": rough_converge,
    "rough-solve": rough_solve,
}


class RoughNode(ExperimentNode):
    """粗糙路径实验节点"""

    name = "rough"

    def exec(self, config):
        logger.info(f"running {config.experiment} on {config.path} with N in {list(config.grids)}")
        return SUITES[config.experiment](config)

