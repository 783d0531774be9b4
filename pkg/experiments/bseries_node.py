"""
BSeriesNode - 树积分与 B-级数实验节点

职责:
- 恒等路径闭式 (t−s)^{|τ|}/τ!
- 乘法关系 δX^τ = X^{Δ′τ} 的残差与加密斜率
- 洗牌约化与积分映射公理
- f(y) = y² 的 B-级数解与全局阶
"""

import numpy as np
import sympy

from bseries import (
    check_integral_axioms,
    identity_path_integrals,
    local_error_order,
    multiplicative_residual,
    series_solution,
    shuffle_reduction_check,
    tree_integrals,
)
from increments import Grid
from logging_config import get_logger
from trees import Forest, enumerate_trees, leaf, linear_tree
from utils import fit_loglog_slope, make_rng
from vector_fields import VectorFieldSet

from .base import DRIVERS, Check, ExperimentNode, ExperimentResult

logger = get_logger(__name__)

IDENTITY_TOL = 1e-9
MULTIPLICATIVE_TOL = 1e-6
MULTIPLICATIVE_SLOPE = 1.0
EXACT_TOL = 1e-12
SHUFFLE_TOL = 1e-7
AXIOM_TOL = 1e-10
# 全局阶至少为 max_weight − BSERIES_SLACK
BSERIES_SLACK = 0.5
ROUNDOFF = 1e-13

# y' = y² dx，x_t = t，y_0 = 1/2 的解为 1/(2−t)
RICCATI_Y0 = 0.5


def _riccati(order: int) -> VectorFieldSet:
    y = sympy.Symbol("y")
    return VectorFieldSet.from_sympy([[y ** 2]], [y], order=order)


def _driver(cfg):
    # 非解析驱动没有细网格采样，换用二维抛物线
    return DRIVERS.get(cfg.path, DRIVERS["parabola"])


def identity_check(cfg, result: ExperimentResult):
    n = cfg.grid
    fine = Grid.uniform(n * cfg.oversample)
    X = tree_integrals(DRIVERS["linear"].sample(fine), enumerate_trees(1, cfg.max_weight), cfg.oversample)
    t = X.grid.times
    i, j = np.tril_indices(len(t), k=-1)
    worst = 0.0
    for tau in X.trees:
        expected = (t[i] - t[j]) ** tau.weight / tau.factorial
        worst = max(worst, float(np.max(np.abs(X[tau].values[i, j] - expected))))
    result.add(Check.at_most(f"identity path (t−s)^|τ|/τ! at N={n}", worst, IDENTITY_TOL))
    result.payload["identity_x111"] = float(identity_path_integrals(linear_tree((0, 0, 0)), 1.0, 0.0))


def multiplicative_study(cfg, result: ExperimentResult):
    """trapezoid 求积下残差随加密下降；linear 求积下残差在舍入以内"""
    driver = _driver(cfg)
    trees = enumerate_trees(driver.d, cfg.max_weight)
    rows, residuals = [], []
    for n in sorted(cfg.grids):
        x = driver.sample(Grid.uniform(n * cfg.oversample))
        X = tree_integrals(x, trees, cfg.oversample, method="trapezoid", both_orders=False)
        rng = make_rng(cfg.seed)
        worst = max(multiplicative_residual(X, tau, rng=rng) for tau in X.trees)
        rows.append([n, worst])
        residuals.append(worst)
    result.tables["multiplicative"] = (["N", "max_residual"], rows)
    result.add(Check.at_most(f"multiplicative residual at N={rows[-1][0]}", residuals[-1], MULTIPLICATIVE_TOL))
    usable = [(n, r) for n, r in rows if r > ROUNDOFF]
    if len(usable) >= 2:
        slope = abs(fit_loglog_slope([n for n, _ in usable], [r for _, r in usable]))
        result.payload["multiplicative_slope"] = slope
        result.add(Check.at_least("multiplicative residual slope", slope, MULTIPLICATIVE_SLOPE))

    n = min(cfg.grids)
    X = tree_integrals(driver.sample(Grid.uniform(n * cfg.oversample)), trees, cfg.oversample)
    rng = make_rng(cfg.seed)
    worst = max(multiplicative_residual(X, tau, rng=rng) for tau in X.trees)
    scale = max(1.0, max(float(np.max(np.abs(X[tau].values))) for tau in X.trees))
    result.add(Check.at_most("multiplicative residual (exact quadrature)", worst / scale, EXACT_TOL))

    d = driver.d
    shuffle = max(
        shuffle_reduction_check(X, u, v)
        for u, v in [((0,), (d - 1,)), ((0, d - 1), (0,)), ((d - 1,), (0, 0))]
        if len(u) + len(v) <= cfg.max_weight
    )
    result.add(Check.at_most("shuffle reduction", shuffle, SHUFFLE_TOL))

    if cfg.max_weight >= 3:
        axiom = check_integral_axioms(X, 0, Forest.of(leaf(0), leaf(d - 1)), rng=rng)
        result.add(Check.at_most("integral map axiom", axiom, AXIOM_TOL))
    result.artifacts["tree_integrals.csv"] = X.to_csv


def riccati_study(cfg, result: ExperimentResult):
    f = _riccati(cfg.max_weight)
    rows, errors, grids = [], [], []
    contributions = {}
    for n in sorted(cfg.grids):
        x = DRIVERS["linear"].sample(Grid.uniform(n * cfg.oversample))
        sol = series_solution(f, x, [RICCATI_Y0], cfg.max_weight, oversample=cfg.oversample)
        error = float(abs(sol.path.values[-1, 0] - 1.0))
        rows.append([n, float(sol.path.values[-1, 0]), error])
        if error > ROUNDOFF:
            grids.append(n)
            errors.append(error)
        contributions = sol.contributions
    result.tables["bseries"] = (["N", "y_final", "error"], rows)
    result.payload["contributions"] = {str(w): c for w, c in sorted(contributions.items())}
    if len(errors) >= 2:
        slope = abs(fit_loglog_slope(grids, errors))
        result.payload["bseries_slope"] = slope
        result.add(Check.at_least("B-series global order", slope, cfg.max_weight - BSERIES_SLACK))

    local = local_error_order(
        f,
        lambda t: np.asarray(t)[:, None],
        lambda t: np.array([1.0 / (2.0 - t)]),
        [RICCATI_Y0],
        cfg.max_weight,
    )
    result.payload["local_order"] = local


class BSeriesNode(ExperimentNode):
    """树积分与 B-级数实验节点"""

    name = "bseries"

    def exec(self, config):
        result = ExperimentResult()
        identity_check(config, result)
        multiplicative_study(config, result)
        riccati_study(config, result)
        return result
