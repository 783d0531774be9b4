"""
KdvNode - KdV 谱截断实验节点

职责:
- kdv-run: 树格式时间推进、H₀ 守恒、与 RK4 的比较，写出轨迹 CSV 与 manifest
- kdv-verify: 守恒恒等式、乘法关系、实性、自收敛阶与 X^• 常数拟合
"""

from kdv import (
    KDV_SECOND_ORDER_WEIGHT,
    SpectralState,
    chain_relation_residual,
    conservation1_basis_check,
    conservation2_residual,
    fit_bullet_bound,
    inner,
    kdv_solve,
    level2_relation_residual,
    random_state,
    rk4_reference,
    self_convergence_order,
    sup_mode_error,
    x_bullet,
)
from logging_config import get_logger
from utils import make_rng

from .base import Check, ExperimentNode, ExperimentResult

logger = get_logger(__name__)

# 初值: v(1) = 0.5 − 0.1i, v(2) = 0.1 + 0.05i，其余为零
INITIAL_MODES = {1: 0.5 - 0.1j, 2: 0.1 + 0.05j}

DRIFT_TOL = 1e-4
RK4_TOL = 1e-4
RK4_HORIZON = 0.25
CONSERVATION1_K = 6
CONSERVATION1_TOL = 1e-12
CONSERVATION2_TOL = 1e-8
RELATION_TOL = 1e-8
CHAIN_K = 4
REALITY_TOL = 1e-12
MIN_ORDER = 2.0
# 自收敛研究的步数，参考解取最细步数的 8 倍
ORDER_STEPS = (100, 200, 400)
BULLET_GAMMAS = (0.3, 0.45)

# 闭式关系检查用的时间点 s < u < t；链式关系用更短的区间（外层为数值求积）
RELATION_TIMES = (0.1, 0.25, 0.4)
CHAIN_TIMES = (0.0, 0.04, 0.1)


def initial_state(cfg) -> SpectralState:
    alpha = cfg.alpha if cfg.alpha is not None else 0.0
    modes = {k: v for k, v in INITIAL_MODES.items() if k <= cfg.K}
    return SpectralState.from_modes(cfg.K, modes, alpha)


def _steps(T: float, h: float) -> int:
    return max(1, int(round(T / h)))


def kdv_run(cfg) -> ExperimentResult:
    result = ExperimentResult()
    v0 = initial_state(cfg)
    steps = _steps(cfg.T, cfg.h)
    trajectory = kdv_solve(v0, cfg.T, steps)
    drift = trajectory.relative_drift()
    result.add(Check.at_most("H0 relative drift", drift, DRIFT_TOL))
    result.add(Check.at_most("reality of final state", trajectory.final.reality_defect(), REALITY_TOL))

    horizon = min(cfg.T, RK4_HORIZON)
    n = _steps(horizon, cfg.h)
    error = sup_mode_error(kdv_solve(v0, horizon, n), rk4_reference(v0, horizon, n))
    result.add(Check.at_most(f"tree scheme vs RK4 at T={horizon}", error, RK4_TOL))

    result.payload.update({
        "steps": steps,
        "H0_initial": v0.H(0.0),
        "H0_final": trajectory.final.H(0.0),
        "H0_relative_drift": drift,
        "rk4_sup_error": error,
        "second_order_weight": KDV_SECOND_ORDER_WEIGHT,
    })
    result.artifacts["trajectory.csv"] = trajectory.to_csv
    result.artifacts["manifest.json"] = lambda path: trajectory.write_manifest(path, seed=cfg.seed, h=cfg.h)
    return result


def kdv_verify(cfg) -> ExperimentResult:
    result = ExperimentResult()
    rng = make_rng(cfg.seed)
    alpha = cfg.alpha if cfg.alpha is not None else 0.0
    s, u, t = RELATION_TIMES

    k1 = min(cfg.K, CONSERVATION1_K)
    result.add(Check.at_most(f"conservation1 on basis triples (K={k1})",
                             conservation1_basis_check(k1, s, t), CONSERVATION1_TOL))

    phi = random_state(cfg.K, rng, alpha)
    weighted = conservation2_residual(s, t, phi)
    unweighted = conservation2_residual(s, t, phi, weight=1)
    result.add(Check.at_most("conservation2 (weight 2)", weighted, CONSERVATION2_TOL))
    xb = x_bullet(s, t, phi, phi)
    result.payload["conservation2_unweighted"] = unweighted
    result.payload["conservation2_unweighted_expected"] = 0.5 * abs(inner(xb, xb))

    phis = [random_state(cfg.K, rng, alpha) for _ in range(4)]
    result.add(Check.at_most("relation [•]", level2_relation_residual("[•]", s, u, t, *phis[:3]), RELATION_TOL))
    result.add(Check.at_most("relation [••]", level2_relation_residual("[••]", s, u, t, *phis), RELATION_TOL))

    kc = min(cfg.K, CHAIN_K)
    chain_phis = [random_state(kc, rng, alpha) for _ in range(4)]
    result.add(Check.at_most(f"relation [[•]] (K={kc})", chain_relation_residual(*CHAIN_TIMES, *chain_phis), RELATION_TOL))

    result.add(Check.at_most("X• preserves reality", x_bullet(s, t, phis[0], phis[1]).reality_defect(), REALITY_TOL))

    v0 = initial_state(cfg)
    horizon = min(cfg.T, RK4_HORIZON)
    order = self_convergence_order(v0, horizon, steps=ORDER_STEPS)
    result.payload["self_convergence_order"] = order
    # 经验阶按一位小数报告
    result.add(Check.at_least("tree scheme self-convergence order", round(order, 1), MIN_ORDER))

    bounds = fit_bullet_bound(BULLET_GAMMAS, K=cfg.K, alpha=alpha, rng=rng)
    result.tables["bullet_bound"] = (["gamma", "C"], [[g, c] for g, c in sorted(bounds.items())])
    return result


SUITES = {
    "kdv-run": kdv_run,
    "kdv-verify": kdv_verify,
}


class KdvNode(ExperimentNode):
    """KdV 实验节点"""

    name = "kdv"

    def exec(self, config):
        logger.info(f"running {config.experiment} with K={config.K}, T={config.T}, h={config.h}")
        return SUITES[config.experiment](config)
