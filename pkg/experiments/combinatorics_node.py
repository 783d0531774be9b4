"""
CombinatoricsNode - Navier–Stokes 树级数的组合报告节点

职责:
- ns-majorant: 优级数部分和、比值与收敛标记
- tree-report: θ 界、Z_n 计数、各树类阶乘范围、阶乘下界
"""

import math

from logging_config import get_logger
from ns_series import factorial_bound_report, ns_majorant, theta_report, tree_class_report
from trees import count_Zn, enumerate_planar_binary

from .base import DEFAULT_SHORT_ALPHA, Check, ExperimentNode, ExperimentResult

logger = get_logger(__name__)

# 暴力枚举核对 Z_n 的最大顶点数
ZN_BRUTE_FORCE_N = 14

# min_n γ_min(n)/2^{n−1} 在 n = 3 取到
FACTORIAL_RATIO_FLOOR = 0.75


def _row(values: list) -> list:
    return ["" if v is None else v for v in values]


def ns_majorant_report(cfg) -> ExperimentResult:
    result = ExperimentResult()
    report = ns_majorant(cfg.eps, cfg.B, cfg.norm, cfg.t, cfg.k_abs, cfg.n_max)
    rows = [_row([r["n"], r["term"], r["partial_sum"], r["ratio"]]) for r in report["rows"]]
    result.tables["ns_majorant"] = (["n", "term", "partial_sum", "ratio"], rows)

    finite = all(math.isfinite(r["partial_sum"]) for r in report["rows"])
    result.add(Check.holds("partial sums finite", finite))
    monotone = all(b["partial_sum"] >= a["partial_sum"] for a, b in zip(report["rows"], report["rows"][1:]))
    result.add(Check.holds("partial sums non-decreasing", monotone))

    result.payload.update({k: v for k, v in report.items() if k != "rows"})
    logger.info(f"ns majorant flag={report['flag']}, asymptotic ratio {report['asymptotic_ratio']:.4g}")
    return result


def tree_report(cfg) -> ExperimentResult:
    result = ExperimentResult()
    alpha = cfg.alpha if cfg.alpha is not None else DEFAULT_SHORT_ALPHA

    theta = theta_report(cfg.max_n)
    result.add(Check.holds("(n+1)/2 <= θ <= n+1", theta["holds"]))
    result.tables["theta"] = (
        ["n", "theta_min", "theta_max", "holds"],
        [[r["n"], r["theta_min"], r["theta_max"], r["holds"]] for r in theta["rows"]],
    )

    brute = min(cfg.max_n, ZN_BRUTE_FORCE_N)
    zn_rows = [[n, count_Zn(n), len(enumerate_planar_binary(n))] for n in range(1, brute + 1)]
    result.add(Check.holds(f"Z_n recursion matches enumeration (n<={brute})", all(r[1] == r[2] for r in zn_rows)))
    result.tables["zn"] = (["n", "Z_n", "enumerated"], zn_rows)

    classes = tree_class_report(cfg.max_n, alpha)
    result.add(Check.holds("simple trees have factorial n!", classes["simple_factorial_ok"]))
    result.tables["tree_classes"] = (
        ["n", "class", "count", "min_factorial", "max_factorial"],
        [[r["n"], r["class"], r["count"], r["min"], r["max"]] for r in classes["rows"]],
    )

    bound = factorial_bound_report(cfg.max_n)
    result.add(Check.at_least("min γ_min(n)/2^(n−1)", bound["min_ratio"], FACTORIAL_RATIO_FLOOR))
    result.tables["factorial_bound"] = (
        ["n", "min_factorial", "stated_bound", "ratio"],
        [[r["n"], r["min_factorial"], r["stated_bound"], r["ratio"]] for r in bound["rows"]],
    )

    result.payload.update({
        "alpha": alpha,
        "short_fit": classes["short_fit"],
        "stated_bound_violations": bound["stated_violations"],
        "min_factorial_ratio": bound["min_ratio"],
    })
    return result


SUITES = {
    "ns-majorant": ns_majorant_report,
    "tree-report": tree_report,
}


class CombinatoricsNode(ExperimentNode):
    """组合报告节点"""

    name = "combinatorics"

    def exec(self, config):
        return SUITES[config.experiment](config)
