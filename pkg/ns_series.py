"""
Navier–Stokes 树级数的组合报告

- ns_majorant: 几何优级数的部分和与比值检验
- tree_class_report: simple / short(α) / other 各类的树阶乘范围与几何拟合
- theta_report: θ 度函数的上下界检查
- factorial_bound_report: 树阶乘下界（含 2^{n−1} 形式的反例统计）
- fit_zn_constant: Z_n ≤ D^n (n+1)^{−3/2} 中的常数 D

全部是报告，不做断言；断言在调用方（实验节点与测试）中完成。
"""

import math
from functools import lru_cache

import numpy as np

from logging_config import get_logger
from trees import classify_tree, count_Zn, enumerate_planar_binary
from utils import fit_geometric

logger = get_logger(__name__)

MAX_CLASS_N = 16


# ============================================================================
# Z_n 常数
# ============================================================================

def fit_zn_constant(n_max: int) -> float:
    """D = max_{n ≤ n_max} (Z_n (n+1)^{3/2})^{1/n}，使 Z_n ≤ D^n (n+1)^{−3/2} 在范围内成立"""
    if n_max < 1:
        raise ValueError("n_max must be positive")
    return max((count_Zn(n) * (n + 1) ** 1.5) ** (1.0 / n) for n in range(1, n_max + 1))


# ============================================================================
# 优级数
# ============================================================================

def ns_majorant(
    eps: float,
    B: float,
    norm: float,
    t: float,
    k_abs: float,
    n_max: int,
    D: float | None = None,
) -> dict:
    """
    优级数 |S_t u0(k)| + Σ_{n≥1} Z_n B^n e^{−k²t/(n+1)} |k|^{−α} t^{εn/2} ‖u0‖^{(n+1)/2} (1+‖u0‖)^{(n+1)/2}

    首项取 e^{−k²t} ‖u0‖ |k|^{−α}；α = 2 + ε。

    Args:
        eps: ε ∈ [0, 1)
        B: 常数 B（B = 0 时只剩首项）
        norm: ‖u0‖_α
        t: 时间
        k_abs: |k| > 0
        n_max: 最大阶
        D: Z_n 增长常数，默认由 fit_zn_constant(n_max) 给出

    Returns:
        {"rows": [{n, term, partial_sum, ratio}], "flag", "asymptotic_ratio", "t_star", ...}
    """
    if not 0 <= eps < 1:
        raise ValueError(f"eps must lie in [0, 1), got {eps}")
    if k_abs <= 0 or norm < 0 or t < 0 or B < 0:
        raise ValueError("ns_majorant needs k_abs > 0 and non-negative B, norm, t")
    alpha = 2 + eps
    D = fit_zn_constant(max(n_max, 1)) if D is None else D

    rows = []
    leading = math.exp(-(k_abs ** 2) * t) * norm * k_abs ** (-alpha)
    partial = leading
    rows.append({"n": 0, "term": leading, "partial_sum": partial, "ratio": None})
    previous = None
    growth = math.sqrt(norm * (1 + norm))
    for n in range(1, n_max + 1):
        if B == 0:
            term = 0.0
        else:
            term = (
                count_Zn(n) * B ** n
                * math.exp(-(k_abs ** 2) * t / (n + 1)) * k_abs ** (-alpha)
                * t ** (eps * n / 2) * growth ** (n + 1)
            )
        partial += term
        ratio = term / previous if previous else None
        rows.append({"n": n, "term": term, "partial_sum": partial, "ratio": ratio})
        previous = term

    asymptotic = D * B * growth * (t ** (eps / 2) if eps > 0 else 1.0)
    if eps > 0 and B > 0 and growth > 0:
        t_star = (1.0 / (D * B * growth)) ** (2.0 / eps)
    else:
        t_star = None
    ratios = [r["ratio"] for r in rows if r["ratio"] is not None]
    if B == 0:
        flag = "leading-only"
    elif asymptotic < 1 and (not ratios or ratios[-1] < 1):
        flag = "converges"
    else:
        flag = "diverges"
    logger.debug(f"ns majorant eps={eps} t={t}: flag={flag}, asymptotic ratio {asymptotic:.3g}")
    return {
        "rows": rows,
        "flag": flag,
        "asymptotic_ratio": asymptotic,
        "t_star": t_star,
        "D": D,
        "alpha": alpha,
        "all_ratios_below_one": bool(ratios) and all(r < 1 for r in ratios),
    }


# ============================================================================
# 树类与阶乘
# ============================================================================

def tree_class_report(max_n: int, alpha: float, tol: float = 0.1) -> dict:
    """
    每个 n ≤ max_n 上 simple / short(α) / other 三类的数目与树阶乘最小、最大值

    simple 类检查 factorial = n!；short 类拟合 D3 n^{−1} D4^n ≤ γ(τ) ≤ D1 n^{−1} D2^n。
    """
    if not 1 <= max_n <= MAX_CLASS_N:
        raise ValueError(f"max_n must lie in 1..{MAX_CLASS_N}")
    rows = []
    simple_ok = True
    short_min, short_max, short_n = [], [], []
    for n in range(1, max_n + 1):
        buckets: dict[str, list[int]] = {"simple": [], "short": [], "other": []}
        for t in enumerate_planar_binary(n):
            buckets[classify_tree(t, alpha, tol)].append(t.factorial)
        for name, values in buckets.items():
            if not values:
                continue
            rows.append({"n": n, "class": name, "count": len(values), "min": min(values), "max": max(values)})
        if buckets["simple"] and set(buckets["simple"]) != {math.factorial(n)}:
            simple_ok = False
        if buckets["short"]:
            short_n.append(n)
            short_min.append(n * min(buckets["short"]))
            short_max.append(n * max(buckets["short"]))

    fits = {}
    if len(short_n) >= 2:
        D3, D4, _ = fit_geometric(short_n, short_min)
        D1, D2, _ = fit_geometric(short_n, short_max)
        fits = {"D1": D1, "D2": D2, "D3": D3, "D4": D4}
    return {"rows": rows, "simple_factorial_ok": simple_ok, "short_fit": fits, "alpha": alpha}


def theta_report(max_n: int) -> dict:
    """每个 n 上 θ 的最小、最大值，检查 (n+1)/2 ≤ θ ≤ n+1"""
    rows = []
    holds = True
    for n in range(1, max_n + 1):
        thetas = [t.theta for t in enumerate_planar_binary(n)]
        lo, hi = min(thetas), max(thetas)
        ok = (n + 1) / 2 <= lo and hi <= n + 1
        holds = holds and ok
        rows.append({"n": n, "theta_min": lo, "theta_max": hi, "holds": ok})
    return {"rows": rows, "holds": holds}


@lru_cache(maxsize=None)
def min_factorial(n: int) -> int:
    """𝓑𝓣 中 n 顶点树的最小树阶乘（动态规划）"""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return 1
    best = min_factorial(n - 1)
    for i in range(1, n - 1):
        best = min(best, min_factorial(i) * min_factorial(n - 1 - i))
    return n * best


def factorial_bound_report(max_n: int) -> dict:
    """
    树阶乘下界报告

    - stated: γ(τ) ≥ 2^{n−1} 的违例 n 列表
    - 经验下界: min_n γ_min(n)/2^{n−1}
    """
    rows = []
    violations = []
    ratios = []
    for n in range(1, max_n + 1):
        gmin = min_factorial(n)
        bound = 2 ** (n - 1)
        ratio = gmin / bound
        ratios.append(ratio)
        if gmin < bound:
            violations.append(n)
        rows.append({"n": n, "min_factorial": gmin, "stated_bound": bound, "ratio": ratio})
    return {
        "rows": rows,
        "stated_violations": violations,
        "min_ratio": float(np.min(ratios)),
    }
