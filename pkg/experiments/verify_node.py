"""
VerifyNode - 代数验证节点

职责:
- verify-trees: 枚举计数、树阶乘/对称因子/θ、括号序列化
- verify-hopf: 余单位律、余结合律、分级、树二项式、约化余乘黄金表
- verify-increments: δδ = 0、精确性重建、δ 的代数例子
- verify-sewing: 缝合映射恒等式与投影
"""

from fractions import Fraction

import numpy as np

from exceptions import NotClosedError
from hopf import (
    TensorVector,
    coassociativity_defect,
    counit_defect,
    grading_violations,
    q_gamma_conjecture_report,
    reduced_coproduct,
    tree_binomial_check,
)
from increments import Grid, Inc1, Inc2, Inc3, delta1, delta2, delta2_take, holder_norm, sample_ordered
from logging_config import get_logger
from sewing import closedness_defect, project_exact, sew_limit, sewing_map
from trees import (
    Forest,
    b_minus,
    b_plus,
    count_Zn,
    enumerate_forests,
    enumerate_planar_binary,
    enumerate_trees,
    leaf,
    parse_bracket,
    to_bracket,
)
from utils import make_rng

from .base import VERIFY_INC3_N, Check, ExperimentNode, ExperimentResult

logger = get_logger(__name__)

# 无标签有根树按权重的个数 (权重 1..10)
ROOTED_TREE_COUNTS = (1, 1, 2, 4, 9, 20, 48, 115, 286, 719)

EXACT_TOL = 1e-12
SAMPLES = 20_000


# ============================================================================
# 约化余乘黄金表 (d = 1)
# ============================================================================

def golden_coproducts() -> list[tuple[str, Forest, TensorVector]]:
    """手算的六条 Δ′，左因子为包含根的主干"""
    dot = leaf(0)
    stick = b_plus(0, [dot])
    chain = b_plus(0, [stick])
    cherry = b_plus(0, [dot, dot])
    F = Forest.of
    return [
        ("[•]", F(stick), TensorVector({(F(dot), F(dot)): 1})),
        ("••", F(dot, dot), TensorVector({(F(dot), F(dot)): 2})),
        ("[[•]]", F(chain), TensorVector({(F(stick), F(dot)): 1, (F(dot), F(stick)): 1})),
        ("•[•]", F(dot, stick), TensorVector({
            (F(dot), F(dot, dot)): 1,
            (F(dot, dot), F(dot)): 1,
            (F(stick), F(dot)): 1,
            (F(dot), F(stick)): 1,
        })),
        ("•••", F(dot, dot, dot), TensorVector({(F(dot, dot), F(dot)): 3, (F(dot), F(dot, dot)): 3})),
        ("[••]", F(cherry), TensorVector({(F(dot), F(dot, dot)): 1, (F(stick), F(dot)): 2})),
    ]


# ============================================================================
# 各验证套件
# ============================================================================

def verify_trees(cfg) -> ExperimentResult:
    result = ExperimentResult()
    n = min(cfg.max_weight, len(ROOTED_TREE_COUNTS))
    trees = enumerate_trees(1, n)
    result.add(Check.holds(f"enumerate_trees(1,{n}) count", len(trees) == sum(ROOTED_TREE_COUNTS[:n])))
    labelled = enumerate_trees(2, min(n, 4))
    result.add(Check.holds("trees unique", len(set(labelled)) == len(labelled)))

    dot = leaf(0)
    stick = b_plus(0, [dot])
    result.add(Check.holds("factorial [•]=2, [[•]]=6, [••]=3", (
        stick.factorial, b_plus(0, [stick]).factorial, b_plus(0, [dot, dot]).factorial) == (2, 6, 3)))
    result.add(Check.holds("symmetry [••]=2, [•0 •1]=1", (
        b_plus(0, [dot, dot]).symmetry, b_plus(2, [leaf(0), leaf(1)]).symmetry) == (2, 1)))

    round_trip = all(parse_bracket(to_bracket(t)) == t for t in labelled)
    result.add(Check.holds("bracket round trip", round_trip))
    inverse = all(b_plus(t.label, b_minus(t.label, t)) == t for t in labelled)
    result.add(Check.holds("b_plus ∘ b_minus = id", inverse))

    max_n = min(cfg.max_n, 12)
    zn_ok = all(len(enumerate_planar_binary(m)) == count_Zn(m) for m in range(1, max_n + 1))
    result.add(Check.holds(f"Z_n matches enumeration (n<={max_n})", zn_ok))

    rows = [[to_bracket(t), t.weight, t.factorial, t.symmetry] for t in labelled]
    result.tables["trees"] = (["tree", "weight", "factorial", "symmetry"], rows)
    result.payload["counts_by_weight"] = {w: sum(1 for t in trees if t.weight == w) for w in range(1, n + 1)}
    return result


def verify_hopf(cfg) -> ExperimentResult:
    result = ExperimentResult()
    rows = []
    for d in (1, 2):
        forests = enumerate_forests(d, cfg.max_weight)
        counit_bad = coassoc_bad = grading_bad = 0
        for f in forests:
            left, right = counit_defect(f)
            counit_bad += int(bool(left) or bool(right))
            coassoc_bad += int(bool(coassociativity_defect(f)))
            grading_bad += grading_violations(f)
        binomial_bad = sum(
            1 for t in enumerate_trees(d, cfg.max_weight)
            if tree_binomial_check(t, Fraction(2), Fraction(3)) != 0
        )
        rows.append([d, len(forests), counit_bad, coassoc_bad, grading_bad, binomial_bad])
        result.add(Check.at_most(f"d={d} counit defects", counit_bad, 0))
        result.add(Check.at_most(f"d={d} coassociativity defects", coassoc_bad, 0))
        result.add(Check.at_most(f"d={d} grading violations", grading_bad, 0))
        result.add(Check.at_most(f"d={d} tree binomial residuals", binomial_bad, 0))
    result.tables["hopf_axioms"] = (
        ["d", "forests", "counit", "coassociativity", "grading", "tree_binomial"], rows)

    golden = []
    for name, forest, expected in golden_coproducts():
        actual = reduced_coproduct(forest)
        result.add(Check.holds(f"Δ′{name}", actual == expected))
        golden.append({"forest": name, "terms": actual.to_json()})
    result.payload["golden"] = golden

    report = q_gamma_conjecture_report(cfg.gamma, cfg.max_weight)
    result.tables["q_gamma"] = (
        ["tree", "weight", "factorial", "q", "ratio"],
        [[r["tree"], r["weight"], r["factorial"], r["q"], r["ratio"]] for r in report],
    )
    return result


def verify_increments(cfg) -> ExperimentResult:
    result = ExperimentResult()
    rng = make_rng(cfg.seed)
    grid = Grid.uniform(cfg.grid)
    t = grid.times
    i, k, j = sample_ordered(grid, 3, SAMPLES, rng)

    f = Inc1(grid, rng.standard_normal((len(grid), 2)))
    a = delta1(f)
    scale = float(np.max(np.abs(a.values)))
    result.add(Check.at_most("δδ = 0", np.max(np.abs(delta2_take(a, i, k, j))) / scale, EXACT_TOL))

    proj = project_exact(a)
    rebuilt = proj.f.values - (f.values - f.values[0])
    result.add(Check.at_most("exact reconstruction", np.max(np.abs(rebuilt)) / scale, EXACT_TOL))
    result.add(Check.at_most("exact remainder", np.max(np.abs(proj.remainder.values)) / scale, EXACT_TOL))

    square = Inc2(grid, (t[:, None] - t[None, :]) ** 2)
    oracle = -2 * (t[i] - t[k]) * (t[k] - t[j])
    result.add(Check.at_most("δ(t−s)² = −2(t−u)(u−s)", np.max(np.abs(delta2_take(square, i, k, j) - oracle)), EXACT_TOL))

    g, h = rng.standard_normal(len(grid)), rng.standard_normal(len(grid))
    rank_one = Inc2(grid, (g[:, None] - g[None, :]) * h[None, :])
    oracle = -(g[i] - g[k]) * (h[k] - h[j])
    result.add(Check.at_most("δ((δg)h) = −(δg)(δh)", np.max(np.abs(delta2_take(rank_one, i, k, j) - oracle)), EXACT_TOL))

    span = Inc2(grid, t[:, None] - t[None, :])
    result.add(Check.at_most("‖t−s‖_1 = 1", abs(holder_norm(span, 1.0) - 1.0), EXACT_TOL))
    result.add(Check.at_most("‖(t−s)²‖_2 = 1", abs(holder_norm(square, 2.0) - 1.0), EXACT_TOL))
    return result


def verify_sewing(cfg) -> ExperimentResult:
    result = ExperimentResult()
    rng = make_rng(cfg.seed)
    n = min(cfg.grid, VERIFY_INC3_N)
    grid = Grid.uniform(n)
    t = grid.times

    h1 = delta2(Inc2(grid, rng.standard_normal((n + 1, n + 1))))
    h2 = delta2(Inc2(grid, rng.standard_normal((n + 1, n + 1))))
    scale = float(np.max(np.abs(h1.values)))
    lam1 = sewing_map(h1)
    result.add(Check.at_most("δ(Λh) = h", np.max(np.abs(delta2(lam1).values - h1.values)) / scale, EXACT_TOL))
    result.add(Check.at_most("sew_limit(Λh) = 0", np.max(np.abs(sew_limit(lam1).values)) / scale, EXACT_TOL))

    combined = sewing_map(Inc3(grid, 2.0 * h1.values + 3.0 * h2.values))
    linear = 2.0 * lam1.values + 3.0 * sewing_map(h2).values
    result.add(Check.at_most("Λ linear", np.max(np.abs(combined.values - linear)) / scale, EXACT_TOL))

    riemann = Inc2(grid, t[None, :] * (t[:, None] - t[None, :]))
    error = abs(sew_limit(riemann).values[n, 0] - 0.5)
    result.add(Check.at_most("sew_limit ∫₀¹ u du", error, 1.0 / n))

    exact = delta1(Inc1(grid, np.sin(3 * t)))
    result.add(Check.at_most("project_exact exact input", np.max(np.abs(project_exact(exact).remainder.values)), EXACT_TOL))

    noise = Inc3(grid, rng.standard_normal((n + 1, n + 1, n + 1)))
    try:
        sewing_map(noise, rng=rng)
        rejected = False
    except NotClosedError:
        rejected = True
    result.add(Check.holds("non-closed input rejected", rejected))
    result.payload["closedness_defect"] = closedness_defect(h1, rng=rng)[0]
    return result


SUITES = {
    "verify-trees": verify_trees,
    "verify-hopf": verify_hopf,
    "verify-increments": verify_increments,
    "verify-sewing": verify_sewing,
}


class VerifyNode(ExperimentNode):
    """代数验证节点: 按实验名分派到对应的套件"""

    name = "verify"

    def exec(self, config):
        logger.info(f"running {config.experiment}")
        return SUITES[config.experiment](config)
