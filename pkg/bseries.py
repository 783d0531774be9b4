"""
树指标迭代积分与 B-级数

包含:
- tree_integrals: X^{[τ1…τn]_a}_{ts} = ∫_s^t X^{τ1}_{us}…X^{τn}_{us} dx^a_u 的递归计算
- multiplicative_residual: δX^τ = X^{Δ′τ} 的残差
- identity_path_integrals: 恒等路径的闭式 (t−s)^{|τ|}/τ!
- shuffle_reduction_check / check_integral_axioms: 洗牌恒等式与积分映射公理
- elementary_differential / series_solution: 初等微分与逐步展开的 B-级数解

求积方法:
- "linear": 对细网格分段线性插值做精确积分（每段上 X^τ 为 θ 的多项式）
- "trapezoid": 复合梯形公式
"""

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Iterable, Mapping

import numpy as np

from exceptions import InsufficientDerivativeError, NonFiniteStateError, ResourceCapError
from hopf import coproduct, reduced_terms, shuffle
from increments import Grid, Inc1, Inc2, delta2_take, sample_ordered
from logging_config import get_logger
from trees import UNIT, Forest, Tree, b_plus, enumerate_trees, leaf, linear_tree, to_bracket
from utils import MULTI_INDEX_CAP, fit_loglog_slope, make_rng, write_csv
from vector_fields import VectorFieldSet

logger = get_logger(__name__)

QUADRATURE_METHODS = ("linear", "trapezoid")
DEFAULT_OVERSAMPLE = 8


# ============================================================================
# 树积分映射
# ============================================================================

@dataclass(frozen=True, eq=False)
class TreeIntegralMap:
    """树 → 标量 Inc2 的映射 X^τ，定义在粗网格上"""

    grid: Grid
    integrals: Mapping[Tree, Inc2]
    method: str = "linear"

    def __post_init__(self):
        object.__setattr__(self, "integrals", MappingProxyType(dict(self.integrals)))

    def __getitem__(self, tree: Tree) -> Inc2:
        return self.integrals[tree]

    def __contains__(self, tree: Tree) -> bool:
        return tree in self.integrals

    def __len__(self) -> int:
        return len(self.integrals)

    @property
    def trees(self) -> list[Tree]:
        return sorted(self.integrals, key=lambda t: t.sort_key)

    def forest(self, f: Forest) -> np.ndarray:
        """X^F = Π X^{τ_i}（逐点乘积），X^1 ≡ 1"""
        return forest_values(self.integrals, f, len(self.grid))

    def to_csv(self, filepath):
        """按树的括号文本分组导出 (tree, i, j, t, s, value)，只列 t > s"""
        t = self.grid.times
        i, j = np.tril_indices(len(t), k=-1)
        rows = []
        for tree in self.trees:
            vals = self.integrals[tree].values
            label = to_bracket(tree)
            rows.extend([label, int(a), int(b), t[a], t[b], float(vals[a, b])] for a, b in zip(i, j))
        write_csv(filepath, ["tree", "i", "j", "t", "s", "value"], rows)


def forest_values(lookup: Mapping[Tree, Inc2], f: Forest, size: int) -> np.ndarray:
    out = np.ones((size, size))
    for tree in f.trees:
        out = out * lookup[tree].values
    return out


def close_under_reduced(trees: Iterable[Tree]) -> list[Tree]:
    """补全到在 Δ′ 分量（左侧主干与右侧森林中的树）下封闭"""
    pending = list(trees)
    seen: set[Tree] = set()
    while pending:
        tau = pending.pop()
        if tau in seen:
            continue
        seen.add(tau)
        for child in tau.children:
            pending.append(child)
        for rho, sigma, _ in reduced_terms(tau):
            pending.append(rho)
            pending.extend(sigma.trees)
    return sorted(seen, key=lambda t: t.sort_key)


# ============================================================================
# 细网格上的递归求积
# ============================================================================

def _poly_mul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    out = np.zeros((p.shape[0], p.shape[1] + q.shape[1] - 1))
    for i in range(p.shape[1]):
        out[:, i:i + q.shape[1]] += p[:, i:i + 1] * q
    return out


def _segment_integrals(xs: np.ndarray, trees: list[Tree], method: str) -> dict[Tree, np.ndarray]:
    """
    沿细网格从 u_0 出发的树积分 X^τ_{u_k u_0}

    Args:
        xs: 形状 (m+1, d) 的路径采样（u_0 为起点）
        trees: 按规范顺序排列且对子树封闭的树

    Returns:
        树 → 长度 m+1 的数组
    """
    delta = np.diff(xs, axis=0)
    m = delta.shape[0]
    values: dict[Tree, np.ndarray] = {}
    if method == "trapezoid":
        for tau in trees:
            if tau.is_leaf:
                values[tau] = xs[:, tau.label] - xs[0, tau.label]
                continue
            g = np.ones(m + 1)
            for child in tau.children:
                g = g * values[child]
            increments = 0.5 * (g[:-1] + g[1:]) * delta[:, tau.label]
            values[tau] = np.concatenate([[0.0], np.cumsum(increments)])
        return values

    polys: dict[Tree, np.ndarray] = {}
    base = xs[:-1] - xs[0]
    for tau in trees:
        a = tau.label
        if tau.is_leaf:
            polys[tau] = np.stack([base[:, a], delta[:, a]], axis=1)
            values[tau] = xs[:, a] - xs[0, a]
            continue
        integrand = np.ones((m, 1))
        for child in tau.children:
            integrand = _poly_mul(integrand, polys[child])
        powers = np.arange(1, integrand.shape[1] + 1)
        antider = np.zeros((m, integrand.shape[1] + 1))
        antider[:, 1:] = integrand / powers * delta[:, a:a + 1]
        totals = antider.sum(axis=1)
        start = np.concatenate([[0.0], np.cumsum(totals)])
        antider[:, 0] = start[:-1]
        polys[tau] = antider
        values[tau] = start
    return values


def _as_path_array(x: Inc1) -> np.ndarray:
    vals = np.asarray(x.values, dtype=float)
    return vals.reshape(vals.shape[0], -1)


def tree_integrals(
    x: Inc1,
    trees: Iterable[Tree],
    oversample: int = DEFAULT_OVERSAMPLE,
    method: str = "linear",
    both_orders: bool = True,
) -> TreeIntegralMap:
    """
    光滑路径的树指标迭代积分

    Args:
        x: 细网格上的路径采样，细网格点数 = oversample·N + 1
        trees: 需要的树（自动补全到 Δ′ 封闭）
        oversample: 细网格相对目标网格的加密倍数
        method: "linear" 或 "trapezoid"
        both_orders: 是否同时计算 t < s 的值（向后积分）

    Returns:
        粗网格上的 TreeIntegralMap
    """
    if method not in QUADRATURE_METHODS:
        raise ValueError(f"unknown quadrature method {method!r}")
    if oversample < 1 or x.grid.N % oversample:
        raise ValueError(f"fine grid of N={x.grid.N} is not an {oversample}x refinement")
    xs = _as_path_array(x)
    closed = close_under_reduced(trees)
    if any(t.label >= xs.shape[1] for tau in closed for t in _nodes(tau)):
        raise ValueError("tree labels exceed the path dimension")

    coarse = x.grid.coarsen(oversample)
    n = len(coarse)
    out = {tau: np.zeros((n, n)) for tau in closed}
    for j in range(n):
        start = j * oversample
        forward = _segment_integrals(xs[start:], closed, method)
        for tau in closed:
            out[tau][j:, j] = forward[tau][::oversample]
        if both_orders and j > 0:
            backward = _segment_integrals(xs[:start + 1][::-1], closed, method)
            for tau in closed:
                out[tau][:j, j] = backward[tau][::oversample][1:][::-1]
    logger.debug(f"tree integrals: {len(closed)} trees on N={coarse.N} ({method})")
    return TreeIntegralMap(coarse, {tau: Inc2(coarse, vals) for tau, vals in out.items()}, method)


def _nodes(tau: Tree):
    yield tau
    for child in tau.children:
        yield from _nodes(child)


def identity_path_integrals(tau: Tree, t: float, s: float) -> float:
    """恒等路径 x_t = t 上的闭式 (t−s)^{|τ|}/τ!"""
    if t < s:
        raise ValueError("identity path integrals need t >= s")
    return (t - s) ** tau.weight / tau.factorial


# ============================================================================
# 代数关系检查
# ============================================================================

def multiplicative_residual(
    lookup: Mapping[Tree, Inc2] | TreeIntegralMap,
    tau: Tree,
    samples: int = 100_000,
    rng: np.random.Generator | None = None,
) -> float:
    """
    max |δX^τ_{tus} − Σ′ c′ X^ρ_{tu} X^σ_{us}|，在采样的 s<u<t 上

    Returns:
        最大绝对残差
    """
    table = lookup.integrals if isinstance(lookup, TreeIntegralMap) else lookup
    X = table[tau]
    i, k, j = sample_ordered(X.grid, 3, samples, rng or make_rng())
    if i.size == 0:
        return 0.0
    lhs = delta2_take(X, i, k, j)
    rhs = np.zeros_like(lhs)
    for rho, sigma, c in reduced_terms(tau):
        right = np.ones_like(lhs)
        for t in sigma.trees:
            right = right * table[t].values[k, j]
        rhs += c * table[rho].values[i, k] * right
    return float(np.max(np.abs(lhs - rhs)))


def shuffle_reduction_check(X: TreeIntegralMap, u: tuple, v: tuple) -> float:
    """max |X^u X^v − Σ_{w∈Sh(u,v)} X^w| 在所有网格点对上"""
    lhs = X[linear_tree(u)].values * X[linear_tree(v)].values
    rhs = np.zeros_like(lhs)
    for w in shuffle(u, v):
        rhs += X[linear_tree(w)].values
    return float(np.max(np.abs(lhs - rhs)))


def check_integral_axioms(
    X: TreeIntegralMap,
    a: int,
    f: Forest,
    samples: int = 100_000,
    rng: np.random.Generator | None = None,
) -> float:
    """
    积分映射第二公理: δI^a(X^F)_{tus} = I^a(e)_{tu} X^F_{us} + Σ I^a(X^{F1})_{tu} X^{F2}_{us}

    其中 I^a(X^F) = X^{[F]_a}，求和取 ΔF 中除 F⊗1、1⊗F 外的项。

    Returns:
        采样三元组上的最大绝对残差
    """
    if f.is_unit:
        raise ValueError("integral axiom needs a non-empty forest")
    target = b_plus(a, f)
    size = len(X.grid)
    i, k, j = sample_ordered(X.grid, 3, samples, rng or make_rng())
    if i.size == 0:
        return 0.0
    lhs = delta2_take(X[target], i, k, j)
    rhs = X[leaf(a)].values[i, k] * forest_values(X.integrals, f, size)[k, j]
    for (f1, f2), c in coproduct(f).items():
        if f1.is_unit or f2.is_unit:
            continue
        rhs = rhs + float(c) * X[b_plus(a, f1)].values[i, k] * forest_values(X.integrals, f2, size)[k, j]
    return float(np.max(np.abs(lhs - rhs)))


# ============================================================================
# 初等微分与 B-级数
# ============================================================================

def elementary_differential(
    f: VectorFieldSet,
    tau: Tree,
    xi,
    _cache: dict | None = None,
) -> np.ndarray:
    """
    φ^f(•_a) = f_a，φ^f([τ1…τk]_a) = Σ f_{a;b1…bk} Π [φ^f(τi)]^{bi}

    Raises:
        InsufficientDerivativeError: 节点分支数超过向量场的导数阶
        ResourceCapError: n^k 超过多重指标上限
    """
    cache = {} if _cache is None else _cache
    if tau in cache:
        return cache[tau]
    k = len(tau.children)
    if k > f.order:
        raise InsufficientDerivativeError(k, f.order)
    if f.n ** k > MULTI_INDEX_CAP:
        raise ResourceCapError("multi_index", MULTI_INDEX_CAP, f.n ** k)
    tensor = f.derivative(tau.label, k, xi)
    for child in tau.children:
        vec = elementary_differential(f, child, xi, cache)
        tensor = np.tensordot(tensor, vec, axes=([tensor.ndim - 1], [0]))
    cache[tau] = tensor
    return tensor


def series_increment(f: VectorFieldSet, trees: list[Tree], y, integrals: Mapping[Tree, float]) -> dict[int, np.ndarray]:
    """Σ_{|τ|=w} σ(τ)^{-1} φ^f(τ)(y) X^τ，按权重分组"""
    cache: dict = {}
    by_weight: dict[int, np.ndarray] = {}
    for tau in trees:
        term = elementary_differential(f, tau, y, cache) * (integrals[tau] / tau.symmetry)
        by_weight[tau.weight] = by_weight.get(tau.weight, 0.0) + term
    return by_weight


@dataclass(frozen=True, eq=False)
class SeriesSolution:
    """逐步 B-级数解与各阶贡献（每步最大范数）"""

    path: Inc1
    contributions: dict[int, float] = field(default_factory=dict)


def series_solution(
    f: VectorFieldSet,
    x: Inc1,
    y0,
    max_weight: int,
    oversample: int = DEFAULT_OVERSAMPLE,
    method: str = "linear",
) -> SeriesSolution:
    """
    δy_{ts} ≈ Σ_{|τ|≤n} σ(τ)^{-1} φ^f(τ)(y_s) X^τ_{ts}，在每个粗网格步上重新展开

    Raises:
        NonFiniteStateError: 状态出现 NaN/Inf
    """
    xs = _as_path_array(x)
    if xs.shape[1] != f.d:
        raise ValueError(f"path dimension {xs.shape[1]} does not match {f.d} vector fields")
    if oversample < 1 or x.grid.N % oversample:
        raise ValueError(f"fine grid of N={x.grid.N} is not an {oversample}x refinement")
    trees = enumerate_trees(f.d, max_weight)
    coarse = x.grid.coarsen(oversample)
    y = np.asarray(y0, dtype=float).reshape(f.n)
    path = [y.copy()]
    contributions: dict[int, float] = {}
    for i in range(coarse.N):
        segment = xs[i * oversample:(i + 1) * oversample + 1]
        values = _segment_integrals(segment, trees, method)
        step = {tau: float(values[tau][-1]) for tau in trees}
        by_weight = series_increment(f, trees, y, step)
        for w, term in by_weight.items():
            contributions[w] = max(contributions.get(w, 0.0), float(np.max(np.abs(term))))
        y = y + sum(by_weight.values())
        if not np.all(np.isfinite(y)):
            raise NonFiniteStateError(i + 1, float(coarse.times[i + 1]))
        path.append(y.copy())
    return SeriesSolution(Inc1(coarse, np.array(path)), contributions)


def local_error_order(
    f: VectorFieldSet,
    path: Callable[[np.ndarray], np.ndarray],
    exact: Callable[[float], np.ndarray],
    y0,
    max_weight: int,
    spans=(0.4, 0.2, 0.1, 0.05),
    oversample: int = 64,
) -> float:
    """
    单步误差 |y_h − y(h)| 对步长 h 的对数斜率

    Args:
        path: t ↦ x(t)（向量化，返回 (len(t), d)）
        exact: t ↦ y(t)
    """
    errors = []
    for h in spans:
        fine = Grid.uniform(oversample, h)
        xs = np.asarray(path(fine.times), dtype=float).reshape(len(fine), -1)
        sol = series_solution(f, Inc1(fine, xs), y0, max_weight, oversample=oversample)
        errors.append(float(np.max(np.abs(sol.path.values[-1] - exact(h)))))
    return fit_loglog_slope(spans, np.maximum(errors, 1e-300))
