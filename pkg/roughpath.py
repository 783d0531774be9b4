"""
粗糙路径: 提升、Chen 检查、粗糙积分、三阶与分支扩展、受控路径、RDE 求解

张量布局（所有模块通用）:
- level1.values[i, j, a]          = X^a_{t_i t_j}
- level2.values[i, j, a, b]       = X^{ab}_{t_i t_j} = ∫_s^t X^a_{us} dx^b_u（a 在最内层）
- level3.values[i, j, a, b, c]    = X^{abc}_{t_i t_j}

Chen 关系（u 为中间时间）:
- δX^{ab}_{tus}  = X^b_{tu} X^a_{us}
- δX^{abc}_{tus} = X^{bc}_{tu} X^a_{us} + X^c_{tu} X^{ab}_{us}
"""

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from bseries import multiplicative_residual
from exceptions import MissingLevelError, NonFiniteStateError, RoughPathError
from hopf import q_gamma, reduced_terms
from increments import (
    CupSum, CupTerm, Grid, Inc1, Inc2, delta1, delta2_take, holder_exponent, holder_norm, sample_ordered,
)
from logging_config import get_logger
from sewing import CLOSED_TOL, ProjectionResult, project_exact, sewing_map
from trees import Forest, Tree, leaf, linear_tree, tree_word
from utils import fit_geometric, fit_loglog_slope, make_rng
from vector_fields import OneForm, SmoothFunction, VectorFieldSet

logger = get_logger(__name__)

CHEN_SAMPLES = 100_000


# ============================================================================
# 粗糙路径
# ============================================================================

@dataclass(frozen=True, eq=False)
class RoughPath:
    """
    γ-粗糙路径 (X^a, X^{ab}[, X^{abc}])

    Attributes:
        level1: 取值 R^d 的 Inc2
        level2: 取值 R^{d×d} 的 Inc2
        gamma: Hölder 指数 γ ∈ (0, 1)
        level3: 可选，取值 R^{d×d×d}
        start: 路径起点 x_{t_0}
    """

    level1: Inc2
    level2: Inc2
    gamma: float
    level3: Inc2 | None = None
    start: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise RoughPathError(f"gamma must lie in (0, 1), got {self.gamma}")
        if self.level1.grid != self.level2.grid:
            raise RoughPathError("level1 and level2 live on different grids")
        d = self.level1.value_shape[0] if self.level1.value_shape else 0
        if self.level1.value_shape != (d,) or self.level2.value_shape != (d, d):
            raise RoughPathError(
                "inconsistent level shapes",
                {"level1": self.level1.value_shape, "level2": self.level2.value_shape},
            )
        if self.level3 is not None and self.level3.value_shape != (d, d, d):
            raise RoughPathError("level3 must be valued in R^{d x d x d}", {"level3": self.level3.value_shape})
        start = np.zeros(d) if self.start is None else np.array(self.start, dtype=float).reshape(d)
        start.setflags(write=False)
        object.__setattr__(self, "start", start)

    @property
    def grid(self) -> Grid:
        return self.level1.grid

    @property
    def d(self) -> int:
        return self.level1.value_shape[0]

    def path(self) -> Inc1:
        """x_{t_i} = x_{t_0} + X_{t_i t_0}"""
        return Inc1(self.grid, self.start + self.level1.values[:, 0])

    def with_level3(self, level3: Inc2) -> "RoughPath":
        return RoughPath(self.level1, self.level2, self.gamma, level3, self.start)

    def tree_increment(self, tau: Tree) -> Inc2:
        """
        由各层读取 X^τ（标量 Inc2）

        支持权重 ≤ 2 的树；有 level3 时还支持线性的权重 3 树。

        Raises:
            MissingLevelError: 该树不在已有层中
        """
        word = tree_word(tau)
        if tau.weight == 1:
            return self.level1.component(tau.label)
        if word is not None and len(word) == 2:
            return self.level2.component(*word)
        if word is not None and len(word) == 3 and self.level3 is not None:
            return self.level3.component(*word)
        raise MissingLevelError(str(tau))

    def to_json(self) -> dict:
        """{grid, level1, level2, gamma}，有 level3 时一并写出"""
        payload = {
            "grid": self.grid.times.tolist(),
            "gamma": self.gamma,
            "start": self.start.tolist(),
            "level1": self.level1.values.tolist(),
            "level2": self.level2.values.tolist(),
        }
        if self.level3 is not None:
            payload["level3"] = self.level3.values.tolist()
        return payload

    @classmethod
    def from_json(cls, payload: dict) -> "RoughPath":
        grid = Grid(payload["grid"])
        level3 = payload.get("level3")
        return cls(
            level1=Inc2(grid, payload["level1"]),
            level2=Inc2(grid, payload["level2"]),
            gamma=float(payload["gamma"]),
            level3=None if level3 is None else Inc2(grid, level3),
            start=payload.get("start"),
        )


def pure_area(grid: Grid, area, gamma: float = 0.5, start=None) -> RoughPath:
    """level1 ≡ 0，level2_{ts} = A (t−s)，A 反对称"""
    A = np.asarray(area, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or not np.allclose(A, -A.T):
        raise RoughPathError("pure-area path needs an antisymmetric matrix")
    d = A.shape[0]
    span = grid.times[:, None] - grid.times[None, :]
    return RoughPath(
        level1=Inc2(grid, np.zeros((len(grid), len(grid), d))),
        level2=Inc2(grid, span[:, :, None, None] * A),
        gamma=gamma,
        start=start,
    )


# ============================================================================
# 光滑路径的提升
# ============================================================================

def _path_array(x: Inc1) -> np.ndarray:
    vals = np.asarray(x.values, dtype=float)
    return vals.reshape(vals.shape[0], -1)


def lift_smooth(x: Inc1, level: int = 2, oversample: int = 8, gamma: float = 0.5) -> RoughPath:
    """
    把细网格上的采样提升为粗网格上的粗糙路径

    迭代积分按细网格上的分段线性插值精确计算，再限制到粗网格（每 oversample 个点取一个）。

    Args:
        x: 细网格采样，细网格 = 粗网格的 oversample 倍加密
        level: 2 或 3
        oversample: 加密倍数 (≥ 1)
        gamma: 记录的 Hölder 指数

    Raises:
        RoughPathError: oversample < 1、网格不可整除或 level 不支持
    """
    if oversample < 1:
        raise RoughPathError(f"oversample must be >= 1, got {oversample}")
    if level not in (2, 3):
        raise RoughPathError(f"lift level must be 2 or 3, got {level}")
    if x.grid.N % oversample:
        raise RoughPathError(f"fine grid of N={x.grid.N} is not an {oversample}x refinement")
    xs = _path_array(x)
    dx = np.diff(xs, axis=0)

    # A^{ab}_k = ∫_0^{u_k} x^a dx^b（分段线性时梯形公式精确）
    mid = 0.5 * (xs[:-1] + xs[1:])
    A = np.concatenate([np.zeros((1,) + dx.shape[1:] * 2), np.cumsum(np.einsum("ka,kb->kab", mid, dx), axis=0)])

    coarse = x.grid.coarsen(oversample)
    xc = xs[::oversample]
    Ac = A[::oversample]
    X1 = xc[:, None, :] - xc[None, :, :]
    X2 = Ac[:, None] - Ac[None, :] - np.einsum("sa,tsb->tsab", xc, X1)
    level3 = None
    if level == 3:
        incr = np.einsum(
            "kc,kab->kabc",
            dx,
            A[:-1] + 0.5 * np.einsum("ka,kb->kab", xs[:-1], dx) + np.einsum("ka,kb->kab", dx, dx) / 6.0,
        )
        B = np.concatenate([np.zeros((1,) + incr.shape[1:]), np.cumsum(incr, axis=0)])
        Bc = B[::oversample]
        X3 = (
            Bc[:, None] - Bc[None, :]
            - np.einsum("sab,tsc->tsabc", Ac, X1)
            - np.einsum("sa,tsbc->tsabc", xc, X2)
        )
        level3 = Inc2(coarse, X3)
    return RoughPath(
        level1=Inc2(coarse, X1),
        level2=Inc2(coarse, X2),
        gamma=gamma,
        level3=level3,
        start=xc[0],
    )


def random_walk(grid: Grid, d: int, rng: np.random.Generator, scale: float = 1.0) -> Inc1:
    """独立高斯增量的随机游走，步长方差 scale²·Δt（仅作粗糙驱动的负对照）"""
    dt = np.diff(grid.times)
    steps = rng.standard_normal((grid.N, d)) * np.sqrt(dt)[:, None] * scale
    return Inc1(grid, np.concatenate([np.zeros((1, d)), np.cumsum(steps, axis=0)]))


# ============================================================================
# Chen 关系与洗牌缺陷
# ============================================================================

def check_chen(
    X: RoughPath,
    samples: int = CHEN_SAMPLES,
    rng: np.random.Generator | None = None,
) -> dict[str, float]:
    """
    各层 Chen 残差（采样的 s<u<t 上取最大值）

    Returns:
        {"level1": …, "level2": …, "level3": …}（无 level3 时不含该键）
    """
    i, k, j = sample_ordered(X.grid, 3, samples, rng or make_rng())
    if i.size == 0:
        return {"level1": 0.0, "level2": 0.0} | ({"level3": 0.0} if X.level3 is not None else {})
    X1, X2 = X.level1.values, X.level2.values
    report = {"level1": float(np.max(np.abs(delta2_take(X.level1, i, k, j))))}
    lhs2 = delta2_take(X.level2, i, k, j)
    rhs2 = np.einsum("nb,na->nab", X1[i, k], X1[k, j])
    report["level2"] = float(np.max(np.abs(lhs2 - rhs2)))
    if X.level3 is not None:
        lhs3 = delta2_take(X.level3, i, k, j)
        rhs3 = np.einsum("nbc,na->nabc", X2[i, k], X1[k, j]) + np.einsum("nc,nab->nabc", X1[i, k], X2[k, j])
        report["level3"] = float(np.max(np.abs(lhs3 - rhs3)))
    return report


def shuffle_defect(X: RoughPath) -> Inc2:
    """X^aX^b − X^{ab} − X^{ba}；几何粗糙路径为零"""
    X1 = X.level1.values
    X2 = X.level2.values
    product = np.einsum("tsa,tsb->tsab", X1, X1)
    return Inc2(X.grid, product - X2 - np.swapaxes(X2, 2, 3))


def ito_shift(X: RoughPath, c: float) -> RoughPath:
    """
    level2 ↦ level2 + c·δ_{ab}(t−s)

    加上的是精确增量的对称部分，Chen 关系保持；level3 随之失效，被丢弃。
    """
    span = X.grid.times[:, None] - X.grid.times[None, :]
    shift = c * span[:, :, None, None] * np.eye(X.d)
    return RoughPath(X.level1, Inc2(X.grid, X.level2.values + shift), X.gamma, None, X.start)


# ============================================================================
# 一形式的粗糙积分
# ============================================================================

@dataclass(frozen=True)
class RoughIntegral:
    """I[φ] 的网格结果: f（从 0 开始的积分路径）与余项 r = a − δf"""

    f: Inc1
    remainder: Inc2
    germ: Inc2
    obstruction_exponent: float | None = None


def _require_rough_integrable(X: RoughPath):
    if X.gamma <= 1 / 3:
        raise RoughPathError(f"rough integral needs gamma > 1/3, got {X.gamma}")


def integral_germ(phi: OneForm, X: RoughPath) -> Inc2:
    """a_{ts} = φ_a(x_s) X^a_{ts} + ∂_bφ_a(x_s) X^{ba}_{ts}，取值 R^m"""
    if phi.d != X.d:
        raise RoughPathError(f"one-form has {phi.d} columns but the path has dimension {X.d}")
    xs = X.path().values
    vals = np.stack([phi.value(p) for p in xs])
    ders = np.stack([phi.derivative(p) for p in xs])
    germ = np.einsum("sia,tsa->tsi", vals, X.level1.values)
    germ += np.einsum("siab,tsba->tsi", ders, X.level2.values)
    return Inc2(X.grid, germ)


def germ_obstruction_exponent(germ: Inc2) -> float:
    """
    ‖δa‖ 的 Hölder 指数估计

    在跨度为 L 的三元组 (t_{i+L}, t_{i+L/2}, t_i) 上取 |δa| 的最大值，拟合对数斜率。
    全部低于舍入水平时返回 inf。
    """
    n = germ.grid.N
    t = germ.grid.times
    spans, maxima = [], []
    L = 2
    while L <= n // 2:
        i = np.arange(n + 1 - L)
        vals = delta2_take(germ, i + L, i + L // 2, i).reshape(i.size, -1)
        spans.append(float(np.mean(t[i + L] - t[i])))
        maxima.append(float(np.max(np.linalg.norm(vals, axis=1))))
        L *= 2
    if len(spans) < 2 or max(maxima) < 1e-13:
        return float("inf")
    return fit_loglog_slope(spans, np.maximum(maxima, 1e-13))


def rough_integral(phi: OneForm, X: RoughPath, report_obstruction: bool = True) -> RoughIntegral:
    """
    I[φ]: 补偿和极限 f 与余项 r

    Raises:
        RoughPathError: γ ≤ 1/3 或维度不一致
    """
    _require_rough_integrable(X)
    germ = integral_germ(phi, X)
    proj = project_exact(germ)
    exponent = germ_obstruction_exponent(germ) if report_obstruction else None
    logger.debug(f"rough integral on N={X.grid.N}, obstruction exponent {exponent}")
    return RoughIntegral(f=proj.f, remainder=proj.remainder, germ=germ, obstruction_exponent=exponent)


# ============================================================================
# 三阶扩展与增长估计
# ============================================================================

def extend_level3(X: RoughPath, tol: float = CLOSED_TOL) -> RoughPath:
    """
    X^{abc} = Λ[X^{bc}_{tu} X^a_{us} + X^c_{tu} X^{ab}_{us}]

    闭性由 level1、level2 的 Chen 关系保证；右端以惰性杯积形式交给缝合映射。

    Raises:
        RoughPathError: 3γ ≤ 1
        NotClosedError: 输入不满足 Chen 关系
    """
    if 3 * X.gamma <= 1:
        raise RoughPathError(f"level-3 extension needs 3*gamma > 1, got gamma={X.gamma}")
    h = CupSum([
        CupTerm(X.level2, X.level1, "bc,a->abc"),
        CupTerm(X.level1, X.level2, "c,ab->abc"),
    ])
    return X.with_level3(sewing_map(h, tol=tol))


def growth_report(X: RoughPath) -> dict:
    """
    n_k = max_{|ā|=k} ‖X^ā‖_{kγ}，拟合 n_k (k!)^γ ≈ C1·C2^k

    Raises:
        RoughPathError: 缺少 level3
    """
    if X.level3 is None:
        raise RoughPathError("growth report needs level3; call extend_level3 first")
    norms = []
    for k, level in enumerate((X.level1, X.level2, X.level3), start=1):
        norms.append(holder_norm(level, k * X.gamma))
    levels = np.arange(1, 4)
    scaled = np.array(norms) * np.array([1.0, 2.0, 6.0]) ** X.gamma
    C1, C2, residual = fit_geometric(levels, scaled)
    return {"norms": norms, "C1": C1, "C2": C2, "residual": residual}


# ============================================================================
# 分支粗糙路径
# ============================================================================

def base_levels(X: RoughPath) -> dict[Tree, Inc2]:
    """由 level1/level2（及 level3）得到 γ|τ| ≤ 1 所需的树增量"""
    out: dict[Tree, Inc2] = {}
    for a in range(X.d):
        out[leaf(a)] = X.level1.component(a)
        for b in range(X.d):
            out[linear_tree((a, b))] = X.level2.component(a, b)
    return out


def extend_branched(
    levels: Mapping[Tree, Inc2],
    target: Tree,
    gamma: float,
    tol: float = CLOSED_TOL,
    cache: dict[Tree, Inc2] | None = None,
) -> Inc2:
    """
    X^τ = Λ[Σ′ c′ X^ρ_{tu} X^σ_{us}]，森林取逐点乘积；缺少的 Δ′ 分量递归构造

    Args:
        levels: 已知的树增量（γ|τ| ≤ 1 的树必须给出）
        target: 目标树
        gamma: Hölder 指数
        cache: 可选，存放递归构造出的增量

    Raises:
        MissingLevelError: γ|τ| ≤ 1 的分量缺失
        NotClosedError: 右端不闭
    """
    memo = cache if cache is not None else {}
    return _branched(levels, target, gamma, tol, memo)


def _branched(levels, tau: Tree, gamma: float, tol: float, memo: dict) -> Inc2:
    if tau in levels:
        return levels[tau]
    if tau in memo:
        return memo[tau]
    if gamma * tau.weight <= 1:
        raise MissingLevelError(str(tau))
    terms = []
    for rho, sigma, c in reduced_terms(tau):
        left = _branched(levels, rho, gamma, tol, memo)
        right = _forest_increment(levels, sigma, gamma, tol, memo)
        terms.append(CupTerm(left, right, ",->", float(c)))
    memo[tau] = sewing_map(CupSum(terms), tol=tol)
    return memo[tau]


def _forest_increment(levels, sigma: Forest, gamma, tol, memo) -> Inc2:
    parts = [_branched(levels, t, gamma, tol, memo) for t in sigma.trees]
    values = parts[0].values
    for p in parts[1:]:
        values = values * p.values
    return Inc2(parts[0].grid, values)


def branched_residual(levels: Mapping[Tree, Inc2], tau: Tree, rng: np.random.Generator | None = None) -> float:
    """δX^τ = X^{Δ′τ} 的残差"""
    return multiplicative_residual(levels, tau, rng=rng)


def branched_growth_report(levels: Mapping[Tree, Inc2], gamma: float) -> dict:
    """
    ‖X^τ‖_{γ|τ|} 与 q_γ(τ) 的比值表，按权重取最大值后拟合 C1·C2^{|τ|}

    Returns:
        {"rows": [...], "C1", "C2", "residual"}
    """
    rows = []
    worst: dict[int, float] = {}
    for tau in sorted(levels, key=lambda t: t.sort_key):
        norm = holder_norm(levels[tau], gamma * tau.weight)
        q = q_gamma(tau, gamma)
        ratio = norm / q
        rows.append({"tree": str(tau), "weight": tau.weight, "norm": norm, "q": q, "ratio": ratio})
        worst[tau.weight] = max(worst.get(tau.weight, 0.0), ratio)
    weights = sorted(worst)
    if len(weights) >= 2:
        C1, C2, residual = fit_geometric(weights, [worst[w] for w in weights])
    else:
        C1, C2, residual = float("nan"), float("nan"), float("nan")
    return {"rows": rows, "C1": C1, "C2": C2, "residual": residual}


# ============================================================================
# 受控路径
# ============================================================================

@dataclass(frozen=True, eq=False)
class ControlledPath:
    """
    受控路径 h 与系数 h^τ（γ|τ| < 1 的树）

    δh = Σ h^τ_s X^τ_{ts} + R，其中 R 的 Hölder 阶 > 1。
    """

    value: Inc1
    coefficients: Mapping[Tree, Inc1]

    def __post_init__(self):
        object.__setattr__(self, "coefficients", MappingProxyType(dict(self.coefficients)))

    @classmethod
    def from_constants(cls, X: RoughPath, constants: Mapping[Tree, float], h0: float = 0.0) -> "ControlledPath":
        """
        h_t = h_0 + Σ c_τ X^τ_{t t_0}

        系数 h^τ_s = c_τ + Σ_ρ c_ρ Σ′_{ρ→(τ,σ)} c′ X^σ_{s t_0}。
        """
        n = len(X.grid)
        value = np.full(n, float(h0))
        coeffs = {tau: np.full(n, float(c)) for tau, c in constants.items()}
        for rho, c_rho in constants.items():
            value = value + c_rho * X.tree_increment(rho).values[:, 0]
            for tau, sigma, c in reduced_terms(rho):
                sigma_vals = np.ones(n)
                for t in sigma.trees:
                    sigma_vals = sigma_vals * X.tree_increment(t).values[:, 0]
                coeffs.setdefault(tau, np.zeros(n))
                coeffs[tau] = coeffs[tau] + c * c_rho * sigma_vals
        return cls(Inc1(X.grid, value), {tau: Inc1(X.grid, v) for tau, v in coeffs.items()})

    @classmethod
    def from_function(cls, psi: SmoothFunction, X: RoughPath) -> "ControlledPath":
        """h = ψ(x)，h^{•a} = ∂_aψ(x)，2γ < 1 时 h^{[•b]_a} = ∂_a∂_bψ(x)"""
        xs = X.path().values
        value = np.array([psi.value(p) for p in xs])
        grads = np.stack([psi.gradient(p) for p in xs])
        coeffs = {leaf(a): Inc1(X.grid, grads[:, a]) for a in range(X.d)}
        if 2 * X.gamma < 1:
            hess = np.stack([psi.hessian(p) for p in xs])
            for a in range(X.d):
                for b in range(X.d):
                    coeffs[linear_tree((b, a))] = Inc1(X.grid, hess[:, a, b])
        return cls(Inc1(X.grid, value), coeffs)


@dataclass(frozen=True)
class ControlledReport:
    """受控残差的 Hölder 指数估计"""

    remainder_exponent: float
    derivative_exponents: dict
    gamma: float

    @property
    def derivative_passed(self) -> dict:
        return {tau: mu + self.gamma * tau.weight > 1 for tau, mu in self.derivative_exponents.items()}

    @property
    def passed(self) -> bool:
        return self.remainder_exponent > 1 and all(self.derivative_passed.values())


def check_controlled(h: ControlledPath, X: RoughPath) -> ControlledReport:
    """
    R = δh − Σ h^τ_s X^τ_{ts} 须有 Hölder 阶 > 1；
    R^τ = δh^τ − Σ_ρ Σ′_{ρ→(τ,σ)} c′ h^ρ_s X^σ_{ts} 须满足 阶 + γ|τ| > 1

    Raises:
        RoughPathError: 缺少 γ|τ| < 1 的系数
    """
    needed = [t for t in base_levels(X) if X.gamma * t.weight < 1]
    missing = [str(t) for t in needed if t not in h.coefficients]
    if missing:
        raise RoughPathError("controlled path is missing coefficients", {"trees": ",".join(missing)})

    remainder = delta1(h.value).values.copy()
    for tau, coeff in h.coefficients.items():
        remainder -= coeff.values[None, :] * X.tree_increment(tau).values
    remainder_exp = holder_exponent(Inc2(X.grid, remainder))

    derivative_exps = {}
    for tau, coeff in h.coefficients.items():
        residual = delta1(coeff).values.copy()
        for rho, c_rho in h.coefficients.items():
            for left, sigma, c in reduced_terms(rho):
                if left != tau:
                    continue
                sigma_vals = np.ones_like(residual)
                for t in sigma.trees:
                    sigma_vals = sigma_vals * X.tree_increment(t).values
                residual -= c * c_rho.values[None, :] * sigma_vals
        derivative_exps[tau] = holder_exponent(Inc2(X.grid, residual))
    return ControlledReport(remainder_exp, derivative_exps, X.gamma)


def integrate_controlled(h: ControlledPath, X: RoughPath, a: int) -> ProjectionResult:
    """
    I^a(h): 由 h_s X^{•a}_{ts} + Σ_b h^{•b}_s X^{[•b]_a}_{ts} 缝合

    Raises:
        RoughPathError: γ ≤ 1/3 或 a 越界
    """
    _require_rough_integrable(X)
    if not 0 <= a < X.d:
        raise RoughPathError(f"label {a} out of range for dimension {X.d}")
    germ = h.value.values[None, :] * X.level1.values[:, :, a]
    for b in range(X.d):
        coeff = h.coefficients.get(leaf(b))
        if coeff is not None:
            germ = germ + coeff.values[None, :] * X.level2.values[:, :, b, a]
    return project_exact(Inc2(X.grid, germ))


# ============================================================================
# 粗糙微分方程
# ============================================================================

RDE_METHODS = ("davie", "picard")


def _field_matrix(f: VectorFieldSet, y: np.ndarray) -> np.ndarray:
    return np.stack([f(a, y) for a in range(f.d)], axis=1)


def _rde_increment(f: VectorFieldSet, y: np.ndarray, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    """f_a(y) X^a + (∂_b f_a · f^b_c)(y) X^{ca}"""
    return _field_matrix(f, y) @ x1 + np.einsum("ica,ca->i", f.davie_correction(y), x2)


def rde_solve(
    f: VectorFieldSet,
    X: RoughPath,
    y0,
    method: str = "davie",
    tol: float = 1e-13,
    max_iter: int | None = None,
) -> Inc1:
    """
    dy = f_a(y) dX^a 的网格解

    davie: 逐步二阶格式；picard: 对补偿和映射做不动点迭代，收敛到同一个网格解。

    Raises:
        RoughPathError: γ ≤ 1/3、维度不一致或方法未知
        NonFiniteStateError: 状态出现 NaN/Inf
    """
    _require_rough_integrable(X)
    if f.d != X.d:
        raise RoughPathError(f"{f.d} vector fields for a path of dimension {X.d}")
    if method not in RDE_METHODS:
        raise RoughPathError(f"unknown rde method {method!r}")
    if f.order < 1:
        raise RoughPathError("rde_solve needs first derivatives of the vector fields")
    y0 = np.asarray(y0, dtype=float).reshape(f.n)
    x1 = X.level1.step()
    x2 = X.level2.step()
    times = X.grid.times
    N = X.grid.N

    if method == "davie":
        path = np.empty((N + 1, f.n))
        path[0] = y0
        for i in range(N):
            path[i + 1] = path[i] + _rde_increment(f, path[i], x1[i], x2[i])
            if not np.all(np.isfinite(path[i + 1])):
                raise NonFiniteStateError(i + 1, float(times[i + 1]))
        return Inc1(X.grid, path)

    limit = N + 1 if max_iter is None else max_iter
    path = np.tile(y0, (N + 1, 1))
    for iteration in range(limit):
        steps = np.stack([_rde_increment(f, path[i], x1[i], x2[i]) for i in range(N)])
        updated = np.concatenate([y0[None, :], y0 + np.cumsum(steps, axis=0)])
        if not np.all(np.isfinite(updated)):
            bad = int(np.argmax(~np.all(np.isfinite(updated), axis=1)))
            raise NonFiniteStateError(bad, float(times[bad]))
        change = float(np.max(np.abs(updated - path)))
        path = updated
        if change <= tol * max(1.0, float(np.max(np.abs(path)))):
            logger.debug(f"picard converged after {iteration + 1} iterations")
            break
    return Inc1(X.grid, path)
