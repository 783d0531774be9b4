"""
周期 KdV 的谱 Galerkin 截断（相互作用表象）及其算子值粗糙路径

状态: 模式 k ∈ {−K,…,K} 上的复系数，v(0) = 0，v(−k) = conj(v(k))。
数组下标为 k + K。

算子:
- Ẋ_σ(φ1,φ2)(k) = (ik/2) Σ_{k1+k2=k} e^{−iωσ} φ1(k1) φ2(k2)，ω = k³−k1³−k2³ = 3k·k1·k2
- X^•_{ts}      = ∫_s^t Ẋ_σ dσ                               （闭式）
- X^{[•]}_{ts}  = ∫_s^t Ẋ_σ(X^•_{σs}(φ1,φ2), φ3) dσ           （闭式）
- X^{[••]}_{ts} = ∫_s^t Ẋ_σ(X^•_{σs}(φ1,φ2), X^•_{σs}(φ3,φ4)) dσ（闭式，超出元组预算时改用 Gauss–Legendre）
- X^{[[•]]}_{ts} = ∫_s^t Ẋ_σ(X^{[•]}_{σs}(φ1,φ2,φ3), φ4) dσ    （Gauss–Legendre）

时间平移: X_{s+h,s}(φ…) = U_s^{-1} X_{h,0}(U_s φ…)，(U_s φ)(k) = e^{ik³s} φ(k)。
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from exceptions import BlowUpError, ModeBudgetError
from logging_config import get_logger
from utils import VERSION, fit_loglog_slope, kdv_max_k, write_csv, write_json

logger = get_logger(__name__)

# 二阶项权重: v ↦ v + X^•(v,v) + 2·X^{[•]}(v,v,v)，与积分方程的第二次 Picard 迭代一致
KDV_SECOND_ORDER_WEIGHT = 2

# 四重元组数超过此值时 X^{[••]} 改用时间求积
CLOSED_FORM_TUPLES = 2_000_000
DEFAULT_QUAD_NODES = 64
BLOWUP_FACTOR = 1e8


# ============================================================================
# 谱状态
# ============================================================================

@dataclass(frozen=True, eq=False)
class SpectralState:
    """
    截断到 |k| ≤ K 的 Fourier 系数

    Attributes:
        K: 模式截断
        values: 长度 2K+1 的复数组，下标 k+K
        alpha: 正则性指标（H_α 范数用）
    """

    K: int
    values: np.ndarray = field(repr=False)
    alpha: float = 0.0

    def __post_init__(self):
        arr = np.array(self.values, dtype=complex)
        if arr.shape != (2 * self.K + 1,):
            raise ValueError(f"expected {2 * self.K + 1} modes, got shape {arr.shape}")
        arr[self.K] = 0
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @classmethod
    def zeros(cls, K: int, alpha: float = 0.0) -> "SpectralState":
        return cls(K, np.zeros(2 * K + 1, dtype=complex), alpha)

    @classmethod
    def from_modes(cls, K: int, modes: dict[int, complex], alpha: float = 0.0) -> "SpectralState":
        """由正模式给出状态，负模式按共轭补齐"""
        arr = np.zeros(2 * K + 1, dtype=complex)
        for k, value in modes.items():
            if not 1 <= k <= K:
                raise ValueError(f"mode {k} outside 1..{K}")
            arr[K + k] = value
            arr[K - k] = np.conj(value)
        return cls(K, arr, alpha)

    @classmethod
    def basis(cls, K: int, k: int) -> "SpectralState":
        """单位向量 e_k（不满足实性约束，只用于多线性恒等式）"""
        arr = np.zeros(2 * K + 1, dtype=complex)
        arr[K + k] = 1
        return cls(K, arr)

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.K, self.K + 1)

    def __getitem__(self, k: int) -> complex:
        return complex(self.values[self.K + k])

    def __add__(self, other: "SpectralState") -> "SpectralState":
        return SpectralState(self.K, self.values + other.values, self.alpha)

    def __sub__(self, other: "SpectralState") -> "SpectralState":
        return SpectralState(self.K, self.values - other.values, self.alpha)

    def __mul__(self, c) -> "SpectralState":
        return SpectralState(self.K, self.values * c, self.alpha)

    __rmul__ = __mul__

    def support(self, tol: float = 1e-14) -> set[int]:
        return {int(k) for k in self.modes[np.abs(self.values) > tol]}

    def reality_defect(self) -> float:
        return float(np.max(np.abs(self.values - np.conj(self.values[::-1]))))

    def H(self, alpha: float | None = None) -> float:
        """H_α = Σ |k|^{2α} v(−k) v(k)"""
        return float(inner(self, self, self.alpha if alpha is None else alpha).real)

    def norm(self, alpha: float | None = None) -> float:
        return float(np.sqrt(max(self.H(alpha), 0.0)))


def inner(a: SpectralState, b: SpectralState, alpha: float = 0.0) -> complex:
    """⟨a, b⟩_α = Σ_{k≠0} |k|^{2α} a(−k) b(k)（双线性）"""
    ks = a.modes
    weights = np.where(ks != 0, np.abs(ks).astype(float) ** (2 * alpha), 0.0)
    return complex(np.sum(weights * a.values[::-1] * b.values))


def random_state(K: int, rng: np.random.Generator, alpha: float = 0.0, decay: float = 1.0) -> SpectralState:
    """满足实性约束的随机状态，幅度按 |k|^{−decay} 衰减"""
    ks = np.arange(1, K + 1)
    amp = ks.astype(float) ** (-decay)
    coeffs = amp * (rng.standard_normal(K) + 1j * rng.standard_normal(K))
    return SpectralState.from_modes(K, dict(zip(ks.tolist(), coeffs)), alpha)


def _check_same_K(*states: SpectralState) -> int:
    K = states[0].K
    if any(s.K != K for s in states):
        raise ValueError("all states must share the mode cutoff K")
    return K


# ============================================================================
# 指标表与时间核
# ============================================================================

def _phi1(z: np.ndarray) -> np.ndarray:
    """(e^z − 1)/z，小 |z| 用级数"""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-4
    safe = np.where(small, 1.0, z)
    series = 1 + z / 2 + z ** 2 / 6 + z ** 3 / 24
    return np.where(small, series, np.expm1(safe) / safe)


def _E0(omega: np.ndarray, h: float) -> np.ndarray:
    """∫_0^h e^{−iωσ} dσ"""
    return h * _phi1(-1j * np.asarray(omega, dtype=float) * h)


@dataclass(frozen=True)
class _Tables:
    K: int
    ks: np.ndarray
    # 双线性: (k, k1)
    pair_mask: np.ndarray
    pair_k2: np.ndarray
    pair_omega: np.ndarray
    # 三线性: (k, m, m1)
    tri_mask: np.ndarray
    tri_m2: np.ndarray
    tri_k3: np.ndarray
    tri_omega_outer: np.ndarray
    tri_omega_inner: np.ndarray


@lru_cache(maxsize=8)
def _tables(K: int) -> _Tables:
    if K < 1:
        raise ValueError("K must be at least 1")
    if K > kdv_max_k():
        raise ModeBudgetError(K, kdv_max_k())
    ks = np.arange(-K, K + 1)

    k = ks[:, None]
    k1 = ks[None, :]
    k2 = k - k1
    pair_mask = (k != 0) & (k1 != 0) & (k2 != 0) & (np.abs(k2) <= K)
    pair_k2 = np.clip(k2, -K, K) + K
    pair_omega = 3.0 * k * k1 * k2

    k = ks[:, None, None]
    m = ks[None, :, None]
    m1 = ks[None, None, :]
    m2 = m - m1
    k3 = k - m
    tri_mask = (k != 0) & (m != 0) & (m1 != 0) & (m2 != 0) & (k3 != 0) & (np.abs(m2) <= K) & (np.abs(k3) <= K)
    k3_full = np.broadcast_to(k3, tri_mask.shape)
    m2_full = np.broadcast_to(m2, tri_mask.shape)
    return _Tables(
        K=K,
        ks=ks,
        pair_mask=pair_mask,
        pair_k2=pair_k2,
        pair_omega=pair_omega,
        tri_mask=tri_mask,
        tri_m2=np.clip(m2_full, -K, K) + K,
        tri_k3=np.clip(k3_full, -K, K) + K,
        tri_omega_outer=3.0 * k * m * k3,
        tri_omega_inner=3.0 * m * m1 * m2,
    )


def _rotate(values: np.ndarray, K: int, s: float, sign: int) -> np.ndarray:
    ks = np.arange(-K, K + 1).astype(float)
    return values * np.exp(sign * 1j * ks ** 3 * s)


# ---------------------------------------------------------------------------
# 以 (0, h) 为基准的权重张量
# ---------------------------------------------------------------------------

def _bilinear_weights(tab: _Tables, h: float) -> np.ndarray:
    W = (0.5j * tab.ks[:, None]) * _E0(tab.pair_omega, h)
    return np.where(tab.pair_mask, W, 0)


def _apply_bilinear(tab: _Tables, W: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """out[k] = Σ_{k1} W[k,k1] a[k1] b[k−k1]"""
    return np.sum(W * a[None, :] * b[tab.pair_k2], axis=1)


def _trilinear_weights(tab: _Tables, h: float) -> np.ndarray:
    outer, inner_ = tab.tri_omega_outer, tab.tri_omega_inner
    safe_inner = np.where(tab.tri_mask, inner_, 1.0)
    G = (_E0(outer + inner_, h) - _E0(outer, h)) / (-1j * safe_inner)
    k = tab.ks[:, None, None]
    m = tab.ks[None, :, None]
    W = (0.5j * k) * (0.5j * m) * G
    return np.where(tab.tri_mask, W, 0)


def _apply_trilinear(tab: _Tables, W: np.ndarray, a, b, c) -> np.ndarray:
    """out[k] = Σ_{m,m1} W[k,m,m1] a[m1] b[m−m1] c[k−m]"""
    return np.sum(W * a[None, None, :] * b[tab.tri_m2] * c[tab.tri_k3], axis=(1, 2))


@lru_cache(maxsize=4)
def _quad_tables(K: int):
    ks = np.arange(-K, K + 1)
    k = ks[:, None, None, None]
    m = ks[None, :, None, None]
    m1 = ks[None, None, :, None]
    n1 = ks[None, None, None, :]
    n = k - m
    m2 = m - m1
    n2 = n - n1
    mask = (
        (k != 0) & (m != 0) & (n != 0) & (m1 != 0) & (m2 != 0) & (n1 != 0) & (n2 != 0)
        & (np.abs(n) <= K) & (np.abs(m2) <= K) & (np.abs(n2) <= K)
    )
    shape = mask.shape
    idx = lambda q: np.clip(np.broadcast_to(q, shape), -K, K) + K  # noqa: E731
    return mask, idx(m2), idx(n), idx(n2), 3.0 * k * m * n, 3.0 * m * m1 * m2, 3.0 * n * n1 * n2


def _quadrilinear_closed(K: int, h: float, args: list[np.ndarray]) -> np.ndarray:
    mask, m2i, ni, n2i, omega, a_, b_ = _quad_tables(K)
    sa = np.where(mask, a_, 1.0)
    sb = np.where(mask, b_, 1.0)
    numerator = _E0(omega + a_ + b_, h) - _E0(omega + a_, h) - _E0(omega + b_, h) + _E0(omega, h)
    ks = np.arange(-K, K + 1)
    k = ks[:, None, None, None]
    m = ks[None, :, None, None]
    n = k - m
    W = (0.5j * k) * (0.5j * m) * (0.5j * n) * numerator / ((-1j * sa) * (-1j * sb))
    W = np.where(mask, W, 0)
    phi1, phi2, phi3, phi4 = args
    return np.sum(
        W * phi1[None, None, :, None] * phi2[m2i] * phi3[None, None, None, :] * phi4[n2i],
        axis=(1, 2, 3),
    )


# ============================================================================
# 公共算子
# ============================================================================

def xdot(sigma: float, phi1: SpectralState, phi2: SpectralState) -> SpectralState:
    """Ẋ_σ(φ1, φ2)"""
    K = _check_same_K(phi1, phi2)
    tab = _tables(K)
    W = np.where(tab.pair_mask, (0.5j * tab.ks[:, None]) * np.exp(-1j * tab.pair_omega * sigma), 0)
    return SpectralState(K, _apply_bilinear(tab, W, phi1.values, phi2.values), phi1.alpha)


def x_bullet(s: float, t: float, phi1: SpectralState, phi2: SpectralState) -> SpectralState:
    """X^•_{ts}(φ1, φ2)，时间积分闭式精确"""
    if t < s:
        raise ValueError("x_bullet needs t >= s")
    K = _check_same_K(phi1, phi2)
    tab = _tables(K)
    W = _bilinear_weights(tab, t - s)
    a = _rotate(phi1.values, K, s, 1)
    b = _rotate(phi2.values, K, s, 1)
    return SpectralState(K, _rotate(_apply_bilinear(tab, W, a, b), K, s, -1), phi1.alpha)


def x_level2(s: float, t: float, kind: str, *args: SpectralState, nodes: int | None = None) -> SpectralState:
    """
    X^{[•]}_{ts}(φ1,φ2,φ3) 或 X^{[••]}_{ts}(φ1,φ2,φ3,φ4)

    Args:
        kind: "[•]" 或 "[••]"
        nodes: 强制使用 Gauss–Legendre 的节点数（None 时按元组预算自动选择）

    Raises:
        ModeBudgetError: K 超出闭式预算
    """
    if t < s:
        raise ValueError("x_level2 needs t >= s")
    K = _check_same_K(*args)
    tab = _tables(K)
    rotated = [_rotate(a.values, K, s, 1) for a in args]
    h = t - s
    if kind == "[•]":
        if len(args) != 3:
            raise ValueError("X^[•] takes three arguments")
        out = _apply_trilinear(tab, _trilinear_weights(tab, h), *rotated)
    elif kind == "[••]":
        if len(args) != 4:
            raise ValueError("X^[••] takes four arguments")
        if nodes is None and (2 * K + 1) ** 4 <= CLOSED_FORM_TUPLES:
            out = _quadrilinear_closed(K, h, rotated)
        else:
            out = _quadrilinear_quadrature(K, h, rotated, nodes or DEFAULT_QUAD_NODES)
    else:
        raise ValueError(f"unknown operator kind {kind!r}")
    return SpectralState(K, _rotate(out, K, s, -1), args[0].alpha)


def _gauss_nodes(h: float, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(nodes)
    return 0.5 * h * (x + 1), 0.5 * h * w


def _quadrilinear_quadrature(K: int, h: float, args: list[np.ndarray], nodes: int) -> np.ndarray:
    tab = _tables(K)
    sigma, weights = _gauss_nodes(h, nodes)
    total = np.zeros(2 * K + 1, dtype=complex)
    for sg, w in zip(sigma, weights):
        W = _bilinear_weights(tab, sg)
        left = _apply_bilinear(tab, W, args[0], args[1])
        right = _apply_bilinear(tab, W, args[2], args[3])
        Wdot = np.where(tab.pair_mask, (0.5j * tab.ks[:, None]) * np.exp(-1j * tab.pair_omega * sg), 0)
        total += w * _apply_bilinear(tab, Wdot, left, right)
    return total


def x_chain(s: float, t: float, *args: SpectralState, nodes: int = DEFAULT_QUAD_NODES) -> SpectralState:
    """X^{[[•]]}_{ts}(φ1,φ2,φ3,φ4)，外层时间积分用 Gauss–Legendre"""
    if t < s:
        raise ValueError("x_chain needs t >= s")
    if len(args) != 4:
        raise ValueError("X^[[•]] takes four arguments")
    K = _check_same_K(*args)
    tab = _tables(K)
    rotated = [_rotate(a.values, K, s, 1) for a in args]
    sigma, weights = _gauss_nodes(t - s, nodes)
    total = np.zeros(2 * K + 1, dtype=complex)
    for sg, w in zip(sigma, weights):
        inner_val = _apply_trilinear(tab, _trilinear_weights(tab, sg), *rotated[:3])
        Wdot = np.where(tab.pair_mask, (0.5j * tab.ks[:, None]) * np.exp(-1j * tab.pair_omega * sg), 0)
        total += w * _apply_bilinear(tab, Wdot, inner_val, rotated[3])
    return SpectralState(K, _rotate(total, K, s, -1), args[0].alpha)


# ============================================================================
# 乘法关系与守恒恒等式
# ============================================================================

def level2_relation_residual(kind: str, s: float, u: float, t: float, *phis: SpectralState) -> float:
    """
    [•]:  δX^{[•]}_{tus}(φ1,φ2,φ3) = X^•_{tu}(X^•_{us}(φ1,φ2), φ3)
    [••]: δX^{[••]}_{tus} = X^{[•]}_{tu}(φ3,φ4,X^•_{us}(φ1,φ2)) + X^{[•]}_{tu}(φ1,φ2,X^•_{us}(φ3,φ4))
                           + X^•_{tu}(X^•_{us}(φ1,φ2), X^•_{us}(φ3,φ4))
    """
    if not s <= u <= t:
        raise ValueError("need s <= u <= t")
    delta = x_level2(s, t, kind, *phis) - x_level2(u, t, kind, *phis) - x_level2(s, u, kind, *phis)
    if kind == "[•]":
        phi1, phi2, phi3 = phis
        rhs = x_bullet(u, t, x_bullet(s, u, phi1, phi2), phi3)
    else:
        phi1, phi2, phi3, phi4 = phis
        a = x_bullet(s, u, phi1, phi2)
        b = x_bullet(s, u, phi3, phi4)
        rhs = x_level2(u, t, "[•]", phi3, phi4, a) + x_level2(u, t, "[•]", phi1, phi2, b) + x_bullet(u, t, a, b)
    return float(np.max(np.abs((delta - rhs).values)))


def chain_relation_residual(s: float, u: float, t: float, *phis: SpectralState, nodes: int = DEFAULT_QUAD_NODES) -> float:
    """δX^{[[•]]}_{tus} = X^{[•]}_{tu}(X^•_{us}(φ1,φ2), φ3, φ4) + X^•_{tu}(X^{[•]}_{us}(φ1,φ2,φ3), φ4)"""
    if not s <= u <= t:
        raise ValueError("need s <= u <= t")
    phi1, phi2, phi3, phi4 = phis
    delta = x_chain(s, t, *phis, nodes=nodes) - x_chain(u, t, *phis, nodes=nodes) - x_chain(s, u, *phis, nodes=nodes)
    rhs = (
        x_level2(u, t, "[•]", x_bullet(s, u, phi1, phi2), phi3, phi4)
        + x_bullet(u, t, x_level2(s, u, "[•]", phi1, phi2, phi3), phi4)
    )
    return float(np.max(np.abs((delta - rhs).values)))


def conservation1_residual(s: float, t: float, phi1: SpectralState, phi2: SpectralState, phi3: SpectralState) -> float:
    """|⟨φ1, X^•(φ2,φ3)⟩₀ + ⟨φ2, X^•(φ3,φ1)⟩₀ + ⟨φ3, X^•(φ1,φ2)⟩₀|"""
    total = (
        inner(phi1, x_bullet(s, t, phi2, phi3))
        + inner(phi2, x_bullet(s, t, phi3, phi1))
        + inner(phi3, x_bullet(s, t, phi1, phi2))
    )
    return abs(total)


def conservation1_basis_check(K: int, s: float, t: float) -> float:
    """对所有基向量三元组 (e_p, e_q, e_r) 取 conservation1 残差的最大值"""
    modes = [k for k in range(-K, K + 1) if k != 0]
    basis = {k: SpectralState.basis(K, k) for k in modes}
    worst = 0.0
    for p in modes:
        for q in modes:
            for r in modes:
                worst = max(worst, conservation1_residual(s, t, basis[p], basis[q], basis[r]))
    return worst


def conservation2_residual(s: float, t: float, phi: SpectralState, weight: float = KDV_SECOND_ORDER_WEIGHT) -> float:
    """
    |2⟨φ, X²(φ,φ,φ)⟩₀ + ⟨X^•(φ,φ), X^•(φ,φ)⟩₀|，X² = weight·X^{[•]}

    weight = 2 时恒为零；weight = 1 时残差为 ½⟨X^•,X^•⟩₀。
    """
    xb = x_bullet(s, t, phi, phi)
    x2 = x_level2(s, t, "[•]", phi, phi, phi) * weight
    return abs(2 * inner(phi, x2) + inner(xb, xb))


# ============================================================================
# 时间推进
# ============================================================================

class _StepKernel:
    """固定步长 h 的 X^• 与 X^{[•]} 权重，按时间平移复用"""

    def __init__(self, K: int, h: float):
        self.K = K
        self.h = h
        self.tab = _tables(K)
        self.W1 = _bilinear_weights(self.tab, h)
        self.W2 = _trilinear_weights(self.tab, h)

    def step(self, v: np.ndarray, s: float) -> np.ndarray:
        r = _rotate(v, self.K, s, 1)
        incr = _apply_bilinear(self.tab, self.W1, r, r)
        incr = incr + KDV_SECOND_ORDER_WEIGHT * _apply_trilinear(self.tab, self.W2, r, r, r)
        return v + _rotate(incr, self.K, s, -1)


def kdv_tree_step(v: SpectralState, s: float, t: float) -> SpectralState:
    """v ↦ v + X^•_{ts}(v,v) + 2·X^{[•]}_{ts}(v,v,v)"""
    if t < s:
        raise ValueError("kdv_tree_step needs t >= s")
    kernel = _StepKernel(v.K, t - s)
    return SpectralState(v.K, kernel.step(v.values, s), v.alpha)


@dataclass(frozen=True, eq=False)
class KdvTrajectory:
    """时间推进结果与不变量记录"""

    times: np.ndarray
    states: np.ndarray
    K: int
    alpha: float
    method: str

    def state(self, i: int) -> SpectralState:
        return SpectralState(self.K, self.states[i], self.alpha)

    @property
    def final(self) -> SpectralState:
        return self.state(len(self.times) - 1)

    def invariant(self, alpha: float = 0.0) -> np.ndarray:
        return np.array([self.state(i).H(alpha) for i in range(len(self.times))])

    def relative_drift(self) -> float:
        """|H₀(T) − H₀(0)| / H₀(0)"""
        H0 = self.invariant(0.0)
        return float(abs(H0[-1] - H0[0]) / H0[0]) if H0[0] > 0 else float(abs(H0[-1]))

    def to_csv(self, filepath):
        """step, time, H0, Halpha, |v(k)|（k = 1..K）"""
        H0 = self.invariant(0.0)
        Ha = self.invariant(self.alpha)
        header = ["step", "time", "H0", "Halpha"] + [f"abs_v{k}" for k in range(1, self.K + 1)]
        rows = []
        for i, t in enumerate(self.times):
            amps = np.abs(self.states[i, self.K + 1:])
            rows.append([i, float(t), float(H0[i]), float(Ha[i])] + [float(a) for a in amps])
        write_csv(filepath, header, rows)

    def manifest(self, **params) -> dict:
        return {
            "version": VERSION,
            "method": self.method,
            "K": self.K,
            "alpha": self.alpha,
            "steps": len(self.times) - 1,
            "T": float(self.times[-1]),
            "second_order_weight": KDV_SECOND_ORDER_WEIGHT,
            "H0_relative_drift": self.relative_drift(),
        } | params

    def write_manifest(self, filepath, **params):
        write_json(filepath, self.manifest(**params))


def _check_finite(values: np.ndarray, step: int, time: float, limit: float):
    norm = float(np.sqrt(np.sum(np.abs(values) ** 2)))
    if not np.isfinite(norm) or norm > limit:
        raise BlowUpError(step, time, norm)


def kdv_solve(v0: SpectralState, T: float, steps: int, blowup: float = BLOWUP_FACTOR) -> KdvTrajectory:
    """
    在 [0, T] 上重复 kdv_tree_step

    Raises:
        BlowUpError: 范数非有限或超过 blowup 倍初值
    """
    if steps < 1:
        raise ValueError("steps must be positive")
    h = T / steps
    kernel = _StepKernel(v0.K, h)
    limit = blowup * max(v0.norm(0.0), 1.0)
    states = np.empty((steps + 1, 2 * v0.K + 1), dtype=complex)
    states[0] = v0.values
    times = np.linspace(0.0, T, steps + 1)
    for i in range(steps):
        states[i + 1] = kernel.step(states[i], times[i])
        _check_finite(states[i + 1], i + 1, times[i + 1], limit)
    logger.debug(f"kdv tree scheme: K={v0.K}, steps={steps}, h={h:.3e}")
    return KdvTrajectory(times, states, v0.K, v0.alpha, "tree")


def rk4_reference(v0: SpectralState, T: float, steps: int, linear_only: bool = False) -> KdvTrajectory:
    """
    截断系统 dv/dt = Ẋ_t(v, v) 的经典 RK4

    linear_only=True 时去掉非线性项（相互作用表象下为恒等演化）。
    """
    if steps < 1:
        raise ValueError("steps must be positive")
    K = v0.K
    tab = _tables(K)
    h = T / steps

    def rhs(t, v):
        if linear_only:
            return np.zeros_like(v)
        W = np.where(tab.pair_mask, (0.5j * tab.ks[:, None]) * np.exp(-1j * tab.pair_omega * t), 0)
        return _apply_bilinear(tab, W, v, v)

    states = np.empty((steps + 1, 2 * K + 1), dtype=complex)
    states[0] = v0.values
    times = np.linspace(0.0, T, steps + 1)
    for i in range(steps):
        t, v = times[i], states[i]
        k1 = rhs(t, v)
        k2 = rhs(t + h / 2, v + h / 2 * k1)
        k3 = rhs(t + h / 2, v + h / 2 * k2)
        k4 = rhs(t + h, v + h * k3)
        states[i + 1] = v + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        _check_finite(states[i + 1], i + 1, times[i + 1], BLOWUP_FACTOR * max(v0.norm(0.0), 1.0))
    return KdvTrajectory(times, states, K, v0.alpha, "rk4")


def sup_mode_error(a: KdvTrajectory, b: KdvTrajectory) -> float:
    """两条轨迹终态的最大模式误差"""
    return float(np.max(np.abs(a.states[-1] - b.states[-1])))


def self_convergence_order(v0: SpectralState, T: float, steps=(50, 100, 200), reference_steps: int | None = None) -> float:
    """树格式相对细步长参考解的误差斜率（对步长）"""
    ref_steps = reference_steps or 8 * max(steps)
    reference = kdv_solve(v0, T, ref_steps)
    errors = [sup_mode_error(kdv_solve(v0, T, n), reference) for n in steps]
    return fit_loglog_slope([T / n for n in steps], errors)


def fit_bullet_bound(
    gammas,
    K: int = 16,
    alpha: float = 0.0,
    samples: int = 16,
    spans=(0.2, 0.1, 0.05, 0.025, 0.0125),
    rng: np.random.Generator | None = None,
) -> dict[float, float]:
    """
    |X^•_{ts}(φ,φ)|_α ≤ C (t−s)^γ |φ|_α² 的经验常数 C

    随机 φ 归一化到 |φ|_α = 1，C 取所有样本与跨度上的最大比值。纯报告。
    """
    rng = rng or np.random.default_rng(0)
    states = []
    for _ in range(samples):
        phi = random_state(K, rng, alpha)
        states.append(phi * (1.0 / phi.norm(alpha)))
    out = {}
    for gamma in gammas:
        worst = 0.0
        for phi in states:
            for h in spans:
                value = x_bullet(0.0, h, phi, phi).norm(alpha)
                worst = max(worst, value / h ** gamma)
        out[float(gamma)] = worst
    return out
