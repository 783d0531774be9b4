"""
离散增量复形 (C_*, δ)

包含:
- Grid: 严格递增的时间网格 t_0 < … < t_N
- Inc1 / Inc2 / Inc3: 网格点、有序点对、有序三元组上的取值（稠密数组）
- CupSum: 由 Inc2 杯积组合而成的惰性 3-增量（不物化 O(N³) 数组）
- delta1 / delta2 / delta3_sample: 上边缘算子
- holder_norm / holder_exponent: Hölder 范数与指数估计
- cup: 共享中间时间的乘积 gh

索引约定: Inc2.values[i, j] = a_{t_i t_j}（先 t 后 s）；Inc3.values[i, k, j] = b_{t_i t_k t_j}。
"""

import itertools
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from exceptions import GridMismatchError, ResourceCapError
from utils import inc2_max_n, inc3_max_n, write_csv


# ============================================================================
# 网格
# ============================================================================

class Grid:
    """严格递增的时间网格，构造后只读"""

    __slots__ = ("_times",)

    def __init__(self, times):
        arr = np.array(times, dtype=float)
        if arr.ndim != 1 or arr.size < 2:
            raise ValueError("grid needs at least two time points")
        if not np.all(np.diff(arr) > 0):
            raise ValueError("grid times must be strictly increasing")
        arr.setflags(write=False)
        self._times = arr

    @classmethod
    def uniform(cls, N: int, T: float = 1.0) -> "Grid":
        """[0, T] 上的 N 等分网格"""
        if N < 1:
            raise ValueError("N must be at least 1")
        return cls(np.linspace(0.0, T, N + 1))

    @classmethod
    def dyadic(cls, level: int, T: float = 1.0) -> "Grid":
        """2^level 等分网格"""
        return cls.uniform(2 ** level, T)

    @property
    def times(self) -> np.ndarray:
        return self._times

    @property
    def N(self) -> int:
        return self._times.size - 1

    @property
    def T(self) -> float:
        return float(self._times[-1])

    def __len__(self) -> int:
        return self._times.size

    def __eq__(self, other) -> bool:
        return isinstance(other, Grid) and np.array_equal(self._times, other._times)

    def __hash__(self) -> int:
        return hash(self._times.tobytes())

    def __repr__(self) -> str:
        return f"Grid(N={self.N}, T={self.T})"

    def refine(self, factor: int) -> "Grid":
        """每个子区间等分为 factor 段"""
        if factor < 1:
            raise ValueError("refinement factor must be >= 1")
        if factor == 1:
            return self
        t = self._times
        theta = np.arange(factor) / factor
        fine = (t[:-1, None] + theta[None, :] * np.diff(t)[:, None]).ravel()
        return Grid(np.append(fine, t[-1]))

    def coarsen(self, factor: int) -> "Grid":
        """取每 factor 个点"""
        if self.N % factor:
            raise ValueError(f"N={self.N} is not divisible by {factor}")
        return Grid(self._times[::factor])


def _check_same_grid(operation: str, *items):
    grid = items[0].grid
    for item in items[1:]:
        if item.grid != grid:
            raise GridMismatchError(operation, f"{grid!r} vs {item.grid!r}")
    return grid


# ============================================================================
# 增量
# ============================================================================

@dataclass(frozen=True, eq=False)
class _Increment:
    grid: Grid
    values: np.ndarray = field(repr=False)

    order = 0

    def __post_init__(self):
        raw = np.asarray(self.values)
        arr = np.array(raw, dtype=np.result_type(raw.dtype, np.float64), copy=True)
        size = len(self.grid)
        if arr.shape[:self.order] != (size,) * self.order:
            raise GridMismatchError(
                type(self).__name__,
                f"values shape {arr.shape} does not match grid of {size} points",
            )
        self._normalize(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def _normalize(self, arr: np.ndarray):
        pass

    @property
    def value_shape(self) -> tuple[int, ...]:
        return self.values.shape[self.order:]

    def _binary(self, other, op, name):
        _check_same_grid(name, self, other)
        return type(self)(self.grid, op(self.values, other.values))

    def __add__(self, other):
        return self._binary(other, np.add, "add")

    def __sub__(self, other):
        return self._binary(other, np.subtract, "sub")

    def __neg__(self):
        return type(self)(self.grid, -self.values)

    def __mul__(self, scalar):
        return type(self)(self.grid, self.values * scalar)

    __rmul__ = __mul__

    def component(self, *index) -> "_Increment":
        """取值空间中的一个分量（得到标量增量）"""
        sl = (slice(None),) * self.order + tuple(index)
        return type(self)(self.grid, self.values[sl])


class Inc1(_Increment):
    """1-增量: 网格点上的取值 f_{t_i}"""

    order = 1

    def to_csv(self, filepath):
        comps = self.values.reshape(len(self.grid), -1)
        header, cols = _component_columns(comps)
        rows = [[i, self.grid.times[i]] + cols(i) for i in range(len(self.grid))]
        write_csv(filepath, ["index", "time"] + header, rows)


class Inc2(_Increment):
    """2-增量: 有序点对上的取值 a_{t_i t_j}，对角线为零"""

    order = 2

    def __post_init__(self):
        if self.grid.N > inc2_max_n():
            raise ResourceCapError("inc2_grid", inc2_max_n(), self.grid.N)
        super().__post_init__()

    def _normalize(self, arr):
        idx = np.arange(arr.shape[0])
        arr[idx, idx] = 0

    def step(self) -> np.ndarray:
        """相邻点增量 a_{t_{i+1} t_i}，形状 (N, *value_shape)"""
        idx = np.arange(self.grid.N)
        return self.values[idx + 1, idx]

    def to_csv(self, filepath):
        n = len(self.grid)
        comps = self.values.reshape(n, n, -1)
        header, _ = _component_columns(comps[0])
        rows = []
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                rows.append([i, j, self.grid.times[i], self.grid.times[j]] + _cells(comps[i, j]))
        write_csv(filepath, ["i", "j", "t", "s"] + header, rows)


class Inc3(_Increment):
    """3-增量: 有序三元组上的取值 b_{t u s}，相邻时间相同时为零"""

    order = 3

    def __post_init__(self):
        if self.grid.N > inc3_max_n():
            raise ResourceCapError("inc3_grid", inc3_max_n(), self.grid.N)
        super().__post_init__()

    def _normalize(self, arr):
        idx = np.arange(arr.shape[0])
        arr[idx, idx, :] = 0
        arr[:, idx, idx] = 0

    def take(self, i, k, j) -> np.ndarray:
        return self.values[i, k, j]

    def fix_last(self, j: int) -> np.ndarray:
        return self.values[:, :, j]


def _cells(vec) -> list:
    vec = np.asarray(vec).ravel()
    if np.iscomplexobj(vec):
        out = []
        for z in vec:
            out.extend([float(z.real), float(z.imag)])
        return out
    return [float(x) for x in vec]


def _component_columns(comps: np.ndarray):
    width = comps.shape[-1]
    if np.iscomplexobj(comps):
        header = [name for c in range(width) for name in (f"re{c}", f"im{c}")]
    else:
        header = [f"c{c}" for c in range(width)]
    return header, lambda i: _cells(comps[i])


# ============================================================================
# 惰性 3-增量
# ============================================================================

class Inc3Like(Protocol):
    """缝合映射只需要的 3-增量接口"""

    grid: Grid

    def take(self, i, k, j) -> np.ndarray: ...

    def fix_last(self, j: int) -> np.ndarray: ...


@dataclass(frozen=True)
class CupTerm:
    """
    coeff · (left ⊙ right)_{tus} = coeff · left_{tu} ⊙ right_{us}

    subscripts 只写取值维度，例如 "bc,a->abc"；标量增量写 ",->"。
    """

    left: Inc2
    right: Inc2
    subscripts: str = ",->"
    coeff: float = 1.0


class CupSum:
    """
    若干杯积之和 h = Σ coeff·(g ⊙ h′)

    不物化 O(N³) 数组: fix_last(j) 只需 O(N²)，take 按样本计算。
    """

    def __init__(self, terms: list[CupTerm]):
        if not terms:
            raise ValueError("CupSum needs at least one term")
        self.grid = _check_same_grid("cup_sum", *[t.left for t in terms], *[t.right for t in terms])
        self.terms = list(terms)

    @staticmethod
    def _split(subscripts: str) -> tuple[str, str, str]:
        lhs, out = subscripts.split("->")
        left, right = lhs.split(",")
        return left, right, out

    def take(self, i, k, j) -> np.ndarray:
        total = None
        for term in self.terms:
            left, right, out = self._split(term.subscripts)
            value = term.coeff * np.einsum(
                f"Z{left},Z{right}->Z{out}",
                term.left.values[i, k], term.right.values[k, j],
            )
            total = value if total is None else total + value
        return total

    def fix_last(self, j: int) -> np.ndarray:
        total = None
        for term in self.terms:
            left, right, out = self._split(term.subscripts)
            value = term.coeff * np.einsum(
                f"TS{left},S{right}->TS{out}",
                term.left.values, term.right.values[:, j],
            )
            total = value if total is None else total + value
        return total

    def materialize(self) -> Inc3:
        n = len(self.grid)
        i, k, j = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
        vals = self.take(i.ravel(), k.ravel(), j.ravel())
        return Inc3(self.grid, vals.reshape((n, n, n) + vals.shape[1:]))


# ============================================================================
# 上边缘算子
# ============================================================================

def delta1(f: Inc1) -> Inc2:
    """(δf)_{ts} = f_t − f_s"""
    v = f.values
    return Inc2(f.grid, v[:, None] - v[None, :])


def delta2(a: Inc2) -> Inc3:
    """(δa)_{tus} = a_{ts} − a_{tu} − a_{us}"""
    v = a.values
    return Inc3(a.grid, v[:, None, :] - v[:, :, None] - v[None, :, :])


def delta2_take(a: Inc2, i, k, j) -> np.ndarray:
    """δa 在采样三元组 (t_i, t_k, t_j) 上的值，不物化 Inc3"""
    v = a.values
    return v[i, j] - v[i, k] - v[k, j]


def delta3_sample(h: Inc3Like, i, k, m, j) -> np.ndarray:
    """
    (δh)_{t1 t2 t3 t4} = −h_{t2t3t4} + h_{t1t3t4} − h_{t1t2t4} + h_{t1t2t3}

    在采样四元组上求值。
    """
    return -h.take(k, m, j) + h.take(i, m, j) - h.take(i, k, j) + h.take(i, k, m)


def sample_ordered(grid: Grid, arity: int, count: int, rng: np.random.Generator) -> tuple[np.ndarray, ...]:
    """
    采样严格递减的下标元组 (i1 > i2 > … )

    总数不超过 count 时返回全部组合。
    """
    n = len(grid)
    total = _binomial(n, arity)
    if total <= count:
        combos = np.array(list(itertools.combinations(range(n - 1, -1, -1), arity)), dtype=int)
        return tuple(combos[:, c] for c in range(arity))
    draws = rng.integers(0, n, size=(count * 2, arity))
    draws = -np.sort(-draws, axis=1)
    distinct = np.all(np.diff(draws, axis=1) < 0, axis=1)
    draws = draws[distinct][:count]
    return tuple(draws[:, c] for c in range(arity))


def _binomial(n: int, k: int) -> int:
    from math import comb
    return comb(n, k)


# ============================================================================
# Hölder 范数
# ============================================================================

def _magnitude(values: np.ndarray, order: int) -> np.ndarray:
    if values.ndim == order:
        return np.abs(values)
    axes = tuple(range(order, values.ndim))
    return np.sqrt(np.sum(np.abs(values) ** 2, axis=axes))


def holder_norm(a: Inc2 | Inc3, gamma: float) -> float:
    """
    ‖a‖_γ = max |a_{ts}| / (t−s)^γ（Inc3 取 s<u<t 并用外侧时间）

    取值为向量时使用欧氏范数。
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    t = a.grid.times
    if isinstance(a, Inc2):
        mag = _magnitude(a.values, 2)
        i, j = np.tril_indices(len(t), k=-1)
        return float(np.max(mag[i, j] / (t[i] - t[j]) ** gamma))
    mag = _magnitude(a.values, 3)
    n = len(t)
    idx = np.arange(n)
    mask = (idx[:, None, None] > idx[None, :, None]) & (idx[None, :, None] > idx[None, None, :])
    if not mask.any():
        return 0.0
    span = (t[:, None, None] - t[None, None, :]) * np.ones((1, n, 1))
    return float(np.max(mag[mask] / span[mask] ** gamma))


def holder_exponent(a: Inc2, lags=None, floor: float = 1e-13) -> float:
    """
    由 log max_i |a_{t_{i+L} t_i}| 对 log(平均间隔) 的斜率估计 Hölder 指数

    所有尺度上的值都低于 floor 时返回 inf（余项在舍入误差以内）。
    """
    from utils import fit_loglog_slope

    n = a.grid.N
    if lags is None:
        lags = [2 ** p for p in range(0, max(1, int(np.log2(n))) - 1)]
    t = a.grid.times
    mag = _magnitude(a.values, 2)
    spans, maxima = [], []
    for L in lags:
        if L >= n:
            continue
        idx = np.arange(n + 1 - L)
        spans.append(float(np.mean(t[idx + L] - t[idx])))
        maxima.append(float(np.max(mag[idx + L, idx])))
    if len(spans) < 2:
        raise ValueError("need at least two usable lags")
    maxima = np.asarray(maxima)
    if np.all(maxima < floor):
        return float("inf")
    return fit_loglog_slope(spans, np.maximum(maxima, floor))


# ============================================================================
# 杯积
# ============================================================================

def _letters(count: int, offset: int = 0) -> str:
    return "abcdefghijklmnopqrxyvw"[offset:offset + count]


def _product_subscripts(g_dims: int, h_dims: int, outer: bool) -> tuple[str, str, str]:
    if outer:
        gl = _letters(g_dims)
        hl = _letters(h_dims, g_dims)
        return gl, hl, gl + hl
    if g_dims and h_dims and g_dims != h_dims:
        raise GridMismatchError("cup", "elementwise product needs equal value ranks")
    gl = _letters(g_dims)
    hl = _letters(h_dims)
    return gl, hl, gl if len(gl) >= len(hl) else hl


def cup(g: Inc1 | Inc2, h: Inc1 | Inc2, outer: bool = False) -> Inc2 | Inc3:
    """
    (gh)_{t1…} = g_{t1…tn} h_{tn…}，共享中间时间

    支持 (1,2)、(2,1)、(2,2) 形状；取值默认逐分量相乘，outer=True 时为张量积。

    Raises:
        GridMismatchError: 网格不同或取值维度不兼容
    """
    _check_same_grid("cup", g, h)
    gl, hl, out = _product_subscripts(len(g.value_shape), len(h.value_shape), outer)
    if g.value_shape and h.value_shape and not outer and g.value_shape != h.value_shape:
        raise GridMismatchError("cup", f"value shapes {g.value_shape} vs {h.value_shape}")
    if isinstance(g, Inc1) and isinstance(h, Inc2):
        return Inc2(g.grid, np.einsum(f"T{gl},TS{hl}->TS{out}", g.values, h.values))
    if isinstance(g, Inc2) and isinstance(h, Inc1):
        return Inc2(g.grid, np.einsum(f"TS{gl},S{hl}->TS{out}", g.values, h.values))
    if isinstance(g, Inc2) and isinstance(h, Inc2):
        return Inc3(g.grid, np.einsum(f"TU{gl},US{hl}->TUS{out}", g.values, h.values))
    raise TypeError(f"cup not implemented for {type(g).__name__} x {type(h).__name__}")
