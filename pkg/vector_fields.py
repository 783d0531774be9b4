"""
光滑被积对象: 一形式、向量场族与标量函数

所有导数都是精确的（用户给出，或由 sympy 符号求导生成）；
有限差分只用于一致性探针检查。

张量布局:
- OneForm.value(x)[i, a]        = φ^i_a(x)
- OneForm.derivative(x)[i, a, b] = ∂_b φ^i_a(x)
- VectorFieldSet.derivative(a, k, y)[i, b1, …, bk] = ∂_{b1}…∂_{bk} f^i_a(y)
"""

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import sympy

from exceptions import InsufficientDerivativeError


def _lambdify_array(symbols, array) -> Callable[[np.ndarray], np.ndarray]:
    fn = sympy.lambdify(symbols, array.tolist(), modules="numpy")
    shape = array.shape

    def evaluate(point):
        out = np.array(fn(*np.asarray(point, dtype=float)), dtype=float)
        return out.reshape(shape)

    return evaluate


def _derivative_arrays(exprs: sympy.Array, symbols, order: int) -> list[sympy.Array]:
    """
    逐阶求导；返回列表第 k 项形状为 exprs.shape + (n,)*k，输出指标在前
    """
    arrays = [exprs]
    current = exprs
    rank = len(exprs.shape)
    for _ in range(order):
        # derive_by_array 把新的求导指标放在最前面，移到最后
        derived = sympy.derive_by_array(current, symbols)
        perm = list(range(1, len(derived.shape))) + [0]
        current = sympy.permutedims(derived, perm)
        arrays.append(current)
    assert all(len(a.shape) == rank + k for k, a in enumerate(arrays))
    return arrays


# ============================================================================
# 一形式
# ============================================================================

@dataclass(frozen=True)
class OneForm:
    """
    一形式 φ: R^d → R^{m×d}，附带一阶导数

    Attributes:
        value: x ↦ φ(x)，形状 (m, d)
        derivative: x ↦ ∂φ(x)，形状 (m, d, d)
    """

    value: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    m: int
    d: int

    @classmethod
    def from_sympy(cls, exprs, symbols: Sequence[sympy.Symbol]) -> "OneForm":
        """由 m×d 的 sympy 表达式矩阵生成"""
        arr = sympy.Array(sympy.Matrix(exprs))
        m, d = arr.shape
        if d != len(symbols):
            raise ValueError("one-form needs one column per path coordinate")
        value, first = _derivative_arrays(arr, symbols, 1)
        return cls(
            value=_lambdify_array(symbols, value),
            derivative=_lambdify_array(symbols, first),
            m=m,
            d=d,
        )

    def __add__(self, other: "OneForm") -> "OneForm":
        return OneForm(
            value=lambda x: self.value(x) + other.value(x),
            derivative=lambda x: self.derivative(x) + other.derivative(x),
            m=self.m,
            d=self.d,
        )

    def scale(self, c: float) -> "OneForm":
        return OneForm(
            value=lambda x: c * self.value(x),
            derivative=lambda x: c * self.derivative(x),
            m=self.m,
            d=self.d,
        )

    def derivative_consistency(self, points: np.ndarray, eps: float = 1e-6) -> float:
        """中心差分与给定导数的最大偏差"""
        worst = 0.0
        for x in np.atleast_2d(points):
            exact = self.derivative(x)
            for b in range(self.d):
                step = np.zeros(self.d)
                step[b] = eps
                fd = (self.value(x + step) - self.value(x - step)) / (2 * eps)
                worst = max(worst, float(np.max(np.abs(fd - exact[:, :, b]))))
        return worst


# ============================================================================
# 标量函数（受控路径 h = ψ(x)）
# ============================================================================

@dataclass(frozen=True)
class SmoothFunction:
    """ψ: R^d → R，附带梯度与 Hessian"""

    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    hessian: Callable[[np.ndarray], np.ndarray]
    d: int

    @classmethod
    def from_sympy(cls, expr, symbols: Sequence[sympy.Symbol]) -> "SmoothFunction":
        arr = sympy.Array([expr])
        value, grad, hess = _derivative_arrays(arr, symbols, 2)
        v, g, h = (_lambdify_array(symbols, a) for a in (value, grad, hess))
        return cls(
            value=lambda x: float(v(x)[0]),
            gradient=lambda x: g(x)[0],
            hessian=lambda x: h(x)[0],
            d=len(symbols),
        )


# ============================================================================
# 向量场族
# ============================================================================

class VectorFieldSet:
    """
    向量场族 {f_a}_{a<d}，f_a: R^n → R^n，导数给到 order 阶

    derivative(a, k, y) 返回 f_{a;b1…bk}(y)，形状 (n,)+(n,)*k。
    """

    def __init__(self, derivatives: Sequence[Sequence[Callable]], n: int, order: int):
        self._derivatives = [list(ds) for ds in derivatives]
        self.n = n
        self.d = len(self._derivatives)
        self.order = order
        for ds in self._derivatives:
            if len(ds) < order + 1:
                raise ValueError("each field needs derivative evaluators up to the declared order")

    def __call__(self, a: int, y) -> np.ndarray:
        return self.derivative(a, 0, y)

    def derivative(self, a: int, k: int, y) -> np.ndarray:
        if k > self.order:
            raise InsufficientDerivativeError(k, self.order)
        return np.asarray(self._derivatives[a][k](np.asarray(y, dtype=float)), dtype=float)

    def davie_correction(self, y) -> np.ndarray:
        """M[:, c, a] = Σ_b ∂_b f_a · f^b_c，形状 (n, d, d)"""
        y = np.asarray(y, dtype=float)
        values = np.stack([self.derivative(c, 0, y) for c in range(self.d)], axis=1)  # (n, d)
        out = np.empty((self.n, self.d, self.d))
        for a in range(self.d):
            jac = self.derivative(a, 1, y)  # (n, n)
            out[:, :, a] = jac @ values
        return out

    # ------------------------------------------------------------------------
    # 构造器
    # ------------------------------------------------------------------------

    @classmethod
    def from_sympy(cls, fields, symbols: Sequence[sympy.Symbol], order: int) -> "VectorFieldSet":
        """
        多项式（或任意光滑）向量场的符号构造

        Args:
            fields: d 个长度为 n 的表达式列表
            symbols: n 个状态变量
            order: 生成的最高导数阶
        """
        derivs = []
        for f in fields:
            arr = sympy.Array(list(f))
            if arr.shape != (len(symbols),):
                raise ValueError("each field must have one component per state variable")
            derivs.append([_lambdify_array(symbols, a) for a in _derivative_arrays(arr, symbols, order)])
        return cls(derivs, n=len(symbols), order=order)

    @classmethod
    def linear(cls, matrices, order: int = 8) -> "VectorFieldSet":
        """f_a(y) = F_a y"""
        mats = np.asarray(matrices, dtype=float)
        d, n, _ = mats.shape
        derivs = []
        for a in range(d):
            F = mats[a]
            ds = [lambda y, F=F: F @ y, lambda y, F=F: F.copy()]
            for k in range(2, order + 1):
                ds.append(lambda y, k=k: np.zeros((n,) * (k + 1)))
            derivs.append(ds[:order + 1])
        return cls(derivs, n=n, order=order)

    @classmethod
    def constant(cls, vectors, order: int = 8) -> "VectorFieldSet":
        """f_a(y) = c_a"""
        vecs = np.asarray(vectors, dtype=float)
        d, n = vecs.shape
        derivs = []
        for a in range(d):
            c = vecs[a]
            ds = [lambda y, c=c: c.copy()]
            for k in range(1, order + 1):
                ds.append(lambda y, k=k: np.zeros((n,) * (k + 1)))
            derivs.append(ds)
        return cls(derivs, n=n, order=order)

    # ------------------------------------------------------------------------
    # 探针检查
    # ------------------------------------------------------------------------

    def symmetry_defect(self, points: np.ndarray) -> float:
        """混合偏导在指标置换下的最大不对称量"""
        worst = 0.0
        for y in np.atleast_2d(points):
            for a in range(self.d):
                for k in range(2, self.order + 1):
                    tensor = self.derivative(a, k, y)
                    for perm in itertools.permutations(range(1, k + 1)):
                        permuted = np.transpose(tensor, (0,) + perm)
                        worst = max(worst, float(np.max(np.abs(permuted - tensor))))
        return worst
