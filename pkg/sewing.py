"""
缝合映射 Λ 与投影 (1 − Λδ) 的网格实现

- sew_limit: 最细划分上的补偿和，结果恰为某个 1-增量的 δ
- sewing_map: 由闭 3-增量 h 构造 Λh = B − sew_limit(B)，其中 B_{ts} = −h_{t,s,t_0}
- project_exact: a = δf + r 分解
"""

from dataclasses import dataclass

import numpy as np

from exceptions import NotClosedError
from increments import Inc1, Inc2, Inc3Like, delta1, delta3_sample, holder_norm, sample_ordered
from logging_config import get_logger
from utils import make_rng

logger = get_logger(__name__)

# 闭性检查默认参数
CLOSED_TOL = 1e-10
CLOSED_SAMPLES = 100_000
# 相对容差的尺度下限
CLOSED_SCALE_FLOOR = float(np.finfo(float).eps)


def prefix_sum(a: Inc2) -> Inc1:
    """F_k = Σ_{i<k} a_{t_{i+1} t_i}，F_0 = 0"""
    steps = a.step()
    zero = np.zeros((1,) + steps.shape[1:], dtype=steps.dtype)
    return Inc1(a.grid, np.concatenate([zero, np.cumsum(steps, axis=0)]))


def sew_limit(a: Inc2) -> Inc2:
    """
    (sew_limit a)_{ts} = Σ_i a_{t_{i+1} t_i}（[s,t] 的最细划分）

    补偿黎曼和极限在网格上的实现；结果是精确增量。
    """
    return delta1(prefix_sum(a))


def closedness_defect(
    h: Inc3Like,
    samples: int = CLOSED_SAMPLES,
    rng: np.random.Generator | None = None,
) -> tuple[float, float]:
    """
    在采样四元组上估计 δh

    Returns:
        (max |δh|, max |h| 在同一批样本上)
    """
    rng = rng or make_rng()
    i, k, m, j = sample_ordered(h.grid, 4, samples, rng)
    if i.size == 0:
        return 0.0, 0.0
    defect = np.abs(delta3_sample(h, i, k, m, j))
    scale = np.abs(h.take(i, k, j))
    return float(np.max(defect)), float(np.max(scale))


def sewing_map(
    h: Inc3Like,
    tol: float = CLOSED_TOL,
    check: bool = True,
    samples: int = CLOSED_SAMPLES,
    rng: np.random.Generator | None = None,
) -> Inc2:
    """
    缝合映射 Λ: 满足 δ(Λh) = h 且 sew_limit(Λh) = 0

    Args:
        h: δ-闭的 3-增量（稠密 Inc3 或惰性 CupSum）
        tol: 相对闭性容差
        check: 是否先做闭性检查

    Raises:
        NotClosedError: δh 超出容差
    """
    if check:
        defect, scale = closedness_defect(h, samples, rng)
        allowed = tol * max(scale, CLOSED_SCALE_FLOOR)
        if defect > allowed:
            raise NotClosedError(defect, allowed)
        logger.debug(f"closedness defect {defect:.3e} (allowed {allowed:.3e})")
    B = Inc2(h.grid, -h.fix_last(0))
    return B - sew_limit(B)


@dataclass(frozen=True)
class ProjectionResult:
    """a = δf + r"""

    f: Inc1
    remainder: Inc2
    remainder_norm: float | None = None


def project_exact(a: Inc2, gamma: float | None = None) -> ProjectionResult:
    """
    分解 a = δf + r，其中 δf = sew_limit(a)，r = a − δf

    gamma 给定时同时报告 ‖r‖_γ。
    """
    f = prefix_sum(a)
    r = a - delta1(f)
    norm = holder_norm(r, gamma) if gamma is not None else None
    return ProjectionResult(f=f, remainder=r, remainder_norm=norm)
