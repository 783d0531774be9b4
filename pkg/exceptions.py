"""
roughtrees 自定义异常模块

提供统一的异常处理和错误传播机制。

异常层级:
- RoughTreesError (基础异常)
  ├── ResourceCapError      (枚举/网格/模式数超出上限)
  ├── ConfigError           (实验配置)
  ├── AlgebraError          (树与 Hopf 代数)
  │   └── SingularExponentError
  ├── IncrementError        (增量复形)
  │   └── GridMismatchError
  ├── SewingError           (缝合映射)
  │   └── NotClosedError
  ├── RoughPathError        (粗糙路径 / RDE)
  │   ├── MissingLevelError
  │   ├── InsufficientDerivativeError
  │   └── NonFiniteStateError
  └── KdvError              (谱 KdV)
      ├── BlowUpError
      └── ModeBudgetError
"""


class RoughTreesError(Exception):
    """
    roughtrees 基础异常类

    所有自定义异常的基类，便于统一捕获和处理。

    Attributes:
        message: 错误消息
        context: 错误上下文信息 (可选)
    """

    def __init__(self, message: str, context: dict | None = None):
        self.message = message
        self.context = context or {}
        super().__init__(self.message)

    def __str__(self) -> str:
        if self.context:
            context_str = ", ".join(f"{k}={v}" for k, v in self.context.items())
            return f"{self.message} [{context_str}]"
        return self.message


# ============================================================================
# 资源与配置
# ============================================================================

class ResourceCapError(RoughTreesError):
    """
    资源上限错误

    当请求的规模超过配置的上限时抛出。

    Examples:
        - 树枚举数量超过 ROUGHTREES_ENUM_CAP
        - Inc3 物化时网格点数超过 ROUGHTREES_INC3_MAX_N
        - 多重指标求和 n^k 超过 10^4
    """

    def __init__(self, resource: str, limit: int, requested: int, context: dict | None = None):
        ctx = context or {}
        ctx["resource"] = resource
        ctx["limit"] = limit
        super().__init__(
            f"Resource cap exceeded for '{resource}': requested {requested}, limit {limit}", ctx
        )
        self.resource = resource
        self.limit = limit
        self.requested = requested


class ConfigError(RoughTreesError):
    """
    配置错误

    当配置文件或命令行参数无效时抛出，CLI 以退出码 2 结束。
    """

    def __init__(self, config_name: str, reason: str, context: dict | None = None):
        ctx = context or {}
        ctx["config"] = config_name
        super().__init__(f"Invalid configuration '{config_name}': {reason}", ctx)
        self.config_name = config_name
        self.reason = reason


# ============================================================================
# 代数相关异常
# ============================================================================

class AlgebraError(RoughTreesError):
    """树与 Hopf 代数相关错误的基类"""
    pass


class SingularExponentError(AlgebraError):
    """
    q_γ 递推分母奇异

    当 2^{γ|τ|} = 2 出现在需要的分母中时抛出。
    """

    def __init__(self, tree: str, gamma: float, context: dict | None = None):
        ctx = context or {}
        ctx["tree"] = tree
        ctx["gamma"] = gamma
        super().__init__(f"Singular exponent: 2^(gamma*|tau|) = 2 for tree {tree}", ctx)
        self.tree = tree
        self.gamma = gamma


# ============================================================================
# 增量复形与缝合
# ============================================================================

class IncrementError(RoughTreesError):
    """增量复形相关错误的基类"""
    pass


class GridMismatchError(IncrementError):
    """
    网格不匹配

    当参与运算的增量定义在不同网格上时抛出。
    """

    def __init__(self, operation: str, reason: str, context: dict | None = None):
        ctx = context or {}
        ctx["operation"] = operation
        super().__init__(f"Grid mismatch in '{operation}': {reason}", ctx)
        self.operation = operation
        self.reason = reason


class SewingError(RoughTreesError):
    """缝合映射相关错误的基类"""
    pass


class NotClosedError(SewingError):
    """
    输入 3-增量不是 δ-闭的

    缝合映射 Λ 只作用于 δh = 0 的 h。
    """

    def __init__(self, defect: float, tolerance: float, context: dict | None = None):
        ctx = context or {}
        ctx["defect"] = f"{defect:.3e}"
        ctx["tolerance"] = f"{tolerance:.3e}"
        super().__init__("3-increment is not delta-closed", ctx)
        self.defect = defect
        self.tolerance = tolerance


# ============================================================================
# 粗糙路径
# ============================================================================

class RoughPathError(RoughTreesError):
    """粗糙路径相关错误的基类"""
    pass


class MissingLevelError(RoughPathError):
    """构造分支扩展时缺少所需的树积分"""

    def __init__(self, tree: str, context: dict | None = None):
        ctx = context or {}
        ctx["tree"] = tree
        super().__init__(f"Missing level for tree {tree}", ctx)
        self.tree = tree


class InsufficientDerivativeError(RoughPathError):
    """向量场提供的导数阶数不足"""

    def __init__(self, needed: int, available: int, context: dict | None = None):
        ctx = context or {}
        ctx["needed"] = needed
        ctx["available"] = available
        super().__init__(
            f"Derivative of order {needed} requested, only {available} available", ctx
        )
        self.needed = needed
        self.available = available


class NonFiniteStateError(RoughPathError):
    """求解过程中出现 NaN / Inf"""

    def __init__(self, step: int, time: float, context: dict | None = None):
        ctx = context or {}
        ctx["step"] = step
        ctx["time"] = time
        super().__init__(f"Non-finite state at step {step}", ctx)
        self.step = step
        self.time = time


# ============================================================================
# KdV
# ============================================================================

class KdvError(RoughTreesError):
    """谱 KdV 相关错误的基类"""
    pass


class BlowUpError(KdvError):
    """时间推进中范数发散"""

    def __init__(self, step: int, time: float, norm: float, context: dict | None = None):
        ctx = context or {}
        ctx["step"] = step
        ctx["time"] = time
        ctx["norm"] = norm
        super().__init__(f"Blow-up detected at step {step}", ctx)
        self.step = step
        self.time = time
        self.norm = norm


class ModeBudgetError(KdvError):
    """模式截断 K 超出闭式卷积预算"""

    def __init__(self, K: int, limit: int, context: dict | None = None):
        ctx = context or {}
        ctx["K"] = K
        ctx["limit"] = limit
        super().__init__(f"Mode cutoff K={K} too large for closed-form mode budget", ctx)
        self.K = K
        self.limit = limit
