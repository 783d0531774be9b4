"""
通用工具模块

提供:
- 环境变量覆盖的默认上限（枚举数量、网格规模、KdV 模式数）
- 可复现的随机数生成器
- 对数-对数斜率拟合（收敛阶估计）
- 原子性写入 JSON / CSV 报告
"""

import csv
import hashlib
import io
import json
import os
import shutil
import tempfile
from pathlib import Path

import numpy as np
from dotenv import load_dotenv
from scipy import stats

# 加载 .env 文件中的环境变量
load_dotenv()


# ============================================================================
# 配置常量
# ============================================================================

DEFAULT_ENUM_CAP = 10**6        # 树枚举上限
DEFAULT_INC2_MAX_N = 2048       # Inc2 流水线网格上限
DEFAULT_INC3_MAX_N = 256        # 物化 Inc3 时的网格上限
DEFAULT_KDV_MAX_K = 32          # 闭式双重卷积允许的最大模式数
DEFAULT_SEED = 0
MULTI_INDEX_CAP = 10**4         # 初等微分中 n^k 的上限

VERSION = "0.1.0"


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    return int(raw)


def enum_cap() -> int:
    """树枚举上限（ROUGHTREES_ENUM_CAP）"""
    return _env_int("ROUGHTREES_ENUM_CAP", DEFAULT_ENUM_CAP)


def inc2_max_n() -> int:
    """Inc2 网格上限（ROUGHTREES_INC2_MAX_N）"""
    return _env_int("ROUGHTREES_INC2_MAX_N", DEFAULT_INC2_MAX_N)


def inc3_max_n() -> int:
    """Inc3 网格上限（ROUGHTREES_INC3_MAX_N）"""
    return _env_int("ROUGHTREES_INC3_MAX_N", DEFAULT_INC3_MAX_N)


def kdv_max_k() -> int:
    """KdV 模式截断上限（ROUGHTREES_KDV_MAX_K）"""
    return _env_int("ROUGHTREES_KDV_MAX_K", DEFAULT_KDV_MAX_K)


def default_seed() -> int:
    """默认随机种子（ROUGHTREES_SEED）"""
    return _env_int("ROUGHTREES_SEED", DEFAULT_SEED)


def make_rng(seed: int | None = None) -> np.random.Generator:
    """返回带种子的随机数生成器；所有随机性都从这里来"""
    return np.random.default_rng(default_seed() if seed is None else seed)


# ============================================================================
# 收敛阶估计
# ============================================================================

def fit_loglog_slope(x, y) -> float:
    """
    拟合 log(y) 对 log(x) 的斜率

    Args:
        x: 自变量（如网格数 N 或步长 h）
        y: 误差或残差，必须为正

    Returns:
        最小二乘斜率
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two points to fit a slope")
    if np.any(y <= 0) or np.any(x <= 0):
        raise ValueError("log-log fit requires positive data")
    return float(stats.linregress(np.log(x), np.log(y)).slope)


def fit_geometric(n, values) -> tuple[float, float, float]:
    """
    拟合 values ≈ C1 * C2^n

    Returns:
        (C1, C2, 最大对数残差)
    """
    n = np.asarray(n, dtype=float)
    logv = np.log(np.asarray(values, dtype=float))
    if n.size == 1:
        return float(np.exp(logv[0])), 1.0, 0.0
    fit = stats.linregress(n, logv)
    residual = float(np.max(np.abs(logv - (fit.intercept + fit.slope * n))))
    return float(np.exp(fit.intercept)), float(np.exp(fit.slope)), residual


# ============================================================================
# 原子性写入
# ============================================================================

def _atomic_write_text(filepath: Path, text: str):
    """
    原子性写入文本文件

    先写入同目录的临时文件，再移动到目标位置。
    """
    abs_filepath = os.path.abspath(filepath)
    dir_path = os.path.dirname(abs_filepath) or '.'
    os.makedirs(dir_path, exist_ok=True)

    fd, temp_path = tempfile.mkstemp(suffix='.tmp', dir=dir_path)
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
        shutil.move(temp_path, abs_filepath)
    except Exception:
        if os.path.exists(temp_path):
            os.remove(temp_path)
        raise


def jsonable(obj):
    """numpy 标量与数组转为 Python 值；非有限浮点数写成字符串；字典键转为字符串"""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if np.isfinite(value) else str(value)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": jsonable(obj.real), "im": jsonable(obj.imag)}
    return obj


def dump_json_text(data) -> str:
    """稳定键序的 JSON 文本"""
    return json.dumps(jsonable(data), ensure_ascii=False, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(filepath, data):
    """写入 JSON（键排序，保证字节级可复现）"""
    _atomic_write_text(Path(filepath), dump_json_text(data))


def write_csv(filepath, header: list[str], rows):
    """写入 RFC-4180 CSV"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(v) for v in row])
    _atomic_write_text(Path(filepath), buffer.getvalue())


def _csv_cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return int(value)
    return value


def config_hash(payload: dict) -> str:
    """配置的 sha256 摘要（基于稳定键序 JSON）"""
    return hashlib.sha256(dump_json_text(payload).encode("utf-8")).hexdigest()
