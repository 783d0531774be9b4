"""
pytest 配置和共享 fixtures

用于所有测试模块的共享配置和 fixtures。
"""
import sys
import os
import pytest

# 添加项目根目录到 Python 路径
project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, project_root)


@pytest.fixture
def rng():
    """固定种子的随机数生成器"""
    import numpy as np
    return np.random.default_rng(12345)


@pytest.fixture
def small_grid():
    """[0,1] 上 N = 32 的均匀网格"""
    from increments import Grid
    return Grid.uniform(32)


@pytest.fixture
def parabola_driver():
    """二维光滑驱动 x_t = (t, t²)"""
    from experiments.base import DRIVERS
    return DRIVERS["parabola"]


@pytest.fixture
def quiet_logging():
    """测试期间关闭日志事件输出"""
    from logging_config import disable_logging, enable_logging
    disable_logging()
    yield
    enable_logging()
