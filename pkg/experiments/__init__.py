"""
实验节点包

模块结构:
- base.py: Action 路由、ExperimentConfig、Check/ExperimentResult、命名驱动
- config_node.py: ConfigNode（校验与路由）
- verify_node.py: VerifyNode（verify-trees / -hopf / -increments / -sewing）
- rough_node.py: RoughNode（rough-converge / rough-solve）
- bseries_node.py: BSeriesNode（bseries）
- kdv_node.py: KdvNode（kdv-run / kdv-verify）
- combinatorics_node.py: CombinatoricsNode（ns-majorant / tree-report）
- report_node.py: ReportNode（report.json、CSV、退出码）

使用方式:
    from experiments import ConfigNode, ReportNode, load_config
"""

from .base import (
    Action,
    EXPERIMENT_ROUTES,
    DRIVERS,
    ROUGH_DRIVERS,
    VERIFY_INC3_N,
    MAX_TREE_REPORT_N,
    DEFAULT_SHORT_ALPHA,
    Check,
    ExperimentConfig,
    ExperimentNode,
    ExperimentResult,
    load_config,
    read_config_file,
    validate_config,
)

from .config_node import ConfigNode
from .verify_node import VerifyNode
from .rough_node import RoughNode
from .bseries_node import BSeriesNode
from .kdv_node import KdvNode
from .combinatorics_node import CombinatoricsNode
from .report_node import ReportNode, build_report

__all__ = [
    # 节点类
    "ConfigNode",
    "VerifyNode",
    "RoughNode",
    "BSeriesNode",
    "KdvNode",
    "CombinatoricsNode",
    "ReportNode",
    "ExperimentNode",
    # 路由与配置
    "Action",
    "EXPERIMENT_ROUTES",
    "ExperimentConfig",
    "load_config",
    "read_config_file",
    "validate_config",
    # 结果
    "Check",
    "ExperimentResult",
    "build_report",
    # 常量
    "DRIVERS",
    "ROUGH_DRIVERS",
    "VERIFY_INC3_N",
    "MAX_TREE_REPORT_N",
    "DEFAULT_SHORT_ALPHA",
]
