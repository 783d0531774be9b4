"""
实验包导入测试

验证 experiments 包导出节点类、路由常量与配置函数。

运行方式:
    pytest tests/test_experiments/test_imports.py -v
"""


class TestExperimentsImport:
    """测试 experiments 包导出"""

    def test_import_all_nodes_from_package(self):
        """测试从包导入所有节点类，且都是同步 Node"""
        from experiments import (
            BSeriesNode,
            CombinatoricsNode,
            ConfigNode,
            KdvNode,
            ReportNode,
            RoughNode,
            VerifyNode,
        )
        from pocketflow import Node

        for cls in (ConfigNode, VerifyNode, RoughNode, BSeriesNode, KdvNode, CombinatoricsNode, ReportNode):
            assert issubclass(cls, Node)

    def test_action_constants(self):
        """测试路由动作常量"""
        from experiments import Action

        assert Action.VERIFY == "verify"
        assert Action.ROUGH == "rough"
        assert Action.BSERIES == "bseries"
        assert Action.KDV == "kdv"
        assert Action.COMBINATORICS == "combinatorics"
        assert Action.REPORT == "report"

    def test_every_route_has_a_suite(self):
        """测试每个子命令都由对应节点的套件处理"""
        from experiments import EXPERIMENT_ROUTES, Action
        from experiments import bseries_node, combinatorics_node, kdv_node, rough_node, verify_node

        suites = {
            Action.VERIFY: verify_node.SUITES,
            Action.ROUGH: rough_node.SUITES,
            Action.KDV: kdv_node.SUITES,
            Action.COMBINATORICS: combinatorics_node.SUITES,
        }
        for name, action in EXPERIMENT_ROUTES.items():
            if action == Action.BSERIES:
                assert name == "bseries"
                assert hasattr(bseries_node, "BSeriesNode")
                continue
            assert name in suites[action]
