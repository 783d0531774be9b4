"""
ConfigNode - 配置节点

职责:
- 校验实验配置
- 按实验名路由到对应的实验节点
"""

from pocketflow import Node

from logging_config import get_logger, log_node_enter, log_node_exit

from .base import EXPERIMENT_ROUTES, validate_config

logger = get_logger(__name__)


class ConfigNode(Node):
    """
    配置节点

    shared["config"] 必须是 ExperimentConfig；校验失败时抛出 ConfigError。
    """

    def prep(self, shared):
        log_node_enter("config")
        return shared["config"]

    def exec(self, config):
        validate_config(config)
        return EXPERIMENT_ROUTES[config.experiment]

    def post(self, shared, prep_res, exec_res):
        logger.info(f"experiment {prep_res.experiment} → {exec_res}")
        log_node_exit("config", exec_res)
        return exec_res
