"""
统一日志配置模块

提供项目级别的日志配置，支持：
- 多级别日志（DEBUG, INFO, WARNING, ERROR）
- 文件分类（主日志、错误日志、调试日志）
- 日志轮转（防止文件过大）
- 库模块使用子 logger，导入时不创建任何文件

报告文件（CSV/JSON）从不写入时间戳，时间戳只出现在日志中。
"""

import logging
import os
from logging.handlers import RotatingFileHandler
from pathlib import Path


# ============================================================================
# 配置常量
# ============================================================================

# 应用根 logger 名称
ROOT_LOGGER = "roughtrees"

# 日志目录（可通过环境变量覆盖）
LOG_DIR = Path(os.getenv("ROUGHTREES_LOG_DIR", Path(__file__).parent / "logs"))

# 日志文件名
MAIN_LOG_FILE = "roughtrees.log"    # 主日志
ERROR_LOG_FILE = "error.log"        # 错误日志
DEBUG_LOG_FILE = "debug.log"        # 调试日志

# 日志级别（可通过环境变量覆盖）
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")

# ============================================================================
# 日志开关（全局控制）
# ============================================================================

_LOGGING_ENABLED = True

# 日志格式
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - [%(filename)s:%(lineno)d] - %(message)s"
SIMPLE_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"

# 日志轮转配置
MAX_BYTES = 10 * 1024 * 1024  # 10MB
BACKUP_COUNT = 5


def enable_logging():
    """启用日志记录"""
    global _LOGGING_ENABLED
    _LOGGING_ENABLED = True


def disable_logging():
    """禁用日志记录"""
    global _LOGGING_ENABLED
    _LOGGING_ENABLED = False


def is_logging_enabled() -> bool:
    """检查日志是否启用"""
    return _LOGGING_ENABLED


# ============================================================================
# 日志配置函数
# ============================================================================

def setup_logging(
    logger_name: str = ROOT_LOGGER,
    level: str | None = None,
    console_output: bool = True,
    file_output: bool = True
) -> logging.Logger:
    """
    配置并返回日志记录器

    Args:
        logger_name: 日志记录器名称
        level: 日志级别（DEBUG, INFO, WARNING, ERROR）
        console_output: 是否输出到控制台
        file_output: 是否输出到文件

    Returns:
        配置好的日志记录器
    """
    logger = logging.getLogger(logger_name)

    log_level = (level or LOG_LEVEL).upper()
    logger.setLevel(getattr(logging, log_level))

    # 避免重复添加handler
    if logger.handlers:
        return logger

    if file_output:
        LOG_DIR.mkdir(parents=True, exist_ok=True)

        main_handler = RotatingFileHandler(
            LOG_DIR / MAIN_LOG_FILE,
            maxBytes=MAX_BYTES,
            backupCount=BACKUP_COUNT,
            encoding='utf-8'
        )
        main_handler.setLevel(logging.DEBUG)
        main_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(main_handler)

        error_handler = RotatingFileHandler(
            LOG_DIR / ERROR_LOG_FILE,
            maxBytes=MAX_BYTES,
            backupCount=BACKUP_COUNT,
            encoding='utf-8'
        )
        error_handler.setLevel(logging.ERROR)
        error_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(error_handler)

        if log_level == "DEBUG":
            debug_handler = RotatingFileHandler(
                LOG_DIR / DEBUG_LOG_FILE,
                maxBytes=MAX_BYTES,
                backupCount=BACKUP_COUNT,
                encoding='utf-8'
            )
            debug_handler.setLevel(logging.DEBUG)
            debug_handler.setFormatter(logging.Formatter(LOG_FORMAT))
            logger.addHandler(debug_handler)

    if console_output:
        console_handler = logging.StreamHandler()
        console_handler.setLevel(logging.WARNING)
        console_handler.setFormatter(logging.Formatter(SIMPLE_FORMAT))
        logger.addHandler(console_handler)

    return logger


def get_logger(name: str | None = None) -> logging.Logger:
    """
    获取日志记录器

    库模块传入 __name__，得到应用根 logger 的子 logger；
    子 logger 不挂 handler，由 setup_logging 配置的根 logger 统一输出。

    Args:
        name: 日志记录器名称（通常使用 __name__）

    Returns:
        日志记录器
    """
    if not name or name == ROOT_LOGGER:
        return logging.getLogger(ROOT_LOGGER)
    if name.startswith(ROOT_LOGGER + "."):
        return logging.getLogger(name)
    return logging.getLogger(f"{ROOT_LOGGER}.{name}")


# ============================================================================
# 事件记录
# ============================================================================

def log_run_start(experiment: str, seed: int):
    """记录实验开始"""
    if not _LOGGING_ENABLED:
        return
    logger = get_logger()
    logger.info("=" * 80)
    logger.info(f"Experiment Started - {experiment} (seed={seed})")
    logger.info("=" * 80)


def log_run_end(experiment: str, passed: bool):
    """记录实验结束"""
    if not _LOGGING_ENABLED:
        return
    logger = get_logger()
    logger.info("=" * 80)
    logger.info(f"Experiment Ended - {experiment} - {'PASS' if passed else 'FAIL'}")
    logger.info("=" * 80)


def log_check(name: str, passed: bool, value: float, threshold: float | str | None = None):
    """记录单项检查结果"""
    if not _LOGGING_ENABLED:
        return
    logger = get_logger()
    status = "PASS" if passed else "FAIL"
    if threshold is None:
        logger.info(f"CHECK {name}: {status} (value={value:.6g})")
    else:
        bound = f"{threshold:.6g}" if isinstance(threshold, (int, float)) else threshold
        logger.info(f"CHECK {name}: {status} (value={value:.6g}, threshold={bound})")


def log_error(error_msg: str, exc_info: bool = True):
    """记录错误"""
    if not _LOGGING_ENABLED:
        return
    get_logger().error(error_msg, exc_info=exc_info)


def log_node_enter(node_name: str):
    """记录进入节点"""
    if not _LOGGING_ENABLED:
        return
    get_logger().debug(f">>> ENTER NODE: {node_name}")


def log_node_exit(node_name: str, next_action: str | None = None):
    """记录退出节点"""
    if not _LOGGING_ENABLED:
        return
    msg = f"<<< EXIT NODE: {node_name}"
    if next_action:
        msg += f" -> {next_action}"
    get_logger().debug(msg)
