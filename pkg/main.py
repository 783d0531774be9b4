"""
roughtrees 实验命令行

构建 pocketflow 流程并运行单个实验:

    ConfigNode --"verify"--------> VerifyNode ---------+
               --"rough"---------> RoughNode ----------+
               --"bseries"-------> BSeriesNode --------+--"report"--> ReportNode
               --"kdv"-----------> KdvNode ------------+
               --"combinatorics"-> CombinatoricsNode --+

退出码: 0 全部检查通过；1 检查失败或计算错误；2 配置错误。

运行方式:
    uv run python main.py verify-hopf --max-weight 5
    uv run python main.py rough-converge --path sin --gamma 0.5 --grids 64,128,256,512
    uv run python main.py kdv-run --K 8 --T 0.5 --h 1e-3
"""

import argparse
import sys
import warnings

from pocketflow import Flow

from exceptions import ConfigError, RoughTreesError
from logging_config import log_error, log_run_end, log_run_start, setup_logging

from experiments import (
    EXPERIMENT_ROUTES,
    Action,
    BSeriesNode,
    CombinatoricsNode,
    ConfigNode,
    ExperimentConfig,
    KdvNode,
    ReportNode,
    RoughNode,
    VerifyNode,
    load_config,
)

# 流程在 ReportNode 返回 None 时结束，忽略 PocketFlow 的结束提示
warnings.filterwarnings("ignore", message="Flow ends:.*not found in", module="pocketflow")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


# ============================================================================
# 流程
# ============================================================================

def build_flow() -> Flow:
    config_node = ConfigNode()
    report_node = ReportNode()
    experiment_nodes = {
        Action.VERIFY: VerifyNode(),
        Action.ROUGH: RoughNode(),
        Action.BSERIES: BSeriesNode(),
        Action.KDV: KdvNode(),
        Action.COMBINATORICS: CombinatoricsNode(),
    }
    for action, node in experiment_nodes.items():
        config_node - action >> node
        node - Action.REPORT >> report_node
    return Flow(start=config_node)


def run(config: ExperimentConfig) -> int:
    """
    运行一个实验并写出报告

    Returns:
        进程退出码
    """
    log_run_start(config.experiment, config.seed)
    shared = {"config": config}
    try:
        build_flow().run(shared)
    except ConfigError as e:
        print(f"[ERROR] {e}")
        log_error(f"config error: {e}", exc_info=False)
        return EXIT_CONFIG
    except RoughTreesError as e:
        print(f"[ERROR] {e}")
        log_error(f"experiment {config.experiment} failed: {e}")
        log_run_end(config.experiment, False)
        return EXIT_FAILED
    exit_code = shared.get("exit_code", EXIT_FAILED)
    log_run_end(config.experiment, exit_code == EXIT_OK)
    return exit_code


# ============================================================================
# 命令行
# ============================================================================

def _common_options() -> argparse.ArgumentParser:
    """所有子命令共享的参数；默认 None 表示不覆盖配置文件"""
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="key=value 或 YAML 配置文件")
    p.add_argument("--grid", type=int)
    p.add_argument("--grids", help="逗号分隔的网格大小，如 64,128,256")
    p.add_argument("--gamma", type=float)
    p.add_argument("--path", help="驱动: linear, sin, parabola, circle, walk, area")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--max-weight", dest="max_weight", type=int)
    p.add_argument("--oversample", type=int)
    p.add_argument("--d", type=int, help="walk 驱动的维数")
    p.add_argument("--K", type=int)
    p.add_argument("--T", type=float)
    p.add_argument("--h", type=float)
    p.add_argument("--alpha")
    p.add_argument("--tol", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--B", type=float)
    p.add_argument("--norm", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--k-abs", dest="k_abs", type=float)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--max-n", dest="max_n", type=int)
    p.add_argument("--log-level", dest="log_level", help="DEBUG, INFO, WARNING, ERROR")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="roughtrees", description="rough paths, tree algebras and KdV experiments")
    sub = parser.add_subparsers(dest="experiment", required=True)
    common = _common_options()
    for name in EXPERIMENT_ROUTES:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK

    options = vars(args)
    config_file = options.pop("config")
    log_level = options.pop("log_level")
    setup_logging(level=log_level)

    try:
        config = load_config(config_file, options)
    except ConfigError as e:
        print(f"[ERROR] {e}")
        log_error(f"config error: {e}", exc_info=False)
        return EXIT_CONFIG

    print(f"[INFO] Running {config.experiment} (seed={config.seed})")
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
