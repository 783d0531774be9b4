"""
ReportNode - 报告节点

职责:
- 写出 <out>/<experiment>/report.json（manifest、配置、检查、结果）
- 写出各表格 CSV 与实验自带的产物文件
- 在控制台打印检查结果，设置退出码
"""

from pocketflow import Node

from logging_config import get_logger, log_node_enter, log_node_exit
from utils import VERSION, config_hash, write_csv, write_json

logger = get_logger(__name__)

REPORT_FILE = "report.json"


def build_report(config, result) -> dict:
    """report.json 的内容；同一配置与种子下逐字节相同"""
    config_dict = config.to_dict()
    return {
        "manifest": {
            "version": VERSION,
            "experiment": config.experiment,
            "seed": config.seed,
            "config_hash": config_hash(config_dict),
        },
        "config": config_dict,
        "checks": [c.to_dict() for c in result.checks],
        "results": result.payload,
        "passed": result.passed,
    }


class ReportNode(Node):
    """报告节点: 流程的终点"""

    def prep(self, shared):
        log_node_enter("report")
        return shared["config"], shared["result"]

    def exec(self, prep_res):
        config, result = prep_res
        out_dir = config.out_dir
        out_dir.mkdir(parents=True, exist_ok=True)

        written = [out_dir / REPORT_FILE]
        write_json(written[0], build_report(config, result))
        for name, (header, rows) in sorted(result.tables.items()):
            path = out_dir / f"{name}.csv"
            write_csv(path, header, rows)
            written.append(path)
        for filename, writer in sorted(result.artifacts.items()):
            path = out_dir / filename
            writer(path)
            written.append(path)
        return written

    def post(self, shared, prep_res, exec_res):
        config, result = prep_res
        for check in result.checks:
            tag = "[OK]" if check.passed else "[FAIL]"
            print(f"{tag} {check.name}: {check.value:.6g}")
        for path in exec_res:
            logger.info(f"wrote {path}")
        print(f"[INFO] Results written to {config.out_dir}")

        shared["report_files"] = exec_res
        shared["exit_code"] = 0 if result.passed else 1
        log_node_exit("report")
        return None
