"""
Utils 模块单元测试

测试上限配置、斜率拟合与报告写出。

运行方式:
    pytest tests/test_utils.py -v
"""
import pytest


class TestUtilsConstants:
    """测试 utils 模块常量与环境变量覆盖"""

    def test_default_caps(self, monkeypatch):
        """测试未设置环境变量时的默认上限"""
        from utils import DEFAULT_ENUM_CAP, enum_cap, inc2_max_n, inc3_max_n, kdv_max_k

        for name in ("ROUGHTREES_ENUM_CAP", "ROUGHTREES_INC2_MAX_N", "ROUGHTREES_INC3_MAX_N", "ROUGHTREES_KDV_MAX_K"):
            monkeypatch.delenv(name, raising=False)
        assert enum_cap() == DEFAULT_ENUM_CAP == 10**6
        assert inc2_max_n() == 2048
        assert inc3_max_n() == 256
        assert kdv_max_k() == 32

    def test_env_override(self, monkeypatch):
        """测试环境变量覆盖上限"""
        from utils import enum_cap

        monkeypatch.setenv("ROUGHTREES_ENUM_CAP", "77")
        assert enum_cap() == 77

    def test_make_rng_reproducible(self):
        """测试同一种子得到同一序列"""
        from utils import make_rng

        assert (make_rng(3).standard_normal(5) == make_rng(3).standard_normal(5)).all()


class TestFits:
    """测试收敛阶与几何拟合"""

    def test_loglog_slope(self):
        """测试 y = N^{-2} 的斜率为 -2"""
        from utils import fit_loglog_slope

        ns = [64, 128, 256, 512]
        assert fit_loglog_slope(ns, [n ** -2.0 for n in ns]) == pytest.approx(-2.0)

    def test_loglog_rejects_non_positive(self):
        """测试非正数据被拒绝"""
        from utils import fit_loglog_slope

        with pytest.raises(ValueError):
            fit_loglog_slope([1, 2], [1.0, 0.0])

    def test_fit_geometric(self):
        """测试 3·2^n 的拟合常数"""
        from utils import fit_geometric

        c1, c2, residual = fit_geometric([1, 2, 3, 4], [6, 12, 24, 48])
        assert c1 == pytest.approx(3.0)
        assert c2 == pytest.approx(2.0)
        assert residual < 1e-12


class TestReportWriters:
    """测试 JSON / CSV 写出"""

    def test_json_sorted_and_sanitized(self, tmp_path):
        """测试 JSON 键排序、numpy 标量与非有限值的转换"""
        import json
        import numpy as np
        from utils import write_json

        path = tmp_path / "r.json"
        write_json(path, {"b": np.float64(1.5), "a": float("inf"), "c": {2: np.int64(3)}, "z": 1 + 2j})
        text = path.read_text(encoding="utf-8")
        data = json.loads(text)

        assert list(data) == ["a", "b", "c", "z"]
        assert data["a"] == "inf"
        assert data["c"] == {"2": 3}
        assert data["z"] == {"re": 1.0, "im": 2.0}

    def test_csv_rfc4180(self, tmp_path):
        """测试 CSV 使用 CRLF 行尾"""
        from utils import write_csv

        path = tmp_path / "t.csv"
        write_csv(path, ["N", "error"], [[64, 0.5], [128, 0.25]])
        raw = path.read_bytes()

        assert raw.startswith(b"N,error\r\n64,0.5\r\n")

    def test_config_hash_stable(self):
        """测试配置摘要与键顺序无关"""
        from utils import config_hash

        assert config_hash({"a": 1, "b": 2}) == config_hash({"b": 2, "a": 1})
        assert config_hash({"a": 1}) != config_hash({"a": 2})
