"""
NS series 模块单元测试

测试优级数报告、树类报告、θ 界与树阶乘下界。

运行方式:
    pytest tests/test_ns_series.py -v
"""
import math

import pytest


class TestMajorant:
    """测试优级数"""

    def test_leading_only(self):
        """测试 B = 0 时只剩首项"""
        from ns_series import ns_majorant

        report = ns_majorant(0.5, 0.0, 1.0, 0.1, 2.0, 5)
        assert report["flag"] == "leading-only"
        assert all(r["term"] == 0.0 for r in report["rows"][1:])
        leading = math.exp(-0.4) * 2.0 ** (-2.5)
        assert report["rows"][0]["term"] == pytest.approx(leading)
        assert report["rows"][-1]["partial_sum"] == pytest.approx(leading)
        assert report["t_star"] is None

    def test_small_data_converges(self):
        """测试小初值、小时间时收敛"""
        from ns_series import ns_majorant

        report = ns_majorant(0.5, 0.1, 0.1, 0.01, 1.0, 10)
        assert report["flag"] == "converges"
        assert report["all_ratios_below_one"]
        assert report["alpha"] == 2.5
        assert report["t_star"] > 0.01
        sums = [r["partial_sum"] for r in report["rows"]]
        assert all(math.isfinite(s) for s in sums)
        assert sums == sorted(sums)

    def test_large_data_diverges(self):
        """测试大常数时发散"""
        from ns_series import ns_majorant

        report = ns_majorant(0.0, 10.0, 5.0, 0.1, 1.0, 8)
        assert report["flag"] == "diverges"
        assert report["t_star"] is None

    def test_explicit_D(self):
        """测试显式给出 D 时直接使用"""
        from ns_series import ns_majorant

        report = ns_majorant(0.5, 0.1, 0.1, 0.01, 1.0, 4, D=3.0)
        assert report["D"] == 3.0

    @pytest.mark.parametrize("eps", [-0.1, 1.0])
    def test_eps_range(self, eps):
        """测试 ε 必须在 [0, 1) 内"""
        from ns_series import ns_majorant

        with pytest.raises(ValueError):
            ns_majorant(eps, 0.1, 0.1, 0.01, 1.0, 4)

    def test_bad_arguments(self):
        """测试 k_abs ≤ 0 或负参数被拒绝"""
        from ns_series import ns_majorant

        with pytest.raises(ValueError):
            ns_majorant(0.5, 0.1, 0.1, 0.01, 0.0, 4)
        with pytest.raises(ValueError):
            ns_majorant(0.5, -1.0, 0.1, 0.01, 1.0, 4)


class TestZnConstant:
    """测试 Z_n 增长常数"""

    def test_first_term(self):
        """测试 n_max = 1 时 D = 2^{3/2}"""
        from ns_series import fit_zn_constant

        assert fit_zn_constant(1) == pytest.approx(2 ** 1.5)

    def test_bound_holds_in_range(self):
        """测试 Z_n ≤ D^n (n+1)^{−3/2} 在范围内成立"""
        from ns_series import fit_zn_constant
        from trees import count_Zn

        D = fit_zn_constant(12)
        for n in range(1, 13):
            assert count_Zn(n) <= D ** n * (n + 1) ** -1.5 * (1 + 1e-12)

    def test_rejects_zero(self):
        """测试 n_max 必须为正"""
        from ns_series import fit_zn_constant

        with pytest.raises(ValueError):
            fit_zn_constant(0)


class TestTreeClasses:
    """测试树类报告"""

    def test_simple_factorial(self):
        """测试 simple 树的树阶乘为 n!"""
        from ns_series import tree_class_report

        report = tree_class_report(6, 0.3)
        assert report["simple_factorial_ok"]
        assert report["alpha"] == 0.3

    def test_counts_match_zn(self):
        """测试各类数目之和为 Z_n"""
        from ns_series import tree_class_report
        from trees import count_Zn

        report = tree_class_report(6, 0.3)
        for n in range(1, 7):
            total = sum(r["count"] for r in report["rows"] if r["n"] == n)
            assert total == count_Zn(n)

    def test_range(self):
        """测试 max_n 超出范围时抛出 ValueError"""
        from ns_series import MAX_CLASS_N, tree_class_report

        with pytest.raises(ValueError):
            tree_class_report(MAX_CLASS_N + 1, 0.3)
        with pytest.raises(ValueError):
            tree_class_report(0, 0.3)


class TestThetaAndFactorial:
    """测试 θ 界与树阶乘下界"""

    def test_theta_bounds(self):
        """测试 (n+1)/2 ≤ θ ≤ n+1"""
        from ns_series import theta_report

        report = theta_report(8)
        assert report["holds"]
        assert len(report["rows"]) == 8

    def test_min_factorial_values(self):
        """测试最小树阶乘 1, 2, 3, 8, 15, 36, 63"""
        from ns_series import min_factorial

        assert [min_factorial(n) for n in range(1, 8)] == [1, 2, 3, 8, 15, 36, 63]
        with pytest.raises(ValueError):
            min_factorial(0)

    def test_min_factorial_brute_force(self):
        """测试动态规划与枚举一致"""
        from ns_series import min_factorial
        from trees import enumerate_planar_binary

        for n in range(1, 9):
            assert min_factorial(n) == min(t.factorial for t in enumerate_planar_binary(n))

    def test_stated_bound_violations(self):
        """测试 2^{n−1} 下界在 n = 3, 5, 7 处不成立，比值最小为 3/4"""
        from ns_series import factorial_bound_report

        report = factorial_bound_report(7)
        assert report["stated_violations"] == [3, 5, 7]
        assert report["min_ratio"] == pytest.approx(0.75)
