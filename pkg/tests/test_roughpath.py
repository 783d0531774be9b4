"""
Roughpath 模块单元测试

测试光滑提升、Chen 关系、粗糙积分、三阶与分支扩展、受控路径和 RDE 求解。

运行方式:
    pytest tests/test_roughpath.py -v
"""
import numpy as np
import pytest
import sympy


def _lift(name="parabola", n=16, oversample=4, level=2, gamma=0.5):
    from experiments.base import DRIVERS
    from increments import Grid
    from roughpath import lift_smooth

    x = DRIVERS[name].sample(Grid.uniform(n * oversample))
    return lift_smooth(x, level=level, oversample=oversample, gamma=gamma)


class TestLift:
    """测试光滑路径的提升"""

    def test_identity_path_levels(self):
        """测试 x_t = t 的各层为 (t−s)^k/k!"""
        X = _lift("linear", level=3)
        t = X.grid.times
        span = t[:, None] - t[None, :]
        assert np.allclose(X.level1.values[:, :, 0], span, atol=1e-14)
        assert np.allclose(X.level2.values[:, :, 0, 0], span ** 2 / 2, atol=1e-14)
        assert np.allclose(X.level3.values[:, :, 0, 0, 0], span ** 3 / 6, atol=1e-14)

    def test_chen_relations(self):
        """测试提升满足各层 Chen 关系"""
        from roughpath import check_chen

        report = check_chen(_lift(level=3), rng=np.random.default_rng(0))
        assert set(report) == {"level1", "level2", "level3"}
        assert max(report.values()) < 1e-12

    def test_shuffle_defect_zero(self):
        """测试光滑提升是几何的"""
        from roughpath import shuffle_defect

        assert np.max(np.abs(shuffle_defect(_lift()).values)) < 1e-12

    def test_bad_oversample(self):
        """测试细网格不是整数倍加密时抛出 RoughPathError"""
        from exceptions import RoughPathError
        from increments import Grid, Inc1
        from roughpath import lift_smooth

        g = Grid.uniform(10)
        with pytest.raises(RoughPathError):
            lift_smooth(Inc1(g, g.times[:, None]), oversample=4)
        with pytest.raises(RoughPathError):
            lift_smooth(Inc1(g, g.times[:, None]), level=4, oversample=2)

    def test_start_point(self):
        """测试 path() 从起点恢复路径"""
        X = _lift("circle")
        assert np.allclose(X.path().values[0], [1.0, 0.0])
        assert np.allclose(X.path().values[-1], [1.0, 0.0], atol=1e-12)


class TestRoughPathType:
    """测试 RoughPath 的构造与变换"""

    def test_gamma_range(self):
        """测试 γ 必须在 (0,1) 内"""
        from exceptions import RoughPathError
        from roughpath import RoughPath

        X = _lift()
        with pytest.raises(RoughPathError):
            RoughPath(X.level1, X.level2, 1.2)

    def test_pure_area(self, small_grid):
        """测试纯面积路径: level1 为零，level2 = A(t−s)"""
        from roughpath import pure_area, shuffle_defect

        A = np.array([[0.0, 1.0], [-1.0, 0.0]])
        X = pure_area(small_grid, A)
        assert np.all(X.level1.values == 0)
        assert X.level2.values[-1, 0, 0, 1] == pytest.approx(1.0)
        # 反对称部分不影响洗牌缺陷
        assert np.max(np.abs(shuffle_defect(X).values)) < 1e-14

    def test_pure_area_rejects_symmetric(self, small_grid):
        """测试非反对称矩阵被拒绝"""
        from exceptions import RoughPathError
        from roughpath import pure_area

        with pytest.raises(RoughPathError):
            pure_area(small_grid, np.eye(2))

    def test_ito_shift(self):
        """测试 Itô 平移使洗牌缺陷变化 −2c(t−s)δ_ab，Chen 保持"""
        from roughpath import check_chen, ito_shift, shuffle_defect

        X = _lift()
        Y = ito_shift(X, 0.25)
        t = X.grid.times
        change = shuffle_defect(Y).values - shuffle_defect(X).values
        expected = -0.5 * (t[:, None] - t[None, :])[:, :, None, None] * np.eye(2)
        assert np.allclose(change, expected, atol=1e-12)
        assert Y.level3 is None
        assert check_chen(Y)["level2"] < 1e-12

    def test_tree_increment(self):
        """测试按树读取各层"""
        from exceptions import MissingLevelError
        from trees import b_plus, leaf, linear_tree

        X = _lift(level=3)
        assert np.array_equal(X.tree_increment(leaf(1)).values, X.level1.values[:, :, 1])
        assert np.array_equal(X.tree_increment(linear_tree((0, 1))).values, X.level2.values[:, :, 0, 1])
        assert np.array_equal(X.tree_increment(linear_tree((1, 0, 1))).values, X.level3.values[:, :, 1, 0, 1])
        with pytest.raises(MissingLevelError):
            X.tree_increment(b_plus(0, [leaf(0), leaf(1)]))

    def test_json_round_trip(self):
        """测试 JSON 序列化保留各层"""
        from roughpath import RoughPath

        X = _lift(n=4, level=3)
        Y = RoughPath.from_json(X.to_json())
        assert Y.grid == X.grid
        assert np.array_equal(Y.level2.values, X.level2.values)
        assert np.array_equal(Y.level3.values, X.level3.values)

    def test_random_walk(self, small_grid, rng):
        """测试随机游走从零开始"""
        from roughpath import random_walk

        w = random_walk(small_grid, 3, rng)
        assert w.values.shape == (33, 3)
        assert np.all(w.values[0] == 0)


class TestRoughIntegral:
    """测试一形式的粗糙积分"""

    def test_linear_form_exact(self):
        """测试 ∫₀¹ x dx = 1/2 在恒等路径上精确"""
        from roughpath import rough_integral
        from vector_fields import OneForm

        x = sympy.Symbol("x")
        result = rough_integral(OneForm.from_sympy([[x]], [x]), _lift("linear"))
        assert result.f.values[-1, 0] == pytest.approx(0.5, abs=1e-14)
        assert result.obstruction_exponent == float("inf")

    def test_area_form_circle(self):
        """测试面积形式沿单位圆的积分为 π（误差随加密下降）"""
        from roughpath import rough_integral
        from vector_fields import OneForm

        x1, x2 = sympy.symbols("x1 x2")
        phi = OneForm.from_sympy([[-x2 / 2, x1 / 2]], [x1, x2])
        X = _lift("circle", n=32, oversample=8)
        value = rough_integral(phi, X).f.values[-1, 0]
        assert value == pytest.approx(np.pi, rel=1e-2)

    def test_gamma_too_small(self):
        """测试 γ ≤ 1/3 时拒绝积分"""
        from exceptions import RoughPathError
        from roughpath import rough_integral
        from vector_fields import OneForm

        x = sympy.Symbol("x")
        with pytest.raises(RoughPathError):
            rough_integral(OneForm.from_sympy([[x]], [x]), _lift("linear", gamma=0.3))

    def test_dimension_mismatch(self):
        """测试一形式列数与路径维数不符"""
        from exceptions import RoughPathError
        from roughpath import integral_germ
        from vector_fields import OneForm

        x = sympy.Symbol("x")
        with pytest.raises(RoughPathError):
            integral_germ(OneForm.from_sympy([[x]], [x]), _lift("parabola"))

    def test_sine_oracle(self):
        """测试 x_t = sin t 时 ∫₀¹ x² dx = sin³(1)/3，N = 1024 误差 ≤ 1e−6"""
        from roughpath import rough_integral
        from vector_fields import OneForm

        x = sympy.Symbol("x")
        X = _lift("sin", n=1024, oversample=2)
        value = rough_integral(OneForm.from_sympy([[x ** 2]], [x]), X, report_obstruction=False).f.values[-1, 0]
        assert value == pytest.approx(np.sin(1.0) ** 3 / 3, abs=1e-6)

    def test_sine_convergence_slope(self):
        """测试 sin 驱动下积分误差随 N 以二阶下降"""
        from roughpath import rough_integral
        from utils import fit_loglog_slope
        from vector_fields import OneForm

        x = sympy.Symbol("x")
        phi = OneForm.from_sympy([[x ** 2]], [x])
        grids = (64, 128, 256, 512)
        errors = []
        for n in grids:
            value = rough_integral(phi, _lift("sin", n=n, oversample=2), report_obstruction=False).f.values[-1, 0]
            errors.append(abs(value - np.sin(1.0) ** 3 / 3))
        slope = abs(fit_loglog_slope(grids, errors))
        assert 1.8 <= slope <= 2.2

    def test_linear_in_one_form(self):
        """测试 I[2φ − 3ψ] = 2I[φ] − 3I[ψ]"""
        from roughpath import rough_integral
        from vector_fields import OneForm

        x1, x2 = sympy.symbols("x1 x2")
        phi = OneForm.from_sympy([[x1 * x2, x1 ** 2]], [x1, x2])
        psi = OneForm.from_sympy([[sympy.sin(x2), x1 - x2]], [x1, x2])
        X = _lift(n=32)

        combined = rough_integral(phi.scale(2.0) + psi.scale(-3.0), X, report_obstruction=False).f.values
        separate = (
            2.0 * rough_integral(phi, X, report_obstruction=False).f.values
            - 3.0 * rough_integral(psi, X, report_obstruction=False).f.values
        )
        assert np.max(np.abs(combined - separate)) < 1e-10

    def test_ito_shift_correction(self):
        """测试 φ(x) = x (d = 1) 在 Itô 平移后积分恰好增加 c·t"""
        from roughpath import ito_shift, rough_integral
        from vector_fields import OneForm

        x = sympy.Symbol("x")
        phi = OneForm.from_sympy([[x]], [x])
        X = _lift("sin", n=32)
        c = 0.25
        base = rough_integral(phi, X, report_obstruction=False).f.values[:, 0]
        shifted = rough_integral(phi, ito_shift(X, c), report_obstruction=False).f.values[:, 0]
        assert np.allclose(shifted - base, c * X.grid.times, atol=1e-12)


class TestExtensions:
    """测试三阶扩展与分支扩展"""

    def test_level3_matches_direct_lift(self):
        """测试缝合扩展与直接三阶提升只差最细划分的补偿和"""
        from roughpath import extend_level3
        from sewing import sew_limit

        direct = _lift(level=3)
        extended = extend_level3(_lift(level=2))
        diff = extended.level3.values + sew_limit(direct.level3).values - direct.level3.values
        assert np.max(np.abs(diff)) < 1e-10 * max(1.0, np.max(np.abs(direct.level3.values)))

    def test_level3_needs_gamma(self):
        """测试 3γ ≤ 1 时拒绝扩展"""
        from exceptions import RoughPathError
        from roughpath import extend_level3

        with pytest.raises(RoughPathError):
            extend_level3(_lift(gamma=0.3))

    def test_growth_report(self):
        """测试增长报告需要 level3 并给出三个范数"""
        from exceptions import RoughPathError
        from roughpath import extend_level3, growth_report

        X = _lift()
        with pytest.raises(RoughPathError):
            growth_report(X)
        report = growth_report(extend_level3(X))
        assert len(report["norms"]) == 3
        assert report["C1"] > 0 and report["C2"] > 0

    def test_branched_extension_multiplicative(self):
        """测试分支扩展满足 δX^τ = X^{Δ′τ}"""
        from roughpath import base_levels, branched_residual, extend_branched
        from trees import b_plus, leaf

        X = _lift()
        levels = base_levels(X)
        cache = {}
        cherry = b_plus(0, [leaf(0), leaf(1)])
        extend_branched(levels, cherry, X.gamma, cache=cache)
        assert cherry in cache
        table = dict(levels) | cache
        assert branched_residual(table, cherry, rng=np.random.default_rng(1)) < 1e-10

    def test_branched_missing_level(self):
        """测试 γ|τ| ≤ 1 的分量缺失时抛出 MissingLevelError"""
        from exceptions import MissingLevelError
        from roughpath import extend_branched
        from trees import b_plus, leaf

        X = _lift()
        with pytest.raises(MissingLevelError):
            extend_branched({}, b_plus(0, [leaf(0), leaf(0)]), X.gamma)

    def test_branched_growth_report(self):
        """测试分支增长报告的行"""
        from roughpath import base_levels, branched_growth_report, extend_branched
        from trees import b_plus, leaf

        X = _lift()
        levels = dict(base_levels(X))
        levels[b_plus(1, [leaf(0), leaf(0)])] = extend_branched(levels, b_plus(1, [leaf(0), leaf(0)]), X.gamma)
        report = branched_growth_report(levels, X.gamma)
        assert len(report["rows"]) == len(levels)
        assert all(r["ratio"] >= 0 for r in report["rows"])


class TestControlledPaths:
    """测试受控路径"""

    def test_from_constants_exact(self):
        """测试常系数受控路径的余项为零"""
        from roughpath import ControlledPath, check_controlled
        from trees import leaf

        X = _lift()
        h = ControlledPath.from_constants(X, {leaf(0): 2.0, leaf(1): -1.0}, h0=0.5)
        report = check_controlled(h, X)
        assert report.passed
        assert report.remainder_exponent == float("inf")

    def test_from_function(self):
        """测试 h = |x|²/2 是受控路径"""
        from roughpath import ControlledPath, check_controlled
        from vector_fields import SmoothFunction

        x1, x2 = sympy.symbols("x1 x2")
        psi = SmoothFunction.from_sympy((x1 ** 2 + x2 ** 2) / 2, [x1, x2])
        X = _lift(n=64, oversample=4)
        report = check_controlled(ControlledPath.from_function(psi, X), X)
        assert report.remainder_exponent > 1.5
        assert report.passed

    def test_missing_coefficients(self):
        """测试缺少一阶系数时抛出 RoughPathError"""
        from exceptions import RoughPathError
        from increments import Inc1
        from roughpath import ControlledPath, check_controlled

        X = _lift()
        with pytest.raises(RoughPathError):
            check_controlled(ControlledPath(Inc1(X.grid, np.zeros(len(X.grid))), {}), X)

    def test_integrate_controlled(self):
        """测试 ∫₀¹ (x²/2) dx 在恒等路径上等于 1/6 − h²/6"""
        from roughpath import ControlledPath, integrate_controlled
        from vector_fields import SmoothFunction

        x = sympy.Symbol("x")
        X = _lift("linear", n=64)
        h = ControlledPath.from_function(SmoothFunction.from_sympy(x ** 2 / 2, [x]), X)
        result = integrate_controlled(h, X, 0)
        step = 1 / 64
        assert result.f.values[-1] == pytest.approx(1 / 6 - step ** 2 / 6, abs=1e-12)

    def test_random_walk_not_controlled(self, rng):
        """测试与驱动无关的随机游走不是受控路径"""
        from increments import Inc1
        from roughpath import ControlledPath, check_controlled, random_walk
        from trees import leaf

        X = _lift(n=64)
        walk = random_walk(X.grid, 1, rng).values[:, 0]
        zeros = Inc1(X.grid, np.zeros(len(X.grid)))
        h = ControlledPath(Inc1(X.grid, walk), {leaf(0): zeros, leaf(1): zeros})
        report = check_controlled(h, X)
        assert report.remainder_exponent < 1
        assert not report.passed


class TestRde:
    """测试 RDE 求解"""

    def test_davie_linear(self):
        """测试 f(y) = y，x = t 时每步乘以 1 + h + h²/2"""
        from roughpath import rde_solve
        from vector_fields import VectorFieldSet

        X = _lift("linear", n=32)
        y = rde_solve(VectorFieldSet.linear([[[1.0]]]), X, [1.0])
        h = 1 / 32
        assert y.values[-1, 0] == pytest.approx((1 + h + h * h / 2) ** 32, rel=1e-13)

    def test_davie_order_slope(self):
        """测试 f(y) = y、x = sin t 时 Davie 格式对 exp(sin 1) 的收敛阶在 [1.8, 2.3] 内"""
        from roughpath import rde_solve
        from utils import fit_loglog_slope
        from vector_fields import VectorFieldSet

        f = VectorFieldSet.linear([[[1.0]]])
        grids = (64, 128, 256, 512)
        errors = []
        for n in grids:
            y = rde_solve(f, _lift("sin", n=n, oversample=2), [1.0])
            errors.append(abs(y.values[-1, 0] - np.exp(np.sin(1.0))))
        slope = abs(fit_loglog_slope(grids, errors))
        assert 1.8 <= slope <= 2.3

    def test_picard_agrees(self):
        """测试 Picard 迭代收敛到同一个网格解"""
        from roughpath import rde_solve
        from vector_fields import VectorFieldSet

        X = _lift(n=16)
        F = np.array([[[0.0, 1.0], [-1.0, 0.0]], [[0.5, 0.0], [0.0, -0.5]]])
        f = VectorFieldSet.linear(F)
        davie = rde_solve(f, X, [1.0, 0.0])
        picard = rde_solve(f, X, [1.0, 0.0], method="picard")
        assert np.max(np.abs(davie.values - picard.values)) < 1e-10

    def test_errors(self):
        """测试未知方法与维数不符"""
        from exceptions import RoughPathError
        from roughpath import rde_solve
        from vector_fields import VectorFieldSet

        X = _lift()
        with pytest.raises(RoughPathError):
            rde_solve(VectorFieldSet.linear([[[1.0]]]), X, [1.0])
        with pytest.raises(RoughPathError):
            rde_solve(VectorFieldSet.linear(np.zeros((2, 1, 1))), X, [1.0], method="euler")

    def test_non_finite_state(self):
        """测试状态发散为 Inf 时抛出 NonFiniteStateError"""
        from exceptions import NonFiniteStateError
        from roughpath import rde_solve
        from vector_fields import VectorFieldSet

        X = _lift("linear", n=8)
        with pytest.raises(NonFiniteStateError):
            rde_solve(VectorFieldSet.linear([[[1e300]]]), X, [1e300])
