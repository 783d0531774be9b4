"""
Increments 模块单元测试

测试网格、增量、上边缘算子、杯积与 Hölder 范数。

运行方式:
    pytest tests/test_increments.py -v
"""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st


class TestGrid:
    """测试时间网格"""

    def test_uniform(self):
        """测试等分网格"""
        from increments import Grid

        g = Grid.uniform(4, T=2.0)
        assert g.N == 4
        assert len(g) == 5
        assert g.T == 2.0
        assert np.allclose(g.times, [0, 0.5, 1.0, 1.5, 2.0])

    def test_rejects_non_increasing(self):
        """测试非严格递增的时间被拒绝"""
        from increments import Grid

        with pytest.raises(ValueError):
            Grid([0.0, 0.5, 0.5, 1.0])
        with pytest.raises(ValueError):
            Grid([0.0])

    def test_refine_and_coarsen(self):
        """测试加密后再粗化回到原网格"""
        from increments import Grid

        g = Grid.uniform(8)
        fine = g.refine(4)
        assert fine.N == 32
        assert fine.coarsen(4) == g
        with pytest.raises(ValueError):
            g.coarsen(3)

    def test_times_read_only(self):
        """测试网格时间不可修改"""
        from increments import Grid

        g = Grid.uniform(4)
        with pytest.raises(ValueError):
            g.times[0] = 1.0


class TestIncrements:
    """测试增量的构造与运算"""

    def test_inc2_diagonal_zero(self, small_grid, rng):
        """测试 Inc2 对角线被置零"""
        from increments import Inc2

        n = len(small_grid)
        a = Inc2(small_grid, rng.standard_normal((n, n)))
        assert np.all(np.diag(a.values) == 0)

    def test_inc3_adjacent_zero(self, rng):
        """测试 Inc3 在相邻时间相同时为零"""
        from increments import Grid, Inc3

        g = Grid.uniform(6)
        h = Inc3(g, rng.standard_normal((7, 7, 7)))
        idx = np.arange(7)
        assert np.all(h.values[idx, idx, :] == 0)
        assert np.all(h.values[:, idx, idx] == 0)

    def test_shape_mismatch(self, small_grid):
        """测试取值形状与网格不符时抛出 GridMismatchError"""
        from exceptions import GridMismatchError
        from increments import Inc1

        with pytest.raises(GridMismatchError):
            Inc1(small_grid, np.zeros(5))

    def test_grid_mismatch_in_add(self):
        """测试不同网格上的增量不能相加"""
        from exceptions import GridMismatchError
        from increments import Grid, Inc1

        with pytest.raises(GridMismatchError):
            Inc1(Grid.uniform(4), np.zeros(5)) + Inc1(Grid.uniform(4, T=2.0), np.zeros(5))

    def test_inc3_cap(self, monkeypatch):
        """测试 Inc3 网格超过上限时抛出 ResourceCapError"""
        from exceptions import ResourceCapError
        from increments import Grid, Inc3

        monkeypatch.setenv("ROUGHTREES_INC3_MAX_N", "4")
        with pytest.raises(ResourceCapError):
            Inc3(Grid.uniform(8), np.zeros((9, 9, 9)))

    def test_step(self, small_grid):
        """测试相邻增量"""
        from increments import Inc1, delta1

        a = delta1(Inc1(small_grid, small_grid.times))
        assert np.allclose(a.step(), 1 / 32)


class TestCoboundary:
    """测试上边缘算子"""

    @settings(max_examples=20, deadline=None)
    @given(st.integers(min_value=0, max_value=2**31 - 1))
    def test_delta_delta_zero(self, seed):
        """属性测试: δδf = 0"""
        from increments import Grid, Inc1, delta1, delta2

        rng = np.random.default_rng(seed)
        g = Grid.uniform(10)
        f = Inc1(g, rng.standard_normal((11, 2)))
        assert np.max(np.abs(delta2(delta1(f)).values)) < 1e-12

    def test_delta2_take_matches_dense(self, rng):
        """测试采样求值与物化结果一致"""
        from increments import Grid, Inc2, delta2, delta2_take, sample_ordered

        g = Grid.uniform(12)
        a = Inc2(g, rng.standard_normal((13, 13)))
        i, k, j = sample_ordered(g, 3, 50, rng)
        assert np.allclose(delta2_take(a, i, k, j), delta2(a).values[i, k, j])

    def test_square_increment(self, small_grid):
        """测试 δ(t−s)² = −2(t−u)(u−s)"""
        from increments import Inc2, delta2

        t = small_grid.times
        a = Inc2(small_grid, (t[:, None] - t[None, :]) ** 2)
        b = delta2(a).values
        expected = -2 * (t[:, None, None] - t[None, :, None]) * (t[None, :, None] - t[None, None, :])
        idx = np.arange(len(t))
        expected[idx, idx, :] = 0
        expected[:, idx, idx] = 0
        assert np.max(np.abs(b - expected)) < 1e-12

    def test_delta3_of_delta2_zero(self, rng):
        """测试 δ3 作用在 δ2 的像上为零"""
        from increments import Grid, Inc2, delta2, delta3_sample, sample_ordered

        g = Grid.uniform(10)
        h = delta2(Inc2(g, rng.standard_normal((11, 11))))
        i, k, m, j = sample_ordered(g, 4, 200, rng)
        assert np.max(np.abs(delta3_sample(h, i, k, m, j))) < 1e-12

    def test_sample_ordered_strict(self, rng):
        """测试采样的下标严格递减"""
        from increments import Grid, sample_ordered

        i, k, j = sample_ordered(Grid.uniform(64), 3, 500, rng)
        assert len(i) > 0
        assert np.all(i > k) and np.all(k > j)

    def test_sample_ordered_exhaustive(self, rng):
        """测试组合数不超过 count 时返回全部组合"""
        from increments import Grid, sample_ordered

        i, k, j = sample_ordered(Grid.uniform(4), 3, 100, rng)
        assert len(i) == 10


class TestCup:
    """测试杯积与惰性 3-增量"""

    def test_cup_shares_middle_time(self, small_grid, rng):
        """测试 ((δf)a)_{tus} = (δf)_{tu} a_{us}"""
        from increments import Inc1, Inc2, cup, delta1

        n = len(small_grid)
        f = Inc1(small_grid, rng.standard_normal(n))
        a = Inc2(small_grid, rng.standard_normal((n, n)))
        c = cup(delta1(f), a)
        assert c.values.shape == (n, n, n)
        assert np.allclose(c.values[5, 3, 1], delta1(f).values[5, 3] * a.values[3, 1])

    def test_cup_sum_matches_materialized(self, rng):
        """测试 CupSum 的 take / fix_last 与物化结果一致"""
        from increments import CupSum, CupTerm, Grid, Inc2, sample_ordered

        g = Grid.uniform(8)
        a = Inc2(g, rng.standard_normal((9, 9)))
        b = Inc2(g, rng.standard_normal((9, 9)))
        h = CupSum([CupTerm(a, b), CupTerm(b, a, coeff=-2.0)])
        dense = h.materialize().values
        assert np.allclose(h.fix_last(2), dense[:, :, 2])
        i, k, j = sample_ordered(g, 3, 30, rng)
        assert np.allclose(h.take(i, k, j), dense[i, k, j])

    def test_cup_rejects_bad_shapes(self, small_grid):
        """测试逐分量乘积要求相同的取值形状"""
        from exceptions import GridMismatchError
        from increments import Inc2, cup

        n = len(small_grid)
        with pytest.raises(GridMismatchError):
            cup(Inc2(small_grid, np.zeros((n, n, 2))), Inc2(small_grid, np.zeros((n, n, 3))))


class TestHolder:
    """测试 Hölder 范数与指数"""

    def test_norm_of_power(self, small_grid):
        """测试 ‖(t−s)^2‖_2 = 1，‖t−s‖_1 = 1"""
        from increments import Inc2, holder_norm

        t = small_grid.times
        span = t[:, None] - t[None, :]
        assert holder_norm(Inc2(small_grid, span), 1.0) == pytest.approx(1.0)
        assert holder_norm(Inc2(small_grid, span ** 2), 2.0) == pytest.approx(1.0)

    def test_norm_rejects_non_positive_gamma(self, small_grid):
        """测试 γ ≤ 0 被拒绝"""
        from increments import Inc2, holder_norm

        n = len(small_grid)
        with pytest.raises(ValueError):
            holder_norm(Inc2(small_grid, np.zeros((n, n))), 0.0)

    def test_exponent_of_power(self):
        """测试 (t−s)^{3/2} 的估计指数约为 1.5"""
        from increments import Grid, Inc2, holder_exponent

        g = Grid.uniform(256)
        t = g.times
        a = Inc2(g, np.abs(t[:, None] - t[None, :]) ** 1.5)
        assert holder_exponent(a) == pytest.approx(1.5, abs=1e-6)

    def test_exponent_of_zero(self, small_grid):
        """测试零增量的指数为 inf"""
        from increments import Inc2, holder_exponent

        n = len(small_grid)
        assert holder_exponent(Inc2(small_grid, np.zeros((n, n)))) == float("inf")
