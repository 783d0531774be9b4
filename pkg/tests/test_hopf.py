"""
Hopf 模块单元测试

测试 Connes–Kreimer 余乘、Hopf 公理与 q_γ 递推。

运行方式:
    pytest tests/test_hopf.py -v
"""
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st


def _trees():
    from trees import Forest, b_plus, leaf
    dot = leaf(0)
    stick = b_plus(0, [dot])
    return Forest.of, dot, stick, b_plus(0, [stick]), b_plus(0, [dot, dot])


class TestCoproduct:
    """测试余乘的具体值"""

    def test_unit(self):
        """测试 Δ(1) = 1⊗1"""
        from hopf import TensorVector, coproduct
        from trees import UNIT

        assert coproduct(UNIT) == TensorVector({(UNIT, UNIT): 1})

    def test_leaf_is_primitive(self):
        """测试 Δ′• = 0"""
        from hopf import reduced_coproduct
        from trees import leaf

        assert reduced_coproduct(leaf(0)).is_zero

    def test_reduced_rejects_unit(self):
        """测试约化余乘在单位元上未定义"""
        from exceptions import AlgebraError
        from hopf import reduced_coproduct
        from trees import UNIT

        with pytest.raises(AlgebraError):
            reduced_coproduct(UNIT)

    def test_stick(self):
        """测试 Δ′[•] = •⊗•"""
        from hopf import TensorVector, reduced_coproduct

        F, dot, stick, _, _ = _trees()
        assert reduced_coproduct(stick) == TensorVector({(F(dot), F(dot)): 1})

    def test_chain(self):
        """测试 Δ′[[•]] = [•]⊗• + •⊗[•]"""
        from hopf import TensorVector, reduced_coproduct

        F, dot, stick, chain, _ = _trees()
        expected = TensorVector({(F(stick), F(dot)): 1, (F(dot), F(stick)): 1})
        assert reduced_coproduct(chain) == expected

    def test_cherry(self):
        """测试 Δ′[••] = •⊗•• + 2[•]⊗•"""
        from hopf import TensorVector, reduced_coproduct

        F, dot, stick, _, cherry = _trees()
        expected = TensorVector({(F(dot), F(dot, dot)): 1, (F(stick), F(dot)): 2})
        assert reduced_coproduct(cherry) == expected

    def test_forest_products(self):
        """测试森林上按同态扩展: Δ′(••) = 2•⊗•，Δ′(•••) = 3••⊗• + 3•⊗••"""
        from hopf import TensorVector, reduced_coproduct

        F, dot, _, _, _ = _trees()
        assert reduced_coproduct(F(dot, dot)) == TensorVector({(F(dot), F(dot)): 2})
        expected = TensorVector({(F(dot, dot), F(dot)): 3, (F(dot), F(dot, dot)): 3})
        assert reduced_coproduct(F(dot, dot, dot)) == expected

    def test_mixed_forest(self):
        """测试 Δ′(•[•]) 的四项"""
        from hopf import TensorVector, reduced_coproduct

        F, dot, stick, _, _ = _trees()
        expected = TensorVector({
            (F(dot), F(dot, dot)): 1,
            (F(dot, dot), F(dot)): 1,
            (F(stick), F(dot)): 1,
            (F(dot), F(stick)): 1,
        })
        assert reduced_coproduct(F(dot, stick)) == expected

    def test_labels_respected(self):
        """测试带标签时左因子保留根标签"""
        from hopf import TensorVector, reduced_coproduct
        from trees import Forest, b_plus, leaf

        t = b_plus(1, [leaf(0)])
        assert reduced_coproduct(t) == TensorVector({(Forest.of(leaf(1)), Forest.of(leaf(0))): 1})

    def test_counting(self):
        """测试计数函数 c′([••], [•], •) = 2"""
        from hopf import counting, reduced_terms

        _, dot, stick, _, cherry = _trees()
        assert counting(cherry, stick, dot, reduced=True) == 2
        assert counting(cherry, cherry, dot) == 0
        terms = reduced_terms(cherry)
        assert sum(c for _, _, c in terms) == 3

    def test_to_json(self):
        """测试 JSON 记录带分子分母"""
        from hopf import reduced_coproduct

        _, _, _, _, cherry = _trees()
        records = reduced_coproduct(cherry).to_json()
        assert {"left": "[0: [0]]", "right": "[0]", "num": 2, "den": 1} in records


class TestHopfAxioms:
    """测试 Hopf 公理在所有小森林上精确成立"""

    @pytest.mark.parametrize("d", [1, 2])
    def test_counit_and_coassociativity(self, d):
        """测试余单位律与余结合律"""
        from hopf import coassociativity_defect, counit_defect, grading_violations
        from trees import enumerate_forests

        for f in enumerate_forests(d, 4):
            left, right = counit_defect(f)
            assert left.is_zero and right.is_zero
            assert coassociativity_defect(f).is_zero
            assert grading_violations(f) == 0

    @settings(max_examples=30, deadline=None)
    @given(
        st.fractions(min_value=-3, max_value=3, max_denominator=7),
        st.fractions(min_value=-3, max_value=3, max_denominator=7),
    )
    def test_tree_binomial(self, a, b):
        """属性测试: 树二项式残差恒为零"""
        from hopf import tree_binomial_check
        from trees import enumerate_trees

        for tau in enumerate_trees(2, 4):
            assert tree_binomial_check(tau, a, b) == 0

    def test_tree_binomial_integer_args(self):
        """测试整数参数返回精确的 Fraction"""
        from hopf import tree_binomial_check

        _, _, _, chain, _ = _trees()
        result = tree_binomial_check(chain, 2, 3)
        assert isinstance(result, Fraction)
        assert result == 0


class TestShuffle:
    """测试洗牌积"""

    def test_small(self):
        """测试 (0)ш(1) = {01, 10}"""
        from hopf import shuffle

        assert sorted(shuffle((0,), (1,))) == [(0, 1), (1, 0)]

    @settings(max_examples=30, deadline=None)
    @given(
        st.lists(st.integers(0, 2), max_size=4),
        st.lists(st.integers(0, 2), max_size=4),
    )
    def test_size(self, u, v):
        """属性测试: 洗牌积的项数为二项式系数"""
        from hopf import shuffle

        words = shuffle(tuple(u), tuple(v))
        assert len(words) == math.comb(len(u) + len(v), len(u))
        assert all(len(w) == len(u) + len(v) for w in words)


class TestQGamma:
    """测试 q_γ 递推"""

    def test_low_weight_is_one(self):
        """测试 γ|τ| ≤ 1 时 q_γ = 1"""
        from hopf import q_gamma

        _, dot, stick, _, _ = _trees()
        assert q_gamma(dot, 0.5) == 1.0
        assert q_gamma(stick, 0.5) == 1.0

    def test_recursion(self):
        """测试 q_0.5([••]) = 3/(2^1.5 − 2)"""
        from hopf import q_gamma

        _, _, _, chain, cherry = _trees()
        assert q_gamma(cherry, 0.5) == pytest.approx(3 / (2 ** 1.5 - 2))
        assert q_gamma(chain, 0.5) == pytest.approx(2 / (2 ** 1.5 - 2))

    @pytest.mark.parametrize("gamma", [0.3, 0.45, 0.7])
    def test_linear_trees_direct_recursion(self, gamma):
        """测试线性树上 q(n) = (2^{γn}−2)^{-1} Σ_{k<n} q(k) q(n−k)"""
        from hopf import q_gamma
        from trees import linear_tree

        direct = {}
        for n in range(1, 9):
            if gamma * n <= 1:
                direct[n] = 1.0
            else:
                total = sum(direct[k] * direct[n - k] for k in range(1, n))
                direct[n] = total / (2.0 ** (gamma * n) - 2.0)
            assert q_gamma(linear_tree((0,) * n), gamma) == pytest.approx(direct[n], rel=1e-12)

    def test_forest_multiplicative(self):
        """测试森林上的乘法扩展"""
        from hopf import q_gamma

        F, _, _, _, cherry = _trees()
        assert q_gamma(F(cherry, cherry), 0.5) == pytest.approx(q_gamma(cherry, 0.5) ** 2)

    def test_gamma_range(self):
        """测试 γ 必须在 (0,1) 内"""
        from hopf import q_gamma

        _, dot, _, _, _ = _trees()
        with pytest.raises(ValueError):
            q_gamma(dot, 1.0)

    def test_report_rows(self):
        """测试报告只包含 γ|τ| > 1 的树"""
        from hopf import q_gamma_conjecture_report

        rows = q_gamma_conjecture_report(0.5, 4)
        assert rows
        assert all(r["weight"] * 0.5 > 1 for r in rows)
        assert all(r["ratio"] == pytest.approx(r["q"] * r["factorial"] ** 0.5) for r in rows)
