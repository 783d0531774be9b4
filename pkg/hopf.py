"""
Connes–Kreimer Hopf 代数

包含:
- ForestVector / TensorVector: 精确有理系数的线性组合
- coproduct / reduced_coproduct: 树上递归定义、对森林按代数同态扩展
- counting: 计数函数 c 与 c′
- 余单位律、余结合律、分级的缺陷检查
- shuffle: 词的洗牌积
- tree_binomial_check: 树二项式恒等式的精确残差
- q_gamma: 分支粗糙路径增长估计中的 q_γ 递推

约定: Δτ 的每一项 ρ⊗σ 中，左因子 ρ 为包含根的主干（树或 1），右因子 σ 为被剪下的森林。
对应 δX^τ_{tus} = Σ′ X^ρ_{tu} X^σ_{us}。
"""

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator

from exceptions import AlgebraError, SingularExponentError
from trees import UNIT, Forest, Tree, b_plus, enumerate_trees, forest_to_text


# ============================================================================
# 线性组合
# ============================================================================

class _LinearCombination:
    """有限支撑、精确有理系数的线性组合；构造后不再修改"""

    __slots__ = ("_terms",)

    def __init__(self, terms: dict | Iterable = ()):
        items = terms.items() if isinstance(terms, dict) else terms
        acc: dict = {}
        for key, coeff in items:
            value = acc.get(key, 0) + Fraction(coeff)
            if value:
                acc[key] = value
            else:
                acc.pop(key, None)
        self._terms = acc

    def __iter__(self) -> Iterator:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __getitem__(self, key) -> Fraction:
        return self._terms.get(key, Fraction(0))

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __add__(self, other):
        return type(self)(list(self._terms.items()) + list(other._terms.items()))

    def __neg__(self):
        return type(self)({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, scalar):
        return type(self)({k: Fraction(scalar) * v for k, v in self._terms.items()})

    def items(self):
        return self._terms.items()

    def keys(self):
        return self._terms.keys()

    @property
    def is_zero(self) -> bool:
        return not self._terms


class ForestVector(_LinearCombination):
    """森林的有理线性组合，乘法为森林乘积的双线性扩展"""

    __slots__ = ()

    @classmethod
    def of(cls, f: Forest | Tree, coeff=1) -> "ForestVector":
        return cls({_as_forest(f): coeff})

    def __mul__(self, other: "ForestVector") -> "ForestVector":
        terms = []
        for f1, c1 in self.items():
            for f2, c2 in other.items():
                terms.append((f1 * f2, c1 * c2))
        return ForestVector(terms)

    def __repr__(self) -> str:
        if not self:
            return "0"
        parts = [f"{c}*{forest_to_text(f)}" for f, c in sorted(self.items(), key=lambda kv: kv[0].sort_key)]
        return " + ".join(parts)


class TensorVector(_LinearCombination):
    """
    张量积中的有理线性组合

    键为森林元组 (F1, F2) 或 (F1, F2, F3)；乘法逐分量相乘。
    """

    __slots__ = ()

    @classmethod
    def tensor(cls, left: ForestVector, right: ForestVector) -> "TensorVector":
        terms = []
        for f1, c1 in left.items():
            for f2, c2 in right.items():
                terms.append(((f1, f2), c1 * c2))
        return cls(terms)

    def __mul__(self, other: "TensorVector") -> "TensorVector":
        terms = []
        for k1, c1 in self.items():
            for k2, c2 in other.items():
                if len(k1) != len(k2):
                    raise AlgebraError("tensor arity mismatch in product")
                terms.append((tuple(a * b for a, b in zip(k1, k2)), c1 * c2))
        return TensorVector(terms)

    def sorted_items(self) -> list:
        return sorted(self.items(), key=lambda kv: tuple(f.sort_key for f in kv[0]))

    def to_json(self) -> list[dict]:
        """[{left, right, num, den}, ...]，按规范顺序"""
        records = []
        for key, c in self.sorted_items():
            left, right = key
            records.append({
                "left": forest_to_text(left),
                "right": forest_to_text(right),
                "num": c.numerator,
                "den": c.denominator,
            })
        return records

    def __repr__(self) -> str:
        if not self:
            return "0"
        parts = []
        for key, c in self.sorted_items():
            body = " ⊗ ".join(forest_to_text(f) for f in key)
            parts.append(body if c == 1 else f"{c}*{body}")
        return " + ".join(parts)


def _as_forest(obj: Forest | Tree) -> Forest:
    return obj if isinstance(obj, Forest) else Forest.of(obj)


# ============================================================================
# 余乘
# ============================================================================

@lru_cache(maxsize=None)
def _tree_coproduct(tree: Tree) -> TensorVector:
    """Δτ = 1⊗τ + (B_+^a ⊗ id)Δ(B_-^a τ)，a 为根标签"""
    terms = [((UNIT, Forest.of(tree)), 1)]
    for (left, right), c in coproduct(Forest(tree.children)).items():
        terms.append(((Forest.of(b_plus(tree.label, left)), right), c))
    return TensorVector(terms)


def coproduct(f: Forest | Tree) -> TensorVector:
    """
    Connes–Kreimer 余乘

    在树上递归定义，对森林按代数同态扩展；Δ(1) = 1⊗1。
    """
    forest = _as_forest(f)
    result = TensorVector({(UNIT, UNIT): 1})
    for tree in forest.trees:
        result = result * _tree_coproduct(tree)
    return result


def reduced_coproduct(f: Forest | Tree) -> TensorVector:
    """
    约化余乘 Δ′ = Δ − 1⊗f − f⊗1

    Raises:
        AlgebraError: 输入为单位元
    """
    forest = _as_forest(f)
    if forest.is_unit:
        raise AlgebraError("reduced coproduct is undefined on the unit")
    primitive = TensorVector({(UNIT, forest): 1, (forest, UNIT): 1})
    return coproduct(forest) - primitive


def counting(tau: Tree, rho: Tree | Forest, sigma: Forest | Tree, reduced: bool = False) -> int:
    """
    计数函数: Δτ（reduced=True 时 Δ′τ）中 ρ⊗σ 的系数

    Returns:
        非负整数系数
    """
    tv = reduced_coproduct(tau) if reduced else coproduct(tau)
    coeff = tv[(_as_forest(rho), _as_forest(sigma))]
    if coeff.denominator != 1:
        raise AlgebraError("counting coefficient is not an integer")
    return int(coeff)


def reduced_terms(tau: Tree) -> list[tuple[Tree, Forest, int]]:
    """Δ′τ 的项 (ρ, σ, c′)，ρ 为树；按规范顺序"""
    out = []
    for (left, right), c in reduced_coproduct(tau).sorted_items():
        out.append((left.trees[0], right, int(c)))
    return out


# ============================================================================
# Hopf 公理检查
# ============================================================================

def counit(f: Forest) -> int:
    """ε(1) = 1, 其余森林为 0"""
    return 1 if f.is_unit else 0


def counit_defect(f: Forest | Tree) -> tuple[ForestVector, ForestVector]:
    """
    (ε⊗id)Δf − f 与 (id⊗ε)Δf − f

    两者都为零向量时余单位律成立。
    """
    forest = _as_forest(f)
    left_terms, right_terms = [], []
    for (l, r), c in coproduct(forest).items():
        if l.is_unit:
            left_terms.append((r, c))
        if r.is_unit:
            right_terms.append((l, c))
    target = ForestVector.of(forest)
    return ForestVector(left_terms) - target, ForestVector(right_terms) - target


def coassociativity_defect(f: Forest | Tree) -> TensorVector:
    """(Δ⊗id)Δf − (id⊗Δ)Δf，为零时余结合律成立"""
    forest = _as_forest(f)
    outer = coproduct(forest)
    terms = []
    for (l, r), c in outer.items():
        for (l1, l2), c2 in coproduct(l).items():
            terms.append(((l1, l2, r), c * c2))
        for (r1, r2), c2 in coproduct(r).items():
            terms.append(((l, r1, r2), -c * c2))
    return TensorVector(terms)


def grading_violations(f: Forest | Tree) -> int:
    """Δf 中 g(ρ)+g(σ) ≠ g(f) 的项数"""
    forest = _as_forest(f)
    return sum(1 for (l, r) in coproduct(forest).keys() if l.degree + r.degree != forest.degree)


# ============================================================================
# 洗牌积
# ============================================================================

def shuffle(u: tuple, v: tuple) -> list[tuple]:
    """
    洗牌积: 保持各自内部顺序的所有交错

    返回多重集（列表，可能有重复），长度为 C(|u|+|v|, |u|)。
    """
    u, v = tuple(u), tuple(v)
    if not u:
        return [v]
    if not v:
        return [u]
    return [(u[0],) + w for w in shuffle(u[1:], v)] + [(v[0],) + w for w in shuffle(u, v[1:])]


# ============================================================================
# 树二项式
# ============================================================================

def tree_binomial_check(tau: Tree, a, b) -> Fraction:
    """
    (a+b)^{|τ|} − Σ_Δτ c·τ!/(τ⁽¹⁾!·τ⁽²⁾!)·a^{|τ⁽¹⁾|}·b^{|τ⁽²⁾|}

    左因子对应 a（区间 [u,t]），右因子对应 b（区间 [s,u]）。恒等于 0。
    """
    a, b = Fraction(a), Fraction(b)
    total = (a + b) ** tau.weight
    for (left, right), c in coproduct(tau).items():
        ratio = Fraction(tau.factorial, left.factorial * right.factorial)
        total -= c * ratio * a ** left.degree * b ** right.degree
    return total


# ============================================================================
# q_γ 递推
# ============================================================================

SINGULAR_TOL = 1e-12


def q_gamma(tau: Tree | Forest, gamma: float) -> float:
    """
    q_γ(τ): γ|τ| ≤ 1 时为 1，否则
    q_γ(τ) = (2^{γ|τ|}−2)^{-1} Σ′ q_γ(τ⁽¹⁾) q_γ(τ⁽²⁾)，对森林按乘法扩展

    Raises:
        SingularExponentError: 所需分母 2^{γ|τ|}−2 为零
    """
    if not 0 < gamma < 1:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    if isinstance(tau, Forest):
        result = 1.0
        for t in tau.trees:
            result *= _q_tree(t, float(gamma))
        return result
    return _q_tree(tau, float(gamma))


@lru_cache(maxsize=None)
def _q_tree(tau: Tree, gamma: float) -> float:
    exponent = gamma * tau.weight
    if exponent <= 1:
        return 1.0
    denominator = 2.0 ** exponent - 2.0
    if abs(denominator) < SINGULAR_TOL:
        raise SingularExponentError(str(tau), gamma)
    total = 0.0
    for rho, sigma, c in reduced_terms(tau):
        total += c * _q_tree(rho, gamma) * q_gamma(sigma, gamma)
    return total / denominator


def q_gamma_conjecture_report(gamma: float, max_weight: int, d: int = 1) -> list[dict]:
    """
    q_γ(τ)·(τ!)^γ 比值表，只列 γ|τ| > 1 的树

    纯报告，不做断言。
    """
    rows = []
    for tau in enumerate_trees(d, max_weight):
        if gamma * tau.weight <= 1:
            continue
        q = q_gamma(tau, gamma)
        rows.append({
            "tree": str(tau),
            "weight": tau.weight,
            "factorial": tau.factorial,
            "q": q,
            "ratio": q * tau.factorial ** gamma,
        })
    return rows
