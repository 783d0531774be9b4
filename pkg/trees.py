"""
带标签有根树与森林

包含:
- Tree / Forest: 规范形式的带标签有根树及其多重集（森林）
- PlanarTree: 每个节点至多两个有序子节点的无标签平面树
- 组合泛函: 权重、树阶乘、对称因子、θ 度函数
- 枚举: 所有权重 ≤ n 的树 / 森林、平面二叉树与 Z_n 计数
- 序列化: 括号文本 `[a: t1 t2 ...]` 与 JSON

规范顺序: 先比权重，再比根标签，再按字典序比较（已排序的）子树列表。
"""

import json
import math
import re
from collections import Counter
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator

from exceptions import ResourceCapError
from utils import enum_cap


# ============================================================================
# 带标签有根树
# ============================================================================

@dataclass(frozen=True, eq=True)
class Tree:
    """
    带标签有根树 [τ1 … τk]_a

    children 在构造时按规范顺序排序，因此结构相等即为（保持标签的）同构。
    """

    label: int
    children: tuple["Tree", ...] = ()

    def __post_init__(self):
        if self.label < 0:
            raise ValueError(f"label must be non-negative, got {self.label}")
        kids = tuple(sorted(self.children, key=lambda t: t.sort_key))
        object.__setattr__(self, "children", kids)
        weight = 1 + sum(c.weight for c in kids)
        object.__setattr__(self, "_key", (weight, self.label, tuple(c.sort_key for c in kids)))

    def __hash__(self) -> int:
        return hash(self._key)

    def __lt__(self, other: "Tree") -> bool:
        return self._key < other._key

    def __str__(self) -> str:
        return to_bracket(self)

    def __repr__(self) -> str:
        return f"Tree({to_bracket(self)})"

    @property
    def sort_key(self) -> tuple:
        return self._key

    @property
    def weight(self) -> int:
        return self._key[0]

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @cached_property
    def factorial(self) -> int:
        return self.weight * math.prod(c.factorial for c in self.children)

    @cached_property
    def symmetry(self) -> int:
        result = 1
        for child, n in Counter(self.children).items():
            result *= math.factorial(n) * child.symmetry ** n
        return result

    @cached_property
    def max_arity(self) -> int:
        return max([len(self.children)] + [c.max_arity for c in self.children])

    def labels(self) -> set[int]:
        out = {self.label}
        for c in self.children:
            out |= c.labels()
        return out


# ============================================================================
# 森林（树的交换单项式）
# ============================================================================

@dataclass(frozen=True, eq=True)
class Forest:
    """
    森林: 树的多重集，空森林为单位元 1

    乘法为多重集并集；degree g 为成员权重之和。
    """

    trees: tuple[Tree, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "trees", tuple(sorted(self.trees, key=lambda t: t.sort_key)))

    def __hash__(self) -> int:
        return hash(tuple(t.sort_key for t in self.trees))

    def __lt__(self, other: "Forest") -> bool:
        return self.sort_key < other.sort_key

    def __mul__(self, other: "Forest") -> "Forest":
        return Forest(self.trees + other.trees)

    def __iter__(self) -> Iterator[Tree]:
        return iter(self.trees)

    def __len__(self) -> int:
        return len(self.trees)

    def __str__(self) -> str:
        return forest_to_text(self)

    def __repr__(self) -> str:
        return f"Forest({forest_to_text(self)})"

    @property
    def sort_key(self) -> tuple:
        return (self.degree, tuple(t.sort_key for t in self.trees))

    @property
    def degree(self) -> int:
        return sum(t.weight for t in self.trees)

    @property
    def is_unit(self) -> bool:
        return not self.trees

    @property
    def factorial(self) -> int:
        return math.prod(t.factorial for t in self.trees)

    @classmethod
    def of(cls, *trees: Tree) -> "Forest":
        return cls(tuple(trees))


UNIT = Forest()


# ============================================================================
# 基本构造
# ============================================================================

def leaf(a: int) -> Tree:
    """单节点树 •_a"""
    return Tree(a)


def b_plus(a: int, f: Forest | Iterable[Tree]) -> Tree:
    """B_+^a: 把森林接到标签为 a 的新根下"""
    trees = f.trees if isinstance(f, Forest) else tuple(f)
    return Tree(a, trees)


def b_minus(a: int, t: Tree) -> Forest | None:
    """
    B_-^a: B_+^a 的逆

    Returns:
        根标签为 a 时返回子树森林，否则返回 None（零）
    """
    if t.label != a:
        return None
    return Forest(t.children)


def linear_tree(word: Iterable[int]) -> Tree:
    """
    多重指标对应的线性树

    word = (a1, …, an) 中 a1 为最内层积分，对应最深的叶子；an 为根。
    """
    word = tuple(word)
    if not word:
        raise ValueError("empty word has no linear tree")
    t = Tree(word[0])
    for a in word[1:]:
        t = Tree(a, (t,))
    return t


def tree_word(t: Tree) -> tuple[int, ...] | None:
    """linear_tree 的逆；非线性树返回 None"""
    word = []
    node = t
    while True:
        word.append(node.label)
        if not node.children:
            break
        if len(node.children) > 1:
            return None
        node = node.children[0]
    return tuple(reversed(word))


def weight(obj: Tree | Forest) -> int:
    """顶点数 |τ|；森林为 degree"""
    if isinstance(obj, Forest):
        return obj.degree
    return obj.weight


def tree_factorial(obj: Tree | Forest) -> int:
    """树阶乘 γ(τ) = |τ|·Πγ(τi)，对森林按乘法扩展"""
    return obj.factorial


def symmetry_factor(t: Tree) -> int:
    """对称因子 σ(τ) = Π n_i!·σ(τ^i)^{n_i}"""
    return t.symmetry


# ============================================================================
# 枚举
# ============================================================================

def _multisets(pool: list[Tree], total: int, start: int = 0) -> Iterator[tuple[Tree, ...]]:
    """从已排序的 pool 中取总权重恰为 total 的多重集（下标非降）"""
    if total == 0:
        yield ()
        return
    for i in range(start, len(pool)):
        t = pool[i]
        if t.weight > total:
            break
        for rest in _multisets(pool, total - t.weight, i):
            yield (t,) + rest


def enumerate_trees(d: int, n: int, cap: int | None = None) -> list[Tree]:
    """
    枚举所有权重 ≤ n 的 d-标签有根树

    每棵树恰好出现一次，按规范顺序排列。

    Args:
        d: 标签字母表大小
        n: 最大权重
        cap: 数量上限，默认取 ROUGHTREES_ENUM_CAP

    Raises:
        ResourceCapError: 数量超出上限
    """
    if d < 1 or n < 1:
        raise ValueError("enumerate_trees requires d >= 1 and n >= 1")
    limit = enum_cap() if cap is None else cap
    pool: list[Tree] = []
    for w in range(1, n + 1):
        layer = []
        for a in range(d):
            for kids in _multisets(pool, w - 1):
                layer.append(Tree(a, kids))
                if len(pool) + len(layer) > limit:
                    raise ResourceCapError("trees", limit, len(pool) + len(layer))
        pool.extend(sorted(layer, key=lambda t: t.sort_key))
    return pool


def enumerate_forests(d: int, n: int, cap: int | None = None) -> list[Forest]:
    """枚举所有 degree ≤ n 的森林（含单位元）"""
    limit = enum_cap() if cap is None else cap
    pool = enumerate_trees(d, n, cap=limit)
    out: list[Forest] = []
    for m in range(0, n + 1):
        for trees in _multisets(pool, m):
            out.append(Forest(trees))
            if len(out) > limit:
                raise ResourceCapError("forests", limit, len(out))
    return out


# ============================================================================
# 平面二叉树（每个节点 ≤ 2 个有序子节点）
# ============================================================================

@dataclass(frozen=True)
class PlanarTree:
    """无标签平面树，子节点有序且至多两个"""

    children: tuple["PlanarTree", ...] = ()

    def __post_init__(self):
        if len(self.children) > 2:
            raise ValueError("planar binary trees have at most two children per node")

    def __str__(self) -> str:
        return "[" + " ".join(str(c) for c in self.children) + "]"

    @cached_property
    def weight(self) -> int:
        return 1 + sum(c.weight for c in self.children)

    @cached_property
    def theta(self) -> int:
        if not self.children:
            return 2
        if len(self.children) == 1:
            return 1 + self.children[0].theta
        return self.children[0].theta + self.children[1].theta

    @cached_property
    def factorial(self) -> int:
        return self.weight * math.prod(c.factorial for c in self.children)

    @cached_property
    def is_simple(self) -> bool:
        return len(self.children) <= 1 and all(c.is_simple for c in self.children)


def theta(t: PlanarTree) -> int:
    """θ(•)=2, θ([τ])=1+θ(τ), θ([τ1τ2])=θ(τ1)+θ(τ2)"""
    return t.theta


@lru_cache(maxsize=None)
def count_Zn(n: int) -> int:
    """平面二叉树 𝓑𝓣 中 n 个顶点的树的数目"""
    if n < 1:
        raise ValueError("count_Zn requires n >= 1")
    if n == 1:
        return 1
    total = count_Zn(n - 1)
    for i in range(1, n - 1):
        total += count_Zn(i) * count_Zn(n - 1 - i)
    return total


def enumerate_planar_binary(n: int, cap: int | None = None) -> list[PlanarTree]:
    """
    枚举 n 个顶点的所有平面二叉树

    Raises:
        ResourceCapError: Z_n 超出上限
    """
    if n < 1:
        raise ValueError("enumerate_planar_binary requires n >= 1")
    limit = enum_cap() if cap is None else cap
    if count_Zn(n) > limit:
        raise ResourceCapError("planar_trees", limit, count_Zn(n))

    layers: list[list[PlanarTree]] = [[], [PlanarTree()]]
    for m in range(2, n + 1):
        layer = [PlanarTree((t,)) for t in layers[m - 1]]
        for i in range(1, m - 1):
            for t1 in layers[i]:
                for t2 in layers[m - 1 - i]:
                    layer.append(PlanarTree((t1, t2)))
        layers.append(layer)
    return layers[n]


def classify_tree(t: PlanarTree, alpha: float, tol: float = 0.1) -> str:
    """
    将平面二叉树分为 "simple" / "short" / "other"

    simple: 每个节点至多一个子节点。
    short(α): 每个内部节点都是二叉的，且较小子树占两棵子树顶点总数的比例落在
    闭区间 [α−tol, α+tol] 内。
    """
    if not 0 < alpha <= 0.5:
        raise ValueError(f"alpha must lie in (0, 1/2], got {alpha}")
    if t.is_simple:
        return "simple"
    return "short" if _is_short(t, alpha, tol) else "other"


_BAND_EPS = 1e-12


def _is_short(t: PlanarTree, alpha: float, tol: float) -> bool:
    if not t.children:
        return True
    if len(t.children) == 1:
        return False
    w1, w2 = t.children[0].weight, t.children[1].weight
    total = w1 + w2
    small = min(w1, w2)
    balanced = abs(small / total - alpha) <= tol + _BAND_EPS
    return balanced and all(_is_short(c, alpha, tol) for c in t.children)


# ============================================================================
# 序列化
# ============================================================================

def to_bracket(t: Tree) -> str:
    """括号文本: 叶子 `[a]`，一般节点 `[a: t1 t2 ...]`"""
    if not t.children:
        return f"[{t.label}]"
    return f"[{t.label}: " + " ".join(to_bracket(c) for c in t.children) + "]"


_TOKEN = re.compile(r"\s*(\[|\]|:|\d+)")


def parse_bracket(text: str) -> Tree:
    """解析 to_bracket 的输出（也接受 `[a:]` 形式的叶子）"""
    tokens = _tokenize(text)
    tree, pos = _parse_tree(tokens, 0)
    if pos != len(tokens):
        raise ValueError(f"trailing input in tree text: {text!r}")
    return tree


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    stripped = text.rstrip()
    while pos < len(stripped):
        m = _TOKEN.match(stripped, pos)
        if not m:
            raise ValueError(f"unexpected character at {pos} in {text!r}")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


def _parse_tree(tokens: list[str], pos: int) -> tuple[Tree, int]:
    if pos >= len(tokens) or tokens[pos] != "[":
        raise ValueError("expected '['")
    pos += 1
    if pos >= len(tokens) or not tokens[pos].isdigit():
        raise ValueError("expected label")
    label = int(tokens[pos])
    pos += 1
    children = []
    if pos < len(tokens) and tokens[pos] == ":":
        pos += 1
        while pos < len(tokens) and tokens[pos] == "[":
            child, pos = _parse_tree(tokens, pos)
            children.append(child)
    if pos >= len(tokens) or tokens[pos] != "]":
        raise ValueError("expected ']'")
    return Tree(label, tuple(children)), pos + 1


def forest_to_text(f: Forest) -> str:
    """森林文本: 单位元为 `1`，否则为空格分隔的树"""
    if f.is_unit:
        return "1"
    return " ".join(to_bracket(t) for t in f.trees)


def parse_forest(text: str) -> Forest:
    """解析 forest_to_text 的输出"""
    if text.strip() == "1":
        return UNIT
    tokens = _tokenize(text)
    trees = []
    pos = 0
    while pos < len(tokens):
        t, pos = _parse_tree(tokens, pos)
        trees.append(t)
    return Forest(tuple(trees))


def tree_to_json(t: Tree) -> dict:
    """JSON 结构: {"label": a, "children": [...]}"""
    return {"label": t.label, "children": [tree_to_json(c) for c in t.children]}


def tree_from_json(data: dict | str) -> Tree:
    """tree_to_json 的逆，也接受 JSON 字符串"""
    if isinstance(data, str):
        data = json.loads(data)
    return Tree(int(data["label"]), tuple(tree_from_json(c) for c in data.get("children", [])))
