"""
图构造与组合分析模块
顶点邻域以 Python 整数位集存储；提供二元向量群上的 Cayley 图、BCH 图、
强积与张量积、团计数与团数、互补秩以及 Oddtown 图 Γ_t
"""
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from core.errors import ParameterError, SizeLimitError
from core.fields import gf2h_make
from core.gf2linalg import BitMatrix, IntMatrix, check_connection_set, rank_exact, rank_f2
from utils.config import config
from utils.logger import get_logger

logger = get_logger("core.graphs")

MAX_BCH_DEGREE = 8


def iter_bits(mask: int) -> Iterator[int]:
    """按从小到大的顺序遍历位集中的下标"""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Graph:
    """无向简单图，构造后不可修改"""

    __slots__ = ("n", "_adjacency", "labels")

    def __init__(self, n: int, adjacency: Sequence[int], labels: Optional[Sequence[int]] = None,
                 validate: bool = True):
        """
        初始化图

        Args:
            n: 顶点数
            adjacency: 每个顶点的邻域位集
            labels: 可选的顶点标签（二元向量或子集掩码）
            validate: 是否检查无自环与对称性
        """
        if len(adjacency) != n:
            raise ParameterError(f"邻域数 {len(adjacency)} 与顶点数 {n} 不符")
        if labels is not None and len(labels) != n:
            raise ParameterError("标签数与顶点数不符")
        self.n = n
        self._adjacency = tuple(int(mask) for mask in adjacency)
        self.labels = tuple(labels) if labels is not None else None
        if validate:
            self._validate()

    def _validate(self) -> None:
        bound = 1 << self.n
        for v, mask in enumerate(self._adjacency):
            if mask < 0 or mask >= bound:
                raise ParameterError(f"顶点 {v} 的邻域越界")
            if (mask >> v) & 1:
                raise ParameterError(f"顶点 {v} 有自环")
            for u in iter_bits(mask):
                if not (self._adjacency[u] >> v) & 1:
                    raise ParameterError(f"边 ({v}, {u}) 不对称")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Tuple[int, int]],
                   labels: Optional[Sequence[int]] = None) -> "Graph":
        """由边列表构造"""
        adjacency = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ParameterError(f"边 ({u}, {v}) 的端点越界")
            if u == v:
                raise ParameterError(f"顶点 {u} 有自环")
            adjacency[u] |= 1 << v
            adjacency[v] |= 1 << u
        return cls(n, adjacency, labels, validate=False)

    @property
    def adjacency(self) -> Tuple[int, ...]:
        return self._adjacency

    def neighbors(self, v: int) -> int:
        return self._adjacency[v]

    def neighbor_list(self, v: int) -> List[int]:
        return list(iter_bits(self._adjacency[v]))

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self._adjacency[u] >> v) & 1)

    def degree(self, v: int) -> int:
        return self._adjacency[v].bit_count()

    def degrees(self) -> List[int]:
        return [mask.bit_count() for mask in self._adjacency]

    def edge_count(self) -> int:
        return sum(self.degrees()) // 2

    def edges(self) -> List[Tuple[int, int]]:
        """按字典序排列的边 (u, v)，u < v"""
        return [(u, v) for u in range(self.n) for v in iter_bits(self._adjacency[u] >> (u + 1) << (u + 1))]

    def is_regular(self) -> bool:
        return len(set(self.degrees())) <= 1

    def adjacency_bitmatrix(self, plus_identity: bool = False) -> BitMatrix:
        rows = [mask | (1 << v) for v, mask in enumerate(self._adjacency)] if plus_identity else self._adjacency
        return BitMatrix.from_int_rows(list(rows), self.n)

    def adjacency_array(self, shift: int = 0) -> np.ndarray:
        """稠密整数矩阵 A + shift·I"""
        array = self.adjacency_bitmatrix().to_dense().astype(np.int64)
        if shift:
            array[np.diag_indices(self.n)] += shift
        return array

    def adjacency_intmatrix(self, shift: int = 0) -> IntMatrix:
        return IntMatrix(self.adjacency_array(shift).tolist(), self.n)

    def induced_subgraph(self, vertices: Sequence[int]) -> "Graph":
        """按给定顺序重新编号的诱导子图"""
        position = {v: i for i, v in enumerate(vertices)}
        if len(position) != len(vertices):
            raise ParameterError("诱导子图的顶点有重复")
        adjacency = []
        for v in vertices:
            mask = 0
            for u in iter_bits(self._adjacency[v]):
                i = position.get(u)
                if i is not None:
                    mask |= 1 << i
            adjacency.append(mask)
        labels = [self.labels[v] for v in vertices] if self.labels is not None else None
        return Graph(len(vertices), adjacency, labels, validate=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self._adjacency == other._adjacency

    def __hash__(self) -> int:
        return hash((self.n, self._adjacency))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edge_count()})"


@dataclass(frozen=True)
class CliqueCensus:
    """各阶团的个数，counts[i-1] = a_i"""

    counts: Tuple[int, ...]

    def a(self, size: int) -> int:
        if 1 <= size <= len(self.counts):
            return self.counts[size - 1]
        return 0

    def as_dict(self) -> Dict[int, int]:
        return {i + 1: c for i, c in enumerate(self.counts)}


def empty_graph(n: int) -> Graph:
    return Graph(n, [0] * n, validate=False)


def complete_graph(size: int) -> Graph:
    """完全图 K_ℓ"""
    if size < 1:
        raise ParameterError("完全图至少需要一个顶点")
    full = (1 << size) - 1
    return Graph(size, [full ^ (1 << v) for v in range(size)], validate=False)


def complete_graph_spectrum(size: int) -> Counter:
    """K_ℓ 的特征值多重集"""
    spectrum = Counter({size - 1: 1})
    if size > 1:
        spectrum[-1] += size - 1
    return spectrum


def cayley_f2n(n: int, vectors: Iterable[int]) -> Graph:
    """
    二元向量群上的 Cayley 图 Cay(F_2^n, S)

    Args:
        n: 维数
        vectors: 连接集（按位编码，非零）

    Returns:
        顶点按整数编码排列的 |S|-正则图
    """
    support = check_connection_set(n, vectors)
    adjacency = []
    for x in range(1 << n):
        mask = 0
        for s in support:
            mask |= 1 << (x ^ s)
        adjacency.append(mask)
    return Graph(1 << n, adjacency, validate=False)


def bch_connection_set(h: int) -> List[int]:
    """立方曲线 {(a, a^3) : a ≠ 0}，低 h 位存 a，高 h 位存 a^3"""
    field = gf2h_make(h)
    return sorted(a.value | ((a ** 3).value << h) for a in field.nonzero_elements())


def bch_cayley(h: int) -> Graph:
    """
    (F_{2^h})^2 上以立方曲线为连接集的 Cayley 图

    Args:
        h: 扩张次数，1 ≤ h ≤ 8

    Returns:
        2^{2h} 个顶点的 (2^h - 1)-正则无三角形图
    """
    if not 1 <= h <= MAX_BCH_DEGREE:
        raise ParameterError(f"h 必须在 1..{MAX_BCH_DEGREE} 之间，收到 {h}")
    return cayley_f2n(2 * h, bch_connection_set(h))


def cube_sum_free(h: int) -> bool:
    """检查 a+b+c = 0（a, b, c 两两不同且非零）时 a^3+b^3+c^3 ≠ 0"""
    field = gf2h_make(h)
    cubes = [(e ** 3).value for e in field.elements()]
    for a in range(1, field.order):
        for b in range(a + 1, field.order):
            c = a ^ b
            if c > b and cubes[a] ^ cubes[b] ^ cubes[c] == 0:
                return False
    return True


def strong_product(first: Graph, second: Graph) -> Graph:
    """
    强积 G ⊠ H，顶点 (g, h) 编号为 g·|H| + h

    Args:
        first: 因子 G
        second: 因子 H

    Returns:
        强积图
    """
    width = second.n
    closed_h = [mask | (1 << v) for v, mask in enumerate(second.adjacency)]
    adjacency = []
    for g in range(first.n):
        closed_g = first.adjacency[g] | (1 << g)
        for h in range(width):
            mask = 0
            for g2 in iter_bits(closed_g):
                mask |= closed_h[h] << (g2 * width)
            adjacency.append(mask ^ (1 << (g * width + h)))
    return Graph(first.n * width, adjacency, validate=False)


def tensor_product(first: Graph, second: Graph) -> Graph:
    """张量积 G × H：(g,h) ~ (g',h') 当且仅当 g ~ g' 且 h ~ h'"""
    width = second.n
    adjacency = []
    for g in range(first.n):
        for h in range(width):
            mask = 0
            for g2 in iter_bits(first.adjacency[g]):
                mask |= second.adjacency[h] << (g2 * width)
            adjacency.append(mask)
    return Graph(first.n * width, adjacency, validate=False)


def strong_power(graph: Graph, k: int, limit: Optional[int] = None) -> Graph:
    """
    k 次强幂 G^⊠k

    Args:
        graph: 底图
        k: 幂次，至少为 1
        limit: 顶点数上限，缺省读取配置

    Returns:
        强幂图
    """
    if k < 1:
        raise ParameterError("强幂次数至少为 1")
    if limit is None:
        limit = config.get_int("max_strong_power_vertices")
    if graph.n ** k > limit:
        raise SizeLimitError(f"强幂顶点数 {graph.n}^{k} 超过上限 {limit}")
    result = graph
    for _ in range(k - 1):
        result = strong_product(result, graph)
    return result


def product_spectrum(first: Counter, second: Counter, kind: str = "strong") -> Counter:
    """
    由因子谱预测积图的谱

    Args:
        first: G 的特征值多重集
        second: H 的特征值多重集
        kind: "strong" 为 (1+λ)(1+μ)-1，"tensor" 为 λμ

    Returns:
        特征值多重集
    """
    if kind not in ("strong", "tensor"):
        raise ParameterError(f"未知的积类型: {kind}")
    result: Counter = Counter()
    for lam, a in first.items():
        for mu, b in second.items():
            value = (1 + lam) * (1 + mu) - 1 if kind == "strong" else lam * mu
            result[value] += a * b
    return result


def _color_sort(adjacency: Sequence[int], candidates: int) -> Tuple[List[int], List[int]]:
    """贪心着色，按颜色不减的顺序返回顶点及其颜色"""
    order: List[int] = []
    colors: List[int] = []
    uncolored = candidates
    color = 0
    while uncolored:
        color += 1
        available = uncolored
        while available:
            low = available & -available
            v = low.bit_length() - 1
            available &= ~(adjacency[v] | low)
            uncolored ^= low
            order.append(v)
            colors.append(color)
    return order, colors


def _expand_max(adjacency: Sequence[int], size: int, candidates: int, best: List[int], limit: int) -> None:
    order, colors = _color_sort(adjacency, candidates)
    for idx in range(len(order) - 1, -1, -1):
        if size + colors[idx] <= best[0] or best[0] >= limit:
            return
        v = order[idx]
        rest = candidates & adjacency[v]
        if rest:
            _expand_max(adjacency, size + 1, rest, best, limit)
        elif size + 1 > best[0]:
            best[0] = size + 1
        candidates &= ~(1 << v)


def clique_number(graph: Graph, cap: Optional[int] = None) -> int:
    """
    精确团数（着色定界的分支限界）

    Args:
        graph: 图
        cap: 给定时一旦找到 cap+1 阶团即提前返回

    Returns:
        ω(G)，或有上限时 min(ω(G), cap+1)
    """
    if graph.n == 0:
        return 0
    limit = cap + 1 if cap is not None else graph.n
    best = [1]
    if limit > 1:
        _expand_max(graph.adjacency, 0, (1 << graph.n) - 1, best, limit)
    return min(best[0], limit)


def _search_clique(adjacency: Sequence[int], clique: List[int], candidates: int, size: int) -> Optional[List[int]]:
    if len(clique) == size:
        return clique
    order, colors = _color_sort(adjacency, candidates)
    for idx in range(len(order) - 1, -1, -1):
        if len(clique) + colors[idx] < size:
            return None
        v = order[idx]
        found = _search_clique(adjacency, clique + [v], candidates & adjacency[v], size)
        if found is not None:
            return found
        candidates &= ~(1 << v)
    return None


def find_clique(graph: Graph, size: int, candidates: Optional[int] = None) -> Optional[List[int]]:
    """
    在候选顶点中寻找一个 size 阶团（确定性）

    Args:
        graph: 图
        size: 团的阶
        candidates: 候选顶点位集，缺省为全部顶点

    Returns:
        升序排列的团，不存在时返回 None
    """
    if candidates is None:
        candidates = (1 << graph.n) - 1
    if size <= 0:
        return []
    found = _search_clique(graph.adjacency, [], candidates, size)
    return sorted(found) if found is not None else None


def clique_census(graph: Graph, max_size: int) -> CliqueCensus:
    """
    统计 1..max_size 阶团的个数（只计数，不物化团）

    Args:
        graph: 图
        max_size: 最大阶

    Returns:
        CliqueCensus
    """
    counts = [0] * (max_size + 1)
    adjacency = graph.adjacency

    def extend(depth: int, candidates: int) -> None:
        # candidates 只含比当前团中顶点编号更大的顶点
        while candidates:
            low = candidates & -candidates
            v = low.bit_length() - 1
            candidates ^= low
            counts[depth + 1] += 1
            if depth + 1 == max_size:
                continue
            rest = candidates & adjacency[v]
            if depth + 2 == max_size:
                counts[max_size] += rest.bit_count()
            elif rest:
                extend(depth + 1, rest)

    if max_size >= 1 and graph.n:
        extend(0, (1 << graph.n) - 1)
    return CliqueCensus(tuple(counts[1:]))


def is_triangle_free(graph: Graph) -> bool:
    adjacency = graph.adjacency
    return not any(adjacency[u] & adjacency[v] for u, v in graph.edges())


def complementary_rank_f2(graph: Graph) -> int:
    """GF(2) 上 A + I 的秩"""
    return rank_f2(graph.adjacency_bitmatrix(plus_identity=True))


def complementary_rank_real(graph: Graph) -> int:
    """有理数域上 A + I 的秩"""
    return rank_exact(graph.adjacency_intmatrix(shift=1))


def rank_a_minus_i_real(graph: Graph) -> int:
    """有理数域上 A - I 的秩"""
    return rank_exact(graph.adjacency_intmatrix(shift=-1))


def oddtown_graph(t: int) -> Graph:
    """
    Γ_t：{1..t} 的奇数阶真子集，交集为奇数阶时相邻

    Args:
        t: 基集大小，至少为 2

    Returns:
        以子集掩码为标签的图
    """
    if t < 2:
        raise ParameterError("t 至少为 2")
    full = (1 << t) - 1
    masks = [s for s in range(1, full) if s.bit_count() & 1]
    bits = np.array([[(s >> i) & 1 for i in range(t)] for s in masks], dtype=np.int64).reshape(len(masks), t)
    parity = (bits @ bits.T) & 1
    np.fill_diagonal(parity, 0)
    adjacency = BitMatrix.from_dense(parity).row_ints()
    logger.debug("Γ_%d: %d 个顶点", t, len(masks))
    return Graph(len(masks), adjacency, labels=masks, validate=False)
