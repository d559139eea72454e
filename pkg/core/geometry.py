"""
射影与极空间几何模块
二元射影空间中的帽（cap）构造及其超平面截面分布、经典极空间参数表、
显式辛空间 W(2r-1, q) 以及小规模的生成子空间枚举
"""
import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from core.errors import ParameterError, SizeLimitError
from core.fields import FieldSpec, field_of_order, prime_power
from core.gf2linalg import BitMatrix, dot_f2, walsh_transform
from core.graphs import Graph, cayley_f2n, iter_bits
from utils.config import config
from utils.logger import get_logger

logger = get_logger("core.geometry")


# ---------------------------------------------------------------- 帽构造

@dataclass(frozen=True)
class CapSpec:
    """
    F_2^n 中帽构造的标准坐标

    向量按位编码，第 i 位是坐标 x_i。M = {x_0 = 0}，W = {x_0 = x_1 = 0}，
    Z = M \\ W，P = e_1，ℓ 是 e_1 与全 1 向量张成的射影直线。
    """

    n: int

    def __post_init__(self):
        if self.n < 3:
            raise ParameterError(f"帽构造需要 n ≥ 3，收到 {self.n}")

    @property
    def all_ones(self) -> int:
        return (1 << self.n) - 1

    @property
    def P(self) -> int:  # noqa: N802
        return 0b10

    @property
    def M(self) -> List[int]:  # noqa: N802
        return [x for x in range(1, 1 << self.n) if not x & 1]

    @property
    def W(self) -> List[int]:  # noqa: N802
        return [x for x in range(1, 1 << self.n) if not x & 0b11]

    @property
    def Z(self) -> List[int]:  # noqa: N802
        return [x for x in range(1 << self.n) if x & 0b11 == 0b10]

    @property
    def line(self) -> List[int]:
        return sorted((self.P, self.all_ones, self.all_ones ^ self.P))


def build_cap(n: int) -> List[int]:
    """
    构造 |S| = 2^{n-2} + 1 的帽 S = (Z ∪ ℓ) \\ {P}

    Args:
        n: 向量空间维数，至少为 3

    Returns:
        升序排列的点集
    """
    spec = CapSpec(n)
    points = set(spec.Z) | set(spec.line)
    points.discard(spec.P)
    return sorted(points)


def cap_graph(n: int) -> Graph:
    """以帽为连接集的 Cayley 图"""
    return cayley_f2n(n, build_cap(n))


def verify_cap(points: Iterable[int]) -> bool:
    """
    检查点集中没有三个不同点之和为零

    Args:
        points: 非零二元向量

    Returns:
        是否为帽
    """
    members = sorted(set(points))
    if 0 in members:
        raise ParameterError("点集不能包含零向量")
    lookup = set(members)
    for i, u in enumerate(members):
        for v in members[i + 1:]:
            if u ^ v in lookup:
                return False
    return True


@dataclass(frozen=True)
class HyperplaneProfile:
    """超平面截面分布：截面大小 -> 超平面个数"""

    n: int
    size: int
    tallies: Dict[int, int]
    checksum: int

    @property
    def expected_checksum(self) -> int:
        return self.size * ((1 << (self.n - 1)) - 1)

    @property
    def checksum_ok(self) -> bool:
        return self.checksum == self.expected_checksum


def hyperplane_profile(points: Iterable[int], n: int) -> HyperplaneProfile:
    """
    对每个非零 v 统计超平面 v^⊥ 与点集的交的大小

    Args:
        points: 点集
        n: 维数

    Returns:
        HyperplaneProfile
    """
    members = sorted(set(points))
    tallies: Counter = Counter()
    checksum = 0
    for v in range(1, 1 << n):
        inside = sum(1 for s in members if not (v & s).bit_count() & 1)
        tallies[inside] += 1
        checksum += inside
    return HyperplaneProfile(n, len(members), dict(sorted(tallies.items())), checksum)


def cap_profile_expected(n: int) -> Dict[int, int]:
    """标准帽的理论截面分布（重合的大小合并计数）"""
    quarter = 1 << (n - 2)
    size = quarter + 1
    tallies: Counter = Counter()
    tallies[1] += 2
    tallies[(size - 3) // 2] += quarter - 1
    tallies[(size + 1) // 2] += 3 * (quarter - 1)
    tallies[size - 2] += 1
    return dict(sorted(tallies.items()))


def profile_from_spectrum(points: Iterable[int], n: int) -> Dict[int, int]:
    """由 Walsh 谱换算截面分布：|H ∩ S| = (|S| + λ) / 2"""
    members = sorted(set(points))
    values = walsh_transform(n, members)
    tallies: Counter = Counter()
    for v in range(1, 1 << n):
        tallies[(len(members) + int(values[v])) // 2] += 1
    return dict(sorted(tallies.items()))


# ---------------------------------------------------------------- 极空间参数

class PolarFamily(Enum):
    """经典极空间族"""

    SYMPLECTIC = "symplectic"
    HERMITIAN_ODD = "hermitian_odd"      # H(n-1, q^2)，n 为奇数
    HERMITIAN_EVEN = "hermitian_even"    # H(n-1, q^2)，n 为偶数
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"

    @property
    def e(self) -> Fraction:
        return _FAMILY_TYPE[self]

    @property
    def is_hermitian(self) -> bool:
        return self in (PolarFamily.HERMITIAN_ODD, PolarFamily.HERMITIAN_EVEN)

    @property
    def is_quadric(self) -> bool:
        return self in (PolarFamily.ELLIPTIC, PolarFamily.PARABOLIC, PolarFamily.HYPERBOLIC)

    def dimension(self, r: int) -> int:
        """秩为 r 时的向量空间维数"""
        return 2 * r + _DIMENSION_OFFSET[self]

    def rank_for_dimension(self, n: int) -> int:
        offset = _DIMENSION_OFFSET[self]
        if n < 2 or (n - offset) % 2 or n - offset < 2:
            raise ParameterError(f"{self.value} 族不存在维数 {n} 的空间")
        return (n - offset) // 2


_FAMILY_TYPE = {
    PolarFamily.SYMPLECTIC: Fraction(1),
    PolarFamily.HERMITIAN_ODD: Fraction(3, 2),
    PolarFamily.HERMITIAN_EVEN: Fraction(1, 2),
    PolarFamily.ELLIPTIC: Fraction(2),
    PolarFamily.PARABOLIC: Fraction(1),
    PolarFamily.HYPERBOLIC: Fraction(0),
}

_DIMENSION_OFFSET = {
    PolarFamily.SYMPLECTIC: 0,
    PolarFamily.HERMITIAN_ODD: 1,
    PolarFamily.HERMITIAN_EVEN: 0,
    PolarFamily.ELLIPTIC: 2,
    PolarFamily.PARABOLIC: 1,
    PolarFamily.HYPERBOLIC: 0,
}

_FAMILY_ALIASES = {
    "w": PolarFamily.SYMPLECTIC,
    "sp": PolarFamily.SYMPLECTIC,
    "symplectic": PolarFamily.SYMPLECTIC,
    "q-": PolarFamily.ELLIPTIC,
    "elliptic": PolarFamily.ELLIPTIC,
    "q": PolarFamily.PARABOLIC,
    "q0": PolarFamily.PARABOLIC,
    "parabolic": PolarFamily.PARABOLIC,
    "q+": PolarFamily.HYPERBOLIC,
    "hyperbolic": PolarFamily.HYPERBOLIC,
    "h-odd": PolarFamily.HERMITIAN_ODD,
    "hermitian_odd": PolarFamily.HERMITIAN_ODD,
    "hermitian-odd": PolarFamily.HERMITIAN_ODD,
    "h-even": PolarFamily.HERMITIAN_EVEN,
    "hermitian_even": PolarFamily.HERMITIAN_EVEN,
    "hermitian-even": PolarFamily.HERMITIAN_EVEN,
}

_FAMILY_SYMBOL = {
    PolarFamily.SYMPLECTIC: "W",
    PolarFamily.HERMITIAN_ODD: "H",
    PolarFamily.HERMITIAN_EVEN: "H",
    PolarFamily.ELLIPTIC: "Q-",
    PolarFamily.PARABOLIC: "Q",
    PolarFamily.HYPERBOLIC: "Q+",
}


def parse_family(name: Union[str, PolarFamily], dimension: Optional[int] = None) -> PolarFamily:
    """
    解析极空间族名称

    Args:
        name: W、Q-、Q、Q+、H 或完整名称
        dimension: 向量空间维数，仅用于区分 H 的奇偶

    Returns:
        PolarFamily
    """
    if isinstance(name, PolarFamily):
        return name
    key = name.strip().lower()
    if key in ("h", "hermitian"):
        if dimension is None:
            raise ParameterError("Hermitian 族需要给出维数，或写成 hermitian_odd / hermitian_even")
        return PolarFamily.HERMITIAN_ODD if dimension % 2 else PolarFamily.HERMITIAN_EVEN
    try:
        return _FAMILY_ALIASES[key]
    except KeyError:
        raise ParameterError(f"未知的极空间族: {name}") from None


def theta(r: int, q: int) -> int:
    """θ_r = (q^r - 1)/(q - 1)"""
    return (q ** r - 1) // (q - 1)


@dataclass(frozen=True)
class PolarSpaceParams:
    """
    极空间参数：族、秩 r、域阶 q（Hermitian 族的 q 是平方数）

    派生量全部为精确整数。q 的半整数次幂按 sqrt(q) 的整数次幂计算。
    """

    family: PolarFamily
    r: int
    q: int

    @property
    def e(self) -> Fraction:
        return self.family.e

    @property
    def p(self) -> int:
        return prime_power(self.q)[0]

    @property
    def h(self) -> int:
        """q = p^h（Hermitian 族中 h 为偶数）"""
        return prime_power(self.q)[1]

    @property
    def dimension(self) -> int:
        return self.family.dimension(self.r)

    def q_power(self, exponent: Fraction) -> int:
        """q 的（半）整数次幂"""
        exponent = Fraction(exponent)
        if exponent < 0:
            raise ParameterError("只支持非负指数")
        if exponent.denominator == 1:
            return self.q ** int(exponent)
        root = math.isqrt(self.q)
        if root * root != self.q or exponent.denominator != 2:
            raise ParameterError(f"q={self.q} 不能取 {exponent} 次幂")
        return root ** int(2 * exponent)

    def sigma(self, i: int) -> int:
        """σ_i = q^{i+e-1} + 1"""
        return self.q_power(i + self.e - 1) + 1

    @property
    def theta_r(self) -> int:
        return theta(self.r, self.q)

    @property
    def ovoid_number(self) -> int:
        return self.sigma(self.r)

    @property
    def points(self) -> int:
        return self.theta_r * self.ovoid_number

    @property
    def generators(self) -> int:
        return math.prod(self.sigma(i) for i in range(1, self.r + 1))

    @property
    def label(self) -> str:
        return f"{_FAMILY_SYMBOL[self.family]}({self.dimension - 1},{self.q})"

    def to_dict(self) -> Dict[str, object]:
        return {
            "family": self.family.value,
            "r": self.r,
            "q": self.q,
            "e": str(self.e),
            "label": self.label,
            "points": self.points,
            "generators": self.generators,
            "ovoid_number": self.ovoid_number,
        }


def polar_params(family: Union[str, PolarFamily], r: int, q: int) -> PolarSpaceParams:
    """
    构造极空间参数记录

    Args:
        family: 极空间族
        r: 秩，至少为 1
        q: 域阶（素数幂；Hermitian 族须为平方数）

    Returns:
        PolarSpaceParams
    """
    family = parse_family(family, None)
    if r < 1:
        raise ParameterError("秩至少为 1")
    p, h = prime_power(q)
    if family.is_hermitian and h % 2:
        raise ParameterError(f"Hermitian 极空间的域阶必须是平方数，收到 q={q}")
    return PolarSpaceParams(family, r, q)


def polar_params_for_dimension(family: Union[str, PolarFamily], n: int, q: int) -> PolarSpaceParams:
    """由向量空间维数 n 构造参数"""
    family = parse_family(family, n)
    return polar_params(family, family.rank_for_dimension(n), q)


# ---------------------------------------------------------------- 辛空间

class SymplecticSpace:
    """
    辛极空间 W(2r-1, q)，q 为素数或 2 的幂

    点以整数编码：2r 个坐标各占 w = (q-1).bit_length() 位，第 j 个坐标在最低端。
    射影点取第一个非零坐标为 1 的代表。
    """

    def __init__(self, r: int, q: int):
        if r < 1:
            raise ParameterError("秩至少为 1")
        self.r = r
        self.q = q
        self.field: FieldSpec = field_of_order(q)
        self.width = (q - 1).bit_length()
        self.dimension = 2 * r
        self.params = polar_params(PolarFamily.SYMPLECTIC, r, q)
        self._coordinate_mask = (1 << self.width) - 1
        self._even_bits = sum(1 << (2 * i) for i in range(r))

    def __repr__(self) -> str:
        return f"SymplecticSpace({self.params.label})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymplecticSpace):
            return NotImplemented
        return (self.r, self.q) == (other.r, other.q)

    def __hash__(self) -> int:
        return hash((self.r, self.q))

    def point_coordinates(self, x: int) -> List[int]:
        return [(x >> (j * self.width)) & self._coordinate_mask for j in range(self.dimension)]

    def pack(self, coordinates: Sequence[int]) -> int:
        if len(coordinates) != self.dimension:
            raise ParameterError(f"需要 {self.dimension} 个坐标，收到 {len(coordinates)}")
        x = 0
        for j, c in enumerate(coordinates):
            if not 0 <= c < self.q:
                raise ParameterError(f"坐标 {c} 不在 GF({self.q}) 中")
            x |= c << (j * self.width)
        return x

    def is_vector(self, x: int) -> bool:
        if x <= 0 or x >> (self.width * self.dimension):
            return False
        return all(c < self.q for c in self.point_coordinates(x))

    def canonical(self, x: int) -> int:
        """缩放使第一个非零坐标为 1"""
        if not self.is_vector(x):
            raise ParameterError(f"{x} 不是 {self.params.label} 中的非零向量")
        coords = self.point_coordinates(x)
        lead = next(c for c in coords if c)
        if lead == 1:
            return x
        scale = self.field.element(lead).inverse()
        return self.pack([(self.field.element(c) * scale).value for c in coords])

    def is_point(self, x: int) -> bool:
        return self.is_vector(x) and self.canonical(x) == x

    def form(self, x: int, y: int) -> int:
        """辛形式 B(x, y) = Σ x_{2i} y_{2i+1} - x_{2i+1} y_{2i}"""
        if self.q == 2:
            swapped = ((y & self._even_bits) << 1) | ((y >> 1) & self._even_bits)
            return dot_f2(x, swapped)
        a = self.point_coordinates(x)
        b = self.point_coordinates(y)
        fe = self.field.element
        total = self.field.zero()
        for i in range(self.r):
            total = total + fe(a[2 * i]) * fe(b[2 * i + 1]) - fe(a[2 * i + 1]) * fe(b[2 * i])
        return total.value

    def collinear(self, x: int, y: int) -> bool:
        return self.form(x, y) == 0

    def point_count(self) -> int:
        return (self.q ** self.dimension - 1) // (self.q - 1)

    @cached_property
    def _points(self) -> Tuple[int, ...]:
        limit = config.get_int("max_enumeration_points")
        count = self.point_count()
        if count > limit:
            raise SizeLimitError(f"{self.params.label} 有 {count} 个点，超过枚举上限 {limit}")
        points = []
        for lead in range(self.dimension):
            for tail in product(range(self.q), repeat=self.dimension - lead - 1):
                points.append(self.pack([0] * lead + [1] + list(tail)))
        return tuple(sorted(points))

    def points(self) -> List[int]:
        return list(self._points)

    def coordinate_array(self, points: Sequence[int]) -> np.ndarray:
        return np.array([self.point_coordinates(x) for x in points], dtype=np.int64).reshape(
            len(points), self.dimension)

    @cached_property
    def _multiplication_table(self) -> np.ndarray:
        fe = self.field.element
        return np.array([[(fe(a) * fe(b)).value for b in range(self.q)] for a in range(self.q)], dtype=np.int64)

    def gram(self, left: Sequence[int], right: Sequence[int]) -> np.ndarray:
        """两组点之间的辛形式值矩阵"""
        a = self.coordinate_array(left)
        b = self.coordinate_array(right)
        if self.field.is_binary_extension and self.q > 2:
            table = self._multiplication_table
            result = np.zeros((len(left), len(right)), dtype=np.int64)
            for i in range(self.r):
                result ^= table[a[:, 2 * i][:, None], b[:, 2 * i + 1][None, :]]
                result ^= table[a[:, 2 * i + 1][:, None], b[:, 2 * i][None, :]]
            return result
        twisted = np.empty_like(b)
        twisted[:, 0::2] = b[:, 1::2]
        twisted[:, 1::2] = -b[:, 0::2]
        return (a @ twisted.T) % self.q


def symplectic_points(space: SymplecticSpace) -> List[int]:
    """全部射影点（辛空间中每个点都是迷向的）"""
    return space.points()


def collinear(space: SymplecticSpace, x: int, y: int) -> bool:
    return space.collinear(x, y)


def collinearity_graph(space: SymplecticSpace, points: Optional[Sequence[int]] = None) -> Graph:
    """
    共线图：不同的点在 B(x, y) = 0 时相邻

    Args:
        space: 辛空间
        points: 点列表（允许重复），缺省为全部点

    Returns:
        以点编码为标签的图
    """
    if points is None:
        points = space.points()
    points = list(points)
    if not points:
        return Graph(0, [])
    orthogonal = space.gram(points, points) == 0
    np.fill_diagonal(orthogonal, False)
    adjacency = BitMatrix.from_dense(orthogonal.astype(np.uint8)).row_ints()
    return Graph(len(points), adjacency, labels=points, validate=False)


def span_points(basis: Sequence[int]) -> List[int]:
    """GF(2) 上一组向量张成空间中的全部非零向量"""
    span = [0]
    for v in basis:
        span += [s ^ v for s in span]
    return sorted(span[1:])


@lru_cache(maxsize=None)
def _generator_masks(r: int) -> Tuple[int, ...]:
    space = SymplecticSpace(r, 2)
    dimension = space.dimension
    vectors = list(range(1, 1 << dimension))
    masks: List[int] = []

    def extend(basis: List[int], candidates: List[int], last_pivot: int) -> None:
        k = len(basis)
        if k == r:
            mask = 0
            for x in span_points(basis):
                mask |= 1 << x
            masks.append(mask)
            return
        # 剩余 r-k 个主元互不相同，故下一个主元不超过 r+k
        for w in candidates:
            pivot = w.bit_length() - 1
            if pivot > r + k:
                break
            if pivot <= last_pivot:
                continue
            child = [
                z for z in candidates
                if z.bit_length() - 1 > pivot and not (z >> pivot) & 1 and space.form(z, w) == 0
            ]
            extend(basis + [w], child, pivot)

    extend([], vectors, -1)
    logger.info("W(%d,2) 生成子空间枚举完成: %d 个", 2 * r - 1, len(masks))
    return tuple(masks)


def enumerate_generator_masks(space: SymplecticSpace) -> Tuple[int, ...]:
    """
    以点编码位集表示的全部生成子空间（q = 2）

    按行简化阶梯形的主元（最高位）递增扩展全迷向子空间，每个子空间恰被访问一次。

    Args:
        space: q = 2 的辛空间

    Returns:
        位集元组，第 x 位表示点 x 属于该生成子空间
    """
    if space.q != 2:
        raise ParameterError("生成子空间枚举只支持 q = 2")
    max_rank = config.get_int("max_generator_rank")
    if space.r > max_rank:
        raise SizeLimitError(f"秩 {space.r} 超过生成子空间枚举上限 {max_rank}")
    return _generator_masks(space.r)


def enumerate_generators(space: SymplecticSpace) -> List[Tuple[int, ...]]:
    """全部生成子空间，每个表示为 2^r - 1 个点组成的升序元组"""
    return [tuple(iter_bits(mask)) for mask in enumerate_generator_masks(space)]


def is_totally_isotropic(space: SymplecticSpace, points: Sequence[int]) -> bool:
    return all(space.collinear(x, y) for i, x in enumerate(points) for y in points[i + 1:])


def is_maximal_isotropic(space: SymplecticSpace, points: Sequence[int]) -> bool:
    """全迷向且不存在集外点与其全部共线"""
    if not is_totally_isotropic(space, points):
        return False
    members = set(points)
    outside = [x for x in space.points() if x not in members]
    if not outside:
        return True
    orthogonal = space.gram(outside, list(points)) == 0
    return not bool(orthogonal.all(axis=1).any())


# ---------------------------------------------------------------- 偶重模型

class EvenWeightModel:
    """
    {1..2r+1} 的奇数阶真子集与 W(2r-1, 2) 的点之间的双射

    奇集 S 的补集 x 是 F_2^{2r+1} 中的非零偶重向量；偶重向量空间在点积下是
    2r 维非退化交错空间。两个奇集交集为奇数当且仅当补集正交，
    即对应的点共线。
    """

    def __init__(self, r: int):
        if r < 1:
            raise ParameterError("秩至少为 1")
        self.r = r
        self.t = 2 * r + 1
        self.space = SymplecticSpace(r, 2)
        self.full = (1 << self.t) - 1
        self.pairs = self._hyperbolic_pairs()

    def _hyperbolic_pairs(self) -> List[Tuple[int, int]]:
        last = 1 << (self.t - 1)
        remaining = [(1 << j) | last for j in range(self.t - 1)]
        pairs = []
        while remaining:
            u = remaining.pop(0)
            idx = next(i for i, w in enumerate(remaining) if dot_f2(u, w))
            w = remaining.pop(idx)
            pairs.append((u, w))
            remaining = [
                z ^ (u if dot_f2(z, w) else 0) ^ (w if dot_f2(z, u) else 0)
                for z in remaining
            ]
        return pairs

    def vector_to_point(self, x: int) -> int:
        """偶重向量 -> 标准辛坐标"""
        if x <= 0 or x > self.full or x.bit_count() & 1:
            raise ParameterError(f"{x:b} 不是 {self.t} 维非零偶重向量")
        point = 0
        for i, (u, w) in enumerate(self.pairs):
            point |= dot_f2(x, w) << (2 * i)
            point |= dot_f2(x, u) << (2 * i + 1)
        return point

    def point_to_vector(self, point: int) -> int:
        x = 0
        for i, (u, w) in enumerate(self.pairs):
            if (point >> (2 * i)) & 1:
                x ^= u
            if (point >> (2 * i + 1)) & 1:
                x ^= w
        return x

    def subset_to_point(self, subset: int) -> int:
        """奇数阶真子集（掩码）-> 点"""
        if subset <= 0 or subset >= self.full or not subset.bit_count() & 1:
            raise ParameterError(f"{subset:b} 不是 {{1..{self.t}}} 的奇数阶真子集")
        return self.vector_to_point(self.full ^ subset)

    def point_to_subset(self, point: int) -> int:
        return self.full ^ self.point_to_vector(point)


def even_weight_model(r: int) -> EvenWeightModel:
    return EvenWeightModel(r)


def complement_translate(vectors: Iterable[int], t: int) -> List[int]:
    """在 {1..t} 中取补集"""
    full = (1 << t) - 1
    return [full ^ v for v in vectors]
