"""
部分 m-卵形体模块
部分 m-卵形体、m-近正交集与广义 Oddtown 族的构造和验证：
BCH 构造、强积放大、经 Lempel 分解的图到向量嵌入以及随机抽样构造
"""
import math
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from core.errors import ParameterError
from core.geometry import (
    EvenWeightModel, PolarFamily, PolarSpaceParams, SymplecticSpace,
    collinearity_graph, enumerate_generator_masks,
)
from core.gf2linalg import BitMatrix, lempel_factor
from core.graphs import (
    Graph, bch_cayley, clique_census, clique_number, complementary_rank_f2,
    find_clique, iter_bits, strong_power,
)
from utils.config import config
from utils.logger import get_logger
from utils.rng import make_rng, spawn_rngs

logger = get_logger("core.ovoids")


class VerificationMethod(Enum):
    """部分 m-卵形体的验证方法"""

    GENERATOR_EXHAUSTIVE = "generator-exhaustive"
    CLIQUE_BOUND = "clique-bound"


@dataclass(frozen=True)
class VectorFamily:
    """F_2^t 中非零向量的有序族（允许重复）"""

    dimension: int
    vectors: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "vectors", tuple(int(v) for v in self.vectors))
        for i, v in enumerate(self.vectors):
            if v == 0:
                raise ParameterError(f"第 {i} 个向量为零向量")
            if v < 0 or v >> self.dimension:
                raise ParameterError(f"第 {i} 个向量超出 {self.dimension} 维")

    def __len__(self) -> int:
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def has_repeats(self) -> bool:
        return len(set(self.vectors)) != len(self.vectors)

    def distinct(self) -> "VectorFamily":
        """去掉重复成员，保留首次出现的顺序"""
        return VectorFamily(self.dimension, tuple(dict.fromkeys(self.vectors)))


@dataclass(frozen=True)
class OvoidCertificate:
    """点集 X 是空间中部分 m-卵形体的可复核证书"""

    space: PolarSpaceParams
    m: int
    points: Tuple[int, ...]
    method: VerificationMethod
    verified: bool
    seed: Optional[int] = None
    wall_time: float = 0.0
    counters: Dict[str, int] = field(default_factory=dict)
    notes: Tuple[str, ...] = ()

    @property
    def size(self) -> int:
        return len(self.points)

    def to_dict(self) -> Dict[str, object]:
        """可序列化的字典（不含耗时，保证输出可逐字节复现）"""
        return {
            "space": self.space.to_dict(),
            "m": self.m,
            "points": list(self.points),
            "size": self.size,
            "method": self.method.value,
            "verified": self.verified,
            "seed": self.seed,
            "counters": dict(sorted(self.counters.items())),
            "notes": list(self.notes),
        }


def _check_points(space: SymplecticSpace, points: Sequence[int]) -> None:
    for x in points:
        if not space.is_point(x):
            raise ParameterError(f"{x} 不是 {space.params.label} 的规范点")


def _max_generator_meet(masks: Sequence[int], levels: Sequence[int], m: int) -> Tuple[int, int]:
    """一批生成子空间与（带重数的）点集的最大交及超过 m 的个数"""
    worst = 0
    violations = 0
    for mask in masks:
        meet = sum((mask & level).bit_count() for level in levels)
        if meet > worst:
            worst = meet
        if meet > m:
            violations += 1
    return worst, violations


def _verify_by_generators(space: SymplecticSpace, points: Sequence[int], m: int) -> Tuple[bool, Dict[str, int]]:
    masks = enumerate_generator_masks(space)
    multiplicity = Counter(points)
    levels = []
    for k in range(1, max(multiplicity.values(), default=0) + 1):
        level = 0
        for x, count in multiplicity.items():
            if count >= k:
                level |= 1 << x
        levels.append(level)

    threads = config.get_threads()
    chunk = max(1, -(-len(masks) // threads))
    batches = [masks[i:i + chunk] for i in range(0, len(masks), chunk)]
    if threads > 1 and len(batches) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda batch: _max_generator_meet(batch, levels, m), batches))
    else:
        results = [_max_generator_meet(batch, levels, m) for batch in batches]

    worst = max((w for w, _ in results), default=0)
    violations = sum(v for _, v in results)
    counters = {"generators_checked": len(masks), "max_generator_meet": worst, "violating_generators": violations}
    return violations == 0, counters


def _verify_by_cliques(space: SymplecticSpace, points: Sequence[int], m: int) -> Tuple[bool, Dict[str, int]]:
    graph = collinearity_graph(space, points)
    omega = clique_number(graph, cap=m)
    return omega <= m, {"clique_number_capped": omega}


def verify_partial_m_ovoid(space: SymplecticSpace, points: Sequence[int], m: int,
                           method: Optional[VerificationMethod] = None,
                           cross_check: bool = False, seed: Optional[int] = None) -> OvoidCertificate:
    """
    验证点集是否与每个生成子空间至多交于 m 个点

    重复的点按重数计入。团方法检查点集上共线图的团数 ≤ m；
    辛空间中两两共线的点张成全迷向子空间，两种方法等价。

    Args:
        space: 辛空间
        points: 点列表
        m: 上限
        method: 验证方法，缺省为团方法
        cross_check: 可行时（q = 2 且秩不超过枚举上限）同时运行生成子空间穷举并记录一致性
        seed: 点集来源的随机种子，原样记录

    Returns:
        OvoidCertificate
    """
    if m < 0:
        raise ParameterError("m 必须非负")
    method = method or VerificationMethod.CLIQUE_BOUND
    points = tuple(points)
    _check_points(space, points)

    start = time.perf_counter()
    if method is VerificationMethod.GENERATOR_EXHAUSTIVE:
        verified, counters = _verify_by_generators(space, points, m)
    else:
        verified, counters = _verify_by_cliques(space, points, m)

    notes: List[str] = []
    if len(set(points)) != len(points):
        notes.append(f"点列表含重复，按重数计入（{len(points) - len(set(points))} 个重复）")
    if cross_check and space.q == 2 and space.r <= config.get_int("max_generator_rank"):
        other_method = (VerificationMethod.CLIQUE_BOUND if method is VerificationMethod.GENERATOR_EXHAUSTIVE
                        else VerificationMethod.GENERATOR_EXHAUSTIVE)
        other_verified, other_counters = (
            _verify_by_cliques(space, points, m) if other_method is VerificationMethod.CLIQUE_BOUND
            else _verify_by_generators(space, points, m)
        )
        counters.update(other_counters)
        counters["cross_check_agrees"] = int(other_verified == verified)
        notes.append(f"交叉验证 {other_method.value}: {'一致' if other_verified == verified else '不一致'}")
        if other_verified != verified:
            logger.error("两种验证方法结论不一致: %s", space.params.label)
            verified = False

    elapsed = time.perf_counter() - start
    counters["points"] = len(points)
    return OvoidCertificate(
        space=space.params, m=m, points=points, method=method, verified=verified,
        seed=seed, wall_time=elapsed, counters=counters, notes=tuple(notes),
    )


def _non_orthogonality_graph(vectors: Sequence[int], dimension: int) -> Graph:
    """成员之间内积为 1 时相邻（按下标，不同下标的相同向量也相邻）"""
    if not vectors:
        return Graph(0, [])
    bits = BitMatrix.from_int_rows(list(vectors), dimension).to_dense().astype(np.int64)
    parity = (bits @ bits.T) & 1
    np.fill_diagonal(parity, 0)
    return Graph(len(vectors), BitMatrix.from_dense(parity).row_ints(), validate=False)


def nearly_orthogonal_verify(family: VectorFamily, m: int) -> bool:
    """
    m-近正交性：没有自正交向量，且任意 m+1 个成员中有一对正交

    Args:
        family: 向量族
        m: 参数

    Returns:
        是否 m-近正交
    """
    if any(not v.bit_count() & 1 for v in family.vectors):
        return False
    graph = _non_orthogonality_graph(family.vectors, family.dimension)
    return clique_number(graph, cap=m) <= m


def oddtown_verify(sets: Sequence[int], m: int, t: Optional[int] = None) -> bool:
    """
    广义 Oddtown：每个集合为奇数阶，任意 m+1 个成员中有一对交集为偶数阶

    Args:
        sets: 子集掩码（第 i 位对应元素 i+1）
        m: 参数
        t: 基集大小，缺省取能容纳所有集合的最小值

    Returns:
        是否满足
    """
    sets = [int(s) for s in sets]
    if any(not s.bit_count() & 1 for s in sets):
        return False
    if t is None:
        t = max((s.bit_length() for s in sets), default=0)
    graph = _non_orthogonality_graph(sets, t)
    return clique_number(graph, cap=m) <= m


def graph_to_vectors(graph: Graph) -> VectorFamily:
    """
    A_G + I 的 Lempel 分解的行向量

    不同顶点的行正交当且仅当顶点不相邻，每行与自身内积为 1，
    所以 ω(G) ≤ m 时该族 m-近正交。
    """
    factor = lempel_factor(graph.adjacency_bitmatrix(plus_identity=True))
    return VectorFamily(factor.cols, tuple(factor.row_ints()))


def construct_2ovoid_bch(h: int) -> VectorFamily:
    """
    BCH 构造的 2-近正交集：2^{2h} 个向量，维数为 rank_F2(A + I)

    Args:
        h: 1 ≤ h ≤ 7

    Returns:
        VectorFamily
    """
    max_h = min(7, config.get_int("bch_max_h"))
    if not 1 <= h <= max_h:
        raise ParameterError(f"h 必须在 1..{max_h} 之间，收到 {h}")
    family = graph_to_vectors(bch_cayley(h))
    logger.info("BCH h=%d: %d 个向量，维数 %d", h, len(family), family.dimension)
    return family


def bch_rank_bound(h: int) -> int:
    """⌊(1+√2)/2 · (2+√2)^h⌋，全程整数运算"""
    if h < 0:
        raise ParameterError("h 必须非负")
    a, b = 1, 0
    for _ in range(h):
        a, b = 2 * a + 2 * b, a + 2 * b
    # (1+√2)(a+b√2) = c + d√2，d ≥ 1 时 d√2 是无理数
    c, d = a + 2 * b, a + b
    return (c + math.isqrt(2 * d * d)) // 2


@dataclass(frozen=True)
class BchReport:
    h: int
    vectors: int
    rank: int
    bound: int
    nearly_orthogonal: Optional[bool] = None

    @property
    def gap(self) -> int:
        return self.bound - self.rank

    @property
    def exponent(self) -> float:
        """log(2^{2h}) / log(rank)"""
        return 2 * self.h * math.log(2) / math.log(self.rank) if self.rank > 1 else math.inf

    def to_dict(self) -> Dict[str, object]:
        return {
            "h": self.h,
            "vectors": self.vectors,
            "rank": self.rank,
            "bound": self.bound,
            "gap": self.gap,
            "exponent": round(self.exponent, 6),
            "nearly_orthogonal": self.nearly_orthogonal,
        }


def bch_report(h: int, check: bool = False) -> BchReport:
    """BCH 构造的实测秩与理论上界对比"""
    family = construct_2ovoid_bch(h)
    verdict = nearly_orthogonal_verify(family, 2) if check else None
    return BchReport(h, len(family), family.dimension, bch_rank_bound(h), verdict)


def bls_target_base(graph: Graph, m: int) -> float:
    """
    强积放大的目标底数 n / (Σ_{t≤m} t^{m+1} a_t)^{1/(m+1)}

    Args:
        graph: 底图
        m: 团数上限

    Returns:
        底数
    """
    census = clique_census(graph, m)
    weighted = sum(t ** (m + 1) * census.a(t) for t in range(1, m + 1))
    return math.exp(math.log(graph.n) - math.log(weighted) / (m + 1))


@dataclass(frozen=True)
class AmplificationResult:
    graph: Graph
    clique_number: int
    rank: int
    rank_bound: int
    target_count: float
    deletions: int
    power_vertices: int
    seed: int

    def to_dict(self) -> Dict[str, object]:
        return {
            "vertices": self.graph.n,
            "edges": self.graph.edge_count(),
            "clique_number": self.clique_number,
            "rank": self.rank,
            "rank_bound": self.rank_bound,
            "target_count": round(self.target_count, 6),
            "deletions": self.deletions,
            "power_vertices": self.power_vertices,
            "seed": self.seed,
        }


def amplify_bls(graph: Graph, m: int, h: int, seed: Optional[int] = None) -> AmplificationResult:
    """
    强幂加随机删点：G^⊠h 中反复找 (m+1) 阶团并删去其中存活度最大的点

    Args:
        graph: 底图
        m: 团数上限，至少为 2
        h: 强幂次数
        seed: 随机种子（只用于同度点之间的次序）

    Returns:
        AmplificationResult，其中 ω(Δ) ≤ m 且 rank_F2(A_Δ + I) ≤ rank_F2(A_G + I)^h
    """
    if m < 2:
        raise ParameterError("m 至少为 2")
    if h < 1:
        raise ParameterError("h 至少为 1")
    if seed is None:
        seed = config.get_seed()
    power = strong_power(graph, h)
    priority = make_rng(seed).permutation(power.n).tolist()
    adjacency = power.adjacency
    alive = (1 << power.n) - 1
    deletions = 0
    while True:
        clique = find_clique(power, m + 1, alive)
        if clique is None:
            break
        victim = max(clique, key=lambda v: ((adjacency[v] & alive).bit_count(), priority[v]))
        alive &= ~(1 << victim)
        deletions += 1
        if deletions % 1000 == 0:
            logger.info("强积放大: 已删除 %d 个顶点", deletions)

    result = power.induced_subgraph(list(iter_bits(alive)))
    omega = clique_number(result, cap=m)
    base_rank = complementary_rank_f2(graph)
    target = (bls_target_base(graph, m) ** h) / m - 1
    logger.info("强积放大完成: %d -> %d 个顶点, ω ≤ %d", power.n, result.n, omega)
    return AmplificationResult(
        graph=result,
        clique_number=omega,
        rank=complementary_rank_f2(result),
        rank_bound=base_rank ** h,
        target_count=target,
        deletions=deletions,
        power_vertices=power.n,
        seed=seed,
    )


def sampling_exponent(params: PolarSpaceParams, m: int) -> Fraction:
    """-r(r+1)/(2(m+1)) - r(e-1)/(m+1) - r + 1"""
    r, e = params.r, params.e
    return Fraction(-r * (r + 1), 2 * (m + 1)) - Fraction(r * (e - 1), m + 1) - r + 1


def default_sampling_probability(params: PolarSpaceParams, m: int) -> float:
    """随机构造的默认抽样概率 ρ = q^{exponent}"""
    if m < 1:
        raise ParameterError("m 至少为 1")
    return float(params.q) ** float(sampling_exponent(params, m))


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    sample_size: int
    unpruned_verified: bool
    pruned_size: int
    deletions: int


@dataclass(frozen=True)
class SamplerRun:
    certificate: OvoidCertificate
    trials: Tuple[TrialRecord, ...]
    rho: float
    target_size: int

    @property
    def unpruned_successes(self) -> int:
        return sum(t.unpruned_verified for t in self.trials)

    @property
    def size_hits(self) -> int:
        return sum(t.sample_size >= self.target_size for t in self.trials)

    @property
    def joint_hits(self) -> int:
        return sum(t.unpruned_verified and t.sample_size >= self.target_size for t in self.trials)


def _as_symplectic(space: Union[SymplecticSpace, PolarSpaceParams]) -> SymplecticSpace:
    if isinstance(space, SymplecticSpace):
        return space
    if space.family is not PolarFamily.SYMPLECTIC:
        raise ParameterError("随机构造只支持辛空间（其余族不提供点枚举）")
    return SymplecticSpace(space.r, space.q)


def run_sampler(space: Union[SymplecticSpace, PolarSpaceParams], m: int, rho: Optional[float] = None,
                trials: Optional[int] = None, seed: Optional[int] = None) -> SamplerRun:
    """
    独立以概率 ρ 抽取每个点，再对每个违规团删去其中度最大的点

    Args:
        space: 辛空间或其参数
        m: 团数上限
        rho: 抽样概率，缺省为默认 ρ
        trials: 试验次数，缺省读取配置
        seed: 根种子，缺省读取配置

    Returns:
        SamplerRun，证书为所有试验中修剪后最大的点集
    """
    space = _as_symplectic(space)
    if m < 1:
        raise ParameterError("m 至少为 1")
    if rho is None:
        rho = default_sampling_probability(space.params, m)
    if not 0.0 <= rho <= 1.0:
        raise ParameterError(f"抽样概率必须在 [0, 1] 中，收到 {rho}")
    trials = config.get_int("sampler_trials") if trials is None else trials
    if trials < 1:
        raise ParameterError("试验次数至少为 1")
    seed = config.get_seed() if seed is None else seed

    points = space.points()
    graph = collinearity_graph(space, points)
    adjacency = graph.adjacency
    target = math.floor(rho * len(points))
    records: List[TrialRecord] = []
    best_mask, best_trial = 0, 0

    for index, rng in enumerate(spawn_rngs(seed, trials)):
        chosen = np.flatnonzero(rng.random(len(points)) < rho).tolist()
        alive = 0
        for i in chosen:
            alive |= 1 << i
        clique = find_clique(graph, m + 1, alive)
        unpruned = clique is None
        deletions = 0
        while clique is not None:
            # 度最大者优先，同度取最小下标
            victim = min(clique, key=lambda v: (-(adjacency[v] & alive).bit_count(), v))
            alive &= ~(1 << victim)
            deletions += 1
            clique = find_clique(graph, m + 1, alive)
        records.append(TrialRecord(index, len(chosen), unpruned, alive.bit_count(), deletions))
        if alive.bit_count() > best_mask.bit_count():
            best_mask, best_trial = alive, index

    run_points = [points[i] for i in iter_bits(best_mask)]
    certificate = verify_partial_m_ovoid(space, run_points, m, seed=seed)
    counters = dict(certificate.counters)
    counters.update({
        "trials": trials,
        "best_trial": best_trial,
        "target_size": target,
        "unpruned_successes": sum(r.unpruned_verified for r in records),
        "size_hits": sum(r.sample_size >= target for r in records),
        "joint_hits": sum(r.unpruned_verified and r.sample_size >= target for r in records),
    })
    notes = certificate.notes + (f"rho={rho!r}",)
    certificate = replace(certificate, counters=counters, notes=notes)
    logger.info("随机构造 %s m=%d: 最佳规模 %d (目标 %d)", space.params.label, m, certificate.size, target)
    return SamplerRun(certificate, tuple(records), rho, target)


def random_partial_m_ovoid(space: Union[SymplecticSpace, PolarSpaceParams], m: int, rho: Optional[float] = None,
                           trials: Optional[int] = None, seed: Optional[int] = None) -> OvoidCertificate:
    """随机构造部分 m-卵形体，返回最佳证书"""
    return run_sampler(space, m, rho, trials, seed).certificate


def embedding_model(dimension: int) -> EvenWeightModel:
    """维数 t 补到大于 t 的最小奇数 t'，使用 W(t'-2, 2)"""
    padded = dimension + 1 if dimension % 2 == 0 else dimension + 2
    return EvenWeightModel((padded - 1) // 2)


def embed_to_symplectic(family: VectorFamily, m: int,
                        method: Optional[VerificationMethod] = None) -> OvoidCertificate:
    """
    经偶重补集模型把向量族嵌入辛空间并在辛空间一侧验证

    Args:
        family: 向量族
        m: 参数
        method: 验证方法，缺省为团方法

    Returns:
        OvoidCertificate，计数器记录与 nearly_orthogonal_verify 是否一致
    """
    model = embedding_model(family.dimension)
    self_orthogonal = [v for v in family.vectors if not v.bit_count() & 1]
    points = [model.subset_to_point(v) for v in family.vectors if v.bit_count() & 1]
    certificate = verify_partial_m_ovoid(model.space, points, m, method)

    notes = list(certificate.notes)
    verified = certificate.verified
    if self_orthogonal:
        verified = False
        notes.append(f"{len(self_orthogonal)} 个偶重（自正交）向量无法嵌入")
    if family.has_repeats():
        notes.append("向量族含重复成员，对应点按重数计入")
    nearly = nearly_orthogonal_verify(family, m)
    counters = dict(certificate.counters)
    counters["dimension"] = family.dimension
    counters["nearly_orthogonal_agrees"] = int(nearly == verified)
    if nearly != verified:
        logger.error("嵌入两侧结论不一致: 维数 %d, m=%d", family.dimension, m)
    return replace(certificate, verified=verified, counters=counters, notes=tuple(notes))


def monotone_certificate(certificate: OvoidCertificate) -> OvoidCertificate:
    """部分 m-卵形体也是部分 (m+1)-卵形体"""
    if not certificate.verified:
        raise ParameterError("只有已验证的证书可以提升 m")
    return replace(certificate, m=certificate.m + 1, notes=certificate.notes + (f"由 m={certificate.m} 提升",))
