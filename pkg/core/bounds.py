"""
界与不存在性判定模块
p-秩部分卵形体界、基于 Ramsey 数的部分 m-卵形体界、谱方法的部分 2-卵形体界、
强正则图参数与 m-卵形体大小。所有数值均为精确整数，对数阈值用整数幂比较判定
"""
import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from core.errors import ParameterError
from core.fields import is_prime
from core.geometry import PolarFamily, PolarSpaceParams, parse_family, polar_params, theta
from utils.logger import get_logger

logger = get_logger("core.bounds")

CSV_COLUMNS = ("family", "r", "q", "m", "bound-name", "value", "verdict")


def _binom(n: int, k: int) -> int:
    """越界时为 0 的二项式系数"""
    if k < 0 or n < 0 or k > n:
        return 0
    return comb(n, k)


@dataclass(frozen=True)
class BoundCase:
    """某一条定理分支给出的界"""

    tag: str
    value: int


def _field_exponent(family: PolarFamily, q: int) -> Tuple[int, int]:
    """(p, h)：辛与二次型族 q = p^h，Hermitian 族 q = p^{2h}"""
    params = PolarSpaceParams(family, 1, q)
    p, h = params.p, params.h
    if family.is_hermitian:
        if h % 2:
            raise ParameterError(f"Hermitian 极空间的域阶必须是平方数，收到 q={q}")
        h //= 2
    return p, h


def partial_ovoid_bound_cases(family: Union[str, PolarFamily], n: int, p: int, h: int) -> List[BoundCase]:
    """
    p-秩部分卵形体界的全部适用分支

    Args:
        family: 极空间族（Hermitian 族的域阶为 p^{2h}）
        n: 向量空间维数，至少为 4
        p: 特征
        h: 指数

    Returns:
        BoundCase 列表
    """
    family = parse_family(family, n)
    if n < 4:
        raise ParameterError(f"p-秩界需要 n ≥ 4，收到 {n}")
    if not is_prime(p) or h < 1:
        raise ParameterError(f"无效的域参数 p={p}, h={h}")

    if family is PolarFamily.SYMPLECTIC:
        if n % 2:
            raise ParameterError("辛空间的维数必须为偶数")
        return [BoundCase("prank-symplectic", _binom(p + n - 1, p - 1) ** h + 1)]

    if family.is_quadric:
        if p == 2:
            if n % 2 == 0:
                return [BoundCase("prank-quadric-even", n ** h + 1)]
            return [BoundCase("prank-quadric-odd", (n - 1) ** h + 1)]
        base = _binom(n + p - 2, p - 1) - _binom(n + p - 4, p - 3)
        cases = [BoundCase("prank-quadric", base ** h + 1)]
        for u in range(1, (n + p - 5) // p + 1):
            if (u + 1 - n) % 2 == 0 and n - 3 <= u * p <= n + p - 5:
                refined = base - _binom(u * p + 2, n - 1) + _binom(u * p, n - 1)
                cases.append(BoundCase(f"prank-quadric-refined(u={u})", refined ** h + 1))
        return cases

    base = _binom(n + p - 2, p - 1) ** 2 - _binom(n + p - 3, p - 2) ** 2
    cases = [BoundCase("prank-hermitian", base ** h + 1)]
    for u in range(1, (n + p - 4) // p + 1):
        if n - 2 <= u * p <= n + p - 4:
            refined = base - _binom(u * p + 1, n - 1) ** 2 + _binom(u * p, n - 1) ** 2
            cases.append(BoundCase(f"prank-hermitian-refined(u={u})", refined ** h + 1))
    return cases


def partial_ovoid_bound(family: Union[str, PolarFamily], n: int, p: int, h: int) -> int:
    """全部适用分支中的最小界"""
    return min(case.value for case in partial_ovoid_bound_cases(family, n, p, h))


def space_partial_ovoid_cases(space: PolarSpaceParams) -> List[BoundCase]:
    """空间自身维数下的部分卵形体界；维数小于 4 时退化为点数"""
    if space.dimension < 4:
        return [BoundCase("points", space.points)]
    p, h = _field_exponent(space.family, space.q)
    return partial_ovoid_bound_cases(space.family, space.dimension, p, h)


def ramsey_upper(s: int, t: int) -> int:
    """R(s, t) ≤ C(s+t-2, s-1)"""
    if s < 1 or t < 1:
        raise ParameterError("Ramsey 参数必须为正")
    return comb(s + t - 2, s - 1)


def partial_movoid_ramsey_bound(space: PolarSpaceParams, m: int) -> int:
    """
    |O_m| < R(m+1, k+1)，k 为部分卵形体界

    Returns:
        R(m+1, k+1) 的上界减 1
    """
    if m < 1:
        raise ParameterError("m 至少为 1")
    k = min(case.value for case in space_partial_ovoid_cases(space))
    return ramsey_upper(m + 1, k + 1) - 1


def movoid_size(space: PolarSpaceParams, m: int) -> int:
    """m-卵形体的大小 m·(q^{r+e-1} + 1)"""
    return m * space.ovoid_number


@dataclass(frozen=True)
class SpectralBound:
    """部分 2-卵形体的谱界：统一公式、闭式与取最小分支后的加细值"""

    generic: int
    closed_form: int
    refined: int

    @property
    def agrees(self) -> bool:
        return self.generic == self.closed_form


def _uniform_base(space: PolarSpaceParams, n: int) -> int:
    """闭式所用的统一底界 b(n, q)"""
    p, h = _field_exponent(space.family, space.q)
    family = space.family
    if family is PolarFamily.SYMPLECTIC:
        return _binom(p + n - 1, p - 1) ** h + 1
    if family.is_quadric:
        return (_binom(n + p - 2, p - 1) - _binom(n + p - 4, p - 3)) ** h + 1
    return (_binom(n + p - 2, p - 1) ** 2 - _binom(n + p - 3, p - 2) ** 2) ** h + 1


def _closed_form(space: PolarSpaceParams) -> int:
    family, r, n = space.family, space.r, space.dimension
    p, h = _field_exponent(family, space.q)
    if family is PolarFamily.SYMPLECTIC:
        q = space.q
        return q ** r + q + 1 + q * _binom(p + 2 * r - 3, p - 1) ** h
    if family.is_quadric:
        q = space.q
        epsilon = {PolarFamily.ELLIPTIC: -1, PolarFamily.PARABOLIC: 0, PolarFamily.HYPERBOLIC: 1}[family]
        bracket = _binom(n + p - 4, p - 1) - _binom(n + p - 6, p - 3)
        return q ** (r - epsilon) + q + 1 + q * bracket ** h
    root = p ** h
    bracket = _binom(n + p - 4, p - 1) ** 2 - _binom(n + p - 5, p - 2) ** 2
    top = root ** (2 * r + 1) if family is PolarFamily.HERMITIAN_ODD else root ** (2 * r - 1)
    return top + root ** 2 + 1 + root ** 2 * bracket ** h


def spectral_2ovoid_bound(space: PolarSpaceParams) -> SpectralBound:
    """
    |O_2| ≤ q·b(n-2, q) + σ_r

    Args:
        space: 秩至少为 3 的极空间

    Returns:
        SpectralBound
    """
    if space.r < 3:
        raise ParameterError("谱界需要秩 r ≥ 3")
    n_quotient = space.dimension - 2
    generic = space.q * _uniform_base(space, n_quotient) + space.ovoid_number
    p, h = _field_exponent(space.family, space.q)
    refined_base = partial_ovoid_bound(space.family, n_quotient, p, h)
    refined = space.q * refined_base + space.ovoid_number
    result = SpectralBound(generic, _closed_form(space), min(refined, generic))
    if not result.agrees:
        logger.error("谱界两种算法不一致: %s generic=%d closed=%d", space.label, generic, result.closed_form)
    return result


@dataclass(frozen=True)
class SrgParams:
    """强正则图参数与特征值重数"""

    v: int
    k: int
    e_plus: int
    e_minus: int
    lam: int
    mu: int
    f_plus: Fraction
    f_minus: Fraction

    @property
    def integral(self) -> bool:
        return self.f_plus.denominator == 1 and self.f_minus.denominator == 1

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return self.v, self.k, self.e_plus, self.e_minus


def srg_params(space: PolarSpaceParams) -> SrgParams:
    """
    极空间共线图的强正则参数

    Args:
        space: 秩至少为 2 的极空间

    Returns:
        SrgParams
    """
    if space.r < 2:
        raise ParameterError("共线图参数需要秩 r ≥ 2")
    q, r = space.q, space.r
    v = space.sigma(r) * theta(r, q)
    k = q * theta(r - 1, q) * space.sigma(r - 1)
    e_plus = q ** (r - 1) - 1
    e_minus = -space.sigma(r - 1)
    mu = k + e_plus * e_minus
    lam = mu + e_plus + e_minus
    f_plus = Fraction(-k - (v - 1) * e_minus, e_plus - e_minus)
    f_minus = (v - 1) - f_plus
    return SrgParams(v, k, e_plus, e_minus, lam, mu, f_plus, f_minus)


def induced_average_degree_bound(srg: SrgParams, size: int) -> Fraction:
    """k-正则图中 |Y| 个顶点的诱导子图平均度下界 |Y|(k - s)/v + s"""
    return Fraction(size * (srg.k - srg.e_minus), srg.v) + srg.e_minus


# ---------------------------------------------------------------- 不存在性

def log_threshold_holds(r: int, p: int, m: int) -> bool:
    """r ≥ (m + log_p((2m)^2))(p-1) + 1，按 p^A ≥ (2m)^{2(p-1)} 判定"""
    a = r - 1 - m * (p - 1)
    return a >= 0 and p ** a >= (2 * m) ** (2 * (p - 1))


def two_ovoid_threshold_holds(r: int, p: int) -> bool:
    """p ≥ 5 时 r ≥ (1 + log_p 7)p + 1；p = 2, 3 时 r ≥ 6"""
    if p in (2, 3):
        return r >= 6
    b = r - 1 - p
    return b >= 0 and p ** b >= 7 ** p


def _first_rank(predicate, limit: int = 10_000) -> Optional[int]:
    for r in range(1, limit + 1):
        if predicate(r):
            return r
    return None


def log_threshold(p: int, m: int) -> Optional[int]:
    """满足 m-卵形体不存在性推论的最小秩"""
    return _first_rank(lambda r: log_threshold_holds(r, p, m))


def two_ovoid_threshold(p: int) -> Optional[int]:
    """满足 2-卵形体不存在性推论的最小秩"""
    return _first_rank(lambda r: two_ovoid_threshold_holds(r, p))


def _classical_tag(space: PolarSpaceParams) -> Optional[str]:
    family, r = space.family, space.r
    if family is PolarFamily.SYMPLECTIC and r > 2 and space.p % 2 == 1:
        return "classical-symplectic-odd-q"
    if family is PolarFamily.ELLIPTIC and r > 2:
        return "classical-elliptic"
    if family is PolarFamily.HERMITIAN_ODD and r > 2:
        return "classical-hermitian-odd"
    if family is PolarFamily.PARABOLIC and r > 4:
        return "classical-parabolic"
    return None


@dataclass(frozen=True)
class NonexistenceVerdict:
    """m-卵形体不存在性判定：触发的全部判据，首个为主判据"""

    nonexistent: bool
    triggers: Tuple[str, ...] = ()
    ramsey_confirms: Optional[bool] = None

    @property
    def reason(self) -> Optional[str]:
        return self.triggers[0] if self.triggers else None

    def describe(self) -> str:
        return ",".join(self.triggers) if self.triggers else "none"


def movoid_nonexistence(space: PolarSpaceParams, m: int) -> NonexistenceVerdict:
    """
    按优先级依次检查各不存在性判据

    Args:
        space: 极空间参数
        m: 至少为 2

    Returns:
        NonexistenceVerdict；ramsey_confirms 记录 Ramsey 界是否直接小于 m-卵形体大小
    """
    if m < 2:
        raise ParameterError("不存在性判定需要 m ≥ 2")
    p, r = space.p, space.r
    size = movoid_size(space, m)
    ramsey = partial_movoid_ramsey_bound(space, m)
    triggers: List[str] = []
    if log_threshold_holds(r, p, m):
        triggers.append("log-threshold")
    if m == 2:
        if two_ovoid_threshold_holds(r, p):
            triggers.append("two-ovoid-threshold")
        tag = _classical_tag(space)
        if tag:
            triggers.append(tag)
        if r >= 3 and spectral_2ovoid_bound(space).refined < size:
            triggers.append("spectral")
    if ramsey < size:
        triggers.append("ramsey")
    verdict = NonexistenceVerdict(bool(triggers), tuple(triggers), ramsey < size)
    if "log-threshold" in triggers and not verdict.ramsey_confirms:
        logger.warning("%s m=%d: 推论阈值成立但 Ramsey 界 %d ≥ %d", space.label, m, ramsey, size)
    return verdict


# ---------------------------------------------------------------- 报告

@dataclass(frozen=True)
class BoundEntry:
    name: str
    value: int
    tag: str
    group: str
    is_minimum: bool = False


@dataclass(frozen=True)
class BoundReport:
    """某个空间与 m 的全部界、m-卵形体大小与不存在性判定"""

    space: PolarSpaceParams
    m: int
    entries: Tuple[BoundEntry, ...]
    movoid_size: int
    verdict: Optional[NonexistenceVerdict]
    thresholds: Dict[str, Optional[int]] = field(default_factory=dict)

    def best(self, group: str = "partial_movoid") -> Optional[BoundEntry]:
        return next((e for e in self.entries if e.group == group and e.is_minimum), None)

    def value(self, name: str) -> Optional[int]:
        return next((e.value for e in self.entries if e.name == name), None)

    def rows(self) -> List[Tuple[object, ...]]:
        verdict = self.verdict.describe() if self.verdict else "n/a"
        return [
            (self.space.family.value, self.space.r, self.space.q, self.m, entry.name, entry.value, verdict)
            for entry in self.entries
        ]

    def to_dict(self) -> Dict[str, object]:
        return {
            "space": self.space.to_dict(),
            "m": self.m,
            "movoid_size": self.movoid_size,
            "entries": [
                {"name": e.name, "value": e.value, "tag": e.tag, "group": e.group, "minimum": e.is_minimum}
                for e in self.entries
            ],
            "verdict": None if self.verdict is None else {
                "nonexistent": self.verdict.nonexistent,
                "triggers": list(self.verdict.triggers),
                "ramsey_confirms": self.verdict.ramsey_confirms,
            },
            "thresholds": dict(self.thresholds),
        }


def _mark_minimum(entries: List[BoundEntry]) -> List[BoundEntry]:
    marked = []
    for group in dict.fromkeys(e.group for e in entries):
        members = [e for e in entries if e.group == group]
        low = min(e.value for e in members)
        first = True
        for e in members:
            flag = first and e.value == low
            if flag:
                first = False
            marked.append(BoundEntry(e.name, e.value, e.tag, e.group, flag))
    return marked


def bound_report(space: PolarSpaceParams, m: int) -> BoundReport:
    """
    汇总一个空间在给定 m 下的全部界

    Args:
        space: 极空间参数
        m: 至少为 1

    Returns:
        BoundReport
    """
    if m < 1:
        raise ParameterError("m 至少为 1")
    entries: List[BoundEntry] = [
        BoundEntry(f"partial_ovoid[{case.tag}]", case.value, case.tag, "partial_ovoid")
        for case in space_partial_ovoid_cases(space)
    ]
    entries.append(BoundEntry("ramsey", partial_movoid_ramsey_bound(space, m), "ramsey", "partial_movoid"))
    if m == 2 and space.r >= 3:
        spectral = spectral_2ovoid_bound(space)
        entries.append(BoundEntry("spectral", spectral.generic, "spectral", "partial_movoid"))
        entries.append(BoundEntry("spectral_closed", spectral.closed_form, "spectral-closed", "partial_movoid"))
        entries.append(BoundEntry("spectral_refined", spectral.refined, "spectral-refined", "partial_movoid"))
    verdict = movoid_nonexistence(space, m) if m >= 2 else None
    thresholds = {"log-threshold": log_threshold(space.p, m) if m >= 2 else None}
    if m == 2:
        thresholds["two-ovoid-threshold"] = two_ovoid_threshold(space.p)
    return BoundReport(space, m, tuple(_mark_minimum(entries)), movoid_size(space, m), verdict, thresholds)


def bound_grid(families: Iterable[Union[str, PolarFamily]], ranks: Iterable[int], orders: Iterable[int],
               m: int) -> List[Tuple[object, ...]]:
    """
    参数网格上每组参数一行摘要：最佳部分 m-卵形体界及判定

    Returns:
        按 CSV_COLUMNS 排列的行
    """
    rows = []
    for family in families:
        for r in ranks:
            for q in orders:
                report = bound_report(polar_params(family, r, q), m)
                best = report.best()
                verdict = report.verdict.describe() if report.verdict else "n/a"
                rows.append((report.space.family.value, r, q, m, best.name, best.value, verdict))
    return rows


def rows_to_csv(rows: Sequence[Sequence[object]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    writer.writerows(rows)
    return buffer.getvalue()
