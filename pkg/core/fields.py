"""
有限域算术模块
素域 GF(p) 与特征 2 扩域 GF(2^h)，模多项式取字典序最小的不可约多项式
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, List, Tuple

from core.errors import ParameterError

MAX_EXTENSION_DEGREE = 16


def is_prime(n: int) -> bool:
    """试除法判断素数"""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_power(q: int) -> Tuple[int, int]:
    """
    把 q 分解为 p^h

    Returns:
        (p, h)
    """
    if q < 2:
        raise ParameterError(f"{q} 不是素数幂")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    h = 0
    rest = q
    while rest % p == 0:
        rest //= p
        h += 1
    if rest != 1:
        raise ParameterError(f"{q} 不是素数幂")
    return p, h


def _poly_mod(a: int, b: int) -> int:
    """GF(2)[x] 中 a mod b（按位编码）"""
    db = b.bit_length()
    while a.bit_length() >= db:
        a ^= b << (a.bit_length() - db)
    return a


def is_irreducible_gf2(poly: int) -> bool:
    """
    穷举因子判断 GF(2)[x] 中多项式是否不可约

    Args:
        poly: 按位编码的多项式（第 i 位是 x^i 的系数）

    Returns:
        是否不可约
    """
    degree = poly.bit_length() - 1
    if degree < 1:
        return False
    # 只需试除次数不超过 degree/2 的因子
    for factor in range(2, 1 << (degree // 2 + 1)):
        if _poly_mod(poly, factor) == 0:
            return False
    return True


@lru_cache(maxsize=None)
def _smallest_irreducible(h: int) -> int:
    # 只取常数项为 1 的多项式，h = 1 时为 x + 1
    for poly in range((1 << h) | 1, 1 << (h + 1), 2):
        if is_irreducible_gf2(poly):
            return poly
    raise RuntimeError(f"不存在 {h} 次不可约多项式")  # pragma: no cover


@dataclass(frozen=True)
class FieldSpec:
    """有限域描述：特征 p、扩张次数 h 与模多项式（仅特征 2 扩域使用）"""

    p: int
    h: int = 1
    modulus: int = 0

    @property
    def order(self) -> int:
        return self.p ** self.h

    @property
    def is_binary_extension(self) -> bool:
        return self.p == 2 and self.h >= 1 and self.modulus != 0

    def element(self, value: int) -> "FieldElement":
        """由整数代表构造元素（素域取模，扩域要求已约化）"""
        if self.is_binary_extension:
            if not 0 <= value < self.order:
                raise ParameterError(f"{value} 不是 GF(2^{self.h}) 的约化代表")
            return FieldElement(self, value)
        return FieldElement(self, value % self.p)

    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def elements(self) -> Iterator["FieldElement"]:
        for value in range(self.order):
            yield FieldElement(self, value)

    def nonzero_elements(self) -> List["FieldElement"]:
        return [FieldElement(self, value) for value in range(1, self.order)]

    def __str__(self) -> str:
        if self.is_binary_extension:
            return f"GF(2^{self.h}) mod {bin(self.modulus)}"
        return f"GF({self.p})"


def gf2h_make(h: int) -> FieldSpec:
    """
    构造 GF(2^h)

    Args:
        h: 扩张次数，1 ≤ h ≤ 16

    Returns:
        以常数项为 1 的字典序最小不可约多项式为模的域
    """
    if not 1 <= h <= MAX_EXTENSION_DEGREE:
        raise ParameterError(f"h 必须在 1..{MAX_EXTENSION_DEGREE} 之间，收到 {h}")
    return FieldSpec(p=2, h=h, modulus=_smallest_irreducible(h))


def gfp_make(p: int) -> FieldSpec:
    """构造素域 GF(p)"""
    if not is_prime(p):
        raise ParameterError(f"{p} 不是素数")
    return FieldSpec(p=p, h=1, modulus=0)


def field_of_order(q: int) -> FieldSpec:
    """阶为 q 的域：素数或 2 的幂"""
    p, h = prime_power(q)
    if h == 1:
        return gfp_make(p)
    if p == 2:
        return gf2h_make(h)
    raise ParameterError(f"不支持奇特征扩域 GF({q})")


def _clmul_reduce(a: int, b: int, modulus: int, h: int) -> int:
    """无进位乘法后按模多项式约化"""
    result = 0
    while b:
        if b & 1:
            result ^= a
        b >>= 1
        a <<= 1
        if a >> h:
            a ^= modulus
    return result


@dataclass(frozen=True)
class FieldElement:
    """有限域元素，value 总是约化后的代表"""

    spec: FieldSpec
    value: int

    def _check(self, other: "FieldElement") -> None:
        if not isinstance(other, FieldElement) or other.spec != self.spec:
            raise ParameterError(f"域不一致: {self.spec} 与 {getattr(other, 'spec', other)}")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        if self.spec.is_binary_extension:
            return FieldElement(self.spec, self.value ^ other.value)
        return FieldElement(self.spec, (self.value + other.value) % self.spec.p)

    def __neg__(self) -> "FieldElement":
        if self.spec.is_binary_extension:
            return self
        return FieldElement(self.spec, (-self.value) % self.spec.p)

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return self + (-other)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        spec = self.spec
        if spec.is_binary_extension:
            return FieldElement(spec, _clmul_reduce(self.value, other.value, spec.modulus, spec.h))
        return FieldElement(spec, (self.value * other.value) % spec.p)

    def __pow__(self, exponent: int) -> "FieldElement":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = self.spec.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise ZeroDivisionError("零元没有逆元")
        # 乘法群阶为 q-1
        return self ** (self.spec.order - 2)

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return self * other.inverse()

    def is_zero(self) -> bool:
        return self.value == 0

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"FieldElement({self.value}, {self.spec})"


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def sub(a: FieldElement, b: FieldElement) -> FieldElement:
    return a - b


def neg(a: FieldElement) -> FieldElement:
    return -a


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def pow(a: FieldElement, exponent: int) -> FieldElement:  # noqa: A001
    return a ** exponent


def inverse(a: FieldElement) -> FieldElement:
    return a.inverse()


def div(a: FieldElement, b: FieldElement) -> FieldElement:
    return a / b
