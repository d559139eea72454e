"""
精确线性代数模块
GF(2) 上的打包矩阵、秩、Lempel 分解，整数矩阵的 Bareiss 秩，
以及二元向量群上 Cayley 图谱所需的快速 Walsh 变换
"""
from collections import Counter
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from core.errors import ParameterError
from utils.logger import get_logger

logger = get_logger("core.gf2linalg")

WORD_BITS = 64
# 小于 2^31 的素数，保证乘积不溢出 int64
DEFAULT_PRIME = 2147483629


def _word_count(cols: int) -> int:
    return max(1, -(-cols // WORD_BITS))


def _pack(dense: np.ndarray) -> np.ndarray:
    """把 0/1 稠密矩阵按行打包成 uint64 字（低位在前）"""
    rows, cols = dense.shape
    nwords = _word_count(cols)
    padded = np.zeros((rows, nwords * WORD_BITS), dtype=np.uint8)
    padded[:, :cols] = dense
    packed = np.ascontiguousarray(np.packbits(padded, axis=1, bitorder="little"))
    return packed.view("<u8").astype(np.uint64)


def _unpack(words: np.ndarray, cols: int) -> np.ndarray:
    """_pack 的逆运算"""
    as_bytes = np.ascontiguousarray(words.astype("<u8")).view(np.uint8)
    bits = np.unpackbits(as_bytes, axis=1, bitorder="little")
    return bits[:, :cols]


def _int_to_words(value: int, nwords: int) -> np.ndarray:
    return np.frombuffer(value.to_bytes(nwords * 8, "little"), dtype="<u8").astype(np.uint64)


def _words_to_int(words: np.ndarray) -> int:
    return int.from_bytes(words.astype("<u8").tobytes(), "little")


def dot_f2(x: int, y: int) -> int:
    """两个按位编码的二元向量的标准内积"""
    return (x & y).bit_count() & 1


class BitMatrix:
    """按 64 位字打包的 GF(2) 稠密矩阵，构造后不可修改"""

    __slots__ = ("rows", "cols", "_words")

    def __init__(self, rows: int, cols: int, words: np.ndarray):
        """
        初始化矩阵

        Args:
            rows: 行数
            cols: 列数
            words: 形状为 (rows, ceil(cols/64)) 的 uint64 数组，填充位必须为 0
        """
        words = np.array(words, dtype=np.uint64, copy=True)
        if words.shape != (rows, _word_count(cols)):
            raise ParameterError(f"打包数组形状 {words.shape} 与 {rows}x{cols} 不符")
        words.setflags(write=False)
        self.rows = rows
        self.cols = cols
        self._words = words

    @classmethod
    def from_dense(cls, dense: Union[np.ndarray, Sequence[Sequence[int]]]) -> "BitMatrix":
        """由 0/1 稠密数组构造"""
        array = np.asarray(dense)
        if array.ndim != 2:
            if array.size == 0:
                array = array.reshape(0, 0)
            else:
                raise ParameterError("需要二维数组")
        if np.any((array != 0) & (array != 1)):
            raise ParameterError("矩阵元素必须是 0 或 1")
        array = array.astype(np.uint8)
        return cls(array.shape[0], array.shape[1], _pack(array))

    @classmethod
    def from_rows(cls, rows: Sequence[Union[str, Sequence[int]]], cols: Optional[int] = None) -> "BitMatrix":
        """由行列表构造，每行可以是 '0101' 字符串或整数序列"""
        parsed = [[int(ch) for ch in row] if isinstance(row, str) else [int(x) for x in row] for row in rows]
        if cols is None:
            cols = len(parsed[0]) if parsed else 0
        if any(len(row) != cols for row in parsed):
            raise ParameterError("各行长度不一致")
        return cls.from_dense(np.array(parsed, dtype=np.int64).reshape(len(parsed), cols))

    @classmethod
    def from_int_rows(cls, values: Sequence[int], cols: int) -> "BitMatrix":
        """由按位编码的行构造（第 j 位对应第 j 列）"""
        nwords = _word_count(cols)
        words = np.zeros((len(values), nwords), dtype=np.uint64)
        for i, value in enumerate(values):
            if value < 0 or value >> cols:
                raise ParameterError(f"第 {i} 行超出 {cols} 列")
            words[i] = _int_to_words(value, nwords)
        return cls(len(values), cols, words)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, np.zeros((rows, _word_count(cols)), dtype=np.uint64))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    @property
    def words(self) -> np.ndarray:
        """只读的打包数组"""
        return self._words

    def to_dense(self) -> np.ndarray:
        return _unpack(self._words, self.cols)

    def row_int(self, i: int) -> int:
        """第 i 行的按位编码"""
        if not 0 <= i < self.rows:
            raise IndexError(f"行号 {i} 越界")
        return _words_to_int(self._words[i])

    def row_ints(self) -> List[int]:
        return [_words_to_int(self._words[i]) for i in range(self.rows)]

    def __getitem__(self, index: Tuple[int, int]) -> int:
        i, j = index
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"元素 ({i}, {j}) 越界")
        word, bit = divmod(j, WORD_BITS)
        return int((int(self._words[i, word]) >> bit) & 1)

    def diagonal(self) -> np.ndarray:
        n = min(self.rows, self.cols)
        index = np.arange(n)
        shifts = (index % WORD_BITS).astype(np.uint64)
        return ((self._words[index, index // WORD_BITS] >> shifts) & np.uint64(1)).astype(np.uint8)

    def is_symmetric(self) -> bool:
        if self.rows != self.cols:
            return False
        dense = self.to_dense()
        return bool(np.array_equal(dense, dense.T))

    def is_zero(self) -> bool:
        return not self._words.any()

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense().T)

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.rows:
            raise ParameterError(f"维数不匹配: {self.shape} @ {other.shape}")
        # 0/1 乘积的和远小于 2^53，浮点 BLAS 结果是精确的
        product = self.to_dense().astype(np.float64) @ other.to_dense().astype(np.float64)
        return BitMatrix.from_dense(product.astype(np.int64) & 1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._words, other._words))

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._words.tobytes()))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"


class IntMatrix:
    """任意精度整数矩阵，构造后不可修改"""

    __slots__ = ("rows", "cols", "_entries")

    def __init__(self, entries: Sequence[Sequence[int]], cols: Optional[int] = None):
        rows = tuple(tuple(int(x) for x in row) for row in entries)
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(row) != cols for row in rows):
            raise ParameterError("各行长度不一致")
        self.rows = len(rows)
        self.cols = cols
        self._entries = rows

    @classmethod
    def from_rows(cls, rows: Sequence[Union[str, Sequence[int]]]) -> "IntMatrix":
        """每行是整数序列，或空白分隔的整数字符串"""
        return cls([row.split() if isinstance(row, str) else row for row in rows])

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls([[0] * cols for _ in range(rows)], cols)

    @classmethod
    def from_bitmatrix(cls, matrix: BitMatrix) -> "IntMatrix":
        return cls(matrix.to_dense().tolist(), matrix.cols)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    @property
    def entries(self) -> Tuple[Tuple[int, ...], ...]:
        return self._entries

    def __getitem__(self, index: Tuple[int, int]) -> int:
        i, j = index
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"元素 ({i}, {j}) 越界")
        return self._entries[i][j]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ParameterError(f"维数不匹配: {self.shape} @ {other.shape}")
        columns = list(zip(*other.entries)) if other.rows else [()] * other.cols
        return IntMatrix(
            [[sum(a * b for a, b in zip(row, col)) for col in columns] for row in self._entries],
            other.cols,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self._entries == other._entries

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._entries))

    def __repr__(self) -> str:
        return f"IntMatrix({self.rows}x{self.cols})"


def rank_f2(matrix: BitMatrix) -> int:
    """
    GF(2) 上的秩（按字并行的消元，主元取最小下标）

    Args:
        matrix: 二元矩阵

    Returns:
        秩
    """
    work = matrix.words.copy()
    n_rows = work.shape[0]
    rank = 0
    for col in range(matrix.cols):
        if rank == n_rows:
            break
        word, bit = divmod(col, WORD_BITS)
        mask = np.uint64(1 << bit)
        hits = np.flatnonzero(work[rank:, word] & mask)
        if hits.size == 0:
            continue
        pivot = rank + int(hits[0])
        if pivot != rank:
            work[[rank, pivot]] = work[[pivot, rank]]
        below = rank + 1 + np.flatnonzero(work[rank + 1:, word] & mask)
        if below.size:
            work[below] ^= work[rank]
        rank += 1
    return rank


# ⟨1⟩ ⊥ H 在系数基 (g, u, v) 下的 Gram 矩阵
_HYPERBOLIC_GRAM = ((1, 0, 0), (0, 0, 1), (0, 1, 0))


@lru_cache(maxsize=None)
def _hyperbolic_fixup() -> Tuple[Tuple[int, int, int], ...]:
    """在 3 维系数空间内穷举 C，使 C·Cᵀ = _HYPERBOLIC_GRAM"""
    for code in range(1 << 9):
        coeffs = tuple(tuple((code >> (3 * r + c)) & 1 for c in range(3)) for r in range(3))
        if all(
            sum(coeffs[a][k] * coeffs[b][k] for k in range(3)) % 2 == _HYPERBOLIC_GRAM[a][b]
            for a in range(3)
            for b in range(3)
        ):
            return coeffs
    raise RuntimeError("⟨1⟩ ⊥ H 的对角化不存在")  # pragma: no cover


def _add_outer(residual: np.ndarray, left: np.ndarray, right: np.ndarray, n: int) -> None:
    """residual ← residual + left·rightᵀ（原地）"""
    rows = np.flatnonzero(_unpack(left[None, :], n)[0])
    if rows.size:
        residual[rows] ^= right


def _first_set_bit(words: np.ndarray) -> int:
    word = int(np.flatnonzero(words)[0])
    value = int(words[word])
    return word * WORD_BITS + (value & -value).bit_length() - 1


def lempel_factor(matrix: BitMatrix) -> BitMatrix:
    """
    Lempel 分解：对称且对角线非零的二元矩阵 M 写成 B·Bᵀ，B 恰有 rank(M) 列

    Args:
        matrix: 对称二元矩阵

    Returns:
        n × rank(M) 的矩阵 B
    """
    if matrix.rows != matrix.cols or not matrix.is_symmetric():
        raise ParameterError("Lempel 分解需要对称方阵")
    n = matrix.rows
    if not matrix.diagonal().any():
        raise ParameterError("对角线全为零，不存在 B·Bᵀ 分解")

    residual = matrix.words.copy()
    index = np.arange(n)
    word_of = index // WORD_BITS
    shift_of = (index % WORD_BITS).astype(np.uint64)
    generators: List[np.ndarray] = []
    hyperbolic_steps = 0

    while True:
        diagonal = (residual[index, word_of] >> shift_of) & np.uint64(1)
        ones = np.flatnonzero(diagonal)
        if ones.size:
            i = int(ones[0])
            column = residual[i].copy()
            generators.append(column)
            _add_outer(residual, column, column, n)
            continue

        live = np.flatnonzero(residual.any(axis=1))
        if live.size == 0:
            break
        # 余项是交错形式：取双曲对 (i, j)，与第一个生成元合并成三个
        i = int(live[0])
        j = _first_set_bit(residual[i])
        u = residual[i].copy()
        v = residual[j].copy()
        _add_outer(residual, u, v, n)
        _add_outer(residual, v, u, n)
        basis = (generators[0], u, v)
        coeffs = _hyperbolic_fixup()
        merged = []
        for k in range(3):
            acc = np.zeros_like(u)
            for b in range(3):
                if coeffs[b][k]:
                    acc ^= basis[b]
            merged.append(acc)
        generators[0] = merged[0]
        generators.extend(merged[1:])
        hyperbolic_steps += 1

    if hyperbolic_steps:
        logger.debug("Lempel 分解: %d 个生成元, %d 次双曲修正", len(generators), hyperbolic_steps)
    dense = _unpack(np.stack(generators), n)
    return BitMatrix.from_dense(dense.T)


def rank_exact(matrix: IntMatrix) -> int:
    """
    有理数域上的秩（Bareiss 无分数消元，全程整数精确除法）

    Args:
        matrix: 整数矩阵

    Returns:
        秩
    """
    work = [list(row) for row in matrix.entries]
    n_rows, n_cols = matrix.rows, matrix.cols
    rank = 0
    previous = 1
    for col in range(n_cols):
        if rank == n_rows:
            break
        pivot = next((r for r in range(rank, n_rows) if work[r][col] != 0), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        head = work[rank]
        lead = head[col]
        for r in range(rank + 1, n_rows):
            row = work[r]
            factor = row[col]
            if factor:
                work[r] = [(x * lead - factor * y) // previous for x, y in zip(row, head)]
            elif lead != previous:
                work[r] = [x * lead // previous for x in row]
        previous = lead
        rank += 1
    return rank


def rank_modp(matrix: Union[IntMatrix, BitMatrix], p: int = DEFAULT_PRIME) -> int:
    """
    素域 GF(p) 上的秩（numpy 向量化），是有理秩的下界

    Args:
        matrix: 整数或二元矩阵
        p: 小于 2^31 的素数

    Returns:
        秩
    """
    if p >= 1 << 31:
        raise ParameterError("p 必须小于 2^31")
    if isinstance(matrix, BitMatrix):
        work = matrix.to_dense().astype(np.int64)
    else:
        work = np.zeros(matrix.shape, dtype=np.int64)
        for i, row in enumerate(matrix.entries):
            work[i] = [x % p for x in row]
    n_rows, n_cols = work.shape
    rank = 0
    for col in range(n_cols):
        if rank == n_rows:
            break
        hits = np.flatnonzero(work[rank:, col])
        if hits.size == 0:
            continue
        pivot = rank + int(hits[0])
        if pivot != rank:
            work[[rank, pivot]] = work[[pivot, rank]]
        inverse = pow(int(work[rank, col]), p - 2, p)
        work[rank] = (work[rank] * inverse) % p
        below = rank + 1 + np.flatnonzero(work[rank + 1:, col])
        if below.size:
            factors = work[below, col][:, None]
            work[below] = (work[below] - factors * work[rank]) % p
        rank += 1
    return rank


def check_connection_set(n: int, vectors: Iterable[int]) -> List[int]:
    if n < 0:
        raise ParameterError("维数必须非负")
    result = sorted(set(int(s) for s in vectors))
    for s in result:
        if s == 0:
            raise ParameterError("连接集不能包含零向量（否则有自环）")
        if s < 0 or s >> n:
            raise ParameterError(f"向量 {s} 不在 F_2^{n} 中")
    return result


def walsh_transform(n: int, vectors: Iterable[int]) -> np.ndarray:
    """
    快速 Walsh 变换：λ_v = Σ_{u∈S} (-1)^{u·v}，按 v 的整数编码排列

    Args:
        n: 维数
        vectors: 连接集 S（按位编码，非零）

    Returns:
        长度 2^n 的 int64 数组
    """
    support = check_connection_set(n, vectors)
    values = np.zeros(1 << n, dtype=np.int64)
    if support:
        values[support] = 1
    half = 1
    while half < values.size:
        blocks = values.reshape(-1, 2, half)
        low = blocks[:, 0, :]
        high = blocks[:, 1, :]
        values = np.stack((low + high, low - high), axis=1).reshape(-1)
        half <<= 1
    values.setflags(write=False)
    return values


def walsh_spectrum(n: int, vectors: Iterable[int]) -> Counter:
    """
    Cay(F_2^n, S) 的特征值多重集

    Args:
        n: 维数
        vectors: 连接集 S

    Returns:
        特征值 -> 重数
    """
    values = walsh_transform(n, vectors)
    unique, counts = np.unique(values, return_counts=True)
    return Counter({int(v): int(c) for v, c in zip(unique, counts)})
