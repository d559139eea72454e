"""
GF(2) 矩阵、Lempel 分解、精确秩与 Walsh 变换的测试
"""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from core.errors import ParameterError
from core.gf2linalg import (
    BitMatrix, IntMatrix, check_connection_set, dot_f2, lempel_factor, rank_exact, rank_f2,
    rank_modp, walsh_spectrum, walsh_transform,
)


def reference_rank_f2(rows):
    """按位异或基的朴素秩，作为对照"""
    basis = []
    for row in rows:
        for b in basis:
            row = min(row, row ^ b)
        if row:
            basis.append(row)
    return len(basis)


@st.composite
def bit_matrices(draw, max_rows=20, max_cols=150):
    rows = draw(st.integers(0, max_rows))
    cols = draw(st.integers(1, max_cols))
    values = draw(st.lists(st.integers(0, (1 << cols) - 1), min_size=rows, max_size=rows))
    return BitMatrix.from_int_rows(values, cols), values


@st.composite
def symmetric_matrices(draw, max_n=12, zero_diagonal=False):
    n = draw(st.integers(1, max_n))
    bits = draw(st.lists(st.integers(0, 1), min_size=n * n, max_size=n * n))
    dense = np.triu(np.array(bits, dtype=np.uint8).reshape(n, n), 1)
    dense = dense | dense.T
    if not zero_diagonal:
        diagonal = draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
        diagonal[draw(st.integers(0, n - 1))] = 1
        dense[np.arange(n), np.arange(n)] = diagonal
    return BitMatrix.from_dense(dense)


class TestBitMatrix:

    def test_from_rows_and_dense(self):
        m = BitMatrix.from_rows(["101", "011"])
        assert m.shape == (2, 3)
        assert m.to_dense().tolist() == [[1, 0, 1], [0, 1, 1]]
        assert m[0, 2] == 1 and m[1, 0] == 0
        # 第 j 列对应第 j 位
        assert m.row_int(0) == 0b101
        assert m.row_int(1) == 0b110

    def test_rejects_non_binary_entries(self):
        with pytest.raises(ParameterError):
            BitMatrix.from_dense([[0, 2], [1, 0]])

    def test_index_errors(self):
        m = BitMatrix.identity(3)
        with pytest.raises(IndexError):
            m[3, 0]
        with pytest.raises(IndexError):
            m.row_int(-1)

    def test_wide_matrix_crosses_word_boundary(self):
        values = [1 << 63, 1 << 64, (1 << 130) - 1]
        m = BitMatrix.from_int_rows(values, 131)
        assert m.row_ints() == values
        assert m[0, 63] == 1 and m[1, 64] == 1 and m[0, 64] == 0
        assert m.transpose().transpose() == m

    @given(bit_matrices(max_rows=8, max_cols=70), st.integers(1, 8))
    @settings(max_examples=100, deadline=None)
    def test_product_matches_numpy(self, sample, width):
        left, _ = sample
        right = BitMatrix.from_dense(np.random.default_rng(width).integers(0, 2, (left.cols, width)))
        expected = (left.to_dense().astype(np.int64) @ right.to_dense().astype(np.int64)) & 1
        assert np.array_equal((left @ right).to_dense(), expected)

    def test_equality_and_hash(self):
        a = BitMatrix.from_rows(["11", "01"])
        b = BitMatrix.from_int_rows([0b11, 0b10], 2)
        assert a == b
        assert hash(a) == hash(b)
        assert a != a.transpose()

    def test_symmetry_and_diagonal(self):
        m = BitMatrix.from_rows(["110", "101", "011"])
        assert m.is_symmetric()
        assert m.diagonal().tolist() == [1, 0, 1]
        assert not BitMatrix.from_rows(["10", "10"]).is_symmetric()

    def test_dot_f2(self):
        assert dot_f2(0b111, 0b101) == 0
        assert dot_f2(0b111, 0b100) == 1


class TestRankF2:

    @given(bit_matrices())
    @settings(max_examples=200, deadline=None)
    def test_matches_reference(self, sample):
        matrix, values = sample
        assert rank_f2(matrix) == reference_rank_f2(values)

    def test_basic_cases(self):
        assert rank_f2(BitMatrix.identity(70)) == 70
        assert rank_f2(BitMatrix.zeros(5, 9)) == 0
        assert rank_f2(BitMatrix.from_rows(["110", "011", "101"])) == 2

    @given(bit_matrices(max_rows=12, max_cols=80), st.data())
    @settings(max_examples=200, deadline=None)
    def test_invariant_under_row_operations(self, sample, data):
        matrix, values = sample
        rows = list(values)
        if len(rows) >= 2:
            operations = data.draw(st.lists(
                st.tuples(st.booleans(), st.integers(0, len(rows) - 1), st.integers(0, len(rows) - 1)),
                max_size=30))
            for swap, i, j in operations:
                if i == j:
                    continue
                if swap:
                    rows[i], rows[j] = rows[j], rows[i]
                else:
                    rows[j] ^= rows[i]
        assert rank_f2(BitMatrix.from_int_rows(rows, matrix.cols)) == rank_f2(matrix)

    @given(bit_matrices(max_rows=10, max_cols=10))
    @settings(max_examples=200, deadline=None)
    def test_not_above_exact_rank(self, sample):
        matrix, _ = sample
        assert rank_f2(matrix) <= rank_exact(IntMatrix.from_bitmatrix(matrix))

    def test_triangle_adjacency_drops_rank_mod_two(self):
        matrix = BitMatrix.from_rows(["011", "101", "110"])
        assert rank_f2(matrix) == 2
        assert rank_exact(IntMatrix.from_bitmatrix(matrix)) == 3


class TestLempelFactor:

    @given(symmetric_matrices())
    @settings(max_examples=1000, deadline=None)
    def test_factor_reproduces_matrix_with_rank_columns(self, matrix):
        factor = lempel_factor(matrix)
        assert factor.rows == matrix.rows
        assert factor.cols == rank_f2(matrix)
        assert factor @ factor.transpose() == matrix

    @given(symmetric_matrices(zero_diagonal=True))
    @settings(max_examples=50, deadline=None)
    def test_rejects_zero_diagonal(self, matrix):
        with pytest.raises(ParameterError):
            lempel_factor(matrix)

    def test_rejects_non_symmetric(self):
        with pytest.raises(ParameterError):
            lempel_factor(BitMatrix.from_rows(["11", "01"]))

    def test_perfect_matching_plus_identity(self):
        # A + I 为全 1 的 2x2 块：秩 1，两行相同
        matrix = BitMatrix.from_rows(["1100", "1100", "0011", "0011"])
        factor = lempel_factor(matrix)
        assert factor.cols == 2
        assert factor.row_int(0) == factor.row_int(1)

    def test_needs_hyperbolic_correction(self):
        # 对角线只有一个 1，余项是交错形式
        matrix = BitMatrix.from_rows(["100", "001", "010"])
        factor = lempel_factor(matrix)
        assert factor.cols == 3
        assert factor @ factor.transpose() == matrix


class TestExactRank:

    def test_known_matrices(self):
        assert rank_exact(IntMatrix([[1, 2], [2, 4]])) == 1
        assert rank_exact(IntMatrix([[0, 0], [0, 0]])) == 0
        assert rank_exact(IntMatrix.identity(7)) == 7
        assert rank_exact(IntMatrix([[0, 1, 2], [0, 2, 4], [1, 0, 0]])) == 2
        assert rank_exact(IntMatrix.zeros(3, 0)) == 0

    def test_large_entries_stay_exact(self):
        big = 10 ** 30
        matrix = IntMatrix([[big, big + 1], [big + 1, big + 2]])
        # 行列式为 -1
        assert rank_exact(matrix) == 2
        assert rank_exact(IntMatrix([[big, 2 * big], [3, 6]])) == 1

    @given(st.integers(1, 6), st.integers(1, 6), st.data())
    @settings(max_examples=200, deadline=None)
    def test_agrees_with_modp_on_small_entries(self, rows, cols, data):
        # 元素绝对值 ≤ 9 时所有子式的绝对值都小于默认素数，两种秩必然相等
        entries = data.draw(st.lists(
            st.lists(st.integers(-9, 9), min_size=cols, max_size=cols), min_size=rows, max_size=rows))
        matrix = IntMatrix(entries, cols)
        assert rank_exact(matrix) == rank_modp(matrix)
        assert rank_exact(matrix) == np.linalg.matrix_rank(np.array(entries, dtype=float))

    def test_modp_rejects_large_prime(self):
        with pytest.raises(ParameterError):
            rank_modp(IntMatrix.identity(2), 1 << 31)

    def test_modp_small_prime_sees_lower_rank(self):
        matrix = IntMatrix([[1, 1], [1, 3]])
        assert rank_exact(matrix) == 2
        assert rank_modp(matrix, 2) == 1

    def test_int_matrix_product_and_rows(self):
        a = IntMatrix.from_rows(["1 2", "3 4"])
        b = IntMatrix([[0, 1], [1, 0]])
        assert (a @ b).entries == ((2, 1), (4, 3))
        assert IntMatrix.from_bitmatrix(BitMatrix.identity(2)) == IntMatrix.identity(2)
        with pytest.raises(ParameterError):
            IntMatrix([[1, 2], [3]])


class TestWalsh:

    def test_hypercube_spectrum(self):
        # Cay(F_2^4, 单位向量) 的特征值为 4 - 2·wt(v)
        spectrum = walsh_spectrum(4, [1, 2, 4, 8])
        assert spectrum == {4: 1, 2: 4, 0: 6, -2: 4, -4: 1}

    def test_single_vector_example(self):
        values = walsh_transform(2, [0b11])
        assert values.tolist() == [1, -1, -1, 1]
        assert walsh_spectrum(2, [0b11]) == {1: 2, -1: 2}
        assert int(values.sum()) == 0
        assert int((values * values).sum()) == 4 * 1

    @given(st.integers(1, 10), st.data())
    @settings(max_examples=150, deadline=None)
    def test_sum_and_sum_of_squares(self, n, data):
        # Σλ = 0（0 ∉ S），Σλ² = tr(A²) = 2^n·|S|
        support = data.draw(st.sets(st.integers(1, (1 << n) - 1), max_size=min(60, (1 << n) - 1)))
        values = walsh_transform(n, support)
        assert values.size == 1 << n
        assert int(values.sum()) == 0
        assert int((values * values).sum()) == (1 << n) * len(support)

    def test_transform_is_indexed_by_vector(self):
        values = walsh_transform(3, [0b001, 0b011])
        for v in range(8):
            expected = sum((-1) ** dot_f2(u, v) for u in (0b001, 0b011))
            assert values[v] == expected
        assert not values.flags.writeable

    def test_connection_set_validation(self):
        with pytest.raises(ParameterError):
            check_connection_set(3, [0, 1])
        with pytest.raises(ParameterError):
            check_connection_set(3, [8])
        assert check_connection_set(3, [3, 1, 3]) == [1, 3]
