"""
图构造、图积、团与秩的测试，networkx 作为独立对照
"""
from collections import Counter
from itertools import combinations

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from core.errors import ParameterError, SizeLimitError
from core.geometry import build_cap
from core.gf2linalg import rank_modp, walsh_spectrum, walsh_transform
from core.graphs import (
    Graph, bch_cayley, bch_connection_set, cayley_f2n, clique_census, clique_number,
    complementary_rank_f2, complementary_rank_real, complete_graph, complete_graph_spectrum,
    cube_sum_free, empty_graph, find_clique, is_triangle_free, iter_bits, oddtown_graph,
    product_spectrum, rank_a_minus_i_real, strong_power, strong_product, tensor_product,
)
from core.ovoids import bch_rank_bound


@st.composite
def graphs(draw, max_n=10):
    n = draw(st.integers(1, max_n))
    pairs = list(combinations(range(n), 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [p for p, k in zip(pairs, keep) if k])


def to_networkx(graph):
    g = nx.Graph()
    g.add_nodes_from(range(graph.n))
    g.add_edges_from(graph.edges())
    return g


def product_edges(product, width):
    """networkx 积图的边换算成 g·|H| + h 编号"""
    return {tuple(sorted((a * width + b, c * width + d))) for (a, b), (c, d) in product.edges()}


def rounded_spectrum(graph):
    values = np.linalg.eigvalsh(graph.adjacency_array().astype(float))
    return Counter(int(round(v)) for v in values)


class TestGraph:

    def test_from_edges_and_queries(self):
        g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 0), (2, 3)])
        assert g.edges() == [(0, 1), (0, 2), (1, 2), (2, 3)]
        assert g.degrees() == [2, 2, 3, 1]
        assert g.edge_count() == 4
        assert g.neighbor_list(2) == [0, 1, 3]
        assert g.has_edge(3, 2) and not g.has_edge(0, 3)
        assert not g.is_regular()

    def test_validation(self):
        with pytest.raises(ParameterError):
            Graph(2, [0b10, 0b00])
        with pytest.raises(ParameterError):
            Graph(2, [0b01, 0b00])
        with pytest.raises(ParameterError):
            Graph.from_edges(2, [(0, 2)])
        with pytest.raises(ParameterError):
            Graph.from_edges(2, [(1, 1)])

    def test_induced_subgraph_relabels(self):
        g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)], labels=[10, 11, 12, 13, 14])
        sub = g.induced_subgraph([3, 1, 2])
        assert sub.edges() == [(0, 2), (1, 2)]
        assert sub.labels == (13, 11, 12)
        with pytest.raises(ParameterError):
            g.induced_subgraph([1, 1])

    def test_iter_bits(self):
        assert list(iter_bits(0b101001)) == [0, 3, 5]

    def test_adjacency_views(self):
        g = complete_graph(3)
        assert g.adjacency_array(shift=1).tolist() == [[1, 1, 1]] * 3
        assert g.adjacency_bitmatrix(plus_identity=True).row_ints() == [7, 7, 7]
        assert empty_graph(3).edge_count() == 0


class TestCayley:

    @given(st.integers(1, 8), st.data())
    @settings(max_examples=30, deadline=None)
    def test_characters_are_exact_eigenvectors(self, n, data):
        # A·χ_v = λ_v·χ_v，全程整数运算
        support = data.draw(st.sets(st.integers(1, (1 << n) - 1), max_size=min(40, (1 << n) - 1)))
        adjacency = cayley_f2n(n, support).adjacency_array()
        assert adjacency.dtype == np.int64
        size = 1 << n
        characters = np.array(
            [[-1 if (v & x).bit_count() & 1 else 1 for x in range(size)] for v in range(size)],
            dtype=np.int64,
        )
        eigenvalues = walsh_transform(n, support)
        images = adjacency @ characters.T
        assert np.array_equal(images, characters.T * eigenvalues[None, :])

    @given(st.integers(1, 5), st.data())
    @settings(max_examples=60, deadline=None)
    def test_walsh_spectrum_matches_float_eigenvalues(self, n, data):
        support = data.draw(st.sets(st.integers(1, (1 << n) - 1), max_size=(1 << n) - 1))
        graph = cayley_f2n(n, support)
        assert graph.is_regular()
        assert graph.degree(0) == len(support)
        assert walsh_spectrum(n, support) == rounded_spectrum(graph)

    def test_zero_vector_rejected(self):
        with pytest.raises(ParameterError):
            cayley_f2n(3, [0, 1])

    def test_complete_graph_spectrum(self):
        assert complete_graph_spectrum(4) == rounded_spectrum(complete_graph(4))
        assert complete_graph_spectrum(1) == {0: 1}


class TestBch:

    def test_connection_set_h1(self):
        assert bch_connection_set(1) == [0b11]

    @pytest.mark.parametrize("h", [1, 2, 3, 4])
    def test_triangle_free_and_rank_bound(self, h):
        graph = bch_cayley(h)
        assert graph.n == 1 << (2 * h)
        assert graph.is_regular() and graph.degree(0) == (1 << h) - 1
        assert is_triangle_free(graph)
        assert complementary_rank_f2(graph) <= bch_rank_bound(h)

    @pytest.mark.parametrize("h", [1, 2, 3, 4, 5, 6])
    def test_cube_sums(self, h):
        assert cube_sum_free(h)

    def test_degree_range(self):
        with pytest.raises(ParameterError):
            bch_cayley(0)
        with pytest.raises(ParameterError):
            bch_cayley(9)


class TestProducts:

    @given(graphs(max_n=5), graphs(max_n=5))
    @settings(max_examples=80, deadline=None)
    def test_strong_product_matches_networkx(self, first, second):
        ours = strong_product(first, second)
        theirs = nx.strong_product(to_networkx(first), to_networkx(second))
        assert set(ours.edges()) == product_edges(theirs, second.n)

    @given(graphs(max_n=5), graphs(max_n=5))
    @settings(max_examples=80, deadline=None)
    def test_tensor_product_matches_networkx(self, first, second):
        ours = tensor_product(first, second)
        theirs = nx.tensor_product(to_networkx(first), to_networkx(second))
        assert set(ours.edges()) == product_edges(theirs, second.n)

    @given(graphs(max_n=5), graphs(max_n=5))
    @settings(max_examples=50, deadline=None)
    def test_strong_product_kronecker_identity(self, first, second):
        ours = strong_product(first, second)
        expected = np.kron(first.adjacency_array(1), second.adjacency_array(1))
        assert np.array_equal(ours.adjacency_array(1), expected)

    def test_strong_power_limit(self):
        with pytest.raises(SizeLimitError):
            strong_power(complete_graph(10), 3, limit=999)
        assert strong_power(complete_graph(2), 3).n == 8
        assert strong_power(complete_graph(2), 1) == complete_graph(2)
        with pytest.raises(ParameterError):
            strong_power(complete_graph(2), 0)

    def test_product_spectrum_predicts_eigenvalues(self):
        cap = cayley_f2n(4, build_cap(4))
        k3 = complete_graph(3)
        cap_spectrum = walsh_spectrum(4, build_cap(4))
        for kind, product in (("strong", strong_product), ("tensor", tensor_product)):
            predicted = product_spectrum(cap_spectrum, complete_graph_spectrum(3), kind)
            assert +predicted == rounded_spectrum(product(cap, k3))
        with pytest.raises(ParameterError):
            product_spectrum(cap_spectrum, cap_spectrum, "cartesian")

    def test_strong_product_minus_one_multiplicity(self):
        # 强积中 -1 的重数为 2^n (ℓ-1)
        n, size = 5, 3
        spectrum = product_spectrum(walsh_spectrum(n, build_cap(n)), complete_graph_spectrum(size), "strong")
        assert spectrum[-1] == (1 << n) * (size - 1)


def tensor_rank_formula(n, size):
    return ((1 << n) * size + 3 * (1 << n) + 12 * size - 12) // 4


class TestCapTensorRank:
    """帽图与 K_ℓ 的张量积：A + I 的实秩公式"""

    @pytest.mark.parametrize("n", [5, 6, 7, 8])
    def test_rank_from_exact_spectrum(self, n):
        cap_spectrum = walsh_spectrum(n, build_cap(n))
        ratios = []
        for size in range(2, 7):
            spectrum = product_spectrum(cap_spectrum, complete_graph_spectrum(size), "tensor")
            vertices = (1 << n) * size
            rank = vertices - spectrum[-1]
            assert rank == tensor_rank_formula(n, size)
            assert spectrum[-1] == (size - 1) * 3 * ((1 << (n - 2)) - 1)
            ratios.append(rank / vertices)
        assert all(a > b > 0.25 for a, b in zip(ratios, ratios[1:]))

    @pytest.mark.parametrize("n", [5, 6])
    def test_rank_modp_matches(self, n):
        cap = cayley_f2n(n, build_cap(n))
        for size in range(2, 7):
            product = tensor_product(cap, complete_graph(size))
            assert rank_modp(product.adjacency_intmatrix(1)) == tensor_rank_formula(n, size)

    def test_exact_rank_small_case(self):
        cap = cayley_f2n(5, build_cap(5))
        product = tensor_product(cap, complete_graph(2))
        assert is_triangle_free(product)
        assert complementary_rank_real(product) == tensor_rank_formula(5, 2)

    @pytest.mark.slow
    @pytest.mark.parametrize("n", [7, 8])
    def test_rank_modp_matches_large(self, n):
        cap = cayley_f2n(n, build_cap(n))
        for size in range(2, 7):
            product = tensor_product(cap, complete_graph(size))
            assert rank_modp(product.adjacency_intmatrix(1)) == tensor_rank_formula(n, size)

    def test_ratio_decreases_with_n(self):
        for size in range(2, 7):
            ratios = [tensor_rank_formula(n, size) / ((1 << n) * size) for n in range(5, 9)]
            assert all(a > b for a, b in zip(ratios, ratios[1:]))


class TestCliques:

    @given(graphs(max_n=14))
    @settings(max_examples=150, deadline=None)
    def test_clique_number_matches_networkx(self, graph):
        expected = max(len(c) for c in nx.find_cliques(to_networkx(graph)))
        assert clique_number(graph) == expected
        assert clique_number(graph, cap=2) == min(expected, 3)

    @given(graphs(max_n=10), st.integers(1, 5))
    @settings(max_examples=100, deadline=None)
    def test_find_clique(self, graph, size):
        found = find_clique(graph, size)
        if found is None:
            assert clique_number(graph) < size
        else:
            assert len(found) == size and found == sorted(found)
            assert all(graph.has_edge(u, v) for u, v in combinations(found, 2))

    def test_find_clique_respects_candidates(self):
        graph = complete_graph(5)
        assert find_clique(graph, 3, candidates=0b11) is None
        assert find_clique(graph, 2, candidates=0b10100) == [2, 4]
        assert find_clique(graph, 0) == []

    @given(graphs(max_n=9), st.integers(1, 4))
    @settings(max_examples=100, deadline=None)
    def test_census_matches_brute_force(self, graph, max_size):
        census = clique_census(graph, max_size)
        for size in range(1, max_size + 1):
            expected = sum(
                1 for c in combinations(range(graph.n), size)
                if all(graph.has_edge(u, v) for u, v in combinations(c, 2))
            )
            assert census.a(size) == expected
        assert census.a(max_size + 1) == 0

    def test_empty_graph_clique_number(self):
        assert clique_number(Graph(0, [])) == 0
        assert clique_number(empty_graph(4)) == 1


class TestRanks:

    def test_complete_graph_ranks(self):
        k4 = complete_graph(4)
        assert complementary_rank_f2(k4) == 1
        assert complementary_rank_real(k4) == 1
        assert rank_a_minus_i_real(k4) == 4

    def test_oddtown_graph(self):
        graph = oddtown_graph(5)
        assert graph.n == 15
        assert all(label.bit_count() % 2 == 1 for label in graph.labels)
        for u, v in combinations(range(graph.n), 2):
            odd = (graph.labels[u] & graph.labels[v]).bit_count() % 2 == 1
            assert graph.has_edge(u, v) == odd
        with pytest.raises(ParameterError):
            oddtown_graph(1)

    def test_oddtown_clique_numbers(self):
        gamma5 = oddtown_graph(5)
        assert clique_number(gamma5) == 3
        assert max(len(c) for c in nx.find_cliques(to_networkx(gamma5))) == 3
        gamma3 = oddtown_graph(3)
        assert gamma3.n == 3
        assert is_triangle_free(gamma3)
        assert clique_number(gamma3) == 1
