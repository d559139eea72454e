"""
部分 m-卵形体、近正交集、Oddtown 族、BCH 构造、强积放大与随机构造的测试
"""
import math

import pytest
from hypothesis import given, settings, strategies as st

from core.errors import ParameterError
from core.geometry import (
    EvenWeightModel, SymplecticSpace, cap_graph, complement_translate,
    enumerate_generators, polar_params,
)
from core.graphs import bch_cayley, clique_number, complementary_rank_f2
from core.ovoids import (
    OvoidCertificate, VectorFamily, VerificationMethod, amplify_bls, bch_rank_bound, bch_report,
    bls_target_base, construct_2ovoid_bch, default_sampling_probability, embed_to_symplectic,
    embedding_model, graph_to_vectors, monotone_certificate, nearly_orthogonal_verify,
    oddtown_verify, random_partial_m_ovoid, run_sampler, sampling_exponent,
    verify_partial_m_ovoid,
)


@st.composite
def vector_families(draw, max_dimension=9, max_size=14):
    dimension = draw(st.integers(1, max_dimension))
    vectors = st.integers(1, (1 << dimension) - 1)
    # 大部分成员取奇重，使结论不至于总是“否”
    odd = vectors.filter(lambda v: v.bit_count() % 2 == 1)
    members = draw(st.lists(st.one_of(odd, odd, odd, vectors), min_size=0, max_size=max_size))
    return VectorFamily(dimension, tuple(members))


class TestVectorFamily:

    def test_validation(self):
        with pytest.raises(ParameterError):
            VectorFamily(3, (0b001, 0))
        with pytest.raises(ParameterError):
            VectorFamily(3, (0b1000,))

    def test_repeats(self):
        family = VectorFamily(3, (1, 2, 1))
        assert len(family) == 3
        assert family.has_repeats()
        assert family.distinct().vectors == (1, 2)
        assert list(family) == [1, 2, 1]


class TestVerifyPartialOvoid:

    def test_line_of_w32(self):
        space = SymplecticSpace(2, 2)
        line = list(enumerate_generators(space)[0])
        assert verify_partial_m_ovoid(space, line, 3).verified
        certificate = verify_partial_m_ovoid(space, line, 2, cross_check=True)
        assert not certificate.verified
        assert certificate.counters["cross_check_agrees"] == 1
        assert certificate.method is VerificationMethod.CLIQUE_BOUND

    def test_ovoid_of_w32(self):
        model = EvenWeightModel(2)
        # 五个单点集两两交为空，对应的点两两不共线
        points = [model.subset_to_point(1 << i) for i in range(5)]
        certificate = verify_partial_m_ovoid(
            model.space, points, 1, method=VerificationMethod.GENERATOR_EXHAUSTIVE)
        assert certificate.verified
        assert certificate.size == 5 == model.space.params.ovoid_number
        assert certificate.counters["max_generator_meet"] == 1
        assert certificate.counters["generators_checked"] == 15

    @given(st.sampled_from([2, 3]), st.integers(1, 3), st.data())
    @settings(max_examples=100, deadline=None)
    def test_methods_agree(self, r, m, data):
        space = SymplecticSpace(r, 2)
        points = data.draw(st.lists(st.sampled_from(space.points()), max_size=12))
        by_cliques = verify_partial_m_ovoid(space, points, m)
        by_generators = verify_partial_m_ovoid(space, points, m, method=VerificationMethod.GENERATOR_EXHAUSTIVE)
        assert by_cliques.verified == by_generators.verified

    def test_repeated_points_count_twice(self):
        space = SymplecticSpace(2, 2)
        x = space.points()[3]
        for method in VerificationMethod:
            assert not verify_partial_m_ovoid(space, [x, x], 1, method=method).verified
            assert verify_partial_m_ovoid(space, [x, x], 2, method=method).verified

    def test_odd_characteristic(self):
        space = SymplecticSpace(2, 3)
        points = space.points()
        graph_free = [points[0]]
        assert verify_partial_m_ovoid(space, graph_free, 1).verified
        with pytest.raises(ParameterError):
            verify_partial_m_ovoid(space, points[:2], 1, method=VerificationMethod.GENERATOR_EXHAUSTIVE)

    def test_invalid_input(self):
        space = SymplecticSpace(2, 3)
        with pytest.raises(ParameterError):
            verify_partial_m_ovoid(space, [space.pack([2, 0, 0, 0])], 1)
        with pytest.raises(ParameterError):
            verify_partial_m_ovoid(space, [], -1)

    def test_certificate_dict_has_no_timing(self):
        space = SymplecticSpace(2, 2)
        data = verify_partial_m_ovoid(space, space.points()[:2], 1, seed=5).to_dict()
        assert "wall_time" not in data
        assert data["seed"] == 5
        assert data["space"]["label"] == "W(3,2)"


class TestNearlyOrthogonal:

    def test_standard_basis(self):
        family = VectorFamily(4, (1, 2, 4, 8))
        assert nearly_orthogonal_verify(family, 1)

    def test_self_orthogonal_member(self):
        assert not nearly_orthogonal_verify(VectorFamily(3, (0b011,)), 5)

    def test_triangle_of_non_orthogonal_vectors(self):
        # 两两交于 {1}
        family = VectorFamily(5, (0b00001, 0b00111, 0b11001))
        assert not nearly_orthogonal_verify(family, 2)
        assert nearly_orthogonal_verify(family, 3)

    def test_oddtown(self):
        assert oddtown_verify([0b001, 0b010, 0b100], 1)
        assert not oddtown_verify([0b011], 1)
        assert not oddtown_verify([0b00001, 0b00111, 0b11001], 2)
        assert oddtown_verify([0b111, 0b001, 0b010], 2)
        assert oddtown_verify([], 1)

    @given(vector_families(), st.integers(1, 3))
    @settings(max_examples=200, deadline=None)
    def test_equivalence_triangle(self, family, m):
        nearly = nearly_orthogonal_verify(family, m)
        model = embedding_model(family.dimension)
        translated = complement_translate(complement_translate(family.vectors, model.t), model.t)
        oddtown = oddtown_verify(translated, m, model.t)
        certificate = embed_to_symplectic(family, m)
        assert nearly == oddtown == certificate.verified
        assert certificate.counters["nearly_orthogonal_agrees"] == 1

    def test_embedding_model_dimension(self):
        assert embedding_model(4).t == 5
        assert embedding_model(5).t == 7


class TestBch:

    @pytest.mark.parametrize("h, bound", [(0, 1), (1, 4), (2, 14), (4, 164)])
    def test_rank_bound_values(self, h, bound):
        assert bch_rank_bound(h) == bound

    def test_rank_bound_matches_float(self):
        for h in range(0, 12):
            assert bch_rank_bound(h) == math.floor((1 + math.sqrt(2)) / 2 * (2 + math.sqrt(2)) ** h)

    @pytest.mark.parametrize("h", [1, 2, 3, 4])
    def test_construction(self, h):
        family = construct_2ovoid_bch(h)
        assert len(family) == 1 << (2 * h)
        assert family.dimension == complementary_rank_f2(bch_cayley(h))
        assert family.dimension <= bch_rank_bound(h)
        assert nearly_orthogonal_verify(family, 2)

    def test_report(self):
        report = bch_report(3, check=True)
        assert report.nearly_orthogonal
        assert report.gap >= 0
        assert report.exponent > 1.0
        assert report.to_dict()["vectors"] == 64

    def test_range(self):
        with pytest.raises(ParameterError):
            construct_2ovoid_bch(0)
        with pytest.raises(ParameterError):
            construct_2ovoid_bch(8)

    def test_graph_to_vectors_orthogonality(self):
        graph = bch_cayley(2)
        family = graph_to_vectors(graph)
        for u in range(graph.n):
            assert family.vectors[u].bit_count() % 2 == 1
            for v in range(u + 1, graph.n):
                odd = (family.vectors[u] & family.vectors[v]).bit_count() % 2 == 1
                assert odd == graph.has_edge(u, v)

    def test_embedding_of_bch(self):
        certificate = embed_to_symplectic(construct_2ovoid_bch(2), 2)
        assert certificate.verified
        assert certificate.size == 16


class TestAmplification:

    def test_target_base_for_cap_graph(self):
        assert round(bls_target_base(cap_graph(5), 28), 2) == 13.48

    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_postconditions(self, seed):
        base = bch_cayley(2)
        result = amplify_bls(base, 3, 2, seed=seed)
        assert result.power_vertices == 256
        assert result.clique_number <= 3
        assert clique_number(result.graph) <= 3
        assert result.rank <= complementary_rank_f2(base) ** 2 == result.rank_bound
        assert result.graph.n == 256 - result.deletions
        assert result.seed == seed

    def test_deterministic(self):
        base = bch_cayley(2)
        assert amplify_bls(base, 3, 2, seed=9).graph == amplify_bls(base, 3, 2, seed=9).graph

    def test_invalid(self):
        with pytest.raises(ParameterError):
            amplify_bls(bch_cayley(1), 1, 2)
        with pytest.raises(ParameterError):
            amplify_bls(bch_cayley(1), 2, 0)


class TestSampler:

    def test_default_probability(self):
        params = polar_params("W", 4, 2)
        assert sampling_exponent(params, 3) == -5.5
        assert default_sampling_probability(params, 3) == pytest.approx(2 ** -5.5)
        assert math.floor(default_sampling_probability(params, 3) * params.points) == 5

    def test_success_frequencies(self):
        space = SymplecticSpace(4, 2)
        run = run_sampler(space, 3, trials=400, seed=20240917)
        assert run.target_size == 5
        assert len(run.trials) == 400
        assert run.unpruned_successes >= 200
        assert run.size_hits >= 200
        counters = run.certificate.counters
        assert counters["unpruned_successes"] == run.unpruned_successes
        assert counters["joint_hits"] == run.joint_hits <= min(run.unpruned_successes, run.size_hits)

    def test_certificates_reverify(self):
        space = SymplecticSpace(4, 2)
        for seed in (7, 8, 9):
            certificate = random_partial_m_ovoid(space, 3, trials=20, seed=seed)
            assert certificate.verified
            assert certificate.seed == seed
            again = verify_partial_m_ovoid(space, certificate.points, 3, cross_check=True)
            assert again.verified
            assert again.counters["cross_check_agrees"] == 1

    def test_deterministic(self):
        params = polar_params("W", 3, 2)
        first = random_partial_m_ovoid(params, 2, trials=10, seed=11)
        second = random_partial_m_ovoid(params, 2, trials=10, seed=11)
        assert first.points == second.points
        assert first.to_dict() == second.to_dict()

    def test_rejects_bad_arguments(self):
        space = SymplecticSpace(2, 2)
        with pytest.raises(ParameterError):
            run_sampler(space, 2, rho=1.5)
        with pytest.raises(ParameterError):
            run_sampler(space, 2, trials=0)
        with pytest.raises(ParameterError):
            run_sampler(polar_params("Q-", 2, 2), 2)


class TestMonotone:

    def test_lift(self):
        space = SymplecticSpace(2, 2)
        line = list(enumerate_generators(space)[0])
        certificate = verify_partial_m_ovoid(space, line, 3)
        lifted = monotone_certificate(certificate)
        assert isinstance(lifted, OvoidCertificate)
        assert lifted.m == 4 and lifted.points == certificate.points
        assert verify_partial_m_ovoid(space, lifted.points, lifted.m).verified

    def test_requires_verified(self):
        space = SymplecticSpace(2, 2)
        line = list(enumerate_generators(space)[0])
        with pytest.raises(ParameterError):
            monotone_certificate(verify_partial_m_ovoid(space, line, 1))

