import itertools
import math

import numpy as np
import pytest

from permkernels.distribution import DistributionOnSd
from permkernels.features import (
    FEATURE_BUDGET,
    PairIndex,
    a_tau_matrix,
    feature_matrix,
    mean_embedding,
    phi_kendall,
    phi_mallows,
    phi_poly,
)
from permkernels.kernels import KernelSpec, eval_kernel
from permkernels.perm import Permutation, compose, count_inversions, enumerate_sn, random_permutation


def P(*r):
    return Permutation(r)


def svd_rank(M, rel=1e-9):
    s = np.linalg.svd(np.asarray(M, dtype=float), compute_uv=False)
    return int(np.sum(s > rel * s[0]))


class TestPairIndex:
    def test_order_and_sentinel(self):
        idx = PairIndex.build(4)
        assert idx.pairs == ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))
        assert sorted(idx.pairs) == list(idx.pairs)
        with_t0 = PairIndex.build(4, with_sentinel=True)
        assert len(with_t0) == 7 and with_t0.pairs[1:] == idx.pairs
        assert idx.position(3, 1) == 1


class TestKendallMap:
    def test_examples(self):
        np.testing.assert_array_equal(phi_kendall(P(1, 2)).coords, [1.0])
        np.testing.assert_allclose(phi_kendall(Permutation.identity(3)).coords, [3**-0.5] * 3, rtol=1e-15)

    def test_inner_products_on_s4(self):
        perms = enumerate_sn(4)
        spec = KernelSpec.kendall()
        for a in perms:
            for b in perms:
                assert phi_kendall(a).dot(phi_kendall(b)) == pytest.approx(eval_kernel(spec, a, b), abs=1e-12)

    def test_needs_two_items(self):
        with pytest.raises(ValueError):
            phi_kendall(P(1))


class TestATau:
    def test_d2(self):
        np.testing.assert_array_equal(a_tau_matrix(2), [[1, 0]])

    @pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
    def test_rank(self, d):
        assert svd_rank(a_tau_matrix(d)) == math.comb(d, 2)

    def test_column_sums_count_concordance_with_identity(self):
        A = a_tau_matrix(5)
        for j, s in enumerate(enumerate_sn(5)):
            assert A[:, j].sum() == math.comb(5, 2) - count_inversions(s)

    def test_marginals_of_a_distribution(self, rng):
        d = 4
        probs = rng.dirichlet(np.ones(24))
        pairs = list(itertools.combinations(range(1, d + 1), 2))
        oracle = [sum(p for p, s in zip(probs, enumerate_sn(d)) if s(a) < s(b)) for a, b in pairs]
        np.testing.assert_allclose(a_tau_matrix(d) @ probs, oracle, rtol=1e-13)

    def test_cap(self):
        with pytest.raises(ValueError):
            a_tau_matrix(9)


class TestMallowsMap:
    def test_inner_products_all_of_s4(self):
        perms = enumerate_sn(4)
        for nu in (0.3, 1.0):
            Phi = feature_matrix(perms, "mallows", nu=nu)
            K = np.array([[eval_kernel(KernelSpec.mallows(nu), a, b) for b in perms] for a in perms])
            np.testing.assert_allclose(Phi @ Phi.T, K, atol=1e-10, rtol=0)

    def test_unit_norm(self, rng):
        for _ in range(10):
            v = phi_mallows(random_permutation(5, rng), 0.8).coords
            assert v @ v == pytest.approx(1.0, abs=1e-12)

    def test_d2_values(self):
        nu = 0.6
        q = math.exp(-nu)
        np.testing.assert_allclose(phi_mallows(P(1, 2), nu).coords, [math.sqrt((1 + q) / 2), math.sqrt((1 - q) / 2)])
        np.testing.assert_allclose(phi_mallows(P(2, 1), nu).coords, [math.sqrt((1 + q) / 2), -math.sqrt((1 - q) / 2)])

    def test_empty_set_coordinate(self):
        nu, d = 1.3, 4
        C = math.comb(d, 2)
        expected = 2 ** (-C / 2) * (1 + math.exp(-nu)) ** (C / 2)
        for s in enumerate_sn(d)[::7]:
            assert phi_mallows(s, nu).coords[0] == pytest.approx(expected, rel=1e-14)

    def test_relabeling_preserves_magnitudes(self, rng):
        for _ in range(10):
            s, pi = random_permutation(4, rng), random_permutation(4, rng)
            a = np.sort(np.abs(phi_mallows(s, 0.5).coords))
            b = np.sort(np.abs(phi_mallows(compose(s, pi), 0.5).coords))
            np.testing.assert_allclose(a, b, rtol=1e-14)

    def test_refuses_large_degree(self):
        with pytest.raises(ValueError, match="2\\^"):
            phi_mallows(Permutation.identity(6), 1.0)
        with pytest.raises(ValueError):
            phi_mallows(Permutation.identity(3), 0.0)


class TestPolyMap:
    def test_p1_is_augmented_kendall(self):
        s = P(2, 4, 1, 3)
        np.testing.assert_array_equal(phi_poly(s, 1).coords, np.concatenate(([1.0], phi_kendall(s).coords)))

    @pytest.mark.parametrize("p", [2, 3])
    def test_inner_products_on_s3(self, p):
        perms = enumerate_sn(3)
        Phi = feature_matrix(perms, "poly", p=p)
        K = np.array([[eval_kernel(KernelSpec.poly(p), a, b) for b in perms] for a in perms])
        np.testing.assert_allclose(Phi @ Phi.T, K, atol=1e-10, rtol=0)

    def test_squared_norm(self):
        for p in (1, 2, 4):
            v = phi_poly(P(3, 1, 2), p).coords
            assert v @ v == pytest.approx(2.0**p, rel=1e-13)
            assert v.size == (1 + 3) ** p

    def test_budget(self):
        with pytest.raises(ValueError, match="budget"):
            phi_poly(Permutation.identity(8), 5)
        assert (1 + 28) ** 5 > FEATURE_BUDGET

    @pytest.mark.parametrize("d", [3, 4])
    def test_degree_d_minus_1_features_are_independent(self, d):
        Phi = feature_matrix(enumerate_sn(d), "poly", p=d - 1)
        assert svd_rank(Phi) == math.factorial(d)


class TestMeanEmbedding:
    def test_point_mass(self):
        s = P(2, 3, 1)
        np.testing.assert_allclose(
            mean_embedding(DistributionOnSd.point_mass(s), "kendall").coords, phi_kendall(s).coords
        )

    def test_uniform_kendall_is_zero(self):
        np.testing.assert_allclose(mean_embedding(DistributionOnSd.uniform(3), "kendall").coords, 0, atol=1e-15)

    def test_difference_matches_a_tau(self, rng):
        d = 4
        A = a_tau_matrix(d).astype(float)
        for _ in range(10):
            p, q = DistributionOnSd.random(d, rng), DistributionOnSd.random(d, rng)
            diff = mean_embedding(p, "kendall").coords - mean_embedding(q, "kendall").coords
            expected = 2 / math.sqrt(math.comb(d, 2)) * np.linalg.norm(A @ (p.probs - q.probs))
            assert np.linalg.norm(diff) == pytest.approx(expected, rel=1e-12)

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            mean_embedding(np.full(6, 0.2), "kendall")

    def test_unknown_map(self):
        with pytest.raises(ValueError):
            feature_matrix(enumerate_sn(3), "gauss")


def test_feature_vector_csv_header():
    v = phi_mallows(P(1, 2), 1.0)
    text = v.to_csv()
    assert text.splitlines()[0] == "# scheme=mallows dim=2 d=2 nu=1.0"
    assert len(text.splitlines()) == 3
