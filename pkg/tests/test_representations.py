import math

import numpy as np
import pytest

from permkernels.perm import (
    Permutation,
    adjacent_decomposition_insertion,
    compose,
    count_inversions,
    enumerate_sn,
    inverse,
    perm_index,
    random_permutation,
)
from permkernels.symfourier import (
    adjacent_matrix,
    irrep_dimension,
    iter_yor,
    partitions,
    tabloids,
    tau_matrix,
    tau_transform,
    yor_matrix,
    yor_tensor,
)
from permkernels.symfourier.representations import tensor_fits

SHAPES = [lam for d in range(1, 6) for lam in partitions(d)]


def ids(lam):
    return "-".join(map(str, lam))


class TestYoungOrthogonal:
    @pytest.mark.parametrize("lam", SHAPES, ids=ids)
    def test_homomorphism_orthogonality_word_independence(self, lam, rng):
        d = sum(lam)
        for _ in range(30):
            a, b = random_permutation(d, rng), random_permutation(d, rng)
            Ra, Rb = yor_matrix(lam, a), yor_matrix(lam, b)
            np.testing.assert_allclose(yor_matrix(lam, compose(a, b)), Ra @ Rb, atol=1e-10)
            np.testing.assert_allclose(Ra.T @ Ra, np.eye(Ra.shape[0]), atol=1e-10)
            np.testing.assert_allclose(yor_matrix(lam, inverse(a)), Ra.T, atol=1e-10)
            alt = yor_matrix(lam, a, word=adjacent_decomposition_insertion(a))
            np.testing.assert_allclose(alt, Ra, atol=1e-10)

    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_identity_trivial_and_sign(self, d):
        for s in enumerate_sn(d):
            assert yor_matrix((d,), s).tolist() == [[1.0]]
            assert yor_matrix((1,) * d, s)[0, 0] == pytest.approx((-1) ** count_inversions(s), abs=1e-14)
        for lam in partitions(d):
            np.testing.assert_array_equal(yor_matrix(lam, Permutation.identity(d)), np.eye(irrep_dimension(lam)))

    @pytest.mark.parametrize("lam", [(3, 2), (2, 2, 1), (3, 1, 1), (4, 2)], ids=ids)
    def test_generators_satisfy_coxeter_relations(self, lam):
        d = sum(lam)
        S = {k: adjacent_matrix(lam, k) for k in range(1, d)}
        eye = np.eye(irrep_dimension(lam))
        for k, M in S.items():
            np.testing.assert_allclose(M, M.T, atol=1e-15)
            np.testing.assert_allclose(M @ M, eye, atol=1e-12)
            if k + 1 < d:
                N = S[k + 1]
                np.testing.assert_allclose(M @ N @ M, N @ M @ N, atol=1e-12)
            for j in range(k + 2, d):
                np.testing.assert_allclose(M @ S[j], S[j] @ M, atol=1e-12)

    def test_characters_are_class_functions(self):
        # traces agree on conjugate elements: checks the irreps are genuine up to equivalence
        lam, d = (3, 2), 5
        rng = np.random.default_rng(1)
        for _ in range(20):
            s, g = random_permutation(d, rng), random_permutation(d, rng)
            conj = compose(compose(g, s), inverse(g))
            assert np.trace(yor_matrix(lam, s)) == pytest.approx(np.trace(yor_matrix(lam, conj)), abs=1e-10)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            yor_matrix((2, 1), Permutation.identity(4))

    @pytest.mark.parametrize("lam", [(3, 1), (2, 2), (3, 1, 1)], ids=ids)
    def test_stream_and_tensor_agree_with_direct(self, lam):
        d = sum(lam)
        seen = set()
        perms = enumerate_sn(d)
        for idx, M in iter_yor(lam, d):
            seen.add(idx)
            np.testing.assert_allclose(M, yor_matrix(lam, perms[idx]), atol=1e-12)
        assert seen == set(range(math.factorial(d)))
        T = yor_tensor(lam, d)
        assert tensor_fits(lam, d)
        for s in perms[::11]:
            np.testing.assert_allclose(T[perm_index(s)], yor_matrix(lam, s), atol=1e-12)


class TestTau:
    @pytest.mark.parametrize("lam", [(4,), (3, 1), (2, 2), (2, 1, 1), (3, 2), (3, 1, 1)], ids=ids)
    def test_homomorphism_and_permutation_matrix(self, lam, rng):
        d = sum(lam)
        n = len(tabloids(lam))
        np.testing.assert_array_equal(tau_matrix(lam, Permutation.identity(d)), np.eye(n))
        for _ in range(20):
            a, b = random_permutation(d, rng), random_permutation(d, rng)
            Ta = tau_matrix(lam, a)
            assert set(np.unique(Ta)) <= {0.0, 1.0}
            np.testing.assert_array_equal(Ta.sum(axis=0), 1)
            np.testing.assert_array_equal(Ta.sum(axis=1), 1)
            np.testing.assert_array_equal(tau_matrix(lam, compose(a, b)), Ta @ tau_matrix(lam, b))

    def test_column_convention(self):
        # sigma = [2,1,3] swaps items 1,2; tabloid with row 2 = {1} goes to row 2 = {2}
        lam = (2, 1)
        tabs = tabloids(lam)
        M = tau_matrix(lam, Permutation([2, 1, 3]))
        src, dst = tabs.index(((2, 3), (1,))), tabs.index(((1, 3), (2,)))
        assert M[dst, src] == 1.0

    def test_trivial_shape(self, rng):
        assert tau_matrix((4,), random_permutation(4, rng)).tolist() == [[1.0]]

    def test_transform_is_weighted_sum(self, rng):
        lam, d = (2, 1, 1), 4
        f = rng.standard_normal(24)
        expected = sum(w * tau_matrix(lam, s) for w, s in zip(f, enumerate_sn(d)))
        np.testing.assert_allclose(tau_transform(f, lam, d), expected, atol=1e-12)
        with pytest.raises(ValueError):
            tau_transform(f[:5], lam, d)
