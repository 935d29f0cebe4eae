import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from permkernels.datapipe import (
    DataError,
    RankingDataset,
    complement_basis,
    construct_shifted_distribution,
    load_ratings_csv,
    load_rankings_csv,
    null_space_basis,
    ratings_to_ranking,
    sample,
    write_rankings_csv,
)
from permkernels.distribution import DistributionOnSd
from permkernels.features import a_tau_matrix
from permkernels.perm import Permutation, enumerate_sn, perm_index

TABLE1 = """r1,r2,r3,r4,r5,r6,gender,age
2,1,3,4,6,5,male,25
1,2,3,4,5,6,female,47
6,5,4,3,2,1,female,33
"""


class TestRankingsCsv:
    def test_basic(self):
        ds = load_rankings_csv(io.StringIO("r1,r2,r3\n1,2,3\n3,1,2\n"))
        assert ds.degree == 3 and [p.ranks for p in ds.perms] == [(1, 2, 3), (3, 1, 2)]

    def test_rejects_non_bijective_rows(self):
        ds = load_rankings_csv(io.StringIO("r1,r2,r3\n1,1,3\n2,1,3\n1,2\n"))
        assert [p.ranks for p in ds.perms] == [(2, 1, 3)]
        assert [r.row for r in ds.rejected] == [1, 3]
        assert "not a permutation" in ds.rejected[0].reason
        with pytest.raises(DataError, match="row 1"):
            load_rankings_csv(io.StringIO("r1,r2,r3\n1,1,3\n"), strict=True)

    def test_mixed_degree_named(self):
        with pytest.raises(DataError, match="row 2.*degree"):
            load_rankings_csv(io.StringIO("r1,r2,r3,r4\n1,2,3,4\n2,1,3,\n"), strict=True)

    def test_non_integer(self):
        ds = load_rankings_csv(io.StringIO("r1,r2\n1,x\n"))
        assert ds.rejected[0].reason == "non-integer rank"

    def test_labels_preserved_roundtrip(self, tmp_path):
        ds = load_rankings_csv(io.StringIO(TABLE1))
        assert ds.label_columns == ("gender", "age")
        assert ds.column("gender") == ["male", "female", "female"]
        np.testing.assert_array_equal(ds.numeric_column("age"), [25, 47, 33])
        path = tmp_path / "out.csv"
        write_rankings_csv(path, ds)
        assert path.read_text() == TABLE1
        again = load_rankings_csv(path)
        assert again.perms == ds.perms and again.labels == ds.labels

    def test_missing_columns(self):
        with pytest.raises(DataError, match="missing columns"):
            load_rankings_csv(io.StringIO("a,b\n1,2\n"))
        with pytest.raises(DataError, match="r3"):
            load_rankings_csv(io.StringIO("r1,r2\n1,2\n"), d=3)
        with pytest.raises(DataError, match="header"):
            load_rankings_csv(io.StringIO(""))

    def test_label_errors(self):
        ds = load_rankings_csv(io.StringIO("r1,r2,age\n1,2,old\n"))
        with pytest.raises(DataError, match="not numeric"):
            ds.numeric_column("age")
        with pytest.raises(DataError, match="no label column"):
            ds.column("height")

    def test_write_stream(self):
        ds = RankingDataset(2, (Permutation([2, 1]),), ({},))
        buf = io.StringIO()
        write_rankings_csv(buf, ds)
        assert buf.getvalue() == "r1,r2\n2,1\n"


class TestRatings:
    def test_examples(self):
        assert ratings_to_ranking([4.0, 2.0, 3.0]).ranks == (1, 3, 2)
        assert ratings_to_ranking([5, 4, 3, 2, 1]).is_identity()

    def test_ties_deterministic_and_seed_dependent(self):
        ties = [1.0] * 6
        assert ratings_to_ranking(ties, 3) == ratings_to_ranking(ties, 3)
        assert len({ratings_to_ranking(ties, s) for s in range(20)}) > 1

    def test_ties_only_reorder_tied_items(self):
        for s in range(20):
            r = ratings_to_ranking([2.0, 5.0, 2.0, 1.0], s).ranks
            assert r[1] == 1 and r[3] == 4 and sorted((r[0], r[2])) == [2, 3]

    @given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=8, unique=True), st.integers(0, 100))
    def test_no_ties_seed_independent(self, ratings, seed):
        p = ratings_to_ranking(ratings, seed)
        assert p == ratings_to_ranking(ratings, 0)
        order = sorted(range(len(ratings)), key=lambda i: -ratings[i])
        assert [p(i + 1) for i in order] == list(range(1, len(ratings) + 1))

    def test_nan(self):
        with pytest.raises(ValueError, match="item"):
            ratings_to_ranking([1.0, float("nan")])

    def test_tie_shuffle_is_uniform(self):
        counts = {}
        for s in range(6000):
            p = ratings_to_ranking([1.0, 1.0, 1.0], s)
            counts[p] = counts.get(p, 0) + 1
        assert len(counts) == 6
        assert all(abs(c / 6000 - 1 / 6) < 0.02 for c in counts.values())

    def test_load(self):
        R, labels, cols = load_ratings_csv(io.StringIO("c1,c2,c3,user\n4,2,3,a\n1,1,5,b\n"))
        np.testing.assert_array_equal(R, [[4, 2, 3], [1, 1, 5]])
        assert cols == ("user",) and labels[1] == {"user": "b"}
        with pytest.raises(DataError, match="row 1"):
            load_ratings_csv(io.StringIO("c1,c2\n1,x\n"))


class TestSample:
    def test_point_mass(self):
        s = Permutation([3, 1, 2])
        assert sample(DistributionOnSd.point_mass(s), 10, seed=1) == [s] * 10

    def test_uniform_frequencies(self):
        n = 60000
        draws = sample(DistributionOnSd.uniform(3), n, seed=4)
        freq = np.bincount([perm_index(p) for p in draws], minlength=6) / n
        assert np.all(np.abs(freq - 1 / 6) < 0.01)
        chi2 = n * np.sum((freq - 1 / 6) ** 2 / (1 / 6))
        assert chi2 < 20.5  # 0.999 quantile with 5 d.o.f.

    def test_seeded(self):
        P = DistributionOnSd.random(4, np.random.default_rng(0))
        assert sample(P, 50, seed=9) == sample(P, 50, seed=9)

    def test_skips_zero_mass(self):
        probs = np.zeros(6)
        probs[[1, 4]] = 0.5
        draws = sample(DistributionOnSd(probs, 3), 500, seed=0)
        assert {perm_index(p) for p in draws} == {1, 4}


class TestShifted:
    @pytest.mark.parametrize("d", [3, 4, 5])
    def test_subspace_dimensions(self, d):
        V, U = null_space_basis(d), complement_basis(d)
        n = math.factorial(d)
        assert V.shape == (n, n - math.comb(d, 2) - 1)
        assert U.shape == (n, math.comb(d, 2))
        A = a_tau_matrix(d).astype(float)
        np.testing.assert_allclose(A @ V, 0, atol=1e-12)
        np.testing.assert_allclose(V.sum(axis=0), 0, atol=1e-12)
        np.testing.assert_allclose(U.sum(axis=0), 0, atol=1e-12)
        np.testing.assert_allclose(U.T @ V, 0, atol=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_null_space_shift(self, seed):
        P = DistributionOnSd.uniform(4)
        Q = construct_shifted_distribution(P, 0.0, True, seed=seed)
        A = a_tau_matrix(4).astype(float)
        assert np.linalg.norm(A @ (P.probs - Q.probs)) < 1e-12
        assert np.max(np.abs(P.probs - Q.probs)) > 1e-3
        assert Q.probs.min() == 0.0 and Q.probs.sum() == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("delta", [0.01, 0.05, 0.1])
    def test_complement_shift_distance(self, delta):
        P = DistributionOnSd.uniform(4)
        Q = construct_shifted_distribution(P, delta, False, seed=2)
        assert np.linalg.norm(a_tau_matrix(4) @ (P.probs - Q.probs)) == pytest.approx(delta, abs=1e-10)
        assert Q.probs.min() >= 0

    def test_unreachable_delta(self):
        P = DistributionOnSd.uniform(4)
        with pytest.raises(DataError, match="unreachable"):
            construct_shifted_distribution(P, 5.0, False, seed=0)
        with pytest.raises(DataError, match="unreachable"):
            construct_shifted_distribution(P, 5.0, False, seed=0, max_draws=20)

    def test_redraws_from_same_stream(self):
        P = DistributionOnSd.uniform(5)
        with pytest.raises(DataError):
            construct_shifted_distribution(P, 0.2, False, seed=0)
        Q = construct_shifted_distribution(P, 0.2, False, seed=0, max_draws=50)
        assert np.linalg.norm(a_tau_matrix(5) @ (P.probs - Q.probs)) == pytest.approx(0.2, abs=1e-10)
        again = construct_shifted_distribution(P, 0.2, False, seed=0, max_draws=50)
        np.testing.assert_array_equal(Q.probs, again.probs)

    def test_boundary_p_rejected_for_null_shift(self):
        e = Permutation.identity(4)
        with pytest.raises(DataError, match="strictly positive"):
            construct_shifted_distribution(DistributionOnSd.point_mass(e), 0.0, True)

    def test_zero_delta_complement_returns_p(self):
        P = DistributionOnSd.uniform(3)
        assert construct_shifted_distribution(P, 0.0, False) is P

    def test_random_interior_p(self, rng):
        for s in range(10):
            P = DistributionOnSd.random(4, rng, 5.0)
            Q = construct_shifted_distribution(P, 0.0, True, seed=s)
            assert Q.probs.min() >= 0 and abs(Q.probs.sum() - 1) < 1e-12


def test_enumeration_indexing_consistent():
    # a point mass at the k-th permutation samples exactly that permutation
    perms = enumerate_sn(4)
    for k in (0, 7, 23):
        assert sample(DistributionOnSd.point_mass(perms[k]), 3, seed=0) == [perms[k]] * 3
