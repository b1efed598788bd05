import json

import numpy as np
import pytest
from scipy import stats

from tripletclf.errors import DataError, DomainError
from tripletclf.prior_model import estimate_prior
from tripletclf.triplet_data import (Feedback, GaussianSource, GaussianSpec, LabeledExample,
                                     PoolSource, Triplet, TripletDataset, aggregate_pointwise,
                                     generate_triplets, load_labeled_csv, read_triplets,
                                     route_label_pattern, route_labels, sample_gaussian,
                                     write_labeled_csv, write_triplets)

from conftest import enumerate_bag_marginals


class DiscreteSource:
    """Labels ~ Bernoulli(pi_plus); x | y drawn from a pmf on {0, .., k-1}."""

    d = 1

    def __init__(self, p_pos, p_neg, pi_plus):
        self.cdf = {1: np.cumsum(p_pos), -1: np.cumsum(p_neg)}
        self.pi_plus = pi_plus

    def draw(self, stream, index):
        y = np.where(stream.uniform(index, 0) < self.pi_plus, 1, -1)
        u = stream.uniform(index, 1)
        x = np.where(y == 1, np.searchsorted(self.cdf[1], u), np.searchsorted(self.cdf[-1], u))
        return x.astype(float).reshape(-1, 1), y


class TestRouting:
    @pytest.mark.parametrize("ys, expected", [
        ((1, -1, 1), Feedback.FLIP),
        ((-1, 1, -1), Feedback.FLIP),
        ((1, 1, -1), Feedback.KEEP),
        ((-1, -1, 1), Feedback.KEEP),
        ((1, 1, 1), Feedback.KEEP),
        ((-1, -1, -1), Feedback.KEEP),
        ((1, -1, -1), Feedback.KEEP),
        ((-1, 1, 1), Feedback.KEEP),
    ])
    def test_all_patterns(self, ys, expected):
        assert route_label_pattern(*ys) is expected

    def test_bad_label(self):
        with pytest.raises(DomainError):
            route_label_pattern(1, 0, 1)

    def test_vectorized(self):
        np.testing.assert_array_equal(route_labels([[1, -1, 1], [1, 1, 1]]), [True, False])


class TestGeneration:
    spec = GaussianSpec((1.0, 1.0), (-1.0, -1.0), 1.0, 0.7)

    def test_flip_fraction(self):
        data = generate_triplets(GaussianSource(self.spec), 100_000, seed=42)
        assert len(data) == 100_000
        assert abs(data.n2 / len(data) - 0.21) < 0.004

    def test_single_class_never_flips(self):
        spec = GaussianSpec((1.0,), (-1.0,), 1.0, 1.0)
        data = generate_triplets(GaussianSource(spec), 500, seed=1)
        assert data.n2 == 0 and data.n1 == 500

    def test_empty(self):
        data = generate_triplets(GaussianSource(self.spec), 0, seed=1)
        assert (data.n1, data.n2, data.d) == (0, 0, 2)

    def test_determinism(self):
        a = generate_triplets(GaussianSource(self.spec), 300, seed=9)
        b = generate_triplets(GaussianSource(self.spec), 300, seed=9)
        c = generate_triplets(GaussianSource(self.spec), 300, seed=10)
        np.testing.assert_array_equal(a.keep, b.keep)
        np.testing.assert_array_equal(a.flip, b.flip)
        assert not np.array_equal(a.keep[:10], c.keep[:10])

    def test_prefix_stability(self):
        """Triplet i depends only on (seed, i), not on the total count."""
        small = generate_triplets(GaussianSource(self.spec), 50, seed=3)
        big = generate_triplets(GaussianSource(self.spec), 500, seed=3)
        np.testing.assert_array_equal(big.keep[:small.n1], small.keep)

    def test_negative_count(self):
        with pytest.raises(DomainError):
            generate_triplets(GaussianSource(self.spec), -1, seed=0)

    def test_bag_marginals_chi_square(self):
        p_pos = np.array([0.4, 0.3, 0.15, 0.1, 0.05])
        p_neg = np.array([0.05, 0.1, 0.15, 0.3, 0.4])
        pi = 0.7
        data = generate_triplets(DiscreteSource(p_pos, p_neg, pi), 100_000, seed=11)
        bags = aggregate_pointwise(data)
        q1, q2, q3, _, _ = enumerate_bag_marginals(p_pos, p_neg, pi)
        for bag, q in zip(bags, (q1, q2, q3)):
            counts = np.bincount(bag[:, 0].astype(int), minlength=5)
            assert stats.chisquare(counts, q * counts.sum()).pvalue > 0.01

    def test_prior_recovered(self):
        data = generate_triplets(GaussianSource(self.spec), 100_000, seed=5)
        assert abs(estimate_prior(data.n1, data.n2) - 0.7) < 0.01


class TestSamplers:
    def test_label_frequency(self):
        spec = GaussianSpec((0.0,), (1.0,), 1.0, 0.7)
        _, y = sample_gaussian(spec, 3).sample(100_000)
        assert abs(np.mean(y == 1) - 0.7) < 0.0044

    def test_single_class(self):
        _, y = sample_gaussian(GaussianSpec((0.0,), (1.0,), 2.0, 1.0), 3).sample(1000)
        assert np.all(y == 1)

    def test_same_seed_same_stream(self):
        spec = GaussianSpec((0.0, 0.0), (1.0, 1.0), 0.5, 0.4)
        a, b = sample_gaussian(spec, 8), sample_gaussian(spec, 8)
        np.testing.assert_array_equal(a.sample(50)[0], b.sample(50)[0])
        first = [next(iter(a)) for _ in range(1)][0]
        np.testing.assert_array_equal(first.x, a.sample(1)[0][0])

    def test_class_conditional_moments(self):
        spec = GaussianSpec((2.0, -1.0), (0.0, 0.0), 0.5, 0.5)
        X, y = sample_gaussian(spec, 1).sample(50_000)
        np.testing.assert_allclose(X[y == 1].mean(axis=0), [2.0, -1.0], atol=0.02)
        np.testing.assert_allclose(X[y == -1].std(axis=0), [0.5, 0.5], atol=0.02)

    def test_pool_without_replacement_exhausts(self):
        X = np.arange(30, dtype=float).reshape(-1, 1)
        y = np.where(np.arange(30) % 3 == 0, -1, 1)
        src = PoolSource(X, y, replace=False)
        data = generate_triplets(src, 10, seed=0)
        used = np.sort(np.concatenate([data.keep, data.flip]).ravel())
        np.testing.assert_array_equal(used, np.arange(30))
        with pytest.raises(DataError):
            generate_triplets(src, 11, seed=0)

    def test_pool_with_replacement(self):
        X = np.array([[0.0], [1.0]])
        src = PoolSource(X, np.array([1, -1]))
        data = generate_triplets(src, 1000, seed=0)
        assert len(data) == 1000


class TestAggregation:
    def test_single_keep(self):
        a, b, c = np.array([1.0]), np.array([2.0]), np.array([3.0])
        data = TripletDataset.from_triplets([Triplet(a, b, c)], [])
        bags = aggregate_pointwise(data)
        np.testing.assert_array_equal(bags.bag1[:, 0], [1.0, 3.0])
        np.testing.assert_array_equal(bags.bag2[:, 0], [2.0])
        assert bags.bag3.shape == (0, 1)

    def test_sizes_and_order(self):
        keep = [Triplet(*(np.array([10.0 * i + j]) for j in range(3))) for i in range(3)]
        flip = [Triplet(*(np.array([100.0 + 10 * i + j]) for j in range(3))) for i in range(2)]
        bags = aggregate_pointwise(TripletDataset.from_triplets(keep, flip))
        assert bags.sizes == (10, 3, 2)
        np.testing.assert_array_equal(bags.bag1[:, 0], [0, 10, 20, 2, 12, 22, 100, 110, 102, 112])
        np.testing.assert_array_equal(bags.bag3[:, 0], [101, 111])

    def test_empty(self):
        assert aggregate_pointwise(TripletDataset.empty(4)).sizes == (0, 0, 0)


class TestCsv:
    def test_basic(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("f1,f2,label\n0.5,1.5,1\n-2,3,-1\n")
        ex = load_labeled_csv(p)
        assert len(ex) == 2 and ex[0].x.shape == (2,) and [e.y for e in ex] == [1, -1]

    def test_headerless_and_zero_label(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("1,2,0\n3,4,+1\n")
        assert [e.y for e in load_labeled_csv(p)] == [-1, 1]

    def test_ragged_row(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("1,2,1\n3,1\n")
        with pytest.raises(DataError, match=":2:"):
            load_labeled_csv(p)

    def test_non_numeric(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("1,2,1\n3,x,1\n")
        with pytest.raises(DataError, match=":2:"):
            load_labeled_csv(p)

    def test_bad_label(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("1,2,2\n")
        with pytest.raises(DataError, match=":1:"):
            load_labeled_csv(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            load_labeled_csv(tmp_path / "nope.csv")

    def test_write_round_trip(self, tmp_path):
        X = np.array([[0.1, 1 / 3], [2.0, -5.5]])
        write_labeled_csv(tmp_path / "o.csv", X, [1, -1])
        ex = load_labeled_csv(tmp_path / "o.csv")
        np.testing.assert_array_equal(np.array([e.x for e in ex]), X)

    def test_labeled_example_validates(self):
        with pytest.raises(DomainError):
            LabeledExample(np.zeros(2), 0)


class TestTripletFile:
    def test_round_trip_exact(self, tmp_path):
        data = generate_triplets(GaussianSource(GaussianSpec((1.0, 1.0), (-1.0, -1.0), 1.0, 0.7)), 200, 4)
        write_triplets(data, tmp_path / "t.jsonl")
        back = read_triplets(tmp_path / "t.jsonl")
        np.testing.assert_array_equal(back.keep, data.keep)
        np.testing.assert_array_equal(back.flip, data.flip)
        lines = (tmp_path / "t.jsonl").read_text().splitlines()
        assert len(lines) == 200
        assert set(json.loads(lines[0])) == {"kind", "a", "b", "c"}

    def test_mixed_dimensions_rejected(self, tmp_path):
        p = tmp_path / "t.jsonl"
        p.write_text('{"kind": "keep", "a": [1, 2], "b": [1, 2], "c": [1, 2]}\n'
                     '{"kind": "flip", "a": [1], "b": [1], "c": [1]}\n')
        with pytest.raises(DataError, match=":2:"):
            read_triplets(p)
        p.write_text('{"kind": "keep", "a": [1, 2], "b": [1], "c": [1, 2]}\n')
        with pytest.raises(DataError):
            read_triplets(p)

    def test_bad_kind_and_empty(self, tmp_path):
        p = tmp_path / "t.jsonl"
        p.write_text('{"kind": "maybe", "a": [1], "b": [1], "c": [1]}\n')
        with pytest.raises(DataError):
            read_triplets(p)
        p.write_text("")
        with pytest.raises(DataError):
            read_triplets(p)
