import numpy as np
import numpy.testing as npt
import pytest

from afbench.numerics import (
    RandomStream,
    as_matrix,
    derive_seed,
    elementwise_map,
    matmul,
    reduce,
)


class TestMatmul:
    def test_identity(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        npt.assert_array_equal(matmul(a, np.eye(2)), a)

    def test_known_product(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        b = np.array([[5.0, 6.0], [7.0, 8.0]])
        npt.assert_array_equal(matmul(a, b), [[19.0, 22.0], [43.0, 50.0]])

    def test_zero_matrix_annihilates(self):
        a = np.arange(6.0).reshape(2, 3)
        npt.assert_array_equal(matmul(a, np.zeros((3, 4))), np.zeros((2, 4)))

    def test_shape_mismatch_names_both_shapes(self):
        with pytest.raises(ValueError, match=r"\(2, 3\).*\(2, 3\)"):
            matmul(np.zeros((2, 3)), np.zeros((2, 3)))

    def test_rejects_non_2d(self):
        with pytest.raises(ValueError, match="2-D"):
            matmul(np.zeros(3), np.zeros((3, 2)))

    def test_rejects_non_finite_result(self):
        a = np.array([[1e308, 1e308]])
        b = np.array([[2.0], [2.0]])
        with pytest.raises(ValueError, match="non-finite"):
            matmul(a, b)

    def test_associativity_on_random_triples(self):
        rng = np.random.Generator(np.random.PCG64(123))
        for _ in range(25):
            dims = rng.integers(1, 8, size=4)
            a = rng.uniform(-1, 1, (dims[0], dims[1]))
            b = rng.uniform(-1, 1, (dims[1], dims[2]))
            c = rng.uniform(-1, 1, (dims[2], dims[3]))
            left = matmul(matmul(a, b), c)
            right = matmul(a, matmul(b, c))
            assert np.abs(left - right).max() < 1e-9


class TestElementwiseMap:
    def test_identity(self):
        a = np.array([[1.0, -2.0], [0.5, 3.0]])
        npt.assert_array_equal(elementwise_map(a, lambda v: v), a)

    def test_doubling_preserves_shape(self):
        a = np.arange(12.0).reshape(3, 4)
        out = elementwise_map(a, lambda v: 2 * v)
        assert out.shape == a.shape
        npt.assert_array_equal(out, 2 * a)


class TestReduce:
    def test_row_sum(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        npt.assert_array_equal(reduce(a, "sum", axis=1), [3.0, 7.0])

    def test_column_sum(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        npt.assert_array_equal(reduce(a, "sum", axis=0), [4.0, 6.0])

    def test_mean_and_max(self):
        a = np.array([[1.0, 5.0], [3.0, 1.0]])
        npt.assert_array_equal(reduce(a, "mean", axis=0), [2.0, 3.0])
        npt.assert_array_equal(reduce(a, "max", axis=1), [5.0, 3.0])

    def test_argmax_tie_resolves_to_lowest_index(self):
        a = np.array([[0.2, 0.5, 0.5]])
        assert reduce(a, "argmax", axis=1)[0] == 1

    def test_unknown_op(self):
        with pytest.raises(ValueError, match="unknown reduce op"):
            reduce(np.zeros((2, 2)), "median", axis=0)

    def test_bad_axis(self):
        with pytest.raises(ValueError, match="axis"):
            reduce(np.zeros((2, 2)), "sum", axis=2)


class TestAsMatrix:
    def test_from_lists(self):
        out = as_matrix([[1, 2], [3, 4]])
        assert out.dtype == np.float64
        assert out.shape == (2, 2)

    def test_rejects_1d(self):
        with pytest.raises(ValueError, match="2-D"):
            as_matrix([1.0, 2.0])


class TestRandomStream:
    def test_same_seed_bit_identical(self):
        a = RandomStream(99)
        b = RandomStream(99)
        npt.assert_array_equal(a.uniform(-1, 1, 4, 5), b.uniform(-1, 1, 4, 5))
        npt.assert_array_equal(a.normal(0, 1, 3, 3), b.normal(0, 1, 3, 3))
        npt.assert_array_equal(a.bernoulli_mask(0.5, 4, 4), b.bernoulli_mask(0.5, 4, 4))
        npt.assert_array_equal(a.permutation(17), b.permutation(17))

    def test_different_seeds_differ(self):
        a = RandomStream(1).uniform(0, 1, 8, 8)
        b = RandomStream(2).uniform(0, 1, 8, 8)
        assert not np.array_equal(a, b)

    def test_uniform_bounds(self):
        draws = RandomStream(5).uniform(-0.25, 0.75, 100, 100)
        assert draws.min() >= -0.25
        assert draws.max() < 0.75

    def test_uniform_degenerate_interval(self):
        draws = RandomStream(5).uniform(0.3, 0.3, 4, 4)
        npt.assert_array_equal(draws, np.full((4, 4), 0.3))

    def test_uniform_reversed_bounds(self):
        with pytest.raises(ValueError, match="reversed"):
            RandomStream(0).uniform(1.0, -1.0, 2, 2)

    def test_uniform_sample_mean(self):
        draws = RandomStream(7).uniform(0, 1, 1000, 1000)
        assert abs(draws.mean() - 0.5) < 1e-3

    def test_normal_moments(self):
        draws = RandomStream(11).normal(0, 1, 1000, 1000)
        assert abs(draws.mean()) < 4e-3
        assert abs(draws.std() - 1.0) < 4e-3

    def test_normal_zero_std(self):
        npt.assert_array_equal(
            RandomStream(0).normal(2.5, 0.0, 3, 2), np.full((3, 2), 2.5)
        )

    def test_normal_negative_std(self):
        with pytest.raises(ValueError, match="std"):
            RandomStream(0).normal(0, -1.0, 2, 2)

    @pytest.mark.parametrize("keep", [0.0, 1.0])
    def test_mask_extremes(self, keep):
        mask = RandomStream(3).bernoulli_mask(keep, 10, 10)
        npt.assert_array_equal(mask, np.full((10, 10), keep))

    def test_mask_is_binary_and_calibrated(self):
        mask = RandomStream(13).bernoulli_mask(0.5, 1000, 1000)
        assert set(np.unique(mask)) <= {0.0, 1.0}
        assert abs(mask.mean() - 0.5) < 2e-3

    def test_mask_bad_prob(self):
        with pytest.raises(ValueError, match="keep_prob"):
            RandomStream(0).bernoulli_mask(1.5, 2, 2)

    def test_permutation_is_permutation(self):
        perm = RandomStream(21).permutation(50)
        assert sorted(perm) == list(range(50))


class TestDeriveSeed:
    def test_deterministic(self):
        assert derive_seed(1, "DNN-3A", "pfts", 0) == derive_seed(1, "DNN-3A", "pfts", 0)

    def test_distinct_labels_distinct_seeds(self):
        seeds = {
            derive_seed(base, cfg, act, run)
            for base in (0, 1)
            for cfg in ("DNN-3A", "64-32")
            for act in ("relu", "pfts")
            for run in range(3)
        }
        assert len(seeds) == 24

    def test_fits_in_64_bits(self):
        assert 0 <= derive_seed("anything", 123) < 2**64

    def test_child_streams_are_independent(self):
        parent = RandomStream(6)
        a = parent.child("weights").uniform(0, 1, 3, 3)
        b = parent.child("dropout").uniform(0, 1, 3, 3)
        assert not np.array_equal(a, b)
        npt.assert_array_equal(a, RandomStream(6).child("weights").uniform(0, 1, 3, 3))
