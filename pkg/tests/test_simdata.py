import numpy as np
import pytest
from scipy.cluster.vq import kmeans2
from scipy.spatial.distance import cdist

from tourdiag import simdata
from tourdiag.indexes import holes
from tourdiag.manifold import random_basis


def silhouette(X, labels):
    """Mean silhouette width, straight from the definition."""
    D = cdist(X, X)
    widths = np.empty(len(X))
    for i, li in enumerate(labels):
        same = labels == li
        same[i] = False
        a = D[i, same].mean()
        b = min(D[i, labels == k].mean() for k in np.unique(labels) if k != li)
        widths[i] = (b - a) / max(a, b)
    return widths.mean()


@pytest.fixture(scope="module")
def big():
    return simdata.generate(10_000, 5)


class TestGenerate:
    def test_two_point_column(self, big):
        x3 = big.column("x3", raw=True)
        assert set(np.unique(x3)) == {-1.0, 1.0}
        share = np.mean(x3 == 1.0)
        assert abs(share - 0.5) <= 4 * np.sqrt(0.25 / 10_000)

    def test_symmetric_mixture_mean(self, big):
        x2 = big.column("x2", raw=True)
        # mixture of N(-3, 1) and N(3, 1): variance 1 + 9
        assert abs(x2.mean()) <= 4 * np.sqrt(10.0 / 10_000)

    @pytest.mark.parametrize("n", [500, 1000, 5000])
    def test_unit_variance(self, n):
        ds = simdata.generate(n, 2)
        var = ds.values.var(axis=0, ddof=1)
        assert np.all((var >= 0.95) & (var <= 1.05))
        np.testing.assert_allclose(ds.values.mean(axis=0), 0, atol=1e-12)

    def test_same_seed_identical(self):
        a, b = simdata.generate(300, 9), simdata.generate(300, 9)
        assert a.values.tobytes() == b.values.tobytes()

    def test_different_seed_differs(self):
        assert not np.array_equal(simdata.generate(300, 1).values, simdata.generate(300, 2).values)

    def test_too_few_rows(self):
        with pytest.raises(ValueError):
            simdata.generate(1)


class TestSubsets:
    def test_column_counts(self, boa5, boa6):
        assert boa5.p == 5 and boa6.p == 6
        assert boa5.columns == ("x2", "x1", "x8", "x9", "x10")
        assert boa6.columns == ("x2", "x7", "x1", "x8", "x9", "x10")

    def test_subset_matches_full(self, boa6):
        full = simdata.generate(1000, 1)
        np.testing.assert_array_equal(boa6.column("x7"), full.column("x7"))

    def test_four_clusters(self, boa6):
        Y = boa6.values @ simdata.theoretical_best("boa6", 2)
        _, labels = kmeans2(Y, 4, seed=np.random.default_rng(0), minit="++")
        assert len(np.unique(labels)) == 4
        assert silhouette(Y, labels) > 0.5

    def test_best_beats_random_bases(self, boa5):
        rng = np.random.default_rng(123)
        best = holes(boa5.values @ simdata.theoretical_best("boa5", 1))
        rand = [holes(boa5.values @ random_basis(5, 1, rng)) for _ in range(10_000)]
        assert best > max(rand)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            simdata.make_dataset("boa7")


class TestTheoreticalBest:
    def test_boa5(self):
        np.testing.assert_array_equal(simdata.theoretical_best("boa5", 1)[:, 0], [1, 0, 0, 0, 0])

    def test_boa6_plane(self):
        A = simdata.theoretical_best("boa6", 2)
        np.testing.assert_array_equal(A.T @ A, np.eye(2))
        assert A[0, 0] == 1 and A[1, 1] == 1

    @pytest.mark.parametrize("kind,d", [("boa5", 1), ("boa6", 1), ("boa6", 2)])
    def test_beats_every_noise_axis(self, kind, d):
        ds = simdata.make_dataset(kind, 1000, 1)
        best = holes(ds.values @ simdata.theoretical_best(kind, d))
        noise = [j for j, c in enumerate(ds.columns) if c in ("x1", "x8", "x9", "x10")]
        for j in noise:
            cols = [j] if d == 1 else [j, noise[0] if j != noise[0] else noise[1]]
            assert holes(ds.values[:, cols]) < best

    def test_unknown_pair(self):
        with pytest.raises(ValueError):
            simdata.theoretical_best("boa5", 2)


class TestCsv:
    def test_round_trip_exact(self, tmp_path, boa5):
        path = tmp_path / "boa5.csv"
        boa5.to_csv(path)
        header, values = simdata.read_csv(path)
        assert header == boa5.columns
        np.testing.assert_array_equal(values, boa5.values)

    def test_non_numeric(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,x\n")
        with pytest.raises(ValueError, match="non-numeric"):
            simdata.read_csv(path)

    def test_ragged(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n3\n")
        with pytest.raises(ValueError):
            simdata.read_csv(path)
