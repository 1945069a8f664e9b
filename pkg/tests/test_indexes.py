import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tourdiag import simdata
from tourdiag.indexes import (
    HOLES,
    KOLMOGOROV,
    ecdf_gap,
    evaluate,
    get_index,
    holes,
    kolmogorov,
)
from tourdiag.manifold import random_basis

# (1 - exp(-9/2)) / (1 - exp(-1/2)), evaluated once with the math module
HOLES_TWO_MASSES_AT_3 = 2.513260633571934


def loop_ecdf_gap(y, ref):
    """Oracle: literal ECDF definitions evaluated point by point."""
    best = -math.inf
    for x in list(y) + list(ref):
        fy = sum(v <= x for v in y) / len(y)
        fr = sum(v <= x for v in ref) / len(ref)
        best = max(best, fy - fr)
    return best


class TestHoles:
    def test_all_zero_rows(self):
        assert holes(np.zeros((10, 2))) == 0.0

    def test_two_point_masses(self):
        Y = np.array([[-3.0], [3.0]] * 50)
        # the quoted approximation 2.5134 is a rounding slip; 4 decimals give 2.5133
        assert holes(Y) == pytest.approx(HOLES_TWO_MASSES_AT_3, rel=1e-14)
        assert round(holes(Y), 4) == 2.5133

    def test_empty_rows_rejected(self):
        with pytest.raises(ValueError):
            holes(np.zeros((0, 1)))

    def test_accepts_flat_vector(self):
        y = np.array([-1.0, 1.0])
        assert holes(y) == holes(y[:, None])

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 3), st.integers(0, 10_000))
    def test_orthogonal_invariance(self, d, seed):
        rng = np.random.default_rng(seed)
        Y = rng.standard_normal((50, d)) * 2
        R = np.linalg.qr(rng.standard_normal((d, d)))[0]
        assert holes(Y @ R) == pytest.approx(holes(Y), abs=1e-12)

    def test_sign_flip_of_basis(self, boa5, rng):
        A = random_basis(5, 1, rng)
        assert evaluate(HOLES, boa5.values, A) == pytest.approx(
            evaluate(HOLES, boa5.values, -A), abs=1e-14)

    def test_ignores_rng(self, rng):
        Y = rng.standard_normal((20, 1))
        assert holes(Y, rng) == holes(Y)


class TestKolmogorov:
    def test_identical_sample_gives_zero(self):
        ref = np.random.default_rng(4).standard_normal(200)
        # same seed reproduces the reference draw exactly
        assert kolmogorov(ref, np.random.default_rng(4)) == 0.0

    def test_far_left_shift_gives_one(self, rng):
        y = rng.standard_normal(300) - 100
        assert kolmogorov(y, np.random.default_rng(1)) == 1.0

    def test_ecdf_gap_matches_loop_oracle(self, rng):
        for _ in range(20):
            y = np.sort(rng.standard_normal(40) + rng.uniform(-1, 1))
            ref = np.sort(rng.standard_normal(40))
            assert ecdf_gap(y, ref) == pytest.approx(loop_ecdf_gap(y, ref), abs=0)

    def test_ties_handled(self):
        y = np.array([0.0, 0.0, 1.0])
        ref = np.array([0.0, 1.0, 1.0])
        assert ecdf_gap(y, ref) == pytest.approx(loop_ecdf_gap(y, ref))
        assert ecdf_gap(y, ref) == pytest.approx(1 / 3)

    def test_monte_carlo_mean_small_positive(self):
        rng = np.random.default_rng(77)
        vals = [kolmogorov(rng.standard_normal(1000), rng) for _ in range(500)]
        assert 0.0 < np.mean(vals) < 0.1

    def test_frozen_rng_is_deterministic(self, boa5):
        A = np.eye(5)[:, :1]
        a = evaluate(KOLMOGOROV, boa5.values, A, np.random.default_rng(3))
        b = evaluate(KOLMOGOROV, boa5.values, A, np.random.default_rng(3))
        assert a == b

    def test_noisy_across_rngs(self, boa5):
        A = np.eye(5)[:, :1]
        vals = {evaluate(KOLMOGOROV, boa5.values, A, np.random.default_rng(s)) for s in range(10)}
        assert len(vals) > 1

    @pytest.mark.parametrize("shape", [(10, 2), (10, 3)])
    def test_needs_one_dimension(self, rng, shape):
        with pytest.raises(ValueError):
            kolmogorov(np.ones(shape), rng)

    def test_needs_rng(self):
        with pytest.raises(ValueError):
            kolmogorov(np.ones(5), None)


class TestEvaluate:
    def test_noise_axis_below_signal_axis(self, boa5):
        best = simdata.theoretical_best("boa5", 1)
        noise = np.eye(5)[:, [1]]
        assert evaluate("holes", boa5.values, noise) < evaluate("holes", boa5.values, best)

    def test_zero_data(self):
        assert evaluate(HOLES, np.zeros((5, 3)), np.eye(3)[:, :1]) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            evaluate(HOLES, np.zeros((5, 3)), np.eye(4)[:, :1])

    def test_lookup(self):
        assert get_index("holes") is HOLES
        assert get_index("kolmogorov").smooth is False
        with pytest.raises(ValueError, match="unknown index"):
            get_index("lda")
