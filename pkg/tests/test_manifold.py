import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tourdiag.manifold import (
    DegenerateBasisError,
    alignment_det,
    check_basis,
    geodesic_distance,
    geodesic_path,
    geodesic_step,
    linear_blend,
    orient_match,
    orthonormality_error,
    orthonormalize,
    principal_angles,
    random_basis,
)

e1 = np.array([[1.0], [0.0]])
e2 = np.array([[0.0], [1.0]])


def pair(seed, p, d):
    rng = np.random.default_rng(seed)
    return random_basis(p, d, rng), random_basis(p, d, rng)


dims = st.tuples(st.integers(2, 6), st.integers(1, 2)).filter(lambda t: t[1] < t[0])


class TestOrthonormalize:
    def test_identity_columns_unchanged(self):
        I = np.eye(3)[:, :2]
        np.testing.assert_array_equal(orthonormalize(I), I)

    def test_normalizes_single_column(self):
        np.testing.assert_allclose(orthonormalize([[2.0], [0.0], [0.0]]), [[1.0], [0.0], [0.0]])

    def test_hand_gram_schmidt(self):
        M = np.array([[1.0, 1.0], [0.0, 1.0], [0.0, 0.0]])
        np.testing.assert_allclose(orthonormalize(M), np.eye(3)[:, :2], atol=1e-15)

    def test_first_column_direction_preserved(self, rng):
        M = rng.standard_normal((5, 2))
        Q = orthonormalize(M)
        np.testing.assert_allclose(Q[:, 0], M[:, 0] / np.linalg.norm(M[:, 0]))

    def test_span_preserved(self, rng):
        M = rng.standard_normal((6, 2))
        Q = orthonormalize(M)
        # projecting M onto span(Q) leaves it unchanged
        np.testing.assert_allclose(Q @ (Q.T @ M), M, atol=1e-12)

    @pytest.mark.parametrize("M", [
        [[1.0, 2.0], [1.0, 2.0], [0.0, 0.0]],
        [[0.0, 1.0], [0.0, 0.0], [0.0, 0.0]],
    ])
    def test_rank_deficient(self, M):
        with pytest.raises(DegenerateBasisError):
            orthonormalize(M)

    def test_does_not_mutate(self, rng):
        M = rng.standard_normal((4, 2))
        before = M.copy()
        orthonormalize(M)
        np.testing.assert_array_equal(M, before)


class TestGeodesicDistance:
    def test_self_distance_zero(self, rng):
        A = random_basis(5, 2, rng)
        assert geodesic_distance(A, A) == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal_lines(self):
        assert geodesic_distance(e1, e2) == pytest.approx(math.pi / 2, abs=1e-15)

    def test_sign_flip_same_span(self):
        assert geodesic_distance(e1, -e1) == pytest.approx(0.0, abs=1e-12)

    def test_shape_mismatch(self, rng):
        with pytest.raises(ValueError):
            geodesic_distance(random_basis(4, 1, rng), random_basis(5, 1, rng))

    @settings(max_examples=60, deadline=None)
    @given(dims, st.integers(0, 10_000))
    def test_metric_properties(self, pd_, seed):
        p, d = pd_
        rng = np.random.default_rng(seed)
        A, B, C = (random_basis(p, d, rng) for _ in range(3))
        ab, ba = geodesic_distance(A, B), geodesic_distance(B, A)
        assert ab == pytest.approx(ba, abs=1e-12)
        assert ab >= 0
        assert ab <= geodesic_distance(A, C) + geodesic_distance(C, B) + 1e-9
        # rotating within the span does not move the point
        R = np.linalg.qr(rng.standard_normal((d, d)))[0]
        assert geodesic_distance(A, A @ R) == pytest.approx(0.0, abs=1e-10)

    def test_principal_angles_oracle(self):
        # span{e1, e2} vs span{e1, cos t e2 + sin t e3}: angles {0, t}
        t = 0.3
        A = np.eye(3)[:, :2]
        B = np.array([[1, 0], [0, math.cos(t)], [0, math.sin(t)]])
        np.testing.assert_allclose(principal_angles(A, B), [0.0, t], atol=1e-14)


class TestGeodesicPath:
    def test_zero_distance_single_frame(self, rng):
        A = random_basis(4, 2, rng)
        path = geodesic_path(A, A, 0.1)
        assert len(path) == 1
        np.testing.assert_array_equal(path[0], A)

    def test_quarter_turn_in_plane(self):
        path = geodesic_path(e1, e2, math.pi / 4)
        assert len(path) == 3
        r = 1 / math.sqrt(2)
        np.testing.assert_allclose(path[1], [[r], [r]], atol=1e-15)
        np.testing.assert_allclose(path[2], e2)

    @pytest.mark.parametrize("p,d", [(3, 1), (5, 1), (3, 2), (6, 2), (4, 3)])
    def test_constant_speed_and_endpoints(self, p, d):
        A, B = pair(p * 10 + d, p, d)
        path = geodesic_path(A, B, 0.05)
        steps = [geodesic_distance(path[i], path[i + 1]) for i in range(len(path) - 1)]
        assert np.ptp(steps) < 1e-6
        np.testing.assert_allclose(path[0], A, atol=1e-8)
        np.testing.assert_allclose(path[-1], B, atol=1e-8)
        assert len(path) == math.ceil(path.length / 0.05) + 1
        assert max(orthonormality_error(F) for F in path) < 1e-8

    def test_frame_count_matches_distance_when_oriented(self):
        A, B = pair(7, 5, 2)
        B = orient_match(A, B)
        path = geodesic_path(A, B, 0.05)
        assert len(path) == math.ceil(geodesic_distance(A, B) / 0.05) + 1

    @settings(max_examples=40, deadline=None)
    @given(st.integers(3, 6), st.integers(0, 10_000))
    def test_one_dimensional_path_stays_in_plane(self, p, seed):
        rng = np.random.default_rng(seed)
        v, w = random_basis(p, 1, rng), random_basis(p, 1, rng)
        plane = orthonormalize(np.hstack([v, w]))
        for F in geodesic_path(v, w, 0.05):
            residual = F - plane @ (plane.T @ F)
            assert np.max(np.abs(residual)) < 1e-8

    def test_negative_alignment_goes_the_long_way(self):
        # without an orientation fix the path must still end at the given target
        theta = 2.5
        A = np.array([[1.0], [0.0], [0.0]])
        B = np.array([[math.cos(theta)], [math.sin(theta)], [0.0]])
        path = geodesic_path(A, B, 0.1)
        assert path.length == pytest.approx(theta)
        np.testing.assert_allclose(path[-1], B)
        oriented = geodesic_path(A, orient_match(A, B), 0.1)
        assert oriented.length == pytest.approx(math.pi - theta)

    def test_antipodal_target(self):
        A = np.array([[1.0], [0.0], [0.0]])
        path = geodesic_path(A, -A, 0.5)
        assert path.length == pytest.approx(math.pi)
        assert max(orthonormality_error(F) for F in path) < 1e-12
        np.testing.assert_allclose(path[-1], -A)

    def test_rejects_bad_step(self):
        with pytest.raises(ValueError):
            geodesic_path(e1, e2, 0.0)


class TestGeodesicStep:
    @pytest.mark.parametrize("angle", [0.01, -0.01, 0.5, -0.7])
    def test_distance_equals_angle(self, angle):
        A, B = pair(11, 6, 2)
        B = orient_match(A, B)
        S = geodesic_step(A, B, angle)
        assert geodesic_distance(A, S) == pytest.approx(abs(angle), abs=1e-12)


class TestOrientMatch:
    def test_flips_opposite_line(self):
        np.testing.assert_array_equal(orient_match(e1, -e1), e1)

    def test_orthogonal_line_unchanged(self):
        np.testing.assert_array_equal(orient_match(e1, e2), e2)

    def test_two_dimensional_flip(self):
        current = np.eye(3)[:, :2]
        aligned = np.array([[0.8, 0.0], [0.6, 0.1], [0.0, 0.995]])
        aligned = orthonormalize(aligned)
        flipped = aligned * np.array([1.0, -1.0])
        # det of the 2x2 alignment: aligned > 0, one column flipped < 0
        assert alignment_det(current, aligned) > 0 > alignment_det(current, flipped)
        fixed = orient_match(current, flipped)
        assert alignment_det(current, fixed) > 0
        np.testing.assert_allclose(np.abs(fixed), np.abs(aligned))

    @settings(max_examples=50, deadline=None)
    @given(dims, st.integers(0, 10_000))
    def test_idempotent_and_magnitude_preserving(self, pd_, seed):
        p, d = pd_
        A, B = pair(seed, p, d)
        once = orient_match(A, B)
        np.testing.assert_array_equal(orient_match(A, once), once)
        assert abs(alignment_det(A, once)) == pytest.approx(abs(alignment_det(A, B)), abs=1e-12)
        assert alignment_det(A, once) >= 0


class TestRandomBasis:
    def test_deterministic(self):
        a = random_basis(5, 2, np.random.default_rng(9))
        b = random_basis(5, 2, np.random.default_rng(9))
        np.testing.assert_array_equal(a, b)

    def test_coordinate_means_symmetric(self):
        rng = np.random.default_rng(5)
        draws = np.array([random_basis(5, 1, rng)[:, 0] for _ in range(10_000)])
        assert np.all(np.abs(draws.mean(axis=0)) < 4 / math.sqrt(10_000))

    def test_every_draw_is_a_basis(self, rng):
        for _ in range(200):
            check_basis(random_basis(6, 2, rng))

    @pytest.mark.parametrize("p,d", [(3, 3), (2, 0)])
    def test_bad_shape(self, rng, p, d):
        with pytest.raises(ValueError):
            random_basis(p, d, rng)


class TestLinearBlend:
    def test_alpha_zero(self, rng):
        A, R = pair(1, 4, 2)
        np.testing.assert_allclose(linear_blend(A, R, 0.0), A, atol=1e-15)

    def test_alpha_one(self):
        A, R = pair(2, 4, 2)
        np.testing.assert_allclose(linear_blend(A, R, 1.0), orthonormalize(R))

    def test_half_blend_in_plane(self):
        r = 1 / math.sqrt(2)
        np.testing.assert_allclose(linear_blend(e1, e2, 0.5), [[r], [r]], atol=1e-15)

    def test_cancelling_blend_is_degenerate(self):
        with pytest.raises(DegenerateBasisError):
            linear_blend(e1, -e1, 0.5)
