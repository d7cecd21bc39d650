import numpy as np
import pytest

from pursuitviz import (
    VizError,
    align_signs,
    dumbbell_radius,
    embed_dumbbell,
    embed_sphere,
    split_mobius_path,
    split_torus_path,
)


class TestTorusSplitting:
    def test_interior_path_is_one_piece(self):
        pts = np.array([[0.2, 0.2], [0.4, 0.3], [0.6, 0.5]])
        pieces = split_torus_path(pts)
        assert len(pieces) == 1
        assert np.allclose(pieces[0], pts)

    def test_wrap_in_x_splits_once(self):
        pts = np.array([[0.9, 0.5], [0.1, 0.5]])
        pieces = split_torus_path(pts)
        assert len(pieces) == 2
        # exits right edge at x=1, re-enters at x=0
        assert pieces[0][-1][0] == pytest.approx(1.0)
        assert pieces[1][0][0] == pytest.approx(0.0)
        assert pieces[0][-1][1] == pytest.approx(0.5)

    def test_wrap_in_y_splits_once(self):
        pts = np.array([[0.5, 0.05], [0.5, 0.9]])
        pieces = split_torus_path(pts)
        assert len(pieces) == 2
        assert pieces[0][-1][1] == pytest.approx(0.0)
        assert pieces[1][0][1] == pytest.approx(1.0)

    def test_diagonal_corner_wrap_splits_twice(self):
        pts = np.array([[0.95, 0.9], [0.1, 0.05]])
        pieces = split_torus_path(pts)
        assert len(pieces) == 3

    def test_no_drawn_segment_exceeds_half_the_domain(self):
        rng = np.random.default_rng(7)
        walk = np.cumsum(rng.normal(scale=0.2, size=(200, 2)), axis=0)
        for piece in split_torus_path(walk):
            steps = np.abs(np.diff(piece, axis=0))
            assert steps.max() <= 0.5 + 1e-9

    def test_pieces_stay_inside_the_domain(self):
        rng = np.random.default_rng(8)
        walk = np.cumsum(rng.normal(scale=0.3, size=(100, 2)), axis=0)
        for piece in split_torus_path(walk):
            assert piece.min() >= -1e-9 and piece.max() <= 1 + 1e-9


class TestMobiusSplitting:
    def test_interior_path_untouched(self):
        pts = np.array([[0.3, 0.1], [0.5, -0.1], [0.7, 0.2]])
        pieces = split_mobius_path(pts, width=0.5)
        assert len(pieces) == 1

    def test_seam_crossing_flips_y(self):
        pts = np.array([[0.95, 0.2], [0.05, -0.2]])
        pieces = split_mobius_path(pts, width=0.5)
        assert len(pieces) == 2
        exit_pt, entry_pt = pieces[0][-1], pieces[1][0]
        assert exit_pt[0] == pytest.approx(1.0)
        assert entry_pt[0] == pytest.approx(0.0)
        # glide identification: (1, y) ~ (0, -y)
        assert entry_pt[1] == pytest.approx(-exit_pt[1])

    def test_double_circuit_splits_at_each_seam_pass(self):
        # straight crawl around the band twice; y returns to its start only
        # after the second pass, matching the glide identification
        x = np.linspace(0.0, 2.1, 420)
        y = 0.2 * np.cos(np.pi * x)
        pieces = split_mobius_path(np.column_stack([x, y]), width=0.5)
        assert len(pieces) == 3
        for piece in pieces:
            steps = np.abs(np.diff(piece, axis=0))
            assert steps.max() <= 0.5 + 1e-9

    def test_out_of_band_rejected(self):
        pts = np.array([[0.3, 0.1], [0.5, 0.9]])
        with pytest.raises(VizError, match="band"):
            split_mobius_path(pts, width=0.5)


class TestProjectiveAlignment:
    def test_antipodal_flips_collapse(self):
        p = np.array([0.6, 0.0, 0.8])
        pts = np.array([p, -p, p, -p])
        fixed = align_signs(pts)
        assert np.allclose(fixed, np.tile(p, (4, 1)))

    def test_smooth_path_unchanged(self):
        th = np.linspace(0, 0.5, 20)
        pts = np.column_stack([np.cos(th), np.sin(th), np.zeros_like(th)])
        assert np.allclose(align_signs(pts), pts)


class TestEmbeddings:
    def test_sphere_scales_unit_vectors_to_the_radius(self):
        rng = np.random.default_rng(3)
        pts = rng.normal(size=(10, 3))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        e = embed_sphere(pts, radius=2.0)
        assert np.allclose(np.linalg.norm(e, axis=1), 2.0)
        assert np.allclose(e / 2.0, pts)

    def test_dumbbell_radius_profile(self):
        assert dumbbell_radius(0.0, 0.6, 1.0) == pytest.approx(0.4)
        assert dumbbell_radius(3.0, 0.6, 1.0) == pytest.approx(1.0, abs=1e-3)
        assert dumbbell_radius(-1.0, 0.6, 1.0) == dumbbell_radius(1.0, 0.6, 1.0)

    def test_dumbbell_embedding_respects_the_profile(self):
        pts = np.array([[0.0, 0.0], [0.0, np.pi / 2], [1.5, np.pi]])
        e = embed_dumbbell(pts, depth=0.6, width=1.0)
        assert e.shape == (3, 3)
        r0 = dumbbell_radius(0.0, 0.6, 1.0)
        assert np.allclose(e[0], [r0, 0.0, 0.0])
        assert np.allclose(e[1], [0.0, r0, 0.0])
        assert e[2][2] == pytest.approx(1.5)
        assert np.hypot(e[2][0], e[2][1]) == pytest.approx(
            dumbbell_radius(1.5, 0.6, 1.0))
