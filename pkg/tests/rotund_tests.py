#!/usr/bin/env python3.7
# -*- coding: utf-8 -*-
from math import sqrt

import numpy as np
import pytest

from setvalued import geometry, rotund
from setvalued.models.sets import ConvexPolytope, NormSpec
from setvalued.rotund import Membership

square = ConvexPolytope(2, [[-1, -1], [-1, 1], [1, -1], [1, 1]])
unit_square = ConvexPolytope(2, [[0, 0], [0, 1], [1, 0], [1, 1]])
cube = ConvexPolytope(3, [[i, j, k] for i in (0, 1) for j in (0, 1) for k in (0, 1)])


def polytopes(seed: int, count: int, dim: int = 2):
    rng = np.random.default_rng(seed)
    found = []
    while len(found) < count:
        c = geometry.random_polytope(rng, dim, 7, center=rng.uniform(-1.0, 1.0, dim))
        if geometry.full_dimensional(c) and geometry.chebyshev_center(c)[1] > 0.05:
            found.append(c)
    return found


class TestKleeMap:
    def test_square_parameter(self):
        k = rotund.klee_map(square, 0.5, [0, 0])
        assert k.a == pytest.approx(1 / (2 * sqrt(2)), abs=1e-12)
        assert np.allclose(k.shift, [0, 0])

    @pytest.mark.parametrize("eps", (0.1, 0.5))
    def test_sandwich(self, eps):
        rng = np.random.default_rng(int(eps * 10))
        for c in polytopes(13, 50):
            center, _ = geometry.chebyshev_center(c)
            k = rotund.klee_map(c, eps, center)
            for w in geometry.sample_points(c, 10, rng):
                assert k.membership(center + (1 - eps) * (w - center)) is not Membership.OUTSIDE
                assert geometry.contains(c, k.forward(w), 1e-9)

    @pytest.mark.parametrize("eps", (0.1, 0.5))
    def test_vertex_sandwich_fine_mesh(self, eps):
        for i, c in enumerate(polytopes(13, 50)):
            center, _ = geometry.chebyshev_center(c)
            k = rotund.klee_map(c, eps, center, approx_subdiv=64)
            for w in c.vertices:
                assert k.membership(center + (1 - eps) * (w - center)) is not Membership.OUTSIDE
                assert geometry.contains(c, k.forward(w), 1e-9)
            worst, _ = rotund.rotundity_probe(k, 200, i, 1000)
            assert worst <= 1e-3

    def test_convexity(self):
        rng = np.random.default_rng(2)
        for c in polytopes(19, 10):
            k = rotund.klee_map(c, 0.3, geometry.chebyshev_center(c)[0])
            dirs = geometry.unit_directions(rng, 40, 2)
            points = np.array([k.boundary_point(u) for u in dirs])
            for p, q in zip(points[:-1], points[1:]):
                t = rng.uniform()
                assert k.membership(t * p + (1 - t) * q) is not Membership.OUTSIDE

    def test_boundary_is_mapped_to_boundary(self):
        k = rotund.klee_map(square, 0.2, [0.1, -0.2])
        for p in rotund.boundary_mesh(square, 8):
            y = k.forward(p)
            assert rotund.rotund_membership(k, y) is Membership.BOUNDARY
            assert k.membership(k.shift + 1.01 * (y - k.shift)) is Membership.OUTSIDE

    def test_inverse(self):
        k = rotund.klee_map(square, 0.4, [0, 0])
        points = geometry.sample_points(square, 20, np.random.default_rng(3))
        assert np.allclose(k.inverse(k.forward(points)), points, atol=1e-12)

    def test_approximation_is_inside(self):
        k = rotund.klee_map(cube, 0.3, [0.5, 0.5, 0.5])
        assert all(k.membership(v) is not Membership.OUTSIDE for v in k.approx.vertices)
        assert k.approx_tol >= 0.0

    def test_finer_mesh_is_closer(self):
        coarse = rotund.klee_map(square, 0.3, [0, 0], approx_subdiv=4)
        fine = rotund.klee_map(square, 0.3, [0, 0], approx_subdiv=32)
        assert fine.approx_tol < coarse.approx_tol

    @pytest.mark.parametrize("eps", (0.0, 1.0, -0.5))
    def test_eps_out_of_range(self, eps):
        with pytest.raises(ValueError):
            rotund.klee_map(square, eps, [0, 0])

    def test_boundary_center(self):
        with pytest.raises(ValueError):
            rotund.klee_map(square, 0.5, [1, 0])

    def test_lower_dimensional(self):
        with pytest.raises(ValueError):
            rotund.klee_map(ConvexPolytope(2, [[0, 0], [1, 0]]), 0.5, [0.5, 0])


class TestRotundityCheck:
    @pytest.mark.parametrize("subdiv", (16, 32, 64))
    def test_rotund_faces_vanish(self, subdiv):
        for c in polytopes(31, 5):
            k = rotund.rotundify(c, 0.2, approx_subdiv=subdiv)
            worst, ok = rotund.rotundity_probe(k, 200, 0, 100)
            assert worst <= 1e-3
            assert ok

    def test_polytope_has_flat_faces(self):
        worst, ok = rotund.rotundity_probe(square, 20, 0, 1)
        assert worst == pytest.approx(2.0, abs=1e-12)
        assert not ok

    def test_segment_exposed_whole(self):
        worst, _ = rotund.rotundity_probe(ConvexPolytope(2, [[0, 0], [3, 4]]), 5, 0, 1)
        assert worst == pytest.approx(5.0, abs=1e-12)

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            rotund.rotundity_probe(square, 0, 0, 1)
        with pytest.raises(ValueError):
            rotund.rotundity_probe(square, 10, 0, 0)


class TestProjectRotund:
    @pytest.mark.parametrize("norm", (NormSpec.EUCLIDEAN, NormSpec.LINF))
    def test_witness_does_not_depend_on_seed(self, norm):
        k = rotund.rotundify(square, 0.2)
        rng = np.random.default_rng(8)
        for x in rng.uniform(-3.0, 3.0, (50, 2)):
            witnesses = [rotund.project_rotund(k, x, norm, seed=seed).witness for seed in range(5)]
            assert max(np.linalg.norm(w - witnesses[0]) for w in witnesses) <= 1e-6

    def test_raw_square_has_wide_faces(self):
        rng = np.random.default_rng(8)
        widest = max(geometry.project_point(square, x, NormSpec.LINF).face_diameter
                     for x in rng.uniform(-3.0, 3.0, (20, 2)))
        assert widest >= 0.5

    @pytest.mark.parametrize("norm", tuple(NormSpec))
    def test_faces_are_small(self, norm):
        k = rotund.rotundify(square, 0.2)
        face = rotund.project_rotund(k, [2.0, 0.3], norm)
        assert face.face_diameter <= max(2 * k.approx_gap(norm), 1e-9)
        assert k.membership(face.witness, 1e-7) is Membership.BOUNDARY

    def test_euclidean_against_boundary_scan(self):
        k = rotund.rotundify(square, 0.3)
        x = np.array([2.5, 1.0])
        angles = np.linspace(0.0, 2 * np.pi, 20001)
        boundary = np.array([k.boundary_point([np.cos(t), np.sin(t)]) for t in angles])
        brute = np.linalg.norm(boundary - x, axis=1).min()
        face = rotund.project_rotund(k, x, NormSpec.EUCLIDEAN)
        assert face.value <= brute + 1e-9
        assert brute - face.value <= 1e-6

    def test_inside_point(self):
        k = rotund.rotundify(square, 0.3)
        face = rotund.project_rotund(k, [0.1, 0.2], NormSpec.L1)
        assert face.value == 0.0
        assert np.allclose(face.witness, [0.1, 0.2])

    def test_solid(self):
        k = rotund.rotundify(cube, 0.3)
        face = rotund.project_rotund(k, [2.0, 0.5, 0.4], NormSpec.EUCLIDEAN)
        assert k.membership(face.witness, 1e-6) is Membership.BOUNDARY
        assert face.value <= geometry.distance([2.0, 0.5, 0.4], k.approx, NormSpec.EUCLIDEAN) + 1e-9


class TestRotundify:
    @pytest.mark.parametrize("eps", (0.05, 0.2, 0.5))
    def test_gap_below_eps(self, eps):
        for c in polytopes(41, 5):
            k = rotund.rotundify(c, eps)
            assert k.source_gap < eps
            assert k.source_gap + k.approx_tol < eps

    def test_lower_dimensional(self):
        with pytest.raises(ValueError):
            rotund.rotundify(ConvexPolytope(2, [[0, 0], [1, 1]]), 0.1)

    @pytest.mark.parametrize("z", ([0.5, 0.5], [0.2, 0.7], [1.0, 1.0], [0.0, 0.4]))
    def test_anchored(self, z):
        k = rotund.point_anchored_rotundify(unit_square, 0.1, z)
        assert k.membership(z) is not Membership.OUTSIDE
        assert k.source_gap < 0.1

    def test_anchor_outside(self):
        with pytest.raises(ValueError):
            rotund.point_anchored_rotundify(unit_square, 0.1, [2, 2])


class TestStability:
    def test_mesh_independent_projection(self):
        limit = rotund.klee_map(square, 0.3, [0, 0], approx_subdiv=64)
        seq = [rotund.klee_map(square, 0.3, [0, 0], approx_subdiv=s) for s in (4, 8, 16, 32)]
        x = [2.0, 0.7]
        assert rotund.projection_stability(seq, limit, [x] * 4, x, NormSpec.EUCLIDEAN) <= 1e-6

    def test_converging_points(self):
        k = rotund.rotundify(square, 0.3)
        x = np.array([1.5, -2.0])
        u = np.array([0.6, 0.8])
        xs = [x + 2.0 ** -i * u for i in range(8)]
        devs = rotund.projection_deviations([k] * 8, k, xs, x, NormSpec.EUCLIDEAN)
        assert all(d <= 2.0 ** -i + 1e-6 for i, d in enumerate(devs))

    def test_approximations_converge(self):
        limit = rotund.rotundify(square, 0.3, approx_subdiv=64)
        seq = [limit.approx] * 4
        x = [0.2, 0.1]
        assert rotund.projection_stability(seq, limit, [x] * 4, x, NormSpec.EUCLIDEAN) <= 1e-12

    def test_mismatched_sequences(self):
        k = rotund.rotundify(square, 0.3)
        with pytest.raises(ValueError):
            rotund.projection_stability([k, k], k, [[0, 0]], [0, 0], NormSpec.EUCLIDEAN)

    @pytest.mark.parametrize("norm", tuple(NormSpec))
    def test_jitter_budget(self, norm):
        rng = np.random.default_rng(4)
        for _ in range(20):
            moved = rotund.jitter(square, 0.1, norm, rng)
            assert geometry.hausdorff(moved, square, norm) <= 0.09 + 1e-12

    def test_interior_point_accepts_first_radius(self):
        k = rotund.rotundify(square, 0.2)
        assert rotund.stability_delta_search(k, [0, 0], 0.05, 10, NormSpec.EUCLIDEAN) == 0.025

    @pytest.mark.parametrize("norm", tuple(NormSpec))
    def test_far_point(self, norm):
        k = rotund.rotundify(square, 0.2)
        delta = rotund.stability_delta_search(k, [3.0, 0.5], 0.1, 5, norm, samples=12, seed=1)
        assert 0.0 < delta <= 0.05

    @pytest.mark.parametrize("norm", (NormSpec.EUCLIDEAN, NormSpec.LINF))
    @pytest.mark.parametrize("seed", range(5))
    def test_more_samples_cost_one_halving_at_most(self, norm, seed):
        k = rotund.rotundify(square, 0.2)
        few = rotund.stability_delta_search(k, [3.0, 0.5], 0.1, 5, norm, samples=12, seed=seed)
        many = rotund.stability_delta_search(k, [3.0, 0.5], 0.1, 5, norm, samples=24, seed=seed)
        assert many >= few / 2

    def test_bad_arguments(self):
        k = rotund.rotundify(square, 0.2)
        with pytest.raises(ValueError):
            rotund.stability_delta_search(k, [0, 0], 0.0, 1, NormSpec.EUCLIDEAN)
        with pytest.raises(ValueError):
            rotund.stability_delta_search(k, [0, 0], 0.1, 0, NormSpec.EUCLIDEAN)
