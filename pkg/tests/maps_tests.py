#!/usr/bin/env python3.7
# -*- coding: utf-8 -*-
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from setvalued import geometry, maps
from setvalued.errors import DimensionMismatch
from setvalued.maps import AffinePolytopeMap, CompositeMap, ConstantMap, MapKind, ScalarField
from setvalued.models.sets import ConvexPolytope, NormSpec

unit_square = ConvexPolytope(2, [[0, 0], [0, 1], [1, 0], [1, 1]])
offsets = [[0.1, 0.15], [0.35, 0.2], [0.2, 0.4]]
half = [[0.5, 0.0], [0.0, 0.5]]
center = ConvexPolytope(2, [[0.5, 0.5]])
coords = st.floats(-3.0, 3.0, allow_nan=False, allow_infinity=False)


def contraction(norm: NormSpec = NormSpec.EUCLIDEAN) -> AffinePolytopeMap:
    return AffinePolytopeMap(unit_square, half, offsets, norm)


def samples(seed: int, count: int = 40) -> np.ndarray:
    return geometry.sample_points(unit_square, count, np.random.default_rng(seed))


class TestScalarField:
    def test_constant(self):
        w = ScalarField.constant(0.3)
        assert w([0.1, 0.2]) == 0.3
        assert w.lip_bound == 0.0

    @pytest.mark.parametrize("value", (-0.1, 1.1, None))
    def test_constant_out_of_range(self, value):
        with pytest.raises(ValueError):
            ScalarField(value=value)

    def test_tent(self):
        w = ScalarField.tent([0, 0], 0.5, NormSpec.LINF)
        assert w([0, 0]) == 1.0
        assert w([0.25, -0.1]) == pytest.approx(0.5)
        assert w([1, 1]) == 0.0
        assert w.lip_bound == 2.0

    def test_tent_without_radius(self):
        with pytest.raises(ValueError):
            ScalarField("tent", center=[0, 0], radius=0.0)


class TestBump:
    @pytest.mark.parametrize("x,expected", (([0.5, 0.0], [0.0, 0.0]), ([3.0, 0.0], [3.0, 0.0]),
                                            ([1.5, 0.0], [1.0, 0.0])))
    def test_examples(self, x, expected):
        assert np.allclose(maps.bump_phi(x, 1.0, 2.0), expected)

    @given(coords, coords, st.sampled_from(tuple(NormSpec)))
    @settings(max_examples=100, deadline=None)
    def test_clamps_and_displacement(self, a, b, norm):
        r, outer_r = 0.7, 1.9
        x = np.array([a, b])
        y = maps.bump_phi(x, r, outer_r, norm)
        t = norm.norm(x)
        if t <= r:
            assert np.all(y == 0.0)
        elif t >= outer_r:
            assert np.all(y == x)
        assert norm.dist(x, y) <= r + 1e-12

    @given(coords, coords, coords, coords)
    @settings(max_examples=100, deadline=None)
    def test_lipschitz(self, a, b, c, d):
        r, outer_r = 0.5, 1.5
        x, y = np.array([a, b]), np.array([c, d])
        step = np.linalg.norm(x - y)
        moved = np.linalg.norm(maps.bump_phi(x, r, outer_r) - maps.bump_phi(y, r, outer_r))
        assert moved <= (1 + r / (outer_r - r)) * step + 1e-9

    def test_sampled_grid(self):
        rng = np.random.default_rng(10)
        r, outer_r = 1.0, 2.0
        xs = rng.uniform(-3.0, 3.0, (10000, 2))
        ys = xs + rng.uniform(-0.1, 0.1, (10000, 2))
        for x, y in zip(xs, ys):
            px, py = maps.bump_phi(x, r, outer_r), maps.bump_phi(y, r, outer_r)
            t = np.linalg.norm(x)
            if t <= r:
                assert np.all(px == 0.0)
            elif t >= outer_r:
                assert np.all(px == x)
            assert np.linalg.norm(px - x) <= r + 1e-12
            assert np.linalg.norm(px - py) <= (1 + r / (outer_r - r)) * np.linalg.norm(x - y) + 1e-6

    def test_continuity_at_radii(self):
        u = np.array([0.6, 0.8])
        for s in (1.0 - 1e-9, 1.0, 1.0 + 1e-9):
            assert np.linalg.norm(maps.bump_phi(s * u, 1.0, 2.0)) <= 1e-8
        for s in (2.0 - 1e-9, 2.0, 2.0 + 1e-9):
            assert np.linalg.norm(maps.bump_phi(s * u, 1.0, 2.0) - s * u) <= 1e-8

    @pytest.mark.parametrize("r,outer_r", ((0.0, 1.0), (1.0, 1.0), (2.0, 1.0)))
    def test_bad_radii(self, r, outer_r):
        with pytest.raises(ValueError):
            maps.bump_phi([1, 0], r, outer_r)


class TestAffine:
    def test_eval(self):
        value = contraction()([0.2, 0.4])
        assert np.allclose(value.vertices, np.asarray(offsets) + [0.1, 0.2])

    @pytest.mark.parametrize("norm", tuple(NormSpec))
    def test_lip_bound(self, norm):
        assert contraction(norm).lip_bound == pytest.approx(0.5, abs=1e-12)

    def test_check_range(self):
        assert contraction().check_range()
        assert not AffinePolytopeMap(unit_square, np.eye(2), [[0.5, 0.5]]).check_range()

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            contraction()([0.1, 0.2, 0.3])


class TestEstimateLip:
    @pytest.mark.parametrize("norm", tuple(NormSpec))
    def test_half_identity(self, norm):
        estimate = maps.estimate_lip(contraction(norm), pairs=200)
        assert 0.5 - 1e-3 <= estimate <= 0.5 + 1e-6

    def test_constant(self):
        assert maps.estimate_lip(ConstantMap(unit_square, center), pairs=50) == 0.0

    def test_rotation(self):
        theta = 0.7
        m = 0.8 * np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
        f = AffinePolytopeMap(unit_square, m, [[0.5, 0.5]])
        assert maps.estimate_lip(f, pairs=100) == pytest.approx(0.8, abs=1e-3)

    def test_below_declared_bound(self):
        weight = ScalarField.tent([0.5, 0.5], 0.3, NormSpec.EUCLIDEAN)
        f = maps.convex_blend(contraction(), center, weight)
        assert maps.estimate_lip(f, pairs=200) <= f.lip_bound + 1e-9

    def test_no_pairs(self):
        with pytest.raises(ValueError):
            maps.estimate_lip(contraction(), pairs=0)


class TestBlend:
    def test_densify_metadata(self):
        g = maps.densify_contraction(contraction(), 0.25, center)
        assert g.kind is MapKind.BLEND
        assert g.lip_bound == pytest.approx(0.75 * 0.5, abs=1e-12)

    def test_densify_distance(self):
        f = contraction()
        gamma = 0.25
        g = maps.densify_contraction(f, gamma, center)
        gap = maps.d_infinity(f, g, samples(1))
        assert gap <= gamma * geometry.diameter(unit_square, NormSpec.EUCLIDEAN) + 1e-9

    @pytest.mark.parametrize("gamma", (0.0, 1.0))
    def test_densify_gamma_range(self, gamma):
        with pytest.raises(ValueError):
            maps.densify_contraction(contraction(), gamma, center)

    def test_densify_anchor_outside(self):
        with pytest.raises(ValueError):
            maps.densify_contraction(contraction(), 0.5, ConvexPolytope(2, [[2, 2]]))

    def test_weight_extremes(self):
        f = contraction()
        zero = maps.convex_blend(f, center, ScalarField.constant(0.0))
        one = maps.convex_blend(f, center, ScalarField.constant(1.0))
        for x in samples(2, 10):
            assert geometry.hull_equal(zero(x), f(x))
            assert geometry.hull_equal(one(x), center)
        assert zero.lip_bound == pytest.approx(f.lip_bound)
        assert one.lip_bound == 0.0

    def test_tent_spread(self):
        weight = ScalarField.tent([0.5, 0.5], 0.3, NormSpec.EUCLIDEAN)
        f = maps.convex_blend(contraction(), center, weight)
        assert f.spread > 0.0
        assert f.lip_bound == pytest.approx(0.5 + f.spread / 0.3)


class TestPerturb:
    xi = np.array([0.5, 0.5])
    rho, r, outer_r = 0.02, 0.05, 0.1

    def setup_class(self):
        self.f = contraction()
        self.value = self.f(self.xi).translate([0.01, 0.0])
        self.g = maps.perturb_at_point(self.f, self.xi, self.value, self.rho, self.r, self.outer_r)

    def test_value_at_point(self):
        assert geometry.hull_equal(self.g(self.xi), self.value)

    def test_unchanged_outside(self):
        rng = np.random.default_rng(5)
        for x in geometry.sample_points(unit_square, 100, rng):
            if np.linalg.norm(x - self.xi) >= self.outer_r:
                assert geometry.hull_equal(self.g(x), self.f(x))

    def test_distance(self):
        near = self.xi + np.random.default_rng(6).uniform(-self.outer_r, self.outer_r, (500, 2))
        assert maps.d_infinity(self.f, self.g, near) <= 2 * self.r

    def test_lip_bound(self):
        assert self.g.lip_bound == pytest.approx(max(2 * 0.5, 0.5 + self.rho / self.r))
        assert maps.estimate_lip(self.g, pairs=300) <= self.g.lip_bound + 1e-9

    def test_point_outside(self):
        with pytest.raises(ValueError, match="outside the domain"):
            maps.perturb_at_point(self.f, [2, 2], self.value, self.rho, self.r, self.outer_r)

    @pytest.mark.parametrize("rho,r,outer_r", ((0.06, 0.05, 0.1), (0.02, 0.1, 0.1), (0.0, 0.05, 0.1)))
    def test_radii_order(self, rho, r, outer_r):
        with pytest.raises(ValueError, match="Radii"):
            maps.perturb_at_point(self.f, self.xi, self.value, rho, r, outer_r)

    def test_value_outside_domain(self):
        with pytest.raises(ValueError, match="not contained"):
            maps.perturb_at_point(self.f, self.xi, ConvexPolytope(2, [[1.5, 0.5]]), 0.5, 0.6, 0.7)

    def test_value_over_budget(self):
        far = self.f(self.xi).translate([0.05, 0.0])
        with pytest.raises(ValueError, match="budget"):
            maps.perturb_at_point(self.f, self.xi, far, self.rho, self.r, self.outer_r)


class TestComposite:
    def test_regions(self):
        left = ConvexPolytope(2, [[0, 0], [0, 1], [0.5, 0], [0.5, 1]])
        f = CompositeMap(unit_square, [(left, ConstantMap(unit_square, center))], contraction())
        assert geometry.hull_equal(f([0.2, 0.3]), center)
        assert geometry.hull_equal(f([0.8, 0.3]), contraction()([0.8, 0.3]))
        assert f.lip_bound == pytest.approx(0.5)


class TestSerialization:
    def all_maps(self):
        f = contraction(NormSpec.LINF)
        blend = maps.convex_blend(f, center, ScalarField.tent([0.5, 0.5], 0.3, NormSpec.LINF))
        perturbed = maps.perturb_at_point(f, [0.5, 0.5], f([0.5, 0.5]), 0.01, 0.05, 0.1)
        left = ConvexPolytope(2, [[0, 0], [0, 1], [0.5, 0], [0.5, 1]])
        composite = CompositeMap(unit_square, [(left, perturbed)], blend, NormSpec.LINF)
        return [f, ConstantMap(unit_square, center), blend, perturbed, composite]

    def test_round_trip(self):
        points = samples(3, 10)
        for f in self.all_maps():
            restored = maps.resolve_map(f.to_json())
            assert restored.kind is f.kind
            assert restored.lip_bound == pytest.approx(f.lip_bound, abs=1e-12)
            assert all(geometry.hull_equal(restored(x), f(x)) for x in points)

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="Unknown map kind"):
            maps.resolve_map({"kind": "spiral"})

    def test_missing_kind(self):
        with pytest.raises(ValueError):
            maps.resolve_map({"matrix": half})


class TestDistance:
    def test_self_distance(self):
        f = contraction()
        assert maps.d_infinity(f, f, samples(4, 10)) == 0.0

    def test_constant_shift(self):
        a = ConstantMap(unit_square, ConvexPolytope(2, [[0.2, 0.2]]))
        b = ConstantMap(unit_square, ConvexPolytope(2, [[0.5, 0.6]]))
        assert maps.d_infinity(a, b, samples(4, 5)) == pytest.approx(0.5)

    def test_empty_samples(self):
        with pytest.raises(ValueError):
            maps.d_infinity(contraction(), contraction(), [])

    def test_different_domains(self):
        other = ConstantMap(ConvexPolytope(2, [[0, 0], [0, 2], [2, 0], [2, 2]]), center)
        with pytest.raises(ValueError):
            maps.d_infinity(contraction(), other, [[0.5, 0.5]])
