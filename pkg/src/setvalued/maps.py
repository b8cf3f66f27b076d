#!/usr/bin/env python3.7
# -*- coding: utf-8 -*-
import logging
from enum import Enum
from typing import Any, Dict, Iterable, Optional, Sequence, Type, Union

import numpy as np

from setvalued import geometry
from setvalued.models.jto import Serializable
from setvalued.models.sets import ConvexPolytope, NormSpec, as_point, resolve_set

logger = logging.getLogger("maps")


class MapKind(Enum):
    AFFINE = "affine"
    CONSTANT = "constant"
    BLEND = "blend"
    PERTURBED = "perturbed"
    COMPOSITE = "composite"


class FieldKind(Enum):
    CONSTANT = "constant"
    TENT = "tent"


class ScalarField(Serializable):
    """
    Weight x -> [0, 1]: a constant, or the tent max(1 - |x - center| / radius, 0)
    """

    def __init__(self, kind: Union[str, FieldKind] = FieldKind.CONSTANT, value: Optional[float] = None,
                 center: Optional[Sequence[float]] = None, radius: Optional[float] = None,
                 norm: Union[str, NormSpec] = NormSpec.EUCLIDEAN) -> None:
        self.kind = self.to_enum(kind, FieldKind)
        self.norm = NormSpec.parse(norm)
        if self.kind is FieldKind.CONSTANT:
            if value is None or not 0.0 <= float(value) <= 1.0:
                raise ValueError(f"Constant weight should be in [0, 1], got {value}")
            self.value = float(value)
            self.center = None
            self.radius = None
        else:
            if center is None or radius is None or float(radius) <= 0:
                raise ValueError("Tent weight needs a center and a positive radius")
            self.value = None
            self.center = as_point(center)
            self.radius = float(radius)

    @classmethod
    def constant(cls, value: float) -> 'ScalarField':
        return cls(FieldKind.CONSTANT, value)

    @classmethod
    def tent(cls, center: Any, radius: float, norm: NormSpec) -> 'ScalarField':
        return cls(FieldKind.TENT, None, center, radius, norm)

    @property
    def lip_bound(self) -> float:
        return 0.0 if self.kind is FieldKind.CONSTANT else 1.0 / self.radius

    def __call__(self, x: Any) -> float:
        if self.kind is FieldKind.CONSTANT:
            return self.value
        return max(1.0 - self.norm.dist(x, self.center) / self.radius, 0.0)


class SetValuedMap(Serializable):
    """
    Map from a polytope domain to its convex compact subsets with a declared Lipschitz bound
    """
    kind = None  # type: MapKind

    def __init__(self, domain: Union[Dict, ConvexPolytope], norm: Union[str, NormSpec]) -> None:
        self.kind = type(self).kind
        self.domain = resolve_set(domain)
        self.norm = NormSpec.parse(norm)

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def lip_bound(self) -> float:
        raise NotImplementedError()

    def eval(self, x: Any) -> ConvexPolytope:
        raise NotImplementedError()

    def __call__(self, x: Any) -> ConvexPolytope:
        return self.eval(as_point(x, self.dim))


class AffinePolytopeMap(SetValuedMap):
    kind = MapKind.AFFINE

    def __init__(self, domain: Union[Dict, ConvexPolytope], matrix: Sequence[Sequence[float]],
                 offsets: Union[Dict, ConvexPolytope, Sequence[Sequence[float]]],
                 norm: Union[str, NormSpec] = NormSpec.EUCLIDEAN, kind: Any = None) -> None:
        """
        x -> M x + conv(offsets)
        """
        super().__init__(domain, norm)
        self.matrix = np.asarray(matrix, dtype=float).reshape(self.dim, self.dim)
        if isinstance(offsets, (dict, ConvexPolytope)):
            self.offsets = resolve_set(offsets)
        else:
            self.offsets = geometry.hull_reduce(np.asarray(offsets, dtype=float).reshape(-1, self.dim))

    @property
    def lip_bound(self) -> float:
        return self.norm.operator_norm(self.matrix)

    def eval(self, x: np.ndarray) -> ConvexPolytope:
        return ConvexPolytope(self.dim, self.offsets.vertices + self.matrix @ x)

    def check_range(self, tol: float = 1e-9) -> bool:
        """
        Exact range containment: F(x) lies in the domain for every x iff all M v + w do
        """
        images = (self.domain.vertices @ self.matrix.T)[:, None, :] + self.offsets.vertices[None, :, :]
        return all(geometry.contains(self.domain, p, tol) for p in images.reshape(-1, self.dim))


class ConstantMap(SetValuedMap):
    kind = MapKind.CONSTANT

    def __init__(self, domain: Union[Dict, ConvexPolytope], value: Union[Dict, ConvexPolytope],
                 norm: Union[str, NormSpec] = NormSpec.EUCLIDEAN, kind: Any = None) -> None:
        super().__init__(domain, norm)
        self.value = resolve_set(value)

    @property
    def lip_bound(self) -> float:
        return 0.0

    def eval(self, x: np.ndarray) -> ConvexPolytope:
        return self.value


class ConvexBlendMap(SetValuedMap):
    kind = MapKind.BLEND

    def __init__(self, inner: Union[Dict, SetValuedMap], anchor: Union[Dict, ConvexPolytope],
                 weight: Union[Dict, ScalarField], spread: float = 0.0, kind: Any = None,
                 domain: Any = None, norm: Any = None) -> None:
        """
        x -> weight(x) * anchor + (1 - weight(x)) * inner(x)
        :param spread: sampled sup of h(anchor, inner(y)), enters the bound when the weight varies
        """
        inner = resolve_map(inner)
        super().__init__(inner.domain, inner.norm)
        self.inner = inner
        self.anchor = resolve_set(anchor)
        self.weight = weight if isinstance(weight, ScalarField) else ScalarField.from_json(weight)
        if isinstance(self.weight, Exception):
            raise ValueError(f"Invalid blend weight {weight}")
        self.spread = float(spread)

    @property
    def lip_bound(self) -> float:
        if self.weight.kind is FieldKind.CONSTANT:
            return (1.0 - self.weight.value) * self.inner.lip_bound
        return self.inner.lip_bound + self.weight.lip_bound * self.spread

    def eval(self, x: np.ndarray) -> ConvexPolytope:
        return geometry.minkowski_interp(self.anchor, self.inner.eval(x), self.weight(x))


def bump_phi(x: Any, r: float, outer_r: float, norm: NormSpec = NormSpec.EUCLIDEAN) -> np.ndarray:
    """
    Radial bump: 0 on the ball of radius r, identity outside radius R, linear in the radius between
    :param x: point
    :param r: inner radius
    :param outer_r: outer radius R > r
    :param norm: norm measuring the radii
    :return: Phi(x)
    """
    if not 0.0 < r < outer_r:
        raise ValueError(f"Radii should satisfy 0 < r < R, got r={r}, R={outer_r}")
    x = as_point(x)
    t = norm.norm(x)
    if t <= r:
        return np.zeros_like(x)
    if t >= outer_r:
        return x.copy()
    return ((t - r) * outer_r / ((outer_r - r) * t)) * x


class PointPerturbedMap(SetValuedMap):
    kind = MapKind.PERTURBED

    def __init__(self, inner: Union[Dict, SetValuedMap], xi: Sequence[float], value: Union[Dict, ConvexPolytope],
                 rho: float, r: float, outer_r: float, kind: Any = None, domain: Any = None,
                 norm: Any = None) -> None:
        """
        G(x) = l(x) K + (1 - l(x)) F(xi + Phi(x - xi)) with the tent weight l of radius r around xi
        """
        inner = resolve_map(inner)
        super().__init__(inner.domain, inner.norm)
        self.inner = inner
        self.xi = as_point(xi, self.dim)
        self.value = resolve_set(value)
        self.rho = float(rho)
        self.r = float(r)
        self.outer_r = float(outer_r)

    @property
    def lip_bound(self) -> float:
        lip = self.inner.lip_bound
        return max(self.outer_r / (self.outer_r - self.r) * lip, lip + self.rho / self.r)

    def eval(self, x: np.ndarray) -> ConvexPolytope:
        dx = x - self.xi
        t = self.norm.norm(dx)
        if t >= self.outer_r:
            return self.inner.eval(x)
        lam = max(1.0 - t / self.r, 0.0)
        if lam == 1.0:
            return self.value
        pulled = self.xi + bump_phi(dx, self.r, self.outer_r, self.norm)
        return geometry.minkowski_interp(self.value, self.inner.eval(pulled), lam)


class CompositeMap(SetValuedMap):
    kind = MapKind.COMPOSITE

    def __init__(self, domain: Union[Dict, ConvexPolytope], pieces: Iterable[Sequence[Any]],
                 fallback: Union[Dict, SetValuedMap], norm: Union[str, NormSpec] = NormSpec.EUCLIDEAN,
                 kind: Any = None) -> None:
        """
        Maps glued over convex regions: the first region containing x decides, fallback elsewhere.
        The glued map has to be continuous for lip_bound to hold.
        """
        super().__init__(domain, norm)
        self.pieces = [(resolve_set(region), resolve_map(m)) for region, m in pieces]
        self.fallback = resolve_map(fallback)

    @property
    def lip_bound(self) -> float:
        return max([self.fallback.lip_bound] + [m.lip_bound for _, m in self.pieces])

    def eval(self, x: np.ndarray) -> ConvexPolytope:
        for region, m in self.pieces:
            if geometry.contains(region, x):
                return m.eval(x)
        return self.fallback.eval(x)


registry = {
    MapKind.AFFINE: AffinePolytopeMap,
    MapKind.CONSTANT: ConstantMap,
    MapKind.BLEND: ConvexBlendMap,
    MapKind.PERTURBED: PointPerturbedMap,
    MapKind.COMPOSITE: CompositeMap,
}  # type: Dict[MapKind, Type[SetValuedMap]]


def resolve_map(data: Union[Dict, SetValuedMap]) -> SetValuedMap:
    if isinstance(data, SetValuedMap):
        return data
    if not isinstance(data, dict) or "kind" not in data:
        raise ValueError("Map description should be an object with a 'kind' key")
    try:
        cls = registry[MapKind(data["kind"])]
    except ValueError:
        raise ValueError(f"Unknown map kind {data['kind']}, expected one of {[x.value for x in MapKind]}")
    r = cls.from_json(data)
    if isinstance(r, Exception):
        raise ValueError(str(r))
    return r


def _coordinate_search(f, start: np.ndarray, domain: ConvexPolytope, step: float, floor: float) -> float:
    best = f(start)
    x = start
    while step >= floor:
        moved = False
        for j in range(x.shape[0]):
            for sign in (1.0, -1.0):
                y = x.copy()
                y[j] += sign * step
                if geometry.contains(domain, y):
                    v = f(y)
                    if v > best:
                        best, x, moved = v, y, True
        if not moved:
            step /= 2.0
    return best


def d_infinity(f: SetValuedMap, g: SetValuedMap, sample_points: Iterable[Any], norm: Optional[NormSpec] = None,
               refine: bool = True) -> float:
    """
    Estimate of sup_x h(F(x), G(x)): maximum over the samples, raised by a coordinate search from the best one.
    Every evaluated point lies in the domain, so the result is a lower bound of the supremum.
    """
    points = [as_point(x, f.dim) for x in sample_points]
    if not points:
        raise ValueError("d_infinity needs at least one sample point")
    if not geometry.hull_equal(f.domain, g.domain):
        raise ValueError("Maps should share their domain")
    norm = norm or f.norm

    def gap(x: np.ndarray) -> float:
        return geometry.hausdorff(f.eval(x), g.eval(x), norm)

    values = [gap(x) for x in points]
    best = int(np.argmax(values))
    if not refine:
        return float(values[best])
    scale = geometry.diameter(f.domain, norm)
    return max(float(values[best]), _coordinate_search(gap, points[best], f.domain, 0.05 * scale, 1e-3 * scale))


def densify_contraction(g: SetValuedMap, gamma: float, anchor: ConvexPolytope) -> ConvexBlendMap:
    """
    (1 - gamma) G + gamma A, a strict contraction when G is nonexpansive
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma should be in (0, 1), got {gamma}")
    if not geometry.hull_contains(g.domain, anchor):
        raise ValueError("Anchor set is not contained in the domain")
    return ConvexBlendMap(g, anchor, ScalarField.constant(gamma))


def convex_blend(f: SetValuedMap, anchor: ConvexPolytope, weight: ScalarField, seed: int = 0,
                 samples: int = 64) -> ConvexBlendMap:
    if not geometry.hull_contains(f.domain, anchor):
        raise ValueError("Anchor set is not contained in the domain")
    spread = 0.0
    if weight.kind is not FieldKind.CONSTANT:
        rng = np.random.default_rng(seed)
        points = np.vstack([f.domain.vertices, geometry.sample_points(f.domain, samples, rng)])
        spread = max(geometry.hausdorff(anchor, f.eval(y), f.norm) for y in points)
    return ConvexBlendMap(f, anchor, weight, spread)


def perturb_at_point(f: SetValuedMap, xi: Any, value: ConvexPolytope, rho: float, r: float, outer_r: float,
                     tol: float = 1e-9) -> PointPerturbedMap:
    """
    Map G with G(xi) = K, G = F outside B(xi, R) and d_inf(F, G) <= 2 r
    :param f: map to perturb
    :param xi: domain point
    :param value: target value K, inside the domain and rho-close to F(xi)
    :param rho: Hausdorff budget for K
    :param r: inner radius
    :param outer_r: outer radius
    :param tol: containment tolerance
    :return: PointPerturbedMap
    """
    xi = as_point(xi, f.dim)
    if not geometry.contains(f.domain, xi, tol):
        raise ValueError("Perturbation point is outside the domain")
    if not 0.0 < rho < r < outer_r:
        raise ValueError(f"Radii should satisfy 0 < rho < r < R, got rho={rho}, r={r}, R={outer_r}")
    if not geometry.hull_contains(f.domain, value, tol):
        raise ValueError("Perturbation value is not contained in the domain")
    gap = geometry.hausdorff(value, f.eval(xi), f.norm)
    if gap >= rho:
        raise ValueError(f"Perturbation value is {gap:.6g} away from F(xi), budget rho={rho:.6g}")
    return PointPerturbedMap(f, xi, value, rho, r, outer_r)


def _near_partner(rng: np.random.Generator, x: np.ndarray, domain: ConvexPolytope, radius: float,
                  norm: NormSpec) -> Optional[np.ndarray]:
    for _ in range(16):
        y = norm.sample_ball(rng, x, radius)
        if geometry.contains(domain, y):
            return y
    return None


def estimate_lip(f: SetValuedMap, pairs: int = 500, seed: int = 0, refine: bool = True,
                 norm: Optional[NormSpec] = None) -> float:
    """
    Largest sampled ratio h(F(x), F(y)) / |x - y|, a lower bound on lip F
    :param f: map
    :param pairs: number of sampled pairs, half of them at short range
    :param seed: sampling seed
    :param refine: coordinate ascent on the partner of the best pair
    :param norm: norm of the ratio, the map norm by default
    :return: estimate
    """
    if pairs < 1:
        raise ValueError("At least one pair is required")
    norm = norm or f.norm
    rng = np.random.default_rng(seed)
    scale = geometry.diameter(f.domain, norm)
    if scale == 0.0:
        return 0.0
    xs = geometry.sample_points(f.domain, pairs, rng)
    ys = geometry.sample_points(f.domain, pairs, rng)
    for i in range(pairs // 2):
        near = _near_partner(rng, xs[i], f.domain, 0.02 * scale, norm)
        if near is not None:
            ys[i] = near

    def ratio(x: np.ndarray, y: np.ndarray) -> float:
        step = norm.dist(x, y)
        if step < 1e-12 * scale:
            return 0.0
        return geometry.hausdorff(f.eval(x), f.eval(y), norm) / step

    values = [ratio(x, y) for x, y in zip(xs, ys)]
    best = int(np.argmax(values))
    result = float(values[best])
    if refine and result > 0.0:
        x = xs[best]
        result = max(result, _coordinate_search(lambda y: ratio(x, y), ys[best], f.domain,
                                                0.25 * norm.dist(x, ys[best]), 1e-4 * scale))
    logger.debug("estimate_lip kind=%s pairs=%d estimate=%.6g declared=%.6g",
                 f.kind.value, pairs, result, f.lip_bound)
    return result

