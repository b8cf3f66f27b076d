#!/usr/bin/env python3.7
# -*- coding: utf-8 -*-
"""
Klee rotundification of full-dimensional polytopes.

A RotundSet K is the image of base under T(x) = x / (1 + a|x|_2) shifted by `shift`. Its gauge is
g_K(y) = g_base(y) + a|y|_2, which gives exact membership and exact boundary points; `approx` is the
hull of T applied to a boundary mesh of base, an inner polytope with h(approx, K) <= approx_tol.
"""
import logging
from enum import Enum
from functools import lru_cache
from math import atan2, cos, pi, sin, sqrt
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize

from setvalued import geometry
from setvalued.errors import CertificateError
from setvalued.models.jto import Serializable
from setvalued.models.sets import ConvexPolytope, NormSpec, ProjectionFace, as_point, lex_sorted, resolve_set

logger = logging.getLogger("rotund")

boundary_tol = 1e-9
delta_floor = 1e-12
mesh_refine = 4


class Membership(Enum):
    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


def default_subdiv(dim: int) -> int:
    return 32 if dim <= 2 else 8


@lru_cache(maxsize=64)
def _compositions(parts: int, total: int) -> Tuple[Tuple[int, ...], ...]:
    if parts == 1:
        return ((total,),)
    return tuple((i,) + rest for i in range(total + 1) for rest in _compositions(parts - 1, total - i))


def boundary_mesh(polytope: ConvexPolytope, subdiv: int) -> np.ndarray:
    """
    Barycentric grid of step 1/subdiv on every simplex of a boundary triangulation
    """
    if subdiv < 1:
        raise ValueError("Subdivision should be positive")
    simplices = geometry.boundary_simplices(polytope)
    weights = np.asarray(_compositions(simplices.shape[1], subdiv), dtype=float) / subdiv
    mesh = np.vstack([weights @ polytope.vertices[s] for s in simplices])
    return np.unique(mesh, axis=0)


class RotundSet(Serializable):
    def __init__(self, base: Union[Dict, ConvexPolytope], shift: Sequence[float], a: float, eps: float,
                 approx: Union[Dict, ConvexPolytope], approx_tol: float, source_gap: Optional[float] = None) -> None:
        """
        :param base: polytope translated so that the origin is interior
        :param shift: translation applied to base
        :param a: Klee parameter
        :param eps: shrink factor, (1 - eps) base lies inside the set
        :param approx: inner polytope approximation in ambient coordinates
        :param approx_tol: Euclidean estimate of h(approx, K)
        :param source_gap: h(approx, C) against the polytope that was rotundified, when known
        """
        self.base = resolve_set(base)
        self.shift = as_point(shift, self.base.dim)
        self.a = float(a)
        self.eps = float(eps)
        self.approx = resolve_set(approx)
        self.approx_tol = float(approx_tol)
        self.source_gap = None if source_gap is None else float(source_gap)
        if self.a <= 0:
            raise ValueError("Klee parameter should be positive")
        self._rows = None  # type: Optional[Tuple[np.ndarray, np.ndarray]]

    @property
    def dim(self) -> int:
        return self.base.dim

    def _facet_gauge(self) -> Tuple[np.ndarray, np.ndarray]:
        if self._rows is None:
            eq = geometry.facets(self.base)
            self._rows = (eq[:, :-1], -eq[:, -1])
        return self._rows

    def base_gauge(self, z: Any) -> Union[float, np.ndarray]:
        normals, beta = self._facet_gauge()
        values = (np.asarray(z, dtype=float) @ normals.T) / beta
        g = np.maximum(values.max(axis=-1), 0.0)
        return float(g) if np.ndim(g) == 0 else g

    def gauge(self, z: Any) -> Union[float, np.ndarray]:
        """
        Minkowski gauge of K - shift
        """
        z = np.asarray(z, dtype=float)
        return self.base_gauge(z) + self.a * np.linalg.norm(z, axis=-1)

    def forward(self, c: Any) -> np.ndarray:
        """
        T applied to a point of the translated base, returned in ambient coordinates
        """
        c = np.asarray(c, dtype=float) - self.shift
        scale = 1.0 + self.a * np.linalg.norm(c, axis=-1, keepdims=True)
        return self.shift + c / scale

    def inverse(self, y: Any) -> np.ndarray:
        z = np.asarray(y, dtype=float) - self.shift
        r = self.a * np.linalg.norm(z, axis=-1, keepdims=True)
        if np.any(r >= 1.0):
            raise ValueError("Point lies outside the range of the radial map")
        return self.shift + z / (1.0 - r)

    def boundary_point(self, u: Any) -> np.ndarray:
        """
        Boundary point of K in direction u seen from the shift
        """
        u = np.asarray(u, dtype=float)
        return self.shift + u / self.gauge(u)

    def membership(self, x: Any, tol: float = boundary_tol) -> Membership:
        g = self.gauge(as_point(x, self.dim) - self.shift)
        if g < 1.0 - tol:
            return Membership.INSIDE
        elif g <= 1.0 + tol:
            return Membership.BOUNDARY
        return Membership.OUTSIDE

    def approx_gap(self, norm: NormSpec) -> float:
        """
        approx_tol converted to the ambient norm
        """
        return self.approx_tol * (sqrt(self.dim) if norm is NormSpec.L1 else 1.0)


def rotund_membership(k: RotundSet, x: Any, tol: float = boundary_tol) -> Membership:
    return k.membership(x, tol)


def _margin(polytope: ConvexPolytope, x: np.ndarray) -> float:
    eq = geometry.facets(polytope)
    return float(-(eq[:, :-1] @ x + eq[:, -1]).max())


def klee_map(c: ConvexPolytope, eps: float, interior_point: Any, approx_subdiv: Optional[int] = None) -> RotundSet:
    """
    Rotund body (1 - eps) C' <= K <= C' with C' = C - interior_point
    :param c: full-dimensional polytope
    :param eps: shrink factor in (0, 1)
    :param interior_point: strictly interior point used as the radial center
    :param approx_subdiv: boundary mesh subdivision of the inner approximation
    :return: RotundSet
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps should be in (0, 1), got {eps}")
    if not geometry.full_dimensional(c):
        raise ValueError("Polytope is lower-dimensional, every point is a support point")
    center = as_point(interior_point, c.dim)
    if _margin(c, center) <= 1e-12:
        raise ValueError(f"Point {center.tolist()} is not interior")
    subdiv = approx_subdiv or default_subdiv(c.dim)
    base = c.translate(-center)
    a = eps / (2.0 * (1.0 - eps) * float(np.linalg.norm(base.vertices, axis=1).max()))
    k = RotundSet(base, center, a, eps, ConvexPolytope(c.dim, center), 0.0)

    mesh = boundary_mesh(base, subdiv) + center
    approx = geometry.hull_reduce(k.forward(mesh))
    fine = boundary_mesh(base, mesh_refine * subdiv) + center
    eq = geometry.facets(approx)
    approx_tol = max(0.0, float((k.forward(fine) @ eq[:, :-1].T + eq[:, -1]).max()))
    k.approx = approx
    k.approx_tol = approx_tol

    shrunk = k.gauge((1.0 - eps) * base.vertices)
    images = k.base_gauge(k.forward(base.vertices + center) - center)
    if shrunk.max() > 1.0 + boundary_tol or images.max() > 1.0 + boundary_tol:
        raise CertificateError("Klee sandwich failed on the base vertices")
    logger.debug("klee map a=%.6g eps=%g subdiv=%d approx vertices=%d approx_tol=%.3e",
                 a, eps, subdiv, approx.size, approx_tol)
    return k


def _planar_refine(k: RotundSet, objective, start: np.ndarray, tol: float) -> np.ndarray:
    rel = start - k.shift
    theta = atan2(rel[1], rel[0])
    width = max(8.0 * pi / max(k.approx.size, 8), 1e-3)

    def f(t: float) -> float:
        return objective(k.boundary_point(np.array([cos(t), sin(t)])))

    xatol = max(tol, 1e-12)
    best = theta
    for _ in range(8):
        res = optimize.minimize_scalar(f, bounds=(theta - width, theta + width), method="bounded",
                                       options={"xatol": xatol})
        best = float(res.x)
        if min(best - theta + width, theta + width - best) > 10 * xatol or width >= pi:
            break
        theta, width = best, min(2.0 * width, pi)
    return k.boundary_point(np.array([cos(best), sin(best)]))


def _gauge_constraint(k: RotundSet, size: int) -> Dict[str, Any]:
    normals, beta = k._facet_gauge()
    d = k.dim

    def fun(v: np.ndarray) -> np.ndarray:
        z = v[:d]
        return 1.0 - normals @ z / beta - k.a * np.linalg.norm(z)

    def jac(v: np.ndarray) -> np.ndarray:
        z = v[:d]
        g = np.zeros((normals.shape[0], size))
        g[:, :d] = -normals / beta[:, None]
        nz = np.linalg.norm(z)
        if nz > 0:
            g[:, :d] -= k.a * z / nz
        return g

    return {"type": "ineq", "fun": fun, "jac": jac}


def _solid_refine_projection(k: RotundSet, x: np.ndarray, norm: NormSpec, start: np.ndarray,
                             tol: float) -> np.ndarray:
    d = k.dim
    xr = x - k.shift
    z0 = start - k.shift
    constraints = []
    if norm is NormSpec.EUCLIDEAN:
        v0 = z0

        def fun(v):
            return 0.5 * float((v - xr) @ (v - xr))

        def jac(v):
            return v - xr
    else:
        extra = 1 if norm is NormSpec.LINF else d
        v0 = np.concatenate([z0, np.full(extra, norm.dist(xr, z0) if extra == 1 else 0.0)])
        if extra == d:
            v0[d:] = np.abs(xr - z0)
        lift = np.ones((d, 1)) if extra == 1 else np.eye(d)
        plus = np.hstack([np.eye(d), lift])
        minus = np.hstack([-np.eye(d), lift])
        constraints.append({"type": "ineq", "fun": lambda v: plus @ v - xr, "jac": lambda v: plus})
        constraints.append({"type": "ineq", "fun": lambda v: minus @ v + xr, "jac": lambda v: minus})
        cost = np.concatenate([np.zeros(d), np.ones(extra)])

        def fun(v):
            return float(cost @ v)

        def jac(v):
            return cost
    constraints.append(_gauge_constraint(k, v0.shape[0]))
    res = optimize.minimize(fun, v0, jac=jac, constraints=constraints, method="SLSQP",
                            options={"ftol": 1e-15, "maxiter": 500})
    z = res.x[:d]
    g = k.gauge(z)
    return k.shift + (z / g if g > 0 else z)


def _refine_projection(k: RotundSet, x: np.ndarray, norm: NormSpec, start: np.ndarray, tol: float) -> np.ndarray:
    if k.dim == 1:
        ends = [k.boundary_point(np.array([1.0])), k.boundary_point(np.array([-1.0]))]
        return min(ends, key=lambda p: norm.dist(x, p))
    if k.dim == 2:
        return _planar_refine(k, lambda p: norm.dist(x, p), start, tol)
    return _solid_refine_projection(k, x, norm, start, tol)


def project_rotund(k: RotundSet, x: Any, norm: NormSpec, tol: float = 1e-10, seed: int = 0,
                   max_iter: int = 100000) -> ProjectionFace:
    """
    Metric projection onto a rotund set: project onto the inner approximation, then refine along the exact
    boundary from the extreme points of the approximate face. The reported face is the set of refined points.
    :param k: RotundSet
    :param x: point
    :param norm: ambient norm
    :param tol: tolerance of the approximate projection and of the boundary search
    :param seed: seed of the approximate face probing
    :param max_iter: iteration cap of the approximate projection
    :return: ProjectionFace
    """
    x = as_point(x, k.dim)
    if k.gauge(x - k.shift) <= 1.0:
        return ProjectionFace(x, 0.0, 0.0, [x])
    face = geometry.project_point(k.approx, x, norm, tol, seed, max_iter)
    samples = face.face_samples
    starts = [face.witness] + ([samples[0], samples[-1]] if samples.shape[0] > 1 else [])
    refined = []
    for start in starts:
        p = _refine_projection(k, x, norm, start, tol)
        refined.append(p if norm.dist(x, p) <= norm.dist(x, start) else start)
    points = lex_sorted(np.unique(np.asarray(refined), axis=0))
    values = np.atleast_1d(norm.norm(points - x))
    witness = points[int(np.argmin(values))]
    diam = geometry.diameter(ConvexPolytope(k.dim, points), norm)
    if diam > 2.0 * k.approx_gap(norm) and diam > boundary_tol:
        logger.warning("projection face on a rotund set has diameter %.3e above 2*approx_tol %.3e",
                       diam, 2.0 * k.approx_gap(norm))
    return ProjectionFace(witness, float(values.min()), diam, points)


def _refine_support(k: RotundSet, u: np.ndarray, start: np.ndarray, tol: float) -> np.ndarray:
    if k.dim == 1:
        return k.boundary_point(np.sign(u))
    if k.dim == 2:
        return _planar_refine(k, lambda p: -float(u @ p), start, tol)
    res = optimize.minimize(lambda z: -float(u @ z), start - k.shift, jac=lambda z: -u,
                            constraints=[_gauge_constraint(k, k.dim)], method="SLSQP",
                            options={"ftol": 1e-15, "maxiter": 500})
    z = res.x
    g = k.gauge(z)
    return k.shift + (z / g if g > 0 else z)


def _support_directions(target: Union[RotundSet, ConvexPolytope], directions: int,
                      rng: np.random.Generator) -> np.ndarray:
    dirs = geometry.unit_directions(rng, directions, target.dim)
    if isinstance(target, RotundSet):
        return dirs
    rank, _, basis = geometry.affine_rank(target.vertices)
    if rank == target.dim:
        normals = geometry.facets(target)[:, :-1]
    else:
        # directions orthogonal to the affine hull expose the whole polytope
        _, _, vt = np.linalg.svd(np.vstack([basis, np.zeros((target.dim - rank, target.dim))]))
        normals = vt[rank:]
    return np.vstack([dirs, normals])


def rotundity_probe(target: Union[RotundSet, ConvexPolytope], directions: int, seed: int, n: int,
                    tol: float = 1e-10) -> Tuple[float, bool]:
    """
    Largest exposed face found along sampled directions
    :return: max Euclidean face diameter and whether it stays below 1/n
    """
    if directions < 1:
        raise ValueError("At least one direction is required")
    if n < 1:
        raise ValueError("n should be positive")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for u in _support_directions(target, directions, rng):
        if isinstance(target, ConvexPolytope):
            _, face = geometry.support(target, u)
        else:
            values = target.approx.vertices @ u
            band = values >= values.max() - max(2.0 * target.approx_tol, geometry.support_tol)
            candidates = target.approx.vertices[band]
            if candidates.shape[0] > 2:
                candidates = candidates[[int(np.argmax(values[band])), 0, -1]]
            face = np.asarray([_refine_support(target, u, c, tol) for c in candidates])
        worst = max(worst, geometry.diameter(ConvexPolytope(target.dim, face), NormSpec.EUCLIDEAN))
    return worst, worst < 1.0 / n


def rotundify(c: ConvexPolytope, eps: float, approx_subdiv: Optional[int] = None) -> RotundSet:
    """
    Rotund set K with h(K, C) < eps, centered at the Chebyshev center of C
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps should be in (0, 1), got {eps}")
    if not geometry.full_dimensional(c):
        raise ValueError("Cannot rotundify a lower-dimensional polytope")
    center, _ = geometry.chebyshev_center(c)
    shrink = min(eps / (2.0 * geometry.diameter(c, NormSpec.EUCLIDEAN)), eps)
    k = klee_map(c, shrink, center, approx_subdiv)
    k.source_gap = geometry.hausdorff(k.approx, c, NormSpec.EUCLIDEAN)
    return k


def point_anchored_rotundify(c: ConvexPolytope, eps: float, z: Any,
                             approx_subdiv: Optional[int] = None) -> RotundSet:
    """
    Rotund set K with z in K and h(K, C) < eps. A boundary z is handled by inflating C about its Chebyshev
    center by at most eps/4 in Hausdorff distance, then halving the shrink factor until z survives.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps should be in (0, 1), got {eps}")
    z = as_point(z, c.dim)
    if not geometry.contains(c, z):
        raise ValueError("Anchor point is not in C")
    if not geometry.full_dimensional(c):
        raise ValueError("Cannot rotundify a lower-dimensional polytope")
    center, _ = geometry.chebyshev_center(c)
    base = c
    if _margin(c, z) <= boundary_tol:
        radius = float(np.linalg.norm(c.vertices - center, axis=1).max())
        base = c.scale(1.0 + min(eps / (4.0 * radius), 0.5), center)
    shrink = min(eps / (2.0 * geometry.diameter(base, NormSpec.EUCLIDEAN)), eps)
    shifted = base.translate(-center)
    normals = geometry.facets(shifted)
    reach = float(np.linalg.norm(shifted.vertices, axis=1).max())
    while True:
        a = shrink / (2.0 * (1.0 - shrink) * reach)
        gauge = max(0.0, float(((normals[:, :-1] @ (z - center)) / -normals[:, -1]).max()))
        if gauge + a * float(np.linalg.norm(z - center)) <= 1.0:
            break
        shrink /= 2.0
        if shrink < delta_floor:
            raise ValueError("No admissible shrink factor keeps the anchor point")
    k = klee_map(base, shrink, center, approx_subdiv)
    k.source_gap = geometry.hausdorff(k.approx, c, NormSpec.EUCLIDEAN)
    logger.debug("anchored rotundify: inflated=%s shrink=%.3e", base is not c, shrink)
    return k


def _selection(target: Union[ConvexPolytope, RotundSet], x: np.ndarray, norm: NormSpec, tol: float) -> np.ndarray:
    if isinstance(target, RotundSet):
        return project_rotund(target, x, norm, tol).witness
    return geometry.project_point(target, x, norm, tol).witness


def projection_deviations(c_seq: List[Union[ConvexPolytope, RotundSet]], c_limit: RotundSet, x_seq: List[Any],
                          x_limit: Any, norm: NormSpec, tol: float = 1e-10) -> np.ndarray:
    if len(c_seq) != len(x_seq) or not c_seq:
        raise ValueError("Set and point sequences should be non-empty and of equal length")
    target = project_rotund(c_limit, x_limit, norm, tol).witness
    return np.array([norm.dist(_selection(ck, as_point(xk, c_limit.dim), norm, tol), target)
                     for ck, xk in zip(c_seq, x_seq)])


def projection_stability(c_seq: List[Union[ConvexPolytope, RotundSet]], c_limit: RotundSet, x_seq: List[Any],
                         x_limit: Any, norm: NormSpec, tol: float = 1e-10) -> float:
    """
    Max over the tail half of |z_k - P_C x| for selections z_k of the projections of x_k onto C_k
    """
    devs = projection_deviations(c_seq, c_limit, x_seq, x_limit, norm, tol)
    return float(devs[len(devs) // 2:].max())


def jitter(polytope: ConvexPolytope, delta: float, norm: NormSpec, rng: np.random.Generator) -> ConvexPolytope:
    """
    Random polytope within Hausdorff distance 0.9 * delta: a scaling about the centroid plus vertex moves
    """
    center = polytope.centroid
    radius = max(float(np.linalg.norm(polytope.vertices - center, axis=1).max()), 1e-300)
    budget = 0.9 * delta / (sqrt(polytope.dim) if norm is NormSpec.L1 else 1.0)
    scale = 1.0 + rng.uniform(-1.0, 1.0) * budget / (3.0 * radius)
    moved = center + scale * (polytope.vertices - center)
    steps = geometry.unit_directions(rng, polytope.size, polytope.dim)
    moved += steps * rng.uniform(0.0, 2.0 * budget / 3.0, (polytope.size, 1))
    return geometry.hull_reduce(moved)


def stability_delta_search(c: RotundSet, x: Any, eps: float, n: int, norm: NormSpec, samples: int = 24,
                           seed: int = 0, tol: float = 1e-10) -> float:
    """
    Sampled certificate for the continuity of projections at a rotund set: halves delta from eps until every
    drawn polytope K near C and point y near x gives a projection face of diameter <= 1/n lying eps-close to P_C x
    :return: accepted delta
    """
    if eps <= 0:
        raise ValueError("eps should be positive")
    if n < 1:
        raise ValueError("n should be positive")
    if samples < 1:
        raise ValueError("At least one sample is required")
    x = as_point(x, c.dim)
    target = project_rotund(c, x, norm, tol).witness
    rng = np.random.default_rng(seed)
    delta = eps
    while True:
        delta /= 2.0
        if delta < delta_floor:
            raise CertificateError(f"Stability search underflow at x={x.tolist()}")
        passed = True
        for _ in range(samples):
            k = jitter(c.approx, delta, norm, rng)
            y = norm.sample_ball(rng, x, delta)
            face = geometry.project_point(k, y, norm, tol)
            if face.face_diameter > 1.0 / n or \
                    np.max(np.atleast_1d(norm.norm(face.face_samples - target))) >= eps:
                passed = False
                break
        if passed:
            logger.debug("stability search accepted delta=%.3e at eps=%g n=%d", delta, eps, n)
            return delta
