#!/usr/bin/env python3.7
# -*- coding: utf-8 -*-
import logging
from itertools import combinations
from typing import Iterable, Optional, Tuple

import numpy as np

from setvalued import geometry
from setvalued.models.sets import CompactPointSet, CompactSet, ConvexPolytope, GeodesicCertificate, NormSpec
from setvalued.models.sets import PorosityWitness

logger = logging.getLogger("hyperspace")

bisection_cap = 200


def segment_point(a: ConvexPolytope, b: ConvexPolytope, lam: float) -> ConvexPolytope:
    """
    Point of the selected metric segment between a (lam = 1) and b (lam = 0)
    """
    return geometry.minkowski_interp(a, b, lam)


def _interpolate(a: CompactSet, b: CompactSet, lam: float) -> CompactSet:
    if isinstance(a, ConvexPolytope) and isinstance(b, ConvexPolytope):
        return segment_point(a, b, lam)
    if isinstance(a, CompactPointSet) and isinstance(b, CompactPointSet):
        return geometry.pointwise_interp(a, b, lam)
    raise ValueError("Both endpoints should be convex polytopes or both finite point sets")


def certify_geodesic(a: CompactSet, b: CompactSet, sample_lambdas: Iterable[float], norm: NormSpec,
                     c: Optional[ConvexPolytope] = None, tol: float = 1e-9) -> GeodesicCertificate:
    """
    Check that lam -> lam*a + (1-lam)*b is a metric segment, and optionally the hyperbolicity inequality
    against a third polytope c
    :param a: start set
    :param b: end set, of the same kind as a
    :param sample_lambdas: interpolation weights in [0, 1]
    :param norm: ambient norm
    :param c: optional third set for the hyperbolicity slack
    :param tol: residual tolerance for the pass flag
    :return: GeodesicCertificate
    """
    lambdas = [float(x) for x in sample_lambdas]
    if not lambdas:
        raise ValueError("At least one interpolation weight is required")
    if any(not 0.0 <= x <= 1.0 for x in lambdas):
        raise ValueError("Interpolation weights should be in [0, 1]")
    geometry.check_dims(a, b)
    points = {x: _interpolate(a, b, x) for x in lambdas}
    h_ab = geometry.hausdorff(a, b, norm)

    endpoint = 0.0
    for x, s in points.items():
        endpoint = max(endpoint,
                       abs(geometry.hausdorff(a, s, norm) - (1.0 - x) * h_ab),
                       abs(geometry.hausdorff(b, s, norm) - x * h_ab))
    reparam = 0.0
    for x, y in combinations(sorted(points), 2):
        reparam = max(reparam, abs(geometry.hausdorff(points[x], points[y], norm) - abs(x - y) * h_ab))

    violation = None
    if c is not None:
        if not isinstance(c, ConvexPolytope) or not isinstance(a, ConvexPolytope):
            raise ValueError("Hyperbolicity is checked on convex polytopes only")
        geometry.check_dims(a, c)
        h_bc = geometry.hausdorff(b, c, norm)
        violation = max(geometry.hausdorff(points[x], segment_point(a, c, x), norm) - (1.0 - x) * h_bc
                        for x in lambdas)

    passed = endpoint <= tol and reparam <= tol and (violation is None or violation <= tol)
    logger.debug("geodesic check h(A,B)=%.12g endpoint=%.3e reparam=%.3e violation=%s",
                 h_ab, endpoint, reparam, violation)
    return GeodesicCertificate(a, b, lambdas, h_ab, endpoint, reparam, violation, tol, passed, norm, c)


def counterexample_sets() -> Tuple[CompactPointSet, CompactPointSet]:
    a = CompactPointSet(2, [[-1.0, -1.0], [-1.0, 1.0]])
    b = CompactPointSet(2, [[1.0, -1.0], [1.0, 1.0]])
    return a, b


def compact_counterexample() -> Tuple[float, float]:
    """
    Two-point sets whose pointwise half-sum is not a metric midpoint
    :return: h(A, B) and h(A/2 + B/2, A) under the Euclidean norm
    """
    a, b = counterexample_sets()
    mid = geometry.pointwise_interp(a, b, 0.5)
    return geometry.hausdorff(a, b, NormSpec.EUCLIDEAN), geometry.hausdorff(mid, a, NormSpec.EUCLIDEAN)


def _climb(k: ConvexPolytope, start: np.ndarray, end: np.ndarray, target: float, norm: NormSpec) -> np.ndarray:
    # d(., K) grows monotonically from start (on K) to end
    lo, hi = 0.0, 1.0
    z = end
    for _ in range(bisection_cap):
        t = 0.5 * (lo + hi)
        z = start + t * (end - start)
        gap = geometry.distance(z, k, norm) - target
        if abs(gap) <= 1e-13 * max(1.0, target) or hi - lo <= 1e-16:
            break
        if gap > 0:
            hi = t
        else:
            lo = t
    return z


def porosity_witness(c: ConvexPolytope, k: ConvexPolytope, eps: float, norm: NormSpec,
                     tol: float = 1e-9) -> PorosityWitness:
    """
    Witness that the ball of radius eps/4 around K' = K + {z} holds no convex set
    :param c: ambient convex polytope
    :param k: convex polytope inside c, different from c
    :param eps: 0 < eps < max over c of d(., k)
    :param norm: ambient norm
    :param tol: containment tolerance
    :return: PorosityWitness
    """
    geometry.check_dims(c, k)
    if not geometry.hull_contains(c, k, tol):
        raise ValueError("K is not contained in C")
    gaps = np.array([geometry.distance(v, k, norm) for v in c.vertices])
    eps0 = float(gaps.max())
    if eps0 <= tol:
        raise ValueError("K equals C: carving a ball out of C is not supported")
    if not 0.0 < eps < eps0:
        raise ValueError(f"eps should be in (0, {eps0:.12g}), got {eps}")
    far = c.vertices[int(np.argmax(gaps))]
    foot = geometry.nearest_point(k, far, norm)
    z = _climb(k, foot, far, 0.75 * eps, norm)
    midpoint = 0.5 * (z + geometry.nearest_point(k, z, norm))
    k_prime = CompactPointSet(c.dim, np.vstack([k.vertices, z]), pieces=[k])
    witness = PorosityWitness(k, z, k_prime, eps, midpoint, geometry.distance(midpoint, k_prime, norm),
                              geometry.hausdorff(k, k_prime, norm), 0.25, norm)
    logger.info("porosity witness eps=%g eps0=%g h(K,K')=%.12g gap=%.12g",
                eps, eps0, witness.hausdorff_gap, witness.midpoint_gap)
    return witness
