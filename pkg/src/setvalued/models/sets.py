#!/usr/bin/env python3.7
# -*- coding: utf-8 -*-
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Union

import numpy as np

from setvalued.errors import DimensionMismatch
from setvalued.models.jto import Serializable, extract_to_model


class NormSpec(Enum):
    EUCLIDEAN = "l2"
    L1 = "l1"
    LINF = "linf"

    @property
    def strictly_convex(self) -> bool:
        return self is NormSpec.EUCLIDEAN

    @property
    def ord(self) -> Union[int, float]:
        return {NormSpec.EUCLIDEAN: 2, NormSpec.L1: 1, NormSpec.LINF: np.inf}[self]

    @property
    def metric(self) -> str:
        """
        scipy.spatial.distance metric name of the norm
        """
        return {NormSpec.EUCLIDEAN: "euclidean", NormSpec.L1: "cityblock", NormSpec.LINF: "chebyshev"}[self]

    def norm(self, v: Any) -> Union[float, np.ndarray]:
        """
        :param v: vector, or an array of vectors along the last axis
        :return: norm value(s)
        """
        r = np.linalg.norm(np.asarray(v, dtype=float), ord=self.ord, axis=-1)
        return float(r) if np.ndim(r) == 0 else r

    def dist(self, x: Any, y: Any) -> float:
        return float(np.linalg.norm(np.asarray(x, dtype=float) - np.asarray(y, dtype=float), ord=self.ord))

    def operator_norm(self, matrix: Any) -> float:
        """
        Operator norm of a linear map induced by this norm on both sides
        """
        return float(np.linalg.norm(np.atleast_2d(np.asarray(matrix, dtype=float)), ord=self.ord))

    def sample_ball(self, rng: np.random.Generator, center: Any, radius: float) -> np.ndarray:
        """
        Uniform sample from the closed ball B(center, radius) of this norm
        """
        c = np.asarray(center, dtype=float)
        d = c.shape[0]
        if self is NormSpec.LINF:
            offset = rng.uniform(-1.0, 1.0, d)
        elif self is NormSpec.L1:
            e = rng.exponential(1.0, d + 1)
            offset = rng.choice((-1.0, 1.0), d) * e[:d] / e.sum()
        else:
            g = rng.standard_normal(d)
            offset = g / max(np.linalg.norm(g), 1e-300) * rng.uniform() ** (1.0 / d)
        return c + radius * offset

    @classmethod
    def parse(cls, value: Union[str, 'NormSpec']) -> 'NormSpec':
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"Norm should be one of {[x.value for x in cls]}, got {value}")


def as_point(x: Any, dim: Optional[int] = None) -> np.ndarray:
    p = np.asarray(x, dtype=float).reshape(-1)
    if not np.all(np.isfinite(p)):
        raise ValueError(f"Point {x} has non-finite coordinates")
    if dim is not None and p.shape[0] != dim:
        raise DimensionMismatch(dim, p.shape[0])
    return p


def lex_sorted(points: np.ndarray) -> np.ndarray:
    if points.shape[0] < 2:
        return points
    return points[np.lexsort(points.T[::-1])]


def as_vertices(vertices: Any, dim: int) -> np.ndarray:
    v = np.asarray(vertices, dtype=float)
    if v.ndim == 1 and v.size == dim:
        v = v.reshape(1, dim)
    if v.ndim != 2 or v.shape[0] < 1:
        raise ValueError("Set should contain at least one point")
    if v.shape[1] != dim:
        raise DimensionMismatch(dim, v.shape[1], "vertex")
    if not np.all(np.isfinite(v)):
        raise ValueError("Vertices should be finite")
    return lex_sorted(v)


class ConvexPolytope(Serializable):
    """
    Convex compact set given by its vertex list, kept lexicographically sorted. The constructor takes the
    list as given; resolve_set and geometry.hull_reduce drop redundant vertices.
    """

    def __init__(self, dim: int, vertices: Iterable[Iterable[float]], kind: str = "polytope") -> None:
        self.dim = int(dim)
        if self.dim < 1:
            raise ValueError("Dimension should be positive")
        self.vertices = as_vertices(vertices, self.dim)
        # facet form, filled in by geometry.embedding
        self._embedding = None  # type: Any

    @property
    def convex(self) -> bool:
        return True

    @property
    def size(self) -> int:
        return self.vertices.shape[0]

    @property
    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def translate(self, shift: Any) -> 'ConvexPolytope':
        return ConvexPolytope(self.dim, self.vertices + as_point(shift, self.dim))

    def scale(self, factor: float, center: Any = None) -> 'ConvexPolytope':
        c = np.zeros(self.dim) if center is None else as_point(center, self.dim)
        return ConvexPolytope(self.dim, c + factor * (self.vertices - c))


class CompactPointSet(Serializable):
    """
    Compact set given as a finite union of points and, optionally, convex polytope pieces
    """

    def __init__(self, dim: int, vertices: Iterable[Iterable[float]],
                 pieces: Optional[List[Union[Dict, ConvexPolytope]]] = None, kind: str = "points") -> None:
        self.dim = int(dim)
        self.kind = "points"
        self.vertices = as_vertices(vertices, self.dim)
        if pieces:
            self.pieces = [x if isinstance(x, ConvexPolytope) else _reduced(x) for x in pieces]
            for p in self.pieces:
                if p.dim != self.dim:
                    raise DimensionMismatch(self.dim, p.dim, "piece")
        else:
            self.pieces = None

    @property
    def convex(self) -> bool:
        return False

    @property
    def points(self) -> np.ndarray:
        return self.vertices

    @property
    def cloud(self) -> np.ndarray:
        """
        Points together with the vertices of every piece
        """
        if not self.pieces:
            return self.vertices
        return np.vstack([self.vertices] + [p.vertices for p in self.pieces])


CompactSet = Union[ConvexPolytope, CompactPointSet]


def _reduced(data: Dict) -> ConvexPolytope:
    # geometry imports this module
    from setvalued.geometry import hull_reduce
    return hull_reduce(extract_to_model(data, ConvexPolytope, True).vertices)


def resolve_set(data: Union[Dict, CompactSet]) -> CompactSet:
    """
    Set from its JSON form, polytope vertex lists reduced to the irredundant ones
    """
    if isinstance(data, (ConvexPolytope, CompactPointSet)):
        return data
    if data.get("kind") == "points" or "points" in data:
        if "points" in data and "vertices" not in data:
            data = dict(data)
            data["vertices"] = data.pop("points")
        return extract_to_model(data, CompactPointSet, True)
    return _reduced(data)


class ProjectionFace(Serializable):
    def __init__(self, witness: Iterable[float], value: float, face_diameter: float,
                 face_samples: Iterable[Iterable[float]]) -> None:
        self.witness = np.asarray(witness, dtype=float)
        self.value = float(value)
        self.face_diameter = float(face_diameter)
        self.face_samples = np.asarray(face_samples, dtype=float).reshape(-1, self.witness.shape[0])


class GeodesicCertificate(Serializable):
    def __init__(self, a: Union[Dict, CompactSet], b: Union[Dict, CompactSet], sample_lambdas: Iterable[float],
                 h_ab: float, max_endpoint_residual: float, max_reparam_residual: float,
                 max_hyperbolicity_violation: Optional[float], tol: float, passed: bool,
                 norm: Union[str, NormSpec] = NormSpec.EUCLIDEAN, c: Union[Dict, CompactSet, None] = None) -> None:
        self.a = resolve_set(a)
        self.b = resolve_set(b)
        self.c = resolve_set(c) if c is not None else None
        self.norm = NormSpec.parse(norm)
        self.sample_lambdas = [float(x) for x in sample_lambdas]
        self.h_ab = float(h_ab)
        self.max_endpoint_residual = float(max_endpoint_residual)
        self.max_reparam_residual = float(max_reparam_residual)
        self.max_hyperbolicity_violation = None if max_hyperbolicity_violation is None \
            else float(max_hyperbolicity_violation)
        self.tol = float(tol)
        self.passed = bool(passed)


class PorosityWitness(Serializable):
    def __init__(self, k: Union[Dict, ConvexPolytope], z: Iterable[float], k_prime: Union[Dict, CompactPointSet],
                 eps: float, midpoint: Iterable[float], midpoint_gap: float, hausdorff_gap: float,
                 alpha: float = 0.25, norm: Union[str, NormSpec] = NormSpec.EUCLIDEAN) -> None:
        self.k = resolve_set(k)
        self.z = np.asarray(z, dtype=float)
        self.k_prime = resolve_set(k_prime)
        self.eps = float(eps)
        self.alpha = float(alpha)
        self.midpoint = np.asarray(midpoint, dtype=float)
        self.midpoint_gap = float(midpoint_gap)
        self.hausdorff_gap = float(hausdorff_gap)
        self.norm = NormSpec.parse(norm)
