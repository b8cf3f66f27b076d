#!/usr/bin/env python3.7
# -*- coding: utf-8 -*-
"""
Convex compact set calculus on vertex-represented polytopes: metric projections under the three
supported norms, point-to-set and Hausdorff distances, Minkowski interpolation, support faces and
the LP kernels behind them.
"""
import logging
from itertools import combinations, product
from typing import Any, List, NamedTuple, Optional, Tuple

import numpy as np
from scipy import optimize
from scipy.spatial import ConvexHull, HalfspaceIntersection, QhullError
from scipy.spatial.distance import cdist, pdist

from setvalued.errors import ConvergenceError, DimensionMismatch
from setvalued.models.sets import CompactPointSet, CompactSet, ConvexPolytope, NormSpec, ProjectionFace
from setvalued.models.sets import as_point, lex_sorted

logger = logging.getLogger("geometry")

# HiGHS methods tried in turn, the first one reporting an optimum wins
lp_attempts = (
    ("highs-ds", {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}),
    ("highs", {}),
    ("highs-ipm", {}),
)
mip_options = {"mip_rel_gap": 1e-9, "disp": False}
# containment slack when only an LP can decide it
lp_contain_tol = 1e-7
rank_tol = 1e-10
support_tol = 1e-9
face_batches = 6
resync_every = 50
polish_every = 500


class Embedding(NamedTuple):
    """
    Facet form of a polytope inside its affine hull: p = center + t @ basis, rows n.t + b <= 0.
    rows is None when qhull could not build the facets
    """
    center: np.ndarray
    basis: np.ndarray
    rows: Optional[np.ndarray]


def _solve_lp(c: Any, a_ub: Any = None, b_ub: Any = None, a_eq: Any = None, b_eq: Any = None,
              bounds: Any = (0, None)) -> optimize.OptimizeResult:
    res = None
    for method, options in lp_attempts:
        res = optimize.linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds,
                               method=method, options=options)
        if res.status == 0:
            return res
        logger.debug("%s LP ended with status %d: %s", method, res.status, res.message)
    return res


def linprog(c: Any, a_ub: Any = None, b_ub: Any = None, a_eq: Any = None, b_eq: Any = None,
            bounds: Any = (0, None)) -> optimize.OptimizeResult:
    res = _solve_lp(c, a_ub, b_ub, a_eq, b_eq, bounds)
    if res.status != 0:
        raise ConvergenceError(f"LP backend failed with status {res.status}: {res.message}")
    return res


def check_dims(a: CompactSet, b: CompactSet) -> None:
    if a.dim != b.dim:
        raise DimensionMismatch(a.dim, b.dim, "set")


def unit_directions(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    g = rng.standard_normal((count, dim))
    return g / np.maximum(np.linalg.norm(g, axis=1, keepdims=True), 1e-300)


def _convex_weights(raw: np.ndarray, m: int) -> np.ndarray:
    w = np.clip(raw[:m], 0.0, None)
    total = w.sum()
    if total <= 0:
        raise ConvergenceError("LP returned degenerate convex weights")
    return w / total


def _linf_weights(vertices: np.ndarray, x: np.ndarray) -> np.ndarray:
    m, d = vertices.shape
    vt = vertices.T
    ones = np.ones((d, 1))
    a_ub = np.block([[vt, -ones], [-vt, -ones]])
    b_ub = np.concatenate([x, -x])
    a_eq = np.concatenate([np.ones(m), [0.0]]).reshape(1, -1)
    c = np.zeros(m + 1)
    c[-1] = 1.0
    return _convex_weights(linprog(c, a_ub, b_ub, a_eq, [1.0]).x, m)


def _l1_weights(vertices: np.ndarray, x: np.ndarray) -> np.ndarray:
    m, d = vertices.shape
    vt = vertices.T
    eye = np.eye(d)
    a_ub = np.block([[vt, -eye], [-vt, -eye]])
    b_ub = np.concatenate([x, -x])
    a_eq = np.concatenate([np.ones(m), np.zeros(d)]).reshape(1, -1)
    c = np.concatenate([np.zeros(m), np.ones(d)])
    return _convex_weights(linprog(c, a_ub, b_ub, a_eq, [1.0]).x, m)


def linf_gap(vertices: np.ndarray, x: np.ndarray) -> float:
    """
    L-infinity distance from x to conv(vertices)
    """
    if vertices.shape[0] == 1:
        return float(np.abs(x - vertices[0]).max())
    w = _linf_weights(vertices, x)
    return float(np.abs(x - w @ vertices).max())


def affine_rank(points: np.ndarray) -> Tuple[int, np.ndarray, np.ndarray]:
    """
    :return: rank of the affine hull, centroid and an orthonormal basis of the hull directions
    """
    center = points.mean(axis=0)
    centered = points - center
    _, sv, vt = np.linalg.svd(centered, full_matrices=False)
    scale = max(1.0, float(np.abs(centered).max()))
    if sv.size == 0 or sv[0] <= rank_tol * scale:
        return 0, center, vt[:0]
    rank = int(np.sum(sv > rank_tol * sv[0]))
    return rank, center, vt[:rank]


def embedding(a: ConvexPolytope) -> Embedding:
    """
    Facet form of the polytope in its own affine hull, built once per polytope
    """
    if a._embedding is not None:
        return a._embedding
    rank, center, basis = affine_rank(a.vertices)
    coords = (a.vertices - center) @ basis.T
    rows = None  # type: Optional[np.ndarray]
    if rank == 0:
        rows = np.zeros((0, 1))
    elif rank == 1:
        rows = np.array([[-1.0, float(coords.min())], [1.0, -float(coords.max())]])
    else:
        try:
            rows = ConvexHull(coords).equations
        except QhullError as e:
            logger.debug("qhull failed on a %d-vertex polytope (%s), containment falls back to LP", a.size, e)
    a._embedding = Embedding(center, basis, rows)
    return a._embedding


def _frank_wolfe(vertices: np.ndarray, x: np.ndarray, tol: float, max_iter: int,
                 lam: Optional[np.ndarray] = None) -> Tuple[np.ndarray, bool]:
    """
    Away-step Frank-Wolfe on min 1/2 |V'l - x|^2 over the simplex
    :param lam: weights to continue from, the nearest vertex when None
    :return: convex weights of the approximate minimizer and whether the duality gap closed
    """
    diffs = vertices - x
    sq = np.einsum('ij,ij->i', diffs, diffs)
    if lam is None:
        lam = np.zeros(vertices.shape[0])
        lam[int(np.argmin(sq))] = 1.0
    p = lam @ vertices
    # the gap is a difference of inner products of this magnitude
    stop = tol * max(1.0, float(np.sqrt(sq.max())) * float(np.abs(vertices).max()))
    for it in range(max_iter):
        if it % resync_every == resync_every - 1:
            p = lam @ vertices
        r = p - x
        g = vertices @ r
        rp = float(r @ p)
        s = int(np.argmin(g))
        fw_gap = rp - g[s]
        if fw_gap <= stop:
            return lam, True
        active = np.flatnonzero(lam > 0)
        a = int(active[np.argmax(g[active])])
        away_gap = g[a] - rp
        if fw_gap >= away_gap or lam[a] >= 1.0:
            direction = vertices[s] - p
            gamma_max = 1.0
            toward = True
        else:
            direction = p - vertices[a]
            gamma_max = lam[a] / (1.0 - lam[a])
            toward = False
        dd = float(direction @ direction)
        if dd <= 0.0:
            return lam, True
        gamma = min(max(-float(r @ direction) / dd, 0.0), gamma_max)
        if toward:
            lam *= (1.0 - gamma)
            lam[s] += gamma
        else:
            lam *= (1.0 + gamma)
            lam[a] -= gamma
            if gamma >= gamma_max:
                lam[a] = 0.0
        p = p + gamma * direction
    return lam, False


def _active_set_polish(vertices: np.ndarray, x: np.ndarray, lam: np.ndarray) -> Optional[np.ndarray]:
    """
    Exact projection onto the affine hull of the active vertices, dropping and adding vertices until the
    optimality conditions hold; None when the active set does not settle
    """
    active = [int(i) for i in np.flatnonzero(lam > 0)]
    scale = 1.0 + float(np.abs(vertices - x).max()) ** 2
    for _ in range(2 * vertices.shape[0] + 2):
        base = vertices[active[0]]
        if len(active) == 1:
            mu = np.ones(1)
            p = base.copy()
        else:
            edges = vertices[active[1:]] - base
            beta = np.linalg.lstsq(edges.T, x - base, rcond=None)[0]
            mu = np.concatenate([[1.0 - beta.sum()], beta])
            p = base + edges.T @ beta
        if mu.min() < -1e-12:
            del active[int(np.argmin(mu))]
            continue
        kkt = (vertices - p) @ (x - p)
        worst = int(np.argmax(kkt))
        if kkt[worst] <= 1e-12 * scale:
            return p
        if worst in active:
            return None
        active.append(worst)
    return None


def _euclidean_nearest(vertices: np.ndarray, x: np.ndarray, tol: float, max_iter: int) -> np.ndarray:
    """
    Frank-Wolfe in chunks, each followed by an active set polish of the current weights; an optimal
    polish ends the search even when the duality gap stalls
    """
    lam = None  # type: Optional[np.ndarray]
    done = 0
    while True:
        chunk = max(1, min(polish_every, max_iter - done))
        lam, converged = _frank_wolfe(vertices, x, tol, chunk, lam)
        done += chunk
        p = lam @ vertices
        polished = _active_set_polish(vertices, x, lam)
        if polished is not None and np.linalg.norm(x - polished) <= np.linalg.norm(x - p) + 1e-12:
            return polished
        if converged:
            logger.debug("active set polish rejected at %s, keeping Frank-Wolfe point", x)
            return p
        if done >= max_iter:
            raise ConvergenceError(f"Frank-Wolfe did not reach duality gap {tol:g} in {max_iter} iterations "
                                   f"and the active set did not settle")


def _nearest(target: ConvexPolytope, x: np.ndarray, norm: NormSpec, tol: float, max_iter: int) -> np.ndarray:
    vertices = target.vertices
    if vertices.shape[0] == 1:
        return vertices[0].copy()
    if embedding(target).rows is not None and contains(target, x, tol):
        return x.copy()
    if norm is NormSpec.EUCLIDEAN:
        return _euclidean_nearest(vertices, x, tol, max_iter)
    elif norm is NormSpec.LINF:
        p = _linf_weights(vertices, x) @ vertices
    else:
        p = _l1_weights(vertices, x) @ vertices
    if np.abs(x - p).max() <= tol:
        return x.copy()
    return p


def _face_program(vertices: np.ndarray, x: np.ndarray, norm: NormSpec, level: float) -> Tuple:
    m, d = vertices.shape
    vt = vertices.T
    if norm is NormSpec.LINF:
        a_ub = np.vstack([vt, -vt])
        b_ub = np.concatenate([x + level, level - x])
        a_eq = np.ones((1, m))
        extra = 0
    else:
        eye = np.eye(d)
        a_ub = np.block([[vt, -eye], [-vt, -eye], [np.zeros((1, m)), np.ones((1, d))]])
        b_ub = np.concatenate([x, -x, [level]])
        a_eq = np.concatenate([np.ones(m), np.zeros(d)]).reshape(1, -1)
        extra = d
    return a_ub, b_ub, a_eq, extra


def _pairwise_max(points: np.ndarray, norm: NormSpec) -> float:
    if points.shape[0] < 2:
        return 0.0
    return float(pdist(points, metric=norm.metric).max())


def _sample_face(vertices: np.ndarray, x: np.ndarray, norm: NormSpec, value: float, tol: float,
                rng: np.random.Generator) -> Tuple[np.ndarray, float]:
    """
    Extreme points of {p in P: |x - p| <= value} collected by maximizing linear objectives over it.
    LP weights are clipped and renormalized, so every sample is a point of P
    """
    m, d = vertices.shape
    slack = max(tol, 1e-9)
    a_ub, b_ub, a_eq, extra = _face_program(vertices, x, norm, value + slack)
    directions = np.vstack([np.eye(d), -np.eye(d), unit_directions(rng, 4, d)])
    samples = []  # type: List[np.ndarray]
    diam = 0.0
    for batch in range(face_batches):
        for u in directions:
            c = np.concatenate([-(vertices @ u), np.zeros(extra)])
            w = _convex_weights(linprog(c, a_ub, b_ub, a_eq, [1.0]).x, m)
            samples.append(w @ vertices)
        found = _pairwise_max(np.unique(np.asarray(samples), axis=0), norm)
        stable = batch > 0 and abs(found - diam) < slack
        diam = found
        if stable:
            break
        directions = unit_directions(rng, 2 * d + 4, d)
    return lex_sorted(np.unique(np.asarray(samples), axis=0)), diam


def project_point(target: CompactSet, x: Any, norm: NormSpec, tol: float = 1e-10, seed: int = 0,
                  max_iter: int = 100000) -> ProjectionFace:
    """
    Metric projection of x onto target with an inner approximation of the optimal face
    :param target: polytope or compact point set
    :param x: point of the same dimension
    :param norm: ambient norm
    :param tol: duality gap for the Euclidean kernel, face slack for polyhedral norms
    :param seed: seed of the random face directions
    :param max_iter: Frank-Wolfe iteration cap
    :return: ProjectionFace with witness, distance, face samples and their diameter
    """
    if tol <= 0:
        raise ValueError("Projection tolerance should be positive")
    x = as_point(x, target.dim)
    if isinstance(target, CompactPointSet):
        return _project_compact(target, x, norm, tol, seed, max_iter)
    vertices = target.vertices
    p = _nearest(target, x, norm, tol, max_iter)
    value = norm.dist(x, p)
    if norm.strictly_convex or vertices.shape[0] == 1 or value == 0.0:
        return ProjectionFace(p, value, 0.0, [p])
    samples, diam = _sample_face(vertices, x, norm, value, tol, np.random.default_rng(seed))
    return ProjectionFace(samples[0], value, diam, samples)


def _project_compact(target: CompactPointSet, x: np.ndarray, norm: NormSpec, tol: float, seed: int,
                     max_iter: int) -> ProjectionFace:
    dists = np.atleast_1d(norm.norm(target.vertices - x))
    faces = [project_point(piece, x, norm, tol, seed, max_iter) for piece in target.pieces or []]
    value = min([float(dists.min())] + [f.value for f in faces])
    level = value + max(tol, 1e-9)
    samples = [target.vertices[dists <= level]] + [f.face_samples for f in faces if f.value <= level]
    cloud = lex_sorted(np.unique(np.vstack(samples), axis=0))
    return ProjectionFace(cloud[0], value, _pairwise_max(cloud, norm), cloud)


def distance(x: Any, target: CompactSet, norm: NormSpec, tol: float = 1e-10, max_iter: int = 100000) -> float:
    x = as_point(x, target.dim)
    if isinstance(target, CompactPointSet):
        best = float(np.min(norm.norm(target.vertices - x)))
        for piece in target.pieces or []:
            best = min(best, distance(x, piece, norm, tol, max_iter))
        return best
    return norm.dist(x, _nearest(target, x, norm, tol, max_iter))


def contains(target: CompactSet, x: Any, tol: float = 1e-9) -> bool:
    """
    Membership up to tol, decided on the facet form of a polytope: x must lie within tol of the affine
    hull and violate no facet by more than tol
    """
    x = as_point(x, target.dim)
    if isinstance(target, CompactPointSet):
        if np.abs(target.vertices - x).max(axis=1).min() <= tol:
            return True
        return any(contains(piece, x, tol) for piece in target.pieces or [])
    emb = embedding(target)
    if emb.rows is None:
        return linf_gap(target.vertices, x) <= max(tol, lp_contain_tol)
    offset = x - emb.center
    coords = emb.basis @ offset
    if float(np.linalg.norm(offset - coords @ emb.basis)) > tol:
        return False
    if emb.rows.shape[0] == 0:
        return True
    return float(np.max(emb.rows[:, :-1] @ coords + emb.rows[:, -1])) <= tol


def hull_contains(outer: CompactSet, inner: CompactSet, tol: float = 1e-9) -> bool:
    check_dims(outer, inner)
    cloud = inner.cloud if isinstance(inner, CompactPointSet) else inner.vertices
    return all(contains(outer, v, tol) for v in cloud)


def hull_equal(a: ConvexPolytope, b: ConvexPolytope, tol: float = 1e-9) -> bool:
    """
    Equality of convex hulls decided by mutual vertex containment
    """
    return hull_contains(a, b, tol) and hull_contains(b, a, tol)


def _enumerate_vertices(normals: np.ndarray, offsets: np.ndarray) -> Optional[np.ndarray]:
    r = normals.shape[1]
    scale = max(1.0, float(np.abs(offsets).max()))
    found = []
    for idx in combinations(range(normals.shape[0]), r):
        sub = normals[list(idx)]
        if abs(np.linalg.det(sub)) <= rank_tol:
            continue
        t = np.linalg.solve(sub, -offsets[list(idx)])
        if np.all(normals @ t + offsets <= 1e-9 * scale):
            found.append(t)
    return np.asarray(found) if found else None


def _halfspace_vertices(rows: np.ndarray) -> Optional[np.ndarray]:
    """
    Vertices of the bounded polyhedron n.t + b <= 0, None when it is empty or has no interior
    """
    normals, offsets = rows[:, :-1], rows[:, -1]
    size = np.linalg.norm(normals, axis=1)
    flat = size <= rank_tol * max(1.0, float(size.max()))
    if np.any(offsets[flat] > 0):
        return None
    normals, offsets, size = normals[~flat], offsets[~flat], size[~flat]
    r = normals.shape[1]
    if r == 1:
        bounds = -offsets / normals[:, 0]
        lo = float(bounds[normals[:, 0] < 0].max(initial=-np.inf))
        hi = float(bounds[normals[:, 0] > 0].min(initial=np.inf))
        if lo > hi:
            return None
        return np.array([[lo], [hi]])
    # Chebyshev ball of the cell gives the interior point qhull needs
    c = np.zeros(r + 1)
    c[-1] = -1.0
    res = _solve_lp(c, np.hstack([normals, size[:, None]]), -offsets, bounds=[(None, None)] * r + [(0, None)])
    if res.status != 0 or res.x[-1] <= rank_tol:
        return None
    try:
        return HalfspaceIntersection(np.hstack([normals, offsets[:, None]]), res.x[:r]).intersections
    except QhullError as e:
        logger.debug("halfspace intersection failed (%s), enumerating vertices", e)
        return _enumerate_vertices(normals, offsets)


def _voronoi_candidates(a: ConvexPolytope, points: np.ndarray) -> np.ndarray:
    """
    Vertices of every Euclidean Voronoi cell of the points cut by the polytope, the distance to the
    nearest point is convex on each cell
    """
    emb = embedding(a)
    if emb.rows is None:
        raise ConvergenceError("Facet form of the polytope is unavailable")
    if emb.basis.shape[0] == 0:
        return emb.center[None, :]
    rel = points - emb.center
    coords = rel @ emb.basis.T
    # |p - q|^2 = |t - t_q|^2 + const_q inside the affine hull
    weights = np.einsum('ij,ij->i', rel, rel)
    found = []
    for i in range(points.shape[0]):
        others = np.arange(points.shape[0]) != i
        cell = np.hstack([2.0 * (coords[others] - coords[i]), (weights[i] - weights[others])[:, None]])
        corners = _halfspace_vertices(np.vstack([emb.rows, cell]))
        if corners is not None:
            found.append(corners)
    if not found:
        return np.zeros((0, a.dim))
    return emb.center + np.vstack(found) @ emb.basis


def _norm_duals(norm: NormSpec, dim: int) -> np.ndarray:
    """
    Rows w with |v| = max_w w.v for a polyhedral norm
    """
    if norm is NormSpec.LINF:
        return np.vstack([np.eye(dim), -np.eye(dim)])
    return np.array(list(product((-1.0, 1.0), repeat=dim)))


def _mip_candidates(a: ConvexPolytope, points: np.ndarray, norm: NormSpec) -> np.ndarray:
    """
    Maximizer of min_i |p - q_i| over the polytope for a polyhedral norm: binaries pick the active dual row
    of every point, then an LP with the selection fixed polishes the point
    """
    vertices = a.vertices
    m, n = vertices.shape[0], points.shape[0]
    duals = _norm_duals(norm, a.dim)
    k = duals.shape[0]
    reach = float(cdist(vertices, points, metric=norm.metric).max())
    big = 2.0 * reach * (1.0 + 1e-6) + 1e-9
    vw = vertices @ duals.T
    qw = points @ duals.T
    size = m + 1 + n * k

    # variables: vertex weights, the level t, one binary per (point, dual row)
    simplex = np.concatenate([np.ones(m), np.zeros(1 + n * k)])[None, :]
    pick = np.hstack([np.zeros((n, m + 1)), np.kron(np.eye(n), np.ones((1, k)))])
    level = np.hstack([-np.tile(vw, (1, n)).T, np.ones((n * k, 1)), big * np.eye(n * k)])
    lo = np.concatenate([np.ones(1 + n), np.full(n * k, -np.inf)])
    hi = np.concatenate([np.ones(1 + n), big - qw.reshape(-1)])
    c = np.zeros(size)
    c[m] = -1.0
    integrality = np.concatenate([np.zeros(m + 1), np.ones(n * k)])
    upper = np.concatenate([np.ones(m), [reach], np.ones(n * k)])
    res = optimize.milp(c, integrality=integrality, bounds=optimize.Bounds(np.zeros(size), upper),
                        constraints=optimize.LinearConstraint(np.vstack([simplex, pick, level]), lo, hi),
                        options=mip_options)
    if res.x is None:
        raise ConvergenceError(f"MILP backend failed with status {res.status}: {res.message}")
    found = [_convex_weights(res.x, m) @ vertices]

    chosen = res.x[m + 1:].reshape(n, k).argmax(axis=1)
    a_ub = np.hstack([-vw[:, chosen].T, np.ones((n, 1))])
    b_ub = -qw[np.arange(n), chosen]
    a_eq = np.concatenate([np.ones(m), [0.0]]).reshape(1, -1)
    c_lp = np.zeros(m + 1)
    c_lp[-1] = -1.0
    polished = _solve_lp(c_lp, a_ub, b_ub, a_eq, [1.0], bounds=[(0, None)] * m + [(None, None)])
    if polished.status == 0:
        found.append(_convex_weights(polished.x, m) @ vertices)
    return np.asarray(found)


def farthest_point(a: ConvexPolytope, points: Any, norm: NormSpec) -> Tuple[float, np.ndarray]:
    """
    Exact sup over a polytope of the distance to a finite point set
    :param a: polytope
    :param points: non-empty list of points of the same dimension
    :param norm: ambient norm
    :return: the supremum and a point of the polytope attaining it
    """
    q = np.unique(np.asarray(points, dtype=float).reshape(-1, a.dim), axis=0)
    gaps = cdist(a.vertices, q, metric=norm.metric).min(axis=1)
    best = int(np.argmax(gaps))
    value, witness = float(gaps[best]), a.vertices[best].copy()
    if q.shape[0] == 1 or a.size == 1:
        # d(., q) is convex, the supremum sits at a vertex
        return value, witness
    if norm is NormSpec.EUCLIDEAN:
        candidates = _voronoi_candidates(a, q)
    else:
        candidates = _mip_candidates(a, q, norm)
    if candidates.shape[0]:
        values = cdist(candidates, q, metric=norm.metric).min(axis=1)
        top = int(np.argmax(values))
        if values[top] > value:
            value, witness = float(values[top]), candidates[top]
    return value, witness


def excess(a: CompactSet, b: CompactSet, norm: NormSpec, tol: float = 1e-10) -> float:
    """
    One-sided Hausdorff excess sup_{p in a} d(p, b)
    """
    check_dims(a, b)
    if isinstance(a, CompactPointSet):
        values = [distance(p, b, norm, tol) for p in a.vertices]
        values += [excess(piece, b, norm, tol) for piece in a.pieces or []]
        return max(values)
    if isinstance(b, ConvexPolytope) or a.size == 1:
        # d(., b) is convex for convex b, so the supremum sits at a vertex
        return max(distance(v, b, norm, tol) for v in a.vertices)
    if any(hull_contains(piece, a) for piece in b.pieces or []):
        return 0.0
    if b.pieces:
        raise NotImplementedError("Excess of a polytope over a point set with polytope pieces is supported only "
                                  "when one of the pieces covers the polytope")
    return farthest_point(a, b.vertices, norm)[0]


def hausdorff(a: CompactSet, b: CompactSet, norm: NormSpec, tol: float = 1e-10) -> float:
    check_dims(a, b)
    return max(excess(a, b, norm, tol), excess(b, a, norm, tol))


def minkowski_interp(a: ConvexPolytope, b: ConvexPolytope, lam: float, tol: float = 1e-9) -> ConvexPolytope:
    """
    lam * a + (1 - lam) * b as a reduced polytope
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"Interpolation weight should be in [0, 1], got {lam}")
    check_dims(a, b)
    if lam == 1.0:
        return a
    if lam == 0.0:
        return b
    points = lam * a.vertices[:, None, :] + (1.0 - lam) * b.vertices[None, :, :]
    return hull_reduce(points.reshape(-1, a.dim), tol)


def pointwise_interp(a: CompactPointSet, b: CompactPointSet, lam: float) -> CompactPointSet:
    """
    {lam * p + (1 - lam) * q} over the points of two finite sets, no convexification
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"Interpolation weight should be in [0, 1], got {lam}")
    check_dims(a, b)
    if a.pieces or b.pieces:
        raise NotImplementedError("Pointwise interpolation is defined for finite point sets only")
    points = lam * a.vertices[:, None, :] + (1.0 - lam) * b.vertices[None, :, :]
    return CompactPointSet(a.dim, np.unique(points.reshape(-1, a.dim), axis=0))


def _reduce_by_lp(points: np.ndarray, tol: float) -> List[int]:
    keep = list(range(points.shape[0]))
    for i in range(points.shape[0]):
        others = [j for j in keep if j != i]
        if others and linf_gap(points[others], points[i]) <= tol:
            keep.remove(i)
    return keep


def hull_reduce(points: Any, tol: float = 1e-9) -> ConvexPolytope:
    """
    Drop every point that is a convex combination of the others
    :param points: non-empty list of points
    :param tol: containment tolerance of the LP fallback
    :return: ConvexPolytope with the same convex hull
    """
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        raise ValueError("Cannot reduce an empty point list")
    if pts.ndim != 2:
        raise ValueError("Points should be given as a list of coordinate lists")
    pts = np.unique(pts, axis=0)
    dim = pts.shape[1]
    if pts.shape[0] == 1:
        return ConvexPolytope(dim, pts)
    rank, center, basis = affine_rank(pts)
    if rank == 0:
        return ConvexPolytope(dim, pts[:1])
    coords = (pts - center) @ basis.T
    if rank == 1:
        keep = [int(np.argmin(coords[:, 0])), int(np.argmax(coords[:, 0]))]
    else:
        try:
            keep = list(ConvexHull(coords).vertices)
        except QhullError as e:
            logger.debug("qhull failed (%s), reducing %d points by LP", e, pts.shape[0])
            keep = _reduce_by_lp(pts, tol)
    return ConvexPolytope(dim, pts[np.unique(keep)])


def support(a: ConvexPolytope, u: Any, tol: float = support_tol) -> Tuple[float, np.ndarray]:
    """
    :return: support value max <u, v> and every vertex attaining it within tol
    """
    u = as_point(u, a.dim)
    if not np.any(u):
        raise ValueError("Support direction should be non-zero")
    values = a.vertices @ u
    top = float(values.max())
    return top, a.vertices[values >= top - tol]


def diameter(a: CompactSet, norm: NormSpec) -> float:
    cloud = a.cloud if isinstance(a, CompactPointSet) else a.vertices
    return _pairwise_max(cloud, norm)


def full_dimensional(a: ConvexPolytope) -> bool:
    return a.size > a.dim and affine_rank(a.vertices)[0] == a.dim


def _hull(a: ConvexPolytope) -> ConvexHull:
    if not full_dimensional(a):
        raise ValueError("Polytope is not full-dimensional")
    try:
        return ConvexHull(a.vertices)
    except QhullError:
        raise ValueError("Polytope is not full-dimensional")


def facets(a: ConvexPolytope) -> np.ndarray:
    """
    Facet rows (n, b) with unit normals n, n.x + b <= 0 exactly on the polytope
    """
    if a.dim == 1:
        lo, hi = float(a.vertices.min()), float(a.vertices.max())
        if hi - lo <= rank_tol:
            raise ValueError("Polytope is not full-dimensional")
        return np.array([[-1.0, lo], [1.0, -hi]])
    return _hull(a).equations


def boundary_simplices(a: ConvexPolytope) -> np.ndarray:
    """
    Vertex indices of a triangulation of the boundary
    """
    if a.dim == 1:
        facets(a)
        return np.array([[int(np.argmin(a.vertices[:, 0]))], [int(np.argmax(a.vertices[:, 0]))]])
    return _hull(a).simplices


def chebyshev_center(a: ConvexPolytope) -> Tuple[np.ndarray, float]:
    """
    Center and radius of the largest Euclidean ball inside a full-dimensional polytope
    """
    eq = facets(a)
    normals, offsets = eq[:, :-1], eq[:, -1]
    d = a.dim
    c = np.zeros(d + 1)
    c[-1] = -1.0
    a_ub = np.hstack([normals, np.linalg.norm(normals, axis=1, keepdims=True)])
    res = linprog(c, a_ub, -offsets, bounds=[(None, None)] * d + [(0, None)])
    return res.x[:d], float(res.x[-1])


def sample_points(a: ConvexPolytope, count: int, rng: np.random.Generator) -> np.ndarray:
    """
    Random points of the polytope as Dirichlet combinations of its vertices
    """
    if a.size == 1:
        return np.repeat(a.vertices, count, axis=0)
    return rng.dirichlet(np.ones(a.size), size=count) @ a.vertices


def random_polytope(rng: np.random.Generator, dim: int, count: int, scale: float = 1.0,
                    center: Optional[Any] = None) -> ConvexPolytope:
    c = np.zeros(dim) if center is None else as_point(center, dim)
    return hull_reduce(c + scale * rng.uniform(-1.0, 1.0, (count, dim)))


def nearest_point(target: ConvexPolytope, x: Any, norm: NormSpec, tol: float = 1e-10,
                  max_iter: int = 100000) -> np.ndarray:
    """
    One exact minimizer of |x - p| over the polytope, without face probing
    """
    return _nearest(target, as_point(x, target.dim), norm, tol, max_iter)
