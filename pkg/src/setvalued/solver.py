#!/usr/bin/env python3.7
# -*- coding: utf-8 -*-
import logging
from itertools import combinations
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

from setvalued import geometry
from setvalued.errors import StageFailure
from setvalued.maps import ConvexBlendMap, ScalarField, SetValuedMap, d_infinity, densify_contraction
from setvalued.maps import perturb_at_point
from setvalued.models.sets import ConvexPolytope, NormSpec, as_point
from setvalued.models.trajectory import GenericityCertificate, InductionStage, Trajectory, TrajectoryStatus
from setvalued.models.trajectory import TrajectoryStep
from setvalued.rotund import RotundSet, default_subdiv, point_anchored_rotundify, project_rotund, rotundify
from setvalued.rotund import jitter, stability_delta_search
from setvalued.settings import Tolerances

same_point_tol = 1e-12
refine_levels = 40


class SuccessiveApproximations:
    def __init__(self, norm: NormSpec = NormSpec.EUCLIDEAN, tolerances: Optional[Tolerances] = None,
                 samples: int = 24, approx_subdiv: Optional[int] = None,
                 logger: Optional[logging.Logger] = None, log_level: Optional[int] = logging.ERROR) -> None:
        """
        :param norm: ambient norm of every distance and projection
        :param tolerances: fixed point, branching, projection and hull tolerances
        :param samples: sample count of stability searches and sampled checks
        :param approx_subdiv: boundary subdivision of rotund approximations, dimension default if None
        :param logger: external logging.Logger object
        :param log_level: log_level int code (40 for ERROR) or logging.LOG_LEVEL const
        """
        self.norm = NormSpec.parse(norm)
        self.tolerances = tolerances or Tolerances()
        if samples < 1:
            raise ValueError("At least one sample is required")
        self.samples = samples
        self.approx_subdiv = approx_subdiv
        self.logger = logger or logging.Logger(name="SuccessiveApproximations", level=log_level)

    def _schedule(self, dim: int, approx_schedule: Optional[Sequence[int]]) -> List[int]:
        if approx_schedule:
            if any(int(x) < 1 for x in approx_schedule):
                raise ValueError("Subdivision levels should be positive")
            return [int(x) for x in approx_schedule]
        base = self.approx_subdiv or default_subdiv(dim)
        return [base, 2 * base, 4 * base]

    def step(self, f: SetValuedMap, x: Any) -> TrajectoryStep:
        """
        One successive approximation: project x onto F(x) and take the face witness as the next iterate
        """
        x = as_point(x, f.dim)
        face = geometry.project_point(f.eval(x), x, self.norm, self.tolerances.proj_tol,
                                      max_iter=self.tolerances.proj_max_iter)
        return TrajectoryStep(x, face, self.norm.dist(x, face.witness))

    def run_trajectory(self, f: SetValuedMap, x0: Any, max_iter: Optional[int] = None,
                       fix_tol: Optional[float] = None, branch_tol: Optional[float] = None) -> Trajectory:
        """
        Iterate x_{k+1} in P_{F(x_k)} x_k until a fixed point or the iteration cap.
        A face wider than branch_tol marks the trajectory as branched for good, iteration goes on with the witness.
        :param f: set-valued map
        :param x0: starting point in the domain
        :param max_iter: iteration cap, tolerances default if None
        :param fix_tol: fixed point residual
        :param branch_tol: face diameter above which the step branches
        :return: Trajectory
        """
        max_iter = max_iter or self.tolerances.max_iter
        fix_tol = fix_tol or self.tolerances.fix_tol
        branch_tol = branch_tol or self.tolerances.branch_tol
        if fix_tol <= 0 or branch_tol <= 0 or max_iter < 1:
            raise ValueError("Tolerances and iteration cap should be positive")
        x = as_point(x0, f.dim)
        if not geometry.contains(f.domain, x, self.tolerances.hull_tol):
            raise ValueError("Starting point is outside the domain")
        steps = []  # type: List[TrajectoryStep]
        branch_index = None
        fixed = False
        for k in range(max_iter):
            s = self.step(f, x)
            steps.append(s)
            if s.face.face_diameter > branch_tol and branch_index is None:
                branch_index = k
                self.logger.warning("trajectory branched at step %d, face diameter %.6g", k, s.face.face_diameter)
            if s.residual <= fix_tol:
                fixed = True
                break
            x = s.next
            if not geometry.contains(f.domain, x, self.tolerances.hull_tol):
                raise ValueError(f"Iterate {k + 1} left the domain, the map does not keep its range")
        if branch_index is not None:
            status = TrajectoryStatus.BRANCHED
        elif fixed:
            status = TrajectoryStatus.FIXED_POINT
        else:
            status = TrajectoryStatus.MAX_ITER
        lip = f.lip_bound
        cauchy = steps[-1].step_norm * lip / (1.0 - lip) if lip < 1.0 else None
        trajectory = Trajectory(steps, status, steps[-1].residual,
                                all(x.face.face_diameter <= branch_tol for x in steps), branch_index, cauchy,
                                self.norm)
        self.logger.info("trajectory finished: status=%s steps=%d residual=%.3e",
                         status.value, len(steps), trajectory.fixed_residual)
        return trajectory

    def ensure_contraction(self, f: SetValuedMap, eps: float) -> Tuple[SetValuedMap, float]:
        """
        A strict contraction within eps/2 of f and the halved eps, or f and eps unchanged when lip f < 1
        """
        if f.lip_bound < 1.0:
            return f, eps
        if geometry.full_dimensional(f.domain):
            anchor = ConvexPolytope(f.dim, geometry.chebyshev_center(f.domain)[0])
        else:
            anchor = ConvexPolytope(f.dim, f.domain.centroid)
        size = geometry.diameter(f.domain, self.norm)
        gamma = min(0.5, eps / (4.0 * size)) if size > 0 else 0.5
        self.logger.info("densifying map with lip bound %.6g, gamma=%.6g", f.lip_bound, gamma)
        return densify_contraction(f, gamma, anchor), eps / 2.0

    def _rotund_value(self, domain: ConvexPolytope, value: ConvexPolytope, budget: float, stage: int,
                      schedule: Sequence[int], anchor: Optional[np.ndarray] = None,
                      landing: Optional[Tuple[np.ndarray, np.ndarray, float]] = None) -> RotundSet:
        """
        Rotund approximation K of the value with h(K, value) < budget and K inside the domain. The shrink factor
        halves and the mesh refines until these hold and, when landing = (start, target, radius) is given,
        the projection of start onto K falls within radius of target
        """
        if not geometry.full_dimensional(value):
            raise StageFailure(stage, "value is lower-dimensional and has no rotund approximation")
        gap = None  # type: Optional[float]
        reason = "rotund approximation stays too far from the value"
        for j in range(refine_levels):
            shrink = min(budget, 0.5) * 0.5 ** j
            subdiv = schedule[min(j, len(schedule) - 1)]
            if anchor is None:
                k = rotundify(value, shrink, subdiv)
            else:
                k = point_anchored_rotundify(value, shrink, anchor, subdiv)
            gap = geometry.hausdorff(k.approx, value, self.norm)
            if gap >= budget:
                continue
            if not geometry.hull_contains(domain, k.approx, self.tolerances.hull_tol):
                reason = "rotund approximation leaves the domain"
                continue
            if landing is None:
                return k
            start, target, radius = landing
            gap = self.norm.dist(project_rotund(k, start, self.norm, self.tolerances.proj_tol).witness, target)
            if gap < radius:
                return k
            reason = "projection onto the rotund approximation misses the next forward point"
        raise StageFailure(stage, reason, gap)

    def _refined_projection(self, value: ConvexPolytope, y: np.ndarray, stage: int, rho: float,
                            schedule: Sequence[int]) -> np.ndarray:
        # limit of projections onto rotund sets converging to the value
        previous = None
        gap = None
        for j in range(refine_levels):
            k = rotundify(value, min(rho, 0.5) * 0.5 ** j, schedule[min(j, len(schedule) - 1)])
            p = project_rotund(k, y, self.norm, self.tolerances.proj_tol).witness
            if previous is not None:
                gap = self.norm.dist(p, previous)
                if gap < self.tolerances.cauchy_tol:
                    return p
            previous = p
        raise StageFailure(stage, "projections onto rotund approximations did not settle", gap)

    def forward_induction(self, f: SetValuedMap, x0: Any, eps: float, n: int,
                          approx_schedule: Optional[Sequence[int]] = None) -> Tuple[SetValuedMap, List[np.ndarray]]:
        """
        Map F~ with rotund F~(x0) and d_inf(F, F~) < eps/2, and the points y_0 = x0, ..., y_n of its
        successive approximations
        :param f: nonexpansive map, densified first when lip f >= 1
        :param x0: starting point
        :param eps: closeness budget
        :param n: number of points after x0
        :param approx_schedule: subdivision levels tried for rotund approximations
        :return: F~ and the list of y_k
        """
        if eps <= 0:
            raise ValueError("eps should be positive")
        if n < 1:
            raise ValueError("n should be positive")
        f, eps = self.ensure_contraction(f, eps)
        x0 = as_point(x0, f.dim)
        if not geometry.contains(f.domain, x0, self.tolerances.hull_tol):
            raise ValueError("Starting point is outside the domain")
        schedule = self._schedule(f.dim, approx_schedule)
        lip = f.lip_bound
        value = f.eval(x0)
        f_tilde = f
        if value.size > 1:
            rho = eps * (1.0 - lip) / 8.0
            anchor = x0 if geometry.contains(value, x0, self.tolerances.hull_tol) else None
            k0 = self._rotund_value(f.domain, value, rho, 0, schedule, anchor)
            r = 3.0 * eps / 16.0
            # F~(x0) is the polytope k0.approx, y_1 is projected onto it below
            f_tilde = perturb_at_point(f, x0, k0.approx, rho, r, r * (2.0 - lip) / (1.0 - lip))
            self.logger.info("forward stage 0: rho=%.3e r=%.3e lip=%.6g", rho, r, f_tilde.lip_bound)
        ys = [x0]
        while len(ys) <= n:
            k = len(ys) - 1
            y = ys[-1]
            value = f_tilde.eval(y)
            face = geometry.project_point(value, y, self.norm, self.tolerances.proj_tol,
                                          max_iter=self.tolerances.proj_max_iter)
            if face.value <= self.tolerances.fix_tol:
                ys.append(y.copy())
            elif face.face_diameter <= self.tolerances.branch_tol:
                ys.append(face.witness)
            else:
                ys.append(self._refined_projection(value, y, k, eps * (1.0 - lip) / 8.0, schedule))
            self.logger.info("forward stage %d: step %.6g", k, self.norm.dist(ys[-1], y))
        return f_tilde, ys

    def _separation(self, ys: Sequence[np.ndarray]) -> float:
        gaps = [self.norm.dist(a, b) for a, b in combinations(ys, 2)]
        gaps = [x for x in gaps if x > same_point_tol]
        return min(gaps) if gaps else float("inf")

    def _ball_samples(self, domain: ConvexPolytope, center: np.ndarray, radius: float,
                      rng: np.random.Generator) -> List[np.ndarray]:
        points = []
        for _ in range(self.samples):
            x = self.norm.sample_ball(rng, center, radius)
            if geometry.contains(domain, x):
                points.append(x)
        return points

    def _offset_point(self, domain: ConvexPolytope, y: np.ndarray, length: float) -> np.ndarray:
        """
        Point at distance up to length from y toward the domain center, inside the domain
        """
        if geometry.full_dimensional(domain):
            center = geometry.chebyshev_center(domain)[0]
        else:
            center = domain.centroid
        gap = self.norm.dist(center, y)
        if gap <= same_point_tol:
            return y.copy()
        return y + min(length, gap) / gap * (center - y)

    def _check_faces(self, g: SetValuedMap, stage: int, z: np.ndarray, delta: float, z_next: np.ndarray,
                     delta_next: float, n: int, rng: np.random.Generator) -> float:
        """
        Sampled check that every x within delta of z and every K within delta of G(z) give a projection face
        of diameter at most 1/n inside B(z_next, delta_next / 2)
        :return: largest distance from a face point to z_next
        """
        value = g.eval(z)
        pairs = [(z, value)] + [(self.norm.sample_ball(rng, z, delta), jitter(value, delta, self.norm, rng))
                                for _ in range(self.samples)]
        worst = 0.0
        for x, k in pairs:
            face = geometry.project_point(k, x, self.norm, self.tolerances.proj_tol,
                                          max_iter=self.tolerances.proj_max_iter)
            if face.face_diameter > 1.0 / n:
                raise StageFailure(stage, f"projection face of diameter {face.face_diameter:.6g} above 1/{n}",
                                   face.face_diameter)
            worst = max(worst, float(np.max(np.atleast_1d(self.norm.norm(face.face_samples - z_next)))))
            if worst >= delta_next / 2.0:
                raise StageFailure(stage, f"projection face leaves the ball of radius {delta_next / 2.0:.6g} "
                                          f"around the next anchored point", worst)
        return worst

    def backward_induction(self, f_tilde: SetValuedMap, ys: Sequence[Any], eps: float, n: int,
                           approx_schedule: Optional[Sequence[int]] = None, seed: int = 0) \
            -> Tuple[SetValuedMap, List[np.ndarray], List[float], List[InductionStage]]:
        """
        Perturb F~ near y_n, ..., y_0 so that projections started near each z_k stay thin and land near z_{k+1}
        :param f_tilde: strict contraction from the forward induction
        :param ys: y_0, ..., y_n
        :param eps: closeness budget, d_inf(F~, G) < eps/4 for the result
        :param n: number of steps
        :param approx_schedule: subdivision levels tried for rotund approximations
        :param seed: base seed of the stability searches and sampled checks
        :return: G, the anchored points z_0..z_{n+1}, the radii delta_0..delta_{n+1} and the stage records
        """
        ys = [as_point(y, f_tilde.dim) for y in ys]
        if len(ys) != n + 1:
            raise ValueError(f"Expected {n + 1} forward points, got {len(ys)}")
        schedule = self._schedule(f_tilde.dim, approx_schedule)
        c = self._separation(ys)
        box = min(c / 2.0, eps / (8.0 * n)) / 2.0
        check_radius = c / 2.0 if np.isfinite(c) else box
        deltas = [0.0] * (n + 1) + [1.0 / n]
        zs = [None] * (n + 2)  # type: List[Any]
        stages = []  # type: List[InductionStage]
        done = []  # type: List[int]
        g = f_tilde
        for k in range(n, -1, -1):
            y = ys[k]
            twin = next((m for m in done if self.norm.dist(ys[m], y) <= same_point_tol), None)
            if twin is not None:
                zs[k] = zs[twin]
                deltas[k] = deltas[twin]
                continue
            lip = g.lip_bound
            if lip >= 1.0:
                raise StageFailure(k, f"map is not a strict contraction, lip bound {lip:.6g}")
            outer_r = box
            r = box * min((1.0 - lip) / (1.0 + lip), 0.5)
            rho = r * (1.0 - lip) / 2.0
            if not 0.0 < rho < r < outer_r:
                raise StageFailure(k, "parameter box is empty")
            value = g.eval(y)
            landing = None if k == n else (y, ys[k + 1], deltas[k + 1] / 8.0)
            k_rot = self._rotund_value(g.domain, value, rho / 2.0, k, schedule, landing=landing)
            if k == n:
                target = project_rotund(k_rot, y, self.norm, self.tolerances.proj_tol).witness
                zs[n + 1] = geometry.nearest_point(k_rot.approx, target, self.norm, self.tolerances.proj_tol)
            s = stability_delta_search(k_rot, y, deltas[k + 1] / 8.0, n, self.norm, self.samples, seed + k,
                                       self.tolerances.proj_tol)
            s = min(s, rho / 2.0, deltas[k + 1] / 2.0)
            deltas[k] = s / 2.0
            # the start x0 stays put, later points move inside B(y_k, s/8)
            zs[k] = y.copy() if k == 0 else self._offset_point(g.domain, y, s / 16.0)
            value_gap = geometry.hausdorff(k_rot.approx, value, self.norm)
            g = perturb_at_point(g, zs[k], k_rot.approx, rho, r, outer_r)
            done.append(k)

            if g.lip_bound >= 1.0:
                raise StageFailure(k, "perturbed map is not a strict contraction")
            rng = np.random.default_rng([seed, k])
            points = list(geometry.sample_points(g.domain, self.samples, rng))
            d_inf = d_infinity(f_tilde, g, points + self._ball_samples(g.domain, y, outer_r, rng) + [y, zs[k]],
                               refine=False)
            bound = eps * len(done) / (4.0 * (n + 1))
            if d_inf >= bound:
                raise StageFailure(k, f"d_inf(F~, G) estimate exceeds {bound:.6g}", d_inf)
            if self.norm.dist(y, zs[k]) >= deltas[k] / 4.0:
                raise StageFailure(k, "anchored point drifted from the forward point")
            self._check_faces(g, k, zs[k], deltas[k], zs[k + 1], deltas[k + 1], n, rng)
            outside = [x for x in points if min(self.norm.dist(x, ys[m]) for m in done) >= check_radius]
            for x in outside:
                if not geometry.hull_equal(g.eval(x), f_tilde.eval(x), self.tolerances.hull_tol):
                    raise StageFailure(k, f"map changed away from the trajectory at {x.tolist()}")
            stages.append(InductionStage(k, y, zs[k], rho, r, outer_r, deltas[k], g.lip_bound, d_inf, value_gap))
            self.logger.info("backward stage %d: rho=%.3e r=%.3e R=%.3e delta=%.3e lip=%.6g d_inf=%.3e",
                             k, rho, r, outer_r, deltas[k], g.lip_bound, d_inf)
        return g, zs, deltas, stages

    def _start(self, domain: ConvexPolytope, x0: np.ndarray, r: float, rng: np.random.Generator) -> np.ndarray:
        for _ in range(16):
            v = self.norm.sample_ball(rng, x0, r)
            if geometry.contains(domain, v):
                return v
        return x0.copy()

    def _neighbour(self, g: SetValuedMap, delta: float, index: int, rng: np.random.Generator) -> SetValuedMap:
        """
        Random map H with d_inf(G, H) <= 0.9 delta: a point perturbation on even trials, a global blend on odd ones
        """
        size = geometry.diameter(g.domain, self.norm)
        q = ConvexPolytope(g.dim, geometry.sample_points(g.domain, 1, rng)[0])
        if size == 0.0:
            return g
        if index % 2:
            return ConvexBlendMap(g, q, ScalarField.constant(rng.uniform(0.0, 0.9 * delta / size)))
        xi = geometry.sample_points(g.domain, 1, rng)[0]
        rho = 0.4 * delta
        value = geometry.minkowski_interp(q, g.eval(xi), rng.uniform(0.0, 0.5 * rho / size))
        return perturb_at_point(g, xi, value, rho, 0.45 * delta, 0.9 * delta)

    def _trial_run(self, f: SetValuedMap, v0: np.ndarray, n: int) -> float:
        worst = 0.0
        v = v0
        for _ in range(n):
            s = self.step(f, v)
            worst = max(worst, s.face.face_diameter)
            v = s.next
        return worst

    def genericity_construct(self, f: SetValuedMap, x0: Any, eps: float, n: int, trial_budget: int = 100,
                             seed: int = 0, approx_schedule: Optional[Sequence[int]] = None) \
            -> GenericityCertificate:
        """
        Build G with d_inf(F, G) < eps, then test maps H within delta of G from starting points within r of x0:
        every projection face met in n steps should have diameter at most 1/n
        :param f: nonexpansive map
        :param x0: starting point
        :param eps: closeness budget
        :param n: number of steps and inverse face bound
        :param trial_budget: number of sampled (H, v0) pairs
        :param seed: base seed, trial t uses the seed sequence (seed, t)
        :param approx_schedule: subdivision levels tried for rotund approximations
        :return: GenericityCertificate
        """
        if trial_budget < 1:
            raise ValueError("At least one trial is required")
        x0 = as_point(x0, f.dim)
        contraction, work_eps = self.ensure_contraction(f, eps)
        f_tilde, ys = self.forward_induction(contraction, x0, work_eps, n, approx_schedule)
        g, _, deltas, stages = self.backward_induction(f_tilde, ys, work_eps, n, approx_schedule, seed)
        r = deltas[0] / 2.0
        delta = min(r, eps / 4.0)
        rng = np.random.default_rng(seed)
        points = list(geometry.sample_points(f.domain, self.samples, rng)) + list(ys)
        d_inf = d_infinity(f, g, points, refine=False)

        worst = 0.0
        failed = []
        for t in range(trial_budget):
            trial_rng = np.random.default_rng([seed, t])
            h = self._neighbour(g, delta, t, trial_rng)
            observed = self._trial_run(h, self._start(g.domain, x0, r, trial_rng), n)
            worst = max(worst, observed)
            if observed > 1.0 / n:
                failed.append(t)
        certificate = GenericityCertificate(g, r, delta, n, d_inf, trial_budget, worst, not failed, eps, seed, x0,
                                            self.norm, ys, stages, failed)
        self.logger.info("genericity certificate: n=%d r=%.3e delta=%.3e d_inf=%.3e worst=%.3e passed=%s",
                         n, r, delta, d_inf, worst, certificate.all_passed)
        return certificate

    def an_membership_sample(self, f: SetValuedMap, x0: Any, n: int, r: float, trials: int, seed: int = 0) \
            -> Tuple[float, float]:
        """
        Fraction of starting points in B(x0, r) whose n successive approximations meet only faces of
        diameter at most 1/n, and the largest face seen
        """
        if trials < 1:
            raise ValueError("At least one trial is required")
        if n < 1 or r <= 0:
            raise ValueError("n and r should be positive")
        x0 = as_point(x0, f.dim)
        passed = 0
        worst = 0.0
        for t in range(trials):
            rng = np.random.default_rng([seed, t])
            observed = self._trial_run(f, self._start(f.domain, x0, r, rng), n)
            worst = max(worst, observed)
            passed += observed <= 1.0 / n
        return passed / trials, worst
