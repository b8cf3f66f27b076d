#!/usr/bin/env python3.7
# -*- coding: utf-8 -*-
import csv
import io
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from setvalued.models.jto import Serializable, extract_to_model
from setvalued.models.sets import NormSpec, ProjectionFace


class TrajectoryStatus(Enum):
    FIXED_POINT = "fixed_point"
    BRANCHED = "branched"
    MAX_ITER = "max_iter"


class TrajectoryStep(Serializable):
    def __init__(self, x: Iterable[float], face: Union[Dict, ProjectionFace], step_norm: float) -> None:
        """
        :param x: current iterate
        :param face: projection of x onto F(x), its witness is the next iterate
        :param step_norm: distance from x to the next iterate
        """
        self.x = np.asarray(x, dtype=float)
        self.face = extract_to_model(face, ProjectionFace, True)
        self.step_norm = float(step_norm)

    @property
    def next(self) -> np.ndarray:
        return self.face.witness

    @property
    def residual(self) -> float:
        return self.face.value


class Trajectory(Serializable):
    def __init__(self, steps: Iterable[Union[Dict, TrajectoryStep]], status: Union[str, TrajectoryStatus],
                 fixed_residual: float, regular: bool, branch_index: Optional[int] = None,
                 cauchy_bound: Optional[float] = None, norm: Union[str, NormSpec] = NormSpec.EUCLIDEAN) -> None:
        self.steps = [extract_to_model(x, TrajectoryStep, True) for x in steps]
        self.status = self.to_enum(status, TrajectoryStatus)
        self.fixed_residual = float(fixed_residual)
        self.regular = bool(regular)
        self.branch_index = branch_index
        self.cauchy_bound = None if cauchy_bound is None else float(cauchy_bound)
        self.norm = NormSpec.parse(norm)

    @property
    def last(self) -> np.ndarray:
        return self.steps[-1].x

    @property
    def step_norms(self) -> np.ndarray:
        return np.array([x.step_norm for x in self.steps])

    @property
    def face_diameters(self) -> np.ndarray:
        return np.array([x.face.face_diameter for x in self.steps])

    def to_csv(self) -> str:
        """
        Plot-ready trace: iter, x components, step_norm, face_diameter, residual, status
        """
        dim = self.steps[0].x.shape[0] if self.steps else 0
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["iter"] + [f"x{i}" for i in range(dim)] +
                        ["step_norm", "face_diameter", "residual", "status"])
        for i, step in enumerate(self.steps):
            writer.writerow([i] + [repr(float(v)) for v in step.x] +
                            [repr(step.step_norm), repr(step.face.face_diameter), repr(step.residual),
                             self._row_status(i)])
        return buffer.getvalue()

    def _row_status(self, i: int) -> str:
        if self.branch_index is not None and i >= self.branch_index:
            return TrajectoryStatus.BRANCHED.value
        if i == len(self.steps) - 1:
            return self.status.value
        return "running"


class InductionStage(Serializable):
    def __init__(self, stage: int, y: Sequence[float], z: Sequence[float], rho: float, r: float, outer_r: float,
                 delta: float, lip_bound: float, d_inf: float, value_gap: float) -> None:
        """
        Parameters and checks of one backward induction stage
        :param stage: index k of the trajectory point the map was perturbed at
        :param y: forward point y_k
        :param z: anchored point z_k
        :param rho: Hausdorff budget of the new value
        :param r: inner perturbation radius
        :param outer_r: outer perturbation radius
        :param delta: accepted stability radius
        :param lip_bound: declared Lipschitz bound of the map after the stage
        :param d_inf: sampled d_inf estimate between the forward map and the map after the stage
        :param value_gap: h(new value, previous value) at z_k
        """
        self.stage = int(stage)
        self.y = np.asarray(y, dtype=float)
        self.z = np.asarray(z, dtype=float)
        self.rho = float(rho)
        self.r = float(r)
        self.outer_r = float(outer_r)
        self.delta = float(delta)
        self.lip_bound = float(lip_bound)
        self.d_inf = float(d_inf)
        self.value_gap = float(value_gap)


class GenericityCertificate(Serializable):
    def __init__(self, g: Dict[str, Any], r: float, delta: float, n: int, d_inf_f_g: float, trials: int,
                 max_observed_face_diam: float, all_passed: bool, eps: float, seed: int, x0: Sequence[float],
                 norm: Union[str, NormSpec] = NormSpec.EUCLIDEAN, ys: Iterable[Sequence[float]] = (),
                 stages: Iterable[Union[Dict, InductionStage]] = (), failed_trials: Iterable[int] = ()) -> None:
        """
        Sampled evidence that every map within delta of g keeps projection faces below 1/n for n steps
        started within r of x0
        :param g: constructed map, as JSON
        :param r: radius of admissible starting points
        :param delta: d_inf radius of the tested neighbourhood of g
        :param n: number of steps and inverse face diameter bound
        :param d_inf_f_g: sampled estimate of d_inf(F, g)
        :param trials: number of drawn (H, v0) pairs
        :param max_observed_face_diam: largest face diameter over all trials
        :param all_passed: max_observed_face_diam <= 1 / n
        """
        self.g = g.to_json() if hasattr(g, '__model__') else g
        self.r = float(r)
        self.delta = float(delta)
        self.n = int(n)
        self.d_inf_f_g = float(d_inf_f_g)
        self.trials = int(trials)
        self.max_observed_face_diam = float(max_observed_face_diam)
        self.all_passed = bool(all_passed)
        self.eps = float(eps)
        self.seed = int(seed)
        self.x0 = np.asarray(x0, dtype=float)
        self.norm = NormSpec.parse(norm)
        self.ys = np.asarray(list(ys), dtype=float)
        self.stages = [extract_to_model(x, InductionStage, True) for x in stages]
        self.failed_trials = [int(x) for x in failed_trials]


def trajectory_rows(trajectory: Trajectory) -> List[List[str]]:
    return list(csv.reader(io.StringIO(trajectory.to_csv())))
