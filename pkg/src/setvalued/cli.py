#!/usr/bin/env python3.7
# -*- coding: utf-8 -*-
"""
Batch front-end: one JSON experiment config in, one JSON or CSV document out.

Config layout: {"command": str, "inputs": {name: path or inline object}, "params": {...}, "global": {...}}.
Input paths are relative to the config file. Exit codes: 0 success, 1 usage or schema error, 2 branched
trajectory, 3 iteration cap, 4 stage or certificate failure.
"""
import argparse
import logging
import os
import sys
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from setvalued import geometry, hyperspace, rotund
from setvalued.errors import CertificateError, StageFailure
from setvalued.maps import SetValuedMap, d_infinity, perturb_at_point, resolve_map
from setvalued.models.jto import dumps, loads
from setvalued.models.sets import CompactPointSet, CompactSet, ConvexPolytope, NormSpec, as_point, resolve_set
from setvalued.models.trajectory import TrajectoryStatus
from setvalued.settings import Tolerances, load_config, mk_logger
from setvalued.solver import SuccessiveApproximations

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BRANCHED = 2
EXIT_MAX_ITER = 3
EXIT_FAILURE = 4

status_codes = {
    TrajectoryStatus.FIXED_POINT: EXIT_OK,
    TrajectoryStatus.BRANCHED: EXIT_BRANCHED,
    TrajectoryStatus.MAX_ITER: EXIT_MAX_ITER,
}

Output = Union[Dict[str, Any], str]


class Experiment:
    def __init__(self, config: Dict[str, Any], base_dir: str, ini_path: Optional[str] = None,
                 seed: Optional[int] = None, logger: Optional[logging.Logger] = None) -> None:
        """
        :param config: parsed experiment JSON
        :param base_dir: directory input paths are resolved against
        :param ini_path: optional INI file with default tolerances and sample sizes
        :param seed: command line seed, wins over the config and the INI file
        :param logger: external logging.Logger object
        """
        if not isinstance(config, dict):
            raise ValueError("Experiment config should be a JSON object")
        self.inputs = config.get("inputs") or {}
        self.params = config.get("params") or {}
        glob = config.get("global") or {}
        if not all(isinstance(x, dict) for x in (self.inputs, self.params, glob)):
            raise ValueError("'inputs', 'params' and 'global' should be JSON objects")
        self.base_dir = base_dir
        self.settings = load_config(ini_path)
        defaults = self.settings["DEFAULT"]
        self.norm = NormSpec.parse(glob.get("norm", defaults.get("norm")))
        self.seed = int(seed if seed is not None else glob.get("seed", defaults.getint("seed")))
        self.output_path = glob.get("output_path")
        overrides = glob.get("tolerances") or {}
        self.tolerances = Tolerances.from_section(self.settings["TOLERANCES"], **overrides)
        self.sampling = self.settings["SAMPLING"]
        self.logger = logger or logging.getLogger("setvalued")

    def _input(self, name: str) -> Dict[str, Any]:
        if name not in self.inputs:
            raise ValueError(f"Missing input '{name}'")
        data = self.inputs[name]
        if isinstance(data, str):
            path = os.path.join(self.base_dir, data)
            if not os.path.isfile(path):
                raise ValueError(f"Input file {path} does not exist")
            with open(path, "rb") as f:
                data = loads(f.read())
        if not isinstance(data, dict):
            raise ValueError(f"Input '{name}' should be a JSON object")
        return data

    def has_input(self, name: str) -> bool:
        return name in self.inputs

    def set(self, name: str) -> CompactSet:
        try:
            return resolve_set(self._input(name))
        except RuntimeError as e:
            raise ValueError(f"Input '{name}' is not a valid set: {e}")

    def map(self, name: str = "map") -> SetValuedMap:
        return resolve_map(self._input(name))

    def param(self, name: str, default: Any = None) -> Any:
        value = self.params.get(name, default)
        if value is None:
            raise ValueError(f"Missing parameter '{name}'")
        return value

    def point(self, name: str, dim: int) -> np.ndarray:
        return as_point(self.param(name), dim)

    def solver(self) -> SuccessiveApproximations:
        return SuccessiveApproximations(self.norm, self.tolerances, self.sampling.getint("samples"),
                                        self.params.get("approx_subdiv"), self.logger)


def _farthest(a: CompactSet, b: CompactSet, norm: NormSpec) -> Tuple[float, List[float]]:
    if isinstance(a, ConvexPolytope) and isinstance(b, CompactPointSet) and not b.pieces:
        # the farthest point may sit inside the polytope
        value, witness = geometry.farthest_point(a, b.vertices, norm)
        return value, witness.tolist()
    cloud = a.cloud if isinstance(a, CompactPointSet) else a.vertices
    value = geometry.excess(a, b, norm)
    gaps = [geometry.distance(p, b, norm) for p in cloud]
    return value, cloud[int(np.argmax(gaps))].tolist()


def cmd_hausdorff(exp: Experiment) -> Tuple[Output, int]:
    a, b = exp.set("a"), exp.set("b")
    geometry.check_dims(a, b)
    excess_ab, witness_a = _farthest(a, b, exp.norm)
    excess_ba, witness_b = _farthest(b, a, exp.norm)
    return {
        "distance": max(excess_ab, excess_ba),
        "excess_ab": excess_ab,
        "excess_ba": excess_ba,
        "witness_a": witness_a,
        "witness_b": witness_b,
        "norm": exp.norm.value,
    }, EXIT_OK


def cmd_project(exp: Experiment) -> Tuple[Output, int]:
    target = exp.set("set")
    x = exp.point("point", target.dim)
    eps = exp.params.get("rotundify")
    if eps is not None:
        k = rotund.rotundify(target, float(eps), exp.params.get("approx_subdiv"))
        face = rotund.project_rotund(k, x, exp.norm, exp.tolerances.proj_tol, exp.seed)
    else:
        face = geometry.project_point(target, x, exp.norm, exp.tolerances.proj_tol, exp.seed,
                                      exp.tolerances.proj_max_iter)
    return face.to_json(), EXIT_OK


def cmd_geodesic_check(exp: Experiment) -> Tuple[Output, int]:
    c = exp.set("c") if exp.has_input("c") else None
    certificate = hyperspace.certify_geodesic(exp.set("a"), exp.set("b"),
                                              exp.param("lambdas", [0.0, 0.25, 0.5, 0.75, 1.0]), exp.norm, c,
                                              float(exp.param("tol", 1e-9)))
    return certificate.to_json(), EXIT_OK if certificate.passed else EXIT_FAILURE


def cmd_porosity(exp: Experiment) -> Tuple[Output, int]:
    witness = hyperspace.porosity_witness(exp.set("c"), exp.set("k"), float(exp.param("eps")), exp.norm,
                                          exp.tolerances.hull_tol)
    return witness.to_json(), EXIT_OK


def cmd_rotundify(exp: Experiment) -> Tuple[Output, int]:
    c = exp.set("c")
    eps = float(exp.param("eps"))
    subdiv = exp.params.get("approx_subdiv", exp.sampling.getint("approx_subdiv"))
    if "anchor" in exp.params:
        k = rotund.point_anchored_rotundify(c, eps, exp.point("anchor", c.dim), subdiv)
    else:
        k = rotund.rotundify(c, eps, subdiv)
    n = int(exp.param("n", 10))
    worst, passed = rotund.rotundity_probe(k, int(exp.param("directions", 64)), exp.seed, n)
    return {"set": k.to_json(), "rotundity": {"max_face_diam": worst, "n": n, "passed": passed}}, EXIT_OK


def cmd_perturb(exp: Experiment) -> Tuple[Output, int]:
    f = exp.map()
    g = perturb_at_point(f, exp.point("xi", f.dim), exp.set("value"), float(exp.param("rho")),
                         float(exp.param("r")), float(exp.param("outer_r")), exp.tolerances.hull_tol)
    rng = np.random.default_rng(exp.seed)
    points = geometry.sample_points(f.domain, exp.sampling.getint("samples"), rng)
    return {
        "map": g.to_json(),
        "lip_bound": g.lip_bound,
        "d_inf_estimate": d_infinity(f, g, list(points) + [g.xi]),
    }, EXIT_OK


def cmd_trajectory(exp: Experiment) -> Tuple[Output, int]:
    f = exp.map()
    trajectory = exp.solver().run_trajectory(f, exp.point("x0", f.dim), exp.params.get("max_iter"))
    return trajectory.to_csv(), status_codes[trajectory.status]


def cmd_an_sample(exp: Experiment) -> Tuple[Output, int]:
    f = exp.map()
    fraction, worst = exp.solver().an_membership_sample(f, exp.point("x0", f.dim), int(exp.param("n")),
                                                        float(exp.param("r")), int(exp.param("trials", 100)),
                                                        exp.seed)
    return {"pass_fraction": fraction, "worst_diam": worst}, EXIT_OK


def cmd_genericity(exp: Experiment) -> Tuple[Output, int]:
    f = exp.map()
    certificate = exp.solver().genericity_construct(
        f, exp.point("x0", f.dim), float(exp.param("eps")), int(exp.param("n")),
        int(exp.param("trial_budget", exp.sampling.getint("trial_budget"))), exp.seed,
        exp.params.get("approx_schedule"))
    return certificate.to_json(), EXIT_OK if certificate.all_passed else EXIT_FAILURE


commands = {
    "hausdorff": cmd_hausdorff,
    "project": cmd_project,
    "geodesic-check": cmd_geodesic_check,
    "porosity": cmd_porosity,
    "rotundify": cmd_rotundify,
    "perturb": cmd_perturb,
    "trajectory": cmd_trajectory,
    "an-sample": cmd_an_sample,
    "genericity": cmd_genericity,
}  # type: Dict[str, Callable[[Experiment], Tuple[Output, int]]]


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(prog="setvalued", description="Set-valued analysis experiments.")
    parser.add_argument("command", choices=sorted(commands), help="Experiment to run")
    parser.add_argument("--config", required=True, help="Path to the experiment JSON config")
    parser.add_argument("--out", default=None, help="Output path, config global.output_path or stdout if unset")
    parser.add_argument("--seed", type=int, default=None, help="Seed, overrides the config")
    parser.add_argument("--ini", default=None, help="INI file with default tolerances and sample sizes")
    parser.add_argument("--quiet", action="store_true", help="No progress logging")
    return parser.parse_args(argv)


def _logger(exp_settings: Any, command: str, quiet: bool) -> logging.Logger:
    defaults = exp_settings["DEFAULT"]
    return mk_logger(defaults.get("logdir"), defaults.get("loglevel"), command, quiet)


def _write(payload: Output, path: Optional[str]) -> None:
    raw = payload.encode() if isinstance(payload, str) else dumps(payload)
    if path:
        with open(path, "wb") as f:
            f.write(raw)
    else:
        sys.stdout.buffer.write(raw)
        sys.stdout.flush()


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        with open(args.config, "rb") as f:
            config = loads(f.read())
        if isinstance(config, dict) and config.get("command", args.command) != args.command:
            raise ValueError(f"Config is for command '{config['command']}', not '{args.command}'")
        settings = load_config(args.ini)
        exp = Experiment(config, os.path.dirname(os.path.abspath(args.config)), args.ini, args.seed,
                         _logger(settings, args.command, args.quiet))
    except (OSError, ValueError) as e:
        print(f"[error] {e}", file=sys.stderr)
        return EXIT_USAGE

    out = args.out or exp.output_path
    try:
        payload, code = commands[args.command](exp)
    except (StageFailure, CertificateError) as e:
        report = e.to_json() if isinstance(e, StageFailure) else {"reason": str(e)}
        report["status"] = "failure"
        exp.logger.error("%s failed: %s", args.command, e)
        _write(report, out)
        return EXIT_FAILURE
    except (ValueError, NotImplementedError, RuntimeError) as e:
        print(f"[error] {e}", file=sys.stderr)
        return EXIT_USAGE
    exp.logger.info("%s finished with exit code %d", args.command, code)
    _write(payload, out)
    return code


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
