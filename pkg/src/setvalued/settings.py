#!/usr/bin/env python3.7
# -*- coding: utf-8 -*-
import logging
import os
import sys
from configparser import ConfigParser, SectionProxy
from dataclasses import dataclass
from typing import Optional

log_format = '[%(asctime)s][%(processName)s][%(name)s] %(message)s'


def mk_logger(dir_path: Optional[str], level: str, command: str, quiet: bool = False,
              name: str = 'setvalued') -> logging.Logger:
    """
    Logger of one subcommand run
    :param dir_path: directory for setvalued-<command>.log, stderr when empty
    :param level: logging level name
    :param command: subcommand, names both the logger and the file
    :param quiet: report errors only
    :return: logger with exactly one handler
    """
    if dir_path:
        log_handler = logging.FileHandler(os.path.join(dir_path, f'setvalued-{command}.log'),
                                          mode='a')  # type: logging.Handler
    else:
        log_handler = logging.StreamHandler(sys.stderr)
    log_handler.setFormatter(logging.Formatter(log_format))

    log = logging.getLogger(f'{name}.{command}')  # type: logging.Logger
    # repeated runs in one process reuse the logger
    for h in list(log.handlers):
        log.removeHandler(h)
        h.close()
    log.setLevel(logging.ERROR if quiet else getattr(logging, level.upper()))
    log.addHandler(log_handler)
    log.propagate = False
    return log


def load_config(path: Optional[str] = None) -> ConfigParser:
    c = ConfigParser()
    c["DEFAULT"] = {
        "norm": "l2",
        "seed": 0,
        "logdir": "",
        "loglevel": "INFO"
    }
    c["TOLERANCES"] = {
        "fix_tol": 1e-8,
        "branch_tol": 1e-6,
        "proj_tol": 1e-10,
        "hull_tol": 1e-9,
        "cauchy_tol": 1e-8,
        "max_iter": 10000,
        "proj_max_iter": 100000
    }
    c["SAMPLING"] = {
        "pairs": 500,
        "samples": 24,
        "trial_budget": 100,
        "approx_subdiv": 16
    }
    if path is not None:
        if not c.read(path):
            raise ValueError(f"Unable to read configuration file {path}")
    return c


@dataclass(frozen=True)
class Tolerances:
    fix_tol: float = 1e-8
    branch_tol: float = 1e-6
    proj_tol: float = 1e-10
    hull_tol: float = 1e-9
    cauchy_tol: float = 1e-8
    max_iter: int = 10000
    proj_max_iter: int = 100000

    def __post_init__(self):
        for name in ("fix_tol", "branch_tol", "proj_tol", "hull_tol", "cauchy_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"Tolerance {name} should be positive")
        if self.max_iter < 1 or self.proj_max_iter < 1:
            raise ValueError("Iteration caps should be positive")

    @classmethod
    def from_section(cls, section: SectionProxy, **overrides) -> 'Tolerances':
        values = {
            "fix_tol": section.getfloat("fix_tol"),
            "branch_tol": section.getfloat("branch_tol"),
            "proj_tol": section.getfloat("proj_tol"),
            "hull_tol": section.getfloat("hull_tol"),
            "cauchy_tol": section.getfloat("cauchy_tol"),
            "max_iter": section.getint("max_iter"),
            "proj_max_iter": section.getint("proj_max_iter"),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)
