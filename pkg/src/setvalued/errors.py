#!/usr/bin/env python3.7
# -*- coding: utf-8 -*-
from typing import Optional


class DimensionMismatch(ValueError):
    def __init__(self, expected: int, got: int, what: str = "point") -> None:
        self.expected = expected
        self.got = got
        super().__init__(f"Dimension mismatch: {what} has dimension {got}, expected {expected}")


class ConvergenceError(RuntimeError):
    """
    Iterative kernel hit its iteration cap or the LP backend reported failure
    """


class CertificateError(RuntimeError):
    """
    Sampled certificate search ran below its numerical floor
    """


class StageFailure(RuntimeError):
    def __init__(self, stage: int, reason: str, gap: Optional[float] = None) -> None:
        self.stage = stage
        self.reason = reason
        self.gap = gap
        message = f"stage {stage}: {reason}"
        if gap is not None:
            message += f" (achieved gap {gap:.3e})"
        super().__init__(message)

    def to_json(self):
        return {"stage": self.stage, "reason": self.reason, "gap": self.gap}
