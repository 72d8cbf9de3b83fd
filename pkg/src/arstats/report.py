"""Residual summaries for identity checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one numerical identity check.

    ``residual`` is the max absolute entry over every checked identity and
    ``passed`` is exactly ``residual <= tolerance``.
    """

    identity: str
    residual: float
    mean_residual: float
    tolerance: float
    mask: str
    params: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)

    def as_dict(self) -> dict[str, Any]:
        return {
            "identity": self.identity,
            "passed": self.passed,
            "residual": self.residual,
            "mean_residual": self.mean_residual,
            "tolerance": self.tolerance,
            "mask": self.mask,
            "params": self.params,
            "details": self.details,
        }

    @classmethod
    def from_residuals(
        cls,
        identity: str,
        residuals: Sequence[float],
        tolerance: float,
        mask: str,
        params: dict | None = None,
        details: dict | None = None,
    ) -> "VerificationReport":
        res = np.asarray(residuals, dtype=float)
        worst = float(res.max()) if res.size else 0.0
        mean = float(res.mean()) if res.size else 0.0
        return cls(identity, worst, mean, float(tolerance), mask, params or {}, details or {})
