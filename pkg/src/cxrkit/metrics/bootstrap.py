"""Percentile-bootstrap confidence intervals for per-item score means."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_RESAMPLES = 1000


@dataclass(frozen=True)
class CIResult:
    point: float
    lo: float
    hi: float
    resamples: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "point": self.point,
            "lo": self.lo,
            "hi": self.hi,
            "resamples": self.resamples,
            "seed": self.seed,
        }


def mean_ci(values, resamples: int = DEFAULT_RESAMPLES, seed: int = 0) -> CIResult:
    """Mean with a 95% percentile-bootstrap interval (resampling with replacement)."""
    arr = np.asarray(list(values), dtype=np.float64)
    if arr.size == 0:
        raise ValueError("mean_ci: empty input")
    if resamples < 1:
        raise ValueError("mean_ci: resamples must be >= 1")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, arr.size, size=(resamples, arr.size))
    means = arr[idx].mean(axis=1)
    lo, hi = np.percentile(means, [2.5, 97.5])
    point = float(arr.mean())
    # percentile endpoints bracket the sample mean in all but degenerate draws
    lo = min(float(lo), point)
    hi = max(float(hi), point)
    return CIResult(point=point, lo=lo, hi=hi, resamples=resamples, seed=seed)


def accuracy_ci(correct_flags, resamples: int = DEFAULT_RESAMPLES, seed: int = 0) -> CIResult:
    """Bootstrap CI over boolean correctness flags."""
    flags = [bool(f) for f in correct_flags]
    if not flags:
        raise ValueError("accuracy_ci: empty input")
    return mean_ci([1.0 if f else 0.0 for f in flags], resamples=resamples, seed=seed)
