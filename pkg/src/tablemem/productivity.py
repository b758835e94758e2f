"""Message entropy and the decision-productivity curve.

Shannon entropy of a discrete message distribution, and a gaussian
profile mapping an environment's entropy (in bits) to how much
communicating and deciding pays off there.  Both are pure functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["shannon_entropy", "TauProfile", "tau"]

_SUM_TOLERANCE = 1e-9


def shannon_entropy(probabilities) -> float:
    """Average message length, in bits, of a discrete distribution.

    ``-sum(p * log2(p))`` with the ``0 * log2(0) = 0`` convention.  The
    probabilities must each lie in [0, 1] and sum to 1 within 1e-9.
    """
    p = np.asarray(probabilities, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise ValueError(f"need a non-empty 1-D probability vector, got shape {p.shape}")
    if not np.isfinite(p).all() or (p < 0.0).any() or (p > 1.0).any():
        raise ValueError("probabilities must lie in [0, 1]")
    total = float(p.sum())
    if abs(total - 1.0) > _SUM_TOLERANCE:
        raise ValueError(f"probabilities sum to {total!r}, expected 1 within {_SUM_TOLERANCE}")
    nonzero = p[p > 0.0]
    return float(-(nonzero * np.log2(nonzero)).sum()) + 0.0


@dataclass(frozen=True)
class TauProfile:
    """Gaussian productivity profile: peak value, optimal entropy, width."""

    peak: float
    optimal_entropy: float
    width: float

    def __post_init__(self):
        if not (math.isfinite(self.peak) and self.peak > 0):
            raise ValueError(f"peak must be positive, got {self.peak!r}")
        if not (math.isfinite(self.width) and self.width > 0):
            raise ValueError(f"width must be positive, got {self.width!r}")
        if not (math.isfinite(self.optimal_entropy) and self.optimal_entropy >= 0):
            raise ValueError(f"optimal entropy must be >= 0, got {self.optimal_entropy!r}")


def tau(profile: TauProfile, entropy_bits: float) -> float:
    """Potential productivity at the given entropy.

    ``peak * exp(-(s - s_opt)^2 / (2 width^2))``: maximal exactly at the
    optimal entropy and symmetric around it.  Entropies are non-negative
    in intended use, but the curve is evaluated wherever asked.
    """
    z = (entropy_bits - profile.optimal_entropy) / profile.width
    return profile.peak * math.exp(-0.5 * z * z)
