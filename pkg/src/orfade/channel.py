"""Per-hop fading coefficients under a Gaussian channel-estimation error.

The true and estimated coefficients of a hop are tied by the linear model
h_true = rho * h_est + e, where e is a zero-mean circularly-symmetric
complex Gaussian error with variance (1 - rho) * var(h) and rho in (0, 1]
is the estimation correlation. Exactly one side of the identity is drawn
as the nominal log-normal variate; SamplingMode picks which.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import lognormal
from .lognormal import LogNormalDB


class SamplingMode(Enum):
    """Which coefficient is drawn as the exact log-normal variate."""

    EST_LOGNORMAL = "est_lognormal"    # estimate drawn log-normal, truth derived
    TRUE_LOGNORMAL = "true_lognormal"  # truth drawn log-normal, estimate derived


@dataclass(frozen=True)
class HopParams:
    """Fading and estimation-quality parameters of a single hop.

    mu_x_db and sigma_x_db describe the Gaussian dB exponent of the
    coefficient magnitude (|h| = 10**(X/10)); rho = 1 means perfect
    estimation.
    """

    mu_x_db: float
    sigma_x_db: float
    rho: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.mu_x_db) and math.isfinite(self.sigma_x_db)):
            raise ValueError("hop parameters must be finite")
        if self.sigma_x_db < 0:
            raise ValueError("sigma_x_db must be >= 0")
        if not (0.0 < self.rho <= 1.0):
            raise ValueError("rho must lie in (0, 1]")

    def magnitude_db(self) -> LogNormalDB:
        """Distribution of the coefficient magnitude."""
        return LogNormalDB(self.mu_x_db, self.sigma_x_db)


@dataclass(frozen=True)
class HopDraw:
    """One realization of (true, estimated, error) coefficients."""

    h_true: complex
    h_est: complex
    e: complex


def error_variance(hop: HopParams) -> float:
    """Estimation-error variance: (1 - rho) times the coefficient variance."""
    _, var = lognormal.moments(hop.magnitude_db())
    return (1.0 - hop.rho) * var


def sample_hop_arrays(hop, mode, rng, n):
    """Draw n realizations of a hop; returns (h_true, h_est, e) arrays.

    The per-hop draw order (dB exponent, phase, error real part, error
    imaginary part) is fixed and part of the reproducibility contract. In
    TRUE_LOGNORMAL mode the returned truth is recomputed as
    rho * h_est + e so the model identity holds bit-exactly (the recompute
    perturbs the drawn magnitude by at most one ulp).
    """
    x_db = rng.normal(hop.mu_x_db, hop.sigma_x_db, n)
    phase = rng.uniform(0.0, 2.0 * np.pi, n)
    e_re = rng.standard_normal(n)
    e_im = rng.standard_normal(n)
    e = (e_re + 1j * e_im) * math.sqrt(0.5 * error_variance(hop))
    coeff = 10.0 ** (x_db / 10.0) * np.exp(1j * phase)
    if mode is SamplingMode.EST_LOGNORMAL:
        h_est = coeff
    elif mode is SamplingMode.TRUE_LOGNORMAL:
        h_est = (coeff - e) / hop.rho
    else:
        raise ValueError(f"unknown sampling mode: {mode!r}")
    h_true = hop.rho * h_est + e
    return h_true, h_est, e


def sample_hop(hop: HopParams, mode: SamplingMode, rng) -> HopDraw:
    """Draw a single hop realization."""
    h_true, h_est, e = sample_hop_arrays(hop, mode, rng, 1)
    return HopDraw(complex(h_true[0]), complex(h_est[0]), complex(e[0]))
