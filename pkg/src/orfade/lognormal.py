"""Algebra of log-normal random variables parameterized in the dB domain.

A positive variate h is log-normal here when X = 10*log10(h) is Gaussian;
every distribution is carried as the mean and standard deviation of X, in
dB. This keeps channel-gain algebra (squares, reciprocals, constant gains)
linear in the parameters. Conversions to the natural-log domain use
lam = ln(10)/10, so that h = 10**(X/10) = exp(lam*X).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc, logsumexp

# dB exponent -> natural log, and its inverse (xi appears in the pdf).
LAMBDA = math.log(10.0) / 10.0
XI = 10.0 / math.log(10.0)

_SQRT2 = math.sqrt(2.0)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class LogNormalDB:
    """Distribution of a positive variate whose dB value is Gaussian.

    mu_db and sigma_db are the mean and standard deviation of 10*log10 of
    the variate. sigma_db == 0 denotes the degenerate point mass at
    10**(mu_db/10); cdf() handles it as a step, pdf() rejects it.
    """

    mu_db: float
    sigma_db: float

    def __post_init__(self):
        if not (math.isfinite(self.mu_db) and math.isfinite(self.sigma_db)):
            raise ValueError("LogNormalDB parameters must be finite")
        if self.sigma_db < 0:
            raise ValueError("sigma_db must be >= 0")


@dataclass(frozen=True)
class WilkinsonFit:
    """Log-normal fitted to a sum of log-normals by matching two moments.

    u1 and u2 are the first and second raw moments of the sum in the
    linear domain. They may overflow to inf for extreme dB parameters; the
    fit itself is computed in the log domain and stays finite. degenerate
    marks fits where roundoff produced a slightly negative log-variance
    that was clamped to zero.
    """

    result: LogNormalDB
    u1: float
    u2: float
    degenerate: bool = False


def gaussian_q(x):
    """Upper-tail probability Q(x) of the standard normal distribution.

    Accepts a scalar or ndarray. Evaluated through the complementary
    error function. At the representability limits of double precision the
    result saturates: exactly 1.0 below x of about -8.3 (1 - Q is smaller
    than half an ulp of 1) and 0.0 beyond x of about 38 (underflow).
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("gaussian_q requires finite input")
    q = 0.5 * erfc(arr / _SQRT2)
    return float(q) if arr.ndim == 0 else q


def scale(v: LogNormalDB, m: float) -> LogNormalDB:
    """Distribution of m*h for a positive constant m (shifts the dB mean)."""
    if not (m > 0 and math.isfinite(m)):
        raise ValueError("scale factor must be positive and finite")
    return LogNormalDB(v.mu_db + 10.0 * math.log10(m), v.sigma_db)


def reciprocal(v: LogNormalDB) -> LogNormalDB:
    """Distribution of 1/h (negates the dB mean); an exact involution."""
    return LogNormalDB(-v.mu_db, v.sigma_db)


def square(v: LogNormalDB) -> LogNormalDB:
    """Distribution of h**2 (doubles both dB parameters)."""
    return LogNormalDB(2.0 * v.mu_db, 2.0 * v.sigma_db)


def cdf(v: LogNormalDB, x):
    """P(h <= x) for x > 0, evaluated through the Gaussian tail function.

    For sigma_db == 0 the variate is deterministic and the CDF is a step
    at the dB median.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise ValueError("cdf requires finite x > 0")
    x_db = 10.0 * np.log10(arr)
    if v.sigma_db == 0.0:
        out = np.where(x_db < v.mu_db, 0.0, 1.0)
        return float(out) if arr.ndim == 0 else out
    return gaussian_q((v.mu_db - x_db) / v.sigma_db)


def pdf(v: LogNormalDB, x):
    """Density at x > 0; requires sigma_db > 0.

    f(x) = xi / (sqrt(2*pi) * sigma_db * x) * exp(-(10*log10(x) - mu_db)**2
    / (2*sigma_db**2)) with xi = 10/ln(10).
    """
    if v.sigma_db == 0.0:
        raise ValueError("pdf undefined for a degenerate (sigma_db == 0) variate")
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise ValueError("pdf requires finite x > 0")
    z = (10.0 * np.log10(arr) - v.mu_db) / v.sigma_db
    out = XI / (_SQRT_2PI * v.sigma_db * arr) * np.exp(-0.5 * z * z)
    return float(out) if arr.ndim == 0 else out


def moments(v: LogNormalDB) -> tuple[float, float]:
    """Linear-domain (mean, variance) of the variate.

    mean = exp(lam*mu_db + (lam*sigma_db)**2 / 2) and
    variance = mean**2 * (exp((lam*sigma_db)**2) - 1), lam = ln(10)/10.
    """
    s2 = (LAMBDA * v.sigma_db) ** 2
    mean = math.exp(LAMBDA * v.mu_db + 0.5 * s2)
    var = mean * mean * math.expm1(s2)
    return mean, var


def fit_from_moments(mean: float, variance: float) -> LogNormalDB:
    """Log-normal matching the given linear-domain mean and variance.

    Inverse of moments(): with psi = 1 + variance/mean**2,
    sigma_db = sqrt(ln(psi))/lam and mu_db = 10*log10(mean) - 5*log10(psi).
    """
    if not (mean > 0 and math.isfinite(mean)):
        raise ValueError("mean must be positive and finite")
    if not (variance >= 0 and math.isfinite(variance)):
        raise ValueError("variance must be >= 0 and finite")
    ln_psi = math.log1p(variance / (mean * mean))
    sigma_db = math.sqrt(ln_psi) / LAMBDA
    mu_db = 10.0 * math.log10(mean) - 5.0 * ln_psi / math.log(10.0)
    return LogNormalDB(mu_db, sigma_db)


def wilkinson_sum(components, correlations=None) -> WilkinsonFit:
    """Fit one log-normal to a sum of (possibly correlated) log-normals.

    Matches the first two raw moments of sum(h_i):

        u1 = sum_i exp(a_i + s_i**2/2)
        u2 = sum_i exp(2*a_i + 2*s_i**2)
           + 2 * sum_{i<j} exp(a_i + a_j
                               + (s_i**2 + s_j**2 + 2*r_ij*s_i*s_j)/2)

    with a = lam*mu_db and s = lam*sigma_db, then inverts
    mu_db = (2*ln(u1) - ln(u2)/2)/lam, sigma_db = sqrt(ln(u2) - 2*ln(u1))/lam.

    correlations is the matrix of correlation coefficients r_ij between the
    Gaussian exponents (identity when omitted). All exponentials are
    combined with log-sum-exp so parameters far outside practical dB ranges
    do not overflow.
    """
    comps = list(components)
    if not comps:
        raise ValueError("wilkinson_sum requires at least one component")
    n = len(comps)
    if correlations is None:
        r = np.eye(n)
    else:
        r = np.asarray(correlations, dtype=float)
        if r.shape != (n, n):
            raise ValueError(f"correlation matrix must be {n}x{n}, got {r.shape}")
        if not np.allclose(r, r.T, rtol=0, atol=1e-12):
            raise ValueError("correlation matrix must be symmetric")
        if not np.allclose(np.diag(r), 1.0, rtol=0, atol=1e-12):
            raise ValueError("correlation matrix must have a unit diagonal")
        if np.any(np.abs(r) > 1 + 1e-12):
            raise ValueError("correlation coefficients must lie in [-1, 1]")

    a = LAMBDA * np.array([c.mu_db for c in comps])
    s = LAMBDA * np.array([c.sigma_db for c in comps])

    ln_u1 = logsumexp(a + 0.5 * s * s)
    iu, ju = np.triu_indices(n, k=1)
    diag_terms = 2.0 * a + 2.0 * s * s
    cross_terms = (
        math.log(2.0)
        + a[iu] + a[ju]
        + 0.5 * (s[iu] ** 2 + s[ju] ** 2 + 2.0 * r[iu, ju] * s[iu] * s[ju])
    )
    ln_u2 = logsumexp(np.concatenate([diag_terms, cross_terms]))

    spread = ln_u2 - 2.0 * ln_u1
    degenerate = bool(spread < 0.0)
    if degenerate:
        spread = 0.0
    mu_db = float((2.0 * ln_u1 - 0.5 * ln_u2) / LAMBDA)
    sigma_db = float(math.sqrt(spread) / LAMBDA)
    with np.errstate(over="ignore"):
        u1 = float(np.exp(ln_u1))
        u2 = float(np.exp(ln_u2))
    return WilkinsonFit(LogNormalDB(mu_db, sigma_db), u1, u2, degenerate)
