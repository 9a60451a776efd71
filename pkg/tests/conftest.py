import numpy as np


def ks_distance(fitted_cdf, samples):
    """Two-sided KS statistic between a CDF callable and sample array."""
    s = np.sort(np.asarray(samples))
    n = s.size
    f = fitted_cdf(s)
    hi = np.arange(1, n + 1) / n
    lo = np.arange(0, n) / n
    return float(max(np.max(np.abs(f - hi)), np.max(np.abs(f - lo))))


def db_lognormal_samples(rng, mu_db, sigma_db, n):
    """Draw h = 10**(X/10) with X ~ Normal(mu_db, sigma_db**2)."""
    return 10.0 ** (rng.normal(mu_db, sigma_db, n) / 10.0)
