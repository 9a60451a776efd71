"""Closed-form outage probabilities for best-relay selection.

Decode-and-forward uses the best-worst criterion: per branch the weaker
estimated hop SNR must clear the threshold. Amplify-and-forward uses the
best scaled-harmonic-mean criterion; its per-branch SNR distribution is
fitted through a Wilkinson sum of the penalty-weighted reciprocal hop
SNRs. Both network outages are independent-branch products of per-branch
CDFs, so they treat the estimated coefficients as exactly log-normal.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import lognormal
from .channel import HopParams
from .lognormal import LogNormalDB
from .snr import NetworkConfig, branch_error_terms


@dataclass(frozen=True)
class BranchDistributions:
    """Fitted SNR distributions of one branch."""

    gamma_sr: LogNormalDB
    gamma_rd: LogNormalDB
    af_effective: LogNormalDB


def hop_snr_distribution(hop: HopParams, power: float, n0: float) -> LogNormalDB:
    """Distribution of the estimated hop SNR power * |h_est|^2 / n0."""
    if not (power > 0 and n0 > 0):
        raise ValueError("power and n0 must be positive")
    return lognormal.scale(lognormal.square(hop.magnitude_db()), power / n0)


def af_branch_distribution(branch, cfg: NetworkConfig) -> LogNormalDB:
    """Fitted distribution of one branch's amplify-and-forward SNR.

    The penalty-weighted reciprocal hop SNRs 1/(lambda*gamma) are summed
    with the Wilkinson fit, inverted, and rescaled by
    rho_sr^2 rho_rd^2 / (lambda_sr lambda_rd).
    """
    sr, rd = branch
    _, _, lam_sr, lam_rd = branch_error_terms(sr, rd, cfg.p_s, cfg.p_r, cfg.n0)
    alpha = lognormal.reciprocal(
        lognormal.scale(lognormal.square(sr.magnitude_db()), cfg.p_s / cfg.n0 * lam_sr))
    beta = lognormal.reciprocal(
        lognormal.scale(lognormal.square(rd.magnitude_db()), cfg.p_r / cfg.n0 * lam_rd))
    chi = lognormal.wilkinson_sum([alpha, beta])
    gain = sr.rho**2 * rd.rho**2 / (lam_sr * lam_rd)
    return lognormal.scale(lognormal.reciprocal(chi.result), gain)


def branch_distributions(branch, cfg: NetworkConfig) -> BranchDistributions:
    """All fitted distributions of one branch."""
    sr, rd = branch
    return BranchDistributions(
        hop_snr_distribution(sr, cfg.p_s, cfg.n0),
        hop_snr_distribution(rd, cfg.p_r, cfg.n0),
        af_branch_distribution(branch, cfg),
    )


def df_outage(cfg: NetworkConfig) -> float:
    """Outage probability of best-worst decode-and-forward selection."""
    if cfg.gamma_th == 0.0:
        return 0.0
    p = 1.0
    for sr, rd in cfg.branches:
        q_sr = lognormal.cdf(hop_snr_distribution(sr, cfg.p_s, cfg.n0), cfg.gamma_th)
        q_rd = lognormal.cdf(hop_snr_distribution(rd, cfg.p_r, cfg.n0), cfg.gamma_th)
        p *= q_sr + q_rd - q_sr * q_rd
    return p


def af_outage(cfg: NetworkConfig) -> float:
    """Outage probability of best harmonic-mean amplify-and-forward selection."""
    if cfg.gamma_th == 0.0:
        return 0.0
    p = 1.0
    for branch in cfg.branches:
        p *= lognormal.cdf(af_branch_distribution(branch, cfg), cfg.gamma_th)
    return p
