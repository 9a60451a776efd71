"""Per-trial effective SNRs and relay selection for both forwarding protocols."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channel import HopParams, error_variance


class DfTauMode(Enum):
    """How the estimation penalty scales the decode-and-forward hop SNR."""

    AS_WRITTEN = "as_written"   # penalty keeps the instantaneous |h_est|^2 factor
    NORMALIZED = "normalized"   # deterministic penalty rho^2 / (1 + eps)


class DfOutageMetric(Enum):
    """Which per-branch SNR decode-and-forward selection and outage use."""

    SELECTION_SNR = "selection"   # min of the two estimated hop SNRs
    EFFECTIVE_SNR = "effective"   # min of the penalty-scaled hop SNRs


class AfSnrMode(Enum):
    """Amplify-and-forward destination SNR variant."""

    EXACT = "exact"            # keeps the error-product and unit noise terms
    SIMPLIFIED = "simplified"  # drops them; scaled harmonic-mean form


@dataclass(frozen=True)
class NetworkConfig:
    """Full scenario: branches, powers, noise, threshold and semantic modes.

    branches is an ordered sequence of (source-relay, relay-destination)
    HopParams pairs. Powers and noise are linear; gamma_th is the linear
    outage threshold (0 is accepted as the boundary case with zero outage).
    """

    branches: tuple[tuple[HopParams, HopParams], ...]
    p_s: float = 1.0
    p_r: float = 1.0
    n0: float = 1.0
    gamma_th: float = 3.0
    df_tau_mode: DfTauMode = DfTauMode.NORMALIZED
    df_outage_on: DfOutageMetric = DfOutageMetric.SELECTION_SNR
    af_snr_mode: AfSnrMode = AfSnrMode.SIMPLIFIED

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple(tuple(b) for b in self.branches))
        if len(self.branches) < 1:
            raise ValueError("at least one branch is required")
        for b in self.branches:
            if len(b) != 2:
                raise ValueError("each branch must be a (sr, rd) pair of HopParams")
        for name in ("p_s", "p_r", "n0"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite")
        if not (self.gamma_th >= 0 and math.isfinite(self.gamma_th)):
            raise ValueError("gamma_th must be >= 0 and finite")

    @property
    def n_branches(self) -> int:
        return len(self.branches)


@dataclass(frozen=True)
class EffectiveSnrTerms:
    """Error powers, penalty factors and estimated SNRs of one branch.

    eps_* are the transmit-normalized error powers P*var(e)/N0. lambda_*
    weight the opposite hop's error in the amplify-and-forward denominator
    and are always >= 1.
    """

    eps_sr: float
    eps_rd: float
    lambda_sr: float
    lambda_rd: float
    gamma_sr_hat: float
    gamma_rd_hat: float


def branch_error_terms(sr: HopParams, rd: HopParams, p_s, p_r, n0):
    """(eps_sr, eps_rd, lambda_sr, lambda_rd) for one branch."""
    eps_sr = p_s * error_variance(sr) / n0
    eps_rd = p_r * error_variance(rd) / n0
    lam_sr = 1.0 + sr.rho**2 * eps_rd
    lam_rd = 1.0 + rd.rho**2 * eps_sr
    return eps_sr, eps_rd, lam_sr, lam_rd


def effective_terms(draws, cfg: NetworkConfig, branch_index: int) -> EffectiveSnrTerms:
    """Per-draw EffectiveSnrTerms for one branch."""
    sr, rd = cfg.branches[branch_index]
    sr_draw, rd_draw = draws
    eps_sr, eps_rd, lam_sr, lam_rd = branch_error_terms(sr, rd, cfg.p_s, cfg.p_r, cfg.n0)
    return EffectiveSnrTerms(
        eps_sr, eps_rd, lam_sr, lam_rd,
        cfg.p_s * abs(sr_draw.h_est) ** 2 / cfg.n0,
        cfg.p_r * abs(rd_draw.h_est) ** 2 / cfg.n0,
    )


def df_metrics_arrays(g_sr, g_rd, h2_sr, h2_rd, sr, rd, cfg):
    """(selection, effective) SNR arrays for one decode-and-forward branch.

    selection is min of the estimated hop SNRs; effective applies the
    estimation penalty tau per hop before taking the min.
    """
    eps_sr = cfg.p_s * error_variance(sr) / cfg.n0
    eps_rd = cfg.p_r * error_variance(rd) / cfg.n0
    selection = np.minimum(g_sr, g_rd)
    if cfg.df_tau_mode is DfTauMode.AS_WRITTEN:
        tau_sr = sr.rho**2 * h2_sr / (1.0 + eps_sr)
        tau_rd = rd.rho**2 * h2_rd / (1.0 + eps_rd)
    else:
        tau_sr = sr.rho**2 / (1.0 + eps_sr)
        tau_rd = rd.rho**2 / (1.0 + eps_rd)
    effective = np.minimum(tau_sr * g_sr, tau_rd * g_rd)
    return selection, effective


def af_metric_arrays(g_sr, g_rd, sr, rd, cfg, mode=None):
    """Destination SNR array for one amplify-and-forward branch.

    The simplified form is rho_sr^2 rho_rd^2 g_sr g_rd /
    (lambda_sr g_sr + lambda_rd g_rd); the exact form keeps the
    eps_sr*eps_rd + 1 term in the denominator and is therefore never
    larger.
    """
    mode = cfg.af_snr_mode if mode is None else mode
    eps_sr, eps_rd, lam_sr, lam_rd = branch_error_terms(sr, rd, cfg.p_s, cfg.p_r, cfg.n0)
    num = sr.rho**2 * rd.rho**2 * g_sr * g_rd
    den = lam_sr * g_sr + lam_rd * g_rd
    if mode is AfSnrMode.EXACT:
        return num / (den + eps_sr * eps_rd + 1.0)
    return np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), 0.0)


def df_branch_snrs(draws, cfg: NetworkConfig, branch_index: int) -> tuple[float, float]:
    """(selection_snr, effective_snr) for one branch from a pair of draws."""
    sr, rd = cfg.branches[branch_index]
    sr_draw, rd_draw = draws
    h2_sr = abs(sr_draw.h_est) ** 2
    h2_rd = abs(rd_draw.h_est) ** 2
    g_sr = cfg.p_s * h2_sr / cfg.n0
    g_rd = cfg.p_r * h2_rd / cfg.n0
    sel, eff = df_metrics_arrays(
        np.asarray(g_sr), np.asarray(g_rd), np.asarray(h2_sr), np.asarray(h2_rd),
        sr, rd, cfg)
    return float(sel), float(eff)


def af_effective_snr(draws, cfg: NetworkConfig, branch_index: int, mode=None) -> float:
    """Amplify-and-forward destination SNR for one branch from a pair of draws."""
    sr, rd = cfg.branches[branch_index]
    sr_draw, rd_draw = draws
    g_sr = cfg.p_s * abs(sr_draw.h_est) ** 2 / cfg.n0
    g_rd = cfg.p_r * abs(rd_draw.h_est) ** 2 / cfg.n0
    return float(af_metric_arrays(np.asarray(g_sr), np.asarray(g_rd), sr, rd, cfg, mode))


def select_best(values) -> tuple[int, float]:
    """Index and value of the largest entry; ties go to the lowest index."""
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        raise ValueError("select_best requires a nonempty sequence")
    idx = int(np.argmax(arr))
    return idx, float(arr[idx])
