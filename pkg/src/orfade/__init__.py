"""Outage analysis of opportunistic (best-relay) two-hop networks over
log-normal shadow fading with imperfect channel estimation.

Closed-form engine: dB-domain log-normal algebra plus the Wilkinson
moment-matched sum. Empirical engine: a seeded, worker-independent Monte
Carlo over the same per-trial SNR semantics. The cli module ties both to
scenario files and curve exports.
"""

__version__ = "0.1.0"

from .lognormal import (
    LAMBDA,
    XI,
    LogNormalDB,
    WilkinsonFit,
    cdf,
    fit_from_moments,
    gaussian_q,
    moments,
    pdf,
    reciprocal,
    scale,
    square,
    wilkinson_sum,
)
from .channel import (
    HopDraw,
    HopParams,
    SamplingMode,
    error_variance,
    sample_hop,
    sample_hop_arrays,
)
from .snr import (
    AfSnrMode,
    DfOutageMetric,
    DfTauMode,
    EffectiveSnrTerms,
    NetworkConfig,
    af_effective_snr,
    branch_error_terms,
    df_branch_snrs,
    effective_terms,
    select_best,
)
from .analytic import (
    BranchDistributions,
    af_branch_distribution,
    af_outage,
    branch_distributions,
    df_outage,
    hop_snr_distribution,
)
from .montecarlo import (
    BLOCK_TRIALS,
    CurvePoint,
    McResult,
    OutageCurve,
    Protocol,
    config_at,
    estimate_outage,
    point_seed,
    sweep,
    wilson_interval,
)
