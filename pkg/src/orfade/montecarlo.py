"""Seeded Monte Carlo outage estimation with worker-independent results.

Trials are organized in fixed blocks of BLOCK_TRIALS. Block b of a run
draws from a fresh philox stream keyed by (seed, b), and within a block
the draw order is fixed (branch by branch, source-relay hop before
relay-destination hop). Outage counts merge by integer addition, so an
estimate is bit-identical for given (config, protocol, sampling, trials,
seed) no matter how many workers execute the blocks.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from . import analytic
from .channel import SamplingMode, sample_hop_arrays
from .snr import DfOutageMetric, NetworkConfig, af_metric_arrays, df_metrics_arrays

BLOCK_TRIALS = 1 << 16
WORKERS_ENV = "ORFADE_WORKERS"
WILSON_Z95 = 1.959963984540054

AXES = ("power_db", "rho", "gamma_th", "L")


def generator_id() -> str:
    """Identifier of the RNG scheme recorded in output metadata."""
    return f"philox4x64 keyed (seed, block), block={BLOCK_TRIALS} (numpy {np.__version__})"


class Protocol(Enum):
    DF = "df"
    AF = "af"


@dataclass(frozen=True)
class McResult:
    """Estimated outage probability with a 95% Wilson confidence interval.

    low_confidence flags estimates built on fewer than 20 outage events.
    """

    p_hat: float
    trials: int
    ci_low: float
    ci_high: float
    outage_count: int
    low_confidence: bool


@dataclass(frozen=True)
class CurvePoint:
    """One sweep point: axis coordinate, closed form, and MC estimate."""

    axis_value: float
    pout_analytic: float | None
    mc: McResult | None


@dataclass
class OutageCurve:
    """Sweep result: sorted points, per-point errors, and run metadata."""

    axis: str
    points: list[CurvePoint]
    errors: list[dict]
    metadata: dict


def wilson_interval(count: int, trials: int, z: float = WILSON_Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion (robust at 0 counts)."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= count <= trials:
        raise ValueError("count must lie in [0, trials]")
    p = count / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2.0 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials)) / denom
    # rounding must not push the interval off the point estimate
    return min(max(0.0, center - half), p), max(min(1.0, center + half), p)


def point_seed(seed: int, index: int) -> int:
    """Seed of sweep point `index`, derived from the master seed.

    Exposed so a single point of a sweep can be reproduced with
    estimate_outage directly.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, np.uint64)[0])


def _worker_count(n_blocks: int) -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        workers = int(env)
        if workers < 1:
            raise ValueError(f"{WORKERS_ENV} must be >= 1")
    else:
        workers = os.cpu_count() or 1
    return max(1, min(workers, n_blocks))


def _block_rng(seed: int, block: int):
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(block),))
    return np.random.Generator(np.random.Philox(ss))


def _block_outages(cfg, protocol, sampling, seed, block, take):
    rng = _block_rng(seed, block)
    best = None
    for sr, rd in cfg.branches:
        _, he_sr, _ = sample_hop_arrays(sr, sampling, rng, BLOCK_TRIALS)
        _, he_rd, _ = sample_hop_arrays(rd, sampling, rng, BLOCK_TRIALS)
        h2_sr = he_sr.real**2 + he_sr.imag**2
        h2_rd = he_rd.real**2 + he_rd.imag**2
        g_sr = cfg.p_s * h2_sr / cfg.n0
        g_rd = cfg.p_r * h2_rd / cfg.n0
        if protocol is Protocol.DF:
            selection, effective = df_metrics_arrays(g_sr, g_rd, h2_sr, h2_rd, sr, rd, cfg)
            metric = (selection if cfg.df_outage_on is DfOutageMetric.SELECTION_SNR
                      else effective)
        else:
            metric = af_metric_arrays(g_sr, g_rd, sr, rd, cfg)
        best = metric if best is None else np.maximum(best, metric)
    return int(np.count_nonzero(best[:take] <= cfg.gamma_th))


def estimate_outage(cfg: NetworkConfig, protocol: Protocol,
                    sampling: SamplingMode = SamplingMode.TRUE_LOGNORMAL,
                    trials: int = 1_000_000, seed: int = 0) -> McResult:
    """Estimate the network outage probability over seeded trials.

    Per trial, every branch metric (decode-and-forward selection or
    effective SNR, or the amplify-and-forward destination SNR, per the
    config modes) is computed, the best branch selected, and an outage
    counted when the selected value is <= gamma_th.
    """
    trials = int(trials)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= int(seed) < 2**64:
        raise ValueError("seed must fit in an unsigned 64-bit integer")
    n_blocks = -(-trials // BLOCK_TRIALS)

    def run(block):
        take = min(BLOCK_TRIALS, trials - block * BLOCK_TRIALS)
        return _block_outages(cfg, protocol, sampling, seed, block, take)

    workers = _worker_count(n_blocks)
    if workers == 1:
        counts = [run(b) for b in range(n_blocks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(run, range(n_blocks)))
    outages = int(sum(counts))
    ci_low, ci_high = wilson_interval(outages, trials)
    return McResult(outages / trials, trials, ci_low, ci_high, outages, outages < 20)


def config_at(cfg: NetworkConfig, axis: str, value) -> NetworkConfig:
    """Scenario configuration with one sweep-axis coordinate applied.

    power_db sets P_s/N0 in dB and scales P_r to keep the configured
    power ratio; rho applies to every hop; L cycles the branch list.
    """
    if axis == "power_db":
        p_s = cfg.n0 * 10.0 ** (float(value) / 10.0)
        return replace(cfg, p_s=p_s, p_r=p_s * (cfg.p_r / cfg.p_s))
    if axis == "rho":
        branches = tuple(
            (replace(sr, rho=float(value)), replace(rd, rho=float(value)))
            for sr, rd in cfg.branches)
        return replace(cfg, branches=branches)
    if axis == "gamma_th":
        return replace(cfg, gamma_th=float(value))
    if axis == "L":
        count = int(value)
        if count != value:
            raise ValueError("L axis values must be integers")
        if count < 1:
            raise ValueError("L must be >= 1")
        base = cfg.branches
        return replace(cfg, branches=tuple(base[i % len(base)] for i in range(count)))
    raise ValueError(f"unknown sweep axis: {axis!r} (choose from {AXES})")


def analytic_outage(cfg: NetworkConfig, protocol: Protocol) -> float:
    """Closed-form outage for the given protocol."""
    return analytic.df_outage(cfg) if protocol is Protocol.DF else analytic.af_outage(cfg)


def sweep(cfg: NetworkConfig, protocol: Protocol, axis: str, points,
          trials: int = 1_000_000, seed: int = 0,
          sampling: SamplingMode = SamplingMode.TRUE_LOGNORMAL,
          run_analytic: bool = True, run_mc: bool = True) -> OutageCurve:
    """Evaluate analytic and Monte Carlo outage along one axis.

    Points are canonicalized ascending; point i derives its seed from
    (seed, i), so curves are reproducible point by point and independent
    of evaluation order. A point whose value is invalid for the axis is
    recorded under errors and skipped.
    """
    pts = sorted(float(v) for v in points)
    if not pts:
        raise ValueError("sweep requires at least one point")
    curve = OutageCurve(
        axis=axis, points=[], errors=[],
        metadata={
            "protocol": protocol.value,
            "sampling": sampling.value,
            "modes": {
                "df_tau_mode": cfg.df_tau_mode.value,
                "df_outage_on": cfg.df_outage_on.value,
                "af_snr_mode": cfg.af_snr_mode.value,
            },
            "axis": axis,
            "seed": int(seed),
            "trials": int(trials),
            "generator": generator_id(),
        },
    )
    for i, value in enumerate(pts):
        try:
            cfg_i = config_at(cfg, axis, value)
            pout = analytic_outage(cfg_i, protocol) if run_analytic else None
            mc = (estimate_outage(cfg_i, protocol, sampling, trials, point_seed(seed, i))
                  if run_mc else None)
        except ValueError as err:
            curve.errors.append({"axis_value": value, "error": str(err)})
            continue
        curve.points.append(CurvePoint(value, pout, mc))
    return curve
