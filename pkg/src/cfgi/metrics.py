"""Figures of merit for the counterfactual protocol against standard ghost
imaging: detector contrast, SNR factors, equal-dose SNR ratio, visibility.

All quantities derive from the engine's blocked/open fate probabilities.
``reassign_dl`` relabels discard-port clicks as open-channel clicks before
any differencing; it changes what the detectors report, never what the
object absorbs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .engine import (
    IDEAL_LOSSES,
    ComponentLosses,
    OutcomeDistribution,
    ProtocolParams,
    run_protocol,
)
from .polarization import Transmittance

__all__ = [
    "UndefinedMetricError",
    "DetectorDeltas",
    "MetricPoint",
    "NOISE_MODELS",
    "BENCHMARK_INTERACTION_PROBABILITY",
    "BENCHMARK_MAX_VISIBILITY",
    "BENCHMARK_SNR_INT_RATIO",
    "snr_gi",
    "detector_deltas",
    "snr_cgi_factor",
    "snr_int_ratio",
    "visibility",
    "blocked_error_probability",
    "metric_point",
    "sweep_metrics",
]

# Published comparison constants for the interaction-free ghost imaging
# protocol of Zhang, Y. et al., Opt. Express 27, 2212-2224 (2019): its
# photon-object interaction probability, its maximal visibility, and its
# equal-absorption SNR ratio over standard ghost imaging. Stored, not
# recomputed; that protocol is out of scope here.
BENCHMARK_INTERACTION_PROBABILITY = 0.735
BENCHMARK_MAX_VISIBILITY = 0.5625
BENCHMARK_SNR_INT_RATIO = 1.18

NOISE_MODELS = ("poisson-sum", "binomial")


class UndefinedMetricError(ValueError):
    """Raised when a metric's denominator is degenerate (all-zero counts)."""


@dataclass(frozen=True)
class DetectorDeltas:
    """Signed per-photon click-probability differences, blocked minus open."""

    dp_d0: float
    dp_d1: float

    @property
    def contrast(self) -> float:
        return abs(self.dp_d0 - self.dp_d1)


@dataclass(frozen=True)
class MetricPoint:
    """All sweep metrics for one (outer_cycles, inner_cycles) grid point."""

    outer_cycles: int
    inner_cycles: int
    p_int: float
    p_d0_err: float
    snr_cgi_factor: float
    snr_int_ratio: float
    visibility: float


def snr_gi(n_bar: float) -> float:
    """SNR of standard ghost imaging on an opaque pixel: sqrt(n_bar)."""
    n_bar = float(n_bar)
    if not math.isfinite(n_bar) or n_bar <= 0.0:
        raise ValueError(f"n_bar must be a positive finite number, got {n_bar!r}")
    return math.sqrt(n_bar)


def _blocked_open(params: ProtocolParams) -> tuple[OutcomeDistribution, OutcomeDistribution]:
    return (run_protocol(params, Transmittance.blocked()),
            run_protocol(params, Transmittance.open_channel()))


def _click_probs(params: ProtocolParams, reassign_dl: bool) -> tuple[float, float, float, float]:
    # Returns (q0_blocked, q0_open, q1_blocked, q1_open) where q0 is the
    # open-signal channel, with discard clicks folded in when reassigning.
    blocked, open_ = _blocked_open(params)
    q0b = blocked.p_d0 + (blocked.p_dl if reassign_dl else 0.0)
    q0o = open_.p_d0 + (open_.p_dl if reassign_dl else 0.0)
    return q0b, q0o, blocked.p_d1, open_.p_d1


def detector_deltas(params: ProtocolParams, reassign_dl: bool = False) -> DetectorDeltas:
    """Blocked-minus-open click-probability differences for both channels."""
    q0b, q0o, q1b, q1o = _click_probs(params, reassign_dl)
    return DetectorDeltas(dp_d0=q0b - q0o, dp_d1=q1b - q1o)


def snr_cgi_factor(
    params: ProtocolParams,
    reassign_dl: bool = False,
    noise_model: str = "poisson-sum",
) -> float:
    """Per-sqrt(photon) SNR factor of the subtraction image.

    Signal is |dp_d0 - dp_d1|. The default noise model treats the four
    contributing count streams (each channel, each condition) as
    independent Poisson variables, so the noise is sqrt of the summed
    click probabilities. The 'binomial' alternative uses sum of p(1-p)
    variances instead; it is provided for comparison, not as the default.
    """
    if noise_model not in NOISE_MODELS:
        raise ValueError(f"noise_model must be one of {NOISE_MODELS}, got {noise_model!r}")
    q0b, q0o, q1b, q1o = _click_probs(params, reassign_dl)
    signal = abs((q0b - q0o) - (q1b - q1o))
    if noise_model == "poisson-sum":
        variance = q0b + q0o + q1b + q1o
    else:
        variance = sum(q * (1.0 - q) for q in (q0b, q0o, q1b, q1o))
    if variance <= 0.0:
        raise UndefinedMetricError(
            "all four click probabilities are zero; SNR factor is undefined")
    return signal / math.sqrt(variance)


def snr_int_ratio(
    params: ProtocolParams,
    reassign_dl: bool = False,
    noise_model: str = "poisson-sum",
) -> float:
    """SNR multiple over standard ghost imaging at equal absorbed dose.

    Returns snr_cgi_factor / sqrt(p_int) where p_int is the blocked-object
    absorption probability. When p_int is zero the ratio diverges and
    math.inf is returned.
    """
    factor = snr_cgi_factor(params, reassign_dl, noise_model)
    p_int = run_protocol(params, Transmittance.blocked()).p_object
    if p_int <= 0.0:
        return math.inf
    return factor / math.sqrt(p_int)


def visibility(params: ProtocolParams, reassign_dl: bool = False) -> float:
    """Image visibility |dp_d0 - dp_d1| / 2, in [0, 1]."""
    return detector_deltas(params, reassign_dl).contrast / 2.0


def blocked_error_probability(params: ProtocolParams, reassign_dl: bool = False) -> float:
    """Probability a blocked pixel still produces an open-signal click."""
    blocked = run_protocol(params, Transmittance.blocked())
    return blocked.p_d0 + (blocked.p_dl if reassign_dl else 0.0)


def metric_point(
    params: ProtocolParams,
    reassign_dl: bool = False,
    noise_model: str = "poisson-sum",
) -> MetricPoint:
    """Evaluate every sweep metric at one grid point."""
    return MetricPoint(
        outer_cycles=params.outer_cycles,
        inner_cycles=params.inner_cycles,
        p_int=run_protocol(params, Transmittance.blocked()).p_object,
        p_d0_err=blocked_error_probability(params, reassign_dl),
        snr_cgi_factor=snr_cgi_factor(params, reassign_dl, noise_model),
        snr_int_ratio=snr_int_ratio(params, reassign_dl, noise_model),
        visibility=visibility(params, reassign_dl),
    )


def sweep_metrics(
    outer_values: Iterable[int],
    inner_values: Iterable[int],
    losses: ComponentLosses = IDEAL_LOSSES,
    reassign_dl: bool = False,
    noise_model: str = "poisson-sum",
) -> list[MetricPoint]:
    """Metric grid over outer_values x inner_values, outer-major order."""
    outer: Sequence[int] = list(outer_values)
    inner: Sequence[int] = list(inner_values)
    if not outer or not inner:
        raise ValueError("sweep ranges must be non-empty")
    points = []
    for m in outer:
        for n in inner:
            params = ProtocolParams(outer_cycles=m, inner_cycles=n, losses=losses)
            points.append(metric_point(params, reassign_dl, noise_model))
    return points
