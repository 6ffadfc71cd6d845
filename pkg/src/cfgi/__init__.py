"""Counterfactual ghost imaging simulator.

A nested polarization interferometer discriminates blocked from open object
pixels while keeping the probability of any photon being absorbed by the
object small. This package provides the exact fate-probability engine, the
detectability metrics comparing it against standard ghost imaging, a Monte
Carlo imaging pipeline, and an HTTP service plus CLI on top.
"""

__version__ = "0.1.0"

from .engine import (
    FATES,
    IDEAL_LOSSES,
    LOSS_PRESETS,
    REALISTIC_LOSSES,
    ComponentLosses,
    OutcomeDistribution,
    ProtocolParams,
    closed_form_p_d0_blocked,
    closed_form_p_dl_open,
    interaction_probability,
    run_inner_chain,
    run_protocol,
)
from .imaging import (
    CoincidenceCounts,
    ImageEstimate,
    Mask,
    SourceModel,
    compare_standard_gi,
    dose_map,
    reconstruct,
    simulate_exposure,
    standard_gi_dose_map,
)
from .metrics import (
    BENCHMARK_INTERACTION_PROBABILITY,
    BENCHMARK_MAX_VISIBILITY,
    BENCHMARK_SNR_INT_RATIO,
    DetectorDeltas,
    MetricPoint,
    UndefinedMetricError,
    detector_deltas,
    metric_point,
    snr_cgi_factor,
    snr_gi,
    snr_int_ratio,
    sweep_metrics,
    visibility,
)
from .polarization import (
    LossLedger,
    PolarizationAmplitude,
    Transmittance,
    attenuate_both,
    attenuate_component,
    rotate,
)

__all__ = [
    "__version__",
    "FATES",
    "IDEAL_LOSSES",
    "LOSS_PRESETS",
    "REALISTIC_LOSSES",
    "ComponentLosses",
    "OutcomeDistribution",
    "ProtocolParams",
    "closed_form_p_d0_blocked",
    "closed_form_p_dl_open",
    "interaction_probability",
    "run_inner_chain",
    "run_protocol",
    "CoincidenceCounts",
    "ImageEstimate",
    "Mask",
    "SourceModel",
    "compare_standard_gi",
    "dose_map",
    "reconstruct",
    "simulate_exposure",
    "standard_gi_dose_map",
    "BENCHMARK_INTERACTION_PROBABILITY",
    "BENCHMARK_MAX_VISIBILITY",
    "BENCHMARK_SNR_INT_RATIO",
    "DetectorDeltas",
    "MetricPoint",
    "UndefinedMetricError",
    "detector_deltas",
    "metric_point",
    "snr_cgi_factor",
    "snr_gi",
    "snr_int_ratio",
    "sweep_metrics",
    "visibility",
    "LossLedger",
    "PolarizationAmplitude",
    "Transmittance",
    "attenuate_both",
    "attenuate_component",
    "rotate",
]
