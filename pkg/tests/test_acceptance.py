"""Acceptance gate for the simulator.

One test per criterion, in order. Each prints a single [PASS]/[FAIL] line
with the measured values before asserting; run with `pytest -v -s
tests/test_acceptance.py` to see the lines on passing runs too.
"""

import cmath
import math

import numpy as np
import pytest

from cfgi.engine import (
    LOSS_PRESETS,
    ProtocolParams,
    closed_form_p_d0_blocked,
    closed_form_p_dl_open,
    interaction_probability,
    run_protocol,
)
from cfgi.imaging import (
    DOMAIN_COUNTERFACTUAL,
    Mask,
    SourceModel,
    pixel_stream,
    reconstruct,
    sample_fates,
    simulate_exposure,
    standard_gi_dose_map,
)
from cfgi.metrics import metric_point, snr_int_ratio, visibility
from cfgi.polarization import Transmittance

BLOCKED = Transmittance.blocked()
OPEN = Transmittance.open_channel()


def report(number: int, passed: bool, description: str) -> None:
    print(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {description}")
    assert passed, f"criterion {number}: {description}"


def test_criterion_01_visibility_anchor():
    value = visibility(ProtocolParams(5, 12))
    passed = abs(value - 0.569) <= 0.0005
    report(1, passed, f"visibility(M=5, N=12) = {value:.6f}, want 0.569 +/- 0.0005")


def test_criterion_02_equal_dose_snr_anchor():
    value = snr_int_ratio(ProtocolParams(2, 13), noise_model="poisson-sum")
    passed = 1.9 <= value <= 2.2
    report(2, passed,
           f"snr_int_ratio(M=2, N=13) = {value:.6f}, want within [1.9, 2.2]")


def test_criterion_03_closed_form_equivalence():
    worst_blocked = max(
        abs(run_protocol(ProtocolParams(2, n), BLOCKED).p_d0
            - closed_form_p_d0_blocked(n))
        for n in range(1, 101))
    worst_open = 0.0
    worst_open_d1 = 0.0
    for m in range(2, 101):
        dist = run_protocol(ProtocolParams(m, 1), OPEN)
        worst_open = max(worst_open, abs(dist.p_dl - closed_form_p_dl_open(m)))
        worst_open_d1 = max(worst_open_d1, dist.p_d1)
    passed = worst_blocked <= 1e-12 and worst_open <= 1e-12 and worst_open_d1 <= 1e-12
    report(3, passed,
           "engine vs closed forms: max |blocked d0 err| = "
           f"{worst_blocked:.3e} (M=2, N in [1,100]), max |open discard err| = "
           f"{worst_open:.3e} (M in [2,100]), max open p_d1 = {worst_open_d1:.3e}, "
           "all within 1e-12")


def test_criterion_04_conservation():
    worst = 0.0
    for m in range(2, 31):
        for n in range(1, 201):
            params = ProtocolParams(m, n)
            for t in (BLOCKED, OPEN):
                worst = max(worst, abs(run_protocol(params, t).total() - 1.0))
    rng = np.random.default_rng(20260815)
    for _ in range(100):
        m = int(rng.integers(2, 31))
        n = int(rng.integers(1, 201))
        r = math.sqrt(rng.random())
        t = r * cmath.exp(2j * math.pi * rng.random())
        worst = max(worst, abs(run_protocol(ProtocolParams(m, n), t).total() - 1.0))
    passed = worst <= 1e-9
    report(4, passed,
           f"outcome total over M in [2,30] x N in [1,200] x t in {{0,1}} plus "
           f"100 random complex t: max |total - 1| = {worst:.3e}, want <= 1e-9")


def test_criterion_05_limit_behavior():
    ns = [2 ** k for k in range(1, 11)]
    p_obj = [interaction_probability(ProtocolParams(2, n)) for n in ns]
    p_d0 = [run_protocol(ProtocolParams(2, n), BLOCKED).p_d0 for n in ns]
    decreasing_obj = all(a > b for a, b in zip(p_obj, p_obj[1:]))
    decreasing_d0 = all(a > b for a, b in zip(p_d0, p_d0[1:]))
    tail_obj = interaction_probability(ProtocolParams(2, 10_000))
    tail_d0 = run_protocol(ProtocolParams(2, 10_000), BLOCKED).p_d0
    passed = (decreasing_obj and decreasing_d0
              and tail_obj < 1e-3 and tail_d0 < 1e-6)
    report(5, passed,
           f"p_object and blocked p_d0 strictly decrease over N in {{2,4,...,1024}} "
           f"({decreasing_obj}, {decreasing_d0}); at N=10^4 p_object = "
           f"{tail_obj:.3e} (< 1e-3), p_d0 = {tail_d0:.3e} (< 1e-6)")


def test_criterion_06_interaction_bound():
    worst = 0.0
    arg = None
    for m in range(2, 21):
        for n in range(2, 101):
            p = interaction_probability(ProtocolParams(m, n))
            if p > worst:
                worst, arg = p, (m, n)
    passed = worst < 0.735
    report(6, passed,
           f"max p_object over M in [2,20] x N in [2,100] = {worst:.6f} at "
           f"{arg}, want < 0.735")


def test_criterion_07_monte_carlo_fidelity():
    params = ProtocolParams(3, 8)
    dist = run_protocol(params, BLOCKED)
    n = 1_000_000
    fates = sample_fates(dist, n, pixel_stream(20260815, 0, DOMAIN_COUNTERFACTUAL))
    worst_sigma = 0.0
    for fate, p in enumerate(dist.as_tuple()):
        freq = float(np.mean(fates == fate))
        bound = 5.0 * math.sqrt(p * (1.0 - p) / n)
        if bound == 0.0:
            worst_sigma = max(worst_sigma, math.inf if freq > 0.0 else 0.0)
        else:
            worst_sigma = max(worst_sigma, abs(freq - p) / (bound / 5.0))
    passed = worst_sigma <= 5.0
    report(7, passed,
           f"10^6 sampled fates at (M=3, N=8, blocked): worst deviation = "
           f"{worst_sigma:.2f} sigma, want <= 5")


def test_criterion_08_imaging_round_trip():
    board = ((np.indices((16, 16)).sum(axis=0) % 2) * 255).astype(np.uint8)
    mask = Mask.from_pgm_values(board)
    params = ProtocolParams(4, 16)
    exact = 0
    for seed in range(100):
        counts = simulate_exposure(mask, params, SourceModel(n_bar=1000.0, seed=seed))
        estimate = reconstruct(counts)
        if np.array_equal(estimate.threshold_map, board):
            exact += 1
    passed = exact >= 99
    report(8, passed,
           f"16x16 binary mask at (M=4, N=16), n_bar=1000: exact reconstruction "
           f"for {exact}/100 seeds, want >= 99")


def test_criterion_09_dose_reduction():
    dose_2_13 = interaction_probability(ProtocolParams(2, 13))
    dose_2_100 = interaction_probability(ProtocolParams(2, 100))
    opaque = Mask.from_magnitude(np.zeros((1, 1)))
    standard = float(standard_gi_dose_map(opaque, SourceModel(n_bar=1.0))[0, 0])
    passed = (abs(dose_2_13 - 0.2273) <= 0.0005
              and dose_2_100 < 0.05 and standard == 1.0)
    report(9, passed,
           f"per-photon dose on an opaque pixel: {dose_2_13:.6f} at (2,13) "
           f"(want 0.2273 +/- 0.0005), {dose_2_100:.6f} at (2,100) (want < 0.05), "
           f"standard scheme {standard:.1f}")


def test_criterion_10_lossy_model_property():
    losses = LOSS_PRESETS["fig6"]
    best = -math.inf
    arg = None
    for m in range(2, 7):
        for n in range(2, 51):
            value = snr_int_ratio(ProtocolParams(m, n, losses=losses))
            if value > best:
                best, arg = value, (m, n)
    passed = best > 1.0
    report(10, passed,
           f"fig6 preset: max snr_int_ratio over M in [2,6] x N in [2,50] = "
           f"{best:.4f} at {arg}, want > 1")


def test_criterion_11_reassignment_properties():
    worst_gap = math.inf
    p_int_equal = True
    for m in range(2, 11):
        for n in range(1, 51):
            params = ProtocolParams(m, n)
            base = metric_point(params)
            folded = metric_point(params, reassign_dl=True)
            worst_gap = min(worst_gap, folded.visibility - base.visibility)
            if folded.p_int != base.p_int:
                p_int_equal = False
    passed = worst_gap >= -1e-12 and p_int_equal
    report(11, passed,
           f"over M in [2,10] x N in [1,50]: min(reassigned - baseline visibility) "
           f"= {worst_gap:.3e} (want >= 0) and reassigned p_int identical: "
           f"{p_int_equal}")
