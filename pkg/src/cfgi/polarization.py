"""Two-level polarization amplitudes and the lossy operations acting on them.

Everything downstream of this module manipulates a single photon's H/V
amplitude pair. States are plain frozen dataclasses; every operation returns
a new state instead of mutating, so intermediate states can be logged or
compared freely.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

# Probability bookkeeping below this threshold is treated as exact.
NORM_TOLERANCE = 1e-12

_SINKS = ("object", "dl", "component")


@dataclass(frozen=True)
class PolarizationAmplitude:
    """Amplitude pair (a_h, a_v) of a single photon in the H/V basis.

    The pair is generally sub-normalized: probability removed by absorbers
    is tracked in a LossLedger, not renormalized away.
    """

    a_h: complex
    a_v: complex

    @property
    def p_h(self) -> float:
        return abs(self.a_h) ** 2

    @property
    def p_v(self) -> float:
        return abs(self.a_v) ** 2

    def norm_squared(self) -> float:
        return self.p_h + self.p_v

    def scaled(self, factor: complex) -> "PolarizationAmplitude":
        return PolarizationAmplitude(self.a_h * factor, self.a_v * factor)


H = PolarizationAmplitude(1.0 + 0.0j, 0.0 + 0.0j)
V = PolarizationAmplitude(0.0 + 0.0j, 1.0 + 0.0j)


@dataclass(frozen=True)
class LossLedger:
    """Where lost probability went.

    object:    absorbed or deflected at the imaged object
    dl:        dumped into the inner-chain discard port
    component: eaten by imperfect optics (waveplates, splitters, mirrors)
    """

    p_object: float = 0.0
    p_dl: float = 0.0
    p_component: float = 0.0

    def total(self) -> float:
        return self.p_object + self.p_dl + self.p_component

    def add(self, sink: str, amount: float) -> "LossLedger":
        if sink not in _SINKS:
            raise ValueError(f"unknown loss sink {sink!r}, expected one of {_SINKS}")
        if amount < -NORM_TOLERANCE:
            raise ValueError(f"negative loss amount {amount!r}")
        amount = max(amount, 0.0)
        if sink == "object":
            return LossLedger(self.p_object + amount, self.p_dl, self.p_component)
        if sink == "dl":
            return LossLedger(self.p_object, self.p_dl + amount, self.p_component)
        return LossLedger(self.p_object, self.p_dl, self.p_component + amount)


@dataclass(frozen=True)
class Transmittance:
    """Complex amplitude transmittance of one object pixel.

    ``power`` is the transmitted power fraction. It is stored separately so
    that a pure phase pixel built via from_abs_phase(1.0, phi) has power
    exactly 1.0 and deposits exactly zero probability in the object sink,
    with no rounding residue from |e^{i phi}|^2.
    """

    value: complex
    power: float | None = None

    def __post_init__(self) -> None:
        value = complex(self.value)
        power = abs(value) ** 2 if self.power is None else float(self.power)
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise ValueError("transmittance amplitude must be finite")
        if not math.isfinite(power) or power < 0.0:
            raise ValueError(f"transmitted power must be finite and >= 0, got {power!r}")
        if power > 1.0 + NORM_TOLERANCE:
            raise ValueError(f"transmitted power {power!r} exceeds 1")
        if abs(abs(value) ** 2 - power) > 1e-9:
            raise ValueError("power is inconsistent with |value|^2")
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "power", min(power, 1.0))

    @classmethod
    def blocked(cls) -> "Transmittance":
        return cls(0.0 + 0.0j, 0.0)

    @classmethod
    def open_channel(cls) -> "Transmittance":
        return cls(1.0 + 0.0j, 1.0)

    @classmethod
    def from_abs_phase(cls, magnitude: float, phase: float = 0.0) -> "Transmittance":
        magnitude = float(magnitude)
        if not math.isfinite(magnitude) or magnitude < 0.0:
            raise ValueError(f"magnitude must be finite and >= 0, got {magnitude!r}")
        if not math.isfinite(float(phase)):
            raise ValueError("phase must be finite")
        return cls(magnitude * cmath.exp(1j * float(phase)), magnitude * magnitude)

    @classmethod
    def of(cls, t: "Transmittance | complex | float") -> "Transmittance":
        if isinstance(t, Transmittance):
            return t
        return cls(complex(t))


def rotate(state: PolarizationAmplitude, theta: float) -> PolarizationAmplitude:
    """Rotate the polarization by theta (half-wave plate pair convention).

    a_h' = cos(theta/2) a_h - sin(theta/2) a_v
    a_v' = sin(theta/2) a_h + cos(theta/2) a_v

    so rotate(H, pi) == V up to floating point.
    """
    theta = float(theta)
    if not math.isfinite(theta):
        raise ValueError(f"rotation angle must be finite, got {theta!r}")
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    return PolarizationAmplitude(c * state.a_h - s * state.a_v,
                                 s * state.a_h + c * state.a_v)


def attenuate_component(
    state: PolarizationAmplitude,
    which: str,
    amplitude_factor: complex,
    ledger: LossLedger,
    sink: str,
) -> tuple[PolarizationAmplitude, LossLedger]:
    """Multiply one basis amplitude by amplitude_factor, booking the removed
    probability into the given ledger sink.

    which: "H" or "V". |amplitude_factor| must not exceed 1.
    """
    key = which.upper()
    if key not in ("H", "V"):
        raise ValueError(f"component must be 'H' or 'V', got {which!r}")
    factor = complex(amplitude_factor)
    mag2 = abs(factor) ** 2
    if not math.isfinite(mag2):
        raise ValueError("amplitude factor must be finite")
    if mag2 > 1.0 + NORM_TOLERANCE:
        raise ValueError(f"amplitude factor {amplitude_factor!r} would amplify")
    survival = min(mag2, 1.0)
    if key == "H":
        lost = state.p_h * (1.0 - survival)
        new_state = PolarizationAmplitude(state.a_h * factor, state.a_v)
    else:
        lost = state.p_v * (1.0 - survival)
        new_state = PolarizationAmplitude(state.a_h, state.a_v * factor)
    return new_state, ledger.add(sink, lost)


def attenuate_both(
    state: PolarizationAmplitude,
    amplitude_factor: float,
    ledger: LossLedger,
    sink: str,
) -> tuple[PolarizationAmplitude, LossLedger]:
    """Attenuate both amplitudes by a common real factor (whole-beam loss)."""
    factor = float(amplitude_factor)
    if not math.isfinite(factor):
        raise ValueError("amplitude factor must be finite")
    if not 0.0 <= factor <= 1.0 + NORM_TOLERANCE:
        raise ValueError(f"whole-beam amplitude factor {factor!r} out of [0, 1]")
    factor = min(factor, 1.0)
    lost = state.norm_squared() * (1.0 - factor * factor)
    return state.scaled(factor), ledger.add(sink, lost)
