"""Chained-interferometer protocol engine.

The device nests two interferometer loops. An outer loop of ``outer_cycles``
repetitions slowly rotates the photon polarization from H toward V; on every
outer pass the V component is routed through an inner loop of
``inner_cycles`` repetitions whose crossing arm traverses the object. A
blocking object repeatedly projects the inner state back (chained Zeno
pinning), so the outer rotation accumulates and the photon exits V; an open
object lets the inner interferometer complete its own rotation, which
shunts the routed component into a discard port and leaves the photon H.

Fate probabilities therefore discriminate blocked from open while the
photon's chance of actually being absorbed by the object stays small.

Cycle-internal ordering is fixed: the crossing arm meets the object first,
then the rotation is applied. With one inner cycle and a blocker this puts
the full photon in the discard port and nothing in the object, which is the
behavior the closed forms below assume.

Loss placement (all probability booked to the ``component`` sink):
  outer cycle: mirror -> waveplate -> rotate -> splitter -> inner loop on
  the V component (H parks on the bypass arm) -> splitter. Mirror loss is
  charged at the start of the cycle, upstream of that cycle's object pass.
  inner cycle: splitter -> object crossing on H -> splitter -> waveplate ->
  rotate; after the last cycle the residual H amplitude exits to the
  discard port.

Per-run cost is O(outer_cycles * inner_cycles) complex operations; the loop
below works on bare complex pairs for speed and exposes dataclass values at
the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .polarization import LossLedger, Transmittance

__all__ = [
    "ComponentLosses",
    "ProtocolParams",
    "OutcomeDistribution",
    "LOSS_PRESETS",
    "IDEAL_LOSSES",
    "REALISTIC_LOSSES",
    "FATES",
    "run_inner_chain",
    "run_protocol",
    "closed_form_p_d0_blocked",
    "closed_form_p_dl_open",
    "interaction_probability",
]

# Fate labels in sampling order, matching OutcomeDistribution.as_tuple().
FATES = ("d0", "d1", "dl", "object", "component")


@dataclass(frozen=True)
class ComponentLosses:
    """Power-loss fractions of the optical components.

    hwp_loss / pbs_loss / mirror_loss_per_outer_cycle remove probability
    into the component sink at the placements documented in the module
    docstring. heralding_efficiency never enters these probabilities: it is
    the chance that a click is registered as a coincidence, applied by the
    imaging layer as a thinning of counts.
    """

    hwp_loss: float = 0.0
    pbs_loss: float = 0.0
    mirror_loss_per_outer_cycle: float = 0.0
    heralding_efficiency: float = 1.0

    def __post_init__(self) -> None:
        for name in ("hwp_loss", "pbs_loss", "mirror_loss_per_outer_cycle"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or not 0.0 <= value < 1.0:
                raise ValueError(f"{name} must lie in [0, 1), got {value!r}")
            object.__setattr__(self, name, value)
        eta = float(self.heralding_efficiency)
        if not math.isfinite(eta) or not 0.0 < eta <= 1.0:
            raise ValueError(f"heralding_efficiency must lie in (0, 1], got {eta!r}")
        object.__setattr__(self, "heralding_efficiency", eta)

    @property
    def lossless(self) -> bool:
        return self.hwp_loss == 0.0 and self.pbs_loss == 0.0 \
            and self.mirror_loss_per_outer_cycle == 0.0


IDEAL_LOSSES = ComponentLosses()

# Demonstration numbers for a realistic bench: 0.1% waveplate loss, 1%
# splitter loss, 18% heralding, and a 15/16 switching loss per outer cycle.
REALISTIC_LOSSES = ComponentLosses(
    hwp_loss=0.001,
    pbs_loss=0.01,
    mirror_loss_per_outer_cycle=15.0 / 16.0,
    heralding_efficiency=0.18,
)

LOSS_PRESETS = {
    "ideal": IDEAL_LOSSES,
    "fig6": REALISTIC_LOSSES,
}


@dataclass(frozen=True)
class ProtocolParams:
    """Full interferometer configuration.

    outer_rotation defaults to pi/outer_cycles and inner_rotation to
    pi/inner_cycles, the angles at which the cycle rotations compose to a
    half turn. Both may be overridden, e.g. to model deliberate
    over-rotation compensating component losses.
    """

    outer_cycles: int
    inner_cycles: int
    outer_rotation: float | None = None
    inner_rotation: float | None = None
    losses: ComponentLosses = IDEAL_LOSSES

    def __post_init__(self) -> None:
        m = self.outer_cycles
        n = self.inner_cycles
        if not isinstance(m, int) or isinstance(m, bool) or m < 2:
            raise ValueError(f"outer_cycles must be an integer >= 2, got {m!r}")
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise ValueError(f"inner_cycles must be an integer >= 1, got {n!r}")
        outer = math.pi / m if self.outer_rotation is None else float(self.outer_rotation)
        inner = math.pi / n if self.inner_rotation is None else float(self.inner_rotation)
        if not math.isfinite(outer) or not math.isfinite(inner):
            raise ValueError("rotation angles must be finite")
        if not isinstance(self.losses, ComponentLosses):
            raise ValueError("losses must be a ComponentLosses instance")
        object.__setattr__(self, "outer_rotation", outer)
        object.__setattr__(self, "inner_rotation", inner)


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities of the five exclusive photon fates.

    d0: exits H (open-channel signal)     d1: exits V (blocked signal)
    dl: discard port of the inner loop    object: absorbed at the object
    component: lost to imperfect optics
    Sums to 1 up to floating-point error.
    """

    p_d0: float
    p_d1: float
    p_dl: float
    p_object: float
    p_component: float

    def total(self) -> float:
        return self.p_d0 + self.p_d1 + self.p_dl + self.p_object + self.p_component

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        """Fate probabilities in FATES order."""
        return (self.p_d0, self.p_d1, self.p_dl, self.p_object, self.p_component)


def run_inner_chain(
    v_in: complex,
    params: ProtocolParams,
    t: Transmittance | complex | float,
    ledger: LossLedger,
) -> tuple[complex, LossLedger]:
    """Send amplitude v_in through one pass of the inner loop.

    The routed amplitude enters the loop's stay arm; each cycle sends the
    crossing arm through the object and then rotates stay into crossing by
    inner_rotation. Whatever amplitude sits in the crossing arm after the
    last cycle leaves through the discard port and is booked to the dl
    sink. Returns the surviving stay-arm amplitude and the updated ledger.
    """
    t = Transmittance.of(t)
    losses = params.losses
    v_out, d_object, d_dl, d_component = _inner_loop(
        complex(v_in), params.inner_cycles, params.inner_rotation,
        t.value, t.power, losses.hwp_loss, losses.pbs_loss)
    ledger = ledger.add("object", d_object)
    ledger = ledger.add("dl", d_dl)
    ledger = ledger.add("component", d_component)
    return v_out, ledger


def _inner_loop(
    v_in: complex,
    cycles: int,
    rotation: float,
    t_value: complex,
    t_power: float,
    hwp_loss: float,
    pbs_loss: float,
) -> tuple[complex, float, float, float]:
    # Hot path: bare complex pair (crossing, stay), sink tallies as floats.
    a_cross = 0j
    a_stay = v_in
    p_object = 0.0
    p_dl = 0.0
    p_component = 0.0
    c = math.cos(rotation / 2.0)
    s = math.sin(rotation / 2.0)
    amp_pbs = math.sqrt(1.0 - pbs_loss)
    amp_hwp = math.sqrt(1.0 - hwp_loss)
    for _ in range(cycles):
        if pbs_loss:
            norm = abs(a_cross) ** 2 + abs(a_stay) ** 2
            p_component += pbs_loss * norm
            a_cross *= amp_pbs
            a_stay *= amp_pbs
        absorbed = (1.0 - t_power) * (a_cross.real ** 2 + a_cross.imag ** 2)
        if absorbed > 0.0:
            p_object += absorbed
        a_cross *= t_value
        if pbs_loss:
            norm = abs(a_cross) ** 2 + abs(a_stay) ** 2
            p_component += pbs_loss * norm
            a_cross *= amp_pbs
            a_stay *= amp_pbs
        if hwp_loss:
            norm = abs(a_cross) ** 2 + abs(a_stay) ** 2
            p_component += hwp_loss * norm
            a_cross *= amp_hwp
            a_stay *= amp_hwp
        a_cross, a_stay = c * a_cross - s * a_stay, s * a_cross + c * a_stay
    p_dl += a_cross.real ** 2 + a_cross.imag ** 2
    return a_stay, p_object, p_dl, p_component


def run_protocol(
    params: ProtocolParams,
    t: Transmittance | complex | float,
) -> OutcomeDistribution:
    """Propagate one photon, initially H, through the full protocol.

    Per outer cycle: mirror and waveplate losses, the outer rotation, then
    the inner loop applied to the V component while H bypasses, with
    splitter losses at the split and the recombination. After the last
    cycle p_d0 = |a_H|^2 and p_d1 = |a_V|^2.
    """
    return _run_protocol_cached(params, Transmittance.of(t))


@lru_cache(maxsize=4096)
def _run_protocol_cached(params: ProtocolParams, t: Transmittance) -> OutcomeDistribution:
    losses = params.losses
    hwp_loss = losses.hwp_loss
    pbs_loss = losses.pbs_loss
    mirror_loss = losses.mirror_loss_per_outer_cycle
    amp_mirror = math.sqrt(1.0 - mirror_loss)
    amp_hwp = math.sqrt(1.0 - hwp_loss)
    amp_pbs = math.sqrt(1.0 - pbs_loss)
    c = math.cos(params.outer_rotation / 2.0)
    s = math.sin(params.outer_rotation / 2.0)
    a_h = 1.0 + 0j
    a_v = 0j
    p_object = 0.0
    p_dl = 0.0
    p_component = 0.0
    for _ in range(params.outer_cycles):
        if mirror_loss:
            norm = abs(a_h) ** 2 + abs(a_v) ** 2
            p_component += mirror_loss * norm
            a_h *= amp_mirror
            a_v *= amp_mirror
        if hwp_loss:
            norm = abs(a_h) ** 2 + abs(a_v) ** 2
            p_component += hwp_loss * norm
            a_h *= amp_hwp
            a_v *= amp_hwp
        a_h, a_v = c * a_h - s * a_v, s * a_h + c * a_v
        if pbs_loss:
            norm = abs(a_h) ** 2 + abs(a_v) ** 2
            p_component += pbs_loss * norm
            a_h *= amp_pbs
            a_v *= amp_pbs
        a_v, d_object, d_dl, d_component = _inner_loop(
            a_v, params.inner_cycles, params.inner_rotation,
            t.value, t.power, hwp_loss, pbs_loss)
        p_object += d_object
        p_dl += d_dl
        p_component += d_component
        if pbs_loss:
            norm = abs(a_h) ** 2 + abs(a_v) ** 2
            p_component += pbs_loss * norm
            a_h *= amp_pbs
            a_v *= amp_pbs
    return OutcomeDistribution(
        p_d0=a_h.real ** 2 + a_h.imag ** 2,
        p_d1=a_v.real ** 2 + a_v.imag ** 2,
        p_dl=p_dl,
        p_object=p_object,
        p_component=p_component,
    )


def closed_form_p_d0_blocked(inner_cycles: int) -> float:
    """Blocked-object false-open probability for two outer cycles.

    Equals (cos^N(pi/2N) - 1)^2 / 4 where N = inner_cycles. Valid for the
    default rotation angles with lossless components.
    """
    n = inner_cycles
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValueError(f"inner_cycles must be an integer >= 1, got {n!r}")
    return (math.cos(math.pi / (2 * n)) ** n - 1.0) ** 2 / 4.0


def closed_form_p_dl_open(outer_cycles: int) -> float:
    """Open-object discard probability, 1 - cos^{2M}(pi/2M), M = outer_cycles.

    Valid for the default rotation angles with lossless components.
    """
    m = outer_cycles
    if not isinstance(m, int) or isinstance(m, bool) or m < 2:
        raise ValueError(f"outer_cycles must be an integer >= 2, got {m!r}")
    return 1.0 - math.cos(math.pi / (2 * m)) ** (2 * m)


def interaction_probability(params: ProtocolParams) -> float:
    """Probability that a photon is absorbed by a fully blocking object."""
    return run_protocol(params, Transmittance.blocked()).p_object
