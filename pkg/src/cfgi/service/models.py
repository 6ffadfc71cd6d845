"""Request and response schemas for the HTTP service.

Field names follow the CLI flag names (hyphens as underscores) so a JSON
config file, a CLI invocation, and a direct API call all speak the same
vocabulary.
"""

from __future__ import annotations

import math
from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from ..engine import LOSS_PRESETS, ComponentLosses, ProtocolParams

NoiseModelName = Literal["poisson-sum", "binomial"]
PresetName = Literal["ideal", "fig6"]


class LossFields(BaseModel):
    """Component-loss selection: a named preset, individual overrides, or both
    (overrides win field by field)."""

    preset: Optional[PresetName] = None
    hwp_loss: Optional[float] = Field(default=None, ge=0.0, lt=1.0)
    pbs_loss: Optional[float] = Field(default=None, ge=0.0, lt=1.0)
    mirror_loss: Optional[float] = Field(default=None, ge=0.0, lt=1.0)
    heralding: Optional[float] = Field(default=None, gt=0.0, le=1.0)

    def resolve_losses(self) -> ComponentLosses:
        base = LOSS_PRESETS[self.preset or "ideal"]
        return ComponentLosses(
            hwp_loss=base.hwp_loss if self.hwp_loss is None else self.hwp_loss,
            pbs_loss=base.pbs_loss if self.pbs_loss is None else self.pbs_loss,
            mirror_loss_per_outer_cycle=(
                base.mirror_loss_per_outer_cycle
                if self.mirror_loss is None else self.mirror_loss),
            heralding_efficiency=(
                base.heralding_efficiency if self.heralding is None else self.heralding),
        )


class LossesEcho(BaseModel):
    hwp_loss: float
    pbs_loss: float
    mirror_loss: float
    heralding: float

    @classmethod
    def of(cls, losses: ComponentLosses) -> "LossesEcho":
        return cls(hwp_loss=losses.hwp_loss, pbs_loss=losses.pbs_loss,
                   mirror_loss=losses.mirror_loss_per_outer_cycle,
                   heralding=losses.heralding_efficiency)


class ProbsRequest(LossFields):
    """One protocol evaluation. Exactly one of blocked / open / t_abs picks
    the object; t_phase may accompany t_abs."""

    m: int = Field(ge=2, description="outer cycles")
    n: int = Field(default=1, ge=1, description="inner cycles per outer cycle")
    blocked: bool = False
    open: bool = False
    t_abs: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    t_phase: Optional[float] = None
    outer_rotation: Optional[float] = None
    inner_rotation: Optional[float] = None

    @model_validator(mode="after")
    def _check_object_choice(self) -> "ProbsRequest":
        picks = int(self.blocked) + int(self.open) + int(self.t_abs is not None)
        if picks != 1:
            raise ValueError("choose exactly one of blocked, open, t_abs")
        if self.t_phase is not None:
            if self.t_abs is None:
                raise ValueError("t_phase requires t_abs")
            if not math.isfinite(self.t_phase):
                raise ValueError("t_phase must be finite")
        return self

    def resolve_params(self) -> ProtocolParams:
        return ProtocolParams(
            outer_cycles=self.m, inner_cycles=self.n,
            outer_rotation=self.outer_rotation, inner_rotation=self.inner_rotation,
            losses=self.resolve_losses())


class ProbsResponse(BaseModel):
    m: int
    n: int
    outer_rotation: float
    inner_rotation: float
    losses: LossesEcho
    t_abs: float
    t_phase: float
    p_d0: float
    p_d1: float
    p_dl: float
    p_object: float
    p_component: float


class SweepRequest(LossFields):
    m_min: int = Field(ge=2)
    m_max: int = Field(ge=2)
    n_min: int = Field(ge=1)
    n_max: int = Field(ge=1)
    reassign_dl: bool = False
    noise_model: NoiseModelName = "poisson-sum"

    @model_validator(mode="after")
    def _check_ranges(self) -> "SweepRequest":
        if self.m_max < self.m_min or self.n_max < self.n_min:
            raise ValueError("sweep ranges must satisfy min <= max")
        return self


class SweepRow(BaseModel):
    """snr_int_ratio is null when the interaction probability is zero and
    the ratio diverges (JSON has no infinity)."""

    m: int
    n: int
    p_int: float
    p_d0_err: float
    f: float
    snr_int_ratio: Optional[float]
    visibility: float


class SweepResponse(BaseModel):
    reassign_dl: bool
    noise_model: NoiseModelName
    losses: LossesEcho
    rows: list[SweepRow]


class MaskPayload(BaseModel):
    """Row-major magnitude grid with |t| in [0, 1]; optional phase grid in
    radians of the same shape."""

    magnitude: list[list[float]]
    phase: Optional[list[list[float]]] = None

    @model_validator(mode="after")
    def _check_rectangular(self) -> "MaskPayload":
        if not self.magnitude or not self.magnitude[0]:
            raise ValueError("mask magnitude must be non-empty")
        width = len(self.magnitude[0])
        if any(len(row) != width for row in self.magnitude):
            raise ValueError("mask magnitude rows have unequal lengths")
        if self.phase is not None:
            if len(self.phase) != len(self.magnitude) \
                    or any(len(row) != width for row in self.phase):
                raise ValueError("phase grid shape does not match magnitude grid")
        return self


class ImageRequest(LossFields):
    """One imaging run. ``heralding`` doubles as the source heralding
    efficiency; when omitted it falls back to the loss preset's value."""

    m: int = Field(ge=2)
    n: int = Field(ge=1)
    n_bar: float = Field(gt=0.0)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    blur: float = Field(default=0.0, ge=0.0)
    reassign_dl: bool = False
    outer_rotation: Optional[float] = None
    inner_rotation: Optional[float] = None
    mask: MaskPayload

    def resolve_params(self) -> ProtocolParams:
        return ProtocolParams(
            outer_cycles=self.m, inner_cycles=self.n,
            outer_rotation=self.outer_rotation, inner_rotation=self.inner_rotation,
            losses=self.resolve_losses())


class ImageResponse(BaseModel):
    width: int
    height: int
    m: int
    n: int
    n_bar: float
    seed: int
    heralding: float
    blur: float
    reassign_dl: bool
    c_d0: list[list[int]]
    c_d1: list[list[int]]
    c_dl: list[list[int]]
    d: list[list[float]]
    threshold_map: list[list[int]]
    dose: list[list[float]]
    expected_d_blocked: float
    expected_d_open: float
    threshold_value: float
    ambiguous: bool


class HealthResponse(BaseModel):
    status: str
    version: str
