"""Monte Carlo ghost imaging driven by the protocol engine.

Each mask pixel is interrogated by a Poisson number of photon pairs. The
signal photon realizes one of the five engine fates by inverse-CDF sampling
of the analytic distribution for that pixel's transmittance; trajectory
level simulation is deliberately avoided. A realized detector click becomes
an ICCD coincidence at the partner pixel with probability
heralding_efficiency.

Determinism contract: every pixel owns a counter-based random stream keyed
by (seed, domain, pixel index), where domain 0 is the counterfactual
exposure and domain 1 the standard ghost imaging comparison. Within a
stream the draws per photon are fixed (one fate uniform and one heralding
uniform each, plus two blur normals when enabled), so results are
bit-identical regardless of evaluation order or parallel scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .engine import OutcomeDistribution, ProtocolParams, run_protocol
from .polarization import NORM_TOLERANCE, Transmittance

__all__ = [
    "Mask",
    "SourceModel",
    "CoincidenceCounts",
    "ImageEstimate",
    "pixel_stream",
    "sample_fates",
    "simulate_exposure",
    "reconstruct",
    "dose_map",
    "compare_standard_gi",
    "standard_gi_dose_map",
]

DOMAIN_COUNTERFACTUAL = 0
DOMAIN_STANDARD_GI = 1

# Fate indices in OutcomeDistribution.as_tuple() order.
FATE_D0 = 0
FATE_D1 = 1
FATE_DL = 2

_AMBIGUOUS_SEPARATION = 1e-12


@dataclass(frozen=True, eq=False)
class Mask:
    """Per-pixel complex transmittance of the object plane.

    ``transmittance`` is a (height, width) complex array; ``power`` holds
    the transmitted power fraction per pixel. Power is carried separately
    for the same reason as in Transmittance: a pure phase pixel must have
    power exactly 1.0 so its absorbed dose is exactly zero.
    """

    transmittance: np.ndarray
    power: np.ndarray | None = None

    def __post_init__(self) -> None:
        t = np.asarray(self.transmittance, dtype=complex)
        if t.ndim != 2 or t.size == 0:
            raise ValueError(f"transmittance must be a non-empty 2D array, got shape {t.shape}")
        p = np.abs(t) ** 2 if self.power is None else np.asarray(self.power, dtype=float)
        if p.shape != t.shape:
            raise ValueError("power grid shape does not match transmittance")
        if not np.all(np.isfinite(t)) or not np.all(np.isfinite(p)):
            raise ValueError("mask entries must be finite")
        if np.any(p < 0.0) or np.any(p > 1.0 + NORM_TOLERANCE):
            raise ValueError("transmitted power out of [0, 1]")
        if np.any(np.abs(np.abs(t) ** 2 - p) > 1e-9):
            raise ValueError("power grid inconsistent with |transmittance|^2")
        object.__setattr__(self, "transmittance", t)
        object.__setattr__(self, "power", np.minimum(p, 1.0))

    @property
    def height(self) -> int:
        return self.transmittance.shape[0]

    @property
    def width(self) -> int:
        return self.transmittance.shape[1]

    def pixel(self, x: int, y: int) -> Transmittance:
        return Transmittance(complex(self.transmittance[y, x]), float(self.power[y, x]))

    @classmethod
    def from_magnitude(cls, magnitude: np.ndarray,
                       phase: np.ndarray | None = None) -> "Mask":
        """Build from |t| in [0, 1] and an optional phase grid in radians."""
        mag = np.asarray(magnitude, dtype=float)
        if mag.ndim != 2:
            raise ValueError(f"magnitude must be 2D, got shape {mag.shape}")
        if np.any(mag < 0.0) or np.any(mag > 1.0 + NORM_TOLERANCE):
            raise ValueError("magnitude out of [0, 1]")
        mag = np.minimum(mag, 1.0)
        if phase is None:
            value = mag.astype(complex)
        else:
            ph = np.asarray(phase, dtype=float)
            if ph.shape != mag.shape:
                raise ValueError(
                    f"phase shape {ph.shape} does not match magnitude shape {mag.shape}")
            value = mag * np.exp(1j * ph)
        return cls(value, mag * mag)

    @classmethod
    def from_pgm_values(cls, values: np.ndarray,
                        phase: np.ndarray | None = None) -> "Mask":
        """Build from 8-bit samples, v -> |t| = v/255 (0 opaque, 255 open)."""
        v = np.asarray(values)
        if not np.issubdtype(v.dtype, np.integer):
            raise ValueError(f"expected integer samples, got dtype {v.dtype}")
        return cls.from_magnitude(v.astype(float) / 255.0, phase)


@dataclass(frozen=True)
class SourceModel:
    """Photon-pair source and detection chain.

    n_bar is the mean pair count per pixel per exposure. The idler lands on
    the ICCD pixel matched to the signal pixel, optionally smeared by a
    Gaussian of correlation_blur_px pixels. heralding_efficiency thins the
    registered coincidences; it never changes the per-photon fate physics.
    """

    n_bar: float
    heralding_efficiency: float = 1.0
    seed: int = 0
    correlation_blur_px: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.n_bar) or self.n_bar <= 0.0:
            raise ValueError(f"n_bar must be positive, got {self.n_bar!r}")
        eta = self.heralding_efficiency
        if not math.isfinite(eta) or not 0.0 < eta <= 1.0:
            raise ValueError(f"heralding_efficiency must lie in (0, 1], got {eta!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) \
                or not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be an integer in [0, 2^64)")
        blur = self.correlation_blur_px
        if not math.isfinite(blur) or blur < 0.0:
            raise ValueError(f"correlation_blur_px must be >= 0, got {blur!r}")


@dataclass(eq=False)
class CoincidenceCounts:
    """Per-pixel registered coincidences for one exposure.

    c_dl always records the raw discard-port coincidences; with
    reassign_dl set those clicks are additionally counted into c_d0, which
    is the channel the reconstruction subtracts. params is None for
    standard ghost imaging counts, whose bucket clicks live in c_d0 (the
    bucket fires on transmission, the open-channel signal).
    """

    c_d0: np.ndarray
    c_d1: np.ndarray
    c_dl: np.ndarray
    source: SourceModel
    params: ProtocolParams | None = None
    reassign_dl: bool = False

    def __post_init__(self) -> None:
        shapes = {self.c_d0.shape, self.c_d1.shape, self.c_dl.shape}
        if len(shapes) != 1 or self.c_d0.ndim != 2:
            raise ValueError("count grids must share one 2D shape")
        for arr in (self.c_d0, self.c_d1, self.c_dl):
            if np.any(arr < 0):
                raise ValueError("counts must be non-negative")

    @property
    def height(self) -> int:
        return self.c_d0.shape[0]

    @property
    def width(self) -> int:
        return self.c_d0.shape[1]


@dataclass(eq=False)
class ImageEstimate:
    """Subtraction image d = (c_d1 - c_d0)/n_bar plus its threshold map.

    threshold_map uses PGM polarity: 0 where decided blocked, 255 where
    decided open. ambiguous is set when the analytic blocked/open
    expectations coincide or the counts are entirely empty, in which case
    the threshold map is not meaningful.
    """

    d: np.ndarray
    expected_d_blocked: float
    expected_d_open: float
    threshold_value: float
    threshold_map: np.ndarray = field(init=False)
    ambiguous: bool = False

    def __post_init__(self) -> None:
        blocked = self.d > self.threshold_value
        self.threshold_map = np.where(blocked, 0, 255).astype(np.uint8)


def pixel_stream(seed: int, pixel_index: int, domain: int) -> np.random.Generator:
    """Counter-based stream for one pixel, independent per (seed, domain, pixel)."""
    if not 0 <= pixel_index < 2 ** 56:
        raise ValueError("pixel_index out of range")
    if domain not in (DOMAIN_COUNTERFACTUAL, DOMAIN_STANDARD_GI):
        raise ValueError(f"unknown stream domain {domain!r}")
    key = np.array([seed, (domain << 56) | pixel_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_fates(dist: OutcomeDistribution, count: int,
                 rng: np.random.Generator) -> np.ndarray:
    """Draw fate indices (FATES order) by inverse CDF over the five fates."""
    boundaries = np.cumsum(dist.as_tuple()[:4])
    u = rng.random(count)
    return np.searchsorted(boundaries, u, side="right")


def _unique_pixel_distributions(
    mask: Mask, params: ProtocolParams,
) -> tuple[np.ndarray, list[OutcomeDistribution]]:
    # Engine runs once per distinct pixel value, not once per pixel.
    keys = np.stack([mask.transmittance.real.ravel(),
                     mask.transmittance.imag.ravel(),
                     mask.power.ravel()], axis=1)
    uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
    dists = [run_protocol(params, Transmittance(complex(re, im), pw))
             for re, im, pw in uniq]
    return inverse.reshape(mask.height, mask.width), dists


def _deposit(counts: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> None:
    np.add.at(counts, (ys, xs), 1)


def _landing_positions(
    x: int, y: int, k: int, blur: float, rng: np.random.Generator,
    width: int, height: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # Blur normals are drawn for every photon whenever blur is enabled so
    # the stream layout does not depend on fates. Off-frame idlers miss the
    # camera and are dropped.
    if blur == 0.0:
        xs = np.full(k, x, dtype=np.int64)
        ys = np.full(k, y, dtype=np.int64)
        return xs, ys, np.ones(k, dtype=bool)
    offsets = rng.normal(0.0, blur, size=(k, 2))
    xs = x + np.rint(offsets[:, 0]).astype(np.int64)
    ys = y + np.rint(offsets[:, 1]).astype(np.int64)
    on_frame = (xs >= 0) & (xs < width) & (ys >= 0) & (ys < height)
    return xs, ys, on_frame


def simulate_exposure(
    mask: Mask,
    params: ProtocolParams,
    source: SourceModel,
    reassign_dl: bool = False,
) -> CoincidenceCounts:
    """Run one counterfactual exposure of the whole mask.

    Per pixel: pair count k ~ Poisson(n_bar); k fate draws against the
    pixel's analytic distribution; k heralding draws; detector fates whose
    heralding draw succeeds register a coincidence at the idler's landing
    pixel.
    """
    height, width = mask.height, mask.width
    index_map, dists = _unique_pixel_distributions(mask, params)
    boundaries = [np.cumsum(d.as_tuple()[:4]) for d in dists]
    c_d0 = np.zeros((height, width), dtype=np.int64)
    c_d1 = np.zeros((height, width), dtype=np.int64)
    c_dl = np.zeros((height, width), dtype=np.int64)
    eta = source.heralding_efficiency
    blur = source.correlation_blur_px
    for y in range(height):
        for x in range(width):
            rng = pixel_stream(source.seed, y * width + x, DOMAIN_COUNTERFACTUAL)
            k = int(rng.poisson(source.n_bar))
            if k == 0:
                continue
            fates = np.searchsorted(boundaries[index_map[y, x]],
                                    rng.random(k), side="right")
            heralded = rng.random(k) < eta
            xs, ys, on_frame = _landing_positions(x, y, k, blur, rng, width, height)
            registered = heralded & on_frame
            for fate, grid in ((FATE_D0, c_d0), (FATE_D1, c_d1), (FATE_DL, c_dl)):
                hit = registered & (fates == fate)
                if hit.any():
                    _deposit(grid, xs[hit], ys[hit])
    if reassign_dl:
        c_d0 += c_dl
    return CoincidenceCounts(c_d0=c_d0, c_d1=c_d1, c_dl=c_dl, source=source,
                             params=params, reassign_dl=reassign_dl)


def _expected_d(counts: CoincidenceCounts) -> tuple[float, float]:
    eta = counts.source.heralding_efficiency
    if counts.params is None:
        # Standard ghost imaging: bucket (in c_d0) fires iff transmitted.
        return 0.0, -eta
    blocked = run_protocol(counts.params, Transmittance.blocked())
    open_ = run_protocol(counts.params, Transmittance.open_channel())
    extra_b = blocked.p_dl if counts.reassign_dl else 0.0
    extra_o = open_.p_dl if counts.reassign_dl else 0.0
    d_blocked = eta * (blocked.p_d1 - (blocked.p_d0 + extra_b))
    d_open = eta * (open_.p_d1 - (open_.p_d0 + extra_o))
    return d_blocked, d_open


def reconstruct(counts: CoincidenceCounts) -> ImageEstimate:
    """Form the subtraction image and threshold it at the midpoint of the
    analytic blocked/open expectations for these exposure settings."""
    d = (counts.c_d1 - counts.c_d0) / counts.source.n_bar
    d_blocked, d_open = _expected_d(counts)
    threshold = (d_blocked + d_open) / 2.0
    no_signal = not (counts.c_d0.any() or counts.c_d1.any() or counts.c_dl.any())
    ambiguous = abs(d_blocked - d_open) <= _AMBIGUOUS_SEPARATION or no_signal
    return ImageEstimate(d=d, expected_d_blocked=d_blocked, expected_d_open=d_open,
                         threshold_value=threshold, ambiguous=ambiguous)


def dose_map(mask: Mask, params: ProtocolParams, source: SourceModel) -> np.ndarray:
    """Expected absorbed photons per pixel: n_bar * p_object(t(pixel))."""
    index_map, dists = _unique_pixel_distributions(mask, params)
    per_value = np.asarray([d.p_object for d in dists])
    return source.n_bar * per_value[index_map]


def compare_standard_gi(mask: Mask, source: SourceModel) -> CoincidenceCounts:
    """Standard ghost imaging exposure of the same mask.

    The signal photon meets the object directly; the bucket detector fires
    iff it is transmitted (probability |t|^2). Bucket coincidences are
    returned in c_d0; c_d1 and c_dl stay zero; params is None.
    """
    height, width = mask.height, mask.width
    c_d0 = np.zeros((height, width), dtype=np.int64)
    zeros = np.zeros((height, width), dtype=np.int64)
    eta = source.heralding_efficiency
    blur = source.correlation_blur_px
    for y in range(height):
        for x in range(width):
            rng = pixel_stream(source.seed, y * width + x, DOMAIN_STANDARD_GI)
            k = int(rng.poisson(source.n_bar))
            if k == 0:
                continue
            transmitted = rng.random(k) < mask.power[y, x]
            heralded = rng.random(k) < eta
            xs, ys, on_frame = _landing_positions(x, y, k, blur, rng, width, height)
            hit = transmitted & heralded & on_frame
            if hit.any():
                _deposit(c_d0, xs[hit], ys[hit])
    return CoincidenceCounts(c_d0=c_d0, c_d1=zeros, c_dl=zeros.copy(),
                             source=source, params=None)


def standard_gi_dose_map(mask: Mask, source: SourceModel) -> np.ndarray:
    """Absorbed dose of the standard scheme: n_bar * (1 - |t|^2) per pixel."""
    return source.n_bar * (1.0 - mask.power)
