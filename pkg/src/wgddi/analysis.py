"""Spectral sweeps, feature extraction and DDI estimation."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .core import ChainConfig, SingularSystem, validate_chain
from .ddi import build_ddi_matrix
from .scattering import ChainSystem

SINGULAR_COS = 1e-12


class EmptySpectrum(ValueError):
    pass


class SingularPhase(ArithmeticError):
    """cos(kL) vanishes, so the Fano-minimum relation is unbounded."""


@dataclass(frozen=True)
class Spectrum:
    deltas: np.ndarray
    reflection: np.ndarray
    transmission: np.ndarray

    @property
    def loss(self) -> np.ndarray:
        return 1.0 - self.reflection - self.transmission

    def __len__(self):
        return len(self.deltas)


@dataclass(frozen=True)
class SpectralFeatures:
    peaks: list[tuple[float, float]]
    minima: list[tuple[float, float]]
    bandwidth: float
    threshold: float
    flag: Optional[str] = None


@dataclass(frozen=True)
class TwoEmitterPrediction:
    """Lossless feature positions for two identical emitters.

    ``peaks`` is None when the splitting condition has no real root.
    ``shift_only`` marks kL = 0 (mod pi), where numerator and denominator
    share a zero and the spectrum shows one shifted peak instead of two.
    """

    peaks: Optional[tuple[float, float]]
    fano_min: float
    shift_only: bool = False


def sweep_spectrum(
    config: ChainConfig,
    ddi: np.ndarray,
    delta_min: float,
    delta_max: float,
    n_points: int,
) -> Spectrum:
    if not delta_min < delta_max:
        raise ValueError(f"need delta_min < delta_max, got {delta_min}, {delta_max}")
    if n_points < 2:
        raise ValueError(f"need at least 2 grid points, got {n_points}")
    return spectrum_on_grid(config, ddi, np.linspace(delta_min, delta_max, n_points))


def spectrum_on_grid(config: ChainConfig, ddi: np.ndarray, deltas: Sequence[float]) -> Spectrum:
    deltas = np.asarray(deltas, dtype=float)
    t, r = ChainSystem(config, ddi).amplitudes(deltas)
    return Spectrum(deltas, np.abs(r) ** 2, np.abs(t) ** 2)


def _vertex(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Vertex of the parabola through three points."""
    (x0, x1, x2), (y0, y1, y2) = x, y
    d0, d2 = x0 - x1, x2 - x1
    denom = d0 * d2 * (d0 - d2)
    a = (d2 * (y0 - y1) - d0 * (y2 - y1)) / denom
    b = (d0**2 * (y2 - y1) - d2**2 * (y0 - y1)) / denom
    if a == 0:
        return float(x1), float(y1)
    shift = -b / (2 * a)
    return float(x1 + shift), float(y1 + b * shift / 2)


def _local_extrema(x: np.ndarray, y: np.ndarray, sign: int) -> list[tuple[float, float]]:
    slope = np.sign(np.diff(y)) * sign
    found = []
    for i in range(1, len(y) - 1):
        if slope[i - 1] > 0 and slope[i] <= 0:
            found.append(_vertex(x[i - 1 : i + 2], y[i - 1 : i + 2]))
    return found


def _crossing(x0, y0, x1, y1, level):
    if y1 == y0:
        return x0
    return x0 + (level - y0) * (x1 - x0) / (y1 - y0)


def find_features(spectrum: Spectrum, threshold: float = 0.5) -> SpectralFeatures:
    """Local reflection maxima/minima and the high-reflection bandwidth.

    Extrema are located from sign changes of the discrete slope and refined
    by three-point parabolic interpolation.  The bandwidth is the width of
    the contiguous region around the highest sample where R >= threshold,
    with linearly interpolated edges.  When no sample reaches the threshold
    the bandwidth is 0 and ``flag`` is ``"no_peak"``.
    """
    if len(spectrum) == 0:
        raise EmptySpectrum("spectrum has no samples")
    if not 0 < threshold < 1:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    x = np.asarray(spectrum.deltas, dtype=float)
    y = np.asarray(spectrum.reflection, dtype=float)
    peaks = _local_extrema(x, y, +1)
    minima = _local_extrema(x, y, -1)

    top = int(np.argmax(y))
    if y[top] < threshold:
        return SpectralFeatures(peaks, minima, 0.0, threshold, flag="no_peak")
    lo = top
    while lo > 0 and y[lo - 1] >= threshold:
        lo -= 1
    hi = top
    while hi < len(y) - 1 and y[hi + 1] >= threshold:
        hi += 1
    left = x[lo] if lo == 0 else _crossing(x[lo - 1], y[lo - 1], x[lo], y[lo], threshold)
    right = x[hi] if hi == len(y) - 1 else _crossing(x[hi], y[hi], x[hi + 1], y[hi + 1], threshold)
    return SpectralFeatures(peaks, minima, float(right - left), threshold)


def predict_two_emitter_features(gamma_wg: float, kl: float, omega: float) -> TwoEmitterPrediction:
    """Perfect-reflection peaks and reflection zero for two lossless emitters.

    Raises:
        SingularPhase: if cos(kl) vanishes.
    """
    c, s = np.cos(kl), np.sin(kl)
    if abs(c) < SINGULAR_COS:
        raise SingularPhase(f"Fano minimum is unbounded at kl = {kl!r}")
    fano_min = -gamma_wg * s / c - omega / c
    disc = 2 * gamma_wg * omega * s + omega**2
    peaks = None
    if disc >= 0:
        root = float(np.sqrt(disc))
        peaks = (-root, root)
    shift_only = abs(s) < SINGULAR_COS
    return TwoEmitterPrediction(peaks, float(fano_min), shift_only)


def estimate_ddi_from_fano(delta_rmin: float, gamma_wg: float, kl: float) -> float:
    """Invert the Fano-minimum position of two identical emitters for the DDI.

    Exact for lossless emitters; with losses the minimum moves and the
    estimate degrades roughly in proportion to gamma_loss / gamma_wg.
    """
    c, s = np.cos(kl), np.sin(kl)
    if abs(c) < SINGULAR_COS:
        raise SingularPhase(f"DDI cannot be inferred at kl = {kl!r}")
    return float(-delta_rmin * c - gamma_wg * s)


@dataclass(frozen=True)
class ReflectionMap:
    kl: np.ndarray
    deltas: np.ndarray
    reflection: np.ndarray = field(repr=False)  # shape (len(kl), len(deltas))


def chain_with_phase(template: ChainConfig, kl: float) -> ChainConfig:
    """Copy of ``template`` with uniform gaps giving phase ``kl`` per gap.

    Each emitter keeps its transverse offset from the axis; the axial
    positions become ``x_1 + j * gap``.
    """
    axis = np.asarray(template.waveguide.propagation_axis)
    gap = kl / template.waveguide.k_guided
    proj = template.axis_positions()
    emitters = []
    for j, emitter in enumerate(template.emitters):
        pos = np.asarray(emitter.position)
        new = pos + (proj[0] + j * gap - proj[j]) * axis
        emitters.append(replace(emitter, position=tuple(new)))
    return validate_chain(replace(template, emitters=tuple(emitters)))


def sweep_map(
    config_template: ChainConfig,
    delta_grid: Sequence[float],
    kl_grid: Sequence[float],
    ddi_enabled: bool = True,
) -> ReflectionMap:
    """Reflection over a (kL, detuning) grid.

    Geometric DDI is recomputed for every kL row.  With ``ddi_enabled``
    false the DDI is zero regardless of any override in the template.
    """
    deltas = np.asarray(delta_grid, dtype=float)
    kls = np.asarray(kl_grid, dtype=float)
    template = replace(config_template, ddi_enabled=ddi_enabled)
    if not ddi_enabled:
        template = replace(template, ddi_override=None)
    rows = np.empty((len(kls), len(deltas)))
    for i, kl in enumerate(kls):
        chain = chain_with_phase(template, kl)
        try:
            rows[i] = spectrum_on_grid(chain, build_ddi_matrix(chain), deltas).reflection
        except SingularSystem as exc:
            raise SingularSystem(f"{exc} (kl = {kl!r})", exc.delta) from exc
    return ReflectionMap(kls, deltas, rows)
