"""Domain types and validation for emitter chains side-coupled to a waveguide.

Unit conventions used throughout the package:

* rates (``gamma_wg``, ``gamma_loss``), detunings and DDI strengths are in
  units of the free-space decay rate Gamma0;
* lengths and wavelengths are in nanometres.

Gamma0's absolute value never enters the scattering math.  It is kept here
only for optional conversion of results to physical frequency units.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

GAMMA0_MHZ = 7.5
UNIT_TOL = 1e-12


class ConfigError(ValueError):
    """Invalid chain configuration."""


class NegativeRate(ConfigError):
    pass


class NonUnitVector(ConfigError):
    pass


class EmptyChain(ConfigError):
    pass


class InvalidDdiOverride(ConfigError):
    pass


class AsymmetricDdiOverride(InvalidDdiOverride):
    pass


class GeometryError(ValueError):
    """Emitter geometry for which the model is undefined."""


class CoincidentEmitters(GeometryError):
    pass


class NumericalError(ArithmeticError):
    """The scattering problem is numerically degenerate."""


class SingularSystem(NumericalError):
    def __init__(self, message: str, delta: Optional[float] = None):
        super().__init__(message)
        self.delta = delta


def _vec3(values: Sequence[float], name: str) -> tuple[float, float, float]:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (3,):
        raise ConfigError(f"{name} must have 3 components, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"{name} has non-finite components: {values!r}")
    return tuple(float(v) for v in arr)


def _unit3(values: Sequence[float], name: str) -> tuple[float, float, float]:
    vec = _vec3(values, name)
    norm = float(np.linalg.norm(vec))
    if abs(norm - 1.0) > UNIT_TOL:
        raise NonUnitVector(f"{name} must be a unit vector, |v| = {norm!r}")
    return vec


@dataclass(frozen=True)
class Emitter:
    """A two-level emitter next to the waveguide.

    ``gamma_wg`` is the decay rate into the guided mode and ``gamma_loss``
    the decay rate into every other channel, both in units of Gamma0.
    """

    position: tuple[float, float, float]
    gamma_wg: float
    gamma_loss: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "position", _vec3(self.position, "position"))
        for name in ("gamma_wg", "gamma_loss"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ConfigError(f"{name} must be finite, got {value!r}")
            if value < 0:
                raise NegativeRate(f"{name} must be >= 0, got {value!r}")
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class WaveguideParams:
    lambda_guided: float = 211.8
    lambda_transition: float = 655.0
    propagation_axis: tuple[float, float, float] = (1.0, 0.0, 0.0)

    def __post_init__(self):
        for name in ("lambda_guided", "lambda_transition"):
            value = float(getattr(self, name))
            if not np.isfinite(value) or value <= 0:
                raise ConfigError(f"{name} must be a positive length in nm, got {value!r}")
            object.__setattr__(self, name, value)
        object.__setattr__(
            self, "propagation_axis", _unit3(self.propagation_axis, "propagation_axis")
        )

    @property
    def k_guided(self) -> float:
        """Guided-mode wavenumber in 1/nm."""
        return 2.0 * np.pi / self.lambda_guided


@dataclass(frozen=True)
class DipoleOrientation:
    direction: tuple[float, float, float] = (0.0, -1.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "direction", _unit3(self.direction, "dipole direction"))


@dataclass(frozen=True)
class ChainConfig:
    """An ordered chain of emitters plus the waveguide it couples to.

    ``ddi_override`` replaces the geometric DDI matrix when given.  It is
    indexed in the same order as ``emitters``.
    """

    emitters: tuple[Emitter, ...]
    waveguide: WaveguideParams = field(default_factory=WaveguideParams)
    dipole: DipoleOrientation = field(default_factory=DipoleOrientation)
    ddi_override: Optional[tuple[tuple[float, ...], ...]] = None
    ddi_enabled: bool = True

    def __post_init__(self):
        object.__setattr__(self, "emitters", tuple(self.emitters))
        if self.ddi_override is not None:
            mat = np.asarray(self.ddi_override, dtype=float)
            object.__setattr__(
                self, "ddi_override", tuple(tuple(float(v) for v in row) for row in mat)
            )

    @property
    def n(self) -> int:
        return len(self.emitters)

    def axis_positions(self) -> np.ndarray:
        """Projection of each emitter position onto the propagation axis (nm)."""
        if not self.emitters:
            return np.zeros(0)
        pos = np.array([e.position for e in self.emitters])
        return pos @ np.asarray(self.waveguide.propagation_axis)

    @property
    def gamma_wg(self) -> np.ndarray:
        return np.array([e.gamma_wg for e in self.emitters], dtype=float)

    @property
    def gamma_loss(self) -> np.ndarray:
        return np.array([e.gamma_loss for e in self.emitters], dtype=float)


@dataclass(frozen=True)
class ScatteringResult:
    """Single-photon scattering amplitudes at one detuning.

    ``t`` and ``r`` are referenced to the position of the first emitter, so
    the transmitted field is ``t * exp(ikx)`` just like the incident one.
    ``segment_amps[j]`` holds the (right-moving, left-moving) amplitudes of
    the waveguide segment after emitter ``j`` (segment 0 lies before the
    first emitter), each referenced at the emitter on the segment's left
    end; segment 0 is referenced at emitter 1.  ``excitations`` are the
    emitter amplitudes scaled by sqrt(v_g), in Gamma0**-1/2.  The closed-form
    routines leave both sequences empty.
    """

    delta: float
    t: complex
    r: complex
    segment_amps: tuple[tuple[complex, complex], ...] = ()
    excitations: tuple[complex, ...] = ()

    @property
    def transmission(self) -> float:
        return abs(self.t) ** 2

    @property
    def reflection(self) -> float:
        return abs(self.r) ** 2

    @property
    def loss(self) -> float:
        return 1.0 - self.reflection - self.transmission


def validate_chain(config: ChainConfig) -> ChainConfig:
    """Check invariants and return the chain sorted along the waveguide axis.

    The sort is stable, so emitters with equal axis projections keep their
    input order.  An explicit DDI override is permuted along with the
    emitters.
    """
    if config.n == 0:
        raise EmptyChain("chain must contain at least one emitter")
    for emitter in config.emitters:
        if not isinstance(emitter, Emitter):
            raise ConfigError(f"expected Emitter, got {type(emitter).__name__}")

    order = np.argsort(config.axis_positions(), kind="stable")
    emitters = tuple(config.emitters[i] for i in order)

    override = None
    if config.ddi_override is not None:
        mat = np.asarray(config.ddi_override, dtype=float)
        if mat.shape != (config.n, config.n):
            raise InvalidDdiOverride(
                f"ddi override must be {config.n}x{config.n}, got {mat.shape}"
            )
        if not np.all(np.isfinite(mat)):
            raise InvalidDdiOverride("ddi override has non-finite entries")
        if not np.array_equal(mat, mat.T):
            raise AsymmetricDdiOverride("ddi override must be symmetric")
        if np.any(np.diag(mat) != 0):
            raise InvalidDdiOverride("ddi override must have a zero diagonal")
        override = mat[np.ix_(order, order)]

    return replace(config, emitters=emitters, ddi_override=override)
