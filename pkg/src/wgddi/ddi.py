"""Direct dipole-dipole interaction between emitters."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .core import ChainConfig, CoincidentEmitters, DipoleOrientation

MIN_SEPARATION_NM = 1e-9


def pair_ddi(
    r_i: Sequence[float],
    r_j: Sequence[float],
    lambda_transition: float,
    dipole: DipoleOrientation,
) -> float:
    """DDI strength between two parallel dipoles, in units of Gamma0.

    The argument of the retarded dipole field is the free-space phase
    ``x = 2*pi*|r_i - r_j| / lambda_transition``; ``theta`` is the angle
    between the dipole and the separation vector.

    Raises:
        CoincidentEmitters: if the two positions are closer than 1e-9 nm.
    """
    sep = np.asarray(r_i, dtype=float) - np.asarray(r_j, dtype=float)
    dist = float(np.linalg.norm(sep))
    if dist < MIN_SEPARATION_NM:
        raise CoincidentEmitters(
            f"emitters at {tuple(r_i)} and {tuple(r_j)} coincide; DDI diverges"
        )
    x = 2.0 * np.pi * dist / lambda_transition
    cos2 = (float(np.dot(dipole.direction, sep)) / dist) ** 2
    cx, sx = np.cos(x), np.sin(x)
    transverse = cx / x**3 + sx / x**2 - cx / x
    longitudinal = cx / x - 3.0 * cx / x**3 - 3.0 * sx / x**2
    return 0.75 * (transverse + cos2 * longitudinal)


def build_ddi_matrix(config: ChainConfig) -> np.ndarray:
    """N x N DDI matrix for a validated chain.

    Returns the override verbatim when present, zeros when DDI is disabled,
    and the geometric pair values otherwise.  The diagonal is zero.
    """
    n = config.n
    if config.ddi_override is not None:
        return np.array(config.ddi_override, dtype=float)
    omega = np.zeros((n, n))
    if not config.ddi_enabled:
        return omega
    lam = config.waveguide.lambda_transition
    for i in range(n):
        for j in range(i + 1, n):
            value = pair_ddi(
                config.emitters[i].position, config.emitters[j].position, lam, config.dipole
            )
            omega[i, j] = omega[j, i] = value
    return omega
