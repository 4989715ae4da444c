"""Single-photon scattering off a chain of emitters.

Two routes are provided.  The closed forms cover one emitter and two
emitters (symmetric or asymmetric coupling, with and without DDI).
``solve_chain`` handles any N by solving the coupled jump conditions for
the segment amplitudes and emitter excitations as a dense complex linear
system.

Phase conventions: ``t`` and ``r`` are referenced to the first emitter,
i.e. the free-propagation phase across the chain is removed from ``t``.
With this choice the general solver and the closed forms agree
amplitude-for-amplitude, not just in modulus.
"""

from __future__ import annotations

import numpy as np

from .core import ChainConfig, ScatteringResult, SingularSystem

COND_LIMIT = 1e14
# Upper bound on complex entries held in memory by one batched solve.
_BATCH_ENTRIES = 4_000_000


def gap_phases(config: ChainConfig) -> np.ndarray:
    """Propagation phase k*L between consecutive emitters (length N-1).

    Uses the guided wavenumber at resonance for every detuning; shifts of a
    few hundred Gamma0 change k by parts in 1e8.
    """
    return config.waveguide.k_guided * np.diff(config.axis_positions())


# -- closed forms ---------------------------------------------------------


def single_emitter_amplitudes(delta, gamma_wg, gamma_loss=0.0):
    """(t, r) for one emitter; ``delta`` may be an array."""
    d = np.asarray(delta, dtype=float) + 0.5j * gamma_loss
    den = 1j * gamma_wg + d
    return d / den, -1j * gamma_wg / den


def single_emitter(delta: float, gamma_wg: float, gamma_loss: float = 0.0) -> ScatteringResult:
    t, r = single_emitter_amplitudes(delta, gamma_wg, gamma_loss)
    return ScatteringResult(float(delta), complex(t), complex(r))


def symmetric_amplitudes(delta, gamma_wg, gamma_loss, kl, omega, waveguide_mediated=True):
    """(t, r) for two identically coupled emitters with DDI ``omega``.

    ``waveguide_mediated=False`` drops the G**2 exp(2ikL) term from the
    denominator.  It exists for testing only: the result is unphysical.
    """
    g = gamma_wg
    d = np.asarray(delta, dtype=float) + 0.5j * gamma_loss
    e = np.exp(1j * kl)
    e2 = e * e
    mediated = g**2 * e2 if waveguide_mediated else 0.0
    den = -(g**2) + mediated + 2j * g * (d + e * omega) + d * d - omega**2
    t = np.conj(e) * (-1j * g * omega + 1j * e2 * g * omega + e * (d * d - omega**2)) / den
    r = ((1 - e2) * g**2 - 1j * g * ((1 + e2) * d + 2 * e * omega)) / den
    return t, r


def symmetric_amplitudes_no_ddi(delta, gamma_wg, gamma_loss, kl):
    """Two identical emitters without DDI, evaluated from its own closed form."""
    g = gamma_wg
    d = np.asarray(delta, dtype=float) + 0.5j * gamma_loss
    e2 = np.exp(2j * kl)
    den = (-1 + e2) * g**2 + 2j * g * d + d * d
    return d * d / den, ((1 - e2) * g**2 - 1j * g * (1 + e2) * d) / den


def two_emitter_symmetric(
    delta: float,
    gamma_wg: float,
    gamma_loss: float,
    kl: float,
    omega: float,
    waveguide_mediated: bool = True,
) -> ScatteringResult:
    t, r = symmetric_amplitudes(delta, gamma_wg, gamma_loss, kl, omega, waveguide_mediated)
    return ScatteringResult(float(delta), complex(t), complex(r))


def asymmetric_amplitudes(delta, gamma_wg_1, gamma_loss_1, gamma_wg_2, gamma_loss_2, kl, omega):
    """(t, r) for two emitters with different guided and loss rates."""
    g1, g2 = gamma_wg_1, gamma_wg_2
    g12 = np.sqrt(g1 * g2)
    delta = np.asarray(delta, dtype=float)
    d1 = delta + 0.5j * gamma_loss_1
    d2 = delta + 0.5j * gamma_loss_2
    e = np.exp(1j * kl)
    e2 = e * e
    den = (
        (-1 + e2) * g1 * g2
        + 1j * (g1 * d2 + g2 * d1)
        + 2j * e * g12 * omega
        + d1 * d2
        - omega**2
    )
    t = np.conj(e) * (-1j * g12 * omega + 1j * e2 * g12 * omega + e * (d1 * d2 - omega**2)) / den
    r = ((1 - e2) * g1 * g2 - 1j * e2 * g2 * d1 - 1j * g1 * d2 - 2j * e * g12 * omega) / den
    return t, r


def asymmetric_amplitudes_no_ddi(delta, gamma_wg_1, gamma_loss_1, gamma_wg_2, gamma_loss_2, kl):
    g1, g2 = gamma_wg_1, gamma_wg_2
    delta = np.asarray(delta, dtype=float)
    d1 = delta + 0.5j * gamma_loss_1
    d2 = delta + 0.5j * gamma_loss_2
    e2 = np.exp(2j * kl)
    den = (-1 + e2) * g1 * g2 + 1j * (g1 * d2 + g2 * d1) + d1 * d2
    r = ((1 - e2) * g1 * g2 - 1j * e2 * g2 * d1 - 1j * g1 * d2) / den
    return d1 * d2 / den, r


def two_emitter_asymmetric(
    delta: float,
    gamma_wg_1: float,
    gamma_loss_1: float,
    gamma_wg_2: float,
    gamma_loss_2: float,
    kl: float,
    omega: float,
) -> ScatteringResult:
    t, r = asymmetric_amplitudes(
        delta, gamma_wg_1, gamma_loss_1, gamma_wg_2, gamma_loss_2, kl, omega
    )
    return ScatteringResult(float(delta), complex(t), complex(r))


# -- general solver -------------------------------------------------------


class ChainSystem:
    """Linear system for one chain, reusable across detunings.

    Unknowns are ordered ``[t_1..t_N, r_1..r_N, b_1..b_N]`` where ``t_j`` is
    the right-moving amplitude just after emitter j, ``r_j`` the left-moving
    amplitude just before it, and ``b_j`` the emitter excitation times
    sqrt(v_g).  Row blocks are the right-moving jump, the left-moving jump
    and the emitter equation of motion.  Only the emitter diagonal depends
    on the detuning.
    """

    def __init__(self, config: ChainConfig, ddi: np.ndarray):
        n = config.n
        ddi = np.asarray(ddi, dtype=float)
        if ddi.shape != (n, n):
            raise ValueError(f"ddi matrix must be {n}x{n}, got {ddi.shape}")
        self.n = n
        self.phases = gap_phases(config)
        self.total_phase = float(self.phases.sum())
        coupling = np.sqrt(config.gamma_wg)
        hop = np.exp(1j * self.phases)

        a = np.zeros((3 * n, 3 * n), dtype=complex)
        b = np.zeros(3 * n, dtype=complex)
        t_, r_, e_ = 0, n, 2 * n
        for j in range(n):
            g = coupling[j]
            # right-moving: t_j - e^{i kl} t_{j-1} + i g b_j = 0
            a[j, t_ + j] = 1.0
            a[j, e_ + j] = 1j * g
            if j == 0:
                b[j] = 1.0
            else:
                a[j, t_ + j - 1] = -hop[j - 1]
            # left-moving: e^{i kl} r_{j+1} - r_j - i g b_j = 0
            row = n + j
            a[row, r_ + j] = -1.0
            a[row, e_ + j] = -1j * g
            if j < n - 1:
                a[row, r_ + j + 1] = hop[j]
            # emitter: g (field at x_j) + sum_i Omega_ji b_i - (delta + i loss/2) b_j = 0
            row = 2 * n + j
            a[row, r_ + j] = g
            if j == 0:
                b[row] = -g
            else:
                a[row, t_ + j - 1] = g * hop[j - 1]
            for i in range(n):
                if i != j:
                    a[row, e_ + i] = ddi[j, i]
            a[row, e_ + j] = -0.5j * config.gamma_loss[j]

        self.matrix = a
        self.rhs = b
        self._emitter_diag = np.arange(2 * n, 3 * n)

    def matrices(self, deltas: np.ndarray) -> np.ndarray:
        stack = np.repeat(self.matrix[None, :, :], len(deltas), axis=0)
        idx = self._emitter_diag
        stack[:, idx, idx] -= deltas[:, None]
        return stack

    def solve(self, deltas) -> np.ndarray:
        """Solution vectors, shape (len(deltas), 3N).

        Raises:
            SingularSystem: if any matrix has condition number above 1e14.
        """
        deltas = np.atleast_1d(np.asarray(deltas, dtype=float))
        size = 3 * self.n
        chunk = max(1, _BATCH_ENTRIES // (size * size))
        out = np.empty((len(deltas), size), dtype=complex)
        for start in range(0, len(deltas), chunk):
            part = deltas[start : start + chunk]
            mats = self.matrices(part)
            cond = np.linalg.cond(mats)
            bad = ~(cond <= COND_LIMIT)
            if np.any(bad):
                delta = float(part[np.argmax(bad)])
                raise SingularSystem(
                    f"scattering system is singular at delta = {delta!r} Gamma0", delta
                )
            rhs = np.broadcast_to(self.rhs, (len(part), size))[..., None]
            out[start : start + len(part)] = np.linalg.solve(mats, rhs)[..., 0]
        return out

    def amplitudes(self, deltas) -> tuple[np.ndarray, np.ndarray]:
        """Vectorised (t, r) over detunings."""
        x = self.solve(deltas)
        n = self.n
        return x[:, n - 1] * np.exp(-1j * self.total_phase), x[:, n]

    def result(self, delta: float) -> ScatteringResult:
        x = self.solve([delta])[0]
        n = self.n
        t_seg = x[:n]
        r_seg = np.append(x[n : 2 * n], 0.0)
        segments = [(1.0 + 0j, complex(r_seg[0]))]
        segments += [(complex(t_seg[j]), complex(r_seg[j + 1])) for j in range(n)]
        return ScatteringResult(
            delta=float(delta),
            t=complex(t_seg[-1] * np.exp(-1j * self.total_phase)),
            r=complex(r_seg[0]),
            segment_amps=tuple(segments),
            excitations=tuple(complex(v) for v in x[2 * n :]),
        )


def solve_chain(config: ChainConfig, ddi: np.ndarray, delta: float) -> ScatteringResult:
    """Scattering amplitudes of a validated chain at one detuning."""
    return ChainSystem(config, ddi).result(delta)
