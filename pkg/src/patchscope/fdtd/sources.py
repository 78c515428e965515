"""Excitation waveforms and lumped-port helpers.

Both pulse shapes start and end at numerically negligible amplitude and carry
exactly zero DC, which the time-domain solver needs to ring down cleanly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DifferentiatedGaussian:
    """-(t') exp(-t'^2/2) pulse; spectrum peaks at peak_hz and stays within
    -20 dB of that peak from well below 2 GHz to beyond 10 GHz when
    peak_hz = 4.3e9. Used for port drives."""

    peak_hz: float = 4.3e9
    start_sigmas: float = 6.0

    @property
    def tau(self) -> float:
        return 1.0 / (2.0 * math.pi * self.peak_hz)

    @property
    def t0(self) -> float:
        return self.start_sigmas * self.tau

    def __call__(self, t):
        u = (np.asarray(t) - self.t0) / self.tau
        return -u * np.exp(-0.5 * u * u)

    def spectrum(self, f_hz):
        """Analytic amplitude spectrum (arbitrary scale, zero phase origin)."""
        w = 2.0 * math.pi * np.asarray(f_hz)
        return w * self.tau**2 * np.exp(-0.5 * (w * self.tau) ** 2)

    def usable_band(self, f_hz, floor_db: float = -20.0):
        s = self.spectrum(f_hz)
        return s >= 10.0 ** (floor_db / 20.0) * s.max()

    @property
    def duration(self) -> float:
        return 2.0 * self.t0


@dataclass(frozen=True)
class SineGaussian:
    """sin(2 pi fc t') exp(-t'^2/(2 tau^2)): odd pulse (zero DC) with a
    -20 dB two-sided bandwidth of bandwidth_hz around center_hz. Used for
    plane-wave illumination."""

    center_hz: float = 4.5e9
    bandwidth_hz: float = 5.0e9
    start_sigmas: float = 5.5

    @property
    def tau(self) -> float:
        return math.sqrt(2.0 * math.log(10.0)) / (math.pi * self.bandwidth_hz)

    @property
    def t0(self) -> float:
        return self.start_sigmas * self.tau

    def __call__(self, t):
        u = np.asarray(t) - self.t0
        return np.sin(2.0 * math.pi * self.center_hz * u) * np.exp(
            -0.5 * (u / self.tau) ** 2
        )

    def spectrum(self, f_hz):
        f = np.asarray(f_hz, dtype=float)
        s = self.tau * math.sqrt(2.0 * math.pi) / 2.0
        lo = np.exp(-2.0 * (math.pi * self.tau * (f - self.center_hz)) ** 2)
        hi = np.exp(-2.0 * (math.pi * self.tau * (f + self.center_hz)) ** 2)
        return s * np.abs(lo - hi)

    def usable_band(self, f_hz, floor_db: float = -20.0):
        s = self.spectrum(f_hz)
        return s >= 10.0 ** (floor_db / 20.0) * s.max()

    @property
    def duration(self) -> float:
        return 2.0 * self.t0


def cpml_profiles(n_nodes: int, layers: int, delta: float, dt: float,
                  order: float, sigma_scale: float, alpha_max: float):
    """Recursion coefficients (b, a) for CPML psi updates at E-node positions
    (length n_nodes) and H half-node positions (length n_nodes - 1).

    sigma is graded polynomially toward the outer wall and scaled from the
    standard matched-layer optimum; alpha ramps down from alpha_max at the
    inner interface (complex-frequency shifting for grazing incidence).
    """
    import scipy.constants as const

    eta0 = math.sqrt(const.mu_0 / const.epsilon_0)
    sigma_max = sigma_scale * (order + 1.0) / (eta0 * delta)

    def coeffs(positions):
        b = np.zeros(len(positions))
        a = np.zeros(len(positions))
        for i, pos in enumerate(positions):
            rho = 0.0
            dist_lo = layers - pos
            dist_hi = pos - (n_nodes - 1 - layers)
            rho = max(dist_lo, dist_hi) / layers
            if rho <= 0:
                continue
            rho = min(rho, 1.0)
            sigma = sigma_max * rho**order
            alpha = alpha_max * (1.0 - rho)
            b[i] = math.exp(-(sigma / const.epsilon_0 + alpha / const.epsilon_0) * dt)
            a[i] = (
                sigma * (b[i] - 1.0) / (sigma + alpha) if sigma + alpha > 0 else 0.0
            )
        return b, a

    be, ae = coeffs(np.arange(n_nodes, dtype=float))
    bh, ah = coeffs(np.arange(n_nodes - 1, dtype=float) + 0.5)
    return (be, ae), (bh, ah)
