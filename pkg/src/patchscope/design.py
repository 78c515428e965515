"""Closed-form antenna design math: patch sizing, scattering-mode combination,
and two-reflector cancellation estimates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy.special import sici

from .constants import C0
from .errors import FormulaDomainError, PassivityError


@dataclass(frozen=True)
class PatchDims:
    """Transmission-line-model dimensions of a rectangular patch (SI meters)."""

    width: float
    length: float
    eps_eff: float
    delta_l: float

    def __post_init__(self):
        if self.width <= 0 or self.length <= 0:
            raise FormulaDomainError("patch dimensions must be positive")
        if self.eps_eff < 1:
            raise FormulaDomainError("effective permittivity below 1")
        if self.delta_l <= 0:
            raise FormulaDomainError("length extension must be positive")


@dataclass(frozen=True)
class RcsDecomposition:
    """Structural and antenna-mode RCS (m^2) with their relative phase.

    The phase is normalized to (-pi, pi] at construction.
    """

    structural_m2: float
    antenna_mode_m2: float
    phase_rad: float = field(default=0.0)

    def __post_init__(self):
        if self.structural_m2 < 0 or self.antenna_mode_m2 < 0:
            raise ValueError("RCS components must be non-negative")
        phi = math.remainder(self.phase_rad, 2 * math.pi)
        if phi <= -math.pi:
            phi += 2 * math.pi
        object.__setattr__(self, "phase_rad", phi)


def size_patch(f0_hz: float, eps_r: float, h_m: float) -> PatchDims:
    """Size a rectangular patch with the standard transmission-line model.

    W = c/(2 f0) * sqrt(2/(eps_r+1)); eps_eff from the closed-form microstrip
    mixing rule; Hammerstad length extension; L = c/(2 f0 sqrt(eps_eff)) - 2 dL.
    Valid for W/h >= 1.
    """
    if f0_hz <= 0:
        raise FormulaDomainError("f0 must be positive")
    if eps_r < 1:
        raise FormulaDomainError("eps_r must be >= 1")
    if h_m <= 0:
        raise FormulaDomainError("substrate height must be positive")

    w = C0 / (2 * f0_hz) * math.sqrt(2.0 / (eps_r + 1.0))
    if w / h_m < 1:
        raise FormulaDomainError(
            f"W/h = {w / h_m:.3g} < 1: outside transmission-line-model validity"
        )
    eps_eff = (eps_r + 1.0) / 2.0 + (eps_r - 1.0) / 2.0 / math.sqrt(1.0 + 12.0 * h_m / w)
    dl = (
        0.412
        * h_m
        * (eps_eff + 0.3)
        * (w / h_m + 0.264)
        / ((eps_eff - 0.258) * (w / h_m + 0.8))
    )
    length = C0 / (2 * f0_hz * math.sqrt(eps_eff)) - 2 * dl
    return PatchDims(width=w, length=length, eps_eff=eps_eff, delta_l=dl)


def overall_rcs(d: RcsDecomposition) -> float:
    """Combine structural and antenna-mode RCS: |sqrt(ss) + sqrt(sa) e^(i phi)|^2.

    Tiny negative rounding residues are clamped to zero.
    """
    sigma = (
        d.structural_m2
        + d.antenna_mode_m2
        + 2.0 * math.sqrt(d.structural_m2 * d.antenna_mode_m2) * math.cos(d.phase_rad)
    )
    return max(sigma, 0.0)


def pcm_cancellation(gamma1: complex, gamma2: complex) -> float:
    """Backscatter reduction (dB) of a two-section reflector versus a uniform
    perfect reflector: 20 log10 |(G1+G2)/2|.

    Returns -inf for exact cancellation. Raises for non-passive inputs.
    """
    tol = 1e-9
    if abs(gamma1) > 1 + tol or abs(gamma2) > 1 + tol:
        raise PassivityError(
            f"|reflection| exceeds 1: |G1|={abs(gamma1):.6g}, |G2|={abs(gamma2):.6g}"
        )
    mean = abs(gamma1 + gamma2) / 2.0
    if mean == 0.0:
        return float("-inf")
    return 20.0 * math.log10(mean)


def patch_resonant_frequency(
    length_m: float, width_m: float, eps_r: float, h_m: float
) -> float:
    """Transmission-line-model resonance of a patch with known dimensions
    (inverse of size_patch for a fixed width)."""
    if min(length_m, width_m, h_m) <= 0 or eps_r < 1:
        raise FormulaDomainError("dimensions must be positive and eps_r >= 1")
    eps_eff = (eps_r + 1.0) / 2.0 + (eps_r - 1.0) / 2.0 / math.sqrt(
        1.0 + 12.0 * h_m / width_m
    )
    dl = (
        0.412
        * h_m
        * (eps_eff + 0.3)
        * (width_m / h_m + 0.264)
        / ((eps_eff - 0.258) * (width_m / h_m + 0.8))
    )
    return C0 / (2.0 * math.sqrt(eps_eff) * (length_m + 2.0 * dl))


def patch_edge_resistance(f0_hz: float, width_m: float) -> float:
    """Edge input resistance of a resonant patch from the single-slot
    conductance G1 = I1/(120 pi^2), I1 the standard radiation integral."""
    if f0_hz <= 0 or width_m <= 0:
        raise FormulaDomainError("frequency and width must be positive")
    x = 2 * math.pi * f0_hz / C0 * width_m
    si, _ = sici(x)
    i1 = -2.0 + math.cos(x) + x * si + math.sin(x) / x
    g1 = i1 / (120.0 * math.pi**2)
    return 1.0 / (2.0 * g1)


def probe_inset(length_m: float, r_edge_ohm: float, z0_ohm: float = 50.0) -> float:
    """Distance from the radiating edge where the cavity-model input
    resistance R_edge cos^2(pi x / L) equals z0."""
    if not 0 < z0_ohm <= r_edge_ohm:
        raise FormulaDomainError(
            f"target {z0_ohm} ohm outside (0, R_edge={r_edge_ohm:.1f}]"
        )
    return length_m / math.pi * math.acos(math.sqrt(z0_ohm / r_edge_ohm))


def to_dbsm(sigma_m2: float) -> float:
    """RCS in decibels relative to one square meter."""
    if sigma_m2 <= 0:
        return float("-inf")
    return 10.0 * math.log10(sigma_m2)


def from_dbsm(dbsm: float) -> float:
    return 10.0 ** (dbsm / 10.0)


def db20(x: float) -> float:
    """Amplitude ratio in dB; -inf for zero."""
    mag = abs(x)
    if mag == 0:
        return float("-inf")
    return 20.0 * math.log10(mag)
