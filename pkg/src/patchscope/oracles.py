"""Independent analytic references: Mie series for a conducting sphere,
physical-optics plate, Hertzian dipole, and transfer-matrix slab.

These share only elementary/special functions with the solver path, and the
package-wide exp(-i*omega*t) convention (passive media: Im >= 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import spherical_jn, spherical_yn

from .constants import C0, ETA0


@dataclass(frozen=True)
class MieSeriesConfig:
    """PEC-sphere Mie evaluation setup; truncation None selects the
    ka + 4 ka^(1/3) + 2 rule."""

    radius_m: float
    wavelength_m: float
    truncation: int | None = None

    def __post_init__(self):
        if self.radius_m <= 0 or self.wavelength_m <= 0:
            raise ValueError("radius and wavelength must be positive")
        if self.truncation is not None and self.truncation < 1:
            raise ValueError("truncation must be >= 1")


def mie_pec_sphere_rcs(cfg: MieSeriesConfig) -> float:
    """Monostatic RCS (m^2) of a perfectly conducting sphere.

    sigma = (lambda^2 / 4 pi) |sum (-1)^n (2n+1) (a_n - b_n)|^2 with
    a_n = j_n(x)/h_n(x) and b_n = [x j_n(x)]' / [x h_n(x)]', x = ka.
    Terms are added until the last relative contribution falls below 1e-12.
    """
    lam = cfg.wavelength_m
    x = 2.0 * math.pi * cfg.radius_m / lam
    nmax = cfg.truncation
    if nmax is None:
        nmax = int(math.ceil(x + 4.0 * x ** (1.0 / 3.0) + 2.0))
    total = 0.0 + 0.0j
    n = 1
    while True:
        jn = spherical_jn(n, x)
        jnp = spherical_jn(n, x, derivative=True)
        yn = spherical_yn(n, x)
        ynp = spherical_yn(n, x, derivative=True)
        hn = jn + 1j * yn
        hnp = jnp + 1j * ynp
        an = jn / hn
        bn = (jn + x * jnp) / (hn + x * hnp)
        term = (-1.0) ** n * (2 * n + 1) * (an - bn)
        total += term
        if n >= nmax and abs(term) < 1e-12 * max(abs(total), 1e-300):
            break
        if n > nmax + 1000:
            break
        n += 1
    return lam**2 / (4.0 * math.pi) * abs(total) ** 2


def po_plate_rcs(area_m2: float, wavelength_m: float) -> float:
    """Broadside physical-optics RCS of a flat plate: 4 pi A^2 / lambda^2."""
    if area_m2 <= 0 or wavelength_m <= 0:
        raise ValueError("area and wavelength must be positive")
    return 4.0 * math.pi * area_m2**2 / wavelength_m**2


def hertzian_dipole_pattern(theta_rad):
    """Normalized radiation intensity of a z-directed Hertzian dipole."""
    return np.sin(theta_rad) ** 2


HERTZIAN_DIPOLE_DIRECTIVITY = 1.5


def hertzian_dipole_fields(points_m, f_hz: float, current_moment_am: float = 1.0):
    """Exact E and H phasors of a z-directed Hertzian dipole at the origin.

    points_m: (..., 3) cartesian positions. Returns (E, H) arrays of shape
    (..., 3) in V/m and A/m under the exp(-i*omega*t) convention.
    """
    pts = np.asarray(points_m, dtype=float)
    x, y, z = pts[..., 0], pts[..., 1], pts[..., 2]
    r = np.sqrt(x * x + y * y + z * z)
    if np.any(r == 0):
        raise ValueError("field point at the dipole location")
    k = 2.0 * math.pi * f_hz / C0
    rho = np.hypot(x, y)
    cth = z / r
    sth = rho / r
    # Azimuth unit vectors; on the z-axis phi is irrelevant (sin(theta)=0).
    with np.errstate(invalid="ignore", divide="ignore"):
        cph = np.where(rho > 0, x / np.where(rho > 0, rho, 1.0), 1.0)
        sph = np.where(rho > 0, y / np.where(rho > 0, rho, 1.0), 0.0)

    il = current_moment_am
    kr = k * r
    # Balanis small-dipole closed forms, conjugated into exp(-i w t).
    phase = np.exp(-1j * kr)
    er = ETA0 * il * cth / (2 * math.pi * r**2) * (1 + 1 / (1j * kr)) * phase
    eth = (
        1j
        * ETA0
        * k
        * il
        * sth
        / (4 * math.pi * r)
        * (1 + 1 / (1j * kr) - 1 / kr**2)
        * phase
    )
    hph = 1j * k * il * sth / (4 * math.pi * r) * (1 + 1 / (1j * kr)) * phase
    er, eth, hph = np.conj(er), np.conj(eth), np.conj(hph)

    rhat = np.stack([sth * cph, sth * sph, cth], axis=-1)
    that = np.stack([cth * cph, cth * sph, -sth], axis=-1)
    phat = np.stack([-sph, cph, np.zeros_like(sph)], axis=-1)
    e = er[..., None] * rhat + eth[..., None] * that
    h = hph[..., None] * phat
    return e, h


def hertzian_dipole_power(f_hz: float, current_moment_am: float = 1.0) -> float:
    """Total radiated power (W) of the dipole in hertzian_dipole_fields."""
    k = 2.0 * math.pi * f_hz / C0
    return ETA0 * k**2 * current_moment_am**2 / (12.0 * math.pi)


def slab_sparams(eps_r: complex, mu_r: complex, d_m: float, f_hz):
    """Two-port S-parameters of a homogeneous slab in vacuum, referenced to its
    faces (transfer matrix, normal incidence).

    Passive inputs have Im(eps_r) >= 0 and Im(mu_r) >= 0; the refractive index
    root is n = sqrt(eps) sqrt(mu) (principal branches), making Im(n) >= 0 and
    Re(z) >= 0 for passive media, including double-negative ones.
    """
    if d_m < 0:
        raise ValueError("slab thickness must be >= 0")
    f = np.asarray(f_hz, dtype=float)
    eps = complex(eps_r)
    mu = complex(mu_r)
    if eps.imag < -1e-12 or mu.imag < -1e-12:
        raise ValueError("active medium: Im(eps_r), Im(mu_r) must be >= 0")
    n = np.sqrt(complex(eps)) * np.sqrt(complex(mu))
    z = np.sqrt(complex(mu)) / np.sqrt(complex(eps))
    k0 = 2.0 * math.pi * f / C0
    p = np.exp(1j * n * k0 * d_m)
    r = (z - 1.0) / (z + 1.0)
    den = 1.0 - r**2 * p**2
    s11 = r * (1.0 - p**2) / den
    s21 = (1.0 - r**2) * p / den
    return s11, s21
