"""Exact solutions, boundary data and source terms for the experiments."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

BUMP_RADIUS = 0.1

CURVED_MIRROR_QUASI_RESONANCE = 95.838
CURVED_MIRROR_QUASI_RESONANCE_PROVENANCE = (
    "tabulated constant: wavenumber of the strongest quasi-resonance near "
    "k=100 for the curved-mirror cavity (root of a Mathieu-function "
    "eigenvalue problem for the inscribed ellipse; computed externally)")


@dataclass(frozen=True)
class PlaneWave:
    """u = exp(i k (cos(theta) x + sin(theta) y))."""

    k: float
    theta: float = 0.0

    @property
    def direction(self) -> np.ndarray:
        return np.array([math.cos(self.theta), math.sin(self.theta)])


def plane_wave_eval(pw: PlaneWave, pts):
    """(value, gradient); gradient = i k d * value."""
    pts = np.asarray(pts, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    d = pw.direction
    val = np.exp(1j * pw.k * (pts @ d))
    grad = 1j * pw.k * d[None, :] * val[:, None]
    if single:
        return complex(val[0]), grad[0]
    return val, grad


def impedance_data_plane_wave(pw: PlaneWave, pts, normals):
    """Trace data g = k^{-1} d_n u - i u = i (d.n - 1) u for the plane wave."""
    pts = np.asarray(pts, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    normals = np.atleast_2d(np.asarray(normals, dtype=float))
    val, _ = plane_wave_eval(pw, pts)
    g = 1j * (normals @ pw.direction - 1.0) * val
    return complex(g[0]) if single else g


def _chi(t):
    """One-variable bump: exp(5 t^2 / (t^2 - 0.01)) for |t| < 0.1, else 0."""
    t = np.asarray(t, dtype=float)
    c = BUMP_RADIUS ** 2
    inside = np.abs(t) < BUMP_RADIUS
    den = np.where(inside, t ** 2 - c, -1.0)
    return np.where(inside, np.exp(5.0 * t ** 2 / den), 0.0)


def _chi_derivs(t):
    """(chi, chi', chi'') from phi = 5 t^2/(t^2 - c):
    phi' = -10 c t/(t^2-c)^2, phi'' = 10 c (3 t^2 + c)/(t^2-c)^3."""
    t = np.asarray(t, dtype=float)
    c = BUMP_RADIUS ** 2
    inside = np.abs(t) < BUMP_RADIUS
    den = np.where(inside, t ** 2 - c, -1.0)
    chi = np.where(inside, np.exp(5.0 * t ** 2 / den), 0.0)
    p1 = -10.0 * c * t / den ** 2
    p2 = 10.0 * c * (3.0 * t ** 2 + c) / den ** 3
    d1 = np.where(inside, p1 * chi, 0.0)
    d2 = np.where(inside, (p2 + p1 ** 2) * chi, 0.0)
    return chi, d1, d2


@dataclass(frozen=True)
class BumpSource:
    """Artificial source g = Laplacian(u) + k^2 u for
    u(x, y) = chi(x) chi(y) exp(i k x), supported in [-0.1, 0.1]^2."""

    k: float


def bump_field_eval(src: BumpSource, pts):
    """(u, grad u) for the bump field itself (the exact solution of the
    manufactured scattering problem)."""
    pts = np.asarray(pts, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    x, y = pts[:, 0], pts[:, 1]
    cx, dx, _ = _chi_derivs(x)
    cy, dy, _ = _chi_derivs(y)
    e = np.exp(1j * src.k * x)
    u = cx * cy * e
    gx = (dx + 1j * src.k * cx) * cy * e
    gy = cx * dy * e
    grad = np.column_stack([gx, gy])
    if single:
        return complex(u[0]), grad[0]
    return u, grad


def bump_source_eval(src: BumpSource, pts):
    """g = Laplacian(u) + k^2 u, from the closed-form derivatives of chi."""
    pts = np.asarray(pts, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    x, y = pts[:, 0], pts[:, 1]
    cx, dx, ddx = _chi_derivs(x)
    cy, dy, ddy = _chi_derivs(y)
    e = np.exp(1j * src.k * x)
    # Laplacian(u) + k^2 u = e^{ikx} (chi'' (x) chi(y) + 2ik chi'(x) chi(y)
    #                                  + chi(x) chi''(y))
    g = e * (ddx * cy + 2j * src.k * dx * cy + cx * ddy)
    return complex(g[0]) if single else g


def flat_mirror_quasi_resonance(L: float, b: float, n: int) -> float:
    """k_n = n pi / (L - b)."""
    if not (L > b > 0):
        raise ValueError("need L > b > 0")
    if n < 1:
        raise ValueError("need n >= 1")
    return n * math.pi / (L - b)


def curved_mirror_quasi_resonance() -> float:
    """Tabulated quasi-resonance for the curved-mirror cavity; see
    CURVED_MIRROR_QUASI_RESONANCE_PROVENANCE."""
    return CURVED_MIRROR_QUASI_RESONANCE
