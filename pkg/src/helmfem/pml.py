"""Radial PML coefficients.

The complex scaling r -> r + i*f_theta(r) turns on at ``r_inner`` with the
quadratic ramp f(r) = (r - r_inner)^2 / (r_outer - r_inner) (truncation
happens before linear scaling is reached).  The volume form uses the 2x2
tensor A = H diag(beta/alpha, alpha/beta) H^T (H = rotation by the polar
angle) and the coefficient c^{-2} = alpha*beta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PmlSpec:
    r_inner: float = 1.0
    r_outer: float = 1.5
    theta: float = math.pi / 4

    def __post_init__(self):
        if not 0 < self.r_inner < self.r_outer:
            raise ValueError("need 0 < r_inner < r_outer")
        if not 0 < self.theta < math.pi / 2:
            raise ValueError("need 0 < theta < pi/2")


def scaling_profile(spec: PmlSpec, r):
    """(f_theta(r), f_theta'(r)); zero with zero slope for r <= r_inner."""
    r = np.asarray(r, dtype=float)
    ramp = np.maximum(r - spec.r_inner, 0.0)
    width = spec.r_outer - spec.r_inner
    t = math.tan(spec.theta)
    f = t * ramp ** 2 / width
    fp = t * 2.0 * ramp / width
    if f.ndim == 0:
        return float(f), float(fp)
    return f, fp


def alpha_beta(spec: PmlSpec, r):
    """alpha = 1 + i f_theta'(r), beta = 1 + i f_theta(r)/r."""
    r = np.asarray(r, dtype=float)
    f, fp = scaling_profile(spec, r)
    alpha = 1.0 + 1j * np.asarray(fp)
    beta = 1.0 + 1j * np.asarray(f) / r
    if alpha.ndim == 0:
        return complex(alpha), complex(beta)
    return alpha, beta


def pml_tensor_2d(spec: PmlSpec, pt):
    """(A, c_inv2) at one point: A identity and c_inv2 = 1 for r <= r_inner."""
    A, c = pml_coefficients(spec, np.asarray(pt, dtype=float)[None, :])
    return A[0], complex(c[0])


def pml_coefficients(spec: PmlSpec, pts):
    """Vectorized (A, c_inv2) over an (n, 2) array of points.

    A = H D H^T expanded in Cartesian components; continuous across
    r = r_inner where alpha = beta = 1.
    """
    pts = np.asarray(pts, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    r = np.hypot(x, y)
    safe_r = np.where(r > 0, r, 1.0)
    alpha, beta = alpha_beta(spec, safe_r)
    alpha = np.where(r > spec.r_inner, alpha, 1.0 + 0j)
    beta = np.where(r > spec.r_inner, beta, 1.0 + 0j)
    d1 = beta / alpha
    d2 = alpha / beta
    c, s = x / safe_r, y / safe_r
    A = np.empty((len(pts), 2, 2), dtype=complex)
    A[:, 0, 0] = d1 * c ** 2 + d2 * s ** 2
    A[:, 1, 1] = d1 * s ** 2 + d2 * c ** 2
    A[:, 0, 1] = A[:, 1, 0] = (d1 - d2) * c * s
    c_inv2 = alpha * beta
    return A, c_inv2
