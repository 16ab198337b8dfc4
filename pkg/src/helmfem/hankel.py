"""Bessel/Hankel evaluation for the DtN symbol.

J_n(z) comes from Miller's backward recurrence with the standard
normalization J_0 + 2*sum J_{2m} = 1; Y_0 and Y_1 come from the ascending
series (small z) or the Hankel asymptotic expansion (large z), and higher
orders from the forward recurrence.  The ratio H1'_n/H1_n is formed with a
common rescaling of the (J, Y) pair so that no overflow surfaces even for
n >> z.
"""

from __future__ import annotations

import math

import numpy as np

_EULER_GAMMA = 0.5772156649015328606
_SERIES_CUTOFF = 12.0
_RESCALE = 1e-250
_RESCALE_LIMIT = 1e250


def bessel_j_seq(nmax: int, z: float) -> np.ndarray:
    """J_0(z) .. J_nmax(z) by backward recurrence."""
    if z <= 0:
        raise ValueError("z must be positive")
    start = max(nmax, int(z)) + 16
    start += int(2.0 * math.sqrt(start))
    if start % 2:
        start += 1
    out = np.zeros(nmax + 1)
    bp, bc = 0.0, 1e-30
    norm = 0.0
    for n in range(start, -1, -1):
        if n <= nmax:
            out[n] = bc
        if n % 2 == 0:
            norm += 2.0 * bc
        bp, bc = bc, (2.0 * n / z) * bc - bp if n > 0 else bc
        if abs(bp) > _RESCALE_LIMIT:
            bp *= _RESCALE
            bc *= _RESCALE
            norm *= _RESCALE
            out *= _RESCALE
    norm -= out[0] if nmax >= 0 else 0.0  # J_0 counted once
    return out / norm


def bessel_y01(z: float) -> tuple[float, float]:
    """(Y_0(z), Y_1(z))."""
    if z <= 0:
        raise ValueError("z must be positive")
    if z < _SERIES_CUTOFF:
        return _y01_series(z)
    return _y01_asymptotic(z)


def _j01_series(z):
    x = 0.25 * z * z
    j0 = term = 1.0
    for m in range(1, 60):
        term *= -x / (m * m)
        j0 += term
        if abs(term) < 1e-18 * abs(j0) + 1e-300:
            break
    j1 = term = 0.5 * z
    for m in range(1, 60):
        term *= -x / (m * (m + 1))
        j1 += term
        if abs(term) < 1e-18 * abs(j1) + 1e-300:
            break
    return j0, j1


def _y01_series(z):
    j0, j1 = _j01_series(z)
    lg = math.log(0.5 * z) + _EULER_GAMMA
    x = 0.25 * z * z

    s = 0.0
    term = 1.0
    harm = 0.0
    for m in range(1, 60):
        term *= x / (m * m)
        harm += 1.0 / m
        contrib = (-1.0) ** (m + 1) * harm * term
        s += contrib
        if abs(contrib) < 1e-18 * (abs(s) + 1.0):
            break
    y0 = (2.0 / math.pi) * (lg * j0 + s)

    s1 = 0.0
    term = 1.0
    hm, hm1 = 0.0, 1.0
    for m in range(0, 60):
        if m > 0:
            term *= x / (m * (m + 1))
            hm += 1.0 / m
            hm1 += 1.0 / (m + 1)
        contrib = (-1.0) ** m * (hm + hm1) * term
        s1 += contrib
        if abs(contrib) < 1e-18 * (abs(s1) + 1.0):
            break
    y1 = (2.0 / math.pi) * (lg * j1 - 1.0 / z - 0.25 * z * s1)
    return y0, y1


def _pq_asymptotic(nu, z):
    """P_nu, Q_nu of the Hankel asymptotic expansion, adaptively truncated."""
    mu = 4.0 * nu * nu
    p, q = 1.0, 0.0
    t = 1.0
    prev = math.inf
    for m in range(1, 40):
        t *= (mu - (2 * m - 1) ** 2) / (m * 8.0 * z)
        if abs(t) >= prev:
            break
        prev = abs(t)
        if m % 2 == 1:
            q += t * (-1.0) ** ((m - 1) // 2)
        else:
            p += t * (-1.0) ** (m // 2)
        if abs(t) < 1e-17:
            break
    return p, q


def _y01_asymptotic(z):
    amp = math.sqrt(2.0 / (math.pi * z))
    out = []
    for nu in (0.0, 1.0):
        p, q = _pq_asymptotic(nu, z)
        chi = z - (0.5 * nu + 0.25) * math.pi
        out.append(amp * (p * math.sin(chi) + q * math.cos(chi)))
    return out[0], out[1]


def hankel1_ratio_seq(nmax: int, z: float) -> np.ndarray:
    """r_n = H1'_n(z) / H1_n(z) for n = 0..nmax (also valid for -n).

    Uses H1'_n = H1_{n-1} - (n/z) H1_n and, for n = 0, H1'_0 = -H1_1.
    """
    if z <= 0:
        raise ValueError("z must be positive")
    nmax = max(nmax, 1)
    J = bessel_j_seq(nmax, z)
    y0, y1 = bessel_y01(z)
    sym = np.empty(nmax + 1, dtype=complex)
    jp, jc = J[0], J[1]
    yp, yc = y0, y1
    sym[0] = -(jc + 1j * yc) / (jp + 1j * yp)
    scale = 1.0
    for n in range(1, nmax + 1):
        sym[n] = (jp + 1j * yp) / (jc + 1j * yc) - n / z
        if n < nmax:
            ynext = (2.0 * n / z) * yc - yp
            jnext = J[n + 1] * scale
            yp, yc = yc, ynext
            jp, jc = jc, jnext
            if abs(yc) > _RESCALE_LIMIT:
                yp *= _RESCALE
                yc *= _RESCALE
                jp *= _RESCALE
                jc *= _RESCALE
                scale *= _RESCALE
    return sym
