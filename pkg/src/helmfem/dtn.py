"""Truncated Fourier-Hankel Dirichlet-to-Neumann map on a circle.

The symbol of mode n is H1'_n(kR)/H1_n(kR); the boundary block of the
sesquilinear form is

    B_ij = -(1/(2 pi R k)) * sum_{|n| <= n_max} sym(n) c_n(phi_j) conj(c_n(phi_i)),

with c_n(phi) = int_{boundary} phi e^{-i n theta} ds computed edge by edge
on the polygonal outer boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fespace import FemSpace, gauss_1d, reference_edge
from .hankel import hankel1_ratio_seq
from .mesh import TAG_OUTER


@dataclass(frozen=True)
class DtnSpec:
    radius: float
    k: float
    n_max: int = 0   # 0 = auto: ceil(2 k R) + 32

    def __post_init__(self):
        if self.radius <= 0 or self.k <= 0:
            raise ValueError("radius and k must be positive")
        n_max = self.n_max or default_n_max(self.k, self.radius)
        if n_max < math.ceil(self.k * self.radius):
            raise ValueError(f"n_max={n_max} below ceil(kR)")
        object.__setattr__(self, "n_max", n_max)


def default_n_max(k: float, radius: float) -> int:
    return int(math.ceil(2.0 * k * radius)) + 32


def dtn_symbols(spec: DtnSpec) -> np.ndarray:
    """Symbols for n = 0..n_max (even in n, so this covers -n too)."""
    return hankel1_ratio_seq(spec.n_max, spec.k * spec.radius)


def dtn_symbol(spec: DtnSpec, n: int) -> complex:
    """H1'_n(kR)/H1_n(kR)."""
    if abs(n) > spec.n_max:
        raise ValueError(f"|n|={abs(n)} exceeds n_max={spec.n_max}")
    return complex(hankel1_ratio_seq(abs(n), spec.k * spec.radius)[abs(n)])


def boundary_fourier_coeffs(space: FemSpace, n_max: int,
                            tag: int = TAG_OUTER):
    """(C, bdofs): C[j, i] = c_{n_j}(phi_{bdofs[i]}) for n_j = -n_max..n_max.

    Integrals use the polygonal arc-length parameterization with per-edge
    Gauss quadrature of order p + 2.
    """
    mesh = space.mesh
    sel = np.flatnonzero(mesh.boundary_tags == tag)
    if len(sel) == 0:
        raise ValueError(f"no boundary edges with tag {tag}")
    p = space.p
    t, w = gauss_1d(p + 2)
    trace = reference_edge(p).eval_basis(t)          # (nq, p+1)

    dof_rows = []
    for be in sel:
        va, vb = mesh.boundary_edges[be]
        dof_rows.append(space.edge_dof_ids(va, vb))
    bdofs = np.unique(np.concatenate(dof_rows))
    pos = {d: i for i, d in enumerate(bdofs)}

    ns = np.arange(-n_max, n_max + 1)
    C = np.zeros((len(ns), len(bdofs)), dtype=complex)
    for be, dofs in zip(sel, dof_rows):
        va, vb = mesh.boundary_edges[be]
        a, b = mesh.vertices[va], mesh.vertices[vb]
        pts = a[None, :] + t[:, None] * (b - a)[None, :]
        ds = np.hypot(*(b - a))
        theta = np.arctan2(pts[:, 1], pts[:, 0])
        phase = np.exp(-1j * np.outer(ns, theta))    # (nn, nq)
        contrib = phase @ (w[:, None] * trace) * ds  # (nn, p+1)
        cols = [pos[d] for d in dofs]
        C[:, cols] += contrib
    return C, bdofs


def assemble_dtn_boundary(space: FemSpace, spec: DtnSpec,
                          tag: int = TAG_OUTER):
    """(B, bdofs): dense complex-symmetric DtN block on the outer-boundary
    DOFs, to be added to the volume form."""
    C, bdofs = boundary_fourier_coeffs(space, spec.n_max, tag)
    sym_half = dtn_symbols(spec)
    ns = np.arange(-spec.n_max, spec.n_max + 1)
    sym = sym_half[np.abs(ns)]
    B = -(C.conj().T * sym) @ C / (2.0 * math.pi * spec.radius * spec.k)
    return B, bdofs
