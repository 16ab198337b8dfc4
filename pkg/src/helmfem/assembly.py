"""Global assembly of the Helmholtz sesquilinear forms.

Volume part (all truncations):  k^{-2} (A grad u).grad v - c^{-2} u v,
with real nodal bases, so conjugation is a no-op at assembly time.
Impedance truncation adds -i k^{-1} <u, v> on the outer boundary; DtN
truncation adds the dense Hankel-symbol block from :mod:`helmfem.dtn`.

Matrices are scipy CSR with complex entries; duplicate COO entries are
summed in fixed order, so assembly is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .dtn import DtnSpec, assemble_dtn_boundary
from .fespace import FemSpace, gauss_1d, reference_edge, triangle_quadrature
from .mesh import TAG_OUTER
from .pml import PmlSpec, pml_coefficients

ComplexSparseMatrix = sp.csr_matrix

_CHUNK = 4096


@dataclass(frozen=True)
class FormSpec:
    """Which truncated Helmholtz form to assemble.

    ``a_coeff``/``c_coeff`` are physical coefficient fields (A(x) as an
    (n, 2, 2) array, c(x) as an (n,) array); defaults are the identity and 1.
    For PML truncation they apply only in the physical region r <= r_inner.
    """

    truncation: str
    k: float
    a_coeff: Callable | None = None
    c_coeff: Callable | None = None
    pml: PmlSpec | None = None
    dtn: DtnSpec | None = None

    def __post_init__(self):
        if self.truncation not in ("impedance", "pml", "dtn"):
            raise ValueError(f"unknown truncation {self.truncation!r}")
        if self.k <= 0:
            raise ValueError("k must be positive")
        if self.truncation == "pml" and self.pml is None:
            object.__setattr__(self, "pml", PmlSpec())
        if self.truncation == "dtn" and self.dtn is None:
            raise ValueError("dtn truncation needs a DtnSpec")


@dataclass(frozen=True)
class RhsFunctional:
    """G(v) = int g conj(v) over the volume, or over tagged boundary edges."""

    kind: str                 # "volume" or "boundary_trace"
    g: Callable               # (n, 2) points -> complex values
    tag: int = TAG_OUTER

    def __post_init__(self):
        if self.kind not in ("volume", "boundary_trace"):
            raise ValueError(f"unknown rhs kind {self.kind!r}")


def _coefficients_at(form: FormSpec, pts):
    """(A, c_inv2) at physical points, complex, shapes (n,2,2) and (n,)."""
    n = len(pts)
    if form.truncation == "pml":
        A, c_inv2 = pml_coefficients(form.pml, pts)
        if form.a_coeff is not None or form.c_coeff is not None:
            r = np.hypot(pts[:, 0], pts[:, 1])
            phys = r <= form.pml.r_inner
            if form.a_coeff is not None:
                A[phys] = np.asarray(form.a_coeff(pts[phys]), dtype=complex)
            if form.c_coeff is not None:
                c = np.asarray(form.c_coeff(pts[phys]), dtype=complex)
                c_inv2[phys] = 1.0 / c ** 2
        return A, c_inv2
    if form.a_coeff is not None:
        A = np.asarray(form.a_coeff(pts), dtype=complex)
    else:
        A = np.broadcast_to(np.eye(2, dtype=complex), (n, 2, 2))
    if form.c_coeff is not None:
        c = np.asarray(form.c_coeff(pts), dtype=complex)
        c_inv2 = 1.0 / c ** 2
    else:
        c_inv2 = np.ones(n, dtype=complex)
    return A, c_inv2


def assemble_form(space: FemSpace, form: FormSpec) -> ComplexSparseMatrix:
    """Assemble the complex-symmetric global matrix of the chosen form."""
    k = form.k
    qr = triangle_quadrature(2 * space.p + 2)
    phi = space.ref.eval_basis(qr.points)            # (nq, nb)
    dphi = space.ref.eval_basis_grad(qr.points)      # (nq, nb, 2)
    geom = space.geometry()
    nt = space.mesh.num_triangles
    nb = space.ref.num_nodes

    rows, cols, vals = [], [], []
    for lo in range(0, nt, _CHUNK):
        hi = min(lo + _CHUNK, nt)
        sl = slice(lo, hi)
        origin = geom["origin"][sl]
        J = geom["jacobian"][sl]
        detJ = geom["det"][sl]
        invJ = geom["inv"][sl]
        xq = origin[:, None, :] + np.einsum("eij,qj->eqi", J, qr.points)
        pts = xq.reshape(-1, 2)
        A, c_inv2 = _coefficients_at(form, pts)
        A = A.reshape(hi - lo, -1, 2, 2)
        c_inv2 = c_inv2.reshape(hi - lo, -1)

        grad = np.einsum("emd,qim->eqid", invJ, dphi)           # (E,nq,nb,2)
        Agrad = np.einsum("eqdc,eqjc->eqjd", A, grad)
        wdet = qr.weights[None, :] * detJ[:, None]              # (E,nq)
        stiff = np.einsum("eq,eqjd,eqid->eij", wdet, Agrad, grad)
        mass = np.einsum("eq,eq,qi,qj->eij", wdet, c_inv2, phi, phi)
        elem = stiff / k ** 2 - mass

        ed = space.elem_dofs[sl]
        rows.append(np.broadcast_to(ed[:, :, None], elem.shape).ravel())
        cols.append(np.broadcast_to(ed[:, None, :], elem.shape).ravel())
        vals.append(elem.ravel())

    if form.truncation == "impedance":
        r, c, v = _impedance_boundary(space, k)
        rows.append(r)
        cols.append(c)
        vals.append(v)
    elif form.truncation == "dtn":
        B, bdofs = assemble_dtn_boundary(space, form.dtn)
        rr, cc = np.meshgrid(bdofs, bdofs, indexing="ij")
        rows.append(rr.ravel())
        cols.append(cc.ravel())
        vals.append(B.ravel())

    n = space.num_dofs
    M = sp.coo_matrix(
        (np.concatenate(vals),
         (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n), dtype=complex)
    return M.tocsr()


def _impedance_boundary(space: FemSpace, k: float):
    """COO triplets of -i k^{-1} <u, v> over the outer boundary."""
    mesh = space.mesh
    sel = np.flatnonzero(mesh.boundary_tags == TAG_OUTER)
    if len(sel) == 0:
        raise ValueError("impedance form needs boundary edges tagged outer")
    t, w = gauss_1d(space.p + 2)
    trace = reference_edge(space.p).eval_basis(t)
    unit_mass = np.einsum("q,qi,qj->ij", w, trace, trace)
    rows, cols, vals = [], [], []
    for be in sel:
        va, vb = mesh.boundary_edges[be]
        ds = np.hypot(*(mesh.vertices[vb] - mesh.vertices[va]))
        dofs = space.edge_dof_ids(va, vb)
        rr, cc = np.meshgrid(dofs, dofs, indexing="ij")
        rows.append(rr.ravel())
        cols.append(cc.ravel())
        vals.append((-1j / k * ds * unit_mass).ravel())
    return (np.concatenate(rows), np.concatenate(cols),
            np.concatenate(vals))


def assemble_rhs(space: FemSpace, rhs: RhsFunctional, k: float) -> np.ndarray:
    """b_i = int g phi_i over the volume or over tagged boundary edges."""
    b = np.zeros(space.num_dofs, dtype=complex)
    if rhs.kind == "volume":
        qr = triangle_quadrature(2 * space.p + 2)
        phi = space.ref.eval_basis(qr.points)
        geom = space.geometry()
        nt = space.mesh.num_triangles
        for lo in range(0, nt, _CHUNK):
            hi = min(lo + _CHUNK, nt)
            sl = slice(lo, hi)
            xq = (geom["origin"][sl][:, None, :]
                  + np.einsum("eij,qj->eqi", geom["jacobian"][sl], qr.points))
            g = np.asarray(rhs.g(xq.reshape(-1, 2)),
                           dtype=complex).reshape(hi - lo, -1)
            if not np.all(np.isfinite(g)):
                raise ValueError("non-finite source values at quadrature points")
            wdet = qr.weights[None, :] * geom["det"][sl][:, None]
            be = np.einsum("eq,eq,qi->ei", wdet, g, phi)
            np.add.at(b, space.elem_dofs[sl], be)
    else:
        mesh = space.mesh
        sel = np.flatnonzero(mesh.boundary_tags == rhs.tag)
        t, w = gauss_1d(space.p + 2)
        trace = reference_edge(space.p).eval_basis(t)
        for bei in sel:
            va, vb = mesh.boundary_edges[bei]
            a_pt, b_pt = mesh.vertices[va], mesh.vertices[vb]
            pts = a_pt[None, :] + t[:, None] * (b_pt - a_pt)[None, :]
            ds = np.hypot(*(b_pt - a_pt))
            g = np.asarray(rhs.g(pts), dtype=complex)
            dofs = space.edge_dof_ids(va, vb)
            b[dofs] += ds * (w * g) @ trace
    return b


def apply_dirichlet(matrix: ComplexSparseMatrix, rhs: np.ndarray,
                    dofs: np.ndarray):
    """Symmetric elimination of homogeneous Dirichlet DOFs (unit diagonal,
    zero rhs, so the solution is exactly 0 there)."""
    dofs = np.asarray(dofs, dtype=np.int64)
    if len(dofs) == 0:
        return matrix, rhs
    n = matrix.shape[0]
    keep = np.ones(n)
    keep[dofs] = 0.0
    D = sp.diags(keep)
    pinned = np.zeros(n)
    pinned[dofs] = 1.0
    out = (D @ matrix @ D + sp.diags(pinned)).tocsr()
    rhs_out = rhs * keep
    return out, rhs_out


def apply_form_to_exact(space: FemSpace, form: FormSpec, u, grad_u,
                        v_coeffs: np.ndarray, quad_degree: int = 16) -> complex:
    """a(u, v_h) for an exact function u (callables for value and gradient)
    against the FE function with coefficients ``v_coeffs``, using quadrature
    of the given degree.  Used by the Galerkin-orthogonality checks."""
    k = form.k
    qr = triangle_quadrature(quad_degree)
    phi = space.ref.eval_basis(qr.points)
    dphi = space.ref.eval_basis_grad(qr.points)
    geom = space.geometry()
    nt = space.mesh.num_triangles
    total = 0.0 + 0.0j
    vbar = np.conj(v_coeffs)
    for lo in range(0, nt, _CHUNK):
        hi = min(lo + _CHUNK, nt)
        sl = slice(lo, hi)
        xq = (geom["origin"][sl][:, None, :]
              + np.einsum("eij,qj->eqi", geom["jacobian"][sl], qr.points))
        pts = xq.reshape(-1, 2)
        A, c_inv2 = _coefficients_at(form, pts)
        E = hi - lo
        A = A.reshape(E, -1, 2, 2)
        c_inv2 = c_inv2.reshape(E, -1)
        uval = np.asarray(u(pts), dtype=complex).reshape(E, -1)
        ugrad = np.asarray(grad_u(pts), dtype=complex).reshape(E, -1, 2)
        grad = np.einsum("emd,qim->eqid", geom["inv"][sl], dphi)
        vloc = vbar[space.elem_dofs[sl]]
        vval = np.einsum("ei,qi->eq", vloc, phi)
        vgrad = np.einsum("ei,eqid->eqd", vloc, grad)
        Au = np.einsum("eqdc,eqc->eqd", A, ugrad)
        wdet = qr.weights[None, :] * geom["det"][sl][:, None]
        total += np.einsum("eq,eqd,eqd->", wdet, Au, vgrad) / k ** 2
        total -= np.einsum("eq,eq,eq->", wdet, c_inv2, uval * vval)
    if form.truncation == "impedance":
        mesh = space.mesh
        t, w = gauss_1d(max(space.p + 2, quad_degree // 2))
        trace = reference_edge(space.p).eval_basis(t)
        for bei in np.flatnonzero(mesh.boundary_tags == TAG_OUTER):
            va, vb = mesh.boundary_edges[bei]
            a_pt, b_pt = mesh.vertices[va], mesh.vertices[vb]
            pts = a_pt[None, :] + t[:, None] * (b_pt - a_pt)[None, :]
            ds = np.hypot(*(b_pt - a_pt))
            uval = np.asarray(u(pts), dtype=complex)
            dofs = space.edge_dof_ids(va, vb)
            vval = trace @ vbar[dofs]
            total += -1j / k * ds * np.sum(w * uval * vval)
    elif form.truncation == "dtn":
        raise NotImplementedError(
            "a(u, v_h) with exact u is only needed for volume/impedance forms")
    return complex(total)


def export_matrix_txt(matrix: ComplexSparseMatrix, path) -> None:
    """Debug dump in coordinate format: 'i j re im' per entry."""
    coo = matrix.tocoo()
    with open(path, "w") as f:
        for i, j, v in zip(coo.row, coo.col, coo.data):
            f.write(f"{i} {j} {v.real:.17g} {v.imag:.17g}\n")
