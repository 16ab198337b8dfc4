"""k-weighted Sobolev norms over tagged or geometric subdomains.

The H^1_k norm is the broken element sum of k^{-2}|grad v|^2 + |v|^2;
subdomain restriction selects whole elements (a triangle belongs to a
box/ball selector iff its centroid does).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fespace import FemField, FemSpace, triangle_quadrature


class EmptySelectionError(ValueError):
    pass


@dataclass(frozen=True)
class Selector:
    """Element subset: whole mesh, a region tag, a box, or a ball."""

    kind: str = "all"
    tag: int = 0
    bounds: tuple = ()

    @staticmethod
    def all() -> "Selector":
        return Selector("all")

    @staticmethod
    def region(tag: int) -> "Selector":
        return Selector("region", tag=tag)

    @staticmethod
    def box(x0, x1, y0, y1) -> "Selector":
        return Selector("box", bounds=(x0, x1, y0, y1))

    @staticmethod
    def ball(cx, cy, r) -> "Selector":
        return Selector("ball", bounds=(cx, cy, r))

    def elements(self, mesh) -> np.ndarray:
        if self.kind == "all":
            idx = np.arange(mesh.num_triangles)
        elif self.kind == "region":
            idx = np.flatnonzero(mesh.tri_regions == self.tag)
        else:
            c = mesh.centroids()
            if self.kind == "box":
                x0, x1, y0, y1 = self.bounds
                m = ((c[:, 0] >= x0) & (c[:, 0] <= x1)
                     & (c[:, 1] >= y0) & (c[:, 1] <= y1))
            else:
                cx, cy, r = self.bounds
                m = np.hypot(c[:, 0] - cx, c[:, 1] - cy) <= r
            idx = np.flatnonzero(m)
        if len(idx) == 0:
            raise EmptySelectionError(f"selector {self} matches no elements")
        return idx


def _field_at_quadrature(field: FemField, elems, quad_degree=None):
    """(weights*|detJ|, values, gradients) at quadrature points of ``elems``."""
    space = field.space
    qr = triangle_quadrature(quad_degree or 2 * space.p + 2)
    phi = space.ref.eval_basis(qr.points)
    dphi = space.ref.eval_basis_grad(qr.points)
    geom = space.geometry()
    invJ = geom["inv"][elems]
    wdet = qr.weights[None, :] * geom["det"][elems][:, None]
    local = field.coeffs[space.elem_dofs[elems]]
    vals = np.einsum("ei,qi->eq", local, phi)
    gref = np.einsum("ei,qid->eqd", local, dphi)
    grads = np.einsum("emd,eqm->eqd", invJ, gref)
    return wdet, vals, grads


def _exact_at_quadrature(space: FemSpace, elems, u, grad_u, quad_degree=None):
    qr = triangle_quadrature(quad_degree or 2 * space.p + 2)
    geom = space.geometry()
    xq = (geom["origin"][elems][:, None, :]
          + np.einsum("eij,qj->eqi", geom["jacobian"][elems], qr.points))
    pts = xq.reshape(-1, 2)
    E = len(elems)
    wdet = qr.weights[None, :] * geom["det"][elems][:, None]
    vals = np.asarray(u(pts), dtype=complex).reshape(E, -1)
    grads = None
    if grad_u is not None:
        grads = np.asarray(grad_u(pts), dtype=complex).reshape(E, -1, 2)
    return wdet, vals, grads


def _resolve(target, k, selector, space, grad, quad_degree):
    if isinstance(target, FemField):
        sp_ = target.space
        elems = (selector or Selector.all()).elements(sp_.mesh)
        return _field_at_quadrature(target, elems, quad_degree)
    if space is None:
        raise ValueError("an exact-function norm needs space=")
    elems = (selector or Selector.all()).elements(space.mesh)
    return _exact_at_quadrature(space, elems, target, grad, quad_degree)


def l2_norm(target, selector=None, *, space=None, quad_degree=None) -> float:
    """L2 norm of a FemField or an exact callable over the selection."""
    wdet, vals, _ = _resolve(target, None, selector, space, None, quad_degree)
    return float(np.sqrt(np.sum(wdet * np.abs(vals) ** 2)))


def h1k_norm(target, k, selector=None, *, space=None, grad=None,
             quad_degree=None) -> float:
    """sqrt of sum over selected elements of k^{-2}|grad v|^2 + |v|^2."""
    wdet, vals, grads = _resolve(target, k, selector, space, grad, quad_degree)
    if grads is None:
        raise ValueError("h1k_norm of an exact function needs grad=")
    e = (np.sum(wdet * np.abs(vals) ** 2)
         + np.sum(wdet[..., None] * np.abs(grads) ** 2) / k ** 2)
    return float(np.sqrt(e))


@dataclass(frozen=True)
class ErrorNorms:
    l2_err: float
    h1k_err: float
    rel_l2: float
    rel_h1k: float
    l2_exact: float
    h1k_exact: float
    zero_denominator: bool


def error_norms(u_h: FemField, u, grad_u, k, selector=None,
                quad_degree=None) -> ErrorNorms:
    """Quadrature error integrals of u_h against an exact (u, grad u);
    relative values divide by the exact norms on the same selection."""
    space = u_h.space
    elems = (selector or Selector.all()).elements(space.mesh)
    wdet, fv, fg = _field_at_quadrature(u_h, elems, quad_degree)
    _, ev, eg = _exact_at_quadrature(space, elems, u, grad_u, quad_degree)
    dv, dg = fv - ev, fg - eg
    l2e = float(np.sqrt(np.sum(wdet * np.abs(dv) ** 2)))
    h1e = float(np.sqrt(np.sum(wdet * np.abs(dv) ** 2)
                        + np.sum(wdet[..., None] * np.abs(dg) ** 2) / k ** 2))
    l2x = float(np.sqrt(np.sum(wdet * np.abs(ev) ** 2)))
    h1x = float(np.sqrt(np.sum(wdet * np.abs(ev) ** 2)
                        + np.sum(wdet[..., None] * np.abs(eg) ** 2) / k ** 2))
    zero = l2x == 0.0 or h1x == 0.0
    return ErrorNorms(
        l2_err=l2e, h1k_err=h1e,
        rel_l2=l2e / l2x if l2x > 0 else l2e,
        rel_h1k=h1e / h1x if h1x > 0 else h1e,
        l2_exact=l2x, h1k_exact=h1x,
        zero_denominator=zero)
