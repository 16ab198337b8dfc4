"""Lagrange finite-element spaces of degree 1..4 on triangles.

Reference basis on the unit triangle (0,0)-(1,0)-(0,1) with equispaced
nodes, global C0 DOF numbering (vertices, then edge nodes, then element
interiors), nodal interpolation and point evaluation with KD-tree point
location.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import roots_jacobi

from .mesh import Mesh, TAG_DIRICHLET


class OutOfDomainError(ValueError):
    """A requested evaluation point lies outside the mesh."""


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureRule:
    """Rule on the reference triangle; weights sum to its area 1/2."""

    points: np.ndarray   # (n, 2) reference coordinates
    weights: np.ndarray  # (n,)
    degree: int

    @property
    def points_bary(self) -> np.ndarray:
        x, y = self.points[:, 0], self.points[:, 1]
        return np.column_stack([1.0 - x - y, x, y])


@lru_cache(maxsize=None)
def triangle_quadrature(degree: int) -> QuadratureRule:
    """Conical-product rule (Gauss-Legendre x Gauss-Jacobi) exact to ``degree``."""
    m = max(1, (degree + 2) // 2)
    gu, wu = np.polynomial.legendre.leggauss(m)
    u = 0.5 * (gu + 1.0)
    wu = 0.5 * wu
    gv, wv = roots_jacobi(m, 1.0, 0.0)   # weight (1 - x) on [-1, 1]
    v = 0.5 * (gv + 1.0)
    wv = 0.25 * wv                        # absorbs the (1 - v) Jacobian
    uu, vv = np.meshgrid(u, v, indexing="ij")
    pts = np.column_stack([(uu * (1.0 - vv)).ravel(), vv.ravel()])
    wts = np.outer(wu, wv).ravel()
    return QuadratureRule(points=pts, weights=wts, degree=degree)


@lru_cache(maxsize=None)
def gauss_1d(n: int):
    """n-point Gauss-Legendre rule on [0, 1]."""
    g, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (g + 1.0), 0.5 * w


# ---------------------------------------------------------------------------
# Reference element
# ---------------------------------------------------------------------------

def _lattice(p: int):
    """Equispaced nodes in the spec's ordering: vertices, edges, interior."""
    vertex = [(0, 0), (p, 0), (0, p)]
    edges = [
        [(a, 0) for a in range(1, p)],                # v0 -> v1
        [(p - a, a) for a in range(1, p)],            # v1 -> v2
        [(0, p - a) for a in range(1, p)],            # v2 -> v0
    ]
    on_boundary = set(vertex) | {n for e in edges for n in e}
    interior = [(a, b) for b in range(1, p) for a in range(1, p - b)
                if (a, b) not in on_boundary]
    nodes = vertex + [n for e in edges for n in e] + interior
    return np.array(nodes, dtype=float) / p


class ReferenceElement:
    """Nodal Lagrange basis of degree p on the reference triangle."""

    def __init__(self, p: int):
        if not 1 <= p <= 4:
            raise ValueError(f"unsupported degree p={p}; need 1 <= p <= 4")
        self.p = p
        self.nodes = _lattice(p)
        self.exponents = [(a, b) for total in range(p + 1)
                          for a in range(total + 1)
                          for b in [total - a]]
        V = self._monomials(self.nodes)
        self._coeffs = np.linalg.inv(V).T  # coeffs[i]

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    def _monomials(self, pts):
        x, y = pts[:, 0], pts[:, 1]
        return np.column_stack([x ** a * y ** b for a, b in self.exponents])

    def eval_basis(self, pts) -> np.ndarray:
        """(n_pts, n_basis) values of all nodal basis functions."""
        return self._monomials(np.atleast_2d(pts)) @ self._coeffs.T

    def eval_basis_grad(self, pts) -> np.ndarray:
        """(n_pts, n_basis, 2) reference gradients."""
        pts = np.atleast_2d(pts)
        x, y = pts[:, 0], pts[:, 1]
        dx = np.column_stack([
            a * x ** max(a - 1, 0) * y ** b if a > 0 else np.zeros_like(x)
            for a, b in self.exponents])
        dy = np.column_stack([
            b * x ** a * y ** max(b - 1, 0) if b > 0 else np.zeros_like(x)
            for a, b in self.exponents])
        return np.stack([dx @ self._coeffs.T, dy @ self._coeffs.T], axis=-1)


@lru_cache(maxsize=None)
def reference_element(p: int) -> ReferenceElement:
    return ReferenceElement(p)


class ReferenceEdge:
    """Trace of the degree-p Lagrange basis on an edge: the 1D equispaced
    Lagrange basis on [0, 1]."""

    def __init__(self, p: int):
        self.p = p
        self.nodes = np.arange(p + 1) / p
        V = np.vander(self.nodes, p + 1, increasing=True)
        self._coeffs = np.linalg.inv(V).T

    def eval_basis(self, t) -> np.ndarray:
        t = np.atleast_1d(t)
        V = np.vander(t, self.p + 1, increasing=True)
        return V @ self._coeffs.T


@lru_cache(maxsize=None)
def reference_edge(p: int) -> ReferenceEdge:
    return ReferenceEdge(p)


# ---------------------------------------------------------------------------
# Global space
# ---------------------------------------------------------------------------

class FemSpace:
    """Continuous P_p space on a mesh.

    DOF layout: vertex DOFs (= vertex ids), then (p-1) DOFs per mesh edge
    (ordered from the lower- to the higher-numbered vertex), then interior
    DOFs per triangle.  ``elem_dofs[K]`` follows the reference-node order.
    """

    def __init__(self, mesh: Mesh, p: int):
        self.mesh = mesh
        self.p = p
        self.ref = reference_element(p)
        self._build_dof_map()
        self._dof_coords = None
        self._tree = None
        self._geom = None

    def _build_dof_map(self):
        mesh, p = self.mesh, self.p
        tris = mesh.triangles
        nv, nt = mesh.num_vertices, mesh.num_triangles

        tri_edges = np.stack([tris[:, [0, 1]], tris[:, [1, 2]],
                              tris[:, [2, 0]]], axis=1)  # (nt, 3, 2)
        sorted_edges = np.sort(tri_edges.reshape(-1, 2), axis=1)
        edges, inverse = np.unique(sorted_edges, axis=0, return_inverse=True)
        self.edges = edges
        self.num_edges = len(edges)
        edge_of = inverse.reshape(nt, 3)
        flipped = tri_edges[:, :, 0] > tri_edges[:, :, 1]

        n_int = (p - 1) * (p - 2) // 2
        self.num_dofs = nv + (p - 1) * self.num_edges + n_int * nt

        elem_dofs = np.empty((nt, self.ref.num_nodes), dtype=np.int64)
        elem_dofs[:, :3] = tris
        col = 3
        for le in range(3):
            base = nv + edge_of[:, le][:, None] * (p - 1)
            order = np.arange(p - 1)
            fwd = base + order
            rev = base + order[::-1]
            block = np.where(flipped[:, le][:, None], rev, fwd)
            elem_dofs[:, col:col + p - 1] = block
            col += p - 1
        if n_int:
            first = nv + (p - 1) * self.num_edges
            elem_dofs[:, col:] = (first + n_int * np.arange(nt)[:, None]
                                  + np.arange(n_int))
        self.elem_dofs = elem_dofs

        self._edge_index = {tuple(e): i for i, e in enumerate(edges.tolist())}

        dir_mask = mesh.boundary_tags == TAG_DIRICHLET
        dofs = set()
        for (a, b) in mesh.boundary_edges[dir_mask].tolist():
            dofs.add(a)
            dofs.add(b)
            dofs.update(self.edge_dof_ids(a, b)[1:-1].tolist())
        self.dirichlet_dofs = np.array(sorted(dofs), dtype=np.int64)

    def edge_dof_ids(self, va: int, vb: int) -> np.ndarray:
        """The p+1 DOFs along edge (va, vb), ordered from va to vb."""
        lo, hi = (va, vb) if va < vb else (vb, va)
        eid = self._edge_index[(lo, hi)]
        mid = self.mesh.num_vertices + eid * (self.p - 1) + np.arange(self.p - 1)
        if va > vb:
            mid = mid[::-1]
        return np.concatenate([[va], mid, [vb]]).astype(np.int64)

    @property
    def dof_coords(self) -> np.ndarray:
        if self._dof_coords is None:
            coords = np.zeros((self.num_dofs, 2))
            pts = self.geometry()["origin"]  # (nt, 2) first vertex
            J = self.geometry()["jacobian"]
            ref = self.ref.nodes  # (n_loc, 2)
            phys = pts[:, None, :] + np.einsum("tij,nj->tni", J, ref)
            coords[self.elem_dofs.ravel()] = phys.reshape(-1, 2)
            coords.setflags(write=False)
            self._dof_coords = coords
        return self._dof_coords

    def geometry(self):
        """Per-element affine maps: x = origin + J @ x_ref."""
        if self._geom is None:
            p = self.mesh.vertices[self.mesh.triangles]
            origin = p[:, 0]
            J = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=-1)
            detJ = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
            invJ = np.empty_like(J)
            invJ[:, 0, 0] = J[:, 1, 1]
            invJ[:, 0, 1] = -J[:, 0, 1]
            invJ[:, 1, 0] = -J[:, 1, 0]
            invJ[:, 1, 1] = J[:, 0, 0]
            invJ /= detJ[:, None, None]
            self._geom = {"origin": origin, "jacobian": J, "det": detJ,
                          "inv": invJ}
        return self._geom

    # -- point location ----------------------------------------------------

    def locate(self, pts) -> tuple[np.ndarray, np.ndarray]:
        """Containing triangle and reference coordinates for each point.

        Ambiguities on shared edges resolve to the lowest triangle index.
        Raises OutOfDomainError naming the first point not in any triangle.
        """
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self._tree is None:
            self._tree = cKDTree(self.mesh.centroids())
        n = len(pts)
        tri_idx = np.full(n, -1, dtype=np.int64)
        ref = np.zeros((n, 2))
        pending = np.arange(n)
        for kcand in (8, 64):
            if not len(pending):
                break
            kq = min(kcand, self.mesh.num_triangles)
            _, cand = self._tree.query(pts[pending], k=kq)
            cand = np.atleast_2d(cand)
            found = self._test_candidates(pts[pending], cand, tri_idx, ref,
                                          pending)
            pending = pending[~found]
        if len(pending):   # brute force fallback
            all_tris = np.arange(self.mesh.num_triangles)
            for i in pending:
                cand = all_tris[None, :]
                ok = self._test_candidates(pts[i:i + 1], cand, tri_idx, ref,
                                           np.array([i]))
                if not ok[0]:
                    raise OutOfDomainError(
                        f"point ({pts[i, 0]:.6g}, {pts[i, 1]:.6g}) is outside the mesh")
        return tri_idx, ref

    def _test_candidates(self, pts, cand, tri_idx, ref, pending):
        geom = self.geometry()
        d = pts[:, None, :] - geom["origin"][cand]
        loc = np.einsum("pcij,pcj->pci", geom["inv"][cand], d)
        lam0 = 1.0 - loc[..., 0] - loc[..., 1]
        tol = -1e-10
        inside = (loc[..., 0] >= tol) & (loc[..., 1] >= tol) & (lam0 >= tol)
        # lowest containing triangle index for determinism on shared edges
        masked = np.where(inside, cand, np.iinfo(np.int64).max)
        best_pos = masked.argmin(axis=1)
        rows = np.arange(len(pts))
        found = inside[rows, best_pos]
        sel = rows[found]
        tri_idx[pending[sel]] = cand[sel, best_pos[sel]]
        ref[pending[sel]] = loc[sel, best_pos[sel]]
        return found


def build_fem_space(mesh: Mesh, p: int) -> FemSpace:
    """Continuous Lagrange space; DOF count = nv + (p-1)*ne + (p-1)(p-2)/2 * nt."""
    return FemSpace(mesh, p)


# ---------------------------------------------------------------------------
# Fields
# ---------------------------------------------------------------------------

@dataclass
class FemField:
    """Complex coefficient vector over a FemSpace."""

    space: FemSpace
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (self.space.num_dofs,):
            raise ValueError(
                f"coefficient length {c.shape} does not match space "
                f"({self.space.num_dofs} DOFs)")
        self.coeffs = c

    def __call__(self, pts):
        return evaluate_field(self, pts)


def interpolate(space: FemSpace, f) -> FemField:
    """Nodal interpolant; ``f`` maps an (n, 2) array to complex values
    (a scalar-argument callable also works)."""
    coords = space.dof_coords
    try:
        vals = np.asarray(f(coords), dtype=complex)
        if vals.shape != (space.num_dofs,):
            raise TypeError
    except TypeError:
        vals = np.array([f(c) for c in coords], dtype=complex)
    return FemField(space, vals)


def evaluate_field(field: FemField, pts):
    """Field values at points (scalar complex for a single point)."""
    pts_arr = np.atleast_2d(np.asarray(pts, dtype=float))
    tri, ref = field.space.locate(pts_arr)
    basis = field.space.ref.eval_basis(ref)                 # (n, n_loc)
    local = field.coeffs[field.space.elem_dofs[tri]]        # (n, n_loc)
    vals = np.einsum("ni,ni->n", basis, local)
    return vals[0] if np.asarray(pts).ndim == 1 else vals


def evaluate_field_gradient(field: FemField, pts):
    """Field gradients at points; (2,) for a single point, else (n, 2)."""
    pts_arr = np.atleast_2d(np.asarray(pts, dtype=float))
    space = field.space
    tri, ref = space.locate(pts_arr)
    gref = space.ref.eval_basis_grad(ref)                   # (n, n_loc, 2)
    invJ = space.geometry()["inv"][tri]                     # (n, 2, 2)
    local = field.coeffs[space.elem_dofs[tri]]              # (n, n_loc)
    gref_tot = np.einsum("ni,nid->nd", local, gref)
    grad = np.einsum("ndi,nd->ni", invJ, gref_tot)
    return grad[0] if np.asarray(pts).ndim == 1 else grad
