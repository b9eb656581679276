"""Modal DG fields on uniform meshes: projection, traces, norms, truncation.

Coefficients are stored against the reference-orthonormal Legendre basis, so
the physical mass matrix of a cell is (h/2) I in 1D and (hx hy / 4) I in 2D.
Cutting a field to a lower polynomial degree (the projection used by the
jump-damping term) is therefore just zeroing trailing modes.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .basis import basis_set, gauss_rule, legendre_orthonormal
from .geometry import BoundaryCondition, Mesh1D, Mesh2D


def modal_truncate(coeffs: np.ndarray, target_degree: int,
                   mode_degrees: Optional[np.ndarray] = None) -> np.ndarray:
    """Project modal coefficients onto degrees <= ``target_degree``.

    ``coeffs`` may be a single cell's vector or any array whose last axis
    enumerates modes.  ``mode_degrees`` gives the polynomial degree of each
    mode (defaults to 0, 1, ..., matching the 1D basis ordering).  A target of
    -1 is mapped to 0: the order-0 damping term reuses the constant-mode
    projection rather than the zero polynomial.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if mode_degrees is None:
        mode_degrees = np.arange(coeffs.shape[-1])
    max_degree = int(np.max(mode_degrees)) if len(mode_degrees) else 0
    if not -1 <= target_degree <= max_degree:
        raise ValueError(
            f"degree out of range: target {target_degree} not in -1..{max_degree}")
    keep = mode_degrees <= max(target_degree, 0)
    return np.where(keep, coeffs, 0.0)


def _resolve_boundary(bc: BoundaryCondition, t: float) -> tuple[float, float]:
    return bc.values(t)


class DGField1D:
    """Piecewise polynomial of degree ``k`` on a uniform 1D mesh.

    ``coeffs`` has shape (n_cells, k+1); row j holds the modal coefficients of
    cell j against the orthonormal Legendre basis on the reference interval.
    """

    def __init__(self, mesh: Mesh1D, k: int, coeffs: np.ndarray):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (mesh.n_cells, k + 1):
            raise ValueError(
                f"coefficient shape {coeffs.shape} does not match "
                f"({mesh.n_cells}, {k + 1})")
        self.mesh = mesh
        self.k = k
        self.coeffs = coeffs

    # -- construction -----------------------------------------------------

    @classmethod
    def zeros(cls, mesh: Mesh1D, k: int) -> "DGField1D":
        return cls(mesh, k, np.zeros((mesh.n_cells, k + 1)))

    @classmethod
    def l2_project(cls, func: Callable, mesh: Mesh1D, k: int,
                   n_quad: int | None = None) -> "DGField1D":
        """L2 projection of ``func`` computed with Gauss quadrature."""
        bs = basis_set(k, n_quad)
        x = mesh.centers()[:, None] + 0.5 * mesh.h * bs.quad.nodes[None, :]
        vals = np.asarray(func(x), dtype=float)
        coeffs = (vals * bs.quad.weights) @ bs.point_values
        return cls(mesh, k, coeffs)

    def with_coeffs(self, coeffs: np.ndarray) -> "DGField1D":
        return DGField1D(self.mesh, self.k, coeffs)

    def copy(self) -> "DGField1D":
        return self.with_coeffs(self.coeffs.copy())

    # -- arithmetic (used by the time stepper) -----------------------------

    def __add__(self, other: "DGField1D") -> "DGField1D":
        return self.with_coeffs(self.coeffs + other.coeffs)

    def __mul__(self, scalar: float) -> "DGField1D":
        return self.with_coeffs(self.coeffs * scalar)

    __rmul__ = __mul__

    # -- evaluation ---------------------------------------------------------

    def values_at(self, ref_nodes: np.ndarray, deriv_order: int = 0) -> np.ndarray:
        """(n_cells, len(ref_nodes)) values of the order-``deriv_order``
        physical derivative at the given reference nodes in every cell."""
        from .basis import _deriv_values
        nodes = np.asarray(ref_nodes, dtype=float)
        table = np.stack([_deriv_values(m, deriv_order, nodes)
                          for m in range(self.k + 1)], axis=-1)
        vals = self.coeffs @ table.T
        return vals * (2.0 / self.mesh.h) ** deriv_order

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Point values at arbitrary physical locations inside the domain."""
        x = np.asarray(x, dtype=float)
        idx = np.clip(((x - self.mesh.a) / self.mesh.h).astype(int), 0,
                      self.mesh.n_cells - 1)
        xi = 2.0 * (x - self.mesh.a) / self.mesh.h - (2 * idx + 1)
        table = np.stack([legendre_orthonormal(m, xi)
                          for m in range(self.k + 1)], axis=-1)
        return np.einsum("pm,pm->p", self.coeffs[idx], table)

    # -- interface traces ---------------------------------------------------

    def face_traces(self, bc: BoundaryCondition, deriv_order: int = 0,
                    t: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
        """One-sided traces at all n_cells+1 interfaces.

        Returns ``(minus, plus)`` where ``minus[i]`` is the limit from the
        left cell and ``plus[i]`` from the right cell at interface i.  Ghost
        rules fill the outermost entries: periodic wraps; Dirichlet prescribes
        the order-0 value and copies the interior trace for derivatives.
        """
        bs = basis_set(self.k)
        if deriv_order > self.k:
            minus = np.zeros(self.mesh.n_cells + 1)
            return minus, minus.copy()
        scale = (2.0 / self.mesh.h) ** deriv_order
        left = (self.coeffs @ bs.edge_derivs[0, deriv_order]) * scale
        right = (self.coeffs @ bs.edge_derivs[1, deriv_order]) * scale
        n = self.mesh.n_cells
        minus = np.empty(n + 1)
        plus = np.empty(n + 1)
        minus[1:] = right
        plus[:-1] = left
        if bc.is_periodic:
            minus[0] = right[-1]
            plus[-1] = left[0]
        elif deriv_order == 0:
            gl, gr = _resolve_boundary(bc, t)
            minus[0] = gl
            plus[-1] = gr
        else:
            minus[0] = plus[0]
            plus[-1] = minus[-1]
        return minus, plus

    def trace(self, interface: int, side, bc: BoundaryCondition,
              deriv_order: int = 0, t: float = 0.0) -> float:
        """One-sided trace at interface i (0..n_cells; 0 is the left end)."""
        from .geometry import Side
        minus, plus = self.face_traces(bc, deriv_order, t)
        return float(minus[interface] if side is Side.LEFT else plus[interface])

    def jump(self, interface: int, bc: BoundaryCondition,
             deriv_order: int = 0, t: float = 0.0) -> float:
        """plus-minus jump of the order-``deriv_order`` derivative."""
        minus, plus = self.face_traces(bc, deriv_order, t)
        return float(plus[interface] - minus[interface])

    def average(self, interface: int, bc: BoundaryCondition,
                t: float = 0.0) -> float:
        minus, plus = self.face_traces(bc, 0, t)
        return float(0.5 * (plus[interface] + minus[interface]))

    # -- reductions -----------------------------------------------------------

    def norms(self, exact: Optional[Callable] = None,
              window: Optional[tuple] = None) -> dict:
        """Unnormalized L1/L2/Linf norms of the field (or of field - exact).

        Integrals use a k+3-point Gauss rule; Linf is the max over its nodes.
        With ``window`` = (lo, hi) only cells fully inside the interval
        contribute (used to measure accuracy away from fronts).
        """
        rule = gauss_rule(self.k + 3)
        table = np.stack([legendre_orthonormal(m, rule.nodes)
                          for m in range(self.k + 1)], axis=-1)
        vals = self.coeffs @ table.T
        if exact is not None:
            x = self.mesh.centers()[:, None] + 0.5 * self.mesh.h * rule.nodes[None, :]
            vals = vals - exact(x)
        if window is not None:
            centers = self.mesh.centers()
            half = 0.5 * self.mesh.h
            tol = 1e-9 * self.mesh.h
            keep = ((centers - half >= window[0] - tol)
                    & (centers + half <= window[1] + tol))
            vals = vals[keep]
        jac = 0.5 * self.mesh.h
        l1 = jac * np.sum(np.abs(vals) @ rule.weights)
        l2 = np.sqrt(jac * np.sum((vals * vals) @ rule.weights))
        linf = np.max(np.abs(vals))
        return {"l1": float(l1), "l2": float(l2), "linf": float(linf)}

    def cell_averages(self) -> tuple[np.ndarray, np.ndarray]:
        """(centers, means); the mean is c0 times the orthonormal constant."""
        return self.mesh.centers(), self.coeffs[:, 0] * np.sqrt(0.5)

    def mass(self) -> float:
        return float(self.mesh.h * np.sqrt(0.5) * np.sum(self.coeffs[:, 0]))

    def l2_norm(self) -> float:
        return float(np.sqrt(0.5 * self.mesh.h * np.sum(self.coeffs ** 2)))


class ModalSpace(Enum):
    TOTAL_DEGREE = "total-degree"      # P_k: total degree <= k
    TENSOR_PRODUCT = "tensor-product"  # Q_k: per-variable degree <= k

    @staticmethod
    def parse(name) -> "ModalSpace":
        if isinstance(name, ModalSpace):
            return name
        aliases = {
            "pk": ModalSpace.TOTAL_DEGREE, "p": ModalSpace.TOTAL_DEGREE,
            "total-degree": ModalSpace.TOTAL_DEGREE,
            "qk": ModalSpace.TENSOR_PRODUCT, "q": ModalSpace.TENSOR_PRODUCT,
            "tensor-product": ModalSpace.TENSOR_PRODUCT,
        }
        key = str(name).lower()
        if key not in aliases:
            raise ValueError(f"unknown modal space {name!r}")
        return aliases[key]


@lru_cache(maxsize=None)
def mode_table(k: int, space: ModalSpace) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(mx, my, degree) arrays for the 2D modal space.

    Modes are ordered by total degree, then by x-degree, which makes the
    total-degree space a prefix of no particular tensor ordering but keeps the
    layout deterministic.  ``degree`` is the damping-relevant degree: total
    degree for P_k, max per-variable degree for Q_k.
    """
    if space is ModalSpace.TOTAL_DEGREE:
        modes = [(i, d - i) for d in range(k + 1) for i in range(d, -1, -1)]
    else:
        modes = [(i, d - i) for d in range(2 * k + 1)
                 for i in range(min(d, k), -1, -1) if d - i <= k]
    mx = np.array([m[0] for m in modes])
    my = np.array([m[1] for m in modes])
    if space is ModalSpace.TOTAL_DEGREE:
        degree = mx + my
    else:
        degree = np.maximum(mx, my)
    return mx, my, degree


class DGField2D:
    """Piecewise polynomial on a uniform 2D mesh.

    ``coeffs`` has shape (nx, ny, n_modes) where the mode list is given by
    :func:`mode_table`; n_modes is (k+1)(k+2)/2 for the total-degree space and
    (k+1)^2 for the tensor-product space.
    """

    def __init__(self, mesh: Mesh2D, k: int, coeffs: np.ndarray,
                 space: ModalSpace = ModalSpace.TOTAL_DEGREE):
        space = ModalSpace.parse(space)
        mx, my, degree = mode_table(k, space)
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (mesh.nx, mesh.ny, len(mx)):
            raise ValueError(
                f"coefficient shape {coeffs.shape} does not match "
                f"({mesh.nx}, {mesh.ny}, {len(mx)})")
        self.mesh = mesh
        self.k = k
        self.space = space
        self.coeffs = coeffs
        self.mode_x = mx
        self.mode_y = my
        self.mode_degree = degree

    @property
    def n_modes(self) -> int:
        return len(self.mode_x)

    @classmethod
    def zeros(cls, mesh: Mesh2D, k: int,
              space: ModalSpace = ModalSpace.TOTAL_DEGREE) -> "DGField2D":
        space = ModalSpace.parse(space)
        mx, _, _ = mode_table(k, space)
        return cls(mesh, k, np.zeros((mesh.nx, mesh.ny, len(mx))), space)

    @classmethod
    def l2_project(cls, func: Callable, mesh: Mesh2D, k: int,
                   space: ModalSpace = ModalSpace.TOTAL_DEGREE,
                   n_quad: int | None = None) -> "DGField2D":
        space = ModalSpace.parse(space)
        rule = gauss_rule(n_quad if n_quad is not None else k + 2)
        mx, my, _ = mode_table(k, space)
        px = np.stack([legendre_orthonormal(m, rule.nodes) for m in range(k + 1)])
        tval = px[mx][:, :, None] * px[my][:, None, :]          # (M, nq, nq)
        x = mesh.x_centers()[:, None] + 0.5 * mesh.hx * rule.nodes[None, :]
        y = mesh.y_centers()[:, None] + 0.5 * mesh.hy * rule.nodes[None, :]
        vals = np.asarray(func(x[:, None, :, None], y[None, :, None, :]), dtype=float)
        vals = np.broadcast_to(vals, (mesh.nx, mesh.ny, rule.n_points, rule.n_points))
        wgrid = rule.weights[:, None] * rule.weights[None, :]
        coeffs = np.tensordot(vals * wgrid, tval, axes=([2, 3], [1, 2]))
        return cls(mesh, k, coeffs, space)

    def with_coeffs(self, coeffs: np.ndarray) -> "DGField2D":
        return DGField2D(self.mesh, self.k, coeffs, self.space)

    def copy(self) -> "DGField2D":
        return self.with_coeffs(self.coeffs.copy())

    def __add__(self, other: "DGField2D") -> "DGField2D":
        return self.with_coeffs(self.coeffs + other.coeffs)

    def __mul__(self, scalar: float) -> "DGField2D":
        return self.with_coeffs(self.coeffs * scalar)

    __rmul__ = __mul__

    def truncated(self, target_degree: int) -> "DGField2D":
        return self.with_coeffs(
            modal_truncate(self.coeffs, target_degree, self.mode_degree))

    def norms(self, exact: Optional[Callable] = None) -> dict:
        rule = gauss_rule(self.k + 3)
        px = np.stack([legendre_orthonormal(m, rule.nodes)
                       for m in range(self.k + 1)])
        tval = px[self.mode_x][:, :, None] * px[self.mode_y][:, None, :]
        vals = np.tensordot(self.coeffs, tval, axes=([2], [0]))
        if exact is not None:
            mesh = self.mesh
            x = mesh.x_centers()[:, None] + 0.5 * mesh.hx * rule.nodes[None, :]
            y = mesh.y_centers()[:, None] + 0.5 * mesh.hy * rule.nodes[None, :]
            vals = vals - exact(x[:, None, :, None], y[None, :, None, :])
        wgrid = rule.weights[:, None] * rule.weights[None, :]
        jac = 0.25 * self.mesh.hx * self.mesh.hy
        l1 = jac * np.sum(np.abs(vals) * wgrid)
        l2 = np.sqrt(jac * np.sum(vals * vals * wgrid))
        linf = np.max(np.abs(vals))
        return {"l1": float(l1), "l2": float(l2), "linf": float(linf)}

    def cell_averages(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(x_centers, y_centers, means) with means shaped (nx, ny)."""
        return (self.mesh.x_centers(), self.mesh.y_centers(),
                self.coeffs[:, :, 0] * 0.5)

    def mass(self) -> float:
        return float(self.mesh.hx * self.mesh.hy * 0.5 * np.sum(self.coeffs[:, :, 0]))

    def l2_norm(self) -> float:
        return float(np.sqrt(0.25 * self.mesh.hx * self.mesh.hy
                             * np.sum(self.coeffs ** 2)))
