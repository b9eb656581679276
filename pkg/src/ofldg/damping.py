"""Jump-calibrated modal damping.

Each cell is relaxed toward its lower-degree projections at rates set by the
inter-element jumps of the solution's derivatives:

    sigma_l = 2(2l+1)/(2k-1) * h^l / l! * J_l,   l = 0..k,

where J_l aggregates the order-l derivative jumps seen by the cell (the two
interface jumps in 1D, root-mean-square vertex jumps against edge neighbors
in 2D).  The order-0 term reuses the constant-mode projection, so the cell
mean is never damped and the term is mass-neutral.  In the orthonormal modal
basis the whole contribution is a per-mode decay rate: mode m of a cell
decays at sum(sigma_l for l <= m) / h.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .basis import basis_set
from .field import DGField1D, DGField2D, mode_table
from .geometry import BoundaryCondition, Mesh1D, Mesh2D


@dataclass(frozen=True)
class DampingParams:
    enabled: bool = True
    k: int = 1

    def __post_init__(self):
        if self.enabled and self.k < 1:
            raise ValueError(f"damping requires k >= 1, got k={self.k}")


def _prefactors(k: int, h: float) -> np.ndarray:
    ells = np.arange(k + 1)
    fact = np.array([factorial(int(l)) for l in ells], dtype=float)
    return 2.0 * (2 * ells + 1) / (2 * k - 1) * h ** ells / fact


class DampingTables1D:
    """Precomputed endpoint-derivative tables for one (mesh, k) pair."""

    def __init__(self, mesh: Mesh1D, k: int):
        if k < 1:
            raise ValueError(f"damping requires k >= 1, got k={k}")
        self.mesh = mesh
        self.k = k
        bs = basis_set(k)
        scale = (2.0 / mesh.h) ** np.arange(k + 1)
        # (k+1 orders, k+1 modes) endpoint derivative tables, chain rule applied
        self.left_derivs = bs.edge_derivs[0] * scale[:, None]
        self.right_derivs = bs.edge_derivs[1] * scale[:, None]
        self.prefactors = _prefactors(k, mesh.h)

    def interface_jumps(self, coeffs: np.ndarray, bc: BoundaryCondition,
                        t: float = 0.0) -> np.ndarray:
        """(n_cells+1, k+1) jumps of derivative orders 0..k at interfaces."""
        n = self.mesh.n_cells
        right = coeffs @ self.right_derivs.T    # (n, orders): traces at x_j+1/2-
        left = coeffs @ self.left_derivs.T      # traces at x_j-1/2+
        jumps = np.empty((n + 1, self.k + 1))
        jumps[1:n] = left[1:] - right[:-1]
        if bc.is_periodic:
            jumps[0] = left[0] - right[-1]
            jumps[n] = jumps[0]
        else:
            gl, gr = bc.values(t)
            # Prescribed value for order 0; derivative ghosts copy the interior.
            jumps[0] = 0.0
            jumps[n] = 0.0
            jumps[0, 0] = left[0, 0] - gl
            jumps[n, 0] = gr - right[-1, 0]
        return jumps

    def sigma(self, coeffs: np.ndarray, bc: BoundaryCondition,
              t: float = 0.0) -> np.ndarray:
        """(n_cells, k+1) damping coefficients sigma_l per cell."""
        jumps = self.interface_jumps(coeffs, bc, t)
        agg = np.sqrt(jumps[:-1] ** 2 + jumps[1:] ** 2)
        return agg * self.prefactors

    def mode_rates(self, coeffs: np.ndarray, bc: BoundaryCondition,
                   t: float = 0.0) -> np.ndarray:
        """(n_cells, k+1) per-mode decay rates; mode 0 is never damped."""
        sig = self.sigma(coeffs, bc, t)
        rates = np.cumsum(sig, axis=1) / self.mesh.h
        rates[:, 0] = 0.0
        return rates


def sigma_1d(u: DGField1D, cell: int, ell: int, bc: BoundaryCondition,
             t: float = 0.0) -> float:
    """Damping coefficient sigma_ell of one cell (0-based index)."""
    if not 0 <= ell <= u.k:
        raise ValueError(f"derivative order {ell} outside 0..{u.k}")
    tables = DampingTables1D(u.mesh, u.k)
    return float(tables.sigma(u.coeffs, bc, t)[cell, ell])


class DampingTables2D:
    """Corner-derivative tables and multi-index bookkeeping for one mesh."""

    def __init__(self, mesh: Mesh2D, k: int, space) -> None:
        if k < 1:
            raise ValueError(f"damping requires k >= 1, got k={k}")
        self.mesh = mesh
        self.k = k
        mx, my, degree = mode_table(k, space)
        self.mode_degree = degree
        bs = basis_set(k)
        sx = (2.0 / mesh.hx) ** np.arange(k + 1)
        sy = (2.0 / mesh.hy) ** np.arange(k + 1)
        # edge_derivs[s, order, mode]; corners indexed (sx_side, sy_side)
        ex = bs.edge_derivs * 1.0
        # alphas[l] lists the multi-indices with |alpha| = l
        self.alphas = [[(ax, l - ax) for ax in range(l, -1, -1)]
                       for l in range(k + 1)]
        # corner value vectors: weight[alpha][corner][mode]
        self.corner_vectors = {}
        for l in range(k + 1):
            for ax, ay in self.alphas[l]:
                vecs = np.empty((2, 2, len(mx)))
                for cx in (0, 1):
                    for cy in (0, 1):
                        vecs[cx, cy] = (ex[cx, ax, mx] * sx[ax]
                                        * ex[cy, ay, my] * sy[ay])
                self.corner_vectors[(ax, ay)] = vecs
        h = max(mesh.hx, mesh.hy)
        self.h_cell = h
        self.prefactors = _prefactors(k, h)

    def _corner_values(self, coeffs: np.ndarray, alpha) -> np.ndarray:
        """(nx, ny, 2, 2) derivative values at the four corners of each cell."""
        vecs = self.corner_vectors[alpha]          # (2, 2, M)
        flat = coeffs.reshape(-1, coeffs.shape[-1])
        vals = flat @ vecs.reshape(-1, vecs.shape[-1]).T
        return vals.reshape(coeffs.shape[0], coeffs.shape[1], 2, 2)

    def sigma(self, coeffs: np.ndarray, bc_x: BoundaryCondition,
              bc_y: BoundaryCondition, t: float = 0.0) -> np.ndarray:
        """(nx, ny, k+1) damping coefficients per cell.

        For each derivative multi-index, every cell sees eight vertex jumps:
        at each of its four corners, one jump against each of the two
        edge-adjacent neighbors sharing that corner.  The eight squares are
        averaged with the vertex count N_e = 4 before the square root.
        """
        nx, ny = self.mesh.nx, self.mesh.ny
        out = np.zeros((nx, ny, self.k + 1))
        for l in range(self.k + 1):
            total = np.zeros((nx, ny))
            for alpha in self.alphas[l]:
                cv = self._corner_values(coeffs, alpha)
                sq = np.zeros((nx, ny))
                # x-direction faces: (nx+1, ny, 2 corners along y)
                jx = np.zeros((nx + 1, ny, 2))
                jx[1:nx, :, 0] = cv[1:, :, 0, 0] - cv[:-1, :, 1, 0]
                jx[1:nx, :, 1] = cv[1:, :, 0, 1] - cv[:-1, :, 1, 1]
                if bc_x.is_periodic:
                    jx[0, :, 0] = cv[0, :, 0, 0] - cv[-1, :, 1, 0]
                    jx[0, :, 1] = cv[0, :, 0, 1] - cv[-1, :, 1, 1]
                    jx[nx] = jx[0]
                elif l == 0:
                    gl, gr = bc_x.values(t)
                    jx[0, :, 0] = cv[0, :, 0, 0] - gl
                    jx[0, :, 1] = cv[0, :, 0, 1] - gl
                    jx[nx, :, 0] = gr - cv[-1, :, 1, 0]
                    jx[nx, :, 1] = gr - cv[-1, :, 1, 1]
                sq += (jx[:-1] ** 2).sum(axis=2) + (jx[1:] ** 2).sum(axis=2)
                # y-direction faces: (nx, ny+1, 2 corners along x)
                jy = np.zeros((nx, ny + 1, 2))
                jy[:, 1:ny, 0] = cv[:, 1:, 0, 0] - cv[:, :-1, 0, 1]
                jy[:, 1:ny, 1] = cv[:, 1:, 1, 0] - cv[:, :-1, 1, 1]
                if bc_y.is_periodic:
                    jy[:, 0, 0] = cv[:, 0, 0, 0] - cv[:, -1, 0, 1]
                    jy[:, 0, 1] = cv[:, 0, 1, 0] - cv[:, -1, 1, 1]
                    jy[:, ny] = jy[:, 0]
                elif l == 0:
                    gb, gt = bc_y.values(t)
                    jy[:, 0, 0] = cv[:, 0, 0, 0] - gb
                    jy[:, 0, 1] = cv[:, 0, 1, 0] - gb
                    jy[:, ny, 0] = gt - cv[:, -1, 0, 1]
                    jy[:, ny, 1] = gt - cv[:, -1, 1, 1]
                sq += (jy[:, :-1] ** 2).sum(axis=2) + (jy[:, 1:] ** 2).sum(axis=2)
                total += np.sqrt(sq / 4.0)
            out[:, :, l] = self.prefactors[l] * total
        return out

    def mode_rates(self, coeffs: np.ndarray, bc_x: BoundaryCondition,
                   bc_y: BoundaryCondition, t: float = 0.0) -> np.ndarray:
        """(nx, ny, n_modes) per-mode decay rates."""
        sig = self.sigma(coeffs, bc_x, bc_y, t)
        cum = np.cumsum(sig, axis=2) / self.h_cell
        # mode with damping degree d >= 1 collects sigma_0..sigma_d; the mean
        # (degree 0) is untouched.
        idx = np.clip(self.mode_degree, 0, self.k)
        rates = cum[:, :, idx]
        rates[:, :, self.mode_degree == 0] = 0.0
        return rates


def sigma_2d(u: DGField2D, cell: tuple, ell: int, bc_x: BoundaryCondition,
             bc_y: BoundaryCondition, t: float = 0.0) -> float:
    """Damping coefficient sigma_ell of one 2D cell (0-based (i, j))."""
    if not 0 <= ell <= u.k:
        raise ValueError(f"derivative order {ell} outside 0..{u.k}")
    tables = DampingTables2D(u.mesh, u.k, u.space)
    return float(tables.sigma(u.coeffs, bc_x, bc_y, t)[cell[0], cell[1], ell])


def apply_damping(u, residual, params: DampingParams, bc, t: float = 0.0):
    """Accumulate the damping contribution into ``residual`` (in place).

    ``u`` and ``residual`` are DG fields of the same shape; ``bc`` is a
    BoundaryCondition in 1D or an (x, y) pair in 2D.
    """
    if not params.enabled:
        return
    if isinstance(u, DGField1D):
        tables = DampingTables1D(u.mesh, u.k)
        rates = tables.mode_rates(u.coeffs, bc, t)
    else:
        bc_x, bc_y = bc
        tables = DampingTables2D(u.mesh, u.k, u.space)
        rates = tables.mode_rates(u.coeffs, bc_x, bc_y, t)
    residual.coeffs -= rates * u.coeffs
