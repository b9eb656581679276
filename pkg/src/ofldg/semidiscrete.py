"""Semidiscrete spatial operators: auxiliary-variable solves and RHS assembly.

The second-order equation is rewritten as a first-order system: the auxiliary
variable q (per direction in 2D) carries b(u) times the gradient via the
weak derivative of g(u), and the conserved variable sees the divergence of
f(u) - b(u) q plus the jump damping.  In the orthonormal modal basis the cell
mass matrices are diagonal, so both solves are explicit.

Sign conventions (1D, cell j with faces j and j+1, 0-based):

    q_j  = (2/h) [ sum_q w_q (-g(u)) dphi  -  hq[j+1] phi(1) + hq[j] phi(-1) ]
    du_j = (2/h) [ sum_q w_q (f(u)-b(u)q) dphi - hu[j+1] phi(1) + hu[j] phi(-1) ]
           - damping rates * coefficients

Boundary ghosts: periodic wraps; Dirichlet prescribes the trace of u and
copies the interior trace of the auxiliary variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from typing import Optional

import numpy as np

from .basis import basis_set, gauss_rule
from .damping import DampingParams, DampingTables1D, DampingTables2D
from .field import DGField1D, DGField2D, ModalSpace, mode_table
from .flux import FluxConfig, convective_flux, diffusive_fluxes_1d, diffusive_fluxes_2d
from .geometry import BoundaryCondition, Mesh1D, Mesh2D


def _face_values(left_tr: np.ndarray, right_tr: np.ndarray, periodic: bool,
                 boundary: Optional[tuple]) -> tuple[np.ndarray, np.ndarray]:
    """Assemble minus/plus states on the n+1 faces of a 1D strip.

    ``left_tr``/``right_tr`` are interior traces at cell left/right endpoints
    (leading axis = cells).  ``boundary`` is (left_value, right_value) arrays
    or scalars for prescribed data, or None to copy the interior trace.
    """
    n = left_tr.shape[0]
    minus = np.empty((n + 1,) + left_tr.shape[1:])
    plus = np.empty_like(minus)
    minus[1:] = right_tr
    plus[:-1] = left_tr
    if periodic:
        minus[0] = right_tr[-1]
        plus[-1] = left_tr[0]
    elif boundary is not None:
        minus[0] = boundary[0]
        plus[-1] = boundary[1]
    else:
        minus[0] = plus[0]
        plus[-1] = minus[-1]
    return minus, plus


class Operator1D:
    """Fused q-solve and RHS evaluation for one (mesh, k, problem) setup."""

    def __init__(self, mesh: Mesh1D, k: int, problem, flux_cfg: FluxConfig,
                 damping: DampingParams):
        self.mesh = mesh
        self.k = k
        self.problem = problem
        self.cfg = flux_cfg
        self.damping = damping
        self.bc = problem.bc
        bs = basis_set(k)
        self.values = bs.point_values                      # (nq, k+1)
        self.weighted_dx = bs.quad.weights[:, None] * bs.point_dx
        self.left = bs.left_values
        self.right = bs.right_values
        self.two_over_h = 2.0 / mesh.h
        self.tables = DampingTables1D(mesh, k) if damping.enabled else None

    def _boundary_values(self, t: float):
        if self.bc.is_periodic:
            return None
        return self.bc.values(t)

    def q_and_rhs(self, coeffs: np.ndarray, t: float,
                  need_rhs: bool = True):
        """Return (q_coeffs, rhs_coeffs); rhs_coeffs is None when skipped."""
        p = self.problem
        cfg = self.cfg
        periodic = self.bc.is_periodic
        bvals = self._boundary_values(t)

        u_vals = coeffs @ self.values.T                    # (n, nq)
        u_left = coeffs @ self.left
        u_right = coeffs @ self.right
        um, up = _face_values(u_left, u_right, periodic, bvals)
        mirror = not periodic

        _, hq = diffusive_fluxes_1d(cfg, p, um, up, 0.0, 0.0,
                                    mirror_last=mirror)
        q_vol = -np.asarray(p.g1(u_vals)) @ self.weighted_dx
        q_coeffs = self.two_over_h * (
            q_vol + hq[:-1, None] * self.left - hq[1:, None] * self.right)
        if not need_rhs:
            return q_coeffs, None

        q_left = q_coeffs @ self.left
        q_right = q_coeffs @ self.right
        qm, qp = _face_values(q_left, q_right, periodic, None)
        hu_diff, _ = diffusive_fluxes_1d(cfg, p, um, up, qm, qp,
                                         mirror_last=mirror)

        q_vals = q_coeffs @ self.values.T
        flux_vals = -np.asarray(p.b1(u_vals)) * q_vals
        hu = hu_diff
        if p.has_convection:
            flux_vals = flux_vals + p.f1(u_vals)
            hu = hu + convective_flux(cfg, p.f1, um, up)
        rhs = self.two_over_h * (
            flux_vals @ self.weighted_dx
            + hu[:-1, None] * self.left - hu[1:, None] * self.right)
        if self.tables is not None:
            rhs -= self.tables.mode_rates(coeffs, self.bc, t) * coeffs
        return q_coeffs, rhs


@dataclass
class SchemeState1D:
    """Mutable bundle of a 1D solution and its discretization choices."""

    u: DGField1D
    problem: object
    flux: FluxConfig
    damping: DampingParams
    q: Optional[DGField1D] = None
    _op: Optional[Operator1D] = dataclass_field(default=None, repr=False)

    def operator(self) -> Operator1D:
        if self._op is None:
            self._op = Operator1D(self.u.mesh, self.u.k, self.problem,
                                  self.flux, self.damping)
        return self._op


def solve_q_1d(u: DGField1D, problem, flux_cfg: FluxConfig,
               t: float = 0.0) -> DGField1D:
    """Auxiliary variable q from the weak derivative of g(u)."""
    op = Operator1D(u.mesh, u.k, problem, flux_cfg,
                    DampingParams(enabled=False, k=u.k))
    q_coeffs, _ = op.q_and_rhs(u.coeffs, t, need_rhs=False)
    return u.with_coeffs(q_coeffs)


def rhs_u_1d(state: SchemeState1D, t: float = 0.0) -> DGField1D:
    """Semidiscrete time derivative of u; refreshes ``state.q``."""
    op = state.operator()
    q_coeffs, rhs = op.q_and_rhs(state.u.coeffs, t)
    state.q = state.u.with_coeffs(q_coeffs)
    return state.u.with_coeffs(rhs)


class Operator2D:
    """Fused q1/q2 solves and RHS evaluation on a 2D tensor mesh."""

    def __init__(self, mesh: Mesh2D, k: int, problem, flux_cfg: FluxConfig,
                 damping: DampingParams, space=ModalSpace.TOTAL_DEGREE):
        self.mesh = mesh
        self.k = k
        self.problem = problem
        self.cfg = flux_cfg
        self.damping = damping
        self.space = ModalSpace.parse(space)
        self.bc_x, self.bc_y = problem.bc
        rule = gauss_rule(k + 2)
        nq = rule.n_points
        mx, my, _ = mode_table(k, self.space)
        from .basis import _deriv_values
        p0 = np.stack([_deriv_values(m, 0, rule.nodes) for m in range(k + 1)])
        p1 = np.stack([_deriv_values(m, 1, rule.nodes) for m in range(k + 1)])
        e0 = np.stack([_deriv_values(m, 0, np.array([-1.0, 1.0]))
                       for m in range(k + 1)])
        # (M, nq, nq) tensors; axis order (mode, x-node, y-node)
        self.t_val = p0[mx][:, :, None] * p0[my][:, None, :]
        t_dx = p1[mx][:, :, None] * p0[my][:, None, :]
        t_dy = p0[mx][:, :, None] * p1[my][:, None, :]
        wgrid = rule.weights[:, None] * rule.weights[None, :]
        self.w_dx = t_dx * wgrid                            # contract with values
        self.w_dy = t_dy * wgrid
        self.wgrid = wgrid
        # edge tables (M, nq): trace of mode m along an edge
        self.edge_xl = e0[mx, 0][:, None] * p0[my]          # x = -1
        self.edge_xr = e0[mx, 1][:, None] * p0[my]          # x = +1
        self.edge_yb = p0[mx] * e0[my, 0][:, None]          # y = -1
        self.edge_yt = p0[mx] * e0[my, 1][:, None]          # y = +1
        self.edge_w = rule.weights
        self.two_over_hx = 2.0 / mesh.hx
        self.two_over_hy = 2.0 / mesh.hy
        self.tables = (DampingTables2D(mesh, k, self.space)
                       if damping.enabled else None)

    # -- helpers -----------------------------------------------------------

    def _edge_traces(self, coeffs, table):
        """(nx, ny, nq) traces along one edge; ``table`` is (M, nq)."""
        flat = coeffs.reshape(-1, coeffs.shape[-1])
        out = flat @ table
        return out.reshape(coeffs.shape[0], coeffs.shape[1], -1)

    def _x_faces(self, coeffs, periodic, boundary):
        """Minus/plus states on vertical faces, shape (nx+1, ny, nq)."""
        left = self._edge_traces(coeffs, self.edge_xl)
        right = self._edge_traces(coeffs, self.edge_xr)
        return _face_values(left, right, periodic, boundary)

    def _y_faces(self, coeffs, periodic, boundary):
        """Minus/plus states on horizontal faces, shape (ny+1, nx, nq).

        Returned in y-major orientation; callers swap back after the
        pointwise flux evaluation.
        """
        bottom = self._edge_traces(coeffs, self.edge_yb)
        top = self._edge_traces(coeffs, self.edge_yt)
        return _face_values(np.swapaxes(bottom, 0, 1),
                            np.swapaxes(top, 0, 1), periodic, boundary)

    def _volume(self, vals, weighted_table):
        return np.tensordot(vals, weighted_table, axes=([2, 3], [1, 2]))

    def _values(self, coeffs):
        return np.tensordot(coeffs, self.t_val, axes=([2], [0]))

    def _scatter_x(self, fluxes):
        wf = fluxes * self.edge_w
        lo = np.tensordot(wf[:-1], self.edge_xl, axes=([2], [1]))
        hi = np.tensordot(wf[1:], self.edge_xr, axes=([2], [1]))
        return lo - hi

    def _scatter_y(self, fluxes):
        wf = fluxes * self.edge_w
        lo = np.tensordot(wf[:, :-1], self.edge_yb, axes=([2], [1]))
        hi = np.tensordot(wf[:, 1:], self.edge_yt, axes=([2], [1]))
        return lo - hi

    # -- main evaluation -----------------------------------------------------

    def q_and_rhs(self, coeffs: np.ndarray, t: float, need_rhs: bool = True):
        p = self.problem
        cfg = self.cfg
        per_x = self.bc_x.is_periodic
        per_y = self.bc_y.is_periodic
        bx = None if per_x else self.bc_x.values(t)
        by = None if per_y else self.bc_y.values(t)

        u_vals = self._values(coeffs)

        # x-direction faces: arrays (nx+1, ny, nq_edge)
        um_x, up_x = self._x_faces(coeffs, per_x, bx)
        _, hq1 = diffusive_fluxes_2d(cfg, p, 0, um_x, up_x, 0.0, 0.0,
                                     mirror_last=not per_x)
        q1 = self.two_over_hx * (
            self._volume(-np.asarray(p.g1(u_vals)), self.w_dx)
            + self._scatter_x(hq1))

        # y-direction faces: arrays built on swapped axes (ny+1 strips)
        um_y, up_y = self._y_faces(coeffs, per_y, by)
        _, hq2 = diffusive_fluxes_2d(cfg, p, 1, um_y, up_y, 0.0, 0.0,
                                     mirror_last=not per_y)
        hq2 = np.swapaxes(hq2, 0, 1)                       # back to (nx, ny+1, nq)
        q2 = self.two_over_hy * (
            self._volume(-np.asarray(p.g2(u_vals)), self.w_dy)
            + self._scatter_y(hq2))
        if not need_rhs:
            return q1, q2, None

        q1m, q1p = self._x_faces(q1, per_x, None)
        hu1, _ = diffusive_fluxes_2d(cfg, p, 0, um_x, up_x, q1m, q1p,
                                     mirror_last=not per_x)
        if p.has_convection:
            hu1 = hu1 + convective_flux(cfg, p.f1, um_x, up_x, axis=0)

        q2m, q2p = self._y_faces(q2, per_y, None)
        hu2, _ = diffusive_fluxes_2d(cfg, p, 1, um_y, up_y, q2m, q2p,
                                     mirror_last=not per_y)
        if p.has_convection:
            hu2 = hu2 + convective_flux(cfg, p.f2, um_y, up_y, axis=1)
        hu2 = np.swapaxes(hu2, 0, 1)                       # back to (nx, ny+1, nq)

        q1_vals = self._values(q1)
        q2_vals = self._values(q2)
        flux_x = -np.asarray(p.b1(u_vals)) * q1_vals
        flux_y = -np.asarray(p.b2(u_vals)) * q2_vals
        if p.has_convection:
            flux_x = flux_x + p.f1(u_vals)
            flux_y = flux_y + p.f2(u_vals)
        rhs = (self.two_over_hx * (self._volume(flux_x, self.w_dx)
                                   + self._scatter_x(hu1))
               + self.two_over_hy * (self._volume(flux_y, self.w_dy)
                                     + self._scatter_y(hu2)))
        if self.tables is not None:
            rhs -= self.tables.mode_rates(coeffs, self.bc_x, self.bc_y, t) * coeffs
        return q1, q2, rhs


@dataclass
class SchemeState2D:
    u: DGField2D
    problem: object
    flux: FluxConfig
    damping: DampingParams
    q1: Optional[DGField2D] = None
    q2: Optional[DGField2D] = None
    _op: Optional[Operator2D] = dataclass_field(default=None, repr=False)

    def operator(self) -> Operator2D:
        if self._op is None:
            self._op = Operator2D(self.u.mesh, self.u.k, self.problem,
                                  self.flux, self.damping, self.u.space)
        return self._op


def solve_q12_2d(u: DGField2D, problem, flux_cfg: FluxConfig,
                 t: float = 0.0) -> tuple[DGField2D, DGField2D]:
    op = Operator2D(u.mesh, u.k, problem, flux_cfg,
                    DampingParams(enabled=False, k=u.k), u.space)
    q1, q2, _ = op.q_and_rhs(u.coeffs, t, need_rhs=False)
    return u.with_coeffs(q1), u.with_coeffs(q2)


def rhs_u_2d(state: SchemeState2D, t: float = 0.0) -> DGField2D:
    op = state.operator()
    q1, q2, rhs = op.q_and_rhs(state.u.coeffs, t)
    state.q1 = state.u.with_coeffs(q1)
    state.q2 = state.u.with_coeffs(q2)
    return state.u.with_coeffs(rhs)
