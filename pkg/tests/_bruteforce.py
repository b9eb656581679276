"""Naive reference evaluators used to cross-check the vectorized kernels.

Everything here trades speed for obviousness: plain Python loops over cells,
derivative orders and multi-indices, with endpoint derivatives of Legendre
polynomials taken from the closed form

    P_l^(m)(+1) = (l+m)! / (2^m m! (l-m)!),    P_l^(m)(-1) = (-1)^(l+m) P_l^(m)(+1)

rather than from the tabulated series derivatives the library itself uses.
"""

from math import factorial, sqrt

import numpy as np


def endpoint_derivative(ell: int, order: int, side: int) -> float:
    """Order-``order`` derivative of the orthonormal Legendre polynomial of
    degree ``ell`` at x = -1 (side=0) or x = +1 (side=1)."""
    if order > ell:
        return 0.0
    val = factorial(ell + order) / (2 ** order * factorial(order) * factorial(ell - order))
    if side == 0 and (ell + order) % 2 == 1:
        val = -val
    return val * sqrt((2 * ell + 1) / 2.0)


def cell_edge_derivative(cell_coeffs, order: int, side: int, h: float) -> float:
    """Physical derivative of a 1D modal polynomial at its left/right edge."""
    total = 0.0
    for ell, c in enumerate(cell_coeffs):
        total += c * endpoint_derivative(ell, order, side)
    return total * (2.0 / h) ** order


def brute_sigma_1d(u, bc, t: float = 0.0) -> np.ndarray:
    """(n_cells, k+1) damping coefficients computed straight from the formula."""
    mesh, k = u.mesh, u.k
    n = mesh.n_cells
    jumps = np.zeros((n + 1, k + 1))
    for order in range(k + 1):
        for face in range(n + 1):
            if face == 0:
                if bc.is_periodic:
                    lo = cell_edge_derivative(u.coeffs[n - 1], order, 1, mesh.h)
                    hi = cell_edge_derivative(u.coeffs[0], order, 0, mesh.h)
                elif order == 0:
                    lo = bc.values(t)[0]
                    hi = cell_edge_derivative(u.coeffs[0], 0, 0, mesh.h)
                else:
                    lo = hi = 0.0
            elif face == n:
                if bc.is_periodic:
                    lo = cell_edge_derivative(u.coeffs[n - 1], order, 1, mesh.h)
                    hi = cell_edge_derivative(u.coeffs[0], order, 0, mesh.h)
                elif order == 0:
                    lo = cell_edge_derivative(u.coeffs[n - 1], 0, 1, mesh.h)
                    hi = bc.values(t)[1]
                else:
                    lo = hi = 0.0
            else:
                lo = cell_edge_derivative(u.coeffs[face - 1], order, 1, mesh.h)
                hi = cell_edge_derivative(u.coeffs[face], order, 0, mesh.h)
            jumps[face, order] = hi - lo
    sigma = np.zeros((n, k + 1))
    for j in range(n):
        for order in range(k + 1):
            pref = (2.0 * (2 * order + 1) / (2 * k - 1)
                    * mesh.h ** order / factorial(order))
            sigma[j, order] = pref * sqrt(jumps[j, order] ** 2
                                          + jumps[j + 1, order] ** 2)
    return sigma


def corner_derivative(cell_coeffs, mode_x, mode_y, ax: int, ay: int,
                      cx: int, cy: int, hx: float, hy: float) -> float:
    """Mixed derivative d^(ax+ay) u / dx^ax dy^ay at one corner of a cell.

    ``cx``/``cy`` select the corner: 0 for the low side, 1 for the high side.
    """
    total = 0.0
    for c, ix, iy in zip(cell_coeffs, mode_x, mode_y):
        total += (c * endpoint_derivative(int(ix), ax, cx)
                  * endpoint_derivative(int(iy), ay, cy))
    return total * (2.0 / hx) ** ax * (2.0 / hy) ** ay


def brute_sigma_2d(u, bc_x, bc_y, t: float = 0.0) -> np.ndarray:
    """(nx, ny, k+1) damping coefficients via per-cell, per-vertex loops.

    Every cell sees, at each of its four corners, one jump against each of
    the two edge-adjacent neighbors through that corner; boundary faces wrap
    when periodic, compare the value itself against the prescribed datum when
    not, and contribute nothing for derivative orders >= 1 at a wall.
    """
    mesh, k = u.mesh, u.k
    nx, ny, hx, hy = mesh.nx, mesh.ny, mesh.hx, mesh.hy
    mx, my = u.mode_x, u.mode_y
    h = max(hx, hy)

    def deriv(i, j, ax, ay, cx, cy):
        return corner_derivative(u.coeffs[i, j], mx, my, ax, ay, cx, cy, hx, hy)

    def x_jump(i, j, ax, ay, cy):
        """Jump across the vertical face left of cell i (face index i)."""
        if 0 < i < nx:
            return deriv(i, j, ax, ay, 0, cy) - deriv(i - 1, j, ax, ay, 1, cy)
        if bc_x.is_periodic:
            return deriv(0, j, ax, ay, 0, cy) - deriv(nx - 1, j, ax, ay, 1, cy)
        if ax + ay > 0:
            return 0.0
        gl, gr = bc_x.values(t)
        if i == 0:
            return deriv(0, j, 0, 0, 0, cy) - gl
        return gr - deriv(nx - 1, j, 0, 0, 1, cy)

    def y_jump(i, j, ax, ay, cx):
        """Jump across the horizontal face below cell j (face index j)."""
        if 0 < j < ny:
            return deriv(i, j, ax, ay, cx, 0) - deriv(i, j - 1, ax, ay, cx, 1)
        if bc_y.is_periodic:
            return deriv(i, 0, ax, ay, cx, 0) - deriv(i, ny - 1, ax, ay, cx, 1)
        if ax + ay > 0:
            return 0.0
        gb, gt = bc_y.values(t)
        if j == 0:
            return deriv(i, 0, 0, 0, cx, 0) - gb
        return gt - deriv(i, ny - 1, 0, 0, cx, 1)

    sigma = np.zeros((nx, ny, k + 1))
    for i in range(nx):
        for j in range(ny):
            for order in range(k + 1):
                pref = (2.0 * (2 * order + 1) / (2 * k - 1)
                        * h ** order / factorial(order))
                total = 0.0
                for ax in range(order, -1, -1):
                    ay = order - ax
                    sq = 0.0
                    for cy in (0, 1):                 # left & right faces
                        sq += x_jump(i, j, ax, ay, cy) ** 2
                        sq += x_jump(i + 1, j, ax, ay, cy) ** 2
                    for cx in (0, 1):                 # bottom & top faces
                        sq += y_jump(i, j, ax, ay, cx) ** 2
                        sq += y_jump(i, j + 1, ax, ay, cx) ** 2
                    total += sqrt(sq / 4.0)
                sigma[i, j, order] = pref * total
    return sigma


def brute_l2_projection(func, mesh, k, n_quad: int = 12) -> np.ndarray:
    """1D modal projection via dense quadrature, one mode at a time."""
    from ofldg.basis import gauss_rule, legendre_orthonormal

    rule = gauss_rule(n_quad)
    coeffs = np.zeros((mesh.n_cells, k + 1))
    centers = mesh.centers()
    for j in range(mesh.n_cells):
        x = centers[j] + 0.5 * mesh.h * rule.nodes
        fx = func(x)
        for m in range(k + 1):
            coeffs[j, m] = np.sum(rule.weights * fx * legendre_orthonormal(m, rule.nodes))
    return coeffs
