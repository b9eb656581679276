"""Orthonormal Legendre bases on [-1, 1] and Gauss-Legendre quadrature.

The modal basis is the Legendre polynomial P_ell scaled by sqrt((2*ell+1)/2),
so the reference mass matrix is the identity.  Projections, truncations and
norms then reduce to plain coefficient arithmetic, and the jump-damping term
becomes a per-mode decay rate.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre as npleg

MAX_QUAD_POINTS = 32


@dataclass(frozen=True)
class QuadRule:
    """Gauss-Legendre nodes and weights on [-1, 1]."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n_points(self) -> int:
        return len(self.nodes)


@lru_cache(maxsize=None)
def gauss_rule(n_points: int) -> QuadRule:
    """Gauss-Legendre rule with ``n_points`` nodes (exact to degree 2n-1).

    Parameters
    ----------
    n_points : int
        Number of nodes; supported range is 1..32.

    Returns
    -------
    QuadRule
        Nodes and weights; weights sum to 2 to machine accuracy.
    """
    if not 1 <= n_points <= MAX_QUAD_POINTS:
        raise ValueError(f"unsupported quadrature order: {n_points} (want 1..{MAX_QUAD_POINTS})")
    nodes, weights = npleg.leggauss(n_points)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadRule(nodes, weights)


def legendre_orthonormal(ell: int, x):
    """Value of the orthonormalized Legendre polynomial of degree ``ell``.

    Uses the three-term recurrence (n+1) P_{n+1} = (2n+1) x P_n - n P_{n-1}
    and scales the result by sqrt((2*ell+1)/2) so that the family is
    orthonormal in L2(-1, 1).  Accepts scalars or arrays.
    """
    if ell < 0:
        raise ValueError(f"degree must be nonnegative, got {ell}")
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if ell == 0:
        return np.sqrt(0.5) * p_prev
    p = x.copy()
    for n in range(1, ell):
        p, p_prev = ((2 * n + 1) * x * p - n * p_prev) / (n + 1), p
    return np.sqrt((2 * ell + 1) / 2.0) * p


def _scaled_coef(ell: int) -> np.ndarray:
    c = np.zeros(ell + 1)
    c[ell] = np.sqrt((2 * ell + 1) / 2.0)
    return c


def _deriv_values(ell: int, order: int, x: np.ndarray) -> np.ndarray:
    """d^order/dx^order of the orthonormal Legendre polynomial at ``x``."""
    if order > ell:
        return np.zeros_like(np.asarray(x, dtype=float))
    return npleg.legval(x, npleg.legder(_scaled_coef(ell), order))


def eval_poly(coeffs: np.ndarray, x_ref: float, deriv_order: int,
              cell_width: float) -> float:
    """Evaluate a modal polynomial (or a physical derivative) on one cell.

    ``coeffs`` are coefficients in the orthonormal Legendre basis, ``x_ref``
    the reference coordinate in [-1, 1], and ``cell_width`` the physical cell
    width; the chain rule contributes (2/width)^deriv_order.
    """
    if deriv_order < 0:
        raise ValueError("derivative order must be nonnegative")
    coeffs = np.asarray(coeffs, dtype=float)
    scaled = coeffs * np.sqrt((2 * np.arange(len(coeffs)) + 1) / 2.0)
    if deriv_order >= len(coeffs):
        return 0.0
    val = npleg.legval(x_ref, npleg.legder(scaled, deriv_order) if deriv_order else scaled)
    return float(val) * (2.0 / cell_width) ** deriv_order


class BasisSet:
    """Tabulated basis values for degree-k spaces at a fixed quadrature rule.

    Attributes
    ----------
    k : polynomial degree (>= 0)
    quad : QuadRule used for scheme integrals (default k+2 points)
    point_values : (n_quad, k+1) basis values at the quadrature nodes
    node_derivs : (k+1, n_quad, k+1) reference derivatives of order 0..k
    edge_derivs : (2, k+1, k+1) reference derivatives of order 0..k at
        x=-1 (index 0) and x=+1 (index 1); ``edge_derivs[s, m, ell]`` is the
        order-m derivative of basis function ell.
    """

    def __init__(self, k: int, n_quad: int | None = None):
        if k < 0:
            raise ValueError(f"degree must be nonnegative, got {k}")
        self.k = k
        self.quad = gauss_rule(n_quad if n_quad is not None else k + 2)
        nq = self.quad.n_points
        nodes = self.quad.nodes
        self.node_derivs = np.zeros((k + 1, nq, k + 1))
        self.edge_derivs = np.zeros((2, k + 1, k + 1))
        for ell in range(k + 1):
            for order in range(k + 1):
                self.node_derivs[order, :, ell] = _deriv_values(ell, order, nodes)
                self.edge_derivs[:, order, ell] = _deriv_values(
                    ell, order, np.array([-1.0, 1.0]))
        self.point_values = self.node_derivs[0]
        # Convenience views for the assembly kernels.
        self.left_values = self.edge_derivs[0, 0]    # phi(-1)
        self.right_values = self.edge_derivs[1, 0]   # phi(+1)
        self.point_dx = self.node_derivs[1] if k >= 1 else np.zeros((nq, k + 1))


@lru_cache(maxsize=None)
def basis_set(k: int, n_quad: int | None = None) -> BasisSet:
    """Cached :class:`BasisSet` instances keyed by (k, n_quad)."""
    return BasisSet(k, n_quad)
