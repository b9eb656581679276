"""Uniform meshes and boundary closures for the 1D and 2D solvers.

Cells are closed intervals (1D) or axis-aligned rectangles (2D) on a uniform
grid.  Boundary handling is the ghost-trace model used throughout the scheme:
a periodic boundary wraps to the opposite side, while a Dirichlet boundary
exposes a fictitious neighbor whose trace of the conserved variable is the
prescribed value (auxiliary variables copy the interior trace instead; that
part lives in the semidiscrete assembly).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Union

import numpy as np

# A Dirichlet value is either a constant or a callable of time.  Time-dependent
# data is needed when the exact solution is imposed on a subdomain boundary.
BoundaryValue = Union[float, Callable[[float], float]]


class Side(Enum):
    LEFT = "left"
    RIGHT = "right"


class BoundaryKind(Enum):
    PERIODIC = "periodic"
    DIRICHLET = "dirichlet"
    # Same numerics as DIRICHLET(0, 0); kept as its own tag so problem
    # definitions state their intent.
    COMPACT_SUPPORT = "compact-support"


@dataclass(frozen=True)
class Ghost:
    """Fictitious neighbor returned at a Dirichlet boundary."""

    value: float


@dataclass(frozen=True)
class BoundaryCondition:
    kind: BoundaryKind
    left: BoundaryValue = 0.0
    right: BoundaryValue = 0.0

    @staticmethod
    def periodic() -> "BoundaryCondition":
        return BoundaryCondition(BoundaryKind.PERIODIC)

    @staticmethod
    def dirichlet(left: BoundaryValue, right: BoundaryValue) -> "BoundaryCondition":
        return BoundaryCondition(BoundaryKind.DIRICHLET, left, right)

    @staticmethod
    def compact_support() -> "BoundaryCondition":
        return BoundaryCondition(BoundaryKind.COMPACT_SUPPORT, 0.0, 0.0)

    @property
    def is_periodic(self) -> bool:
        return self.kind is BoundaryKind.PERIODIC

    def values(self, t: float = 0.0) -> tuple[float, float]:
        """Prescribed (left, right) traces at time ``t``.

        Periodic boundaries have no prescribed data; calling this on one is a
        programming error.
        """
        if self.is_periodic:
            raise ValueError("periodic boundary carries no prescribed values")
        lv = self.left(t) if callable(self.left) else self.left
        rv = self.right(t) if callable(self.right) else self.right
        return float(lv), float(rv)


@dataclass(frozen=True)
class Mesh1D:
    a: float
    b: float
    n_cells: int

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError(f"invalid domain: need b > a, got [{self.a}, {self.b}]")
        if self.n_cells < 2:
            raise ValueError(f"too few cells: need n_cells >= 2, got {self.n_cells}")

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n_cells

    def interfaces(self) -> np.ndarray:
        """The n_cells + 1 cell interfaces, including both domain endpoints."""
        return np.linspace(self.a, self.b, self.n_cells + 1)

    def centers(self) -> np.ndarray:
        return self.a + (np.arange(self.n_cells) + 0.5) * self.h


@dataclass(frozen=True)
class Mesh2D:
    ax: float
    bx: float
    ay: float
    by: float
    nx: int
    ny: int

    def __post_init__(self):
        if not (self.bx > self.ax and self.by > self.ay):
            raise ValueError("invalid domain: need bx > ax and by > ay")
        if self.nx < 2 or self.ny < 2:
            raise ValueError(f"too few cells: need nx, ny >= 2, got {self.nx}x{self.ny}")

    @property
    def hx(self) -> float:
        return (self.bx - self.ax) / self.nx

    @property
    def hy(self) -> float:
        return (self.by - self.ay) / self.ny

    def x_interfaces(self) -> np.ndarray:
        return np.linspace(self.ax, self.bx, self.nx + 1)

    def y_interfaces(self) -> np.ndarray:
        return np.linspace(self.ay, self.by, self.ny + 1)

    def x_centers(self) -> np.ndarray:
        return self.ax + (np.arange(self.nx) + 0.5) * self.hx

    def y_centers(self) -> np.ndarray:
        return self.ay + (np.arange(self.ny) + 0.5) * self.hy


def build_uniform_1d(a: float, b: float, n_cells: int) -> Mesh1D:
    return Mesh1D(a, b, n_cells)


def build_uniform_2d(ax: float, bx: float, ay: float, by: float,
                     nx: int, ny: int) -> Mesh2D:
    return Mesh2D(ax, bx, ay, by, nx, ny)


def neighbor_1d(mesh: Mesh1D, cell: int, side: Side, bc: BoundaryCondition,
                t: float = 0.0) -> Union[int, Ghost]:
    """Neighbor of ``cell`` (numbered 1..n_cells) on ``side``.

    Interior adjacency returns the neighboring cell number; stepping off a
    periodic boundary wraps, and stepping off a Dirichlet/compact-support
    boundary returns a :class:`Ghost` carrying the prescribed trace.
    """
    n = mesh.n_cells
    if not 1 <= cell <= n:
        raise ValueError(f"cell {cell} outside 1..{n}")
    if side is Side.LEFT:
        if cell > 1:
            return cell - 1
        if bc.is_periodic:
            return n
        return Ghost(bc.values(t)[0])
    else:
        if cell < n:
            return cell + 1
        if bc.is_periodic:
            return 1
        return Ghost(bc.values(t)[1])
