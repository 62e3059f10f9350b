"""Boundary conditions for the 1D domain."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class Wall:
    """Closed wall: zero mass flux, zero velocity at the boundary interface."""


@dataclass(frozen=True)
class Periodic:
    """Periodic domain; must be used on both sides."""


@dataclass(frozen=True)
class Discharge:
    """Prescribed inflow discharge q(t) (m^2/s), distributed over the layers
    proportionally to their thickness fractions; rho(t) gives the inflow
    density-perturbation profile (one value per boundary layer)."""

    q: Callable[[float], float]
    rho: Callable[[float], np.ndarray]


@dataclass(frozen=True)
class Elevation:
    """Dirichlet free-surface elevation eta(t) imposed through a ghost cell;
    the boundary interface velocity remains a prognostic unknown. rho(t)
    gives the exterior density profile used for inflow upwinding."""

    eta: Callable[[float], float]
    rho: Callable[[float], np.ndarray]


@dataclass(frozen=True)
class Boundaries:
    left: object
    right: object

    def __post_init__(self):
        lp = isinstance(self.left, Periodic)
        rp = isinstance(self.right, Periodic)
        if lp != rp:
            raise ValueError("periodic boundaries must be set on both sides")

    @property
    def periodic(self) -> bool:
        return isinstance(self.left, Periodic)


def closed() -> Boundaries:
    return Boundaries(Wall(), Wall())


def periodic() -> Boundaries:
    return Boundaries(Periodic(), Periodic())
