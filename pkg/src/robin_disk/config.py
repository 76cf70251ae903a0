"""Physical parameters of the disk problem."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

L_MAX_CAP = 16
N_MAX_CAP = 16


@dataclass(frozen=True)
class Robin:
    """Radial Robin condition d(phi)/dr = (lam / R) phi at r = R."""

    lam: float

    def __post_init__(self):
        if not math.isfinite(self.lam):
            raise ValueError("Robin parameter must be finite; use Dirichlet() for the limit")


@dataclass(frozen=True)
class Dirichlet:
    """phi = 0 at r = R (the |lam| -> infinity limit, kept as its own case)."""


Boundary = Union[Robin, Dirichlet]


@dataclass(frozen=True)
class DiskConfig:
    radius: float = 1.0
    mass: float = 0.0
    boundary: Boundary = Robin(-1.0)
    l_max: int = 6
    n_max: int = 6

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"radius must be positive, got {self.radius}")
        if not (math.isfinite(self.mass) and self.mass >= 0):
            raise ValueError(f"mass must be nonnegative, got {self.mass}")
        if not isinstance(self.boundary, (Robin, Dirichlet)):
            raise TypeError("boundary must be Robin(lam) or Dirichlet()")
        if not 0 <= self.l_max <= L_MAX_CAP:
            raise ValueError(f"l_max must lie in [0, {L_MAX_CAP}], got {self.l_max}")
        if not 1 <= self.n_max <= N_MAX_CAP:
            raise ValueError(f"n_max must lie in [1, {N_MAX_CAP}], got {self.n_max}")

    def with_truncation(self, l_max: int | None = None, n_max: int | None = None) -> "DiskConfig":
        return DiskConfig(
            radius=self.radius,
            mass=self.mass,
            boundary=self.boundary,
            l_max=self.l_max if l_max is None else l_max,
            n_max=self.n_max if n_max is None else n_max,
        )
