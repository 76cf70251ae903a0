"""Orthonormal disk modes phi_{l,n}(r, theta) = N i^l e^{i l theta} J_l(k r)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .config import Boundary, Dirichlet, Robin
from .numerics import QuadratureGrid, UnderResolvedGridError, minimum_nodes
from .special import bessel_j, bessel_j_and_prime, bessel_j_prime
from .spectrum import RobinSpectrum

_I_POWERS = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


def i_power(m: int) -> complex:
    """i**m without rounding noise."""
    return _I_POWERS[m % 4]


def normalization(ell: int, x: float, boundary: Boundary, radius: float) -> float:
    """Modulus of the normalisation factor making phi_{l,n} unit-norm on the disk.

    Robin: k / sqrt(pi (lam^2 + x^2 - l^2) J_l(x)^2).
    Dirichlet: 1 / (sqrt(pi) R |J'_l(x)|).
    """
    if isinstance(boundary, Dirichlet):
        jp = bessel_j_prime(ell, x)
        if jp == 0.0:
            raise ValueError(f"J'_{ell}({x}) vanishes; not a Dirichlet root")
        return 1.0 / (math.sqrt(math.pi) * radius * abs(jp))
    lam = boundary.lam
    factor = lam * lam + x * x - ell * ell
    j = bessel_j(ell, x)
    if factor <= 0.0:
        raise ValueError(f"lam^2 + x^2 - l^2 = {factor} <= 0 for l={ell}, x={x}")
    if abs(j) < 1e-300:
        raise ValueError(f"J_{ell}({x}) vanishes; inconsistent with a finite Robin root")
    k = x / radius
    return k / math.sqrt(math.pi * factor * j * j)


@dataclass(frozen=True)
class ModeSamples:
    """Mode values on one quadrature grid; rows follow ``ModeBasis.index``."""

    grid: QuadratureGrid
    radial: np.ndarray      # (M, n_r) complex: N i^|l| J_|l|(k r)
    radial_dr: np.ndarray   # (M, n_r) complex: d/dr of the above
    ring: np.ndarray        # (M,) radial factor at r = R
    angular: np.ndarray     # (M, n_theta) e^{i l theta}

    @property
    def values(self) -> np.ndarray:
        """(M, n_r, n_theta) complex mode values."""
        return self.radial[:, :, None] * self.angular[:, None, :]

    @property
    def dr_values(self) -> np.ndarray:
        return self.radial_dr[:, :, None] * self.angular[:, None, :]

    @property
    def ring_values(self) -> np.ndarray:
        """(M, n_theta) mode values on the boundary ring."""
        return self.ring[:, None] * self.angular


class ModeBasis:
    """The truncated basis for a spectrum, optionally pre-sampled on a grid.

    Radial factors depend on (|l|, n) only; the angular phase is attached on
    demand. Passing ``grid`` samples eagerly so later reads never mutate.
    """

    def __init__(self, spectrum: RobinSpectrum, grid: QuadratureGrid | None = None):
        self.spectrum = spectrum
        self.config = spectrum.config
        self.index = spectrum.indices()
        self._pos = {key: i for i, key in enumerate(self.index)}
        entries = [spectrum[key] for key in self.index]
        self.ell = np.array([e.ell for e in entries])
        self.n = np.array([e.n for e in entries])
        self.k = np.array([e.k for e in entries])
        self.omega = np.array([e.omega for e in entries])
        self.norm = np.array([e.norm for e in entries])
        self.partner = np.array([self._pos[(-e.ell, e.n)] for e in entries])
        self.grid = grid
        self._samples = self._sample(grid) if grid is not None else None

    def __len__(self) -> int:
        return len(self.index)

    def __contains__(self, key) -> bool:
        return key in self._pos

    def position(self, ell: int, n: int) -> int:
        return self._pos[(ell, n)]

    def check_grid(self, grid: QuadratureGrid, angular_factor: int = 4) -> None:
        """Refuse grids below the resolution heuristic for this truncation."""
        need_r, need_theta = minimum_nodes(self.config.l_max, self.spectrum.x_max)
        need_theta = max(need_theta, angular_factor * self.config.l_max + 5)
        if grid.n_r < need_r or grid.n_theta < need_theta:
            raise UnderResolvedGridError(
                f"grid {grid.shape} under-resolves l_max={self.config.l_max}, "
                f"x_max={self.spectrum.x_max:.3f}; need at least ({need_r}, {need_theta})"
            )
        if not math.isclose(grid.radius, self.config.radius, rel_tol=0, abs_tol=0):
            raise ValueError(f"grid radius {grid.radius} differs from disk radius {self.config.radius}")

    def samples(self, grid: QuadratureGrid) -> ModeSamples:
        if self._samples is not None and grid is self.grid:
            return self._samples
        return self._sample(grid)

    def _sample(self, grid: QuadratureGrid) -> ModeSamples:
        self.check_grid(grid)
        radial, radial_dr = self.radial_profiles(grid.r)
        ring, _ = self.radial_profiles(np.array([grid.radius]))
        angular = np.exp(1j * np.outer(self.ell, grid.theta))
        return ModeSamples(grid=grid, radial=radial, radial_dr=radial_dr,
                           ring=ring[:, 0], angular=angular)

    def radial_profiles(self, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Radial factor N i^|l| J_|l|(k r) and its r-derivative for every mode.

        No disk check: callers probing just outside r = R (finite differences)
        rely on that.
        """
        r = np.asarray(r, dtype=float)
        out = np.empty((len(self.index), r.size), dtype=complex)
        out_dr = np.empty_like(out)
        done: dict[tuple[int, int], int] = {}
        for row, (ell, n) in enumerate(self.index):
            key = (abs(ell), n)
            if key in done:
                out[row] = out[done[key]]
                out_dr[row] = out_dr[done[key]]
                continue
            k = self.k[row]
            j, jp = bessel_j_and_prime(key[0], k * r)
            phase = self.norm[row] * i_power(key[0])
            out[row] = phase * j
            out_dr[row] = phase * k * jp
            done[key] = row
        return out, out_dr


def mode_eval(ell: int, n: int, r, theta, basis: ModeBasis):
    """phi_{l,n}(r, theta) with the i^l phase convention."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(r > basis.config.radius):
        raise ValueError("mode evaluation requires 0 <= r <= R")
    entry = basis.spectrum[(ell, n)]
    m = abs(ell)
    # i^l J_l = i^|l| J_|l| for either sign of l
    val = entry.norm * i_power(m) * np.exp(1j * ell * np.asarray(theta)) * bessel_j(m, entry.k * r)
    return complex(val) if np.ndim(val) == 0 else val


def gram_matrix(basis: ModeBasis, grid: QuadratureGrid) -> tuple[np.ndarray, float]:
    """Quadrature inner products <phi_a, phi_b> and max |G - I|."""
    samples = basis.samples(grid)
    phi = samples.values.reshape(len(basis), -1)
    w = grid.area_weights.ravel()
    gram = np.conj(phi) @ (phi * w).T
    deviation = float(np.max(np.abs(gram - np.eye(len(basis)))))
    return gram, deviation


def _on_grid(func, grid: QuadratureGrid) -> np.ndarray:
    if callable(func):
        rr, tt = np.meshgrid(grid.r, grid.theta, indexing="ij")
        return np.asarray(func(rr, tt))
    values = np.asarray(func)
    if values.shape != grid.shape:
        raise ValueError(f"test values have shape {values.shape}, grid is {grid.shape}")
    return values


def project(basis: ModeBasis, func, grid: QuadratureGrid) -> np.ndarray:
    """Coefficients <phi_a | f> for every basis mode."""
    values = _on_grid(func, grid)
    samples = basis.samples(grid)
    phi = samples.values.reshape(len(basis), -1)
    return np.conj(phi) @ (values * grid.area_weights).ravel()


def completeness_residual(basis: ModeBasis, func, grid: QuadratureGrid) -> float:
    """L2 norm of f minus its projection onto the truncated basis."""
    values = _on_grid(func, grid)
    coeffs = project(basis, values, grid)
    recon = np.tensordot(coeffs, basis.samples(grid).values, axes=1)
    diff = values - recon
    return math.sqrt(max(grid.integrate(np.abs(diff) ** 2), 0.0))


def robin_polynomial(boundary: Boundary, radius: float) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """Smooth test function outside the mode span obeying the boundary condition.

    f = (1 + c0 r^2) + r cos(theta) (1 + c1 r^2), with c0, c1 fixed by the
    condition at r = R in each angular sector.
    """
    r2 = radius * radius
    if isinstance(boundary, Dirichlet):
        c0 = c1 = -1.0 / r2
    else:
        lam = boundary.lam
        if lam in (2.0, 3.0):
            raise ValueError(f"no quadratic Robin polynomial for lam={lam}")
        c0 = lam / ((2.0 - lam) * r2)
        c1 = (lam - 1.0) / ((3.0 - lam) * r2)

    def f(r, theta):
        r = np.asarray(r, dtype=float)
        return (1.0 + c0 * r * r) + r * np.cos(theta) * (1.0 + c1 * r * r)

    return f
