"""Root refinement and fixed quadrature rules on the disk."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize, special

MAX_ITER = 200
GL_MAX_NODES = 4096
DEFAULT_N_R = 96
DEFAULT_N_THETA = 64


class RootFindingError(RuntimeError):
    pass


class UnderResolvedGridError(ValueError):
    pass


def refine_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-12,
    scale: float | None = None,
) -> float:
    """Refine a sign-change bracket of ``f`` down to floating-point resolution.

    Brent's method (bisection safeguarded inverse interpolation). The result
    satisfies ``|f(x)| <= tol * scale`` where ``scale`` defaults to the larger
    endpoint magnitude of ``f``.
    """
    flo, fhi = f(lo), f(hi)
    if not (np.isfinite(flo) and np.isfinite(fhi)):
        raise RootFindingError("non-finite function value at bracket endpoint")
    if flo == 0.0:
        return float(lo)
    if fhi == 0.0:
        return float(hi)
    if flo * fhi > 0:
        raise RootFindingError(f"no sign change on [{lo}, {hi}]: f = ({flo}, {fhi})")
    xtol = 1e-15 * max(abs(lo), abs(hi), 1e-300)
    root, info = optimize.brentq(
        f, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=MAX_ITER,
        full_output=True, disp=False,
    )
    if not info.converged:
        raise RootFindingError(f"Brent iteration did not converge in {MAX_ITER} steps")
    if scale is None:
        scale = max(abs(flo), abs(fhi))
    resid = abs(f(root))
    if resid > tol * scale:
        raise RootFindingError(f"residual {resid:.3e} exceeds {tol:.1e} * {scale:.3e}")
    return float(root)


def gauss_legendre(n: int, a: float = -1.0, b: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [a, b], exact through degree 2n - 1."""
    if not 1 <= n <= GL_MAX_NODES:
        raise ValueError(f"node count must lie in [1, {GL_MAX_NODES}], got {n}")
    x, w = special.roots_legendre(n)
    half = 0.5 * (b - a)
    return half * x + 0.5 * (a + b), half * w


@dataclass(frozen=True)
class QuadratureGrid:
    """Tensor rule on the disk: Gauss-Legendre in r times the uniform rule in theta.

    Arrays laid out as ``(n_r, n_theta)``; the ring at ``r = R`` reuses the
    angular nodes.
    """

    radius: float
    r: np.ndarray
    r_weights: np.ndarray
    theta: np.ndarray
    theta_weight: float

    @property
    def n_r(self) -> int:
        return self.r.size

    @property
    def n_theta(self) -> int:
        return self.theta.size

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_r, self.n_theta)

    @property
    def area_weights(self) -> np.ndarray:
        """Weights for the measure r dr dtheta, shape (n_r, n_theta)."""
        col = (self.r_weights * self.r)[:, None] * self.theta_weight
        return np.broadcast_to(col, self.shape)

    @property
    def plain_weights(self) -> np.ndarray:
        """Weights for the measure dr dtheta."""
        col = self.r_weights[:, None] * self.theta_weight
        return np.broadcast_to(col, self.shape)

    def integrate(self, values) -> complex | float:
        """Integral against r dr dtheta; sums in (i, j) order with numpy's pairwise reduction."""
        return _reduce(np.asarray(values) * self.area_weights)

    def integrate_plain(self, values) -> complex | float:
        return _reduce(np.asarray(values) * self.plain_weights)

    def integrate_ring(self, values) -> complex | float:
        """Integral over theta at r = R (no radial weight)."""
        return _reduce(np.asarray(values) * self.theta_weight)


def _reduce(arr: np.ndarray):
    total = np.ascontiguousarray(arr).ravel().sum()
    return total.item()


def minimum_nodes(l_max: int, x_max: float) -> tuple[int, int]:
    """Smallest (n_r, n_theta) the resolution heuristic accepts."""
    n_r = math.floor(2.0 * x_max / math.pi + 16) + 1
    n_theta = 4 * l_max + 5
    return n_r, n_theta


def default_grid_sizes(l_max: int, x_max: float, n_r: int | None = None,
                       n_theta: int | None = None) -> tuple[int, int]:
    """Requested sizes, or the defaults raised to what the heuristic demands."""
    need_r, need_theta = minimum_nodes(l_max, x_max)
    if n_r is None:
        n_r = max(DEFAULT_N_R, need_r)
    if n_theta is None:
        n_theta = max(DEFAULT_N_THETA, need_theta + need_theta % 2)
    return n_r, n_theta


def estimate_x_max(l_max: int, n_max: int) -> float:
    # upper bound on the largest root: McMahon-style j_{l,n} ~ (n + l/2 - 1/4) pi, plus one spacing
    return math.pi * (n_max + 0.5 * l_max + 1.0)


def disk_quadrature(config, n_r: int, n_theta: int, x_max: float | None = None) -> QuadratureGrid:
    """Build the tensor grid for ``config`` (anything with radius, l_max, n_max).

    Refuses node counts below the resolution heuristic
    ``n_theta > 4 l_max + 4`` and ``n_r > 2 x_max / pi + 16``.
    """
    if n_r < 8 or n_theta < 8:
        raise UnderResolvedGridError("need at least 8 radial and 8 angular nodes")
    if x_max is None:
        x_max = estimate_x_max(config.l_max, config.n_max)
    need_r, need_theta = minimum_nodes(config.l_max, x_max)
    if n_theta < need_theta:
        raise UnderResolvedGridError(
            f"n_theta={n_theta} too small for l_max={config.l_max}; need >= {need_theta}"
        )
    if n_r < need_r:
        raise UnderResolvedGridError(
            f"n_r={n_r} too small for x_max={x_max:.3f}; need >= {need_r}"
        )
    radius = float(config.radius)
    r, w = gauss_legendre(n_r, 0.0, radius)
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    return QuadratureGrid(radius=radius, r=r, r_weights=w, theta=theta,
                          theta_weight=2.0 * np.pi / n_theta)
