"""Robin-Bessel root spectrum x_{l,n}, wavenumbers and frequencies."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import N_MAX_CAP, Boundary, Dirichlet, DiskConfig, Robin
from .numerics import RootFindingError, refine_root
from .special import ARG_CAP, bessel_j_and_prime

SCAN_START = 1e-9
SCAN_STEP = math.pi / 8
DEGENERACY_GAP = 1e-8
RESIDUAL_TOL = 1e-12


class NonOscillatoryModeError(ValueError):
    """The Robin problem has a k^2 <= 0 mode in a sector the truncation needs."""


def characteristic(ell: int, boundary: Boundary, x):
    """x J'_l(x) - lam J_l(x) for Robin, J_l(x) for Dirichlet."""
    j, jp = bessel_j_and_prime(abs(ell), x)
    if isinstance(boundary, Dirichlet):
        return j
    return x * jp - boundary.lam * j


def root_residual(ell: int, boundary: Boundary, x: float) -> tuple[float, float]:
    """(|residual|, allowed bound) for a candidate root."""
    j, jp = bessel_j_and_prime(abs(ell), x)
    if isinstance(boundary, Dirichlet):
        return abs(j), RESIDUAL_TOL
    lam = boundary.lam
    bound = RESIDUAL_TOL * max(1.0, abs(lam)) * max(abs(j), abs(x * jp))
    return abs(x * jp - lam * j), bound


def _residual_scale(ell: int, boundary: Boundary, x: float) -> float:
    j, jp = bessel_j_and_prime(ell, x)
    if isinstance(boundary, Dirichlet):
        return max(abs(j), abs(jp))
    return max(1.0, abs(boundary.lam)) * max(abs(j), abs(x * jp))


def check_oscillatory(ell: int, boundary: Boundary) -> None:
    # For lam > |l| the sector carries a mode with imaginary k (I_l profile).
    if isinstance(boundary, Robin) and boundary.lam > abs(ell):
        raise NonOscillatoryModeError(
            f"Robin lam={boundary.lam} > |l|={abs(ell)}: the l={ell} sector has a "
            "non-oscillatory (k^2 < 0) mode; only real positive k is supported"
        )


def robin_roots(ell: int, boundary: Boundary, count: int) -> list[float]:
    """First ``count`` positive roots for angular momentum ``ell``.

    Scans x from SCAN_START in steps of pi/8 for sign changes of the
    characteristic function, then refines each bracket with Brent's method.
    Roots depend only on |ell|.
    """
    if not 1 <= count <= N_MAX_CAP:
        raise ValueError(f"count must lie in [1, {N_MAX_CAP}], got {count}")
    check_oscillatory(ell, boundary)
    m = abs(int(ell))
    xs = SCAN_START + SCAN_STEP * np.arange(int((ARG_CAP - SCAN_START) / SCAN_STEP) + 1)
    vals = characteristic(m, boundary, xs)
    # exact zeros only arise from underflow near x = 0; they carry no sign information
    keep = np.flatnonzero(vals != 0.0)
    signs = np.sign(vals[keep])
    flips = np.flatnonzero(signs[:-1] * signs[1:] < 0)
    if flips.size < count:
        raise RootFindingError(
            f"found {flips.size} sign changes for l={ell}, {boundary} below x={ARG_CAP}; "
            f"need {count} (scan step {SCAN_STEP:.4f} from {SCAN_START})"
        )
    roots = []
    for idx in flips[:count]:
        lo, hi = xs[keep[idx]], xs[keep[idx + 1]]
        scale = max(_residual_scale(m, boundary, lo), _residual_scale(m, boundary, hi))
        root = refine_root(lambda x: characteristic(m, boundary, x), lo, hi,
                           tol=RESIDUAL_TOL, scale=scale)
        resid, bound = root_residual(m, boundary, root)
        if resid > bound:
            raise RootFindingError(
                f"root {root!r} for l={ell} misses the residual bound: {resid:.3e} > {bound:.3e}"
            )
        roots.append(root)
    if any(b <= a for a, b in zip(roots, roots[1:])):
        raise RootFindingError(f"roots for l={ell} are not strictly increasing: {roots}")
    return roots


@dataclass(frozen=True)
class ModeEntry:
    ell: int
    n: int
    x: float
    k: float
    omega: float
    norm: float
    residual: float


@dataclass(frozen=True)
class RobinSpectrum:
    config: DiskConfig
    entries: dict[tuple[int, int], ModeEntry]
    degeneracies: tuple[tuple[tuple[int, int], tuple[int, int]], ...] = field(default=())

    def __getitem__(self, key: tuple[int, int]) -> ModeEntry:
        return self.entries[key]

    def indices(self) -> list[tuple[int, int]]:
        """(l, n) in lexicographic order: l = -l_max..l_max, then n = 1..n_max."""
        cfg = self.config
        return [(ell, n) for ell in range(-cfg.l_max, cfg.l_max + 1) for n in range(1, cfg.n_max + 1)]

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def x_max(self) -> float:
        return max(e.x for e in self.entries.values())


def build_spectrum(config: DiskConfig) -> RobinSpectrum:
    """Roots, wavenumbers, frequencies and normalisations over the truncation."""
    from .basis import normalization

    for ell in range(config.l_max + 1):
        check_oscillatory(ell, config.boundary)

    entries: dict[tuple[int, int], ModeEntry] = {}
    for m in range(config.l_max + 1):
        roots = robin_roots(m, config.boundary, config.n_max)
        for n, x in enumerate(roots, start=1):
            k = x / config.radius
            omega = math.sqrt(k * k + config.mass * config.mass)
            norm = normalization(m, x, config.boundary, config.radius)
            resid, _ = root_residual(m, config.boundary, x)
            entry = ModeEntry(m, n, x, k, omega, norm, resid)
            entries[(m, n)] = entry
            if m:
                # shared values: the -l mode is the same root by parity
                entries[(-m, n)] = ModeEntry(-m, n, x, k, omega, norm, resid)

    ordered = {key: entries[key] for key in sorted(entries)}
    return RobinSpectrum(config=config, entries=ordered, degeneracies=_near_degeneracies(ordered))


def _near_degeneracies(entries):
    nonneg = sorted((e.x, e.ell, e.n) for e in entries.values() if e.ell >= 0)
    flagged = []
    for i, (x1, l1, n1) in enumerate(nonneg):
        for x2, l2, n2 in nonneg[i + 1:]:
            if x2 - x1 >= DEGENERACY_GAP:
                break
            if l1 != l2:
                flagged.append(((l1, n1), (l2, n2)))
    return tuple(flagged)
