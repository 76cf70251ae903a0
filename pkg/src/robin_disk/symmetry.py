"""Bilocal conserved charges, their kernels, and finite symmetry maps."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .basis import ModeBasis
from .field import FieldState, evolve, synthesize
from .numerics import QuadratureGrid, UnderResolvedGridError

MODE_TOL = 1e-12
PAIR_CHUNK = 256


class InvalidCoefficientsError(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("invalid kernel coefficients: " + "; ".join(violations))
        self.violations = violations


def _parity(basis: ModeBasis) -> np.ndarray:
    return np.where(basis.ell % 2 == 0, 1.0, -1.0)


@dataclass(frozen=True, eq=False)
class KernelCoefficients:
    """alpha_plus (complex), alpha_minus and beta (real), aligned with ``basis.index``.

    alpha_minus and beta are stored complex so that a bad imaginary part
    surfaces in ``validate_coefficients`` instead of being silently dropped.
    """

    basis: ModeBasis
    alpha_plus: np.ndarray
    alpha_minus: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        m = len(self.basis)
        for name in ("alpha_plus", "alpha_minus", "beta"):
            arr = np.array(getattr(self, name), dtype=complex)
            if arr.shape != (m,):
                raise ValueError(f"{name} has shape {arr.shape}, expected ({m},)")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def zeros(cls, basis: ModeBasis) -> "KernelCoefficients":
        z = np.zeros(len(basis), dtype=complex)
        return cls(basis, z, z, z)

    @classmethod
    def from_sparse(cls, basis: ModeBasis, alpha_plus=None, alpha_minus=None, beta=None) -> "KernelCoefficients":
        """Build from {(l, n): value} dictionaries; missing entries are zero."""
        arrays = []
        for table in (alpha_plus, alpha_minus, beta):
            arr = np.zeros(len(basis), dtype=complex)
            for key, val in (table or {}).items():
                arr[basis.position(*key)] = val
            arrays.append(arr)
        return cls(basis, *arrays)

    def __add__(self, other: "KernelCoefficients") -> "KernelCoefficients":
        return KernelCoefficients(self.basis, self.alpha_plus + other.alpha_plus,
                                  self.alpha_minus + other.alpha_minus, self.beta + other.beta)

    def scaled(self, factor: float) -> "KernelCoefficients":
        return KernelCoefficients(self.basis, factor * self.alpha_plus,
                                  factor * self.alpha_minus, factor * self.beta)


def validate_coefficients(coeffs: KernelCoefficients, tol: float = MODE_TOL) -> list[str]:
    """Every violated constraint, one message per offending index. Empty means valid."""
    basis = coeffs.basis
    scale = max(1.0, float(np.max(np.abs(np.concatenate(
        [coeffs.alpha_plus, coeffs.alpha_minus, coeffs.beta])))))
    lim = tol * scale
    out = []
    for i, (ell, n) in enumerate(basis.index):
        j = basis.partner[i]
        if abs(np.conj(coeffs.alpha_plus[i]) - coeffs.alpha_plus[j]) > lim and ell >= 0:
            out.append(f"alpha_plus({ell},{n}): conjugate must equal alpha_plus({-ell},{n})")
        if abs(coeffs.alpha_minus[i].imag) > lim:
            out.append(f"alpha_minus({ell},{n}) must be real")
        if abs(coeffs.beta[i].imag) > lim:
            out.append(f"beta({ell},{n}) must be real")
        if ell > 0 and abs(coeffs.alpha_minus[i] - coeffs.alpha_minus[j]) > lim:
            out.append(f"alpha_minus({ell},{n}) must equal alpha_minus({-ell},{n})")
        if ell > 0 and abs(coeffs.beta[i] + coeffs.beta[j]) > lim:
            out.append(f"beta({ell},{n}) must equal -beta({-ell},{n})")
        if ell == 0 and abs(coeffs.beta[i]) > lim:
            out.append(f"beta(0,{n}) must vanish")
    return out


def require_valid(coeffs: KernelCoefficients) -> None:
    problems = validate_coefficients(coeffs)
    if problems:
        raise InvalidCoefficientsError(problems)


def energy_coefficients(basis: ModeBasis) -> KernelCoefficients:
    """alpha_minus = (-1)^l: the charge reduces to the energy."""
    z = np.zeros(len(basis))
    return KernelCoefficients(basis, z, _parity(basis), z)


def angular_momentum_coefficients(basis: ModeBasis) -> KernelCoefficients:
    """beta = l (-1)^l: the charge reduces to the angular momentum."""
    z = np.zeros(len(basis))
    return KernelCoefficients(basis, z, z, basis.ell * _parity(basis))


def random_coefficients(basis: ModeBasis, seed: int) -> KernelCoefficients:
    """Seeded coefficients satisfying every constraint exactly."""
    rng = np.random.default_rng(seed)
    m = len(basis)
    ap = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    am = rng.standard_normal(m)
    bt = rng.standard_normal(m)
    pos = basis.ell > 0
    neg_of_pos = basis.partner[pos]
    ap[neg_of_pos] = np.conj(ap[pos])
    am[neg_of_pos] = am[pos]
    bt[neg_of_pos] = -bt[pos]
    zero = basis.ell == 0
    ap[zero] = ap[zero].real
    bt[zero] = 0.0
    return KernelCoefficients(basis, ap, am, bt)


# -- bilocal kernels -------------------------------------------------------


class BilocalKernel:
    """Point evaluators for g(1;2), h(1;2)/r1 and f(1;2) from mode coefficients."""

    def __init__(self, coeffs: KernelCoefficients):
        require_valid(coeffs)
        self.coeffs = coeffs
        self.basis = coeffs.basis

    def mode_values(self, r, theta) -> np.ndarray:
        """(M, P) mode values at P points; r may slightly exceed R for probes."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        radial, _ = self.basis.radial_profiles(r)
        return radial * np.exp(1j * np.outer(self.basis.ell, theta))

    def weights(self, which: str) -> tuple[np.ndarray, np.ndarray]:
        """(same-mode, partner-mode) weights of the pair sum for ``which``."""
        c = self.coeffs
        w2 = self.basis.omega ** 2
        if which == "g":
            return c.alpha_plus, c.alpha_minus
        if which == "lap_g":
            return -w2 * c.alpha_plus, -w2 * c.alpha_minus
        if which == "f_over_r1r2":
            return w2 * c.alpha_plus, w2 * c.alpha_minus
        if which == "h_over_r1":
            return np.zeros_like(c.beta), 1j * c.beta
        raise ValueError(f"unknown kernel component {which!r}")

    def pair_matrix(self, which: str, v1: np.ndarray, v2: np.ndarray) -> np.ndarray:
        """K[i, j] = sum_q A_q v1[q, i] v2[q, j] + B_q v1[q, i] v2[-q, j]."""
        a, b = self.weights(which)
        return (v1.T * a) @ v2 + (v1.T * b) @ v2[self.basis.partner]


def kernel_eval(kernel: BilocalKernel, which: str, point1, point2) -> float:
    """g, h, h/r1 or f at one point pair (r, theta)."""
    (r1, t1), (r2, t2) = point1, point2
    radius = kernel.basis.config.radius
    for r in (r1, r2):
        if not 0.0 <= r <= radius:
            raise ValueError(f"point radius {r} outside the disk")
    v1 = kernel.mode_values(r1, t1)
    v2 = kernel.mode_values(r2, t2)
    if which == "g":
        val = kernel.pair_matrix("g", v1, v2)
    elif which == "h_over_r1":
        val = kernel.pair_matrix("h_over_r1", v1, v2)
    elif which == "h":
        val = r1 * kernel.pair_matrix("h_over_r1", v1, v2)
    elif which == "f":
        val = r1 * r2 * kernel.pair_matrix("f_over_r1r2", v1, v2)
    else:
        raise ValueError(f"unknown kernel component {which!r}")
    val = complex(val[0, 0])
    if abs(val.imag) > MODE_TOL * max(1.0, abs(val.real)):
        raise FloatingPointError(f"kernel {which} not real: {val}")
    return val.real


def charge_bilocal_integral(kernel: BilocalKernel, state: FieldState, t: float,
                            grid: QuadratureGrid, chunk: int = PAIR_CHUNK) -> float:
    """Double quadrature of the bilocal charge at time ``t``.

    Integrand (measure r1 r2 dr1 dtheta1 dr2 dtheta2):
        1/2 (pi1/r1)(pi2/r2) g - 1/2 phi1 phi2 (Laplacian_1 - mu^2) g + phi1 (pi2/r2) h/r1,
    with (Laplacian_1 - mu^2) g taken in mode space.
    """
    l_max = state.basis.config.l_max
    if grid.n_theta < 4 * l_max + 4:
        raise UnderResolvedGridError(f"double integral needs n_theta >= {4 * l_max + 4}")
    fg = synthesize(state, t, grid)
    w = grid.area_weights.ravel()
    phi_w = fg.phi.ravel() * w
    pr_w = (fg.pi / grid.r[:, None]).ravel() * w
    modes = kernel.basis.samples(grid).values.reshape(len(kernel.basis), -1)

    total = 0.0 + 0.0j
    npts = modes.shape[1]
    for start in range(0, npts, chunk):
        rows = slice(start, min(start + chunk, npts))
        v1 = modes[:, rows]
        g = kernel.pair_matrix("g", v1, modes)
        lap = kernel.pair_matrix("lap_g", v1, modes)
        h = kernel.pair_matrix("h_over_r1", v1, modes)
        total += 0.5 * pr_w[rows] @ (g @ pr_w)
        total -= 0.5 * phi_w[rows] @ (lap @ phi_w)
        total += phi_w[rows] @ (h @ pr_w)
    return float(total.real)


# -- mode-space charges ----------------------------------------------------


def _charge_terms(coeffs: KernelCoefficients, state: FieldState) -> tuple[np.ndarray, np.ndarray]:
    basis = coeffs.basis
    a = state.amplitudes
    sign = _parity(basis)
    cross = coeffs.alpha_plus * sign * basis.omega * np.conj(a) * a[basis.partner]
    diag = (coeffs.alpha_minus * basis.omega + coeffs.beta) * sign * np.abs(a) ** 2
    return cross, diag


def charge_mode_complex(coeffs: KernelCoefficients, state: FieldState) -> complex:
    """Mode form before taking the real part; its imaginary part should vanish."""
    cross, diag = _charge_terms(coeffs, state)
    return complex(np.sum(cross) + np.sum(diag))


def charge_mode_form(coeffs: KernelCoefficients, state: FieldState) -> float:
    """sum alpha_+ (-1)^l w conj(a) a(-l) + sum (alpha_- w + beta) (-1)^l |a|^2."""
    require_valid(coeffs)
    cross, diag = _charge_terms(coeffs, state)
    val = complex(np.sum(cross) + np.sum(diag))
    scale = float(np.sum(np.abs(cross)) + np.sum(np.abs(diag)))
    if abs(val.imag) > MODE_TOL * max(scale, 1e-300):
        raise FloatingPointError(f"mode-form charge not real: {val}")
    return val.real


@dataclass(frozen=True, eq=False)
class GeneratorTable:
    index: list
    N: np.ndarray
    Q: np.ndarray

    def __getitem__(self, key: tuple[str, int, int]):
        name, ell, n = key
        i = self.index.index((ell, n))
        return (self.N if name == "N" else self.Q)[i]


def generator_values(state: FieldState) -> GeneratorTable:
    """N = |a(l,n)|^2 and Q = conj(a(l,n)) a(-l,n) for every mode."""
    a = state.amplitudes
    basis = state.basis
    return GeneratorTable(list(basis.index), np.abs(a) ** 2, np.conj(a) * a[basis.partner])


# -- finite transformations ------------------------------------------------


def apply_u1(state: FieldState, ell0: int, n0: int, alpha: float) -> FieldState:
    """Phase rotation a(l0, n0) -> e^{-i alpha} a(l0, n0)."""
    amps = state.amplitudes.copy()
    i = state.basis.position(ell0, n0)
    amps[i] *= np.exp(-1j * alpha)
    return state.replace(amplitudes=amps)


def su2_matrix(axis: int, alpha: float) -> np.ndarray:
    """2x2 action on (a(+l0), a(-l0))."""
    c, s = math.cos(alpha / 2), math.sin(alpha / 2)
    if axis == 1:
        return np.array([[c, -1j * s], [-1j * s, c]])
    if axis == 2:
        return np.array([[c, -s], [s, c]], dtype=complex)
    if axis == 3:
        return np.diag([np.exp(-0.5j * alpha), np.exp(0.5j * alpha)])
    raise ValueError(f"axis must be 1, 2 or 3, got {axis}")


def apply_su2(state: FieldState, ell0: int, n0: int, axis: int, alpha: float) -> FieldState:
    """Rotation of the (+l0, -l0) doublet at radial index n0 about ``axis``."""
    if ell0 <= 0:
        raise ValueError(f"apply_su2 needs l0 > 0, got {ell0}")
    basis = state.basis
    ip, im = basis.position(ell0, n0), basis.position(-ell0, n0)
    amps = state.amplitudes.copy()
    amps[[ip, im]] = su2_matrix(axis, alpha) @ amps[[ip, im]]
    return state.replace(amplitudes=amps)


def counterexample_matrix(variant: str, alpha: float, delta: float, t: float) -> np.ndarray:
    """2x2 mixing of (a1, a2) generated by Q+(t) or Q-(t), delta = w2 - w1."""
    c, s = math.cos(alpha / 2), math.sin(alpha / 2)
    ph = np.exp(1j * delta * t)
    if variant == "+":
        return np.array([[c, -1j * s * ph], [-1j * s / ph, c]])
    if variant == "-":
        return np.array([[c, -s * ph], [s / ph, c]])
    raise ValueError(f"variant must be '+' or '-', got {variant!r}")


def counterexample_transform(state: FieldState, mode1: tuple[int, int], mode2: tuple[int, int],
                             variant: str, alpha: float, t: float) -> FieldState:
    """Mix two non-degenerate amplitudes with the explicit phase e^{i(w2 - w1) t}.

    The stored amplitudes are mixed as they stand; for a state referred to
    t0 = 0 these are the integration constants.
    """
    basis = state.basis
    i1, i2 = basis.position(*mode1), basis.position(*mode2)
    w1, w2 = basis.omega[i1], basis.omega[i2]
    if abs(w2 - w1) <= MODE_TOL * max(w1, w2):
        raise ValueError(f"modes {mode1} and {mode2} are degenerate (w = {w1!r}); pick |l1| != |l2|")
    amps = state.amplitudes.copy()
    amps[[i1, i2]] = counterexample_matrix(variant, alpha, w2 - w1, t) @ amps[[i1, i2]]
    return state.replace(amplitudes=amps)


def flow_commutation_defect(state: FieldState, transform: Callable[[FieldState], FieldState],
                            dt: float) -> float:
    """|| evolve(T(s), dt) - T(evolve(s, dt)) || in the amplitude 2-norm."""
    lhs = evolve(transform(state), dt).amplitudes
    rhs = transform(evolve(state, dt)).amplitudes
    return float(np.linalg.norm(lhs - rhs))
