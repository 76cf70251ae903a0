"""Classical field states in mode coordinates.

Amplitudes are the source of truth: a ``FieldState`` stores a(l, n) referred
to time ``t0``, so the field at time t is

    phi = sum (2 w)^{-1/2} [e^{-i w (t - t0)} phi_{l,n} a + c.c.],
    pi  = r d(phi)/dt.

Grids are views produced by ``synthesize`` and read back by ``analyze``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Union

import numpy as np
from numpy.polynomial import legendre

from .basis import ModeBasis, ModeSamples
from .config import DiskConfig, Robin
from .numerics import QuadratureGrid

DEFAULT_SEED = 20190531
REALITY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class FieldState:
    basis: ModeBasis
    amplitudes: np.ndarray
    t0: float = 0.0

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (len(self.basis),):
            raise ValueError(f"expected {len(self.basis)} amplitudes, got shape {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "t0", float(self.t0))

    def __getitem__(self, key: tuple[int, int]) -> complex:
        return complex(self.amplitudes[self.basis.position(*key)])

    def replace(self, amplitudes=None, t0=None) -> "FieldState":
        return FieldState(
            self.basis,
            self.amplitudes if amplitudes is None else amplitudes,
            self.t0 if t0 is None else t0,
        )

    def heisenberg_constants(self) -> np.ndarray:
        """Amplitudes referred back to t = 0 (the integration constants)."""
        return self.amplitudes * np.exp(1j * self.basis.omega * self.t0)


def zero_state(basis: ModeBasis, t0: float = 0.0) -> FieldState:
    return FieldState(basis, np.zeros(len(basis), dtype=complex), t0)


def state_from_modes(basis: ModeBasis, amps: dict[tuple[int, int], complex], t0: float = 0.0) -> FieldState:
    arr = np.zeros(len(basis), dtype=complex)
    for key, val in amps.items():
        arr[basis.position(*key)] = val
    return FieldState(basis, arr, t0)


def random_state(
    basis: ModeBasis,
    seed: int = DEFAULT_SEED,
    n_excited: int | None = None,
    scale: float = 1.0,
) -> FieldState:
    """Seeded complex Gaussian amplitudes, optionally on a random subset of modes."""
    rng = np.random.default_rng(seed)
    m = len(basis)
    draws = scale * (rng.standard_normal(m) + 1j * rng.standard_normal(m)) / math.sqrt(2.0)
    if n_excited is not None and n_excited < m:
        mask = np.zeros(m, dtype=bool)
        mask[rng.choice(m, size=n_excited, replace=False)] = True
        draws = np.where(mask, draws, 0.0)
    return FieldState(basis, draws)


@dataclass(frozen=True, eq=False)
class FieldGrid:
    """Real field samples on a quadrature grid at time ``t``.

    Besides phi and pi it carries the channels the energy integrals need:
    the analytic radial derivative, the spectral (Laplacian - mu^2) phi and
    the boundary ring values.
    """

    grid: QuadratureGrid
    config: DiskConfig
    t: float
    phi: np.ndarray
    pi: np.ndarray
    dphi_dr: np.ndarray
    lap_phi: np.ndarray
    phi_ring: np.ndarray
    imag_residual: float = 0.0


def _combine(samples: ModeSamples, coeffs: np.ndarray, which: str) -> np.ndarray:
    if which == "ring":
        return (samples.ring * coeffs) @ samples.angular
    radial = samples.radial if which == "value" else samples.radial_dr
    return (radial.T * coeffs) @ samples.angular


def _conjugate_partner(basis: ModeBasis, c: np.ndarray) -> np.ndarray:
    # conj(phi_q) = (-1)^l phi_{-q}: the c.c. series expressed on the same modes
    sign = np.where(basis.ell % 2 == 0, 1.0, -1.0)
    return sign * np.conj(c[basis.partner])


def synthesize(state: FieldState, t: float, grid: QuadratureGrid) -> FieldGrid:
    """Sample phi and pi at time ``t`` on ``grid``.

    The conjugate half of each series is built from the -l partner modes, so
    the imaginary parts measure how well the parity relation holds; they must
    stay below 1e-12 of the field scale and are then dropped.
    """
    basis = state.basis
    samples = basis.samples(grid)
    omega = basis.omega
    c = np.exp(-1j * omega * (t - state.t0)) * state.amplitudes / np.sqrt(2.0 * omega)
    d = _conjugate_partner(basis, c)
    even, odd = c + d, c - d

    phi = _combine(samples, even, "value")
    pi_over_r = _combine(samples, -1j * omega * odd, "value")
    dphi = _combine(samples, even, "dr")
    lap = _combine(samples, -(omega**2) * even, "value")
    ring = _combine(samples, even, "ring")

    worst = 0.0
    for arr in (phi, pi_over_r, dphi, lap, ring):
        scale = max(float(np.max(np.abs(arr.real), initial=0.0)), 1.0)
        worst = max(worst, float(np.max(np.abs(arr.imag), initial=0.0)) / scale)
    if worst > REALITY_TOL:
        raise FloatingPointError(f"synthesized field not real: relative imaginary part {worst:.3e}")

    return FieldGrid(
        grid=grid,
        config=basis.config,
        t=float(t),
        phi=phi.real,
        pi=grid.r[:, None] * pi_over_r.real,
        dphi_dr=dphi.real,
        lap_phi=lap.real,
        phi_ring=ring.real,
        imag_residual=worst,
    )


def evaluate(state: FieldState, t: float, r, theta) -> tuple[np.ndarray, np.ndarray]:
    """(phi, pi) at arbitrary points 0 <= r <= R by direct series summation."""
    basis = state.basis
    r = np.asarray(r, dtype=float)
    theta = np.broadcast_to(np.asarray(theta, dtype=float), r.shape)
    if np.any(r < 0) or np.any(r > basis.config.radius):
        raise ValueError("field evaluation requires 0 <= r <= R")
    omega = basis.omega
    c = np.exp(-1j * omega * (t - state.t0)) * state.amplitudes / np.sqrt(2.0 * omega)
    d = _conjugate_partner(basis, c)
    radial, _ = basis.radial_profiles(r.ravel())
    modes = radial * np.exp(1j * np.outer(basis.ell, theta.ravel()))
    phi = (c + d) @ modes
    pi = r.ravel() * ((-1j * omega * (c - d)) @ modes)
    return phi.real.reshape(r.shape), pi.real.reshape(r.shape)


def analyze(field: FieldGrid, basis: ModeBasis, t0: float = 0.0) -> FieldState:
    """Mode amplitudes (referred to ``t0``) from gridded phi and pi.

    a = int r dr dtheta sqrt(2 w)/2 e^{i w (t - t0)} conj(phi_q) [phi + (i / w) pi / r]
    """
    grid = field.grid
    samples = basis.samples(grid)
    omega = basis.omega
    modes = samples.values.reshape(len(basis), -1)
    w = grid.area_weights.ravel()
    proj_phi = np.conj(modes) @ (field.phi.ravel() * w)
    proj_pi = np.conj(modes) @ ((field.pi / grid.r[:, None]).ravel() * w)
    amps = 0.5 * np.sqrt(2.0 * omega) * np.exp(1j * omega * (field.t - t0)) * (proj_phi + 1j * proj_pi / omega)
    return FieldState(basis, amps, t0)


def uncaptured_power(field: FieldGrid, basis: ModeBasis) -> float:
    """L2 norm of the parts of phi and pi/r lying outside the truncated span."""
    grid = field.grid
    samples = basis.samples(grid)
    modes = samples.values.reshape(len(basis), -1)
    w = grid.area_weights.ravel()
    total = 0.0
    for vals in (field.phi, field.pi / grid.r[:, None]):
        flat = vals.ravel()
        coeffs = np.conj(modes) @ (flat * w)
        rest = flat - coeffs @ modes
        total += float(np.sum(np.abs(rest) ** 2 * w))
    return math.sqrt(total)


def evolve(state: FieldState, dt: float) -> FieldState:
    """Exact free evolution: a -> e^{-i w dt} a, t0 -> t0 + dt."""
    phases = np.exp(-1j * state.basis.omega * dt)
    return FieldState(state.basis, phases * state.amplitudes, state.t0 + dt)


def time_derivative(state: FieldState) -> FieldState:
    """State whose synthesized phi equals d(phi)/dt of ``state``."""
    return state.replace(amplitudes=-1j * state.basis.omega * state.amplitudes)


def energy_mode(state: FieldState) -> float:
    return float(np.sum(state.basis.omega * np.abs(state.amplitudes) ** 2))


def angular_momentum_mode(state: FieldState) -> float:
    return float(np.sum(state.basis.ell * np.abs(state.amplitudes) ** 2))


@dataclass(frozen=True)
class Integral:
    value: float
    error: float


def _radial_tail(profile: np.ndarray, grid: QuadratureGrid) -> float:
    """Size of the top two Legendre coefficients of a radial profile, times R.

    A pessimistic proxy for the Gauss-Legendre truncation error.
    """
    n = grid.n_r
    x = 2.0 * grid.r / grid.radius - 1.0
    w = 2.0 * grid.r_weights / grid.radius
    vander = legendre.legvander(x, n - 1)
    coeffs = (vander * w[:, None]).T @ profile * (2 * np.arange(n) + 1) / 2.0
    return float(grid.radius * (abs(coeffs[-1]) + abs(coeffs[-2])))


def _theta_derivative(values: np.ndarray) -> np.ndarray:
    n = values.shape[-1]
    freqs = np.fft.fftfreq(n, d=1.0 / n)
    if n % 2 == 0:
        freqs[n // 2] = 0.0
    return np.fft.ifft(1j * freqs * np.fft.fft(values, axis=-1), axis=-1).real


def energy_integral(field: FieldGrid, form: str = "boundary") -> Integral:
    """Field energy by quadrature.

    ``form="boundary"``: gradient form plus the -lam/2 ring term;
    ``form="bulk"``: pi^2/(2 r) - (r/2) phi (Laplacian - mu^2) phi.
    """
    grid = field.grid
    r = grid.r[:, None]
    mu2 = field.config.mass ** 2
    if form == "boundary":
        if field.phi_ring.shape != (grid.n_theta,):
            raise ValueError("field grid carries no boundary ring samples")
        dtheta = _theta_derivative(field.phi)
        dens = (0.5 * field.pi**2 / r + 0.5 * r * field.dphi_dr**2
                + 0.5 * dtheta**2 / r + 0.5 * mu2 * r * field.phi**2)
        boundary = field.config.boundary
        lam = boundary.lam if isinstance(boundary, Robin) else 0.0
        ring = -0.5 * lam * grid.integrate_ring(field.phi_ring**2)
    elif form == "bulk":
        dens = 0.5 * field.pi**2 / r - 0.5 * r * field.phi * field.lap_phi
        ring = 0.0
    else:
        raise ValueError(f"unknown energy form {form!r}")
    value = grid.integrate_plain(dens) + ring
    profile = dens.sum(axis=1) * grid.theta_weight
    return Integral(float(value), _radial_tail(profile, grid))


def angular_momentum_integral(field: FieldGrid) -> Integral:
    """-int r dr dtheta (pi / r) d(phi)/dtheta, theta-derivative by FFT."""
    grid = field.grid
    dens = -field.pi * _theta_derivative(field.phi)
    value = grid.integrate_plain(dens)
    profile = dens.sum(axis=1) * grid.theta_weight
    return Integral(float(value), _radial_tail(profile, grid))


Trajectory = Union[FieldState, Callable[[float], FieldState]]


def solution_certificate(source: Trajectory, times: Iterable[float], grid: QuadratureGrid,
                         t0: float | None = None) -> float:
    """Max distance between re-analysed snapshots and the reference analysis.

    ``source`` is either a FieldState (its own free trajectory) or a callable
    returning the state whose field is shown at time t. Each snapshot is
    synthesized at its time, analysed back to ``t0``, and compared in the
    Euclidean amplitude norm. Genuine solutions give ~1e-13.
    """
    if isinstance(source, FieldState):
        state = source
        snapshot = lambda t: state  # noqa: E731
        ref_time = state.t0 if t0 is None else t0
    else:
        snapshot = source
        ref_time = 0.0 if t0 is None else t0

    ref_state = snapshot(ref_time)
    basis = ref_state.basis
    reference = analyze(synthesize(ref_state, ref_time, grid), basis, ref_time).amplitudes
    worst = 0.0
    for t in times:
        back = analyze(synthesize(snapshot(t), t, grid), basis, ref_time).amplitudes
        worst = max(worst, float(np.linalg.norm(back - reference)))
    return worst
