"""Invariant suites behind ``verify``; each returns a list of checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import special as sps

from . import fock, symmetry
from .basis import ModeBasis, completeness_residual, gram_matrix, robin_polynomial
from .config import Dirichlet, DiskConfig, Robin
from .field import (
    analyze,
    angular_momentum_integral,
    angular_momentum_mode,
    energy_integral,
    energy_mode,
    evolve,
    random_state,
    solution_certificate,
    state_from_modes,
    synthesize,
    time_derivative,
)
from .numerics import QuadratureGrid, default_grid_sizes, disk_quadrature
from .spectrum import RobinSpectrum, build_spectrum, root_residual

SUITES = ("spectrum", "basis", "field", "symmetry", "fock")
REDUCED_TRUNCATION = 3
REDUCED_GRID = (48, 32)


@dataclass(frozen=True)
class Result:
    suite: str
    name: str
    value: float
    tolerance: float
    relation: str = "<="

    @property
    def passed(self) -> bool:
        if self.relation == "info":
            return True
        if not math.isfinite(self.value):
            return False
        if self.relation == "<=":
            return self.value <= self.tolerance
        if self.relation == ">":
            return self.value > self.tolerance
        return self.value >= self.tolerance

    def as_dict(self) -> dict:
        finite = math.isfinite(self.value)
        return {
            "suite": self.suite,
            "name": self.name,
            "value": self.value if finite else None,
            "relation": self.relation,
            "tolerance": None if self.relation == "info" else self.tolerance,
            "passed": self.passed,
        }


@dataclass
class Setup:
    config: DiskConfig
    spectrum: RobinSpectrum
    grid: QuadratureGrid
    basis: ModeBasis


def make_setup(config: DiskConfig, n_r: int | None = None, n_theta: int | None = None) -> Setup:
    spectrum = build_spectrum(config)
    n_r, n_theta = default_grid_sizes(config.l_max, spectrum.x_max, n_r, n_theta)
    grid = disk_quadrature(config, n_r, n_theta, x_max=spectrum.x_max)
    return Setup(config, spectrum, grid, ModeBasis(spectrum, grid))


def rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def dirichlet_zeros(ell: int, count: int) -> np.ndarray:
    """Independent oracle: scipy's tabulated Bessel zeros."""
    return sps.jn_zeros(abs(ell), count)


def interlacing_violations(spectrum: RobinSpectrum) -> int:
    """Count roots outside their expected Dirichlet-zero interval.

    For lam < |l| the n-th Robin root lies in (j_{l,n-1}, j_{l,n}], with
    j_{l,0} = 0; for lam = l = 0 the zero mode is excluded and every root
    shifts up one interval. Dirichlet roots must equal the zeros.
    """
    cfg = spectrum.config
    bad = 0
    for ell in range(cfg.l_max + 1):
        zeros = np.concatenate([[0.0], dirichlet_zeros(ell, cfg.n_max + 1)])
        shift = 1 if isinstance(cfg.boundary, Robin) and cfg.boundary.lam == 0.0 and ell == 0 else 0
        for n in range(1, cfg.n_max + 1):
            x = spectrum[(ell, n)].x
            lo, hi = zeros[n - 1 + shift], zeros[n + shift]
            if isinstance(cfg.boundary, Dirichlet):
                bad += abs(x - hi) > 1e-12 * hi
            else:
                bad += not (lo < x <= hi)
    return bad


def suite_spectrum(setup: Setup, seed: int) -> list[Result]:
    spectrum = setup.spectrum
    worst_ratio = 0.0
    for key in spectrum.indices():
        resid, bound = root_residual(key[0], setup.config.boundary, spectrum[key].x)
        worst_ratio = max(worst_ratio, resid / bound)
    parity = max(abs(spectrum[(l, n)].x - spectrum[(-l, n)].x) for l, n in spectrum.indices())
    increasing = sum(
        spectrum[(l, n + 1)].x <= spectrum[(l, n)].x
        for l in range(setup.config.l_max + 1) for n in range(1, setup.config.n_max)
    )
    disp = max(abs(e.omega**2 - e.k**2 - setup.config.mass**2) / e.omega**2 for e in spectrum.entries.values())
    return [
        Result("spectrum", "root residual / bound", worst_ratio, 1.0),
        Result("spectrum", "interlacing violations", float(interlacing_violations(spectrum)), 0.0),
        Result("spectrum", "|x(-l,n) - x(l,n)|", float(parity), 0.0),
        Result("spectrum", "non-increasing root pairs", float(increasing), 0.0),
        Result("spectrum", "dispersion relation", disp, 1e-15),
    ]


def suite_basis(setup: Setup, seed: int) -> list[Result]:
    _, dev = gram_matrix(setup.basis, setup.grid)
    samples = setup.basis.samples(setup.grid)
    vals = samples.values
    sign = np.where(setup.basis.ell % 2 == 0, 1.0, -1.0)
    parity = float(np.max(np.abs(vals[setup.basis.partner] - sign[:, None, None] * np.conj(vals))))
    bnd = setup.config.boundary
    if isinstance(bnd, Robin):
        ring, ring_dr = setup.basis.radial_profiles(np.array([setup.config.radius]))
        robin = float(np.max(np.abs(ring_dr - bnd.lam / setup.config.radius * ring)
                             / np.maximum(np.abs(ring_dr), np.abs(ring))))
    else:
        robin = float(np.max(np.abs(samples.ring)))
    residuals = []
    for n_max in (4, 8, 12):
        sub = make_setup(setup.config.with_truncation(n_max=n_max))
        residuals.append(completeness_residual(sub.basis, robin_polynomial(bnd, setup.config.radius), sub.grid))
    drops = min(a - b for a, b in zip(residuals, residuals[1:]))
    return [
        Result("basis", "max |G - I|", dev, 1e-9),
        Result("basis", "phi(-l) - (-1)^l conj phi(l)", parity, 1e-15),
        Result("basis", "boundary condition at r = R (relative)", robin, 1e-12),
        Result("basis", "completeness residual N=4", residuals[0], 0.0, "info"),
        Result("basis", "completeness residual N=8", residuals[1], 0.0, "info"),
        Result("basis", "completeness residual N=12", residuals[2], 0.0, "info"),
        Result("basis", "smallest completeness drop", drops, 0.0, ">"),
    ]


def suite_field(setup: Setup, seed: int) -> list[Result]:
    basis, grid = setup.basis, setup.grid
    round_trip = reality = 0.0
    e_pair = l_pair = 0.0
    hamilton = 0.0
    for k in range(20):
        state = random_state(basis, seed=seed + k)
        fg = synthesize(state, 0.1 * k, grid)
        back = analyze(fg, basis)
        round_trip = max(round_trip, float(np.max(np.abs(back.amplitudes - state.amplitudes))))
        reality = max(reality, fg.imag_residual)
        if k < 5:
            e = energy_mode(state)
            e1 = energy_integral(fg, "boundary").value
            e2 = energy_integral(fg, "bulk").value
            e_pair = max(e_pair, rel(e1, e), rel(e2, e), rel(e1, e2))
            l_pair = max(l_pair, abs(angular_momentum_integral(fg).value - angular_momentum_mode(state))
                         / max(abs(angular_momentum_mode(state)), 1.0))
            dot = synthesize(time_derivative(state), 0.1 * k, grid)
            # d(phi)/dt - pi/r, read back as a field with zero momentum
            diff = replace(fg, phi=dot.phi - fg.pi / grid.r[:, None], pi=np.zeros_like(fg.pi))
            hamilton = max(hamilton, float(np.max(np.abs(analyze(diff, basis).amplitudes))))

    state = random_state(basis, seed=seed)
    e0, l0 = energy_mode(state), angular_momentum_mode(state)
    mode_drift = quad_drift = 0.0
    for t in (0.0, 0.7, 1.9, 3.3, 10.0):
        s = evolve(state, t)
        mode_drift = max(mode_drift, rel(energy_mode(s), e0), abs(angular_momentum_mode(s) - l0) / max(abs(l0), 1.0))
        fg = synthesize(state, t, grid)
        quad_drift = max(quad_drift, rel(energy_integral(fg).value, e0),
                         abs(angular_momentum_integral(fg).value - l0) / max(abs(l0), 1.0))
    cert = solution_certificate(state, np.linspace(0.0, 5.0, 6), grid)
    return [
        Result("field", "round trip max error (20 states)", round_trip, 1e-8),
        Result("field", "relative imaginary part of synthesized fields", reality, 1e-12),
        Result("field", "energy: boundary/bulk/mode relative gap", e_pair, 1e-6),
        Result("field", "angular momentum: integral vs mode", l_pair, 1e-6),
        Result("field", "Hamilton equation residual", hamilton, 1e-9),
        Result("field", "H, L drift under evolve (mode space)", mode_drift, 1e-12),
        Result("field", "H, L drift through quadrature (5 times)", quad_drift, 1e-6),
        Result("field", "solution certificate, free evolution", cert, 1e-8),
    ]


def suite_symmetry(setup: Setup, seed: int) -> list[Result]:
    cfg = setup.config.with_truncation(min(setup.config.l_max, REDUCED_TRUNCATION),
                                       min(setup.config.n_max, REDUCED_TRUNCATION))
    small = make_setup(cfg, *REDUCED_GRID)
    basis, grid = small.basis, small.grid
    out: list[Result] = []

    gap = drift = reality = 0.0
    for k in range(5):
        state = random_state(basis, seed=seed + 100 + k)
        coeffs = symmetry.random_coefficients(basis, seed=seed + 200 + k)
        kernel = symmetry.BilocalKernel(coeffs)
        mode = symmetry.charge_mode_form(coeffs, state)
        for t in (0.0, 1.7):
            gap = max(gap, rel(symmetry.charge_bilocal_integral(kernel, state, t, grid), mode))
        drift = max(drift, rel(symmetry.charge_mode_form(coeffs, evolve(state, 2.3)), mode))
        val = symmetry.charge_mode_complex(coeffs, state)
        reality = max(reality, abs(val.imag) / max(abs(val), 1.0))
    out += [
        Result("symmetry", "bilocal vs mode charge (relative)", gap, 1e-6),
        Result("symmetry", "mode charge drift under evolve", drift, 1e-12),
        Result("symmetry", "imaginary part of mode charge", reality, 1e-12),
    ]

    state = random_state(basis, seed=seed + 300)
    h_gap = rel(symmetry.charge_mode_form(symmetry.energy_coefficients(basis), state), energy_mode(state))
    l_val = angular_momentum_mode(state)
    l_gap = abs(symmetry.charge_mode_form(symmetry.angular_momentum_coefficients(basis), state) - l_val) / max(abs(l_val), 1.0)
    bad = symmetry.KernelCoefficients.from_sparse(basis, beta={(0, 1): 1.0})
    out += [
        Result("symmetry", "energy coefficients reproduce H", h_gap, 1e-14),
        Result("symmetry", "angular momentum coefficients reproduce L", l_gap, 1e-14),
        Result("symmetry", "beta(0,1)=1 rejected (violations found)",
               float(len(symmetry.validate_coefficients(bad))), 1.0, ">="),
    ]

    kernel = symmetry.BilocalKernel(symmetry.random_coefficients(basis, seed=seed + 400))
    rng = np.random.default_rng(seed + 500)
    sym_g = anti_h = sym_f = 0.0
    for _ in range(8):
        p1 = (float(rng.uniform(0, cfg.radius)), float(rng.uniform(0, 2 * np.pi)))
        p2 = (float(rng.uniform(0, cfg.radius)), float(rng.uniform(0, 2 * np.pi)))
        g12 = symmetry.kernel_eval(kernel, "g", p1, p2)
        sym_g = max(sym_g, abs(g12 - symmetry.kernel_eval(kernel, "g", p2, p1)) / max(abs(g12), 1.0))
        h12 = symmetry.kernel_eval(kernel, "h_over_r1", p1, p2)
        anti_h = max(anti_h, abs(h12 + symmetry.kernel_eval(kernel, "h_over_r1", p2, p1)) / max(abs(h12), 1.0))
        f12 = symmetry.kernel_eval(kernel, "f", p1, p2)
        sym_f = max(sym_f, abs(f12 - symmetry.kernel_eval(kernel, "f", p2, p1)) / max(abs(f12), 1.0))
    out += [
        Result("symmetry", "g(1;2) - g(2;1)", sym_g, 1e-12),
        Result("symmetry", "h(1;2)/r1 + h(2;1)/r2", anti_h, 1e-12),
        Result("symmetry", "f(1;2) - f(2;1)", sym_f, 1e-12),
        Result("symmetry", "kernel Robin condition (finite differences)", kernel_robin_defect(kernel), 1e-9),
    ]

    state = random_state(basis, seed=seed + 600)
    times = np.linspace(0.0, 3.0, 7)
    e0 = energy_mode(state)
    cert = defect = e_change = 0.0
    for ell0, n0, alpha in ((1, 1, 0.9), (2, 2, 2.3)):
        u1 = lambda s, a=alpha, l=ell0, n=n0: symmetry.apply_u1(s, l, n, a)  # noqa: E731
        cert = max(cert, solution_certificate(lambda t: u1(state), times, grid))
        defect = max(defect, symmetry.flow_commutation_defect(state, u1, 1.3))
        e_change = max(e_change, rel(energy_mode(u1(state)), e0))
        for axis in (1, 2, 3):
            su2 = lambda s, a=alpha, l=ell0, n=n0, ax=axis: symmetry.apply_su2(s, l, n, ax, a)  # noqa: E731
            cert = max(cert, solution_certificate(lambda t: su2(state), times, grid))
            defect = max(defect, symmetry.flow_commutation_defect(state, su2, 1.3))
            e_change = max(e_change, rel(energy_mode(su2(state)), e0))
    out += [
        Result("symmetry", "U(1)/SU(2) solution certificate", cert, 1e-8),
        Result("symmetry", "U(1)/SU(2) flow commutation defect", defect, 1e-12),
        Result("symmetry", "U(1)/SU(2) energy change (relative)", e_change, 1e-14),
    ]

    cx = counterexample_measures(basis, grid, seed + 700)
    out += [
        Result("symmetry", "counterexample certificate (must fail to be a solution)", cx["certificate"], 0.05, ">="),
        Result("symmetry", "counterexample per-snapshot energy variation", cx["energy_variation"], 1e-3, ">="),
        Result("symmetry", "counterexample certificate vs closed form", cx["certificate_gap"], 1e-8),
        Result("symmetry", "frozen counterexample flow defect vs closed form", cx["defect_gap"], 1e-12),
    ]
    return out


COUNTEREXAMPLE_PAIR = ((0, 1), (1, 1))


def counterexample_measures(basis: ModeBasis, grid: QuadratureGrid, seed: int) -> dict:
    """Certificate and energy variation of the Q+ mixing at alpha = pi/2, |dw| t up to 1."""
    m1, m2 = COUNTEREXAMPLE_PAIR
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    state = state_from_modes(basis, {m1: amps[0], m2: amps[1]})
    delta = basis.omega[basis.position(*m2)] - basis.omega[basis.position(*m1)]
    alpha = np.pi / 2
    times = np.linspace(0.0, 1.0 / abs(delta), 9)

    def snapshot(t):
        return symmetry.counterexample_transform(state, m1, m2, "+", alpha, t)

    cert = solution_certificate(snapshot, times, grid)
    norm = float(np.linalg.norm(amps))
    predicted = max(2 * abs(math.sin(delta * t / 2)) for t in times) * math.sin(alpha / 2) * norm
    energies = [energy_mode(snapshot(t)) for t in times]
    variation = (max(energies) - min(energies)) / float(np.mean(energies))

    dt = math.pi / abs(delta)
    frozen = lambda s: symmetry.counterexample_transform(s, m1, m2, "-", alpha, 0.4)  # noqa: E731
    defect = symmetry.flow_commutation_defect(state, frozen, dt)
    defect_pred = 2 * abs(math.sin(delta * dt / 2)) * abs(math.sin(alpha / 2)) * norm
    return {
        "certificate": cert,
        "certificate_predicted": predicted,
        "certificate_gap": abs(cert - predicted),
        "energy_variation": variation,
        "defect": defect,
        "defect_gap": abs(defect - defect_pred),
    }


def kernel_robin_defect(kernel: symmetry.BilocalKernel, h: float = 2e-4) -> float:
    """Relative Robin defect of g, h/r1, f/(r1 r2) in the first argument at r1 = R.

    Fourth-order central differences straddling the edge; the mode sums
    extend smoothly past R.
    """
    cfg = kernel.basis.config
    radius = cfg.radius
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(4):
        th1 = float(rng.uniform(0, 2 * np.pi))
        v2 = kernel.mode_values(float(rng.uniform(0, radius)), float(rng.uniform(0, 2 * np.pi)))
        for which in ("g", "h_over_r1", "f_over_r1r2"):
            def val(r):
                return complex(kernel.pair_matrix(which, kernel.mode_values(r, th1), v2)[0, 0]).real
            f = [val(radius + s * h) for s in (-2, -1, 0, 1, 2)]
            deriv = (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h)
            if isinstance(cfg.boundary, Dirichlet):
                defect, scale = abs(f[2]), max(abs(deriv) * radius, 1.0)
            else:
                defect = abs(deriv - cfg.boundary.lam / radius * f[2])
                scale = max(abs(deriv), abs(f[2]) / radius, 1e-300)
            worst = max(worst, defect / scale)
    return worst


FOCK_PAIR = ((1, 1), (-1, 1))
FOCK_CAP = 6


def suite_fock(setup: Setup, seed: int) -> list[Result]:
    spectrum = setup.spectrum
    if setup.config.l_max < 1:
        return [Result("fock", "needs l_max >= 1", 1.0, 0.0)]
    space = fock.build_sector_space(fock.fock_modes(spectrum, FOCK_PAIR), FOCK_CAP)
    checks = fock.algebra_report(space)
    out = [Result("fock", f"algebra {c.name}", c.residual, c.tolerance) for c in checks]

    w = spectrum[FOCK_PAIR[0]].omega
    broken = fock.algebra_report(space, omega_override={FOCK_PAIR[1]: w * (1 + 1e-3)})
    flagged = [c for c in broken if not c.passed]
    only_hq = all(c.name.startswith("[H,Q") for c in flagged)
    out.append(Result("fock", "broken degeneracy flags [H,Q] (count)", float(len(flagged) if only_hq else 0), 1.0, ">="))

    rng = np.random.default_rng(seed)
    angles = [math.pi] + [float(a) for a in rng.uniform(-2 * np.pi, 2 * np.pi, 2)]
    conj = unit = vac = 0.0
    for alpha in angles:
        for kind, modes in (("N", [FOCK_PAIR[0]]), ("N", [FOCK_PAIR[1]]), ("T1", list(FOCK_PAIR)),
                            ("T2", list(FOCK_PAIR)), ("T3", list(FOCK_PAIR))):
            conj = max(conj, fock.conjugation_report(space, kind, alpha, modes))
            unit = max(unit, fock.unitarity_defect(space, kind, alpha, modes))
            vac = max(vac, fock.vacuum_invariance(space, kind, alpha, modes))
    out += [
        Result("fock", "conjugation N, T1, T2, T3 vs closed form", conj, 1e-10),
        Result("fock", "unitarity of exp(i alpha G)", unit, 1e-12),
        Result("fock", "vacuum invariance (exact)", vac, 0.0),
    ]

    mix_keys = COUNTEREXAMPLE_PAIR
    mixed = fock.build_sector_space(fock.fock_modes(spectrum, mix_keys), FOCK_CAP)
    qconj = heis = 0.0
    for t in (0.0, 0.8, 2.5):
        for kind in ("Q+", "Q-"):
            qconj = max(qconj, fock.conjugation_report(mixed, kind, angles[1], list(mix_keys), t))
        heis = max(heis, fock.heisenberg_conservation(mixed, mix_keys[0], mix_keys[1], t))
    vac_q = 0.0
    gen = fock.build_generators(mixed)
    v = mixed.vacuum()
    for t in (0.0, 1.3):
        ops = gen.counterexample(mix_keys[0], mix_keys[1], t)
        vac_q = max(vac_q, abs(v.conj() @ ops["Q+"] @ v), abs(v.conj() @ ops["Q-"] @ v))
    out += [
        Result("fock", "conjugation Q+(t), Q-(t) vs closed form", qconj, 1e-10),
        Result("fock", "i dQ/dt + [Q, H] for Q+(t), Q-(t)", heis, 1e-12),
        Result("fock", "<0|Q+-(t)|0>", float(vac_q), 0.0),
    ]
    return out


SUITE_FUNCS = {
    "spectrum": suite_spectrum,
    "basis": suite_basis,
    "field": suite_field,
    "symmetry": suite_symmetry,
    "fock": suite_fock,
}


def run_suites(setup: Setup, suite: str, seed: int) -> list[Result]:
    names = SUITES if suite == "all" else (suite,)
    results: list[Result] = []
    for name in names:
        if name not in SUITE_FUNCS:
            raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
        results += SUITE_FUNCS[name](setup, seed)
    return results
