"""Acceptance criteria, each run at its stated tolerance.

Every criterion records one PASS/FAIL line, printed at the end of the pytest
session. Run directly (``python tests/test_acceptance.py``) to print the lines
without pytest.
"""

from __future__ import annotations

import math
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

from robin_disk import fock, symmetry
from robin_disk.basis import completeness_residual, gram_matrix, robin_polynomial
from robin_disk.config import DiskConfig, Dirichlet, Robin
from robin_disk.field import (
    analyze,
    angular_momentum_integral,
    angular_momentum_mode,
    energy_integral,
    energy_mode,
    evolve,
    random_state,
    solution_certificate,
    synthesize,
)
from robin_disk.spectrum import build_spectrum, root_residual
from robin_disk.verify import (
    COUNTEREXAMPLE_PAIR,
    FOCK_CAP,
    FOCK_PAIR,
    counterexample_measures,
    interlacing_violations,
    make_setup,
)

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # direct script run outside the tests directory
    ACCEPTANCE_LINES = {}

SEED = 20190531
CRITERIA = {}


def criterion(number, title):
    def register(func):
        CRITERIA[number] = (title, func)
        return func
    return register


def rel(a, b):
    return abs(a - b) / abs(b)


@criterion(1, "spectrum correctness")
def spectrum_correctness():
    worst_ratio = 0.0
    violations = 0
    parity = 0.0
    for boundary in (Robin(-10.0), Robin(-1.0), Robin(0.0), Dirichlet()):
        spectrum = build_spectrum(DiskConfig(boundary=boundary, l_max=6, n_max=6))
        for key in spectrum.indices():
            resid, bound = root_residual(key[0], boundary, spectrum[key].x)
            worst_ratio = max(worst_ratio, resid / bound)
            parity = max(parity, abs(spectrum[key].x - spectrum[(-key[0], key[1])].x))
        violations += interlacing_violations(spectrum)
    ok = worst_ratio <= 1.0 and violations == 0 and parity == 0.0
    return ok, f"max residual/bound {worst_ratio:.2e}, interlacing violations {violations}, parity gap {parity:.1e}"


@criterion(2, "orthonormality")
def orthonormality():
    # l = -6..6 with n = 1..6 gives 78 modes; n = 1..13 gives the 169-mode count
    devs = {}
    for n_max in (6, 13):
        setup = make_setup(DiskConfig(l_max=6, n_max=n_max), 200, 64)
        _, devs[len(setup.basis)] = gram_matrix(setup.basis, setup.grid)
    ok = all(d < 1e-9 for d in devs.values())
    return ok, ", ".join(f"{m} modes: max|G-I| {d:.2e}" for m, d in devs.items()) + " (tol 1e-9)"


@criterion(3, "completeness")
def completeness():
    residuals = []
    for n_max in (4, 8, 12):
        cfg = DiskConfig(l_max=6, n_max=n_max)
        setup = make_setup(cfg, 200, 64)
        residuals.append(completeness_residual(setup.basis, robin_polynomial(cfg.boundary, cfg.radius), setup.grid))
    ok = residuals[0] > residuals[1] > residuals[2]
    return ok, "residuals N=4,8,12: " + " > ".join(f"{r:.3e}" for r in residuals)


@criterion(4, "round trip")
def round_trip():
    setup = make_setup(DiskConfig())
    worst = 0.0
    for k in range(20):
        state = random_state(setup.basis, seed=SEED + k)
        t = 0.31 * k
        back = analyze(synthesize(state, t, setup.grid), setup.basis, state.t0)
        worst = max(worst, float(np.max(np.abs(back.amplitudes - state.amplitudes))))
    return worst < 1e-8, f"20 states, max amplitude error {worst:.2e} (tol 1e-8)"


@criterion(5, "Hamiltonian consistency")
def hamiltonian_consistency():
    setup = make_setup(DiskConfig(mass=0.5))
    h_worst = l_worst = 0.0
    for k in range(5):
        state = random_state(setup.basis, seed=SEED + 10 + k)
        field = synthesize(state, 0.7 * k, setup.grid)
        forms = [energy_mode(state), energy_integral(field, "boundary").value, energy_integral(field, "bulk").value]
        for i in range(3):
            for j in range(i + 1, 3):
                h_worst = max(h_worst, rel(forms[i], forms[j]))
        l_worst = max(l_worst, rel(angular_momentum_integral(field).value, angular_momentum_mode(state)))
    ok = h_worst < 1e-6 and l_worst < 1e-6
    return ok, f"H pairwise {h_worst:.2e}, L integral vs mode {l_worst:.2e} (relative, tol 1e-6)"


@criterion(6, "conservation")
def conservation():
    setup = make_setup(DiskConfig(mass=0.5))
    basis, grid = setup.basis, setup.grid
    state = random_state(basis, seed=SEED + 20)
    coeffs = [symmetry.random_coefficients(basis, seed=SEED + 30 + k) for k in range(5)]

    def charges(s):
        table = symmetry.generator_values(s)
        return (energy_mode(s), angular_momentum_mode(s), table.N, table.Q,
                np.array([symmetry.charge_mode_form(c, s) for c in coeffs]))

    e0, l0, n0, q0, c0 = charges(state)
    n_scale = float(np.max(n0))
    c_scale = np.maximum(np.abs(c0), 1.0)

    def gaps(e, lv, n, q, c):
        return max(rel(e, e0), abs(lv - l0) / max(abs(l0), 1.0),
                   float(np.max(np.abs(n - n0))) / n_scale, float(np.max(np.abs(q - q0))) / n_scale,
                   float(np.max(np.abs(c - c0) / c_scale)))

    times = [0.0, 0.9, 2.3, 5.1, 11.7]
    mode_gap = max(gaps(*charges(evolve(state, t))) for t in times)

    quad_gap = 0.0
    for t in times:
        field = synthesize(evolve(state, t), t, grid)
        # amplitudes at the instant t, recovered by quadrature
        seen = analyze(field, basis, t0=t)
        _, _, n, q, c = charges(seen)
        quad_gap = max(quad_gap, gaps(energy_integral(field).value, angular_momentum_integral(field).value, n, q, c))
    ok = mode_gap <= 1e-12 and quad_gap <= 1e-6
    return ok, f"mode-space drift {mode_gap:.2e} (tol 1e-12), quadrature drift over 5 times {quad_gap:.2e} (tol 1e-6)"


@criterion(7, "bilocal vs mode charge")
def bilocal_vs_mode():
    setup = make_setup(DiskConfig(mass=0.5, l_max=3, n_max=3), 48, 32)
    worst = 0.0
    start = time.perf_counter()
    for k in range(5):
        state = random_state(setup.basis, seed=SEED + 40 + k)
        coeffs = symmetry.random_coefficients(setup.basis, seed=SEED + 50 + k)
        integral = symmetry.charge_bilocal_integral(symmetry.BilocalKernel(coeffs), state, 0.6 * k, setup.grid)
        worst = max(worst, rel(integral, symmetry.charge_mode_form(coeffs, state)))
    elapsed = time.perf_counter() - start
    return worst < 1e-6, f"5 pairs at L=N=3, max relative gap {worst:.2e} (tol 1e-6), {elapsed:.1f} s"


@criterion(8, "symmetry certificates")
def symmetry_certificates():
    setup = make_setup(DiskConfig(mass=0.5))
    state = random_state(setup.basis, seed=SEED + 60)
    times = np.linspace(0.0, 4.0, 6)
    e0 = energy_mode(state)
    transforms = [lambda s, l=l, n=n, a=a: symmetry.apply_u1(s, l, n, a)
                  for l, n, a in ((0, 1, 0.4), (3, 2, 2.9), (-5, 4, -1.3))]
    transforms += [lambda s, l=l, n=n, ax=ax, a=a: symmetry.apply_su2(s, l, n, ax, a)
                   for l, n, a in ((1, 1, 0.8), (4, 3, 2.2), (6, 6, -2.7)) for ax in (1, 2, 3)]
    cert = defect = e_change = 0.0
    for transform in transforms:
        moved = transform(state)
        cert = max(cert, solution_certificate(lambda t, m=moved: evolve(m, t), times, setup.grid))
        defect = max(defect, symmetry.flow_commutation_defect(state, transform, 1.7))
        e_change = max(e_change, rel(energy_mode(moved), e0))
    ok = cert <= 1e-8 and defect <= 1e-12 and e_change <= 1e-14
    return ok, (f"certificate {cert:.2e} (tol 1e-8), flow defect {defect:.2e} (tol 1e-12), "
                f"energy change {e_change:.2e} (tol 1e-14)")


@criterion(9, "counterexample")
def counterexample():
    setup = make_setup(DiskConfig(mass=0.5))
    cx = counterexample_measures(setup.basis, setup.grid, SEED + 70)
    ok = cx["certificate"] >= 0.05 and cx["energy_variation"] >= 1e-3
    return ok, (f"modes {COUNTEREXAMPLE_PAIR}: certificate {cx['certificate']:.3f} (>= 0.05), "
                f"energy variation {cx['energy_variation']:.3f} (>= 1e-3)")


@criterion(10, "quantum algebra")
def quantum_algebra():
    spectrum = build_spectrum(DiskConfig())
    space = fock.build_sector_space(fock.fock_modes(spectrum, FOCK_PAIR), FOCK_CAP)
    checks = fock.algebra_report(space)
    algebra = max(c.residual for c in checks)
    rng = np.random.default_rng(SEED)
    angles = [math.pi, *rng.uniform(-2 * math.pi, 2 * math.pi, 3)]
    conj = 0.0
    vac = 0.0
    for alpha in angles:
        for kind, modes in (("N", [FOCK_PAIR[0]]), ("N", [FOCK_PAIR[1]]),
                            ("T1", list(FOCK_PAIR)), ("T2", list(FOCK_PAIR))):
            conj = max(conj, fock.conjugation_report(space, kind, alpha, modes))
        for kind, modes in (("N", [FOCK_PAIR[0]]), ("T1", list(FOCK_PAIR)),
                            ("T2", list(FOCK_PAIR)), ("T3", list(FOCK_PAIR))):
            vac = max(vac, fock.vacuum_invariance(space, kind, alpha, modes))
    mixed = fock.build_sector_space(fock.fock_modes(spectrum, COUNTEREXAMPLE_PAIR), FOCK_CAP)
    heis = 0.0
    for t in (0.0, 0.7, 2.9):
        for kind in ("Q+", "Q-"):
            conj = max(conj, fock.conjugation_report(mixed, kind, angles[1], list(COUNTEREXAMPLE_PAIR), t))
        heis = max(heis, fock.heisenberg_conservation(mixed, *COUNTEREXAMPLE_PAIR, t))
    ok = algebra <= 1e-12 and conj <= 1e-10 and heis <= 1e-12 and vac == 0.0
    return ok, (f"{len(checks)} identities, max {algebra:.1e} (tol 1e-12); conjugation {conj:.1e} (tol 1e-10); "
                f"Heisenberg {heis:.1e} (tol 1e-12); vacuum {vac:.1e} (exact)")


@criterion(11, "determinism")
def determinism():
    outputs = []
    with tempfile.TemporaryDirectory() as tmp:
        for k in range(2):
            path = Path(tmp) / f"report{k}.json"
            proc = subprocess.run(
                [sys.executable, "-m", "robin_disk", "verify", "--suite", "all", "--seed", str(SEED), "--out", str(path)],
                capture_output=True, text=True, check=False,
            )
            if proc.returncode not in (0, 1):
                return False, f"verify exited {proc.returncode}: {proc.stderr.strip()}"
            outputs.append(path.read_bytes())
    same = outputs[0] == outputs[1]
    return same, f"two separate processes, {len(outputs[0])} bytes each, identical: {same}"


def run_criterion(number):
    title, func = CRITERIA[number]
    start = time.perf_counter()
    ok, detail = func()
    elapsed = time.perf_counter() - start
    line = f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {title}: {detail} [{elapsed:.1f} s]"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return ok, elapsed


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_acceptance(number):
    ok, elapsed = run_criterion(number)
    assert ok, ACCEPTANCE_LINES[number]
    assert elapsed < 60.0 or number == 7, f"criterion {number} took {elapsed:.1f} s"


if __name__ == "__main__":
    results = [run_criterion(n)[0] for n in sorted(CRITERIA)]
    raise SystemExit(0 if all(results) else 1)
