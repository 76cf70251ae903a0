"""Exact matrix checks of the quantum operator algebra on small Fock spaces.

States are occupation tuples grouped by total quanta 0..cap. Every
number-conserving bilinear is block diagonal on that grading, so the
commutator identities hold exactly. Bare ladder operators leave the top
sector; [a, a^dag] = 1 is therefore checked on sectors below the cap.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .spectrum import RobinSpectrum

ALGEBRA_TOL = 1e-12
CONJUGATION_TOL = 1e-10


@dataclass(frozen=True)
class FockMode:
    ell: int
    n: int
    omega: float

    @property
    def key(self) -> tuple[int, int]:
        return (self.ell, self.n)


def fock_modes(spectrum: RobinSpectrum, keys) -> tuple[FockMode, ...]:
    return tuple(FockMode(ell, n, spectrum[(ell, n)].omega) for ell, n in keys)


@dataclass(frozen=True, eq=False)
class SectorSpace:
    modes: tuple[FockMode, ...]
    total_quanta_max: int
    states: tuple[tuple[int, ...], ...]
    sectors: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    def position(self, key: tuple[int, int]) -> int:
        for i, mode in enumerate(self.modes):
            if mode.key == key:
                return i
        raise KeyError(f"mode {key} not in this space")

    def has(self, key: tuple[int, int]) -> bool:
        return any(m.key == key for m in self.modes)

    def guard(self) -> np.ndarray:
        """Boolean mask of basis states strictly below the quanta cap."""
        return self.sectors < self.total_quanta_max

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v


def build_sector_space(modes, total_quanta_max: int) -> SectorSpace:
    """All occupation tuples with total quanta 0..max, grouped by total."""
    modes = tuple(modes)
    if not 1 <= len(modes) <= 6:
        raise ValueError("sector spaces support 1 to 6 modes")
    if len({m.key for m in modes}) != len(modes):
        raise ValueError("duplicate modes")
    if total_quanta_max < 0:
        raise ValueError("total_quanta_max must be nonnegative")
    states = []
    for total in range(total_quanta_max + 1):
        group = [occ for occ in itertools.product(range(total + 1), repeat=len(modes)) if sum(occ) == total]
        states.extend(sorted(group, reverse=True))
    sectors = np.array([sum(s) for s in states])
    return SectorSpace(modes, total_quanta_max, tuple(states), sectors)


@dataclass(frozen=True, eq=False)
class FockOperator:
    label: str
    matrix: np.ndarray

    def __matmul__(self, other: "FockOperator") -> np.ndarray:
        return self.matrix @ other.matrix

    @property
    def H(self) -> np.ndarray:
        return self.matrix.conj().T


def ladder(space: SectorSpace, key: tuple[int, int]) -> tuple[FockOperator, FockOperator]:
    """Annihilator and creator for one mode.

    Creation out of the top sector is dropped, so a a^dag is exact only on
    states below the cap.
    """
    i = space.position(key)
    index = {s: k for k, s in enumerate(space.states)}
    a = np.zeros((space.dim, space.dim), dtype=complex)
    for col, occ in enumerate(space.states):
        if occ[i] == 0:
            continue
        lowered = occ[:i] + (occ[i] - 1,) + occ[i + 1:]
        a[index[lowered], col] = math.sqrt(occ[i])
    return FockOperator(f"a{key}", a), FockOperator(f"a+{key}", a.conj().T)


def comm(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y - y @ x


def max_norm(x: np.ndarray) -> float:
    return float(np.max(np.abs(x), initial=0.0))


class Generators:
    """Normal-ordered bilinears over a sector space.

    ``omega_override`` replaces mode frequencies in H; used to demonstrate
    that [H, Q] = 0 needs w(-l) = w(l).
    """

    def __init__(self, space: SectorSpace, omega_override: dict | None = None):
        self.space = space
        self.a = {}
        self.ad = {}
        for mode in space.modes:
            lo, hi = ladder(space, mode.key)
            self.a[mode.key] = lo.matrix
            self.ad[mode.key] = hi.matrix
        omegas = {m.key: m.omega for m in space.modes}
        omegas.update(omega_override or {})
        self.omega = omegas
        self.N = {k: self.ad[k] @ self.a[k] for k in self.a}
        self.Q = {
            (ell, n): self.ad[(ell, n)] @ self.a[(-ell, n)]
            for (ell, n) in self.a if (-ell, n) in self.a
        }
        dim = space.dim
        self.H = sum((omegas[k] * self.N[k] for k in self.N), np.zeros((dim, dim), dtype=complex))
        self.L = sum((k[0] * self.N[k] for k in self.N), np.zeros((dim, dim), dtype=complex))

    def doublets(self) -> list[tuple[int, int]]:
        """(l0, n0) with l0 > 0 whose +-l0 partners are both present."""
        return sorted(k for k in self.Q if k[0] > 0)

    def su2(self, ell0: int, n0: int) -> dict[str, np.ndarray]:
        p, m = (ell0, n0), (-ell0, n0)
        tp, tm = self.Q[p], self.Q[m]
        return {
            "T0": 0.5 * (self.N[p] + self.N[m]),
            "T3": 0.5 * (self.N[p] - self.N[m]),
            "T+": tp,
            "T-": tm,
            "T1": 0.5 * (tp + tm),
            "T2": -0.5j * (tp - tm),
        }

    def counterexample(self, mode1, mode2, t: float) -> dict[str, np.ndarray]:
        """Q+(t), Q-(t) and their explicit time derivatives for a mode pair."""
        w1, w2 = self.omega[mode1], self.omega[mode2]
        delta = w2 - w1
        q = np.exp(1j * delta * t) * self.ad[mode1] @ self.a[mode2]
        qd = q.conj().T
        dq = 1j * delta * q
        dqd = dq.conj().T
        return {
            "Q+": 0.5 * (q + qd),
            "Q-": -0.5j * (q - qd),
            "dQ+": 0.5 * (dq + dqd),
            "dQ-": -0.5j * (dq - dqd),
        }

    def labeled(self) -> list[FockOperator]:
        ops = [FockOperator(f"N{k}", v) for k, v in sorted(self.N.items())]
        ops += [FockOperator(f"Q{k}", v) for k, v in sorted(self.Q.items())]
        for ell0, n0 in self.doublets():
            ops += [FockOperator(f"{name}({ell0},{n0})", v) for name, v in self.su2(ell0, n0).items()]
        ops += [FockOperator("H", self.H), FockOperator("L", self.L)]
        return ops


def build_generators(space: SectorSpace, omega_override: dict | None = None) -> Generators:
    return Generators(space, omega_override)


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


def _blocks(space: SectorSpace) -> list[np.ndarray]:
    return [np.flatnonzero(space.sectors == s) for s in range(space.total_quanta_max + 1)]


def off_block_norm(space: SectorSpace, op: np.ndarray) -> float:
    mask = space.sectors[:, None] != space.sectors[None, :]
    return max_norm(np.where(mask, op, 0.0))


def algebra_report(space: SectorSpace, omega_override: dict | None = None,
                   tol: float = ALGEBRA_TOL) -> list[Check]:
    """Every commutator identity of the bilinear algebra on ``space``."""
    gen = build_generators(space, omega_override)
    keys = [m.key for m in space.modes]
    checks: list[Check] = []

    def add(name, residual):
        checks.append(Check(name, float(residual), tol))

    guard = space.guard()
    eye = np.eye(space.dim)
    for k1 in keys:
        for k2 in keys:
            c = comm(gen.a[k1], gen.ad[k2]) - (k1 == k2) * eye
            add(f"[a{k1},a+{k2}]=delta (guarded)", max_norm(c[np.ix_(guard, guard)]))
            add(f"[a{k1},a{k2}]=0", max_norm(comm(gen.a[k1], gen.a[k2])))

    for k1 in keys:
        for k2 in keys:
            add(f"[N{k1},N{k2}]=0", max_norm(comm(gen.N[k1], gen.N[k2])))
        for k2, q in gen.Q.items():
            # [N_m1, Q_m2] = delta(m1, m2) Q_m2 - delta(m1, -m2) Q_{-m1}
            expect = (k1 == k2) * q
            if k1 == (-k2[0], k2[1]):
                expect = expect - gen.Q[(-k1[0], k1[1])]
            add(f"[N{k1},Q{k2}]", max_norm(comm(gen.N[k1], q) - expect))

    for k1, q1 in gen.Q.items():
        for k2, q2 in gen.Q.items():
            expect = np.zeros_like(q1)
            if k1 == (-k2[0], k2[1]):
                expect = gen.N[k1] - gen.N[k2]
            add(f"[Q{k1},Q{k2}]", max_norm(comm(q1, q2) - expect))

    for k, nk in gen.N.items():
        add(f"[H,N{k}]=0", max_norm(comm(gen.H, nk)))
        add(f"[L,N{k}]=0", max_norm(comm(gen.L, nk)))
    for k, q in gen.Q.items():
        add(f"[H,Q{k}]=0", max_norm(comm(gen.H, q)))
        add(f"[L,Q{k}]=2lQ", max_norm(comm(gen.L, q) - 2 * k[0] * q))
        add(f"Q{k}^dag=Q{(-k[0], k[1])}", max_norm(q.conj().T - gen.Q[(-k[0], k[1])]))
        if k[0] == 0:
            add(f"Q{k}=N{k}", max_norm(q - gen.N[k]))

    # mixed generator-ladder relations
    for k1 in keys:
        for k2 in keys:
            add(f"[N{k1},a{k2}]", max_norm(comm(gen.N[k1], gen.a[k2]) + (k1 == k2) * gen.a[k2]))
            add(f"[N{k1},a+{k2}]", max_norm(comm(gen.N[k1], gen.ad[k2]) - (k1 == k2) * gen.ad[k2]))
        for kq, q in gen.Q.items():
            neg = (-kq[0], kq[1])
            exp_a = -gen.a[neg] if k1 == kq else 0.0
            exp_ad = gen.ad[kq] if k1 == neg else 0.0
            add(f"[Q{kq},a{k1}]", max_norm(comm(q, gen.a[k1]) - exp_a))
            add(f"[Q{kq},a+{k1}]", max_norm(comm(q, gen.ad[k1]) - exp_ad))

    eps = {(1, 2): 3, (2, 3): 1, (3, 1): 2}
    for ell0, n0 in gen.doublets():
        t = gen.su2(ell0, n0)
        tag = f"({ell0},{n0})"
        add(f"[T3,T+]=T+ {tag}", max_norm(comm(t["T3"], t["T+"]) - t["T+"]))
        add(f"[T3,T-]=-T- {tag}", max_norm(comm(t["T3"], t["T-"]) + t["T-"]))
        add(f"[T+,T-]=2T3 {tag}", max_norm(comm(t["T+"], t["T-"]) - 2 * t["T3"]))
        for (i, j), k in eps.items():
            add(f"[T{i},T{j}]=iT{k} {tag}", max_norm(comm(t[f"T{i}"], t[f"T{j}"]) - 1j * t[f"T{k}"]))
        for i in (1, 2, 3):
            add(f"[T0,T{i}]=0 {tag}", max_norm(comm(t["T0"], t[f"T{i}"])))
        p, m = (ell0, n0), (-ell0, n0)
        w, wm = gen.omega[p], gen.omega[m]
        rest = [k for k in keys if k not in (p, m)]
        h_split = 2 * w * t["T0"] + sum((gen.omega[k] * gen.N[k] for k in rest), np.zeros_like(gen.H))
        l_split = 2 * ell0 * t["T3"] + sum((k[0] * gen.N[k] for k in rest), np.zeros_like(gen.L))
        if w == wm:
            add(f"H split via T0 {tag}", max_norm(gen.H - h_split))
        add(f"L split via T3 {tag}", max_norm(gen.L - l_split))
        a, ad = gen.a, gen.ad
        add(f"[T1,a(+-l)]=-a(-+l)/2 {tag}", max(
            max_norm(comm(t["T1"], a[p]) + 0.5 * a[m]),
            max_norm(comm(t["T1"], a[m]) + 0.5 * a[p]),
        ))
        add(f"[T1,a+(+-l)]=a+(-+l)/2 {tag}", max(
            max_norm(comm(t["T1"], ad[p]) - 0.5 * ad[m]),
            max_norm(comm(t["T1"], ad[m]) - 0.5 * ad[p]),
        ))
        add(f"[T2,a(+-l)]=+-i a(-+l)/2 {tag}", max(
            max_norm(comm(t["T2"], a[p]) - 0.5j * a[m]),
            max_norm(comm(t["T2"], a[m]) + 0.5j * a[p]),
        ))
        add(f"[T2,a+(+-l)]=+-i a+(-+l)/2 {tag}", max(
            max_norm(comm(t["T2"], ad[p]) - 0.5j * ad[m]),
            max_norm(comm(t["T2"], ad[m]) + 0.5j * ad[p]),
        ))

    vac = space.vacuum()
    add("<0|H|0>=0", abs(vac.conj() @ gen.H @ vac))
    add("<0|L|0>=0", abs(vac.conj() @ gen.L @ vac))
    for op in gen.labeled():
        add(f"{op.label} block diagonal", off_block_norm(space, op.matrix))
        if op.label.startswith(("N", "T0", "T1", "T2", "T3", "H", "L")):
            add(f"{op.label} hermitian", max_norm(op.matrix - op.H))
    return checks


def sector_expm(space: SectorSpace, generator: np.ndarray, alpha: float) -> np.ndarray:
    """exp(i alpha G) assembled from its total-quanta blocks.

    G must be block diagonal; off-block entries are required to be exactly
    zero so the vacuum block stays the 1x1 identity.
    """
    if off_block_norm(space, generator) != 0.0:
        raise ValueError("generator mixes total-quanta sectors")
    u = np.zeros((space.dim, space.dim), dtype=complex)
    for idx in _blocks(space):
        u[np.ix_(idx, idx)] = linalg.expm(1j * alpha * generator[np.ix_(idx, idx)])
    return u


def _closed_form(gen: Generators, kind: str, alpha: float, modes, t: float) -> dict:
    """Expected images of a and a^dag under U a U^dag for each generator kind."""
    c, s = math.cos(alpha / 2), math.sin(alpha / 2)
    a, ad = gen.a, gen.ad
    if kind == "N":
        (k,) = modes
        ph = np.exp(-1j * alpha)
        return {("a", k): ph * a[k], ("ad", k): np.conj(ph) * ad[k]}
    if kind in ("T1", "T2", "T3"):
        p, m = modes
        if kind == "T1":
            return {("a", p): c * a[p] - 1j * s * a[m], ("a", m): c * a[m] - 1j * s * a[p],
                    ("ad", p): c * ad[p] + 1j * s * ad[m], ("ad", m): c * ad[m] + 1j * s * ad[p]}
        if kind == "T2":
            return {("a", p): c * a[p] - s * a[m], ("a", m): c * a[m] + s * a[p],
                    ("ad", p): c * ad[p] - s * ad[m], ("ad", m): c * ad[m] + s * ad[p]}
        em, ep = np.exp(-0.5j * alpha), np.exp(0.5j * alpha)
        return {("a", p): em * a[p], ("a", m): ep * a[m], ("ad", p): ep * ad[p], ("ad", m): em * ad[m]}
    k1, k2 = modes
    ph = np.exp(1j * (gen.omega[k2] - gen.omega[k1]) * t)
    if kind == "Q+":
        return {("a", k1): c * a[k1] - 1j * s * ph * a[k2], ("a", k2): c * a[k2] - 1j * s / ph * a[k1],
                ("ad", k1): c * ad[k1] + 1j * s / ph * ad[k2], ("ad", k2): c * ad[k2] + 1j * s * ph * ad[k1]}
    if kind == "Q-":
        return {("a", k1): c * a[k1] - s * ph * a[k2], ("a", k2): c * a[k2] + s / ph * a[k1],
                ("ad", k1): c * ad[k1] - s / ph * ad[k2], ("ad", k2): c * ad[k2] + s * ph * ad[k1]}
    raise ValueError(f"unknown generator {kind!r}")


def generator_matrix(gen: Generators, kind: str, modes, t: float = 0.0) -> np.ndarray:
    if kind == "N":
        return gen.N[modes[0]]
    if kind in ("T0", "T1", "T2", "T3"):
        ell0, n0 = modes[0]
        return gen.su2(ell0, n0)[kind]
    if kind in ("Q+", "Q-"):
        return gen.counterexample(modes[0], modes[1], t)[kind]
    raise ValueError(f"unknown generator {kind!r}")


def conjugation_report(space: SectorSpace, kind: str, alpha: float, modes, t: float = 0.0) -> float:
    """Max deviation of exp(i alpha G) x exp(-i alpha G) from the closed-form mixing.

    ``modes``: one key for N, the (+l0, -l0) pair for T1/T2/T3, the mode pair
    for Q+/Q-. x runs over the annihilators and creators involved; the
    comparison is made on the guarded sectors, where x is exact.
    """
    gen = build_generators(space)
    g = generator_matrix(gen, kind, modes, t)
    u = sector_expm(space, g, alpha)
    guard = space.guard()
    worst = 0.0
    for (which, key), expect in _closed_form(gen, kind, alpha, modes, t).items():
        x = gen.a[key] if which == "a" else gen.ad[key]
        got = u @ x @ u.conj().T
        # a and a^dag are exact between guarded states
        diff = (got - expect)[np.ix_(guard, guard)]
        worst = max(worst, max_norm(diff))
    return worst


def unitarity_defect(space: SectorSpace, kind: str, alpha: float, modes, t: float = 0.0) -> float:
    gen = build_generators(space)
    u = sector_expm(space, generator_matrix(gen, kind, modes, t), alpha)
    return max_norm(u @ u.conj().T - np.eye(space.dim))


def vacuum_invariance(space: SectorSpace, kind: str, alpha: float, modes) -> float:
    """|| exp(i alpha G)|0> - |0> ||, exactly zero for number-conserving G."""
    gen = build_generators(space)
    u = sector_expm(space, generator_matrix(gen, kind, modes), alpha)
    vac = space.vacuum()
    return float(np.max(np.abs(u @ vac - vac)))


def heisenberg_conservation(space: SectorSpace, mode1, mode2, t: float,
                            omega1: float | None = None, omega2: float | None = None) -> float:
    """Max norm of i dQ/dt + [Q, H] for Q = Q+(t) and Q-(t)."""
    override = {}
    if omega1 is not None:
        override[mode1] = omega1
    if omega2 is not None:
        override[mode2] = omega2
    gen = build_generators(space, override)
    ops = gen.counterexample(mode1, mode2, t)
    return max(
        max_norm(1j * ops["dQ+"] + comm(ops["Q+"], gen.H)),
        max_norm(1j * ops["dQ-"] + comm(ops["Q-"], gen.H)),
    )
