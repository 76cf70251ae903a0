"""Regenerate the frozen oracle values in this directory.

Everything here is computed with mpmath at 30 digits and shares no code with
the package: roots by sign scan plus Illinois refinement, normalisations by
direct quadrature of r J_l(k r)^2, projections by quadrature of the test
function against J_l.

    python tests/fixtures/make_fixtures.py
"""

import json
from pathlib import Path

import mpmath as mp

mp.mp.dps = 30
HERE = Path(__file__).parent


def robin_char(ell, lam):
    return lambda x: x * mp.besselj(ell, x, derivative=1) - lam * mp.besselj(ell, x)


def roots(f, count, start=mp.mpf("1e-6"), step=mp.mpf("0.05")):
    found = []
    a, fa = start, f(start)
    while len(found) < count:
        b = a + step
        fb = f(b)
        if fa * fb < 0:
            found.append(mp.findroot(f, (a, b), solver="illinois"))
        a, fa = b, fb
    return found


def norm_by_quadrature(ell, k, radius=1):
    integral = mp.quad(lambda r: r * mp.besselj(ell, k * r) ** 2, [0, radius])
    return 1 / mp.sqrt(2 * mp.pi * integral)


def spectrum_table(lam, l_max, n_max, radius=1):
    rows = []
    for ell in range(l_max + 1):
        for n, x in enumerate(roots(robin_char(ell, lam), n_max), start=1):
            k = x / radius
            rows.append({"l": ell, "n": n, "x": float(x), "norm": float(norm_by_quadrature(ell, k, radius))})
    return rows


def completeness(lam, l_max, n_max_list, radius=1):
    """Residual ||f - P f|| for f = (1 + c0 r^2) + r cos(theta) (1 + c1 r^2).

    Only l = 0 and l = +-1 modes overlap f; each overlap is a 1-D quadrature,
    and the residual follows from ||f||^2 - sum |c|^2 at 30 digits.
    """
    c0 = mp.mpf(lam) / ((2 - lam) * radius**2)
    c1 = mp.mpf(lam - 1) / ((3 - lam) * radius**2)
    f0 = lambda r: 1 + c0 * r * r  # noqa: E731
    f1 = lambda r: r * (1 + c1 * r * r)  # noqa: E731
    norm2 = 2 * mp.pi * mp.quad(lambda r: r * f0(r) ** 2, [0, radius]) + mp.pi * mp.quad(
        lambda r: r * f1(r) ** 2, [0, radius]
    )
    out = {}
    for n_max in n_max_list:
        captured = mp.mpf(0)
        for ell, prof, ang in ((0, f0, 2 * mp.pi), (1, f1, mp.pi)):
            for x in roots(robin_char(ell, lam), n_max):
                k = x / radius
                nrm = norm_by_quadrature(ell, k, radius)
                c = nrm * mp.quad(lambda r: r * prof(r) * mp.besselj(ell, k * r), [0, radius])
                # angular overlap: 2 pi for l = 0; pi for each of l = +-1 against cos(theta)
                captured += (ang * c) ** 2 * (1 if ell == 0 else 2)
        out[str(n_max)] = float(mp.sqrt(norm2 - captured))
    return out


def single_mode_field(lam, nodes):
    """phi for a(0,1) = 1 at t = 0, mass 0: 2 (2 w)^{-1/2} N J_0(k r)."""
    x = roots(robin_char(0, lam), 1)[0]
    nrm = norm_by_quadrature(0, x)
    return [float(2 / mp.sqrt(2 * x) * nrm * mp.besselj(0, x * r)) for r, _ in nodes]


def main():
    nodes = [(0.05 + 0.1 * i, 0.6 * i) for i in range(10)]
    data = {
        "robin_R1_lam-1_L4_N4": spectrum_table(-1, 4, 4),
        "robin_R1_lam-10_L2_N3": spectrum_table(-10, 2, 3),
        "neumann_R1_L2_N3": spectrum_table(0, 2, 3),
        "dirichlet_first_root_l0": float(mp.besseljzero(0, 1)),
        "dirichlet_R1_L2_N3": [
            {"l": ell, "n": n, "x": float(mp.besseljzero(ell, n))} for ell in range(3) for n in range(1, 4)
        ],
        "completeness_lam-1_L6": completeness(-1, 6, (4, 8, 12)),
        "single_mode_nodes": nodes,
        "single_mode_phi_lam-1": single_mode_field(-1, nodes),
    }
    (HERE / "oracle.json").write_text(json.dumps(data, indent=1) + "\n")


if __name__ == "__main__":
    main()
