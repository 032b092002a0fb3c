#!/usr/bin/env python3
"""Regenerates tests/fixtures/specfun.csv with mpmath at 50 digits.

Columns: a_re, a_im, b, z_re, z_im, f_re, f_im, which_function.
For gamma rows the argument sits in (a_re, a_im); b and z are unused.
For the B rows (which_function = riccati_b) a = omega, z = (tau, 0) and b
indexes a parameter set in PARAM_SETS below; the value is a 30-digit ODE solve.
"""

import csv
import pathlib
import sys

import mpmath as mp

mp.mp.dps = 50

GAMMA = [
    (3 + 4j),
    (0.5 + 0j),
    (1 + 0j),
    (-2.5 + 0.3j),
    (7.25 - 3.5j),
    (0.1 + 12j),
    (15 + 0j),
    (-0.7 - 0.7j),
]

KUMMER_M = [
    (0.25 + 0.5j, 0.5, -2 + 1j),
    (1.0, 1.0, 1.0),
    (0.3, 0.5, 2.0),
    (-1.7 + 0.4j, 1.5, 3.5 - 2j),
    (2.2 - 1.1j, 0.5, -12 + 5j),
    (0.6 + 3j, 1.5, 8 + 8j),
    (-4.5 + 2j, 0.5, -40 + 10j),
    (1.25 + 0.75j, 1.5, -35 - 20j),
]

KUMMER_U = [
    (0.3, 0.5, 2.0),
    (0.3 + 0.1j, 1.5, -1 + 2j),
    (1.1 - 0.6j, 0.5, 0.7 + 0.2j),
    (-0.4 + 0.9j, 1.5, 3.0 - 1.5j),
    (2.0 + 0.5j, 0.5, -2.5 - 0.5j),
    (0.75, 1.5, 5.0),
]

# kappa1, kappa2, theta1, theta2, eta1, eta2, rho1, rho2
PARAM_SETS = [
    (0.5, 1.0, 0.0, 0.04, 0.0, 0.4, 0.1, -0.3),
    (0.3, 1.2, 0.01, 0.04, 0.1, 0.3, 0.1, -0.5),
]

RICCATI = [
    (0, 2.0, 1.0),
    (0, -7.5, 0.5),
    (0, 25.0, 2.0),
    (1, 1.0, 0.5),
    (1, 10.0, 1.0),
]


def riccati_b(pset, omega, tau):
    k1, k2, t1, t2, e1, e2, r1, r2 = [mp.mpf(x) for x in pset]
    w = mp.mpc(omega)
    alpha = -(w * w + 1j * w) / 2

    def rhs(t, y):
        eta = e1 * t + e2
        beta = (k1 * t + k2) - (r1 * t + r2) * eta * 1j * w
        gamma = eta * eta / 2
        return [alpha - beta * y[0] + gamma * y[0] ** 2]

    with mp.workdps(30):
        sol = mp.odefun(rhs, 0, [mp.mpc(0)], tol=mp.mpf(10) ** -28)
        return complex(sol(mp.mpf(tau))[0])


def main(out_path):
    rows = []
    for z in GAMMA:
        g = mp.gamma(mp.mpc(z))
        rows.append((z.real, z.imag, 0, 0, 0, g.real, g.imag, "gamma"))
    for a, b, z in KUMMER_M:
        a, z = complex(a), complex(z)
        v = mp.hyp1f1(mp.mpc(a), mp.mpf(b), mp.mpc(z))
        rows.append((a.real, a.imag, b, z.real, z.imag, v.real, v.imag, "kummer_m"))
    for a, b, z in KUMMER_U:
        a, z = complex(a), complex(z)
        v = mp.hyperu(mp.mpc(a), mp.mpf(b), mp.mpc(z))
        rows.append((a.real, a.imag, b, z.real, z.imag, v.real, v.imag, "kummer_u"))
    for k, w, tau in RICCATI:
        v = riccati_b(PARAM_SETS[k], w, tau)
        rows.append((w, 0, k, tau, 0, v.real, v.imag, "riccati_b"))

    with open(out_path, "w", newline="") as f:
        out = csv.writer(f, lineterminator="\n")
        out.writerow(["a_re", "a_im", "b", "z_re", "z_im", "f_re", "f_im", "which_function"])
        for r in rows:
            out.writerow([mp.nstr(x, 17) if not isinstance(x, str) else x for x in r])


if __name__ == "__main__":
    default = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "specfun.csv"
    main(sys.argv[1] if len(sys.argv) > 1 else default)
