"""Dispersion coefficients on the red Turing line.

Scans C(k) for the red (infection-free) state with lam = nu = f = 1,
D_S = 10, D_I = 1 and mu on the line, then reports where the minimum of
C sits, its value and the root pair at k = 0. Also checks the Hopf
condition on the red state for a second parameter set.

    python scripts/turing_check.py
"""

import numpy as np

from epikit.spatial import SpatialParams
from epikit.stability import c_coeff, dispersion, hopf_check, steady_states, turing_analysis


def main():
    p = SpatialParams(1.0, 1.1, 1.0, 1.0, 0.0, 10.0, 1.0)
    red, blue = steady_states(p)
    ks = np.linspace(0.0, 0.2, 10_001)
    ck = np.asarray(c_coeff(p, red, ks))
    k_guess = p.nu / (2 * p.d_s)
    res = turing_analysis(p, red)
    print(f"red state (phi_I, phi_S) = ({red.phi_i:g}, {red.phi_s:g})")
    print(f"line residual             = {res.line_residual:.3e}")
    print(f"C at k = nu/(2 D_S) = {k_guess:g}: {float(c_coeff(p, red, k_guess)):.6f}")
    print(f"min C on [0, 0.2]         = {ck.min():.6f} at k = {ks[ck.argmin()]:.4f}")
    print(f"vertex of C in k^2        = {res.vertex_k2:.4f} (negative: minimum at k = 0)")
    d0 = dispersion(p, red, 0.0)
    print(f"roots at k = 0            = {d0.omega_plus:.4f}, {d0.omega_minus:.4f}")
    print(f"blue state feasible       = {blue.feasible} (phi_I = {blue.phi_i:g})")

    q = SpatialParams(0.26, 0.25, 0.01, 0.01)
    h = hopf_check(q, steady_states(q)[0])
    print(f"Hopf check (lam = 0.26): B0 = {h.b0:.2e}, C0 = {h.c0:.6e}, roots = {h.omega0}")


if __name__ == "__main__":
    main()
