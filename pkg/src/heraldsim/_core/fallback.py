"""Pure-numpy implementation of the stepping kernels.

Functionally identical to the compiled extension, several times slower.
Kept importable with no build step so the package works everywhere.
"""
from __future__ import annotations

import numpy as np

from .plan import KernelPlan

BACKEND_NAME = "python"


def classical_rk4(y0, t0, dt, nsteps, coeffs, pulse_table):
    """Fixed-step RK4 for the four classical amplitudes.

    coeffs = [J_c, kappa_plus, kappa_minus, Omega_plus, Omega_minus, gamma, g];
    pulse_table rows = (t0, sigma_t, amplitude, detuning, phase).
    """
    J, kp, km, Op, Om, gam, g = coeffs
    s2 = np.sqrt(2.0)
    pt = np.asarray(pulse_table, dtype=float)

    def drive(t):
        if pt.size == 0:
            return 0.0j
        env = pt[:, 2] * np.exp(-((t - pt[:, 0]) ** 2) / (2.0 * pt[:, 1] ** 2))
        return complex(np.sum(env * np.exp(1j * (pt[:, 4] - pt[:, 3] * t))))

    def rhs(t, y):
        a_p, a_m, b_p, b_m = y
        f = drive(t)
        return np.array([
            -1j * ((J + g * s2 * b_p.real - 0.5j * kp) * a_p + g * s2 * b_m.real * a_m + f / s2),
            -1j * ((-J + g * s2 * b_m.real - 0.5j * km) * a_m + g * s2 * b_p.real * a_p + f / s2),
            -1j * ((Op - 0.5j * gam) * b_p + Om * b_m + (g / s2) * (abs(a_p) ** 2 + abs(a_m) ** 2)),
            -1j * ((Op - 0.5j * gam) * b_m + Om * b_p
                   + (g / s2) * (np.conj(a_p) * a_m + np.conj(a_m) * a_p)),
        ])

    out = np.empty((nsteps + 1, 4), dtype=complex)
    y = np.asarray(y0, dtype=complex).copy()
    out[0] = y
    for i in range(nsteps):
        t = t0 + i * dt
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1)
        k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2)
        k4 = rhs(t + dt, y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = y
    return out


def _assemble(coeff_row, t, plan: KernelPlan):
    """Interaction-picture Hamiltonian at absolute time t."""
    d = plan.dim
    h = np.zeros((d, d), dtype=complex)
    off, mode, col = plan.term_off, plan.term_mode, plan.term_col
    for k in range(plan.n_blocks):
        s = slice(off[k], off[k + 1])
        c = complex(coeff_row[col[k]])
        if mode[k] == 0:
            c = c.real
        elif mode[k] == 2:
            c = np.conjugate(c)
        vals = c * plan.term_v[s] * np.exp(1j * plan.term_theta[s] * t)
        np.add.at(h, (plan.term_i[s], plan.term_j[s]), vals)
    return h


def _rhs(rho, coeff_row, t, plan: KernelPlan, dd):
    h = _assemble(coeff_row, t, plan)
    p = h @ rho
    out = -1j * (p - p.conj().T)
    out -= dd * rho
    off, src, dst, w = plan.jump_off, plan.jump_src, plan.jump_dst, plan.jump_w
    for k in range(len(off) - 1):
        s = slice(off[k], off[k + 1])
        ws = w[s]
        out[np.ix_(dst[s], dst[s])] += np.outer(ws, ws) * rho[np.ix_(src[s], src[s])]
    return out


def lindblad_rk4(rho, coeffs, t0, dt, plan: KernelPlan):
    """Advance the interaction-picture rho in place by (len(coeffs)-1)//2 steps.

    coeffs holds the term coefficients on the half-step grid: row 2*s is the
    start of step s (absolute time t0 + s*dt), row 2*s+1 its midpoint,
    row 2*s+2 its end.
    """
    nsteps = (coeffs.shape[0] - 1) // 2
    dd = 0.5 * (plan.dtot[:, None] + plan.dtot[None, :])
    for s in range(nsteps):
        t = t0 + s * dt
        c0, c1, c2 = coeffs[2 * s], coeffs[2 * s + 1], coeffs[2 * s + 2]
        k1 = _rhs(rho, c0, t, plan, dd)
        k2 = _rhs(rho + (0.5 * dt) * k1, c1, t + 0.5 * dt, plan, dd)
        k3 = _rhs(rho + (0.5 * dt) * k2, c1, t + 0.5 * dt, plan, dd)
        k4 = _rhs(rho + dt * k3, c2, t + dt, plan, dd)
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return rho
