"""Classical mean-field dynamics of the four coherent amplitudes.

Integrates, in the cavity rotating frame and on the normal-mode basis,

    i d(alpha+-)/dt = (+-J_c + g sqrt2 Re(beta+-) - i kappa+-/2) alpha+-
                      + g sqrt2 Re(beta-+) alpha-+ + F(t)/sqrt2
    i d(beta+-)/dt  = (Omega+ - i gamma/2) beta+- + Omega- beta-+
                      + (g/sqrt2)(alpha+^* alpha+- + alpha-^* alpha-+)

with F(t) the summed complex drives on cavity 1.  Fixed-step classic RK4 is
used for deterministic reproducibility; every integrator step is stored so
the quantum propagator can consume the trajectory without interpolation
error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _core
from .errors import DivergenceError
from .system import PulseSpec, SystemParams, drive_sum

SQRT2 = math.sqrt(2.0)


def max_classical_dt(params: SystemParams) -> float:
    """Largest admissible step: 50 points per fastest oscillation period."""
    return (2.0 * math.pi / max(params.J_c, params.Omega_plus)) / 50.0


# The classical system is four ODEs, so integrating well below the bound is
# effectively free and keeps the trajectory error negligible against the
# quantum propagation it feeds.
DEFAULT_DT_DIVISOR = 32


@dataclass
class ClassicalTrajectory:
    """Uniformly sampled complex amplitudes alpha+-(t), beta+-(t)."""

    t: np.ndarray
    alpha_plus: np.ndarray
    alpha_minus: np.ndarray
    beta_plus: np.ndarray
    beta_minus: np.ndarray

    def __post_init__(self):
        n = len(self.t)
        for name in ("alpha_plus", "alpha_minus", "beta_plus", "beta_minus"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} length does not match time grid")
        if n >= 2:
            steps = np.diff(self.t)
            if steps.min() <= 0:
                raise ValueError("time grid must be strictly increasing")
            # rounding of t = t0 + k*dt jitters differences by ~eps * t_end
            if (steps.max() - steps.min()) > 1e-12 * max(1.0, abs(float(self.t[-1]))):
                raise ValueError("time grid must be uniform")

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    def amplitudes_at(self, times) -> np.ndarray:
        """Linear interpolation of the four amplitudes; shape (..., 4)."""
        times = np.asarray(times, dtype=float)
        cols = []
        for arr in (self.alpha_plus, self.alpha_minus, self.beta_plus, self.beta_minus):
            re = np.interp(times, self.t, arr.real)
            im = np.interp(times, self.t, arr.imag)
            cols.append(re + 1j * im)
        return np.stack(cols, axis=-1)

    def occupations(self) -> np.ndarray:
        """Total classical occupation |alpha+|^2 + |alpha-|^2 + |beta+|^2 + |beta-|^2."""
        return (np.abs(self.alpha_plus) ** 2 + np.abs(self.alpha_minus) ** 2
                + np.abs(self.beta_plus) ** 2 + np.abs(self.beta_minus) ** 2)

    def optical_occupations(self) -> np.ndarray:
        return np.abs(self.alpha_plus) ** 2 + np.abs(self.alpha_minus) ** 2

    def to_csv(self, path) -> None:
        header = ("t_ns,re_alpha_plus,im_alpha_plus,re_alpha_minus,im_alpha_minus,"
                  "re_beta_plus,im_beta_plus,re_beta_minus,im_beta_minus")
        data = np.column_stack([
            self.t,
            self.alpha_plus.real, self.alpha_plus.imag,
            self.alpha_minus.real, self.alpha_minus.imag,
            self.beta_plus.real, self.beta_plus.imag,
            self.beta_minus.real, self.beta_minus.imag,
        ])
        np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.17g")


def integrate_classical(
    params: SystemParams,
    pulses: list[PulseSpec],
    t_end: float,
    dt: float | None = None,
    y0: np.ndarray | None = None,
    t_start: float = 0.0,
) -> ClassicalTrajectory:
    """Propagate the classical amplitudes from t_start to (at least) t_end."""
    if t_end <= t_start:
        raise ValueError("t_end must exceed t_start")
    dt_max = max_classical_dt(params)
    if dt is None:
        dt = dt_max / DEFAULT_DT_DIVISOR
    if dt > dt_max * (1.0 + 1e-12):
        raise ValueError(f"dt = {dt:.4g} exceeds resolution bound {dt_max:.4g}")
    nsteps = int(math.ceil((t_end - t_start) / dt - 1e-9))
    t = t_start + dt * np.arange(nsteps + 1)

    if y0 is None:
        y0 = np.zeros(4, dtype=complex)
    y0 = np.asarray(y0, dtype=complex)

    pulse_table = np.array(
        [(p.t0, p.sigma_t, p.amplitude, p.detuning, p.phase) for p in pulses],
        dtype=float,
    ).reshape(-1, 5)
    coeffs = np.array(
        [params.J_c, params.kappa_plus, params.kappa_minus,
         params.Omega_plus, params.Omega_minus, params.gamma, params.g],
        dtype=float,
    )
    traj = _core.backend().classical_rk4(y0, t_start, dt, nsteps, coeffs, pulse_table)

    if not np.all(np.isfinite(traj)):
        bad = np.where(~np.isfinite(traj).all(axis=1))[0][0]
        raise DivergenceError(float(t[bad]))
    return ClassicalTrajectory(
        t=t,
        alpha_plus=traj[:, 0], alpha_minus=traj[:, 1],
        beta_plus=traj[:, 2], beta_minus=traj[:, 3],
    )


def classical_rhs(params: SystemParams, pulses: list[PulseSpec], t: float,
                  y: np.ndarray) -> np.ndarray:
    """Right-hand side of the mean-field equations (reference implementation)."""
    a_p, a_m, b_p, b_m = y
    f = drive_sum(pulses, t)
    g = params.g
    d_ap = -1j * ((params.J_c + g * SQRT2 * b_p.real - 0.5j * params.kappa_plus) * a_p
                  + g * SQRT2 * b_m.real * a_m + f / SQRT2)
    d_am = -1j * ((-params.J_c + g * SQRT2 * b_m.real - 0.5j * params.kappa_minus) * a_m
                  + g * SQRT2 * b_p.real * a_p + f / SQRT2)
    d_bp = -1j * ((params.Omega_plus - 0.5j * params.gamma) * b_p
                  + params.Omega_minus * b_m
                  + (g / SQRT2) * (abs(a_p) ** 2 + abs(a_m) ** 2))
    d_bm = -1j * ((params.Omega_plus - 0.5j * params.gamma) * b_m
                  + params.Omega_minus * b_p
                  + (g / SQRT2) * (np.conj(a_p) * a_m + np.conj(a_m) * a_p))
    return np.array([d_ap, d_am, d_bp, d_bm])


def local_from_normal(plus, minus):
    """(x+, x-) -> (x1, x2) with x1 = (x+ + x-)/sqrt2, x2 = (x+ - x-)/sqrt2."""
    return (plus + minus) / SQRT2, (plus - minus) / SQRT2


def normal_from_local(one, two):
    """Inverse of local_from_normal; the transform is its own inverse."""
    return (one + two) / SQRT2, (one - two) / SQRT2
