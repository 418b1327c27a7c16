"""Entanglement measures and protocol figures of merit."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fockspace import DensityMatrix, partial_transpose

QUBIT_DIM = 4
POSITIVITY_TOL = 1e-8

_SY = np.array([[0.0, -1.0j], [1.0j, 0.0]])
_YY = np.kron(_SY, _SY)


def _check_qubit_state(rho: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (QUBIT_DIM, QUBIT_DIM):
        raise ValueError(f"expected a 4x4 matrix, got {rho.shape}")
    if np.abs(rho - rho.conj().T).max() > tol:
        raise ValueError("two-qubit state is not Hermitian")
    if abs(rho.trace() - 1.0) > tol:
        raise ValueError("two-qubit state is not normalized")
    lo = float(np.linalg.eigvalsh(rho).min())
    if lo < -max(POSITIVITY_TOL, tol):
        raise ValueError(f"two-qubit state has negative eigenvalue {lo:.3e}")
    return rho


def concurrence(rho: np.ndarray) -> float:
    """Wootters concurrence of a two-qubit density matrix.

    max(0, l1 - l2 - l3 - l4) with l_i the decreasing square roots of the
    eigenvalues of rho (sy x sy) rho* (sy x sy), evaluated in the
    numerically stable Hermitian form sqrt(rho) R sqrt(rho).
    """
    rho = _check_qubit_state(rho)
    w, v = np.linalg.eigh(rho)
    sqrt_rho = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    r = sqrt_rho @ _YY @ rho.conj() @ _YY @ sqrt_rho
    ev = np.linalg.eigvalsh(r)
    # the triple product carries ~eps absolute noise; below that the square
    # roots would amplify pure rounding into a fake sqrt(eps) concurrence
    ev[ev < 1e-14] = 0.0
    lam = np.sqrt(ev)[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def negativity(rho_mech: DensityMatrix, subsystem: str | None = None) -> float:
    """Trace norm of the partial transpose minus one; zero for PPT states.

    Operates on the full two-mode mechanical state (any cutoffs), not only
    the qubit restriction.
    """
    if len(rho_mech.layout.modes) != 2:
        raise ValueError("negativity expects a two-mode state")
    rho_mech.check(hermiticity=1e-8, trace=1e-6, min_eig=-1e-6)
    if subsystem is None:
        subsystem = rho_mech.layout.labels[1]
    pt = partial_transpose(rho_mech, subsystem)
    ev = np.linalg.eigvalsh(pt)
    return float(max(0.0, np.abs(ev).sum() - 1.0))


def bell_fidelity(rho: np.ndarray, phi: float | None = None) -> float:
    """Overlap <psi|rho|psi> with |psi> = (|10> + e^{i phi} |01>)/sqrt2.

    With phi unspecified, returns the maximum over phi, which has the closed
    form (rho_{10,10} + rho_{01,01})/2 + |rho_{10,01}|.
    """
    rho = _check_qubit_state(rho)
    if phi is None:
        return float((rho[2, 2].real + rho[1, 1].real) / 2.0 + abs(rho[2, 1]))
    val = ((rho[2, 2] + rho[1, 1]) / 2.0
           + np.real(np.exp(1j * phi) * rho[2, 1]))
    return float(val.real)


def bell_fidelity_max(rho: np.ndarray) -> tuple[float, float]:
    """Maximum Bell fidelity and the phase that attains it."""
    rho = _check_qubit_state(rho)
    phi = float(-np.angle(rho[2, 1])) if abs(rho[2, 1]) > 0 else 0.0
    return bell_fidelity(rho, phi), phi


def heralding_rate(kappa: float, n_single: float) -> float:
    """Detection rate kappa * n in MHz (internal rates are 1/ns = 1000 MHz)."""
    if kappa < 0 or n_single < 0:
        raise ValueError("inputs must be >= 0")
    return kappa * n_single * 1e3


@dataclass
class FringePattern:
    """Readout intensity versus write-read delay."""

    delays: np.ndarray              # ns
    intensity: np.ndarray           # normalized to max = 1
    raw_intensity: np.ndarray       # cavity-1 intensity as simulated
    readout_offset: float           # sampling time after the readout center (ns)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.delays = np.asarray(self.delays, dtype=float)
        self.raw_intensity = np.asarray(self.raw_intensity, dtype=float)
        self.intensity = np.asarray(self.intensity, dtype=float)
        if len(self.delays) != len(self.intensity):
            raise ValueError("delay and intensity lengths differ")
        if np.any(self.raw_intensity < 0):
            raise ValueError("intensities must be >= 0")

    @classmethod
    def from_raw(cls, delays, raw, readout_offset, **meta):
        raw = np.asarray(raw, dtype=float)
        top = raw.max() if raw.size and raw.max() > 0 else 1.0
        return cls(np.asarray(delays, float), raw / top, raw, readout_offset,
                   metadata=dict(meta))


@dataclass
class VisibilityResult:
    visibility: float               # |c1| / c0 from the cosine fit
    visibility_raw: float           # (max - min) / (max + min)
    period: float                   # fitted fringe period (ns)
    phase: float                    # fitted phase at zero delay (rad)
    offset: float                   # fitted mean intensity c0
    amplitude: float                # fitted |c1|
    fit_ok: bool
    residual: float

    def as_dict(self) -> dict:
        return {
            "visibility": self.visibility,
            "visibility_raw": self.visibility_raw,
            "period_ns": self.period,
            "phase_rad": self.phase,
            "offset": self.offset,
            "amplitude": self.amplitude,
            "fit_ok": self.fit_ok,
            "residual": self.residual,
        }


def _cosine_lsq(delays: np.ndarray, intensity: np.ndarray, omega: float):
    """Linear least squares of I = c0 + a cos(w d) + b sin(w d) at fixed w."""
    basis = np.column_stack([
        np.ones_like(delays), np.cos(omega * delays), np.sin(omega * delays)
    ])
    sol, *_ = np.linalg.lstsq(basis, intensity, rcond=None)
    resid = float(np.linalg.norm(basis @ sol - intensity))
    return sol, resid


def visibility(pattern: FringePattern, delta_omega_seed: float) -> VisibilityResult:
    """Fit I(d) = c0 + c1 cos(w d + phi) and report V = |c1| / c0.

    The beat frequency is seeded from the mechanical nondegeneracy and
    refined by a bounded scan around the seed (least squares is linear in
    the remaining parameters).  Falls back to the raw (max-min)/(max+min)
    estimator with fit_ok=False when the fit is degenerate.
    """
    delays = pattern.delays
    inten = pattern.intensity
    if len(delays) < 8:
        raise ValueError("need at least 8 fringe points")
    span = float(delays.max() - delays.min())
    v_raw = float((inten.max() - inten.min()) / (inten.max() + inten.min())) \
        if (inten.max() + inten.min()) > 0 else 0.0
    seed = abs(delta_omega_seed)
    if seed <= 0 or span <= 0 or span * seed < 2.0 * math.pi * 0.5:
        # under half a period covered: fit is ill-posed
        return VisibilityResult(v_raw, v_raw, math.inf, 0.0, float(inten.mean()),
                                0.0, False, math.inf)
    if len(delays) < 8 * span / (2.0 * math.pi / seed):
        raise ValueError("fewer than 8 points per expected fringe period")

    best = None
    for omega in seed * np.linspace(0.8, 1.2, 81):
        sol, resid = _cosine_lsq(delays, inten, omega)
        if best is None or resid < best[2]:
            best = (omega, sol, resid)
    omega, sol, resid = best
    # parabolic refinement on the residual around the best scan point
    step = seed * (0.4 / 80.0)
    r_m = _cosine_lsq(delays, inten, omega - step)[1]
    r_p = _cosine_lsq(delays, inten, omega + step)[1]
    denom = r_m - 2.0 * resid + r_p
    if denom > 0:
        omega = omega + 0.5 * step * (r_m - r_p) / denom
        sol, resid = _cosine_lsq(delays, inten, omega)
    c0, a, b = sol
    amp = math.hypot(a, b)
    phase = math.atan2(-b, a)
    if c0 <= 0 or not np.isfinite(resid):
        return VisibilityResult(v_raw, v_raw, math.inf, 0.0, float(inten.mean()),
                                0.0, False, float(resid))
    vis = float(min(amp / c0, 1.0))
    return VisibilityResult(vis, v_raw, 2.0 * math.pi / omega, phase,
                            float(c0), float(amp), True, float(resid))
