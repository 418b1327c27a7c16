"""Device parameters, drive pulses and the displaced-frame Hamiltonian.

Unit convention
---------------
Times are in nanoseconds.  Rates and frequencies are stored as the numeric
coefficient X of the literature's "2 pi x X GHz" quotes, in units of 1/ns,
and enter the dynamics directly as exponential rates (a linewidth kappa
means the intensity decays as exp(-kappa t)).  Thermal occupations are
computed from the corresponding quantum energy h nu.  This is the convention
under which the protocol's published operating point (pulse amplitudes in
units of kappa_minus, fringe period, heralding rates) is self-consistent.

The fluctuation Hamiltonian is built in the frame rotating at the cavity
frequency, on the normal-mode basis (a+, a-, b+, b-), after the classical
coherent amplitudes have been displaced away.  No further rotating-wave
approximation is applied: sideband selection emerges numerically.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .fockspace import CANONICAL_LABELS, FockOperator, ModeLayout, destroy, embed

# h / k_B in ns * K: converts a frequency in 1/ns (= GHz) to a temperature scale.
H_OVER_KB_NS_K = 6.62607015e-34 / 1.380649e-23 * 1e9

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class SystemParams:
    """Physical constants of the device and its baths (1/ns and kelvin)."""

    J_c: float = 8.45            # optical inter-cavity coupling (2pi x 8.45 GHz)
    kappa_plus: float = 0.486    # symmetric optical linewidth (2pi x 486 MHz)
    kappa_minus: float = 0.338   # antisymmetric optical linewidth (2pi x 338 MHz)
    Omega_1: float = 5.08        # mechanical frequency, cavity 1 (2pi x 5.08 GHz)
    Omega_2: float = 5.13        # mechanical frequency, cavity 2 (2pi x 5.13 GHz)
    g: float = 8.6e-4            # single-photon optomechanical coupling (2pi x 0.86 MHz)
    gamma: float = 3.75e-6       # mechanical linewidth, both normal modes (2pi x 3.75 kHz)
    temperature: float = 0.0     # bath temperature (K)
    J_m: float = 4.4e-6          # waveguide mechanical splitting (2pi x 4.4 kHz)
    include_mechanical_splitting: bool = False

    def __post_init__(self):
        for name in ("J_c", "kappa_plus", "kappa_minus", "Omega_1", "Omega_2", "g", "gamma"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if max(self.kappa_plus, self.kappa_minus) > 0.1 * self.Omega_plus:
            warnings.warn(
                "sideband resolution degraded: kappa is not << Omega", stacklevel=2
            )

    @property
    def Omega_plus(self) -> float:
        return 0.5 * (self.Omega_1 + self.Omega_2)

    @property
    def Omega_minus(self) -> float:
        return 0.5 * (self.Omega_1 - self.Omega_2)

    @property
    def delta_Omega(self) -> float:
        """Mechanical nondegeneracy Omega_2 - Omega_1; sets the fringe period."""
        return self.Omega_2 - self.Omega_1

    @property
    def n_th(self) -> float:
        """Mean thermal phonon occupation of the mechanical baths."""
        return thermal_occupation(self.Omega_plus, self.temperature)

    @property
    def kappa_local(self) -> float:
        """Linewidth of either local cavity mode, (kappa+ + kappa-)/2."""
        return 0.5 * (self.kappa_plus + self.kappa_minus)

    def with_temperature(self, temperature: float) -> "SystemParams":
        return replace(self, temperature=temperature)


def default_params() -> SystemParams:
    """Operating point of the coupled-nanobeam device."""
    return SystemParams()


def thermal_occupation(omega: float, temperature: float) -> float:
    """Bose-Einstein occupation of a mode at `omega` (1/ns) and T (kelvin)."""
    if omega <= 0:
        raise ValueError("omega must be > 0")
    if temperature < 0:
        raise ValueError("temperature must be >= 0")
    if temperature == 0.0:
        return 0.0
    x = H_OVER_KB_NS_K * omega / temperature
    if x > 700.0:
        return 0.0
    return 1.0 / math.expm1(x)


@dataclass(frozen=True)
class PulseSpec:
    """Gaussian drive pulse on cavity 1.

    `amplitude` is the absolute drive strength in 1/ns; `detuning` is the
    carrier frequency minus the cavity reference omega_c.
    """

    t0: float              # envelope center (ns)
    sigma_t: float         # envelope standard deviation (ns)
    amplitude: float       # peak drive amplitude (1/ns)
    detuning: float        # omega_L - omega_c (1/ns)
    phase: float = 0.0     # constant phase offset phi_0 (rad)

    def __post_init__(self):
        if self.sigma_t <= 0:
            raise ValueError("sigma_t must be > 0")
        if self.amplitude < 0:
            raise ValueError("amplitude must be >= 0")

    def envelope(self, t) -> np.ndarray:
        dt = np.asarray(t, dtype=float) - self.t0
        return self.amplitude * np.exp(-(dt**2) / (2.0 * self.sigma_t**2))

    def shifted(self, t0: float) -> "PulseSpec":
        return replace(self, t0=t0)


def pulse_value(pulse: PulseSpec, t):
    """Complex drive amplitude F(t) in the cavity rotating frame."""
    t = np.asarray(t, dtype=float)
    carrier = np.exp(1j * (pulse.phase - pulse.detuning * t))
    out = pulse.envelope(t) * carrier
    return complex(out) if out.ndim == 0 else out


def drive_sum(pulses, t):
    """Total complex drive from a pulse list at time(s) t."""
    t = np.asarray(t, dtype=float)
    total = np.zeros(t.shape, dtype=complex)
    for p in pulses:
        total += pulse_value(p, t)
    return complex(total) if total.ndim == 0 else total


@dataclass(frozen=True)
class FrameConvention:
    """Bookkeeping of the reference frame and the terms dropped in it.

    A single instance is threaded through classical and quantum propagation
    so both sides share the same truncation of the model.
    """

    rotating_at: str = "omega_c"
    retain_cubic_terms: bool = True
    dropped_terms: tuple[str, ...] = (
        "optical counter-rotating drive at omega_L + omega_c",
        "classical c-number energy shifts",
        "terms linear in one fluctuation operator (cancelled by the mean field)",
    )


DEFAULT_CONVENTION = FrameConvention()


class HamiltonianTerms:
    """Constituent operators of the displaced-frame Hamiltonian on a layout.

    H_d(t) = H_const
             + g*sqrt(2)*Re(beta+) * A1 + g*sqrt(2)*Re(beta-) * A2
             + (g/sqrt(2)) * sum_j [ c_j(t) X_j + c_j(t)* X_j^dag ]

    with c = (alpha+, alpha-, alpha-, alpha+) for X1..X4,
    X1 = a+^dag (b+^dag + b+),  X2 = a-^dag (b+^dag + b+),
    X3 = a+^dag (b-^dag + b-),  X4 = a-^dag (b-^dag + b-).

    H_const carries the free evolution (the +-J_c optical detunings, the
    Omega_+ mechanical energies and the Omega_- mode mixing) and, when
    retained, the classical-amplitude-independent cubic terms.
    """

    def __init__(self, params: SystemParams, layout: ModeLayout,
                 convention: FrameConvention = DEFAULT_CONVENTION):
        if layout.labels != CANONICAL_LABELS:
            raise ValueError(f"layout must be the canonical 4-mode layout, got {layout.labels}")
        self.params = params
        self.layout = layout
        self.convention = convention

        ap = embed(destroy(layout.cutoff("a+")), "a+", layout).matrix
        am = embed(destroy(layout.cutoff("a-")), "a-", layout).matrix
        bp = embed(destroy(layout.cutoff("b+")), "b+", layout).matrix
        bm = embed(destroy(layout.cutoff("b-")), "b-", layout).matrix
        n_ap = ap.conj().T @ ap
        n_am = am.conj().T @ am
        n_bp = bp.conj().T @ bp
        n_bm = bm.conj().T @ bm
        qp = bp.conj().T + bp
        qm = bm.conj().T + bm

        h0 = (params.J_c * (n_ap - n_am)
              + params.Omega_plus * (n_bp + n_bm)
              + params.Omega_minus * (bp.conj().T @ bm + bm.conj().T @ bp))
        if params.include_mechanical_splitting:
            h0 = h0 + params.J_m * (n_bp - n_bm)

        self.A1 = n_ap + n_am
        self.A2 = ap.conj().T @ am + am.conj().T @ ap
        self.X = (ap.conj().T @ qp, am.conj().T @ qp, ap.conj().T @ qm, am.conj().T @ qm)
        self.Xd = tuple(x.conj().T for x in self.X)

        if convention.retain_cubic_terms:
            cubic = (params.g / SQRT2) * (self.A1 @ qp + self.A2 @ qm)
            h0 = h0 + cubic
        self.H_const = np.ascontiguousarray(h0)

    def coefficients(self, alpha_plus, alpha_minus, beta_plus, beta_minus) -> np.ndarray:
        """Stack the six time-dependent term coefficients (r1, r2, c1..c4).

        Accepts scalars or equal-length arrays; returns shape (..., 6) complex.
        """
        g = self.params.g
        r1 = g * SQRT2 * np.real(beta_plus)
        r2 = g * SQRT2 * np.real(beta_minus)
        c = g / SQRT2
        return np.stack(
            np.broadcast_arrays(
                r1 + 0j, r2 + 0j,
                c * np.asarray(alpha_plus, complex),
                c * np.asarray(alpha_minus, complex),
                c * np.asarray(alpha_minus, complex),
                c * np.asarray(alpha_plus, complex),
            ),
            axis=-1,
        )

    def assemble(self, alpha_plus, alpha_minus, beta_plus, beta_minus) -> np.ndarray:
        """Dense H_d for one set of classical amplitudes."""
        r1, r2, c1, c2, c3, c4 = self.coefficients(
            alpha_plus, alpha_minus, beta_plus, beta_minus
        )
        h = self.H_const + r1.real * self.A1 + r2.real * self.A2
        for cj, xj, xdj in zip((c1, c2, c3, c4), self.X, self.Xd):
            h = h + cj * xj + np.conjugate(cj) * xdj
        return h


def build_fluctuation_hamiltonian(
    params: SystemParams,
    alpha_plus: complex,
    alpha_minus: complex,
    beta_plus: complex,
    beta_minus: complex,
    layout: ModeLayout,
    convention: FrameConvention = DEFAULT_CONVENTION,
) -> FockOperator:
    """Displaced-frame Hamiltonian H_d at given classical amplitudes."""
    terms = HamiltonianTerms(params, layout, convention)
    return FockOperator(layout, terms.assemble(alpha_plus, alpha_minus, beta_plus, beta_minus))
