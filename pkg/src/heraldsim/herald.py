"""Single-photon heralding: state reconstruction, projection, reduction.

The herald conditions the full (classical + fluctuation) state on detecting
one photon in a local cavity.  The full state is reconstructed by displacing
the fluctuation state with the instantaneous classical amplitudes; the
optical sector is then rotated from the normal-mode basis (a+, a-) to the
local basis (a1, a2), projected onto the one-photon subspace of the detected
cavity, and the cavities traced out.  The surviving mechanical state is
finally rotated to the local basis (b1, b2) and its {0,1} x {0,1} phonon
block extracted.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import CutoffTooSmall
from .fockspace import (
    DensityMatrix,
    FockOperator,
    ModeLayout,
    destroy,
    displacement,
    embed,
    partial_trace,
    project_and_normalize,
)
from .meanfield import ClassicalTrajectory

DISPLACEMENT_DEFECT_BOUND = 1e-4
QUBIT_BASIS = ("|00>", "|01>", "|10>", "|11>")


@dataclass
class HeraldedState:
    """Output of a single-photon herald."""

    rho_full: DensityMatrix          # displaced state after projection (local optical basis)
    rho_mech: DensityMatrix          # reduced two-mode mechanical state, local basis (b1, b2)
    rho_qubit: np.ndarray            # renormalized {0,1}x{0,1} block, basis |00>,|01>,|10>,|11>
    qubit_weight: float              # weight retained by the qubit block before renormalization
    herald_probability: float
    herald_cavity: int
    herald_time: float | None = None
    single_photon_weight: float = 0.0   # total optical photon number exactly 1, pre-projection
    multi_photon_weight: float = 0.0    # total optical photon number >= 2, pre-projection
    diagnostics: dict = field(default_factory=dict)

    @property
    def two_photon_contamination(self) -> float:
        """Weight of >=2-photon optical components relative to single-photon."""
        if self.single_photon_weight <= 0:
            return math.inf
        return self.multi_photon_weight / self.single_photon_weight

    def qubit_to_json(self, path=None) -> str:
        """4x4 qubit block as JSON (row-major re/im pairs)."""
        payload = {
            "basis": list(QUBIT_BASIS),
            "basis_note": "phonon occupation |n_b1 n_b2> of the local mechanical modes",
            "retained_weight": self.qubit_weight,
            "matrix_re_im": [
                [[float(z.real), float(z.imag)] for z in row] for row in self.rho_qubit
            ],
        }
        text = json.dumps(payload, indent=2)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def _mixing_unitary(cutoff: int) -> np.ndarray:
    """Two-mode 50/50 mixing unitary on a (cutoff x cutoff) product space.

    Implements the involutive Hadamard mode map o1 = (o+ + o-)/sqrt2,
    o2 = (o+ - o-)/sqrt2 as exp(i pi/2 (A_H - A_I)) with A_H the mixing
    generator and A_I the total number operator.  The generator conserves
    total excitation number, so the matrix is exactly unitary and acts as an
    exact involution on every complete total-n sector (n <= cutoff - 1);
    sectors that the truncation leaves incomplete deviate.
    """
    a = destroy(cutoff)
    eye = np.eye(cutoff, dtype=complex)
    a0 = np.kron(a, eye)
    a1 = np.kron(eye, a)
    n0 = a0.conj().T @ a0
    n1 = a1.conj().T @ a1
    mix = (n0 + a0.conj().T @ a1 + a1.conj().T @ a0 - n1) / math.sqrt(2.0)
    gen = (math.pi / 2.0) * (mix - (n0 + n1))
    w, v = np.linalg.eigh(gen)
    return (v * np.exp(1j * w)) @ v.conj().T


@lru_cache(maxsize=8)
def _cached_mixing_unitary(cutoff: int) -> np.ndarray:
    u = _mixing_unitary(cutoff)
    u.setflags(write=False)
    return u


def _sector_rotation(layout: ModeLayout, labels: tuple[str, str]) -> np.ndarray:
    """Mixing unitary embedded on two adjacent equal-cutoff modes."""
    ax0, ax1 = layout.axis(labels[0]), layout.axis(labels[1])
    if ax1 != ax0 + 1:
        raise ValueError(f"modes {labels} must be adjacent in the layout")
    c0, c1 = layout.dims[ax0], layout.dims[ax1]
    if c0 != c1:
        raise ValueError(f"modes {labels} must share a cutoff, got {c0} != {c1}")
    u2 = _cached_mixing_unitary(c0)
    pre = int(np.prod(layout.dims[:ax0], initial=1))
    post = int(np.prod(layout.dims[ax1 + 1:], initial=1))
    return np.kron(np.kron(np.eye(pre, dtype=complex), u2), np.eye(post, dtype=complex))


def optical_basis_rotation(rho: DensityMatrix, direction: str = "normal_to_local") -> DensityMatrix:
    """Rotate the optical sector between normal (a+, a-) and local (a1, a2) bases.

    The 50/50 map is its own inverse, so both directions apply the same
    unitary; `direction` is accepted for call-site readability.
    """
    if direction not in ("normal_to_local", "local_to_normal"):
        raise ValueError(f"unknown direction {direction!r}")
    labels = rho.layout.labels
    pair = ("a+", "a-") if "a+" in labels else (labels[0], labels[1])
    u = _sector_rotation(rho.layout, pair)
    return DensityMatrix(rho.layout, u @ rho.matrix @ u.conj().T)


def mechanical_basis_rotation(rho: DensityMatrix) -> DensityMatrix:
    """Rotate a two-mode mechanical state between (b+, b-) and (b1, b2)."""
    labels = rho.layout.labels
    pair = ("b+", "b-") if "b+" in labels else (labels[0], labels[1])
    u = _sector_rotation(rho.layout, pair)
    return DensityMatrix(rho.layout, u @ rho.matrix @ u.conj().T)


def multimode_displacement(layout: ModeLayout, amplitudes, pad: int = 8):
    """Kron product of per-mode displacement operators; returns (D, max defect)."""
    if len(amplitudes) != len(layout.modes):
        raise ValueError("need one amplitude per mode")
    mats, worst = [], 0.0
    for (lab, cut), alpha in zip(layout.modes, amplitudes):
        d, defect = displacement(alpha, cut, pad)
        worst = max(worst, defect)
        mats.append(d)
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out, worst


def displace_state(rho: DensityMatrix, amplitudes, pad: int = 8):
    """Displace a state mode by mode at padded dimension; truncate afterwards.

    Each mode is zero-padded by `pad` levels, displaced with the exactly
    unitary exponential on the padded space, and truncated back.  The weight
    lost to truncation (the state's actual leakage above the cutoffs) is
    returned as the defect; the output is renormalized.
    """
    layout = rho.layout
    if len(amplitudes) != len(layout.modes):
        raise ValueError("need one amplitude per mode")
    dims = layout.dims
    nm = len(dims)
    t = rho.matrix.reshape(dims + dims)
    tr_in = float(rho.matrix.trace().real)
    for ax, ((lab, cut), alpha) in enumerate(zip(layout.modes, amplitudes)):
        if alpha == 0:
            continue
        dp = cut + pad
        a = destroy(dp)
        gen = 1j * (alpha * a.conj().T - np.conjugate(alpha) * a)   # i*gen is Hermitian
        w, v = np.linalg.eigh(gen)
        dop = (v * np.exp(-1j * w)) @ v.conj().T                    # exp(alpha a^dag - ...)
        pads = [(0, 0)] * (2 * nm)
        pads[ax] = (0, pad)
        pads[ax + nm] = (0, pad)
        t = np.pad(t, pads)
        t = np.moveaxis(np.tensordot(dop, t, axes=([1], [ax])), 0, ax)
        t = np.moveaxis(np.tensordot(dop.conj(), t, axes=([1], [ax + nm])), 0, ax + nm)
        sl = [slice(None)] * (2 * nm)
        sl[ax] = slice(cut)
        sl[ax + nm] = slice(cut)
        t = np.ascontiguousarray(t[tuple(sl)])
    d = layout.total_dim
    out = t.reshape(d, d)
    tr_out = float(out.trace().real)
    lost = max(0.0, tr_in - tr_out)
    if tr_out > 0:
        out = out * (tr_in / tr_out)
    return DensityMatrix(layout, out), lost


def reconstruct_full(
    rho_fluct: DensityMatrix,
    classical: ClassicalTrajectory,
    t: float,
    pad: int = 8,
) -> tuple[DensityMatrix, float]:
    """Displace the fluctuation state by the classical amplitudes at time t.

    Returns the full-frame state and the displacement truncation defect (the
    trace weight pushed above the cutoffs, renormalized away).  A defect
    above 1e-4 means the classical amplitudes are too large for the padded
    cutoffs at this time.
    """
    t_lo, t_hi = float(classical.t[0]), float(classical.t[-1])
    if t < t_lo - 1e-9 or t > t_hi + 1e-9:
        raise ValueError(f"t = {t} outside classical span [{t_lo}, {t_hi}]")
    amps = classical.amplitudes_at(t)
    out, lost = displace_state(rho_fluct, amps, pad)
    if lost > DISPLACEMENT_DEFECT_BOUND:
        raise CutoffTooSmall(
            f"displacement truncation defect {lost:.3e} exceeds "
            f"{DISPLACEMENT_DEFECT_BOUND:.0e}; classical amplitudes too large "
            f"for padded cutoffs (|amps| = {np.abs(amps)})"
        )
    return out, lost


def undisplace(rho_full: DensityMatrix, classical: ClassicalTrajectory, t: float,
               pad: int = 8) -> DensityMatrix:
    """Inverse of reconstruct_full: back to the displaced (fluctuation) frame."""
    amps = classical.amplitudes_at(t)
    out, _ = displace_state(rho_full, [-a for a in amps], pad)
    return out


def _optical_number_weights(rho: DensityMatrix) -> tuple[float, float]:
    """Weights of total optical photon number exactly 1 and >= 2."""
    layout = rho.layout
    dims = layout.dims
    n_tot = np.zeros(layout.total_dim)
    for lab in layout.labels:
        if lab.startswith("a"):
            op = embed(np.diag(np.arange(dims[layout.axis(lab)], dtype=float)).astype(complex),
                       lab, layout)
            n_tot += np.diag(op.matrix).real
    pops = np.diag(rho.matrix).real
    w1 = float(pops[np.abs(n_tot - 1.0) < 0.5].sum())
    w2 = float(pops[n_tot >= 1.5].sum())
    return w1, w2


def herald_single_photon(
    rho_full: DensityMatrix,
    cavity: int = 1,
    herald_time: float | None = None,
) -> HeraldedState:
    """Project the full state onto one photon in local cavity 1 or 2.

    `rho_full` must be given on the canonical normal-mode layout; the optical
    sector is rotated to the local basis before projecting, and the reduced
    mechanical state is returned in the local (b1, b2) basis.
    """
    if cavity not in (1, 2):
        raise ValueError("cavity must be 1 or 2")
    layout = rho_full.layout
    w1, w2 = _optical_number_weights(rho_full)

    rho_local = optical_basis_rotation(rho_full, "normal_to_local")
    slot = "a+" if cavity == 1 else "a-"   # slots hold a1, a2 after the rotation
    cut = layout.cutoff(slot)
    p_one = np.zeros((cut, cut), dtype=complex)
    p_one[1, 1] = 1.0
    projector = embed(p_one, slot, layout)
    projected, prob = project_and_normalize(rho_local, FockOperator(layout, projector.matrix))

    rho_mech_pm = partial_trace(projected, keep={"b+", "b-"})
    rho_mech = mechanical_basis_rotation(rho_mech_pm)

    d1, d2 = rho_mech.layout.dims
    idx = [0 * d2 + 0, 0 * d2 + 1, 1 * d2 + 0, 1 * d2 + 1]
    block = rho_mech.matrix[np.ix_(idx, idx)]
    weight = float(block.trace().real)
    qubit = block / weight if weight > 0 else block

    return HeraldedState(
        rho_full=projected,
        rho_mech=rho_mech,
        rho_qubit=qubit,
        qubit_weight=weight,
        herald_probability=prob,
        herald_cavity=cavity,
        herald_time=herald_time,
        single_photon_weight=w1,
        multi_photon_weight=w2,
        diagnostics={"mech_trace": float(rho_mech.matrix.trace().real)},
    )
