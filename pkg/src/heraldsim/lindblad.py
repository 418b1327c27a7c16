"""Master-equation propagation of the fluctuation density matrix.

Implements, with the dissipator convention

    d rho/dt = -i [H_d(t), rho]
               - (1/2) sum_{j=+-} kappa_j D[a_j] rho
               - (1/2) sum_{j=+-} [ gamma (n_th + 1) D[b_j] rho
                                    + gamma n_th D[b_j^dag] rho ],
    D[o] rho = o^dag o rho + rho o^dag o - 2 o rho o^dag,

which expands to the standard Lindblad form and yields decay (verified by
the closed-form single-mode tests).  Propagation is fixed-step RK4 on the
classical trajectory's grid; H_d is rebuilt at every stage from linearly
interpolated classical amplitudes.  The trace is never renormalized: its
drift is a measured accuracy diagnostic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _core
from ._core.plan import TERM_PAIR, TERM_REAL, KernelPlan, build_plan
from .errors import AccuracyFailure, PositivityFailure
from .fockspace import (
    DensityMatrix,
    ModeLayout,
    destroy,
    embed,
    thermal_populations,
)
from .meanfield import ClassicalTrajectory
from .system import DEFAULT_CONVENTION, FrameConvention, HamiltonianTerms, SystemParams

TRACE_DRIFT_BOUND = 1e-6
NEGATIVITY_BOUND = -1e-6


@dataclass(frozen=True)
class BathSpec:
    """Per-mode decay rates and thermal occupations (optical baths at T=0)."""

    kappa_plus: float
    kappa_minus: float
    gamma: float
    n_th: float = 0.0

    def __post_init__(self):
        if min(self.kappa_plus, self.kappa_minus, self.gamma) < 0 or self.n_th < 0:
            raise ValueError("rates and occupations must be >= 0")

    @classmethod
    def from_params(cls, params: SystemParams) -> "BathSpec":
        return cls(params.kappa_plus, params.kappa_minus, params.gamma, params.n_th)


@dataclass
class QuantumTrajectory:
    """Sampled observables and requested state snapshots of one evolution."""

    times: np.ndarray
    occupations: dict                 # per-mode <o^dag o> plus cross expectations
    snapshots: dict                   # snapped time -> DensityMatrix
    final: DensityMatrix
    diagnostics: dict = field(default_factory=dict)

    def local_occupations(self) -> dict:
        """Occupations of the local modes a1, a2, b1, b2."""
        occ = self.occupations
        ca = 2.0 * np.real(occ["cross_a"])
        cb = 2.0 * np.real(occ["cross_b"])
        return {
            "n_a1": 0.5 * (occ["n_a_plus"] + occ["n_a_minus"] + ca),
            "n_a2": 0.5 * (occ["n_a_plus"] + occ["n_a_minus"] - ca),
            "n_b1": 0.5 * (occ["n_b_plus"] + occ["n_b_minus"] + cb),
            "n_b2": 0.5 * (occ["n_b_plus"] + occ["n_b_minus"] - cb),
        }

    def total_occupation(self) -> np.ndarray:
        occ = self.occupations
        return (occ["n_a_plus"] + occ["n_a_minus"] + occ["n_b_plus"] + occ["n_b_minus"]).real

    def optical_occupation(self) -> np.ndarray:
        occ = self.occupations
        return (occ["n_a_plus"] + occ["n_a_minus"]).real

    def to_csv(self, path) -> None:
        occ = self.occupations
        loc = self.local_occupations()
        header = ("t_ns,n_a_plus,n_a_minus,n_b_plus,n_b_minus,n_a1,n_a2,n_b1,n_b2")
        data = np.column_stack([
            self.times,
            occ["n_a_plus"].real, occ["n_a_minus"].real,
            occ["n_b_plus"].real, occ["n_b_minus"].real,
            loc["n_a1"].real, loc["n_a2"].real, loc["n_b1"].real, loc["n_b2"].real,
        ])
        np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.17g")


class Propagator:
    """Reusable stepping context for one (params, layout, baths) combination."""

    def __init__(self, params: SystemParams, layout: ModeLayout, baths: BathSpec,
                 convention: FrameConvention = DEFAULT_CONVENTION):
        self.params = params
        self.layout = layout
        self.baths = baths
        self.terms = HamiltonianTerms(params, layout, convention)
        self.plan = self._build_plan()
        self._obs = self._observables()

    def _build_plan(self) -> KernelPlan:
        t = self.terms
        lay = self.layout
        ap = embed(destroy(lay.cutoff("a+")), "a+", lay).matrix
        am = embed(destroy(lay.cutoff("a-")), "a-", lay).matrix
        bp = embed(destroy(lay.cutoff("b+")), "b+", lay).matrix
        bm = embed(destroy(lay.cutoff("b-")), "b-", lay).matrix
        b = self.baths
        jumps = [
            (b.kappa_plus, ap),
            (b.kappa_minus, am),
            (b.gamma * (b.n_th + 1.0), bp),
            (b.gamma * (b.n_th + 1.0), bm),
            (b.gamma * b.n_th, bp.conj().T),
            (b.gamma * b.n_th, bm.conj().T),
        ]
        # rotating frame = static diagonal; the static off-diagonal remainder
        # rides along as a term with unit coefficient (column 0)
        diag = np.real(np.diag(t.H_const))
        h_offdiag = t.H_const - np.diag(diag)
        term_list = [
            (TERM_REAL, h_offdiag),
            (TERM_REAL, t.A1), (TERM_REAL, t.A2),
            (TERM_PAIR, t.X[0]), (TERM_PAIR, t.X[1]),
            (TERM_PAIR, t.X[2]), (TERM_PAIR, t.X[3]),
        ]
        return build_plan(diag, term_list, jumps)

    def _observables(self) -> dict:
        lay = self.layout
        ap = embed(destroy(lay.cutoff("a+")), "a+", lay).matrix
        am = embed(destroy(lay.cutoff("a-")), "a-", lay).matrix
        bp = embed(destroy(lay.cutoff("b+")), "b+", lay).matrix
        bm = embed(destroy(lay.cutoff("b-")), "b-", lay).matrix
        return {
            "n_a_plus": ap.conj().T @ ap,
            "n_a_minus": am.conj().T @ am,
            "n_b_plus": bp.conj().T @ bp,
            "n_b_minus": bm.conj().T @ bm,
            "cross_a": ap.conj().T @ am,
            "cross_b": bp.conj().T @ bm,
            "a_plus": ap,
            "a_minus": am,
            "b_plus": bp,
            "b_minus": bm,
        }

    def coefficients_on_half_grid(self, classical: ClassicalTrajectory,
                                  t0: float, dt: float, nsteps: int) -> np.ndarray:
        half = t0 + 0.5 * dt * np.arange(2 * nsteps + 1)
        amps = classical.amplitudes_at(half)
        cc = self.terms.coefficients(amps[:, 0], amps[:, 1], amps[:, 2], amps[:, 3])
        ones = np.ones((cc.shape[0], 1), dtype=complex)  # static off-diagonal term
        return np.ascontiguousarray(np.hstack([ones, cc]))

    def step_chunk(self, rho: np.ndarray, classical: ClassicalTrajectory,
                   t0: float, dt: float, nsteps: int) -> np.ndarray:
        """Advance the interaction-picture state by nsteps from absolute t0."""
        if nsteps == 0:
            return rho
        coeffs = self.coefficients_on_half_grid(classical, t0, dt, nsteps)
        return _core.backend().lindblad_rk4(rho, coeffs, t0, dt, self.plan)


def evolve(
    rho0: DensityMatrix,
    classical: ClassicalTrajectory,
    params: SystemParams,
    baths: BathSpec | None = None,
    sample_times=None,
    *,
    dt: float | None = None,
    t_start: float | None = None,
    snapshot_times=(),
    convention: FrameConvention = DEFAULT_CONVENTION,
    check_positivity: bool = True,
) -> QuantumTrajectory:
    """Propagate rho0 along the classical trajectory, sampling observables.

    The integrator step defaults to the classical trajectory's; when the
    classical grid is finer, Hamiltonian coefficients at the RK4 stages are
    linear interpolations that land exactly on stored classical points.
    Sampling and snapshot times snap to the integration grid.  Raises
    AccuracyFailure if the trace drifts by more than 1e-6 and
    PositivityFailure if an eigenvalue dips below -1e-6.
    """
    if baths is None:
        baths = BathSpec.from_params(params)
    if dt is None:
        dt = classical.dt
    if t_start is None:
        t_start = float(classical.t[0])
    if sample_times is None or len(sample_times) == 0:
        raise ValueError("sample_times must be a non-empty list")
    t_lo, t_hi = float(classical.t[0]), float(classical.t[-1])
    for ts in list(sample_times) + list(snapshot_times):
        if ts < t_lo - 1e-9 or ts > t_hi + 1e-9:
            raise ValueError(f"requested time {ts} outside classical span [{t_lo}, {t_hi}]")

    prop = Propagator(params, rho0.layout, baths, convention)
    obs = prop._obs

    to_index = lambda t: int(round((t - t_start) / dt))
    sample_idx = sorted({to_index(t) for t in sample_times})
    snap_idx = sorted({to_index(t) for t in snapshot_times})
    if sample_idx[0] < 0:
        raise ValueError("sample times precede t_start")
    events = sorted(set(sample_idx) | set(snap_idx))

    # propagate in the interaction picture; rotate to the lab frame at events
    rho = prop.plan.to_frame(rho0.matrix.astype(np.complex128), t_start)
    occ = {k: [] for k in ("n_a_plus", "n_a_minus", "n_b_plus", "n_b_minus",
                           "cross_a", "cross_b", "a_plus", "a_minus",
                           "b_plus", "b_minus")}
    times, snapshots = [], {}
    max_drift = 0.0
    max_herm = 0.0
    min_eig = np.inf
    sample_set, snap_set = set(sample_idx), set(snap_idx)

    pos = 0
    for idx in events:
        rho = prop.step_chunk(rho, classical, t_start + pos * dt, dt, idx - pos)
        pos = idx
        t_now = t_start + idx * dt
        tr = rho.trace()
        drift = abs(tr - 1.0)
        max_drift = max(max_drift, drift)
        if drift > TRACE_DRIFT_BOUND:
            raise AccuracyFailure(
                f"trace drift {drift:.3e} at t = {t_now:.4g} ns exceeds {TRACE_DRIFT_BOUND}"
            )
        rho_lab = prop.plan.to_lab(rho, t_now)
        if idx in sample_set:
            times.append(t_now)
            for key, op in obs.items():
                occ[key].append(np.einsum("ij,ji->", rho_lab, op))
            max_herm = max(max_herm, float(np.abs(rho_lab - rho_lab.conj().T).max()))
            if check_positivity:
                lo = float(np.linalg.eigvalsh(rho_lab).min())
                min_eig = min(min_eig, lo)
                if lo < NEGATIVITY_BOUND:
                    raise PositivityFailure(
                        f"eigenvalue {lo:.3e} at t = {t_now:.4g} ns below {NEGATIVITY_BOUND}"
                    )
        if idx in snap_set:
            snapshots[t_now] = DensityMatrix(rho0.layout, rho_lab.copy())

    result = QuantumTrajectory(
        times=np.asarray(times),
        occupations={k: np.asarray(v) for k, v in occ.items()},
        snapshots=snapshots,
        final=DensityMatrix(rho0.layout, prop.plan.to_lab(rho, t_start + pos * dt)),
        diagnostics={
            "max_trace_drift": max_drift,
            "max_hermiticity_defect": max_herm,
            "min_eigenvalue": None if math.isinf(min_eig) else min_eig,
            "dt": dt,
            "backend": _core.backend_name(),
        },
    )
    return result


def thermal_state(n_th: float, cutoff: int, tail_tol: float = 1e-6,
                  label: str = "b") -> DensityMatrix:
    """Single-mode thermal state with renormalized truncated populations."""
    pops = thermal_populations(n_th, cutoff, tail_tol)
    layout = ModeLayout(((label, cutoff),))
    return DensityMatrix(layout, np.diag(pops).astype(complex))


def initial_state(layout: ModeLayout, n_th: float = 0.0,
                  tail_tol: float = 1e-6) -> DensityMatrix:
    """Protocol initial condition: optical vacuum, thermal mechanical modes."""
    mats = []
    for lab, cut in layout.modes:
        if lab.startswith("b") and n_th > 0:
            mats.append(np.diag(thermal_populations(n_th, cut, tail_tol)))
        else:
            m = np.zeros((cut, cut))
            m[0, 0] = 1.0
            mats.append(m)
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return DensityMatrix(layout, out.astype(complex))
