"""Protocol orchestration: write pulse, herald, readout, sweeps.

Timeline of one realization (times in ns, all snapped to the integration
grid):

    0 ----- write pulse (center t_W) ----- t_q ----- herald t_H -----
      ----- free precession ----- readout pulse (center t_R = t_W + dT)
      ----- intensity sample at t_R + offset

The write drive on cavity 1, tuned to the Stokes sideband of the symmetric
optical mode, creates photon-phonon pairs; detecting a single photon in a
local cavity after the classical field has died (t > t_q) projects the
mechanics onto a delocalized one-phonon state.  A later readout pulse on
the anti-Stokes sideband swaps the phonon back into the optical field; the
cavity intensity versus write-read delay traces an interference fringe at
the mechanical nondegeneracy, whose visibility witnesses the entanglement.

Sweep points are pure functions of the configuration and run in parallel;
results are ordered by input order, so outputs are independent of the
worker count.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ProtocolViolation, ZeroProbabilityHerald
from .fockspace import DensityMatrix, ModeLayout, canonical_layout, destroy
from .herald import (
    HeraldedState,
    _sector_rotation,
    herald_single_photon,
    optical_basis_rotation,
    reconstruct_full,
    undisplace,
)
from .lindblad import BathSpec, QuantumTrajectory, evolve, initial_state
from .meanfield import ClassicalTrajectory, integrate_classical, max_classical_dt
from .metrics import (
    FringePattern,
    VisibilityResult,
    bell_fidelity_max,
    concurrence,
    heralding_rate,
    negativity,
    visibility,
)
from .runner import map_jobs
from .system import (
    DEFAULT_CONVENTION,
    FrameConvention,
    PulseSpec,
    SystemParams,
    default_params,
)

WRITE_AMPLITUDE_KAPPA = 1.0e3       # A_W in units of kappa_minus
READ_AMPLITUDE_KAPPA = 5.0e3        # A_R in units of kappa_minus
PULSE_SIGMA_NS = 3.85
# Pulse center: early enough that the classical field has died before the
# herald at 30 ns (t_q ~ 25 ns), late enough that truncating the envelope at
# t = 0 leaves no spurious ring-down (step < 1e-2 of peak).
DEFAULT_WRITE_CENTER_NS = 11.7
DEFAULT_HERALD_TIME_NS = 30.0
DEFAULT_CUTOFFS = (3, 3, 4, 4)
DEFAULT_DELAYS_NS = tuple(45.0 + 10.0 * k for k in range(16))
DEFAULT_TEMPERATURES_K = (0.0, 0.05, 0.1, 0.15, 0.2, 0.3)


@dataclass(frozen=True)
class ProtocolConfig:
    """Fully resolved protocol configuration."""

    params: SystemParams
    write: PulseSpec
    read: PulseSpec                       # template; center is set per delay
    herald_time: float = DEFAULT_HERALD_TIME_NS
    herald_cavity: int = 1
    delays: tuple = DEFAULT_DELAYS_NS     # dT = t_R - t_W, ns
    readout_offset: float | None = None   # ns after t_R; None resolves automatically
    cutoffs: tuple = DEFAULT_CUTOFFS
    dt: float | None = None               # integrator step; None = resolution bound
    temperatures: tuple = DEFAULT_TEMPERATURES_K
    displacement_pad: int = 8
    thermal_tail_tol: float = 0.05        # truncation tolerance for sweep initial states
    sample_spacing: float = 0.25          # occupation sampling cadence (ns)
    branch_buffer_sigmas: float = 6.0     # readout influence horizon before t_R
    allow_early_herald: bool = False
    allow_detuning_override: bool = False
    workers: int | None = None
    convention: FrameConvention = DEFAULT_CONVENTION

    def __post_init__(self):
        if self.herald_cavity not in (1, 2):
            raise ValueError("herald_cavity must be 1 or 2")
        if self.write.t0 >= self.herald_time and not self.allow_early_herald:
            raise ProtocolViolation("write pulse center must precede the herald time")
        if not self.allow_detuning_override:
            stokes = self.params.J_c + self.params.Omega_plus
            anti = self.params.J_c - self.params.Omega_plus
            if abs(self.write.detuning - stokes) > 1e-9:
                raise ProtocolViolation(
                    f"write detuning {self.write.detuning} is not the Stokes condition "
                    f"{stokes}; set allow_detuning_override to force")
            if abs(self.read.detuning - anti) > 1e-9:
                raise ProtocolViolation(
                    f"read detuning {self.read.detuning} is not the anti-Stokes condition "
                    f"{anti}; set allow_detuning_override to force")
        if len(self.delays) == 0:
            raise ValueError("delays must be non-empty")
        if self.dt is not None and self.dt > max_classical_dt(self.params) * (1 + 1e-12):
            raise ValueError("dt exceeds the integrator resolution bound")

    @property
    def grid_dt(self) -> float:
        return self.dt if self.dt is not None else max_classical_dt(self.params)

    @property
    def classical_dt(self) -> float:
        """Mean-field grid: a fixed subdivision so stage lookups hit nodes."""
        return self.grid_dt / 32.0

    def snap(self, t: float) -> float:
        dt = self.grid_dt
        return round(t / dt) * dt

    def layout(self) -> ModeLayout:
        return canonical_layout(tuple(self.cutoffs))

    def read_pulse_at(self, delay: float) -> PulseSpec:
        return self.read.shifted(self.write.t0 + delay)

    def with_temperature(self, temperature: float) -> "ProtocolConfig":
        return replace(self, params=self.params.with_temperature(temperature))


def default_config(params: SystemParams | None = None, **overrides) -> ProtocolConfig:
    """Build the standard operating point; keyword overrides replace fields."""
    params = params if params is not None else default_params()
    write = PulseSpec(
        t0=overrides.pop("write_center", DEFAULT_WRITE_CENTER_NS),
        sigma_t=overrides.pop("pulse_sigma", PULSE_SIGMA_NS),
        amplitude=overrides.pop("write_amplitude_kappa", WRITE_AMPLITUDE_KAPPA)
        * params.kappa_minus,
        detuning=params.J_c + params.Omega_plus,
        phase=overrides.pop("write_phase", 0.0),
    )
    read = PulseSpec(
        t0=0.0,
        sigma_t=write.sigma_t,
        amplitude=overrides.pop("read_amplitude_kappa", READ_AMPLITUDE_KAPPA)
        * params.kappa_minus,
        detuning=params.J_c - params.Omega_plus,
        phase=0.0,
    )
    return ProtocolConfig(params=params, write=write, read=read, **overrides)


@dataclass
class WriteSegment:
    """Shared state after write pulse and herald at t_H."""

    config: ProtocolConfig
    classical: ClassicalTrajectory        # write pulse only
    trajectory: QuantumTrajectory
    herald: HeraldedState
    rho_continuation: DensityMatrix       # post-herald fluctuation state, normal basis
    t_q: float
    t_herald: float
    displacement_defect: float


@dataclass
class HeraldRunResult:
    concurrence: float
    bell_fidelity: float
    bell_phase: float
    negativity: float
    herald_probability: float
    herald_rate_mhz: float
    two_photon_contamination: float
    qubit_matrix: np.ndarray
    qubit_weight: float
    t_q: float
    t_herald: float
    diagnostics: dict = field(default_factory=dict)
    convergence: dict | None = None

    def as_dict(self) -> dict:
        out = {
            "concurrence": self.concurrence,
            "bell_fidelity": self.bell_fidelity,
            "bell_phase_rad": self.bell_phase,
            "negativity": self.negativity,
            "herald_probability": self.herald_probability,
            "herald_rate_mhz": self.herald_rate_mhz,
            "two_photon_contamination": self.two_photon_contamination,
            "qubit_weight": self.qubit_weight,
            "t_q_ns": self.t_q,
            "t_herald_ns": self.t_herald,
            "qubit_matrix_re_im": [
                [[float(z.real), float(z.imag)] for z in row] for row in self.qubit_matrix
            ],
            "diagnostics": self.diagnostics,
        }
        if self.convergence is not None:
            out["convergence"] = self.convergence
        return out


def find_t_q(times, quantum_total, classical_total) -> float:
    """First time after the classical peak where quantum occupation wins."""
    times = np.asarray(times)
    cls = np.asarray(classical_total)
    qnt = np.asarray(quantum_total)
    peak = int(np.argmax(cls))
    after = np.nonzero(qnt[peak:] > cls[peak:])[0]
    if len(after) == 0:
        return math.inf
    return float(times[peak + after[0]])


def run_write_segment(config: ProtocolConfig) -> WriteSegment:
    """Propagate through the write pulse and herald at t_H."""
    dt = config.grid_dt
    t_h = config.snap(config.herald_time)
    layout = config.layout()
    params = config.params

    t_end = t_h + 4.0 * dt
    classical = integrate_classical(params, [config.write], t_end, config.classical_dt)

    rho0 = initial_state(layout, params.n_th, config.thermal_tail_tol)
    samples = [config.snap(t) for t in np.arange(0.0, t_h + 1e-9, config.sample_spacing)]
    if samples[-1] < t_h:
        samples.append(t_h)
    traj = evolve(rho0, classical, params, BathSpec.from_params(params),
                  samples, dt=dt, snapshot_times=[t_h], convention=config.convention)

    cls_total = np.interp(traj.times, classical.t, classical.occupations())
    t_q = find_t_q(traj.times, traj.total_occupation(), cls_total)
    if t_h < t_q and not config.allow_early_herald:
        raise ProtocolViolation(
            f"herald at {t_h:.3f} ns precedes t_q = {t_q:.3f} ns (quantum fluctuations "
            "do not dominate yet); set allow_early_herald to force")

    rho_h = traj.snapshots[min(traj.snapshots, key=lambda s: abs(s - t_h))]
    full, defect = reconstruct_full(rho_h, classical, t_h, config.displacement_pad)
    heralded = herald_single_photon(full, config.herald_cavity, herald_time=t_h)

    # back to the normal optical basis and the displaced (fluctuation) frame
    back = optical_basis_rotation(heralded.rho_full, "local_to_normal")
    rho_cont = undisplace(back, classical, t_h, config.displacement_pad)

    return WriteSegment(
        config=config,
        classical=classical,
        trajectory=traj,
        herald=heralded,
        rho_continuation=rho_cont,
        t_q=t_q,
        t_herald=t_h,
        displacement_defect=defect,
    )


def _herald_metrics(config: ProtocolConfig, seg: WriteSegment) -> HeraldRunResult:
    her = seg.herald
    conc = concurrence(her.rho_qubit)
    fid, phi = bell_fidelity_max(her.rho_qubit)
    neg = negativity(her.rho_mech)
    rate = heralding_rate(config.params.kappa_local, her.herald_probability)
    return HeraldRunResult(
        concurrence=conc,
        bell_fidelity=fid,
        bell_phase=phi,
        negativity=neg,
        herald_probability=her.herald_probability,
        herald_rate_mhz=rate,
        two_photon_contamination=her.two_photon_contamination,
        qubit_matrix=her.rho_qubit,
        qubit_weight=her.qubit_weight,
        t_q=seg.t_q,
        t_herald=seg.t_herald,
        diagnostics={
            "displacement_defect": seg.displacement_defect,
            "single_photon_weight": her.single_photon_weight,
            "multi_photon_weight": her.multi_photon_weight,
            "qubit_diagonal": [float(x) for x in np.diag(her.rho_qubit).real],
            "n_th": config.params.n_th,
            **{k: v for k, v in seg.trajectory.diagnostics.items()},
        },
    )


def run_write_herald(config: ProtocolConfig, convergence_check: bool = False) -> HeraldRunResult:
    """Full write-and-herald run with all entanglement metrics."""
    seg = run_write_segment(config)
    result = _herald_metrics(config, seg)
    if convergence_check:
        bumped = replace(config, cutoffs=tuple(c + 1 for c in config.cutoffs))
        ref = _herald_metrics(bumped, run_write_segment(bumped))
        deltas = {
            "concurrence": abs(result.concurrence - ref.concurrence),
            "bell_fidelity": abs(result.bell_fidelity - ref.bell_fidelity),
            "negativity": abs(result.negativity - ref.negativity),
        }
        result.convergence = {
            "cutoffs": list(bumped.cutoffs),
            "deltas": deltas,
            "within_1e-2": bool(max(deltas.values()) < 1e-2),
        }
    return result


@dataclass
class HeraldScanPoint:
    t_herald: float
    concurrence: float
    herald_probability: float
    herald_rate_mhz: float
    valid: bool                 # herald after t_q
    t_q: float


def scan_herald_time(config: ProtocolConfig, t_grid=None) -> list[HeraldScanPoint]:
    """Herald at each grid time on one evolution; no t_q gating (flagged instead)."""
    dt = config.grid_dt
    if t_grid is None:
        t_grid = np.arange(24.0, 44.0 + 1e-9, 1.0)
    t_grid = sorted({config.snap(float(t)) for t in t_grid})
    t_max = t_grid[-1]
    layout = config.layout()
    params = config.params

    classical = integrate_classical(params, [config.write], t_max + 4 * dt, config.classical_dt)
    rho0 = initial_state(layout, params.n_th, config.thermal_tail_tol)
    samples = sorted(set(
        [config.snap(t) for t in np.arange(0.0, t_max + 1e-9, config.sample_spacing)]
        + list(t_grid)))
    traj = evolve(rho0, classical, params, BathSpec.from_params(params),
                  samples, dt=dt, snapshot_times=t_grid, convention=config.convention)
    cls_total = np.interp(traj.times, classical.t, classical.occupations())
    t_q = find_t_q(traj.times, traj.total_occupation(), cls_total)

    points = []
    for t_h in t_grid:
        snap = traj.snapshots[min(traj.snapshots, key=lambda s: abs(s - t_h))]
        try:
            full, _ = reconstruct_full(snap, classical, t_h, config.displacement_pad)
            her = herald_single_photon(full, config.herald_cavity, herald_time=t_h)
            conc = concurrence(her.rho_qubit)
            prob = her.herald_probability
        except ZeroProbabilityHerald:
            conc, prob = 0.0, 0.0
        points.append(HeraldScanPoint(
            t_herald=t_h,
            concurrence=conc,
            herald_probability=prob,
            herald_rate_mhz=heralding_rate(params.kappa_local, prob),
            valid=t_h >= t_q,
            t_q=t_q,
        ))
    return points


def _dephase_mechanical_local(rho: DensityMatrix) -> DensityMatrix:
    """Zero all mechanical coherences in the local (b1, b2) number basis."""
    layout = rho.layout
    u = _sector_rotation(layout, ("b+", "b-"))
    local = u @ rho.matrix @ u.conj().T
    dims = layout.dims
    nb = dims[2] * dims[3]
    opt = dims[0] * dims[1]
    mech_index = np.tile(np.arange(nb), opt)
    mask = mech_index[:, None] == mech_index[None, :]
    local = np.where(mask, local, 0.0)
    return DensityMatrix(layout, u @ local @ u.conj().T)


def _force_separable_max(rho: DensityMatrix) -> DensityMatrix:
    """Replace the mechanical sector by the maximal-coherence separable state.

    The product ((|0> + |1>)/sqrt2) x ((|0> + |1>)/sqrt2) of the local modes
    carries the largest single-mode coherences compatible with one phonon of
    mean occupation per mode and no entanglement; it saturates the
    separable-state visibility bound of one half.
    """
    from .fockspace import partial_trace

    layout = rho.layout
    rho_opt = partial_trace(rho, keep={"a+", "a-"})
    cb = layout.cutoff("b+")
    chi = np.zeros(cb, dtype=complex)
    chi[0] = chi[1] = 1.0 / math.sqrt(2.0)
    single = np.outer(chi, chi.conj())
    mech_local = np.kron(single, single)
    u = _sector_rotation(ModeLayout((("b+", cb), ("b-", layout.cutoff("b-")))), ("b+", "b-"))
    mech_pm = u @ mech_local @ u.conj().T
    return DensityMatrix(layout, np.kron(rho_opt.matrix, mech_pm))


FORCE_MECH_STATES = (None, "dephase_local", "separable_max")


@dataclass
class ReadoutPoint:
    delay: float
    t_read: float
    t_sample: float
    intensity_c1: float
    intensity_c2: float
    fluct_intensity_c1: float
    classical_intensity_c1: float
    mech_occupation_before: float
    mech_occupation_after: float
    series_times: np.ndarray
    series_intensity_c1: np.ndarray
    diagnostics: dict = field(default_factory=dict)


@dataclass
class InterferenceResult:
    pattern: FringePattern
    visibility: VisibilityResult
    period: float
    readout_offset: float
    points: list
    herald: HeraldRunResult
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "visibility": self.visibility.as_dict(),
            "period_ns": self.period,
            "readout_offset_ns": self.readout_offset,
            "delays_ns": [float(x) for x in self.pattern.delays],
            "intensity": [float(x) for x in self.pattern.intensity],
            "raw_intensity": [float(x) for x in self.pattern.raw_intensity],
            "herald": self.herald.as_dict(),
            "diagnostics": self.diagnostics,
        }


def _branch_time(config: ProtocolConfig, delay: float) -> float:
    t_r = config.write.t0 + delay
    return config.snap(t_r - config.branch_buffer_sigmas * config.read.sigma_t)


def _readout_job(args) -> ReadoutPoint:
    """Propagate one delay branch from its snapshot through the readout pulse."""
    (config, delay, rho_mat, t_branch, t_sample_rel, extra_span) = args
    layout = config.layout()
    params = config.params
    dt = config.grid_dt
    t_r = config.snap(config.write.t0 + delay)
    t_sample = config.snap(t_r + t_sample_rel)
    t_end = max(t_sample, t_r + extra_span)

    pulses = [config.write, config.read_pulse_at(delay)]
    classical = integrate_classical(params, pulses, t_end + 4 * dt, config.classical_dt)
    rho = DensityMatrix(layout, rho_mat)
    samples = sorted({config.snap(t) for t in
                      np.arange(t_branch, t_end + 1e-9, config.sample_spacing)}
                     | {t_sample, config.snap(t_r)})
    traj = evolve(rho, classical, params, BathSpec.from_params(params),
                  samples, dt=dt, t_start=t_branch, convention=config.convention)

    occ = traj.occupations
    amps = classical.amplitudes_at(traj.times)
    a1_cl = (amps[:, 0] + amps[:, 1]) / math.sqrt(2.0)
    a2_cl = (amps[:, 0] - amps[:, 1]) / math.sqrt(2.0)
    d_a1 = (occ["a_plus"] + occ["a_minus"]) / math.sqrt(2.0)
    d_a2 = (occ["a_plus"] - occ["a_minus"]) / math.sqrt(2.0)
    n_a1_fl = 0.5 * (occ["n_a_plus"] + occ["n_a_minus"] + 2.0 * np.real(occ["cross_a"])).real
    n_a2_fl = 0.5 * (occ["n_a_plus"] + occ["n_a_minus"] - 2.0 * np.real(occ["cross_a"])).real
    i_c1 = np.abs(a1_cl) ** 2 + 2.0 * np.real(np.conj(a1_cl) * d_a1) + n_a1_fl
    i_c2 = np.abs(a2_cl) ** 2 + 2.0 * np.real(np.conj(a2_cl) * d_a2) + n_a2_fl

    k = int(np.argmin(np.abs(traj.times - t_sample)))
    k_read = int(np.argmin(np.abs(traj.times - t_r)))
    mech = (occ["n_b_plus"] + occ["n_b_minus"]).real
    return ReadoutPoint(
        delay=delay,
        t_read=t_r,
        t_sample=float(traj.times[k]),
        intensity_c1=float(i_c1[k]),
        intensity_c2=float(i_c2[k]),
        fluct_intensity_c1=float(n_a1_fl[k]),
        classical_intensity_c1=float(np.abs(a1_cl[k]) ** 2),
        mech_occupation_before=float(mech[max(k_read - 1, 0)]),
        mech_occupation_after=float(mech[k]),
        series_times=traj.times - t_r,
        series_intensity_c1=i_c1,
        diagnostics={
            "classical_optical": np.abs(amps[:, 0]) ** 2 + np.abs(amps[:, 1]) ** 2,
            "quantum_optical": (occ["n_a_plus"] + occ["n_a_minus"]).real,
            **traj.diagnostics,
        },
    )


def _resolve_readout_offset(config: ProtocolConfig, seg: WriteSegment,
                            rho_branch: np.ndarray, scan_window: float = 45.0) -> float:
    """Default sampling offset: 10 ns after the readout's classical field has
    decayed below the quantum fluctuation level."""
    delay = float(config.delays[0])
    t_branch = _branch_time(config, delay)
    point = _readout_job((config, delay, rho_branch, t_branch, scan_window, scan_window))
    t_rel = point.series_times
    cls = point.diagnostics["classical_optical"]
    qnt = point.diagnostics["quantum_optical"]
    after = np.nonzero((t_rel > 0) & (qnt > cls))[0]
    if len(after) == 0:
        return 25.0
    return float(t_rel[after[0]] + 10.0)


def run_interference(config: ProtocolConfig, force_mech_state: str | None = None,
                     seg: WriteSegment | None = None) -> InterferenceResult:
    """Delay sweep of the readout; fringe pattern, visibility and period.

    force_mech_state replaces the post-herald mechanical state before the
    free precession: 'dephase_local' zeroes every coherence in the local
    phonon-number basis (the fringe collapses), 'separable_max' installs the
    maximal-coherence separable product state (the fringe shows the
    separable bound of one half).
    """
    if force_mech_state not in FORCE_MECH_STATES:
        raise ValueError(f"force_mech_state must be one of {FORCE_MECH_STATES}")
    params = config.params
    delays = sorted(float(d) for d in config.delays)
    if params.delta_Omega != 0.0:
        period = 2.0 * math.pi / abs(params.delta_Omega)
        if (delays[-1] - delays[0]) < period * (1 - 1e-9):
            raise ValueError(
                f"delay span {delays[-1] - delays[0]:.1f} ns must cover one fringe "
                f"period {period:.1f} ns")
    for d in delays:
        if _branch_time(config, d) < config.snap(config.herald_time) - 1e-9:
            raise ProtocolViolation(
                f"readout at delay {d} ns would overlap the herald; delays must "
                f"satisfy t_W + dT - {config.branch_buffer_sigmas} sigma >= t_H")

    if seg is None:
        seg = run_write_segment(config)
    herald_result = _herald_metrics(config, seg)

    rho_cont = seg.rho_continuation
    if force_mech_state == "dephase_local":
        rho_cont = _dephase_mechanical_local(rho_cont)
    elif force_mech_state == "separable_max":
        rho_cont = _force_separable_max(rho_cont)

    # free segment: one evolution with snapshots at every branch point
    dt = config.grid_dt
    branch_times = [_branch_time(config, d) for d in delays]
    t_free_end = max(branch_times)
    classical_free = integrate_classical(params, [config.write], t_free_end + 4 * dt,
                                        config.classical_dt)
    free_samples = sorted({config.snap(t) for t in
                           np.arange(seg.t_herald, t_free_end + 1e-9, 1.0)}
                          | set(branch_times))
    free = evolve(rho_cont, classical_free, params, BathSpec.from_params(params),
                  free_samples, dt=dt, t_start=seg.t_herald, snapshot_times=branch_times,
                  convention=config.convention)

    def branch_state(tb: float) -> np.ndarray:
        key = min(free.snapshots, key=lambda s: abs(s - tb))
        return free.snapshots[key].matrix

    offset = config.readout_offset
    offset_resolved = False
    if offset is None:
        offset = _resolve_readout_offset(config, seg, branch_state(branch_times[0]))
        offset_resolved = True

    jobs = [(config, d, branch_state(tb), tb, offset, offset)
            for d, tb in zip(delays, branch_times)]
    points = map_jobs(_readout_job, jobs, config.workers)

    raw = np.array([p.intensity_c1 for p in points])
    pattern = FringePattern.from_raw(delays, raw, offset,
                                     force_mech_state=force_mech_state)
    vis = visibility(pattern, params.delta_Omega)

    raw_c2 = np.array([p.intensity_c2 for p in points])
    pattern_c2 = FringePattern.from_raw(delays, raw_c2, offset)
    try:
        vis_c2 = visibility(pattern_c2, params.delta_Omega).visibility
    except ValueError:
        vis_c2 = None

    return InterferenceResult(
        pattern=pattern,
        visibility=vis,
        period=vis.period,
        readout_offset=offset,
        points=points,
        herald=herald_result,
        diagnostics={
            "offset_resolved": offset_resolved,
            "visibility_cavity2": vis_c2,
            "force_mech_state": force_mech_state,
            "mech_depletion": [
                (p.mech_occupation_before, p.mech_occupation_after) for p in points
            ],
            "free_segment": free.diagnostics,
        },
    )


@dataclass
class TemperaturePoint:
    temperature: float
    n_th: float
    negativity: float
    visibility: float
    concurrence: float
    herald_probability: float


def run_temperature_sweep(config: ProtocolConfig) -> list[TemperaturePoint]:
    """Negativity and fringe visibility for each configured bath temperature."""
    temps = list(config.temperatures)
    if len(temps) == 0:
        raise ValueError("temperature list must be non-empty")
    if any(b < a for a, b in zip(temps, temps[1:])):
        raise ValueError("temperatures must be ascending")
    out = []
    for t_k in temps:
        cfg = config.with_temperature(t_k)
        seg = run_write_segment(cfg)
        inter = run_interference(cfg, seg=seg)
        her = inter.herald
        out.append(TemperaturePoint(
            temperature=t_k,
            n_th=cfg.params.n_th,
            negativity=her.negativity,
            visibility=inter.visibility.visibility,
            concurrence=her.concurrence,
            herald_probability=her.herald_probability,
        ))
    return out
